"""Stage orchestration: enumerate -> invariants -> classify.

The census path deduplicates the raw stream by symmetry orbit before the
expensive smooth-invariant stage: all orbit members share their oriented
invariants, so one representative per orbit (plus its orientation mirror,
computed directly through the full pipeline, never via a sign rule) carries
the whole class structure.  The smallest enumerated description of either
orientation is kept alongside each record for the representative tables;
note that mirror descriptions keep their verbatim negated coordinates, so
their sums land in [-2, 0] just as the reference tables print them.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass

import gmpy2

from .classify import HomeoClass, SpaceRecord, classify, rep_sort_key
from .exact import CoprimalityTable
from .invariants import integer_invariants, invariant_r
from .kreck_stolz import PrecisionConfig, ks_invariants
from .params import ConditionCWitness, ParamPair, canonical_form
from .rationals import rationalize
from .records import IMAG_ZERO_EXP
from .search import SearchBox, enumerate_box


def imag_exponent(residual) -> int:
    if residual == 0:
        return IMAG_ZERO_EXP
    return int(gmpy2.ceil(gmpy2.log2(abs(residual))))


def compute_record(
    pair: ParamPair,
    cfg: PrecisionConfig,
    table: CoprimalityTable,
    den_bound: int = 10**8,
    tol: float = 2.0**-80,
    witness: ConditionCWitness | None = None,
    smallest_member: ParamPair | None = None,
) -> SpaceRecord:
    """Full record for one pair: exact invariants, smooth invariants at the
    configured precision, and their rationalizations."""
    inv = integer_invariants(pair)
    ks = ks_invariants(pair, cfg, table, witness=witness)
    return SpaceRecord(
        pair=pair,
        inv=inv,
        s1=rationalize(ks.s1.value, den_bound, tol),
        s2=rationalize(ks.s2.value, den_bound, tol),
        s1_value=ks.s1.value,
        s2_value=ks.s2.value,
        prec_bits=cfg.mantissa_bits,
        s2_imag_exp=imag_exponent(ks.s2_imag_residual),
        smallest_member=smallest_member,
    )


def make_recompute(table: CoprimalityTable, den_bound: int = 10**8):
    """Recompute callback for classify(): same record at a higher mantissa."""

    def recompute(rec: SpaceRecord, mantissa_bits: int) -> SpaceRecord:
        cfg = PrecisionConfig(mantissa_bits=mantissa_bits,
                              compare_bits=min(100, mantissa_bits - 30))
        return compute_record(rec.pair, cfg, table, den_bound,
                              smallest_member=rec.smallest_member)

    return recompute


# --- parallel record computation -------------------------------------------

_WORKER: dict = {}


def _init_worker(table, cfg, den_bound):
    _WORKER["table"] = table
    _WORKER["cfg"] = cfg
    _WORKER["den_bound"] = den_bound


def _record_task(pair: ParamPair) -> SpaceRecord:
    return compute_record(pair, _WORKER["cfg"], _WORKER["table"], _WORKER["den_bound"])


def _record_task_safe(pair: ParamPair):
    try:
        return _record_task(pair), None
    except Exception as exc:  # per-record tolerance: long runs survive bad rows
        return None, f"{type(exc).__name__}: {exc}"


def compute_records(
    pairs: list[ParamPair],
    cfg: PrecisionConfig,
    table: CoprimalityTable,
    den_bound: int = 10**8,
    jobs: int | None = None,
) -> list[SpaceRecord]:
    """Records for ``pairs`` in input order; ``jobs`` only changes wall time."""
    if not jobs or jobs <= 1 or len(pairs) < 4:
        _init_worker(table, cfg, den_bound)
        return [_record_task(p) for p in pairs]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(jobs, initializer=_init_worker, initargs=(table, cfg, den_bound)) as pool:
        return pool.map(_record_task, pairs, chunksize=max(1, len(pairs) // (8 * jobs)))


def compute_records_safe(
    pairs: list[ParamPair],
    cfg: PrecisionConfig,
    table: CoprimalityTable,
    den_bound: int = 10**8,
    jobs: int | None = None,
):
    """Like :func:`compute_records` but collecting per-record failures
    instead of aborting; returns (records-with-None-gaps, [(pair, message)])."""
    if not jobs or jobs <= 1 or len(pairs) < 4:
        _init_worker(table, cfg, den_bound)
        outcomes = [_record_task_safe(p) for p in pairs]
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(jobs, initializer=_init_worker, initargs=(table, cfg, den_bound)) as pool:
            outcomes = pool.map(_record_task_safe, pairs,
                                chunksize=max(1, len(pairs) // (8 * jobs)))
    records = [rec for rec, _ in outcomes]
    errors = [(pair, msg) for pair, (rec, msg) in zip(pairs, outcomes) if msg is not None]
    return records, errors


# --- orbit census -----------------------------------------------------------


@dataclass
class Census:
    classes: list[HomeoClass]
    records: list[SpaceRecord]
    raw_count: int
    orbit_count: int
    even_r_violations: list[ParamPair]


def census(
    box: SearchBox,
    table: CoprimalityTable,
    cfg: PrecisionConfig = PrecisionConfig(),
    den_bound: int = 10**8,
    jobs: int | None = None,
    strict_s: bool = False,
) -> Census:
    """Enumerate the box, reduce to one representative per symmetry orbit,
    compute both orientations' records and classify them."""
    orbits: dict[ParamPair, list] = {}
    raw = 0
    even_r: list[ParamPair] = []
    for pair in enumerate_box(box, table, jobs=jobs):
        raw += 1
        if invariant_r(pair) % 2 == 0:
            even_r.append(pair)  # impossible for genuine spaces; surfaced, not dropped
        canonical, orient = canonical_form(pair)
        slot = orbits.setdefault(canonical, [None, None])
        mirror = pair.negated()
        direct_idx, mirror_idx = (0, 1) if orient > 0 else (1, 0)
        if slot[direct_idx] is None or rep_sort_key(pair) < rep_sort_key(slot[direct_idx]):
            slot[direct_idx] = pair
        if slot[mirror_idx] is None or rep_sort_key(mirror) < rep_sort_key(slot[mirror_idx]):
            slot[mirror_idx] = mirror

    ordered = sorted(orbits)
    tasks: list[ParamPair] = []
    for canonical in ordered:
        tasks.append(canonical)
        tasks.append(canonical.negated())
    computed = compute_records(tasks, cfg, table, den_bound, jobs=jobs)

    records: list[SpaceRecord] = []
    for i, canonical in enumerate(ordered):
        plus, minus = computed[2 * i], computed[2 * i + 1]
        slot = orbits[canonical]
        if slot[0] is not None:
            records.append(_with_member(plus, slot[0]))
        if slot[1] is not None:
            records.append(_with_member(minus, slot[1]))

    classes = classify(records, cfg, strict_s=strict_s, recompute=make_recompute(table, den_bound))
    return Census(
        classes=classes,
        records=records,
        raw_count=raw,
        orbit_count=len(ordered),
        even_r_violations=even_r,
    )


def _with_member(rec: SpaceRecord, member: ParamPair) -> SpaceRecord:
    return SpaceRecord(
        pair=rec.pair, inv=rec.inv, s1=rec.s1, s2=rec.s2,
        s1_value=rec.s1_value, s2_value=rec.s2_value,
        prec_bits=rec.prec_bits, s2_imag_exp=rec.s2_imag_exp,
        smallest_member=member,
    )
