"""Group computed records into oriented homeomorphism classes and refine
into diffeomorphism classes.

Two records describe oriented-homeomorphic spaces when |r|, the residues of
s and p1 mod |r|, and the second smooth invariant coincide; adding the
first smooth invariant refines to oriented diffeomorphism.  Because
swapping k and l negates both r and s while describing the same oriented
manifold, the s residue entering the key is the jointly sign-normalized one
(:func:`ekspaces.invariants.s_residue_oriented`); a strict mode keying on
the raw integers (s, p1) is available behind a flag.

Smooth-invariant comparisons prefer exact rationals (both operands
recovered by the continued-fraction step) and fall back to circular float
comparison at the configured tolerance; a float landing within twice the
tolerance of a decision boundary raises AmbiguousMatch after one retry at
doubled precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .invariants import IntegerInvariants, s_residue_oriented
from .kreck_stolz import PrecisionConfig
from .params import ParamPair
from .rationals import RationalInvariant

SMOOTH_STRUCTURES = 28  # order of the group of homotopy 7-spheres


class AmbiguousMatch(ValueError):
    """A float-only comparison fell too close to the decision boundary."""


@dataclass(frozen=True)
class SpaceRecord:
    pair: ParamPair
    inv: IntegerInvariants
    s1: RationalInvariant
    s2: RationalInvariant
    s1_value: object  # mpfr in [-1/2, 1/2)
    s2_value: object
    prec_bits: int
    s2_imag_exp: int  # ceil(log2 |imag residual|); -99999 for an exact zero
    smallest_member: ParamPair | None = None

    def member_pair(self) -> ParamPair:
        return self.smallest_member if self.smallest_member is not None else self.pair


@dataclass(frozen=True, order=True)
class HomeoKey:
    abs_r: int
    s_mod: int   # swap-normalized residue of s mod |r|
    p1_mod: int
    s2: Fraction


@dataclass
class DiffeoClass:
    s1: Fraction
    members: list[SpaceRecord] = field(default_factory=list)


@dataclass
class HomeoClass:
    key: HomeoKey
    members: list[SpaceRecord] = field(default_factory=list)
    diffeo_classes: list[DiffeoClass] = field(default_factory=list)

    @property
    def smooth_count(self) -> int:
        return len(self.diffeo_classes)

    def s1_values(self) -> list[Fraction]:
        return [d.s1 for d in self.diffeo_classes]

    def s1_on_lattice(self) -> bool:
        """All pairwise s1 differences are multiples of 1/28 (mod 1)."""
        if not self.diffeo_classes:
            return True
        base = self.diffeo_classes[0].s1
        step = Fraction(1, SMOOTH_STRUCTURES)
        return all(((d.s1 - base) / step).denominator == 1 for d in self.diffeo_classes)


def _mod_one_sym(f: Fraction) -> Fraction:
    f = f % 1
    return f - 1 if f >= Fraction(1, 2) else f


def _circular(a: Fraction, b: Fraction) -> Fraction:
    d = (a - b) % 1
    return min(d, 1 - d)


class _ValueGrouper:
    """Incremental grouping of mod-1 values: exact rationals when available,
    circular comparison at the configured tolerance otherwise.

    Binary floats are exact dyadic rationals, so even the tolerance path is
    computed in exact arithmetic; the tolerance only expresses how far two
    renderings of one underlying invariant may drift.
    """

    def __init__(self, cfg: PrecisionConfig):
        self.tol = Fraction(1, 2**cfg.compare_bits)
        self.exact: dict[Fraction, int] = {}
        self.float_reps: list[tuple[Fraction, int]] = []
        self.labels: list[Fraction] = []

    def assign(self, rat: RationalInvariant, value) -> int:
        if rat.exact:
            f = _mod_one_sym(rat.value)
            gid = self.exact.get(f)
            if gid is None:
                gid = len(self.labels)
                self.exact[f] = gid
                self.labels.append(f)
            return gid
        v = Fraction(*value.as_integer_ratio())
        near: list[tuple[Fraction, int]] = []
        for rep, gid in self.float_reps:
            d = _circular(v, rep)
            if d < 2 * self.tol:
                near.append((d, gid))
        for f, gid in self.exact.items():
            d = _circular(v, f)
            if d < 2 * self.tol:
                near.append((d, gid))
        hits = [gid for d, gid in near if d < self.tol]
        if len(hits) > 1 or (len(near) > len(hits)):
            raise AmbiguousMatch(f"value {value} within 2x tolerance of a boundary")
        if hits:
            return hits[0]
        gid = len(self.labels)
        self.float_reps.append((v, gid))
        self.labels.append(_mod_one_sym(Fraction(rat.numerator, rat.denominator)))
        return gid


def classify(
    records: Iterable[SpaceRecord],
    cfg: PrecisionConfig = PrecisionConfig(),
    strict_s: bool = False,
    recompute: Callable[[SpaceRecord, int], SpaceRecord] | None = None,
) -> list[HomeoClass]:
    """Deterministic partition of records into oriented homeomorphism
    classes, each refined by the first smooth invariant.

    ``recompute(record, mantissa_bits)`` is invoked once, at doubled
    mantissa, for a record whose float-only comparison is ambiguous; without
    a callback AmbiguousMatch propagates.
    """
    buckets: dict[tuple, dict] = {}
    for rec in records:
        inv = rec.inv
        if strict_s:
            head = (inv.abs_r, inv.s, inv.p1)
        else:
            head = (inv.abs_r, s_residue_oriented(inv.r, inv.s), inv.p1_mod)
        bucket = buckets.setdefault(head, {"grouper": _ValueGrouper(cfg), "groups": {}})
        try:
            gid = bucket["grouper"].assign(rec.s2, rec.s2_value)
        except AmbiguousMatch:
            if recompute is None:
                raise
            rec = recompute(rec, 2 * rec.prec_bits)
            gid = bucket["grouper"].assign(rec.s2, rec.s2_value)
        bucket["groups"].setdefault(gid, []).append(rec)

    classes: list[HomeoClass] = []
    for head, bucket in buckets.items():
        for gid, members in bucket["groups"].items():
            s2_label = bucket["grouper"].labels[gid]
            if strict_s:
                abs_r, s_raw, p1_raw = head
                key = HomeoKey(abs_r, s_raw, p1_raw, s2_label)
            else:
                key = HomeoKey(head[0], head[1], head[2], s2_label)
            cls = HomeoClass(key=key, members=sorted(members, key=lambda r: (r.pair.k, r.pair.l)))
            cls.diffeo_classes = _partition_s1(cls.members, cfg, recompute)
            classes.append(cls)
    classes.sort(key=lambda c: c.key)
    return classes


def _partition_s1(members, cfg, recompute) -> list[DiffeoClass]:
    grouper = _ValueGrouper(cfg)
    groups: dict[int, DiffeoClass] = {}
    for rec in members:
        try:
            gid = grouper.assign(rec.s1, rec.s1_value)
        except AmbiguousMatch:
            if recompute is None:
                raise
            rec = recompute(rec, 2 * rec.prec_bits)
            gid = grouper.assign(rec.s1, rec.s1_value)
        cls = groups.get(gid)
        if cls is None:
            groups[gid] = cls = DiffeoClass(s1=grouper.labels[gid])
        cls.members.append(rec)
    return sorted(groups.values(), key=lambda d: d.s1)


# --- derived tables ---------------------------------------------------------


def count_table(classes: Sequence[HomeoClass]) -> list[tuple[int, int, int, int, int, int, int]]:
    """Rows (|r|, #classes, n=28, n=27, 14<=n<=26, 2<=n<=13, n=1) by |r|."""
    per_r: dict[int, list[HomeoClass]] = {}
    for c in classes:
        per_r.setdefault(c.key.abs_r, []).append(c)
    rows = []
    for abs_r in sorted(per_r):
        group = per_r[abs_r]
        n28 = n27 = mid = low = n1 = 0
        for c in group:
            n = c.smooth_count
            if n == 28:
                n28 += 1
            elif n == 27:
                n27 += 1
            elif 14 <= n <= 26:
                mid += 1
            elif 2 <= n <= 13:
                low += 1
            elif n == 1:
                n1 += 1
        rows.append((abs_r, len(group), n28, n27, mid, low, n1))
    return rows


def rep_sort_key(pair: ParamPair):
    """Total order defining 'smallest' representative: max |entry|, then
    sum of |entries|, then lexicographic (sum, k0, k1, l0, l1)."""
    entries = pair.k + pair.l
    return (
        max(abs(v) for v in entries),
        sum(abs(v) for v in entries),
        (pair.total, pair.k[0], pair.k[1], pair.l[0], pair.l[1]),
    )


@dataclass(frozen=True)
class RepRow:
    key: HomeoKey
    s1: Fraction
    pair: ParamPair


def smallest_reps(
    classes: Sequence[HomeoClass],
    abs_r: int,
    s2_nonneg: bool = True,
) -> list[RepRow]:
    """Minimal representative of every (class, smooth structure) with the
    given |r|, ordered by (class key, s1)."""
    rows = []
    for c in sorted(classes, key=lambda c: c.key):
        if c.key.abs_r != abs_r:
            continue
        if s2_nonneg and c.key.s2 < 0:
            continue
        for d in c.diffeo_classes:
            best = min((rec.member_pair() for rec in d.members), key=rep_sort_key)
            rows.append(RepRow(key=c.key, s1=d.s1, pair=best))
    return rows


@dataclass(frozen=True)
class PatternRow:
    abs_r: int
    s_mod: int
    p1_mod: int
    s2_base: Fraction
    s2_step: Fraction | None  # None when a single value was seen
    s2_equally_spaced: bool
    s1_bases: tuple[Fraction, ...]  # minimal s1 per class, ordered by s2
    s1_on_lattice: bool


def orbit_summary(classes: Sequence[HomeoClass]) -> list[PatternRow]:
    """Per (|r|, s, p1) family: spacing of the s2 values and, per class, the
    base of the s1 lattice.  Unequal spacing is reported, not fatal."""
    families: dict[tuple[int, int, int], list[HomeoClass]] = {}
    for c in classes:
        families.setdefault((c.key.abs_r, c.key.s_mod, c.key.p1_mod), []).append(c)
    rows = []
    for fam_key in sorted(families):
        fam = sorted(families[fam_key], key=lambda c: c.key.s2)
        values = [c.key.s2 for c in fam]
        step = None
        equal = True
        if len(values) > 1:
            gaps = [b - a for a, b in zip(values, values[1:])]
            gaps.append(values[0] + 1 - values[-1])  # circular wrap
            step = min(gaps)
            equal = all(g == step for g in gaps)
            base = values[0] % step
        else:
            base = values[0]
        s1_bases = tuple(min(c.s1_values()) if c.diffeo_classes else Fraction(0) for c in fam)
        rows.append(
            PatternRow(
                abs_r=fam_key[0],
                s_mod=fam_key[1],
                p1_mod=fam_key[2],
                s2_base=base,
                s2_step=step,
                s2_equally_spaced=equal,
                s1_bases=s1_bases,
                s1_on_lattice=all(c.s1_on_lattice() for c in fam),
            )
        )
    return rows
