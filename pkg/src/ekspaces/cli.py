"""Command-line pipeline: enumerate -> invariants -> classify -> report,
plus a micro-benchmark.

Artifacts are plain text with stable ordering; every output file header
echoes the semantic run configuration (worker count and output paths are
execution details and deliberately excluded, so runs with different --jobs
are byte-identical).
"""

from __future__ import annotations

import argparse
import glob
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .classify import classify
from .exact import CoprimalityTable
from .invariants import integer_invariants
from .kreck_stolz import PrecisionConfig
from .params import NoConditionC, ParamPair, condition_c, is_admissible, make_params
from .pipeline import compute_record, compute_records_safe, make_recompute
from .rationals import rationalize
from .records import read_records, write_records
from .reporting import (
    loglog_fit,
    render_count_table,
    render_growth_table,
    render_pattern_table,
    render_reps_table,
    standard_reports,
    write_plot_data,
)
from .search import SearchBox, enumerate_box, growth_counts


@dataclass
class RunConfig:
    command: str
    half_width: int = 0
    sum_lo: int = 0
    sum_hi: int = 2
    r_filter: frozenset[int] | None = None
    mantissa_bits: int = 130
    compare_bits: int = 100
    den_bound: int = 10**8
    table_size: int = 2000
    jobs: int | None = None
    canonical_only: bool = False
    strict_s: bool = False
    inputs: tuple[str, ...] = ()
    out: str | None = None

    def precision(self) -> PrecisionConfig:
        return PrecisionConfig(mantissa_bits=self.mantissa_bits, compare_bits=self.compare_bits)

    def echo(self) -> dict[str, str]:
        r = "" if self.r_filter is None else ",".join(str(v) for v in sorted(self.r_filter))
        return {
            "version": __version__,
            "command": self.command,
            "half_width": str(self.half_width),
            "sum_lo": str(self.sum_lo),
            "sum_hi": str(self.sum_hi),
            "r_filter": r or "all",
            "prec": str(self.mantissa_bits),
            "compare_bits": str(self.compare_bits),
            "den_bound": str(self.den_bound),
            "table_size": str(self.table_size),
            "canonical_only": str(int(self.canonical_only)),
            "strict_s": str(int(self.strict_s)),
        }


def _parse_r_specs(specs: list[str] | None) -> frozenset[int] | None:
    if not specs:
        return None
    values: set[int] = set()
    for spec in specs:
        for chunk in spec.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if ".." in chunk:
                lo, hi = chunk.split("..")
                values.update(range(int(lo), int(hi) + 1))
            else:
                values.add(int(chunk))
    return frozenset(abs(v) for v in values)


def _parse_triple(text: str) -> tuple[int, int, int]:
    parts = [int(v) for v in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three integers, got {text!r}")
    return tuple(parts)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--prec", type=int, default=130, help="mantissa bits (default 130)")
    p.add_argument("--compare-bits", type=int, default=100)
    p.add_argument("--den-bound", type=int, default=10**8)
    p.add_argument("--table-size", type=int, default=2000)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--strict-s", action="store_true",
                   help="match raw s and p1 integers instead of residues mod |r|")
    p.add_argument("-o", "--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="ekspaces")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="stream the box and write integer-invariant shards")
    p.add_argument("--half-width", type=int, required=True)
    p.add_argument("--sum-lo", type=int, default=0)
    p.add_argument("--sum-hi", type=int, default=2)
    p.add_argument("--r", action="append", default=None, help="admitted |r|: '3', '3,5' or '3..9'")
    p.add_argument("--canonical-only", action="store_true")
    _add_common(p)

    p = sub.add_parser("invariants", help="add smooth invariants to shards, or one-shot on a pair")
    p.add_argument("--in", dest="inputs", action="append", default=None,
                   help="shard path prefix (repeatable)")
    p.add_argument("--k", type=_parse_triple, default=None)
    p.add_argument("--l", type=_parse_triple, default=None)
    _add_common(p)

    p = sub.add_parser("classify", help="group shard records into classes")
    p.add_argument("--in", dest="inputs", action="append", required=True)
    _add_common(p)

    p = sub.add_parser("report", help="render counts/reps/patterns tables (and growth data)")
    p.add_argument("--in", dest="inputs", action="append", default=None)
    p.add_argument("--r", action="append", default=None)
    p.add_argument("--growth-widths", default=None,
                   help="e.g. '25..200': also compute growth counts over these box widths")
    _add_common(p)

    p = sub.add_parser("bench", help="throughput of the search and invariant stages")
    p.add_argument("--half-width", type=int, default=25)
    _add_common(p)
    return top


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        half_width=getattr(args, "half_width", 0),
        sum_lo=getattr(args, "sum_lo", 0),
        sum_hi=getattr(args, "sum_hi", 2),
        r_filter=_parse_r_specs(getattr(args, "r", None)),
        mantissa_bits=args.prec,
        compare_bits=args.compare_bits,
        den_bound=args.den_bound,
        table_size=args.table_size,
        jobs=args.jobs,
        canonical_only=getattr(args, "canonical_only", False),
        strict_s=args.strict_s,
        inputs=tuple(getattr(args, "inputs", None) or ()),
        out=args.out,
    )


def _shard_paths(prefixes) -> list[str]:
    paths: list[str] = []
    for prefix in prefixes:
        hits = sorted(glob.glob(f"{prefix}.r*.tsv"))
        if not hits:
            raise FileNotFoundError(f"no shards match {prefix}.r*.tsv")
        paths.extend(hits)
    return paths


def cmd_enumerate(cfg: RunConfig) -> int:
    table = CoprimalityTable.build(cfg.table_size)
    box = SearchBox(cfg.half_width, cfg.sum_lo, cfg.sum_hi, cfg.r_filter)
    from .classify import SpaceRecord
    from .records import IMAG_ZERO_EXP

    records = []
    for pair in enumerate_box(box, table, jobs=cfg.jobs, canonical_only=cfg.canonical_only):
        records.append(SpaceRecord(
            pair=pair, inv=integer_invariants(pair), s1=None, s2=None,
            s1_value=None, s2_value=None, prec_bits=0, s2_imag_exp=IMAG_ZERO_EXP,
        ))
    out = cfg.out or "ekspaces"
    paths = write_records(records, out, cfg.echo())
    print(f"{len(records)} pairs -> {len(paths)} shard(s) at {out}.r*.tsv")
    return 0


def cmd_invariants(cfg: RunConfig, args) -> int:
    table = CoprimalityTable.build(cfg.table_size)
    pcfg = cfg.precision()
    if args.k is not None or args.l is not None:
        if args.k is None or args.l is None:
            print("one-shot mode needs both --k and --l", file=sys.stderr)
            return 2
        try:
            pair = make_params(args.k, args.l)
        except ValueError as exc:
            print(f"invalid pair: {exc}", file=sys.stderr)
            return 2
        if not is_admissible(pair, table):
            print(f"k={pair.k} l={pair.l}: not admissible", file=sys.stderr)
            return 1
        if not condition_c(pair, table):
            print(f"k={pair.k} l={pair.l}: no condition-C line", file=sys.stderr)
            return 1
        rec = compute_record(pair, pcfg, table, cfg.den_bound)
        inv = rec.inv
        print(f"k = {pair.k}  l = {pair.l}")
        print(f"r = {inv.r}  s = {inv.s}  p1 = {inv.p1}")
        print(f"s mod |r| = {inv.s_mod}  p1 mod |r| = {inv.p1_mod}  linking = {inv.linking}")
        print(f"s1 = {rec.s1}  s2 = {rec.s2}  ({rec.prec_bits} bits)")
        return 0

    if not cfg.inputs:
        print("batch mode needs --in", file=sys.stderr)
        return 2
    incoming = list(read_records(_shard_paths(cfg.inputs)))
    pairs = [rec.pair for rec in incoming]
    results, errors = compute_records_safe(pairs, pcfg, table, cfg.den_bound, jobs=cfg.jobs)
    records = [rec for rec in results if rec is not None]
    for pair, message in errors:
        print(f"error: k={pair.k} l={pair.l}: {message}", file=sys.stderr)
    out = cfg.out or (cfg.inputs[0] + ".ks")
    paths = write_records(records, out, cfg.echo())
    print(f"{len(records)} records ({len(errors)} errors) -> {out}.r*.tsv ({len(paths)} shards)")
    return 1 if errors else 0


def _load_classified(cfg: RunConfig):
    table = CoprimalityTable.build(cfg.table_size)
    records = [rec for rec in read_records(_shard_paths(cfg.inputs))]
    missing = [rec for rec in records if rec.prec_bits == 0]
    if missing:
        raise ValueError(
            f"{len(missing)} records lack smooth invariants; run `ekspaces invariants` first")
    classes = classify(records, cfg.precision(), strict_s=cfg.strict_s,
                       recompute=make_recompute(table, cfg.den_bound))
    return classes


def cmd_classify(cfg: RunConfig) -> int:
    classes = _load_classified(cfg)
    out = cfg.out or "ekspaces"
    path = f"{out}.classes.tsv"
    lines = ["# ekspaces-classes v1"]
    echo = " ".join(f"{k}={v}" for k, v in sorted(cfg.echo().items()))
    lines.append(f"# config: {echo}")
    lines.append("abs_r\ts_mod\tp1_mod\ts2\tsmooth_count\tmembers\ts1_values")
    for c in classes:
        s1s = ",".join(f"{d.s1.numerator}/{d.s1.denominator}" for d in c.diffeo_classes)
        lines.append(
            f"{c.key.abs_r}\t{c.key.s_mod}\t{c.key.p1_mod}"
            f"\t{c.key.s2.numerator}/{c.key.s2.denominator}"
            f"\t{c.smooth_count}\t{len(c.members)}\t{s1s}"
        )
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"{len(classes)} classes -> {path}")
    return 0


def cmd_report(cfg: RunConfig, args) -> int:
    out = cfg.out or "ekspaces"
    wrote = []
    if cfg.inputs:
        classes = _load_classified(cfg)
        counts, reps, patterns = standard_reports(
            classes, sorted(cfg.r_filter) if cfg.r_filter else None)
        for name, text in (("counts", counts), ("reps", reps), ("patterns", patterns)):
            path = f"{out}.{name}.txt"
            with open(path, "w", encoding="ascii", newline="\n") as fh:
                fh.write(text)
            wrote.append(path)
    if args.growth_widths:
        lo, hi = (int(v) for v in args.growth_widths.split(".."))
        table = CoprimalityTable.build(cfg.table_size)
        rows = growth_counts(range(lo, hi + 1), table,
                             sum_lo=cfg.sum_lo, sum_hi=cfg.sum_hi, jobs=cfg.jobs)
        path = f"{out}.growth.txt"
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(render_growth_table(rows))
        wrote.append(path)
        fit = loglog_fit([(k, dn) for k, _, dn in rows if dn > 0], parity_split=True)
        path = f"{out}.growth.fit.txt"
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(f"slope {fit.slope!r}\nintercept {fit.intercept!r}\n")
            even, odd = fit.parity_split
            fh.write(f"even_slope {even.slope!r}\nodd_slope {odd.slope!r}\n")
        write_plot_data(f"{out}.growth.dat", [(k, dn) for k, _, dn in rows])
        wrote.append(f"{out}.growth.dat")
    if not wrote:
        print("nothing to report: give --in and/or --growth-widths", file=sys.stderr)
        return 2
    print("wrote " + " ".join(wrote))
    return 0


def cmd_bench(cfg: RunConfig) -> int:
    table = CoprimalityTable.build(cfg.table_size)
    box = SearchBox(cfg.half_width, cfg.sum_lo, cfg.sum_hi)
    t0 = time.perf_counter()
    pairs = list(enumerate_box(box, table, jobs=cfg.jobs))
    dt_total = time.perf_counter() - t0
    volume = 3 * (2 * cfg.half_width + 1) ** 4  # scanned candidate tuples
    print(f"search: {len(pairs)} pairs from ~{volume:.3g} candidates "
          f"in {dt_total:.3f}s ({volume / max(dt_total, 1e-9):.3g} candidates/s)")
    sample = pairs[: min(50, len(pairs))]
    if sample:
        pcfg = cfg.precision()
        t0 = time.perf_counter()
        for pair in sample:
            compute_record(pair, pcfg, table, cfg.den_bound)
        dt = time.perf_counter() - t0
        print(f"invariants: {len(sample)} records in {dt:.3f}s "
              f"({len(sample) / max(dt, 1e-9):.3g} records/s at {cfg.mantissa_bits} bits)")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _config_from_args(args)
    try:
        if args.command == "enumerate":
            return cmd_enumerate(cfg)
        if args.command == "invariants":
            return cmd_invariants(cfg, args)
        if args.command == "classify":
            return cmd_classify(cfg)
        if args.command == "report":
            return cmd_report(cfg, args)
        if args.command == "bench":
            return cmd_bench(cfg)
    except (ValueError, FileNotFoundError, NoConditionC) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
