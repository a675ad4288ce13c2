"""Render classification tables and the growth-rate regression."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .classify import HomeoClass, PatternRow, RepRow, count_table, orbit_summary, smallest_reps


class DegenerateFit(ValueError):
    """Fewer than two points were supplied to the regression."""


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    residual_norm: float
    parity_split: tuple["RegressionFit", "RegressionFit"] | None = None


def loglog_fit(points: Sequence[tuple[float, float]], parity_split: bool = False) -> RegressionFit:
    """Ordinary least squares on (ln k, ln value); values must be positive.

    With ``parity_split``, two independent fits for even and odd k are
    attached (the marginal counts have parity-dependent coefficients).
    """
    pts = [(k, v) for k, v in points]
    if len(pts) < 2:
        raise DegenerateFit(f"need >= 2 points, got {len(pts)}")
    if any(v <= 0 or k <= 0 for k, v in pts):
        raise ValueError("log-log fit needs positive coordinates")
    x = np.log([k for k, _ in pts])
    y = np.log([v for _, v in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.sum((y - (slope * x + intercept)) ** 2)))
    split = None
    if parity_split:
        even = [(k, v) for k, v in pts if int(k) % 2 == 0]
        odd = [(k, v) for k, v in pts if int(k) % 2 == 1]
        split = (loglog_fit(even), loglog_fit(odd))
    return RegressionFit(float(slope), float(intercept), resid, split)


def _fmt_frac(f) -> str:
    return f"{f.numerator}/{f.denominator}"


def render_count_table(rows: Iterable[tuple[int, int, int, int, int, int, int]]) -> str:
    """Counts per |r|: class count and smooth-structure occupancy buckets."""
    out = ["|r|\t#Top\t28\t27\t14-26\t2-13\t1"]
    for row in rows:
        out.append("\t".join(str(v) if v else "-" for v in row[:2])
                   + "\t" + "\t".join(str(v) if v else "-" for v in row[2:]))
    return "\n".join(out) + "\n"


def render_reps_table(rows: Sequence[RepRow]) -> str:
    """Representative blocks, one per class, rows (sum, k0, k1, l0, l1, s1)."""
    out = []
    current = None
    for row in rows:
        if row.key != current:
            current = row.key
            out.append(f"# class |r|={row.key.abs_r} s={row.key.s_mod} "
                       f"p1={row.key.p1_mod} s2={_fmt_frac(row.key.s2)}")
            out.append("sum\tk0\tk1\tl0\tl1\ts1")
        p = row.pair
        out.append(f"{p.total}\t{p.k[0]}\t{p.k[1]}\t{p.l[0]}\t{p.l[1]}\t{_fmt_frac(row.s1)}")
    return "\n".join(out) + "\n"


def render_pattern_table(rows: Sequence[PatternRow]) -> str:
    """Per-family orbit structure of the smooth invariants."""
    out = ["|r|\ts\tp1\ts2\ts1"]
    for row in rows:
        if row.s2_step is None:
            s2 = _fmt_frac(row.s2_base)
        else:
            s2 = f"{_fmt_frac(row.s2_base)}+k*{_fmt_frac(row.s2_step)}"
            if not row.s2_equally_spaced:
                s2 += " (unequal spacing)"
        s1_base = _fmt_frac(min(row.s1_bases)) if row.s1_bases else "-"
        s1 = f"{s1_base}+l/28" if row.s1_on_lattice else f"{s1_base} (off lattice)"
        out.append(f"{row.abs_r}\t{row.s_mod}\t{row.p1_mod}\t{s2}\t{s1}")
    return "\n".join(out) + "\n"


def render_growth_table(rows: Iterable[tuple[int, int, int]]) -> str:
    out = ["k\tN\tdN"]
    for k, n, dn in rows:
        out.append(f"{k}\t{n}\t{dn}")
    return "\n".join(out) + "\n"


def write_plot_data(path: str, points: Iterable[tuple[float, float]]) -> None:
    """Two-column text file, one point per line (gnuplot-ready)."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for x, y in points:
            fh.write(f"{x} {y}\n")


def standard_reports(classes: Sequence[HomeoClass], abs_r_values: Sequence[int] | None = None):
    """Bundle (counts text, reps text, patterns text) for the given classes."""
    counts = render_count_table(count_table(classes))
    reps_rows: list[RepRow] = []
    rs = sorted({c.key.abs_r for c in classes}) if abs_r_values is None else list(abs_r_values)
    for abs_r in rs:
        reps_rows.extend(smallest_reps(classes, abs_r))
    reps = render_reps_table(reps_rows)
    patterns = render_pattern_table(orbit_summary(classes))
    return counts, reps, patterns
