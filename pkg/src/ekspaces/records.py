"""Bit-faithful on-disk record files, sharded by |r|.

One TSV file per |r| value, named ``<prefix>.r<R>.tsv``: a versioned header
line, an optional echoed configuration line, a column-name line, then one
record per row sorted by (|r|, s_mod, p1_mod, sum, k0, k1, l0, l1).  ASCII,
LF line endings.

The two smooth invariants are serialized as decimals carrying
ceil(mantissa_bits * log10(2)) + 2 significant digits, which makes the
decimal-to-binary round trip the identity at the stated precision; a
write-time self-check enforces that.  Records produced before the smooth
stage carry ``prec_bits = 0`` and ``.`` placeholders.
"""

from __future__ import annotations

import math
import os
from typing import Iterable, Iterator

import gmpy2
from gmpy2 import mpfr

from .classify import SpaceRecord
from .invariants import IntegerInvariants, linking_form
from .params import ParamPair
from .rationals import RationalInvariant

FORMAT_LINE = "# ekspaces-records v1"

COLUMNS = (
    "sum", "k0", "k1", "k2", "l0", "l1", "l2",
    "r", "s", "p1", "s_mod", "p1_mod",
    "prec_bits", "s1_dec", "s2_dec",
    "s1_num", "s1_den", "s2_num", "s2_den",
    "s1_exact", "s2_exact", "s2_imag_exp",
)

IMAG_ZERO_EXP = -99999  # sentinel exponent for an exactly zero residual


class FormatError(ValueError):
    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class SerializationPrecisionLoss(ArithmeticError):
    """A decimal rendering failed to reproduce its binary value."""


def decimal_digits(prec_bits: int) -> int:
    return math.ceil(prec_bits * 0.30103) + 2


def format_mpfr(x: mpfr, prec_bits: int) -> str:
    if x == 0:
        return "0"
    digits, exp, _ = x.digits(10, decimal_digits(prec_bits))
    sign = "-" if digits.startswith("-") else ""
    mantissa = digits.lstrip("-")
    out = f"{sign}0.{mantissa}e{exp}"
    if mpfr(out, prec_bits) != x:
        raise SerializationPrecisionLoss(f"{out} does not round-trip at {prec_bits} bits")
    return out


def parse_mpfr(text: str, prec_bits: int) -> mpfr:
    return mpfr(text, max(prec_bits, 2))


def _sort_key(rec: SpaceRecord):
    p = rec.pair
    return (rec.inv.abs_r, rec.inv.s_mod, rec.inv.p1_mod, p.total, p.k[0], p.k[1], p.l[0], p.l[1])


def _row(rec: SpaceRecord) -> str:
    p = rec.pair
    inv = rec.inv
    if rec.prec_bits:
        smooth = (
            str(rec.prec_bits),
            format_mpfr(rec.s1_value, rec.prec_bits),
            format_mpfr(rec.s2_value, rec.prec_bits),
            str(rec.s1.numerator), str(rec.s1.denominator),
            str(rec.s2.numerator), str(rec.s2.denominator),
            str(int(rec.s1.exact)), str(int(rec.s2.exact)),
            str(rec.s2_imag_exp),
        )
    else:
        smooth = ("0", ".", ".", ".", ".", ".", ".", ".", ".", ".")
    fields = (
        str(p.total), str(p.k[0]), str(p.k[1]), str(p.k[2]),
        str(p.l[0]), str(p.l[1]), str(p.l[2]),
        str(inv.r), str(inv.s), str(inv.p1), str(inv.s_mod), str(inv.p1_mod),
    ) + smooth
    return "\t".join(fields)


def write_records(
    records: Iterable[SpaceRecord],
    path_prefix: str,
    config_echo: dict[str, str] | None = None,
) -> list[str]:
    """Write one sorted shard per |r|; returns the file paths written."""
    shards: dict[int, list[SpaceRecord]] = {}
    for rec in records:
        shards.setdefault(rec.inv.abs_r, []).append(rec)
    paths = []
    header_cfg = ""
    if config_echo:
        parts = " ".join(f"{k}={config_echo[k]}" for k in sorted(config_echo))
        header_cfg = f"# config: {parts}\n"
    directory = os.path.dirname(path_prefix)
    if directory:
        os.makedirs(directory, exist_ok=True)
    for abs_r in sorted(shards):
        path = f"{path_prefix}.r{abs_r}.tsv"
        rows = sorted(shards[abs_r], key=_sort_key)
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(FORMAT_LINE + "\n")
            fh.write(header_cfg)
            fh.write("\t".join(COLUMNS) + "\n")
            for rec in rows:
                fh.write(_row(rec) + "\n")
        paths.append(path)
    return paths


def read_records(paths: Iterable[str]) -> Iterator[SpaceRecord]:
    """Faithful reconstruction of written shards, decimals re-parsed at their
    own recorded precision."""
    for path in paths:
        with open(path, "r", encoding="ascii") as fh:
            line = fh.readline()
            if line.rstrip("\n") != FORMAT_LINE:
                raise FormatError(path, 1, f"unrecognized header {line.strip()!r}")
            line_no = 1
            saw_columns = False
            for line in fh:
                line_no += 1
                if line.startswith("#"):
                    continue
                line = line.rstrip("\n")
                if not saw_columns:
                    if tuple(line.split("\t")) != COLUMNS:
                        raise FormatError(path, line_no, "column header mismatch")
                    saw_columns = True
                    continue
                try:
                    yield _parse_row(line)
                except FormatError:
                    raise
                except Exception as exc:
                    raise FormatError(path, line_no, str(exc)) from exc


def _parse_row(line: str) -> SpaceRecord:
    fields = line.split("\t")
    if len(fields) != len(COLUMNS):
        raise ValueError(f"expected {len(COLUMNS)} fields, got {len(fields)}")
    total, k0, k1, k2, l0, l1, l2, r, s, p1, s_mod, p1_mod = (int(v) for v in fields[:12])
    pair = ParamPair((k0, k1, k2), (l0, l1, l2))
    if pair.total != total:
        raise ValueError(f"sum column {total} inconsistent with triples")
    inv = IntegerInvariants(
        r=r, s=s, p1=p1, s_mod=s_mod, p1_mod=p1_mod, linking=linking_form(r, s)
    )
    prec_bits = int(fields[12])
    if prec_bits == 0:
        return SpaceRecord(
            pair=pair, inv=inv, s1=None, s2=None, s1_value=None, s2_value=None,
            prec_bits=0, s2_imag_exp=IMAG_ZERO_EXP,
        )
    s1_value = parse_mpfr(fields[13], prec_bits)
    s2_value = parse_mpfr(fields[14], prec_bits)
    s1 = RationalInvariant(int(fields[15]), int(fields[16]), 0.0, bool(int(fields[19])))
    s2 = RationalInvariant(int(fields[17]), int(fields[18]), 0.0, bool(int(fields[20])))
    return SpaceRecord(
        pair=pair, inv=inv, s1=s1, s2=s2,
        s1_value=s1_value, s2_value=s2_value,
        prec_bits=prec_bits, s2_imag_exp=int(fields[21]),
    )
