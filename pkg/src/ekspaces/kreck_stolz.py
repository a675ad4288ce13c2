"""Arbitrary-precision smooth invariants via lens-space trigonometric sums.

For a pair whose difference matrix has a condition-C leftmost column
(:func:`ekspaces.params.normalize_for_kruggel` arranges this), the two
smooth invariants combine closed contributions in the auxiliary integers

    q = A00^2 + A10^2 + A20^2 + A01^2 + A11^2 + A21^2 - (l0 - l1)^2
    w = r * A00 * A10 * A20          (never zero for these spaces)

with invariants of the three lens spaces

    L0 = L(A00; A10, A20, A11, A21)
    L1 = L(A10; A00, A20, A01, A21)
    L2 = L(A20; A00, A10, A01, A11)

whose invariants are finite cot/csc product sums over the |p|-th roots of
unity:

    s1(L) = (1/(2^5*7*p)) * sum_{k=1}^{|p|-1} prod_j cot(k*pi*p_j/p)
          + (1/(2^4*p))   * sum_{k=1}^{|p|-1} prod_j csc(k*pi*p_j/p)
    s2(L) = (1/(2^4*p))   * sum_{k=1}^{|p|-1} (e^{2*pi*i*k/p} - 1)
                                             * prod_j csc(k*pi*p_j/p)

and the space's invariants are

    s1 = sign(w)/(2^5*7) - q^2/(2^7*7*w) - sum_i s1(L_i)
    s2 = (q - 2)/(2^4*3*w)              - sum_i s2(L_i)

Reporting convention: a space's invariant x is published as (x mod 1) - 1/2,
i.e. reduced into [0, 1) and then shifted down by a half.  The shift is the
convention under which the reference classification values in this project
were produced; it is a constant offset mod 1, so it changes no equality.
Per-lens values are reported with the plain value-preserving reduction into
[-1/2, 1/2).

All trigonometry is done in MPFR at a configurable mantissa (default 130
bits).  Angles are exact rational multiples of pi, range-reduced in integer
arithmetic before a single rendering, never accumulated by repeated
addition: near-singular terms reach magnitude ~(|p|/pi)^4 and sloppy angles
would lose those bits.  Every invariant is recomputed with extra guard bits
and the two runs must agree to the comparison tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import gmpy2
from gmpy2 import mpfr

from .exact import sym_poly
from .params import ConditionCWitness, CoprimalityTable, ParamPair, difference_matrix, normalize_for_kruggel

Quad = tuple[int, int, int, int]


class InvalidLens(ValueError):
    """Lens parameters violate p != 0 / coprimality (a bug upstream)."""


class ZeroW(ValueError):
    """w = r*A00*A10*A20 vanished: the input is not a normalized space."""


class PrecisionLoss(ArithmeticError):
    """Guard-bit recomputation disagreed beyond the comparison tolerance."""


class ImaginaryResidual(ArithmeticError):
    """The complex total of the second invariant failed to be real."""


@dataclass(frozen=True)
class PrecisionConfig:
    mantissa_bits: int = 130
    compare_bits: int = 100
    guard_bits: int = 64
    self_check: bool = True

    def __post_init__(self):
        if not 1 <= self.compare_bits < self.mantissa_bits:
            raise ValueError("compare_bits must be positive and below mantissa_bits")

    @property
    def compare_tolerance(self) -> mpfr:
        return mpfr(2) ** (-self.compare_bits)


@dataclass(frozen=True)
class LensSpace:
    p: int
    weights: Quad


def make_lens(p: int, weights) -> LensSpace:
    """Validated lens space L(p; p0, p1, p2, p3).

    A zero weight is tolerated only for |p| = 1, where the invariant sums
    are empty (freeness forces exactly that degeneracy in the pipeline).
    """
    weights = tuple(int(w) for w in weights)
    if p == 0 or len(weights) != 4:
        raise InvalidLens(f"p={p}, weights={weights}")
    if abs(p) != 1:
        for w in weights:
            if w == 0 or gcd(p, w) != 1:
                raise InvalidLens(f"gcd({p}, {w}) != 1")
    return LensSpace(p=int(p), weights=weights)


@dataclass(frozen=True)
class ModOneReal:
    """An arbitrary-precision real in [-1/2, 1/2) with its mantissa width."""

    value: mpfr
    precision: int

    def __post_init__(self):
        if not (mpfr("-0.5") <= self.value < mpfr("0.5")):
            raise ValueError(f"{self.value} outside [-1/2, 1/2)")


def reduce_mod_one(x: mpfr) -> mpfr:
    """Value-preserving reduction into [-1/2, 1/2)."""
    y = x - gmpy2.floor(x)
    return y - 1 if y >= mpfr("0.5") else y


def reduce_reported(x: mpfr) -> mpfr:
    """Reporting reduction: into [0, 1), then shifted down by one half."""
    return (x - gmpy2.floor(x)) - mpfr("0.5")


def circular_distance(a, b) -> mpfr:
    """|a - b| mod 1, as a value in [0, 1/2]."""
    d = abs(mpfr(a) - mpfr(b))
    d = d - gmpy2.floor(d)
    return min(d, 1 - d)


# --- trig tables -----------------------------------------------------------
#
# Every angle that appears for a lens space with |p| = P is an integer
# multiple of pi/P, so cot/csc (period pi / 2*pi) and the exponential factor
# (multiples of 2*pi/P) come from one table of P-1 sin/cos evaluations.

_TABLE_CACHE: dict[tuple[int, int], tuple] = {}
_TABLE_CACHE_LIMIT = 4096


def _trig_tables(P: int, prec: int):
    key = (P, prec)
    cached = _TABLE_CACHE.get(key)
    if cached is not None:
        return cached
    with gmpy2.context(precision=prec):
        pi = gmpy2.const_pi()
        cot = [mpfr(0)] * P
        csc = [mpfr(0)] * P
        cos2 = [mpfr(0)] * P  # cos(2*pi*m/P) - 1
        sin2 = [mpfr(0)] * P  # sin(2*pi*m/P)
        for m in range(1, P):
            s, c = gmpy2.sin_cos(pi * m / P)
            cot[m] = c / s
            csc[m] = 1 / s
            cos2[m] = -2 * s * s          # cos(2x) - 1 = -2 sin(x)^2
            sin2[m] = 2 * s * c
    if len(_TABLE_CACHE) >= _TABLE_CACHE_LIMIT:
        _TABLE_CACHE.clear()
    tables = (cot, csc, cos2, sin2)
    _TABLE_CACHE[key] = tables
    return tables


def _lens_sums(lens: LensSpace, prec: int) -> tuple[mpfr, mpfr, mpfr, mpfr]:
    """(cot-product sum, csc-product sum, Re, Im of the exponential sum).

    Computed at ``prec`` bits.  For |p| = 1 all sums are empty.
    """
    P = abs(lens.p)
    with gmpy2.context(precision=prec):
        cot_sum = mpfr(0)
        csc_sum = mpfr(0)
        e_re = mpfr(0)
        e_im = mpfr(0)
        if P == 1:
            return cot_sum, csc_sum, e_re, e_im
        cot, csc, cos2, sin2 = _trig_tables(P, prec)
        sgn = 1 if lens.p > 0 else -1
        w0, w1, w2, w3 = (w * sgn for w in lens.weights)
        twoP = 2 * P
        for k in range(1, P):
            cot_prod = (cot[(k * w0) % P] * cot[(k * w1) % P]
                        * cot[(k * w2) % P] * cot[(k * w3) % P])
            csc_prod = mpfr(1)
            for w in (w0, w1, w2, w3):
                u = (k * w) % twoP
                csc_prod *= csc[u] if u < P else -csc[u - P]
            cot_sum += cot_prod
            csc_sum += csc_prod
            e_re += cos2[k] * csc_prod
            e_im += sin2[k] * csc_prod
        e_im *= sgn
        return cot_sum, csc_sum, e_re, e_im


def _lens_s1_raw(lens: LensSpace, prec: int) -> mpfr:
    cot_sum, csc_sum, _, _ = _lens_sums(lens, prec)
    with gmpy2.context(precision=prec):
        return cot_sum / (2**5 * 7 * lens.p) + csc_sum / (2**4 * lens.p)


def _lens_s2_raw(lens: LensSpace, prec: int) -> tuple[mpfr, mpfr]:
    _, _, e_re, e_im = _lens_sums(lens, prec)
    with gmpy2.context(precision=prec):
        scale = 2**4 * lens.p
        return e_re / scale, abs(e_im / scale)


def _self_check(label: str, value: mpfr, guard_value: mpfr, cfg: PrecisionConfig):
    err = circular_distance(value, guard_value)
    if err >= cfg.compare_tolerance:
        raise PrecisionLoss(f"{label}: {cfg.mantissa_bits}-bit and guard runs differ by {err}")


def lens_s1(lens: LensSpace, cfg: PrecisionConfig = PrecisionConfig()) -> ModOneReal:
    """First invariant of a lens space, reduced into [-1/2, 1/2)."""
    with gmpy2.context(precision=cfg.mantissa_bits):
        value = reduce_mod_one(_lens_s1_raw(lens, cfg.mantissa_bits))
    if cfg.self_check:
        guard = cfg.mantissa_bits + cfg.guard_bits
        with gmpy2.context(precision=guard):
            check = reduce_mod_one(_lens_s1_raw(lens, guard))
        _self_check(f"lens_s1{(lens.p, lens.weights)}", value, check, cfg)
    return ModOneReal(value=value, precision=cfg.mantissa_bits)


def lens_s2(lens: LensSpace, cfg: PrecisionConfig = PrecisionConfig()) -> tuple[ModOneReal, mpfr]:
    """Second invariant of a lens space plus its imaginary residual."""
    with gmpy2.context(precision=cfg.mantissa_bits):
        re, im = _lens_s2_raw(lens, cfg.mantissa_bits)
        value = reduce_mod_one(re)
    if cfg.self_check:
        guard = cfg.mantissa_bits + cfg.guard_bits
        with gmpy2.context(precision=guard):
            re_g, _ = _lens_s2_raw(lens, guard)
            check = reduce_mod_one(re_g)
        _self_check(f"lens_s2{(lens.p, lens.weights)}", value, check, cfg)
    return ModOneReal(value=value, precision=cfg.mantissa_bits), im


# --- combination for a parameter pair --------------------------------------


def ks_q(p: ParamPair) -> int:
    """The quadratic form q of a Kruggel-normalized pair."""
    A = difference_matrix(p).a
    return (A[0][0] ** 2 + A[1][0] ** 2 + A[2][0] ** 2
            + A[0][1] ** 2 + A[1][1] ** 2 + A[2][1] ** 2
            - (p.l[0] - p.l[1]) ** 2)


def ks_w(p: ParamPair) -> int:
    """w = r * A00 * A10 * A20 of a Kruggel-normalized pair; never 0 for
    genuine spaces."""
    A = difference_matrix(p).a
    r = sym_poly(p.k, 2) - sym_poly(p.l, 2)
    w = r * A[0][0] * A[1][0] * A[2][0]
    if w == 0:
        raise ZeroW(f"w = 0 for k={p.k} l={p.l}")
    return w


def _lens_triple(p: ParamPair) -> tuple[LensSpace, LensSpace, LensSpace]:
    A = difference_matrix(p).a
    return (
        make_lens(A[0][0], (A[1][0], A[2][0], A[1][1], A[2][1])),
        make_lens(A[1][0], (A[0][0], A[2][0], A[0][1], A[2][1])),
        make_lens(A[2][0], (A[0][0], A[1][0], A[0][1], A[1][1])),
    )


@dataclass(frozen=True)
class KSResult:
    s1: ModOneReal
    s2: ModOneReal
    s2_imag_residual: mpfr
    q: int
    w: int
    lens_terms: tuple  # per-lens (s1, s2) contributions at working precision
    normalized_pair: ParamPair


def _ks_raw(p: ParamPair, q: int, w: int, prec: int):
    """Unreduced invariant totals and per-lens terms at ``prec`` bits."""
    lenses = _lens_triple(p)
    with gmpy2.context(precision=prec):
        sign_w = 1 if w > 0 else -1
        s1 = mpfr(sign_w) / (2**5 * 7) - mpfr(q) ** 2 / (2**7 * 7 * w)
        s2 = mpfr(q - 2) / (2**4 * 3 * w)
        imag = mpfr(0)
        terms = []
        for lens in lenses:
            t1 = _lens_s1_raw(lens, prec)
            t2_re, t2_im = _lens_s2_raw(lens, prec)
            s1 -= t1
            s2 -= t2_re
            imag += t2_im
            terms.append((reduce_mod_one(t1), reduce_mod_one(t2_re)))
        return s1, s2, imag, tuple(terms)


def ks_invariants(
    p: ParamPair,
    cfg: PrecisionConfig = PrecisionConfig(),
    table: CoprimalityTable | None = None,
    witness: ConditionCWitness | None = None,
) -> KSResult:
    """Both smooth invariants of an admissible condition-C pair.

    The pair is Kruggel-normalized internally (``witness`` selects a
    specific condition-C line, for the independence checks).  Raises
    NoConditionC, InvalidLens, ZeroW, ImaginaryResidual or PrecisionLoss.
    """
    if table is None:
        table = _default_table()
    norm = normalize_for_kruggel(p, table, witness=witness)
    q = ks_q(norm)
    w = ks_w(norm)

    prec = cfg.mantissa_bits
    s1_raw, s2_raw, imag, terms = _ks_raw(norm, q, w, prec)
    with gmpy2.context(precision=prec):
        s1 = reduce_reported(s1_raw)
        s2 = reduce_reported(s2_raw)

    if imag >= cfg.compare_tolerance:
        raise ImaginaryResidual(f"imaginary residual {imag} for k={p.k} l={p.l}")

    if cfg.self_check:
        guard = prec + cfg.guard_bits
        g1_raw, g2_raw, _, _ = _ks_raw(norm, q, w, guard)
        with gmpy2.context(precision=guard):
            g1 = reduce_reported(g1_raw)
            g2 = reduce_reported(g2_raw)
        _self_check(f"s1 of k={p.k} l={p.l}", s1, g1, cfg)
        _self_check(f"s2 of k={p.k} l={p.l}", s2, g2, cfg)

    return KSResult(
        s1=ModOneReal(value=s1, precision=prec),
        s2=ModOneReal(value=s2, precision=prec),
        s2_imag_residual=imag,
        q=q,
        w=w,
        lens_terms=terms,
        normalized_pair=norm,
    )


_DEFAULT_TABLE: list[CoprimalityTable] = []


def _default_table() -> CoprimalityTable:
    if not _DEFAULT_TABLE:
        _DEFAULT_TABLE.append(CoprimalityTable.build(2000))
    return _DEFAULT_TABLE[0]
