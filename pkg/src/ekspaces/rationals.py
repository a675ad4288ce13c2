"""Recover exact rationals from high-precision mod-1 values.

The smooth invariants are rational numbers rendered as binary floats; the
continued-fraction expansion of such a float reaches the underlying
rational as a convergent long before the denominator bound, so equality of
invariants can be decided exactly.  Inexactness is reported in the result,
never raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


@dataclass(frozen=True)
class RationalInvariant:
    numerator: int
    denominator: int
    residual: float
    exact: bool

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def _as_fraction(x) -> Fraction:
    if isinstance(x, Rational):
        return Fraction(x)
    num, den = x.as_integer_ratio()  # exact for binary floats of any precision
    return Fraction(num, den)


def cf_convergents(x, max_terms: int = 64) -> list[tuple[int, int]]:
    """Continued-fraction convergents p_i/q_i of x, denominators strictly
    increasing.

    The expansion of an exact binary value terminates; ``max_terms`` merely
    caps pathological inputs.  When an expansion ends with a partial
    quotient of 1 the two equal-denominator convergents collapse to the
    better one.
    """
    frac = _as_fraction(x)
    num, den = frac.numerator, frac.denominator
    h_prev, h = 0, 1  # h_{-2}, h_{-1}
    q_prev, q = 1, 0
    out: list[tuple[int, int]] = []
    for _ in range(max_terms):
        a, rem = divmod(num, den)
        h_prev, h = h, a * h + h_prev
        q_prev, q = q, a * q + q_prev
        if out and q == out[-1][1]:
            out[-1] = (h, q)
        else:
            out.append((h, q))
        if rem == 0:
            break
        num, den = den, rem
    return out


def rationalize(x, den_bound: int = 10**8, tol: float = 2.0**-80) -> RationalInvariant:
    """First convergent n/d of x with d <= den_bound and |x - n/d| < tol.

    Returns the best in-bound convergent with ``exact=False`` when none
    meets the tolerance.  The value is normalized mod 1 into [-1/2, 1/2).
    """
    frac = _as_fraction(x)
    best: tuple[int, int] | None = None
    best_err = None
    for n, d in cf_convergents(x, max_terms=512):
        if d > den_bound:
            break
        err = abs(frac - Fraction(n, d))
        if best_err is None or err < best_err:
            best, best_err = (n, d), err
        if err < tol:
            break
    assert best is not None  # the first convergent always has denominator 1
    n, d = _normalize_mod_one(*best)
    return RationalInvariant(
        numerator=n,
        denominator=d,
        residual=float(best_err),
        exact=bool(best_err < tol and best[1] <= den_bound),
    )


def _normalize_mod_one(n: int, d: int) -> tuple[int, int]:
    """Reduce n/d mod 1 into [-1/2, 1/2), in lowest terms."""
    f = Fraction(n, d) % 1
    if f >= Fraction(1, 2):
        f -= 1
    return f.numerator, f.denominator
