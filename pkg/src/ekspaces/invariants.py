"""Exact integer invariants of a parameter pair.

For a pair (k, l):

* ``r``  = sigma2(k) - sigma2(l) is the order of the fourth cohomology
  group (up to sign); it is odd and non-zero for every space the pipeline
  enumerates.
* ``s``  = sigma3(k) - sigma3(l) determines the linking form -(1/s)/r mod 1.
* ``p1`` = 2*sigma1(k)^2 - 6*sigma2(k) is the first Pontryagin class mod r
  (well defined because the sum condition makes the k/l asymmetry vanish
  mod r).

Swapping k and l describes the same oriented manifold but negates both r
and s, so equality of invariants across descriptions must use the
jointly sign-normalized residue of s; :func:`s_residue_oriented` provides
it and the classification key uses it.  Negating both triples reverses
orientation: it fixes r and p1 and negates s and the linking form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import EvenModulus, NotInvertible, mod_inverse, sym_poly, sym_residue
from .params import ParamPair


def invariant_r(p: ParamPair) -> int:
    return sym_poly(p.k, 2) - sym_poly(p.l, 2)


def invariant_s(p: ParamPair) -> int:
    return sym_poly(p.k, 3) - sym_poly(p.l, 3)


def invariant_p1(p: ParamPair) -> int:
    return 2 * sym_poly(p.k, 1) ** 2 - 6 * sym_poly(p.k, 2)


def linking_form(r: int, s: int) -> Fraction:
    """-(s^{-1} mod |r|)/r, reduced mod 1 into [-1/2, 1/2)."""
    if r == 0:
        raise ValueError("r must be non-zero")
    m = abs(r)
    if m == 1:
        return Fraction(0)
    inv = mod_inverse(s, m)  # raises NotInvertible if gcd(s, r) != 1
    return _mod_one(Fraction(-inv, r))


def _mod_one(x: Fraction) -> Fraction:
    x = x % 1
    return x - 1 if x >= Fraction(1, 2) else x


def s_residue_oriented(r: int, s: int) -> int:
    """Symmetric residue of s mod |r|, normalized so that jointly negating
    (r, s) -- which swapping k and l does -- leaves the value fixed."""
    return sym_residue(s if r > 0 else -s, abs(r))


@dataclass(frozen=True)
class IntegerInvariants:
    r: int
    s: int
    p1: int
    s_mod: int   # symmetric residue of s mod |r|
    p1_mod: int  # symmetric residue of p1 mod |r|
    linking: Fraction

    @property
    def abs_r(self) -> int:
        return abs(self.r)

    @property
    def s_oriented(self) -> int:
        return s_residue_oriented(self.r, self.s)


def integer_invariants(p: ParamPair) -> IntegerInvariants:
    """All exact invariants of an admissible condition-C pair.

    Raises EvenModulus if r comes out even (impossible for a genuine
    Eschenburg-Kruggel space, so it signals corrupted input) and
    NotInvertible if gcd(s, r) != 1.
    """
    r = invariant_r(p)
    s = invariant_s(p)
    p1 = invariant_p1(p)
    if r == 0 or abs(r) % 2 == 0:
        raise EvenModulus(f"r = {r} must be odd and non-zero for k={p.k} l={p.l}")
    m = abs(r)
    return IntegerInvariants(
        r=r,
        s=s,
        p1=p1,
        s_mod=sym_residue(s, m),
        p1_mod=sym_residue(p1, m),
        linking=linking_form(r, s),
    )
