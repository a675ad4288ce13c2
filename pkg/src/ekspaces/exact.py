"""Exact integer primitives: gcd machinery, the coprimality lookup table,
modular inverses, symmetric residues and elementary symmetric polynomials.

Everything here is pure and uses Python's unbounded integers, so the
"checked, never silently wrapping" arithmetic contract holds trivially.
The lookup table is a shared immutable numpy array sized for the search
boxes actually in play; gcd arguments that exceed it fall back to the
Euclidean algorithm until both fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NotInvertible(ValueError):
    """Raised when a modular inverse does not exist."""


class EvenModulus(ValueError):
    """Raised when a symmetric residue is requested for an even modulus."""


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid: return (g, x, y) with a*x + b*y = g = gcd(|a|, |b|).

    gcd(0, 0) is 0 by convention.
    """
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m, as a residue in [0, m). m = 1 returns 0."""
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    if m == 1:
        return 0
    g, x, _ = ext_gcd(a % m, m)
    if g != 1:
        raise NotInvertible(f"gcd({a}, {m}) = {g} != 1")
    return x % m


def sym_residue(a: int, m: int) -> int:
    """Residue of a modulo odd m, in the symmetric range [-(m-1)/2, (m-1)/2]."""
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    if m % 2 == 0:
        raise EvenModulus(f"modulus {m} is even")
    r = a % m
    return r - m if r > (m - 1) // 2 else r


def sym_poly(v: tuple[int, int, int], j: int) -> int:
    """j-th elementary symmetric polynomial of a triple, j in {1, 2, 3}."""
    a, b, c = v
    if j == 1:
        return a + b + c
    if j == 2:
        return a * b + a * c + b * c
    if j == 3:
        return a * b * c
    raise ValueError(f"j must be 1, 2 or 3, got {j}")


@dataclass(frozen=True)
class CoprimalityTable:
    """N x N lookup of gcd(i, j) == 1, with row/column 0 carrying gcd(0, j) = j.

    ``bits[i, j]`` is 1 iff gcd(i, j) == 1 for 0 <= i, j <= size.  The zero
    row/column therefore flags only (0, 1) and (1, 0) as coprime, which is
    what the admissibility test needs; :func:`coprime` additionally rejects
    zero arguments, as the condition-C test requires non-zero entries.
    """

    size: int
    bits: np.ndarray

    @classmethod
    def build(cls, size: int = 2000) -> "CoprimalityTable":
        if size < 1:
            raise ValueError(f"table size must be >= 1, got {size}")
        idx = np.arange(size + 1, dtype=np.int64)
        bits = (np.gcd.outer(idx, idx) == 1).astype(np.uint8)
        bits.setflags(write=False)
        return cls(size=size, bits=bits)

    def gcd_is_one(self, a: int, b: int) -> bool:
        """gcd(|a|, |b|) == 1, reducing out-of-range arguments by Euclid."""
        a, b = abs(a), abs(b)
        n = self.size
        while a > n or b > n:
            if a < b:
                a, b = b, a
            if b == 0:
                return a == 1
            a, b = b, a % b
        return bool(self.bits[a, b])


def coprime(a: int, b: int, table: CoprimalityTable) -> bool:
    """True iff a*b != 0 and gcd(|a|, |b|) = 1."""
    if a == 0 or b == 0:
        return False
    return table.gcd_is_one(a, b)
