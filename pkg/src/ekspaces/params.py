"""Parameter pairs (k, l), the difference matrix A, the admissibility /
freeness / condition-C predicates, the order-144 symmetry group and the
normalizations derived from it.

A pair (k, l) of integer triples with equal sums determines the 7-manifold
obtained as the biquotient of SU(3) by the circle acting with weights k on
the left and l on the right.  The group generated by coordinate
permutations of k and of l, the swap (k, l) -> (l, k) and the negation
(k, l) -> (-k, -l) acts on pairs; all elements except those involving the
negation preserve orientation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .exact import CoprimalityTable, coprime

Triple = tuple[int, int, int]


class SumMismatch(ValueError):
    """Raised when the two triples of a parameter pair have different sums."""


class NoConditionC(ValueError):
    """Raised when no row or column of A has non-zero pairwise coprime entries."""


@dataclass(frozen=True, order=True)
class ParamPair:
    k: Triple
    l: Triple

    def __post_init__(self):
        if sum(self.k) != sum(self.l):
            raise SumMismatch(f"sum(k)={sum(self.k)} != sum(l)={sum(self.l)}")

    @property
    def total(self) -> int:
        return sum(self.k)

    def negated(self) -> "ParamPair":
        k, l = self.k, self.l
        return ParamPair((-k[0], -k[1], -k[2]), (-l[0], -l[1], -l[2]))


def make_params(k, l) -> ParamPair:
    """Validated pair constructor; raises SumMismatch unless sum(k) == sum(l)."""
    return ParamPair(tuple(int(x) for x in k), tuple(int(x) for x in l))


@dataclass(frozen=True)
class DifferenceMatrix:
    """The 3x3 matrix a[i][j] = k_i - l_j.  Its diagonal sums to zero."""

    a: tuple[tuple[int, int, int], ...]

    def column(self, j: int) -> Triple:
        return (self.a[0][j], self.a[1][j], self.a[2][j])

    def row(self, i: int) -> Triple:
        return self.a[i]


def difference_matrix(p: ParamPair) -> DifferenceMatrix:
    k, l = p.k, p.l
    return DifferenceMatrix(tuple(tuple(k[i] - l[j] for j in range(3)) for i in range(3)))


@dataclass(frozen=True)
class SymmetryElement:
    """One element of the order-144 group: permute k by alpha, l by beta,
    optionally swap the two triples, optionally negate both."""

    alpha: Triple
    beta: Triple
    swap: bool = False
    negate: bool = False

    @property
    def orientation(self) -> int:
        return -1 if self.negate else 1


_S3: tuple[Triple, ...] = tuple(itertools.permutations((0, 1, 2)))

IDENTITY = SymmetryElement(alpha=(0, 1, 2), beta=(0, 1, 2))


@lru_cache(maxsize=None)
def symmetry_group() -> tuple[SymmetryElement, ...]:
    """All 144 elements, in a fixed deterministic order."""
    return tuple(
        SymmetryElement(alpha=a, beta=b, swap=s, negate=n)
        for n in (False, True)
        for s in (False, True)
        for a in _S3
        for b in _S3
    )


@lru_cache(maxsize=None)
def orientation_preserving_group() -> tuple[SymmetryElement, ...]:
    """The index-2 subgroup without the negation: 72 elements."""
    return tuple(g for g in symmetry_group() if not g.negate)


def _permute(v: Triple, perm: Triple) -> Triple:
    return (v[perm[0]], v[perm[1]], v[perm[2]])


def apply_symmetry(p: ParamPair, g: SymmetryElement) -> tuple[ParamPair, int]:
    """Apply alpha to k, beta to l, then the swap, then the negation.

    Returns the image pair and the orientation sign (-1 iff negation used).
    """
    k = _permute(p.k, g.alpha)
    l = _permute(p.l, g.beta)
    if g.swap:
        k, l = l, k
    if g.negate:
        k = (-k[0], -k[1], -k[2])
        l = (-l[0], -l[1], -l[2])
    return ParamPair(k, l), g.orientation


def shift_sum(p: ParamPair, lo: int = 0, hi: int = 2) -> ParamPair:
    """Translate both triples by n*(1,1,1) so the common sum lands in [lo, hi].

    The window must span a full residue class mod 3 (hi - lo >= 2), which
    makes the representative unique.
    """
    if hi - lo < 2:
        raise ValueError("sum window must contain a full residue system mod 3")
    t = p.total
    target = lo + ((t - lo) % 3)
    n = (target - t) // 3
    if n == 0:
        return p
    k = (p.k[0] + n, p.k[1] + n, p.k[2] + n)
    l = (p.l[0] + n, p.l[1] + n, p.l[2] + n)
    return ParamPair(k, l)


def is_admissible(p: ParamPair, table: CoprimalityTable) -> bool:
    """The six pairwise gcd conditions gcd(A[0][a], A[1][b]) = 1, a != b."""
    k, l = p.k, p.l
    row0 = (k[0] - l[0], k[0] - l[1], k[0] - l[2])
    row1 = (k[1] - l[0], k[1] - l[1], k[1] - l[2])
    for a in range(3):
        for b in range(3):
            if a != b and not table.gcd_is_one(row0[a], row1[b]):
                return False
    return True


def is_free(p: ParamPair) -> bool:
    """k - sigma(l) is primitive for every permutation sigma of l."""
    k = p.k
    for perm in _S3:
        l = _permute(p.l, perm)
        g = gcd(gcd(k[0] - l[0], k[1] - l[1]), k[2] - l[2])
        if g != 1:
            return False
    return True


@dataclass(frozen=True)
class ConditionCWitness:
    kind: str  # "column" or "row"
    index: int


def condition_c(p: ParamPair, table: CoprimalityTable) -> list[ConditionCWitness]:
    """All lines of A with three non-zero pairwise coprime entries.

    Columns are reported before rows, lower index first; the first witness
    is the one the Kruggel normalization uses.
    """
    A = difference_matrix(p)
    witnesses = []
    for j in range(3):
        if _line_qualifies(A.column(j), table):
            witnesses.append(ConditionCWitness("column", j))
    for i in range(3):
        if _line_qualifies(A.row(i), table):
            witnesses.append(ConditionCWitness("row", i))
    return witnesses


def _line_qualifies(line: Triple, table: CoprimalityTable) -> bool:
    a, b, c = line
    return coprime(a, b, table) and coprime(a, c, table) and coprime(b, c, table)


def _transpose_first(v: Triple, j: int) -> Triple:
    out = list(v)
    out[0], out[j] = out[j], out[0]
    return tuple(out)


def normalize_for_kruggel(
    p: ParamPair, table: CoprimalityTable, witness: ConditionCWitness | None = None
) -> ParamPair:
    """Orientation-preserving move making the leftmost column of A a
    condition-C line.

    A qualifying column j is brought to the front by transposing l[0] and
    l[j]; a qualifying row j is first turned into a column by swapping the
    triples and then transposed to the front.  ``witness`` overrides the
    default choice (first column, then first row), which the empirical
    witness-independence checks exercise.
    """
    if witness is None:
        found = condition_c(p, table)
        if not found:
            raise NoConditionC(f"no qualifying line for k={p.k} l={p.l}")
        witness = found[0]
    if witness.kind == "column":
        if witness.index == 0:
            return p
        return ParamPair(p.k, _transpose_first(p.l, witness.index))
    return ParamPair(p.l, _transpose_first(p.k, witness.index))


def canonical_form(p: ParamPair, lo: int = 0, hi: int = 2) -> tuple[ParamPair, int]:
    """The distinguished representative of the full symmetry orbit of p.

    Among all 144 images, translated so the sum lies in [lo, hi], keep those
    with k and l sorted ascending and k[0] <= l[0]; return the
    lexicographically smallest, together with the orientation of a group
    element reaching it (+1 preferred when both signs do).
    """
    best: ParamPair | None = None
    best_orient = -1
    for g in symmetry_group():
        q, orient = apply_symmetry(p, g)
        q = shift_sum(q, lo, hi)
        if not (q.k[0] <= q.k[1] <= q.k[2] and q.l[0] <= q.l[1] <= q.l[2]):
            continue
        if q.k[0] > q.l[0]:
            continue
        if best is None or (q.k, q.l) < (best.k, best.l):
            best, best_orient = q, orient
        elif (q.k, q.l) == (best.k, best.l) and orient > best_orient:
            best_orient = orient
    assert best is not None  # sorting moves always produce a candidate
    return best, best_orient
