"""Stream every Eschenburg-Kruggel parameter pair in an integer box.

The search domain is the cube [-half_width, half_width]^6 cut by the sum
constraint sum(k) = sum(l) in [sum_lo, sum_hi]; the third components are
derived from the free coordinates (sum, k0, k1, l0, l1), so the stream is
a four-dimensional scan per sum value, emitted in ascending
(sum, k0, k1, l0, l1) order.  Admissibility is tested first (six table
lookups with early exit), then condition C, mirroring the cheapest-first
filter order; an optional filter restricts |r|.

Two compiled kernels back the scan: a plain sweep, and a quadratic solve
that enumerates only the l1 values hitting prescribed r targets (r is a
quadric in the free coordinates, so small |r| filters cut the scan by a
full dimension).  A pure-Python route implements the same pipeline and is
cross-checked against the kernels in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
from numba import get_num_threads, get_thread_id, njit, prange, set_num_threads

from .exact import CoprimalityTable
from .params import ParamPair, canonical_form, condition_c, is_admissible


@dataclass(frozen=True)
class SearchBox:
    half_width: int
    sum_lo: int = 0
    sum_hi: int = 2
    r_filter: frozenset[int] | None = None  # admitted |r| values

    def __post_init__(self):
        if self.half_width < 0:
            raise ValueError("half_width must be >= 0")
        if self.sum_lo > self.sum_hi:
            raise ValueError("sum_lo must be <= sum_hi")
        if self.r_filter is not None:
            object.__setattr__(self, "r_filter", frozenset(abs(r) for r in self.r_filter))


# --- compiled kernels -------------------------------------------------------


@njit(cache=True, fastmath=False)
def _isqrt(n):
    if n < 0:
        return -1
    s = int(math.sqrt(float(n)))
    while s * s > n:
        s -= 1
    while (s + 1) * (s + 1) <= n:
        s += 1
    return s


@njit(cache=True, inline="always")
def _admissible6(x0, x1, x2, y0, y1, y2, bits):
    # gcd(row0[a], row1[b]) == 1 for a != b; zeros pass only against units
    if bits[abs(x0), abs(y1)] == 0:
        return False
    if bits[abs(x0), abs(y2)] == 0:
        return False
    if bits[abs(x1), abs(y0)] == 0:
        return False
    if bits[abs(x1), abs(y2)] == 0:
        return False
    if bits[abs(x2), abs(y0)] == 0:
        return False
    if bits[abs(x2), abs(y1)] == 0:
        return False
    return True


@njit(cache=True, inline="always")
def _line_ok(a, b, c, bits):
    if a == 0 or b == 0 or c == 0:
        return False
    if bits[abs(a), abs(b)] == 0:
        return False
    if bits[abs(a), abs(c)] == 0:
        return False
    return bits[abs(b), abs(c)] != 0


@njit(cache=True, inline="always")
def _condition_c_any(x0, x1, x2, y0, y1, y2, z0, z1, z2, bits):
    if _line_ok(x0, y0, z0, bits):
        return True
    if _line_ok(x1, y1, z1, bits):
        return True
    if _line_ok(x2, y2, z2, bits):
        return True
    if _line_ok(x0, x1, x2, bits):
        return True
    if _line_ok(y0, y1, y2, bits):
        return True
    return _line_ok(z0, z1, z2, bits)


@njit(cache=True, inline="always")
def _passes(s, k0, k1, l0, l1, w, bits):
    k2 = s - k0 - k1
    l2 = s - l0 - l1
    if l2 < -w or l2 > w:
        return False
    x0 = k0 - l0
    x1 = k0 - l1
    x2 = k0 - l2
    y0 = k1 - l0
    y1 = k1 - l1
    y2 = k1 - l2
    if not _admissible6(x0, x1, x2, y0, y1, y2, bits):
        return False
    z0 = k2 - l0
    z1 = k2 - l1
    z2 = k2 - l2
    return _condition_c_any(x0, x1, x2, y0, y1, y2, z0, z1, z2, bits)


@njit(cache=True)
def _scan_slice(s, k0, w, bits, two_r_targets, out):
    """Survivors (k1, l0, l1) of one (sum, k0) slice, encoded into ``out``.

    ``two_r_targets``: sorted array of admitted 2r values, empty = no filter.
    Returns the total survivor count; writes stop at the buffer capacity, so
    a return value above ``len(out)`` tells the caller to grow and retry.
    Encoding is base 2w+1 on shifted coordinates, so ascending code order is
    ascending (k1, l0, l1).
    """
    base = 2 * w + 1
    cap = out.shape[0]
    cand = np.empty(max(2 * two_r_targets.shape[0], 1), dtype=np.int64)
    n = 0
    for k1 in range(max(-w, s - k0 - w), min(w, s - k0 + w) + 1):
        kk = k0 * k0 + k1 * k1 + (s - k0 - k1) * (s - k0 - k1)
        for l0 in range(-w, w + 1):
            c = s - l0
            if two_r_targets.shape[0] == 0:
                for l1 in range(max(-w, c - w), min(w, c + w) + 1):
                    if _passes(s, k0, k1, l0, l1, w, bits):
                        if n < cap:
                            out[n] = ((k1 + w) * base + (l0 + w)) * base + (l1 + w)
                        n += 1
            else:
                # solve l0^2 + l1^2 + (c - l1)^2 = kk + 2r for each target 2r
                m = 0
                for t in range(two_r_targets.shape[0]):
                    disc = 2 * (kk + two_r_targets[t] - l0 * l0) - c * c
                    root = _isqrt(disc)
                    if root < 0 or root * root != disc:
                        continue
                    if (c + root) % 2 == 0:
                        cand[m] = (c + root) // 2
                        m += 1
                        if root != 0:
                            cand[m] = (c - root) // 2
                            m += 1
                cand2 = np.sort(cand[:m])
                for i in range(m):
                    l1 = int(cand2[i])
                    if l1 < -w or l1 > w:
                        continue
                    if _passes(s, k0, k1, l0, l1, w, bits):
                        if n < cap:
                            out[n] = ((k1 + w) * base + (l0 + w)) * base + (l1 + w)
                        n += 1
    return n


@njit(cache=True, parallel=True)
def _count_by_norm(sum_lo, sum_hi, w, bits):
    """Histogram of surviving pairs by max-norm of the six entries."""
    nt = get_num_threads()
    hist = np.zeros((nt, w + 1), dtype=np.int64)
    for idx in prange(2 * w + 1):
        k0 = idx - w
        tid = get_thread_id()
        for s in range(sum_lo, sum_hi + 1):
            for k1 in range(max(-w, s - k0 - w), min(w, s - k0 + w) + 1):
                k2 = s - k0 - k1
                for l0 in range(-w, w + 1):
                    c = s - l0
                    for l1 in range(max(-w, c - w), min(w, c + w) + 1):
                        if _passes(s, k0, k1, l0, l1, w, bits):
                            l2 = c - l1
                            m = abs(k0)
                            for v in (k1, k2, l0, l1, l2):
                                if abs(v) > m:
                                    m = abs(v)
                            hist[tid, m] += 1
    return hist.sum(axis=0)


# --- streaming API ----------------------------------------------------------


def _kernel_ready(box: SearchBox, table: CoprimalityTable) -> bool:
    return 2 * box.half_width <= table.size


def _two_r_targets(box: SearchBox) -> np.ndarray:
    if box.r_filter is None:
        return np.empty(0, dtype=np.int64)
    vals = sorted({2 * sgn * r for r in box.r_filter for sgn in (1, -1) if r != 0}
                  | ({0} if 0 in box.r_filter else set()))
    return np.asarray(vals, dtype=np.int64)


def enumerate_box(
    box: SearchBox,
    table: CoprimalityTable,
    jobs: int | None = None,
    canonical_only: bool = False,
) -> Iterator[ParamPair]:
    """Yield every admissible condition-C pair of the box in ascending
    (sum, k0, k1, l0, l1) order.

    ``canonical_only`` keeps only pairs that equal their own orbit
    representative, one per symmetry orbit whose representative lies in the
    box.  The order (and therefore the stream) is independent of ``jobs``.
    """
    if jobs is not None:
        set_num_threads(max(1, jobs))
    if not _kernel_ready(box, table):
        yield from _enumerate_python(box, table, canonical_only)
        return
    w = box.half_width
    targets = _two_r_targets(box)
    base = 2 * w + 1
    buf = np.empty(max(1024, 4 * base), dtype=np.int64)
    for s in range(box.sum_lo, box.sum_hi + 1):
        for k0 in range(-w, w + 1):
            n = _scan_slice(s, k0, w, table.bits, targets, buf)
            while n > buf.shape[0]:
                buf = np.empty(n, dtype=np.int64)
                n = _scan_slice(s, k0, w, table.bits, targets, buf)
            for code in buf[:n]:
                code = int(code)
                l1 = code % base - w
                code //= base
                l0 = code % base - w
                k1 = code // base - w
                pair = ParamPair((k0, k1, s - k0 - k1), (l0, l1, s - l0 - l1))
                if canonical_only and canonical_form(pair)[0] != pair:
                    continue
                yield pair


def _enumerate_python(
    box: SearchBox, table: CoprimalityTable, canonical_only: bool
) -> Iterator[ParamPair]:
    """Reference route, no compiled code; also serves out-of-table-range boxes."""
    w = box.half_width
    admitted = box.r_filter
    for s in range(box.sum_lo, box.sum_hi + 1):
        for k0 in range(-w, w + 1):
            for k1 in range(max(-w, s - k0 - w), min(w, s - k0 + w) + 1):
                k2 = s - k0 - k1
                for l0 in range(-w, w + 1):
                    for l1 in range(max(-w, s - l0 - w), min(w, s - l0 + w) + 1):
                        l2 = s - l0 - l1
                        if admitted is not None:
                            two_r = (l0 * l0 + l1 * l1 + l2 * l2
                                     - k0 * k0 - k1 * k1 - k2 * k2)
                            if abs(two_r) % 2 or abs(two_r) // 2 not in admitted:
                                continue
                        pair = ParamPair((k0, k1, k2), (l0, l1, l2))
                        if not is_admissible(pair, table):
                            continue
                        if not condition_c(pair, table):
                            continue
                        if canonical_only and canonical_form(pair)[0] != pair:
                            continue
                        yield pair


def count_by_max_norm(
    box: SearchBox, table: CoprimalityTable, jobs: int | None = None
) -> np.ndarray:
    """hist[m] = number of pairs of the box whose largest |entry| equals m."""
    if box.r_filter is not None:
        raise ValueError("norm histogram is defined for unfiltered boxes")
    if jobs is not None:
        set_num_threads(max(1, jobs))
    if not _kernel_ready(box, table):
        hist = np.zeros(box.half_width + 1, dtype=np.int64)
        for pair in _enumerate_python(box, table, canonical_only=False):
            m = max(max(abs(v) for v in pair.k), max(abs(v) for v in pair.l))
            hist[m] += 1
        return hist
    return _count_by_norm(box.sum_lo, box.sum_hi, box.half_width, table.bits)


def growth_counts(
    half_widths: Iterable[int],
    table: CoprimalityTable,
    sum_lo: int = 0,
    sum_hi: int = 2,
    jobs: int | None = None,
) -> list[tuple[int, int, int]]:
    """Rows (k, N(k), dN(k)) for the requested ascending box half-widths.

    N(k) counts pairs of the [-k, k]^6 box; dN(k) = N(k) - N(k-1) is the
    marginal count from one integer scan, so a single sweep of the largest
    box serves every requested width.
    """
    widths = list(half_widths)
    if widths != sorted(widths) or any(v < 0 for v in widths):
        raise ValueError("half_widths must be ascending and non-negative")
    if not widths:
        return []
    top = widths[-1]
    hist = count_by_max_norm(SearchBox(top, sum_lo, sum_hi), table, jobs=jobs)
    cum = np.cumsum(hist)
    rows = []
    for k in widths:
        n = int(cum[k])
        prev = int(cum[k - 1]) if k >= 1 else 0
        rows.append((k, n, n - prev))
    return rows
