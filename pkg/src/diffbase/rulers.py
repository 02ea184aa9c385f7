"""Difference bases for integer intervals (complete sparse rulers).

A set B of integers is a difference basis for [1, n] when every value in
[1, n] occurs as a difference of two marks.  The exact minimum is found by
iterative-deepening search; past the exact threshold a classical explicit
ruler family supplies valid (near-minimal, not necessarily optimal) bases.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from . import _kernels
from .backend import compile_kernel

EXACT_MAX = 40

_ruler_kernel = compile_kernel(_kernels._ruler_dfs)


class IntervalError(ValueError):
    pass


@dataclass(frozen=True)
class IntervalBasis:
    n: int
    marks: tuple[int, ...]
    exact: bool
    method: str

    @property
    def size(self) -> int:
        return len(self.marks)

    @property
    def characteristic(self) -> float:
        return self.size / math.sqrt(self.n)


def covers_interval(marks, n: int) -> bool:
    need = set(range(1, n + 1))
    for a, b in combinations(sorted(marks), 2):
        need.discard(b - a)
    return not need


# ---------------------------------------------------------------------------
# Exact search.
#
# Any minimum basis can be normalized so its smallest mark is 0 and every
# consecutive gap is at most n: a gap above n splits the marks into two
# blocks whose cross differences all exceed n, so sliding the upper block
# down preserves coverage.  Each unordered pair of marks covers at most one
# value of [1, n]; with s marks only C(s,2) pairs exist, so a search at size
# s may waste (duplicate or out-of-range) at most C(s,2) - n pairs.  That
# slack bound is the only prune the search needs.
# ---------------------------------------------------------------------------

def _search_interval(n: int, s: int) -> Optional[tuple[int, ...]]:
    if s * (s - 1) // 2 < n:
        return None
    marks = np.zeros(s + 1, dtype=np.int64)
    cnt = _ruler_kernel(n, s, marks)
    if cnt == 0:
        return None
    return tuple(int(v) for v in marks[:cnt])


@functools.lru_cache(maxsize=None)
def exact_interval_basis(n: int, use_bundle: bool = True) -> tuple[int, ...]:
    """Minimum-size difference basis for [1, n] (marks may exceed n).

    The bundled bases (computed by this same search, regenerable with
    scripts/generate_data.py) are used when available so repeated runs do
    not redo the minutes-long n >= 35 searches; coverage is still checked.
    """
    if n < 1:
        raise IntervalError("n must be >= 1")
    if use_bundle:
        from .tables import bundled_interval_bases

        marks = bundled_interval_bases().get(n)
        if marks is not None:
            if not covers_interval(marks, n):
                raise IntervalError(f"bundled basis for [1,{n}] is invalid")
            return marks
    s = 2
    while s * (s - 1) // 2 < n:
        s += 1
    while True:
        hit = _search_interval(n, s)
        if hit is not None:
            return hit
        s += 1


def interval_delta(n: int) -> int:
    if n <= EXACT_MAX:
        return len(exact_interval_basis(n))
    return len(wichmann_basis(n))


# ---------------------------------------------------------------------------
# Explicit complete rulers (Wichmann family) for lengths past the exact
# threshold.  The difference pattern 1^r, r+1, (2r+1)^r, (4r+3)^s,
# (2r+2)^{r+1}, 1^r yields a complete ruler of length 4r(r+s+2) + 3(s+1)
# with 4r + s + 3 marks, for every r, s >= 0.
# ---------------------------------------------------------------------------

def wichmann_marks(r: int, s: int) -> tuple[int, ...]:
    gaps = (
        [1] * r
        + [r + 1]
        + [2 * r + 1] * r
        + [4 * r + 3] * s
        + [2 * r + 2] * (r + 1)
        + [1] * r
    )
    marks = [0]
    for g in gaps:
        marks.append(marks[-1] + g)
    return tuple(marks)


def wichmann_length(r: int, s: int) -> int:
    return 4 * r * (r + s + 2) + 3 * (s + 1)


@functools.lru_cache(maxsize=None)
def wichmann_basis(n: int) -> tuple[int, ...]:
    """Smallest-member ruler of the explicit family covering [1, n]."""
    best: Optional[tuple[int, int]] = None
    r = 0
    while wichmann_length(r, 0) <= n * 4 + 16:
        base = wichmann_length(r, 0)
        step = 4 * r + 3
        s = 0 if base >= n else -(-(n - base) // step)
        marks = 4 * r + s + 3
        if best is None or marks < best[0]:
            best = (marks, r)
            best_s = s
        r += 1
    marks = wichmann_marks(best[1], best_s)
    assert marks[-1] >= n
    return marks


def interval_basis(n: int, exact_max: int = EXACT_MAX, hard_max: int = 10**6) -> IntervalBasis:
    """Difference basis for [1, n]: exact below the threshold, constructive
    (complete but not necessarily minimal) above it."""
    if n < 1:
        raise IntervalError("n must be >= 1")
    if n > hard_max:
        raise IntervalError(f"n = {n} exceeds configured maximum {hard_max}")
    if n <= exact_max:
        return IntervalBasis(n=n, marks=exact_interval_basis(n), exact=True, method="exact")
    marks = wichmann_basis(n)
    return IntervalBasis(n=n, marks=marks, exact=False, method="wichmann")


def restricted_brute_delta(n: int) -> int:
    """Independent oracle: smallest basis within [0, n], by enumeration."""
    if n < 1:
        raise IntervalError("n must be >= 1")
    for s in range(2, n + 2):
        for marks in combinations(range(n + 1), s):
            if covers_interval(marks, n):
                return s
    raise AssertionError("unreachable")
