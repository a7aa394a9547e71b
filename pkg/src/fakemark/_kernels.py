"""Numeric kernels with a numba path and a pure-numpy path.

Set ``FAKEMARK_DISABLE_NUMBA=1`` to force the numpy implementations (also
used automatically when numba is not importable). Both paths consume the
same inputs and return identical results, so callers never see which one
ran.
"""

from __future__ import annotations

import os

import numpy as np

DISABLE_ENV = "FAKEMARK_DISABLE_NUMBA"


def _numba_wanted() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() not in ("1", "true", "yes", "on")


try:
    if not _numba_wanted():
        raise ImportError
    from numba import njit
except ImportError:
    njit = None

USING_NUMBA = njit is not None


# ---------------------------------------------------------------- numpy path

def containment_counts_numpy(n: int) -> np.ndarray:
    """``out[x, d]`` = number of ``d``-subsets of ``range(n)`` containing ``range(x)``.

    Brute force over all ``2**n`` bitmasks.
    """
    masks = np.arange(1 << n, dtype=np.int64)
    size = np.zeros(masks.shape, dtype=np.int64)
    trailing = np.zeros(masks.shape, dtype=np.int64)
    alive = np.ones(masks.shape, dtype=bool)
    for b in range(n):
        bit = ((masks >> b) & 1).astype(bool)
        size += bit
        alive &= bit
        trailing += alive
    out = np.zeros((n + 1, n + 1), dtype=np.int64)
    for x in range(n + 1):
        out[x] = np.bincount(size[trailing >= x], minlength=n + 1)
    return out


def count_complete_deletions_numpy(keys: np.ndarray, x: int, d: int) -> int:
    """Count rows of ``keys`` whose first ``x`` entries are all among the ``d`` smallest.

    Each row is one trial: deleting the ``d`` smallest of ``n`` i.i.d.
    uniform keys is a uniformly random ``d``-subset.
    """
    if d < x:
        return 0
    top = keys[:, :x].max(axis=1)
    rank = (keys <= top[:, None]).sum(axis=1)
    return int((rank <= d).sum())


def pair_counts_numpy(groups: np.ndarray, polarity: np.ndarray, L: int) -> np.ndarray:
    """``out[j] = (#10, #01)`` over physically adjacent rows that are both in group ``j``.

    Rows with a negative group are ignored and break adjacency.
    """
    out = np.zeros((L, 2), dtype=np.int64)
    if groups.size < 2:
        return out
    same = (groups[:-1] == groups[1:]) & (groups[:-1] >= 0)
    g = groups[:-1][same]
    upper = polarity[:-1][same]
    lower = polarity[1:][same]
    out[:, 0] = np.bincount(g[(upper == 1) & (lower == 0)], minlength=L)[:L]
    out[:, 1] = np.bincount(g[(upper == 0) & (lower == 1)], minlength=L)[:L]
    return out


# ---------------------------------------------------------------- numba path

if USING_NUMBA:

    @njit(cache=True)
    def _containment_counts_nb(n):
        out = np.zeros((n + 1, n + 1), dtype=np.int64)
        for mask in range(1 << n):
            size = 0
            m = mask
            while m:
                m &= m - 1
                size += 1
            t = 0
            while t < n and (mask >> t) & 1:
                t += 1
            for x in range(t + 1):
                out[x, size] += 1
        return out

    @njit(cache=True)
    def _count_complete_deletions_nb(keys, x, d):
        if d < x:
            return 0
        trials, n = keys.shape
        hits = 0
        for t in range(trials):
            top = keys[t, 0]
            for i in range(1, x):
                if keys[t, i] > top:
                    top = keys[t, i]
            rank = 0
            for i in range(n):
                if keys[t, i] <= top:
                    rank += 1
                    if rank > d:
                        break
            if rank <= d:
                hits += 1
        return hits

    @njit(cache=True)
    def _pair_counts_nb(groups, polarity, L):
        out = np.zeros((L, 2), dtype=np.int64)
        for i in range(groups.size - 1):
            g = groups[i]
            if g < 0 or groups[i + 1] != g:
                continue
            a = polarity[i]
            b = polarity[i + 1]
            if a == 1 and b == 0:
                out[g, 0] += 1
            elif a == 0 and b == 1:
                out[g, 1] += 1
        return out


# ---------------------------------------------------------------- dispatch

def containment_counts(n: int) -> np.ndarray:
    if n < 0 or n > 26:
        raise ValueError(f"exhaustive enumeration supports 0 <= n <= 26, got {n}")
    if USING_NUMBA:
        return _containment_counts_nb(n)
    return containment_counts_numpy(n)


def count_complete_deletions(keys: np.ndarray, x: int, d: int) -> int:
    keys = np.ascontiguousarray(keys, dtype=np.float64)
    if USING_NUMBA:
        return int(_count_complete_deletions_nb(keys, x, d))
    return count_complete_deletions_numpy(keys, x, d)


def pair_counts(groups: np.ndarray, polarity: np.ndarray, L: int) -> np.ndarray:
    groups = np.ascontiguousarray(groups, dtype=np.int64)
    polarity = np.ascontiguousarray(polarity, dtype=np.int64)
    if USING_NUMBA:
        return _pair_counts_nb(groups, polarity, L)
    return pair_counts_numpy(groups, polarity, L)
