"""Random deletion attacks and a brute-force oracle for group wipe-out."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import DomainError
from .store import Table

EXHAUSTIVE_MAX_N = 20
_MC_CHUNK_CELLS = 2_000_000


@dataclass(frozen=True)
class AttackSpec:
    p: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"deletion ratio must lie in [0, 1], got {self.p}")


def deletion_count(n: int, p: float) -> int:
    """``round(p * n)`` with halves rounded away from zero."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"deletion ratio must lie in [0, 1], got {p}")
    return min(n, int(math.floor(p * n + 0.5)))


def delete_random(table: Table, spec: AttackSpec) -> Table:
    d = deletion_count(table.n, spec.p)
    if d == 0:
        return table
    rng = np.random.default_rng(spec.seed)
    keep = np.ones(table.n, dtype=bool)
    keep[rng.choice(table.n, size=d, replace=False)] = False
    rows = table.rows
    return table.with_rows(rows[i] for i in np.flatnonzero(keep).tolist())


@lru_cache(maxsize=None)
def _containment_table(n: int) -> np.ndarray:
    return _kernels.containment_counts(n)


def exhaustive_complete_deletion(n: int, x: int, d: int) -> Fraction:
    """Exact share of ``d``-subsets of ``n`` rows that swallow a fixed ``x``-set.

    Enumerates all ``2**n`` subsets; only for ``n <= 20``.
    """
    _check(n, x, d)
    if n > EXHAUSTIVE_MAX_N:
        raise DomainError(f"exhaustive mode is limited to n <= {EXHAUSTIVE_MAX_N}")
    counts = _containment_table(n)
    return Fraction(int(counts[x, d]), int(counts[0, d]))


def _check(n: int, x: int, d: int) -> None:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not 1 <= x <= n:
        raise DomainError(f"need 1 <= x <= n, got x={x}, n={n}")
    if not 0 <= d <= n:
        raise DomainError(f"need 0 <= d <= n, got d={d}, n={n}")


def survival_probability_oracle(
    n: int,
    x: int,
    d: int,
    trials: int = 10_000,
    seed: int = 0,
    exhaustive: bool | None = None,
) -> float:
    """Estimate the chance that a fixed group of ``x`` rows is entirely deleted.

    ``exhaustive=None`` enumerates when ``n <= 20`` and samples otherwise.
    Sampling draws ``trials`` uniformly random deletion sets of size ``d``.
    """
    _check(n, x, d)
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if exhaustive is None:
        exhaustive = n <= EXHAUSTIVE_MAX_N
    if exhaustive:
        return float(exhaustive_complete_deletion(n, x, d))
    rng = np.random.default_rng(seed)
    chunk = max(1, _MC_CHUNK_CELLS // n)
    hits = 0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        hits += _kernels.count_complete_deletions(rng.random((m, n)), x, d)
        done += m
    return hits / trials
