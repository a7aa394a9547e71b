"""Closed-form robustness and transparency figures.

Notation: ``n`` rows after embedding, deletion ratio ``p``, ``x`` fake tuples
per group, watermark length ``L``, ``n_u`` users. ``p_cd`` is the probability
that one group of fake tuples is deleted completely.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from itertools import islice

from .attacks import deletion_count
from .codebook import Codebook, iter_sparse_order, watermark_length
from .errors import CapacityError, DomainError

LOG_SPACE_ABOVE_X = 50


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def p_cd_from_count(n: int, d: int, x: int) -> float:
    """Hypergeometric wipe-out probability for exactly ``d`` deleted rows."""
    if not 1 <= x <= n:
        raise DomainError(f"need 1 <= x <= n, got x={x}, n={n}")
    if not 0 <= d <= n:
        raise DomainError(f"need 0 <= d <= n, got d={d}, n={n}")
    if d < x:
        return 0.0
    if x > LOG_SPACE_ABOVE_X:
        return math.exp(sum(math.log(d - i) - math.log(n - i) for i in range(x)))
    prob = 1.0
    for i in range(x):
        prob *= (d - i) / (n - i)
    return prob


def p_cd_exact(n: int, p: float, x: int) -> float:
    _check_prob("p", p)
    return p_cd_from_count(n, deletion_count(n, p), x)


def p_cd_approx(p: float, x: int) -> float:
    _check_prob("p", p)
    return p**x


def p_bit(one_bit: bool, p_cd: float) -> float:
    """Probability that a bit survives extraction."""
    _check_prob("p_cd", p_cd)
    return 1.0 - p_cd if one_bit else 1.0


def p_ka(p_cd: float, k: int, L: int) -> float:
    if not 0 <= k <= L:
        raise DomainError(f"need 0 <= k <= L, got k={k}, L={L}")
    return p_bit(True, p_cd) ** k * p_bit(False, p_cd) ** (L - k)


def p_ko(L: int, k: int) -> float:
    if not 0 <= k <= L:
        raise DomainError(f"need 0 <= k <= L, got k={k}, L={L}")
    return math.comb(L, k) / 2**L


def ep_uniform(p_cd: float, L: int) -> float:
    _check_prob("p_cd", p_cd)
    return (1.0 - 0.5 * p_cd) ** L


def ep_uniform_sum(p_cd: float, L: int) -> float:
    """Same quantity as :func:`ep_uniform`, summed over the popcount classes."""
    return math.fsum(p_ka(p_cd, k, L) * p_ko(L, k) for k in range(L + 1))


def ep_baseline(p_cd: float, L: int) -> float:
    """Whole-watermark success when a wiped group yields a fair coin for its bit."""
    _check_prob("p_cd", p_cd)
    per_bit = 1.0 - 0.5 * p_cd
    return per_bit**L


def ep_sparse(n_u: int, L: int, p_cd: float) -> float:
    """Success probability averaged uniformly over the ``n_u`` sparsest watermarks."""
    _check_prob("p_cd", p_cd)
    if n_u < 1:
        raise DomainError(f"n_u must be >= 1, got {n_u}")
    if n_u > 1 << L:
        raise CapacityError(f"{n_u} users do not fit in {L}-bit watermarks")
    survive = 1.0 - p_cd
    return math.fsum(survive ** w.popcount() for w in islice(iter_sparse_order(L), n_u)) / n_u


def ni_bound(x: int, n_u: int) -> float:
    return x * watermark_length(n_u) / 2


def ni_expected(codebook: Codebook, x: int) -> float:
    """Average number of inserted fake tuples per distributed copy."""
    return x * sum(w.popcount() for w in codebook.watermarks) / len(codebook)


def ni_sparse(x: int, n_u: int, L: int | None = None) -> float:
    L = watermark_length(n_u) if L is None else L
    if n_u > 1 << L:
        raise CapacityError(f"{n_u} users do not fit in {L}-bit watermarks")
    return x * sum(w.popcount() for w in islice(iter_sparse_order(L), n_u)) / n_u


@dataclass(frozen=True)
class TheoryPoint:
    n: int
    p: float
    x: int
    L: int
    n_u: int
    p_cd_exact: float
    p_cd_approx: float
    p1: float
    ep: float
    ep_baseline: float
    ep_sparse: float
    ni_bound: float

    def as_row(self) -> dict:
        return asdict(self)


def theory_point(n: int, p: float, x: int, L: int, n_u: int) -> TheoryPoint:
    if n_u > 1 << L:
        raise CapacityError(f"{n_u} users do not fit in {L}-bit watermarks")
    exact = p_cd_exact(n, p, x)
    return TheoryPoint(
        n=n,
        p=p,
        x=x,
        L=L,
        n_u=n_u,
        p_cd_exact=exact,
        p_cd_approx=p_cd_approx(p, x),
        p1=p_bit(True, exact),
        ep=ep_uniform(exact, L),
        ep_baseline=ep_baseline(exact, L),
        ep_sparse=ep_sparse(n_u, L, exact),
        ni_bound=x * L / 2,
    )
