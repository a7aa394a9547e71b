"""Embedding, extraction and leak-suspect identification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import Codebook, WatermarkSequence, hamming, watermark_length
from .errors import DomainError, ValidationError
from .fakegen import FakeTupleSet
from .store import Row, Table


@dataclass(frozen=True)
class SchemeParams:
    n_u: int
    L: int
    x: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.x < 1:
            raise ValidationError(f"x must be >= 1, got {self.x}")
        expected = watermark_length(self.n_u)
        if self.L != expected:
            raise ValidationError(f"L={self.L} but {self.n_u} users need L={expected}")

    @classmethod
    def for_users(cls, n_u: int, x: int, seed: int = 0) -> "SchemeParams":
        return cls(n_u=n_u, L=watermark_length(n_u), x=x, seed=seed)


@dataclass(frozen=True)
class ExtractionResult:
    extracted: WatermarkSequence
    exact_match: str | None
    suspects: tuple[tuple[str, int], ...]

    def to_dict(self) -> dict:
        return {
            "extracted": str(self.extracted),
            "exact_match": self.exact_match,
            "suspects": [{"user": u, "distance": d} for u, d in self.suspects],
        }


def user_seed(seed: int, user_index: int) -> int:
    return seed ^ user_index


def _check_compatible(table: Table, tf: FakeTupleSet) -> None:
    if tf.schema != table.schema:
        raise DomainError("fake tuples were generated for a different schema")


def embed(table: Table, w: WatermarkSequence, tf: FakeTupleSet, seed: int = 0) -> Table:
    """Insert group ``j`` of ``tf`` for every '1' bit ``j`` of ``w``.

    Fake rows land at seeded random positions; real rows keep their relative
    order.
    """
    if len(w) != tf.L:
        raise DomainError(f"watermark has {len(w)} bits but there are {tf.L} fake groups")
    _check_compatible(table, tf)
    fakes: list[Row] = [row for bit, group in zip(w.bits, tf.groups) if bit for row in group]
    if not fakes:
        return table
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(fakes))
    total = table.n + len(fakes)
    is_fake = np.zeros(total, dtype=bool)
    is_fake[rng.choice(total, size=len(fakes), replace=False)] = True

    real_it = iter(table.rows)
    fake_it = iter([fakes[i] for i in order])
    rows = [next(fake_it) if f else next(real_it) for f in is_fake.tolist()]
    return table.with_rows(rows)


def embed_all(
    table: Table, codebook: Codebook, tf: FakeTupleSet, seed: int = 0
) -> list[tuple[str, Table]]:
    return [
        (user, embed(table, w, tf, user_seed(seed, i)))
        for i, (user, w) in enumerate(codebook.entries)
    ]


def extract(table: Table, tf: FakeTupleSet) -> WatermarkSequence:
    """Bit ``j`` is 1 iff at least one tuple of group ``j`` is still present."""
    present = table.key_index(tf.match_subset)
    return WatermarkSequence(
        tuple(int(any(k in present for k in keys)) for keys in tf.group_keys())
    )


def surviving_counts(table: Table, tf: FakeTupleSet) -> list[int]:
    """Number of tuples of each group still present in ``table``."""
    present = table.key_index(tf.match_subset)
    return [sum(k in present for k in keys) for keys in tf.group_keys()]


def rank_suspects(w_prime: WatermarkSequence, codebook: Codebook) -> list[tuple[str, int]]:
    """Users whose watermark covers every '1' of ``w_prime``, nearest first.

    Deletion can only turn 1s into 0s, so the leaker's watermark is a bitwise
    superset of the extracted one. When no user qualifies (the table was
    tampered with in some other way) every user is ranked instead.
    """
    if len(w_prime) != codebook.L:
        raise DomainError(f"extracted watermark has {len(w_prime)} bits, codebook uses {codebook.L}")
    target = w_prime.as_int()
    candidates = [(u, w) for u, w in codebook.entries if w.as_int() & target == target]
    if not candidates:
        candidates = list(codebook.entries)
    ranked = [(hamming(w_prime, w), i, u) for i, (u, w) in enumerate(candidates)]
    ranked.sort()
    return [(u, d) for d, _, u in ranked]


def identify(w_prime: WatermarkSequence, codebook: Codebook) -> ExtractionResult:
    if len(w_prime) != codebook.L:
        raise DomainError(f"extracted watermark has {len(w_prime)} bits, codebook uses {codebook.L}")
    exact = codebook.user_of(w_prime)
    if exact is not None:
        return ExtractionResult(w_prime, exact, ((exact, 0),))
    return ExtractionResult(w_prime, None, tuple(rank_suspects(w_prime, codebook)))
