"""Prior-art comparison scheme: one bit per hash group via 10/01 combinations.

Every tuple is assigned a group ``G`` in ``[0, L)`` and a polarity (a
"1-tuple" or a "0-tuple") by a keyed hash of its content, so the split is
independent of row order. To embed bit ``j`` the scheme inserts ``x`` fake
tuples of group ``j`` directly below real tuples of group ``j`` of the
opposite polarity: a 0-tuple under a 1-tuple forms a "10" combination
(bit 1), a 1-tuple under a 0-tuple forms a "01" combination (bit 0). Every
copy therefore receives ``x * L`` fake tuples whatever its watermark.

Extraction counts, per group, the surviving 10 and 01 combinations built by
the registered fake tuples (the lower member of each combination decides its
type) and takes the majority. A group whose fake tuples were all deleted has
no votes; its bit is then drawn from a keyed fair coin.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .codebook import WatermarkSequence
from .errors import CapacityError, DomainError, GenerationError, ValidationError
from .fakegen import _key_width, statistical_mimic_row
from .store import Row, Schema, Table, canonical_key, canonical_keys


@dataclass(frozen=True)
class BaselineParams:
    L: int
    x: int
    key: bytes = b"fakemark-baseline"

    def __post_init__(self) -> None:
        if self.L < 1 or self.x < 1:
            raise DomainError(f"need L >= 1 and x >= 1, got L={self.L}, x={self.x}")
        if isinstance(self.key, str):
            object.__setattr__(self, "key", self.key.encode("utf-8"))


@dataclass(frozen=True)
class TupleClass:
    polarity: int
    group: int


def _digest(key: bytes, message: str) -> bytes:
    if len(key) > 64:
        key = hashlib.blake2b(key).digest()
    return hashlib.blake2b(message.encode("utf-8"), key=key, digest_size=16).digest()


def _class_of_key(key: str, params: BaselineParams) -> TupleClass:
    h = _digest(params.key, key)
    return TupleClass(polarity=h[8] & 1, group=int.from_bytes(h[:8], "big") % params.L)


def classify(row: Row, params: BaselineParams, subset: Sequence[int] | None = None) -> TupleClass:
    subset = range(len(row)) if subset is None else subset
    return _class_of_key(canonical_key(row, subset), params)


def classify_table(
    table: Table, params: BaselineParams, subset: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Group and polarity arrays for every row; cached on the table."""
    cache_key = ("baseline-classes", params.key, params.L, tuple(subset))
    cached = table._indexes.get(cache_key)
    if cached is None:
        keys = canonical_keys(table.rows, subset, table.schema.arity)
        classes = [_class_of_key(k, params) for k in keys]
        cached = (
            np.array([c.group for c in classes], dtype=np.int64),
            np.array([c.polarity for c in classes], dtype=np.int64),
        )
        table._indexes[cache_key] = cached
    return cached


def coin(params: BaselineParams, seed: int, group: int) -> int:
    return _digest(params.key, f"coin:{seed}:{group}")[0] & 1


@dataclass(frozen=True)
class BaselinePool:
    """Registered fake tuples: ``slots[j][polarity]`` holds ``x`` rows of group ``j``."""

    slots: tuple[tuple[tuple[Row, ...], tuple[Row, ...]], ...]
    schema: Schema
    match_subset: tuple[int, ...]

    def __post_init__(self) -> None:
        slots = tuple(tuple(tuple(tuple(r) for r in s) for s in pair) for pair in self.slots)
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "match_subset", tuple(self.match_subset))
        if not slots or any(len(pair) != 2 for pair in slots):
            raise ValidationError("pool needs one (0-tuples, 1-tuples) pair per group")
        sizes = {len(s) for pair in slots for s in pair}
        if len(sizes) != 1 or 0 in sizes:
            raise ValidationError("every pool slot must hold the same positive number of rows")
        keys = canonical_keys(self.rows(), self.match_subset, self.schema.arity)
        if len(set(keys)) != len(keys):
            raise ValidationError("pool rows must have pairwise-distinct keys")

    @property
    def L(self) -> int:
        return len(self.slots)

    @property
    def x(self) -> int:
        return len(self.slots[0][0])

    def rows(self) -> list[Row]:
        return [r for pair in self.slots for s in pair for r in s]


def generate_pool(
    table: Table,
    params: BaselineParams,
    seed: int = 0,
    key_column: str | None = None,
    max_retries: int = 200,
) -> BaselinePool:
    """Draw mimic rows until every (group, polarity) slot holds ``x`` of them."""
    if table.n == 0:
        raise DomainError("cannot mimic an empty table")
    schema = table.schema
    subset = schema.match_subset(key_column)
    key_index = schema.index_of(key_column) if key_column is not None else None
    width = _key_width(table, key_index)
    real = table.key_index(subset)
    rng = np.random.default_rng(seed)
    L, x = params.L, params.x
    slots: list[list[list[Row]]] = [[[], []] for _ in range(L)]
    seen: set[str] = set()
    missing = 2 * L * x
    budget = max_retries * 2 * L * x
    draws = 0
    while missing:
        if draws > budget:
            raise GenerationError(f"{missing} pool slots still empty after {draws} draws")
        draws += 1
        row = statistical_mimic_row(table, rng, key_index, width)
        key = canonical_keys([row], subset, schema.arity)[0]
        if key in real or key in seen:
            continue
        cls = _class_of_key(key, params)
        slot = slots[cls.group][cls.polarity]
        if len(slot) < x:
            slot.append(row)
            seen.add(key)
            missing -= 1
    return BaselinePool(tuple((tuple(a), tuple(b)) for a, b in slots), schema, subset)


def baseline_embed(
    table: Table,
    w: WatermarkSequence,
    params: BaselineParams,
    pool: BaselinePool,
    seed: int = 0,
) -> Table:
    if len(w) != params.L or pool.L != params.L or pool.x != params.x:
        raise DomainError("watermark, parameters and pool disagree on L or x")
    if pool.schema != table.schema:
        raise DomainError("pool was generated for a different schema")
    groups, polarity = classify_table(table, params, pool.match_subset)
    rng = np.random.default_rng(seed)
    below: dict[int, Row] = {}
    for j, bit in enumerate(w.bits):
        # bit 1: 0-tuple under a 1-tuple; bit 0: 1-tuple under a 0-tuple
        anchors = np.flatnonzero((groups == j) & (polarity == bit))
        if anchors.size < params.x:
            raise CapacityError(
                f"group {j} has {anchors.size} anchor rows of polarity {bit}, need {params.x}"
            )
        chosen = np.sort(rng.choice(anchors, size=params.x, replace=False))
        for anchor, fake in zip(chosen.tolist(), pool.slots[j][1 - bit]):
            below[anchor] = fake
    rows: list[Row] = []
    for i, row in enumerate(table.rows):
        rows.append(row)
        fake = below.get(i)
        if fake is not None:
            rows.append(fake)
    return table.with_rows(rows)


def combination_votes(table: Table, params: BaselineParams, pool: BaselinePool) -> np.ndarray:
    """``votes[j] = (#10, #01)`` contributed by registered fake tuples still in ``table``."""
    present = table.key_index(pool.match_subset)
    votes = np.zeros((params.L, 2), dtype=np.int64)
    arity = pool.schema.arity
    for key in canonical_keys(pool.rows(), pool.match_subset, arity):
        if key in present:
            cls = _class_of_key(key, params)
            votes[cls.group, cls.polarity] += 1
    return votes


def baseline_extract(
    table: Table, params: BaselineParams, pool: BaselinePool, seed: int = 0
) -> WatermarkSequence:
    votes = combination_votes(table, params, pool)
    bits = []
    for j in range(params.L):
        tens, zero_ones = int(votes[j, 0]), int(votes[j, 1])
        if tens > zero_ones:
            bits.append(1)
        elif tens < zero_ones:
            bits.append(0)
        else:
            bits.append(coin(params, seed, j))
    return WatermarkSequence(tuple(bits))


def combination_counts(table: Table, params: BaselineParams, subset: Sequence[int]) -> np.ndarray:
    """Blind ``(#10, #01)`` per group over adjacent rows sharing a group.

    Counts every row, real or fake. The spread of these counts on real data
    dwarfs ``x`` for realistic table sizes, which is why extraction reads the
    registered fake tuples instead.
    """
    groups, polarity = classify_table(table, params, subset)
    return _kernels.pair_counts(groups, polarity, params.L)
