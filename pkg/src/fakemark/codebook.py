"""Sparse-priority codebook: which watermark each user receives.

Watermarks of length ``L`` are handed out sparsest first, i.e. in order of
increasing number of '1' bits, ties broken by the numeric value of the
bitstring read left to right. Bit 0 is the leftmost character and selects
fake-tuple group 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice
from typing import Iterator, Sequence

from .errors import CapacityError, DomainError, ValidationError

MAX_ENUMERABLE_L = 30


@dataclass(frozen=True)
class WatermarkSequence:
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise DomainError("a watermark needs at least one bit")
        if any(b not in (0, 1) for b in bits):
            raise DomainError(f"watermark bits must be 0/1, got {bits}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_str(cls, text: str) -> "WatermarkSequence":
        if not text or set(text) - {"0", "1"}:
            raise DomainError(f"not a bitstring: {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_int(cls, value: int, length: int) -> "WatermarkSequence":
        if value < 0 or value >> length:
            raise DomainError(f"{value} does not fit in {length} bits")
        return cls(tuple((value >> (length - 1 - j)) & 1 for j in range(length)))

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __getitem__(self, j: int) -> int:
        return self.bits[j]

    def as_int(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    def popcount(self) -> int:
        return sum(self.bits)


def popcount(w: WatermarkSequence) -> int:
    return w.popcount()


def hamming(a: WatermarkSequence, b: WatermarkSequence) -> int:
    if len(a) != len(b):
        raise DomainError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a.bits, b.bits))


def watermark_length(n_u: int) -> int:
    """Smallest ``L`` with ``2**L >= n_u``."""
    if n_u < 2:
        raise DomainError(f"need at least 2 users to trace, got n_u={n_u}")
    return (n_u - 1).bit_length()


def _next_same_popcount(v: int) -> int:
    # Gosper's hack: next larger integer with the same number of set bits.
    c = v & -v
    r = v + c
    return (((r ^ v) >> 2) // c) | r


def iter_sparse_order(L: int) -> Iterator[WatermarkSequence]:
    """Lazily yield the ``2**L`` watermarks in sparse-priority order."""
    if L < 1:
        raise DomainError(f"watermark length must be >= 1, got {L}")
    limit = 1 << L
    yield WatermarkSequence.from_int(0, L)
    for k in range(1, L + 1):
        v = (1 << k) - 1
        while v < limit:
            yield WatermarkSequence.from_int(v, L)
            v = _next_same_popcount(v)


def sparse_order(L: int) -> list[WatermarkSequence]:
    if L > MAX_ENUMERABLE_L:
        raise DomainError(f"refusing to materialise 2**{L} watermarks; use iter_sparse_order")
    return list(iter_sparse_order(L))


@dataclass(frozen=True)
class Codebook:
    entries: tuple[tuple[str, WatermarkSequence], ...]

    def __post_init__(self) -> None:
        entries = tuple((str(u), w) for u, w in self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValidationError("codebook is empty")
        users = [u for u, _ in entries]
        if len(set(users)) != len(users):
            raise ValidationError("duplicate user ids in codebook")
        marks = [w for _, w in entries]
        if len(set(marks)) != len(marks):
            raise ValidationError("watermarks in a codebook must be distinct")
        if len({len(w) for w in marks}) != 1:
            raise ValidationError("watermarks in a codebook must share one length")

    @property
    def L(self) -> int:
        return len(self.entries[0][1])

    @property
    def users(self) -> list[str]:
        return [u for u, _ in self.entries]

    @property
    def watermarks(self) -> list[WatermarkSequence]:
        return [w for _, w in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def watermark_of(self, user: str) -> WatermarkSequence:
        for u, w in self.entries:
            if u == user:
                return w
        raise DomainError(f"unknown user {user!r}")

    def index_of(self, user: str) -> int:
        for i, (u, _) in enumerate(self.entries):
            if u == user:
                return i
        raise DomainError(f"unknown user {user!r}")

    def user_of(self, w: WatermarkSequence) -> str | None:
        for u, mark in self.entries:
            if mark == w:
                return u
        return None


def assign(user_ids: Sequence[str], L: int) -> Codebook:
    """Pair ``user_ids[i]`` with the i-th sparsest watermark of length ``L``."""
    user_ids = [str(u) for u in user_ids]
    if L < 1:
        raise DomainError(f"watermark length must be >= 1, got {L}")
    if len(set(user_ids)) != len(user_ids):
        raise DomainError("user ids must be unique")
    if not user_ids:
        raise DomainError("no users to assign")
    if len(user_ids) > (1 << L):
        raise CapacityError(f"{len(user_ids)} users do not fit in {L}-bit watermarks")
    marks = islice(iter_sparse_order(L), len(user_ids))
    return Codebook(tuple(zip(user_ids, marks)))


def default_user_ids(n_u: int) -> list[str]:
    width = max(3, len(str(n_u - 1)))
    return [f"user{i:0{width}d}" for i in range(n_u)]
