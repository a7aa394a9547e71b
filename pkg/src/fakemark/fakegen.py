"""Fake-tuple generation.

The default generator draws every attribute independently from that
attribute's empirical distribution in the real table. An external text
generation service can be plugged in instead; it speaks a small JSON
protocol (``POST {schema, sample_rows, count}`` -> ``{rows: [[...], ...]}``).

Whatever the source, the returned :class:`FakeTupleSet` is guaranteed to have
pairwise-distinct canonical keys that do not occur in the real table.
"""

from __future__ import annotations

import json
import os
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, FormatError, GenerationError, TransportError, ValidationError
from .store import Row, Schema, Table, canonical_keys

ENDPOINT_ENV = "FAKEMARK_GENERATOR_URL"
TIMEOUT_ENV = "FAKEMARK_GENERATOR_TIMEOUT"
GENERATOR_KINDS = ("mimic", "external")


@dataclass(frozen=True)
class FakeTupleSet:
    groups: tuple[tuple[Row, ...], ...]
    schema: Schema
    match_subset: tuple[int, ...]

    def __post_init__(self) -> None:
        groups = tuple(tuple(tuple(r) for r in g) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "match_subset", tuple(self.match_subset))
        if not groups:
            raise ValidationError("a fake tuple set needs at least one group")
        sizes = {len(g) for g in groups}
        if len(sizes) != 1 or 0 in sizes:
            raise ValidationError(f"groups must all hold the same positive number of tuples, got {sorted(sizes)}")
        keys = canonical_keys(self.rows(), self.match_subset, arity=self.schema.arity)
        if len(set(keys)) != len(keys):
            raise ValidationError("fake tuples must have pairwise-distinct keys")

    @property
    def L(self) -> int:
        return len(self.groups)

    @property
    def x(self) -> int:
        return len(self.groups[0])

    def rows(self) -> list[Row]:
        return [row for group in self.groups for row in group]

    def group_keys(self) -> list[list[str]]:
        arity = self.schema.arity
        return [canonical_keys(g, self.match_subset, arity=arity) for g in self.groups]


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str = "mimic"
    seed: int = 0
    endpoint: str | None = None
    max_retries: int = 20
    timeout: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in GENERATOR_KINDS:
            raise DomainError(f"generator kind must be one of {GENERATOR_KINDS}, got {self.kind!r}")
        if self.max_retries < 0:
            raise DomainError("max_retries must be >= 0")

    def resolved_endpoint(self) -> str:
        endpoint = self.endpoint or os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            raise DomainError(f"external generator needs an endpoint (flag or ${ENDPOINT_ENV})")
        return endpoint

    def resolved_timeout(self) -> float:
        if self.timeout is not None:
            return float(self.timeout)
        return float(os.environ.get(TIMEOUT_ENV, "30"))


def _key_width(table: Table, key_index: int | None) -> int:
    if key_index is None or table.n == 0:
        return 8
    return min(18, max(6, max(len(row[key_index]) for row in table.rows)))


def fresh_identifier(rng: np.random.Generator, width: int) -> str:
    return str(int(rng.integers(10 ** (width - 1), 10**width)))


def statistical_mimic_row(
    table: Table,
    rng: np.random.Generator,
    key_index: int | None = None,
    key_width: int = 8,
) -> Row:
    """One fake row, each attribute copied from an independently drawn real row."""
    if table.n == 0:
        raise DomainError("cannot mimic an empty table")
    picks = rng.integers(0, table.n, size=table.schema.arity)
    rows = table.rows
    values = [rows[r][c] for c, r in enumerate(picks)]
    if key_index is not None:
        values[key_index] = fresh_identifier(rng, key_width)
    return tuple(values)


def external_generate(
    schema: Schema,
    sample_rows: Sequence[Row],
    count: int,
    endpoint: str,
    timeout: float = 30.0,
) -> list[Row]:
    if count < 1:
        raise DomainError("count must be >= 1")
    body = json.dumps(
        {"schema": list(schema.names), "sample_rows": [list(r) for r in sample_rows], "count": count}
    ).encode("utf-8")
    request = urllib.request.Request(
        endpoint, data=body, headers={"Content-Type": "application/json"}, method="POST"
    )
    try:
        with urllib.request.urlopen(request, timeout=timeout) as resp:
            raw = resp.read()
    except (urllib.error.URLError, OSError) as exc:
        raise TransportError(f"generator service at {endpoint} failed: {exc}") from exc

    try:
        payload = json.loads(raw)
    except ValueError as exc:
        raise FormatError(f"response is not JSON: {exc}", payload=raw) from exc
    rows = payload.get("rows") if isinstance(payload, dict) else None
    if not isinstance(rows, list):
        raise FormatError("response has no 'rows' array", payload=raw)
    if len(rows) < count:
        raise FormatError(f"asked for {count} rows, got {len(rows)}", payload=raw)
    out = []
    for i, rec in enumerate(rows[:count]):
        if not isinstance(rec, list) or len(rec) != schema.arity:
            raise FormatError(f"row {i} does not have {schema.arity} values: {rec!r}", payload=raw)
        values = []
        for v in rec:
            if isinstance(v, bool) or not isinstance(v, (str, int, float)):
                raise FormatError(f"row {i} holds a non-scalar value {v!r}", payload=raw)
            values.append(v if isinstance(v, str) else str(v))
        out.append(tuple(values))
    return out


def generate(
    table: Table,
    L: int,
    x: int,
    spec: GeneratorSpec | None = None,
    key_column: str | None = None,
) -> FakeTupleSet:
    """Build ``L`` groups of ``x`` fake tuples absent from ``table``."""
    spec = spec or GeneratorSpec()
    if L < 1 or x < 1:
        raise DomainError(f"need L >= 1 and x >= 1, got L={L}, x={x}")
    schema = table.schema
    subset = schema.match_subset(key_column)
    key_index = schema.index_of(key_column) if key_column is not None else None
    real = table.key_index(subset)
    need = L * x
    budget = spec.max_retries * need
    rng = np.random.default_rng(spec.seed)
    width = _key_width(table, key_index)

    accepted: list[Row] = []
    seen: set[str] = set()
    rejected = 0

    def offer(row: Row) -> None:
        nonlocal rejected
        key = canonical_keys([row], subset, schema.arity)[0]
        if key in real or key in seen:
            rejected += 1
        else:
            seen.add(key)
            accepted.append(row)

    if spec.kind == "mimic":
        if table.n == 0:
            raise DomainError("the statistical mimic needs a non-empty table")
        while len(accepted) < need:
            if rejected > budget:
                raise GenerationError(
                    f"only {len(accepted)} of {need} unique fake tuples after {rejected} rejections; "
                    "widen the matched attributes or lower L*x"
                )
            offer(statistical_mimic_row(table, rng, key_index, width))
    else:
        endpoint = spec.resolved_endpoint()
        timeout = spec.resolved_timeout()
        n_sample = min(table.n, 20)
        sample = [table.rows[i] for i in sorted(rng.choice(table.n, n_sample, replace=False))] if n_sample else []
        for _ in range(spec.max_retries + 1):
            if len(accepted) >= need or rejected > budget:
                break
            for row in external_generate(schema, sample, need - len(accepted), endpoint, timeout):
                if key_index is not None:
                    row = row[:key_index] + (fresh_identifier(rng, width),) + row[key_index + 1 :]
                offer(row)
        if len(accepted) < need:
            raise GenerationError(
                f"external generator yielded {len(accepted)} of {need} unique fake tuples "
                f"({rejected} duplicates or collisions)"
            )

    groups = tuple(tuple(accepted[j * x : (j + 1) * x]) for j in range(L))
    return FakeTupleSet(groups, schema, subset)
