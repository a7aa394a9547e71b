"""In-memory tables, canonical tuple keys and CSV I/O.

A :class:`Table` is an ordered sequence of string tuples under a
:class:`Schema`. Rows are plain ``tuple[str, ...]`` values. Membership tests
go through canonical keys: the selected values of a row, each escaped, joined
with ``|``. The escaping makes the join injective, so two rows share a key
exactly when they agree on every selected attribute.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import DomainError, TableParseError, ValidationError

Row = tuple[str, ...]

KEY_SEPARATOR = "|"
_ESCAPE = "\\"
_ESCAPES = str.maketrans({_ESCAPE: _ESCAPE * 2, KEY_SEPARATOR: _ESCAPE + KEY_SEPARATOR})


@dataclass(frozen=True)
class Schema:
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise ValidationError("schema needs at least one attribute")
        for name in names:
            if not isinstance(name, str) or not name:
                raise ValidationError(f"attribute names must be non-empty strings, got {name!r}")
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate attribute names in {list(names)}")

    @property
    def arity(self) -> int:
        return len(self.names)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DomainError(f"unknown attribute {name!r}; schema is {list(self.names)}") from None

    def match_subset(self, key_column: str | None = None) -> tuple[int, ...]:
        """All attribute indices except the synthetic key column, if any."""
        skip = self.index_of(key_column) if key_column is not None else -1
        subset = tuple(i for i in range(self.arity) if i != skip)
        if not subset:
            raise DomainError("match subset is empty: the key column is the only attribute")
        return subset


@dataclass(frozen=True)
class Table:
    schema: Schema
    rows: tuple[Row, ...] = ()
    _indexes: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        rows = tuple(self.rows)
        object.__setattr__(self, "rows", rows)
        k = self.schema.arity
        for i, row in enumerate(rows):
            if len(row) != k:
                raise ValidationError(f"row {i} has {len(row)} values, schema has {k}")

    @property
    def n(self) -> int:
        return len(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[Row]:
        return iter(self.rows)

    def with_rows(self, rows: Iterable[Row]) -> "Table":
        return Table(self.schema, tuple(rows))

    def column(self, index: int) -> list[str]:
        return [row[index] for row in self.rows]

    def key_index(self, subset: Sequence[int]) -> frozenset[str]:
        """Canonical keys of all rows over ``subset``; built once per subset and cached."""
        subset = tuple(subset)
        index = self._indexes.get(subset)
        if index is None:
            index = frozenset(canonical_keys(self.rows, subset, arity=self.schema.arity))
            self._indexes[subset] = index
        return index


def _check_subset(subset: Sequence[int], arity: int) -> tuple[int, ...]:
    subset = tuple(subset)
    for i in subset:
        if not 0 <= i < arity:
            raise DomainError(f"attribute index {i} out of range for arity {arity}")
    return subset


def canonical_key(row: Row, subset: Sequence[int]) -> str:
    subset = _check_subset(subset, len(row))
    return KEY_SEPARATOR.join(row[i].translate(_ESCAPES) for i in subset)


def canonical_keys(rows: Iterable[Row], subset: Sequence[int], arity: int) -> list[str]:
    """Bulk :func:`canonical_key` with the subset validated once."""
    subset = _check_subset(subset, arity)
    sep = KEY_SEPARATOR
    if len(subset) == arity and subset == tuple(range(arity)):
        return [sep.join([v.translate(_ESCAPES) for v in row]) for row in rows]
    return [sep.join([row[i].translate(_ESCAPES) for i in subset]) for row in rows]


def contains(table: Table, key: str, subset: Sequence[int]) -> bool:
    return key in table.key_index(subset)


def load_table(
    path: str | os.PathLike, has_header: bool = True, delimiter: str = ","
) -> Table:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            records = [rec for rec in reader if rec]
        except csv.Error as exc:
            raise TableParseError(f"malformed CSV near line {reader.line_num}: {exc}") from exc
    if not records:
        raise TableParseError("empty file: no header or rows to infer a schema from")
    if has_header:
        header, body = records[0], records[1:]
        try:
            schema = Schema(tuple(header))
        except ValidationError as exc:
            raise TableParseError(f"bad header: {exc}") from exc
    else:
        body = records
        schema = Schema(tuple(f"col{i}" for i in range(len(records[0]))))
    k = schema.arity
    rows = []
    for i, rec in enumerate(body):
        if len(rec) != k:
            raise TableParseError(f"expected {k} values, found {len(rec)}", row_index=i)
        rows.append(tuple(rec))
    return Table(schema, tuple(rows))


def save_table(table: Table, path: str | os.PathLike, delimiter: str = ",") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(table.schema.names)
        writer.writerows(table.rows)
