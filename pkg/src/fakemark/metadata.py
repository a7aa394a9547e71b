"""JSON persistence of the owner's secret state.

Metadata of the sparse-priority scheme::

    {"params": {"n_u": 3, "L": 2, "x": 5, "seed": 0},
     "schema": ["id", "city", ...],
     "key_column": "id",
     "match_subset": [1, 2, ...],
     "codebook": [{"user": "user000", "watermark": "00"}, ...],
     "fake_tuples": [[[...], ...], ...]}

``fake_tuples`` is ``null`` until fakes have been generated (``assign`` runs
before ``genfake``). The baseline scheme persists its own document with
``params`` (``L``, ``x``, hex ``key``) and ``pool``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from typing import Any

from .baseline import BaselineParams, BaselinePool
from .codebook import Codebook, WatermarkSequence
from .errors import DomainError, ValidationError
from .fakegen import FakeTupleSet
from .store import Schema
from .watermark import SchemeParams


@dataclass(frozen=True)
class WatermarkMetadata:
    params: SchemeParams
    codebook: Codebook
    schema: Schema | None = None
    match_subset: tuple[int, ...] | None = None
    key_column: str | None = None
    fake_tuples: FakeTupleSet | None = None

    def __post_init__(self) -> None:
        if len(self.codebook) != self.params.n_u:
            raise ValidationError(
                f"codebook has {len(self.codebook)} users, params say n_u={self.params.n_u}"
            )
        if self.codebook.L != self.params.L:
            raise ValidationError(f"codebook uses L={self.codebook.L}, params say L={self.params.L}")
        tf = self.fake_tuples
        if tf is not None:
            if tf.L != self.params.L or tf.x != self.params.x:
                raise ValidationError(
                    f"fake tuples form {tf.L} groups of {tf.x}, params need "
                    f"{self.params.L} groups of {self.params.x}"
                )
            if self.schema is not None and tf.schema != self.schema:
                raise ValidationError("fake tuple schema differs from the stored schema")
            if self.match_subset is not None and tf.match_subset != tuple(self.match_subset):
                raise ValidationError("fake tuple match subset differs from the stored one")

    def with_fakes(self, tf: FakeTupleSet, key_column: str | None = None) -> "WatermarkMetadata":
        return replace(
            self,
            fake_tuples=tf,
            schema=tf.schema,
            match_subset=tf.match_subset,
            key_column=key_column,
        )

    def require_fakes(self) -> FakeTupleSet:
        if self.fake_tuples is None:
            raise ValidationError("metadata holds no fake tuples yet; run genfake first")
        return self.fake_tuples


def metadata_to_dict(meta: WatermarkMetadata) -> dict[str, Any]:
    p = meta.params
    tf = meta.fake_tuples
    return {
        "params": {"n_u": p.n_u, "L": p.L, "x": p.x, "seed": p.seed},
        "schema": list(meta.schema.names) if meta.schema is not None else None,
        "key_column": meta.key_column,
        "match_subset": list(meta.match_subset) if meta.match_subset is not None else None,
        "codebook": [{"user": u, "watermark": str(w)} for u, w in meta.codebook.entries],
        "fake_tuples": [[list(r) for r in g] for g in tf.groups] if tf is not None else None,
    }


def _get(doc: dict, name: str) -> Any:
    try:
        return doc[name]
    except (KeyError, TypeError):
        raise ValidationError(f"metadata lacks field {name!r}") from None


def metadata_from_dict(doc: dict[str, Any]) -> WatermarkMetadata:
    try:
        raw = _get(doc, "params")
        params = SchemeParams(
            n_u=int(_get(raw, "n_u")), L=int(_get(raw, "L")), x=int(_get(raw, "x")), seed=int(raw.get("seed", 0))
        )
        codebook = Codebook(
            tuple((e["user"], WatermarkSequence.from_str(e["watermark"])) for e in _get(doc, "codebook"))
        )
        schema = Schema(tuple(doc["schema"])) if doc.get("schema") is not None else None
        subset = tuple(int(i) for i in doc["match_subset"]) if doc.get("match_subset") is not None else None
        groups = doc.get("fake_tuples")
        tf = None
        if groups is not None:
            if schema is None or subset is None:
                raise ValidationError("fake tuples stored without schema or match_subset")
            if len(groups) != params.L:
                raise ValidationError(f"{len(groups)} fake groups stored, params need {params.L}")
            for j, g in enumerate(groups):
                if len(g) != params.x:
                    raise ValidationError(f"fake group {j} holds {len(g)} tuples, params need {params.x}")
                for row in g:
                    if len(row) != schema.arity or not all(isinstance(v, str) for v in row):
                        raise ValidationError(f"fake group {j} has a malformed tuple {row!r}")
            tf = FakeTupleSet(tuple(tuple(tuple(r) for r in g) for g in groups), schema, subset)
        return WatermarkMetadata(
            params=params,
            codebook=codebook,
            schema=schema,
            match_subset=subset,
            key_column=doc.get("key_column"),
            fake_tuples=tf,
        )
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"invalid metadata: {exc}") from exc


def save_metadata(meta: WatermarkMetadata, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metadata_to_dict(meta), fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def _read_json(path: str | os.PathLike) -> Any:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON: {exc}") from exc


def load_metadata(path: str | os.PathLike) -> WatermarkMetadata:
    return metadata_from_dict(_read_json(path))


@dataclass(frozen=True)
class BaselineMetadata:
    params: BaselineParams
    pool: BaselinePool
    key_column: str | None = None


def save_baseline_metadata(meta: BaselineMetadata, path: str | os.PathLike) -> None:
    doc = {
        "params": {"L": meta.params.L, "x": meta.params.x, "key": meta.params.key.hex()},
        "schema": list(meta.pool.schema.names),
        "key_column": meta.key_column,
        "match_subset": list(meta.pool.match_subset),
        "pool": [[[list(r) for r in slot] for slot in pair] for pair in meta.pool.slots],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def load_baseline_metadata(path: str | os.PathLike) -> BaselineMetadata:
    doc = _read_json(path)
    try:
        raw = _get(doc, "params")
        params = BaselineParams(L=int(raw["L"]), x=int(raw["x"]), key=bytes.fromhex(raw["key"]))
        pool = BaselinePool(
            tuple(tuple(tuple(tuple(r) for r in slot) for slot in pair) for pair in _get(doc, "pool")),
            Schema(tuple(_get(doc, "schema"))),
            tuple(_get(doc, "match_subset")),
        )
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"invalid baseline metadata: {exc}") from exc
    if pool.L != params.L or pool.x != params.x:
        raise ValidationError("baseline pool shape disagrees with its parameters")
    return BaselineMetadata(params, pool, doc.get("key_column"))
