"""Fake-tuple fingerprinting for tabular data.

Copies of a table are marked for each recipient by inserting groups of fake
tuples selected by a sparse-priority codebook; a leaked copy is traced by
checking which groups survive.
"""

from .attacks import AttackSpec, delete_random, survival_probability_oracle
from .codebook import Codebook, WatermarkSequence, assign, popcount, sparse_order, watermark_length
from .errors import (
    CapacityError,
    DomainError,
    FakemarkError,
    FormatError,
    GenerationError,
    TableParseError,
    TransportError,
    ValidationError,
)
from .fakegen import FakeTupleSet, GeneratorSpec, generate
from .metadata import WatermarkMetadata, load_metadata, save_metadata
from .store import Schema, Table, canonical_key, contains, load_table, save_table
from .watermark import ExtractionResult, SchemeParams, embed, embed_all, extract, identify

__version__ = "0.1.0"

__all__ = [
    "AttackSpec",
    "CapacityError",
    "Codebook",
    "DomainError",
    "ExtractionResult",
    "FakeTupleSet",
    "FakemarkError",
    "FormatError",
    "GenerationError",
    "GeneratorSpec",
    "Schema",
    "SchemeParams",
    "Table",
    "TableParseError",
    "TransportError",
    "ValidationError",
    "WatermarkMetadata",
    "WatermarkSequence",
    "assign",
    "canonical_key",
    "contains",
    "delete_random",
    "embed",
    "embed_all",
    "extract",
    "generate",
    "identify",
    "load_metadata",
    "load_table",
    "popcount",
    "save_metadata",
    "save_table",
    "sparse_order",
    "survival_probability_oracle",
    "watermark_length",
]
