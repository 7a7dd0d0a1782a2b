"""coedit: conflict-free merging of concurrent text edits.

A library and CLI for rebasing concurrent insert/delete edits so that every
replica of a shared document converges, plus the central-server protocol
that ships the rebased edits around, a deterministic simulator and
property-checking harness, and a WebSocket collaboration service.
"""

from .diffs import (
    EMPTY,
    ApplyError,
    Delete,
    DiffError,
    DomainError,
    Insert,
    LiftError,
    Rel,
    apply,
    apply_seq,
    classify,
    decode_diff,
    decode_seq,
    encode_diff,
    encode_seq,
    endpoints,
    lift,
    split_delete,
    subtract,
)
from .transform import (
    SeqTransformPair,
    StepCounter,
    TransformPair,
    normalize,
    transform_seq,
    transform_single,
)

__all__ = [
    "EMPTY",
    "ApplyError",
    "Delete",
    "DiffError",
    "DomainError",
    "Insert",
    "LiftError",
    "Rel",
    "SeqTransformPair",
    "StepCounter",
    "TransformPair",
    "apply",
    "apply_seq",
    "classify",
    "decode_diff",
    "decode_seq",
    "encode_diff",
    "encode_seq",
    "endpoints",
    "lift",
    "normalize",
    "split_delete",
    "subtract",
    "transform_seq",
    "transform_single",
]

__version__ = "0.1.0"
