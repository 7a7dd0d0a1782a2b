"""Single-edit primitives and their positional algebra.

A document is a plain ``str`` indexed by Unicode code point, 0-based.
An edit ("diff") is either an :class:`Insert` of non-empty text before an
index, or a :class:`Delete` of a positive-length range of indices.  A diff
sequence is applied left to right, each element expressed in the coordinates
of the document produced by the elements before it.

Everything in this module is an immutable value and every function is pure,
so diffs and sequences can be shared freely between concurrent activities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Union


class DiffError(Exception):
    """Base class for errors raised by the diff algebra."""


class ApplyError(DiffError):
    """A diff does not fit the document it was applied to."""


class LiftError(DiffError):
    """A position shift produced a negative index (transform-table bug)."""


class DomainError(DiffError):
    """Inputs outside the defined domain of a partial operation."""


@dataclass(frozen=True)
class Insert:
    """Insert ``text`` before index ``pos``."""

    pos: int
    text: str

    def __post_init__(self) -> None:
        if self.pos < 0:
            raise ValueError(f"insert position must be >= 0, got {self.pos}")
        if not self.text:
            raise ValueError("insert text must be non-empty")


@dataclass(frozen=True)
class Delete:
    """Delete the ``length`` characters at indices ``pos .. pos+length-1``."""

    pos: int
    length: int

    def __post_init__(self) -> None:
        if self.pos < 0:
            raise ValueError(f"delete position must be >= 0, got {self.pos}")
        if self.length < 1:
            raise ValueError(f"delete length must be >= 1, got {self.length}")


class EmptyDiff:
    """Marker for the empty edit; applying it changes nothing.

    Transform results encode "this edit became nothing" as an absent element,
    but sequences handed to :func:`coedit.transform.normalize` may carry the
    marker explicitly.  It never appears on the wire.
    """

    _instance = None

    def __new__(cls) -> "EmptyDiff":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EMPTY"


EMPTY = EmptyDiff()

Diff = Union[Insert, Delete]
DiffSeq = tuple[Diff, ...]


def apply(doc: str, diff: Diff | EmptyDiff) -> str:
    """Apply a single diff to a document, or raise :class:`ApplyError`."""
    if diff is EMPTY:
        return doc
    if isinstance(diff, Insert):
        if diff.pos > len(doc):
            raise ApplyError(f"{diff!r} does not fit document of length {len(doc)}")
        return doc[: diff.pos] + diff.text + doc[diff.pos :]
    if isinstance(diff, Delete):
        if diff.pos + diff.length > len(doc):
            raise ApplyError(f"{diff!r} does not fit document of length {len(doc)}")
        return doc[: diff.pos] + doc[diff.pos + diff.length :]
    raise TypeError(f"not a diff: {diff!r}")


def apply_seq(doc: str, diffs: Iterable[Diff | EmptyDiff]) -> str:
    """Left fold of :func:`apply`; the empty sequence is the identity."""
    for i, diff in enumerate(diffs):
        try:
            doc = apply(doc, diff)
        except ApplyError as exc:
            raise ApplyError(f"element {i} of sequence: {exc}") from None
    return doc


def endpoints(diff: Diff) -> tuple[int, int]:
    """Inclusive (start, end) index range a diff occupies.

    An insert's range is the footprint of its text once placed; a delete's is
    the range it removes.  ``end >= start`` always, since texts are non-empty
    and lengths positive.
    """
    if isinstance(diff, Insert):
        return diff.pos, diff.pos + len(diff.text) - 1
    return diff.pos, diff.pos + diff.length - 1


_CMP = {-1: "lt", 0: "eq", 1: "gt"}


@dataclass(frozen=True)
class Rel:
    """How two diffs' index ranges relate.

    ``start_cmp`` and ``end_cmp`` compare the first diff's endpoints against
    the second's, each one of ``"lt"``, ``"eq"``, ``"gt"``.  ``overlap`` is
    true when the ranges touch.
    """

    start_cmp: str
    end_cmp: str
    overlap: bool

    def coarse(self) -> str:
        """One of ``left``, ``left-overlap``, ``same-start``,
        ``right-overlap``, ``right``.

        Same start wins over the overlap classes: a shared start with
        differing ends would otherwise satisfy two predicates at once, and
        the transform table dispatches on start equality first.
        """
        if not self.overlap:
            return "left" if self.start_cmp == "lt" else "right"
        if self.start_cmp == "eq":
            return "same-start"
        return "left-overlap" if self.start_cmp == "lt" else "right-overlap"


def classify(a: Diff, b: Diff) -> Rel:
    """Relate the ranges of ``a`` and ``b`` (see :class:`Rel`)."""
    a_start, a_end = endpoints(a)
    b_start, b_end = endpoints(b)
    overlap = a_start <= b_end and a_end >= b_start
    start_cmp = _CMP[(a_start > b_start) - (a_start < b_start)]
    end_cmp = _CMP[(a_end > b_end) - (a_end < b_end)]
    return Rel(start_cmp, end_cmp, overlap)


def lift(target: Diff, by: Diff) -> Diff:
    """Shift ``target`` to account for ``by`` having been applied first.

    An insert shifts the target right by its text length; a delete shifts it
    left by its length.  The caller is responsible for only lifting diffs
    that sit at or to the right of ``by``; this function checks nothing but
    the arithmetic and raises :class:`LiftError` on a negative result.
    """
    if isinstance(by, Insert):
        offset = len(by.text)
    else:
        offset = -by.length
    pos = target.pos + offset
    if pos < 0:
        raise LiftError(f"lifting {target!r} by {by!r} gives position {pos}")
    if isinstance(target, Insert):
        return Insert(pos, target.text)
    return Delete(pos, target.length)


def subtract(outer: Delete, inner: Delete) -> Delete:
    """The contiguous part of ``outer``'s range not covered by ``inner``.

    Defined only when the two ranges properly overlap with ``outer``
    extending past ``inner`` on exactly one side: the surviving prefix when
    ``outer`` starts first, the surviving suffix when it ends last.  Nested
    or disjoint ranges raise :class:`DomainError`.
    """
    o_start, o_end = endpoints(outer)
    i_start, i_end = endpoints(inner)
    if o_start > i_end or o_end < i_start:
        raise DomainError(f"subtract on disjoint deletes {outer!r}, {inner!r}")
    left_over = o_start < i_start
    right_over = o_end > i_end
    if left_over and right_over:
        raise DomainError(f"{inner!r} is nested inside {outer!r}")
    if left_over:
        return Delete(o_start, i_start - o_start)
    if right_over:
        return Delete(i_end + 1, o_end - i_end)
    raise DomainError(f"{outer!r} is covered by {inner!r}; nothing survives")


def split_delete(target: Delete, at: int) -> tuple[Delete, Delete]:
    """Split a delete at an interior index into two original-coordinate parts.

    ``at`` must fall strictly inside the deleted range.  The fragments cover
    exactly the original range: ``left.length + right.length == target.length``.
    """
    if not target.pos < at < target.pos + target.length:
        raise DomainError(f"split point {at} not strictly inside {target!r}")
    left = Delete(target.pos, at - target.pos)
    right = Delete(at, target.length - left.length)
    return left, right


def encode_diff(diff: Diff) -> dict:
    """Canonical JSON object form: ``{"op":"i","pos":N,"text":S}`` or
    ``{"op":"d","pos":N,"len":L}``."""
    if isinstance(diff, Insert):
        return {"op": "i", "pos": diff.pos, "text": diff.text}
    if isinstance(diff, Delete):
        return {"op": "d", "pos": diff.pos, "len": diff.length}
    raise TypeError(f"not a diff: {diff!r}")


def decode_diff(obj: object) -> Diff:
    """Inverse of :func:`encode_diff`; raises ``ValueError`` on bad shapes."""
    if not isinstance(obj, dict):
        raise ValueError(f"diff must be a JSON object, got {type(obj).__name__}")
    op = obj.get("op")
    try:
        if op == "i":
            pos, text = obj["pos"], obj["text"]
            if not isinstance(pos, int) or isinstance(pos, bool) or not isinstance(text, str):
                raise ValueError(f"bad insert fields in {obj!r}")
            return Insert(pos, text)
        if op == "d":
            pos, length = obj["pos"], obj["len"]
            bad = isinstance(pos, bool) or isinstance(length, bool)
            if bad or not isinstance(pos, int) or not isinstance(length, int):
                raise ValueError(f"bad delete fields in {obj!r}")
            return Delete(pos, length)
    except KeyError as exc:
        raise ValueError(f"diff object missing field {exc}") from None
    raise ValueError(f"unknown diff op {op!r}")


def encode_seq(diffs: Iterable[Diff]) -> list:
    return [encode_diff(d) for d in diffs]


def decode_seq(obj: object) -> DiffSeq:
    if not isinstance(obj, list):
        raise ValueError(f"diff sequence must be a JSON array, got {type(obj).__name__}")
    return tuple(decode_diff(d) for d in obj)


def dumps_seq(diffs: Iterable[Diff]) -> str:
    return json.dumps(encode_seq(diffs))


def loads_seq(text: str) -> DiffSeq:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc}") from None
    return decode_seq(obj)
