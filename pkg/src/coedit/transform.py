"""Rebasing of concurrent edits so both sides converge.

Given two edits made concurrently against the same document, each side must
apply a rewritten form of the other's edit after its own.  The rewriting is
chosen so that the convergence identity holds::

    apply(apply(s, first), second') == apply(apply(s, second), first')

:func:`transform_single` handles one diff against one diff through an
exhaustive case table; :func:`transform_seq` extends it to sequences by
splitting them and recursing, which also absorbs the case where an insert
lands strictly inside a delete and splits it into two fragments.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diffs import (
    EMPTY,
    Delete,
    Diff,
    DiffSeq,
    EmptyDiff,
    Insert,
    lift,
    split_delete,
    subtract,
)


@dataclass(frozen=True)
class TransformPair:
    """Both rewritings for a single pair of concurrent diffs.

    ``second_after_first`` replays the second diff on a document that already
    has the first applied; ``first_after_second`` is the mirror.  Each holds
    at most two diffs: two exactly when an insert split a delete, zero when
    the edit became nothing.
    """

    second_after_first: DiffSeq
    first_after_second: DiffSeq


@dataclass(frozen=True)
class SeqTransformPair:
    """Sequence-level rewritings, same reading as :class:`TransformPair`."""

    b_after_a: DiffSeq
    a_after_b: DiffSeq


@dataclass
class StepCounter:
    """Counts single-diff transforms performed inside :func:`transform_seq`."""

    calls: int = 0


#: Every dispatch label `_single` can produce, for coverage accounting.
ALL_CASES = frozenset(
    {
        "insert-insert/identical",
        "insert-insert/tie-first-lifted",
        "insert-insert/tie-second-lifted",
        "insert-insert/left",
        "insert-insert/right",
        "insert-delete/insert-left",
        "insert-delete/insert-right",
        "insert-delete/insert-inside",
        "delete-insert/delete-left",
        "delete-insert/insert-left",
        "delete-insert/insert-inside",
        "delete-delete/identical",
        "delete-delete/disjoint-left",
        "delete-delete/disjoint-right",
        "delete-delete/same-start-shorter",
        "delete-delete/same-start-longer",
        "delete-delete/overlap-left",
        "delete-delete/overlap-right",
        "delete-delete/contains",
        "delete-delete/contained",
    }
)


def _insert_insert(a: Insert, b: Insert) -> tuple[DiffSeq, DiffSeq, str]:
    if a.pos < b.pos:
        return (lift(b, a),), (a,), "insert-insert/left"
    if a.pos > b.pos:
        return (b,), (lift(a, b),), "insert-insert/right"
    if a.text == b.text:
        return (b,), (a,), "insert-insert/identical"
    # Same start, different texts: lift whichever employs the lesser text so
    # both sides order the two texts identically.
    if a.text < b.text:
        return (b,), (lift(a, b),), "insert-insert/tie-first-lifted"
    return (lift(b, a),), (a,), "insert-insert/tie-second-lifted"


def _insert_delete(a: Insert, b: Delete) -> tuple[DiffSeq, DiffSeq, str]:
    if a.pos <= b.pos:
        # Insert at or left of the deleted range: range shifts right.
        return (lift(b, a),), (a,), "insert-delete/insert-left"
    if a.pos >= b.pos + b.length:
        # Insert past the deleted range: insert shifts left.
        return (b,), (lift(a, b),), "insert-delete/insert-right"
    # Insert strictly inside the deleted range: the delete splits around the
    # inserted text.  Fragments are emitted pre-lifted, so plain left-to-right
    # application is correct; the insert survives at the range start.
    left, right = split_delete(b, a.pos)
    return (
        (left, lift(lift(right, by=left), by=a)),
        (Insert(b.pos, a.text),),
        "insert-delete/insert-inside",
    )


def _delete_insert(a: Delete, b: Insert) -> tuple[DiffSeq, DiffSeq, str]:
    if b.pos >= a.pos + a.length:
        # Whole deleted range sits left of the insert: insert shifts left.
        return (lift(b, a),), (a,), "delete-insert/delete-left"
    if b.pos <= a.pos:
        # Insert at or left of the range start: range shifts right.
        return (b,), (lift(a, b),), "delete-insert/insert-left"
    # Insert strictly inside the deleted range: mirror of the split above.
    left, right = split_delete(a, b.pos)
    return (
        (Insert(a.pos, b.text),),
        (left, lift(lift(right, by=left), by=b)),
        "delete-insert/insert-inside",
    )


def _delete_delete(a: Delete, b: Delete) -> tuple[DiffSeq, DiffSeq, str]:
    if a == b:
        # Both sides already deleted the same text; nothing is left to do.
        return (), (), "delete-delete/identical"
    if a.pos + a.length <= b.pos:
        return (lift(b, a),), (a,), "delete-delete/disjoint-left"
    if b.pos + b.length <= a.pos:
        return (b,), (lift(a, b),), "delete-delete/disjoint-right"
    a_end = a.pos + a.length
    b_end = b.pos + b.length
    if a.pos == b.pos:
        if a.length < b.length:
            return (Delete(b.pos, b.length - a.length),), (), "delete-delete/same-start-shorter"
        return (), (Delete(a.pos, a.length - b.length),), "delete-delete/same-start-longer"
    if a.pos < b.pos:
        if a_end >= b_end:
            # b's range lies inside a's: the survivors merge into one delete.
            return (), (Delete(a.pos, a.length - b.length),), "delete-delete/contains"
        return (
            (lift(subtract(b, a), a),),
            (subtract(a, b),),
            "delete-delete/overlap-left",
        )
    if b_end >= a_end:
        return (Delete(b.pos, b.length - a.length),), (), "delete-delete/contained"
    return (
        (subtract(b, a),),
        (lift(subtract(a, b), b),),
        "delete-delete/overlap-right",
    )


def _single(
    first: Diff, second: Diff, equal_delete_rule: str
) -> tuple[DiffSeq, DiffSeq, str]:
    if isinstance(first, Insert):
        if isinstance(second, Insert):
            return _insert_insert(first, second)
        return _insert_delete(first, second)
    if isinstance(second, Insert):
        return _delete_insert(first, second)
    if equal_delete_rule == "keep-first" and first == second:
        # Deliberately wrong variant kept for the negative-control check: it
        # replays the already-performed delete on one side.
        return (), (first,), "delete-delete/identical"
    return _delete_delete(first, second)


def transform_single(
    first: Diff, second: Diff, *, equal_delete_rule: str = "cancel"
) -> TransformPair:
    """Rewrite two concurrent diffs against each other.

    Total on all pairs.  ``equal_delete_rule`` selects what identical deletes
    become: ``"cancel"`` (both sides empty, the correct rule) or
    ``"keep-first"`` (a known-broken variant used as a negative control to
    prove the convergence checker can fail).
    """
    ba, ab, _ = _single(first, second, equal_delete_rule)
    return TransformPair(ba, ab)


def transform_single_with_case(first: Diff, second: Diff) -> tuple[TransformPair, str]:
    """Like :func:`transform_single` but also names the table branch taken."""
    ba, ab, case = _single(first, second, "cancel")
    return TransformPair(ba, ab), case


def normalize(diffs) -> DiffSeq:
    """Drop empty-diff markers; application is unchanged."""
    return tuple(d for d in diffs if not isinstance(d, EmptyDiff))


def transform_seq(
    a,
    b,
    *,
    split: str = "midpoint",
    counter: StepCounter | None = None,
) -> SeqTransformPair:
    """Rewrite two concurrent diff sequences against each other.

    Recursion: an empty side passes the other through; a singleton pair goes
    to :func:`transform_single`; otherwise the longer side is cut in two and
    each half is rebased in turn, threading the other side's partial result
    through.  Split fragments produced at the leaves re-enter the recursion
    as ordinary sequence elements.

    ``split`` picks the cut point on the longer side: ``"midpoint"`` (the
    default) or ``"leftmost"`` (always cut after the first element).  Both
    strategies produce apply-equivalent results; representational equality is
    not guaranteed.
    """
    if split not in ("midpoint", "leftmost"):
        raise ValueError(f"unknown split strategy {split!r}")
    b_after_a, a_after_b = _seq(normalize(a), normalize(b), split, counter)
    return SeqTransformPair(b_after_a, a_after_b)


def _seq(
    a: DiffSeq, b: DiffSeq, split: str, counter: StepCounter | None
) -> tuple[DiffSeq, DiffSeq]:
    if not a:
        return b, ()
    if not b:
        return (), a
    if len(a) == 1 and len(b) == 1:
        if counter is not None:
            counter.calls += 1
        ba, ab, _ = _single(a[0], b[0], "cancel")
        return ba, ab
    if len(a) >= len(b):
        cut = len(a) // 2 if split == "midpoint" else 1
        b1, head = _seq(a[:cut], b, split, counter)
        b2, tail = _seq(a[cut:], b1, split, counter)
        return b2, head + tail
    cut = len(b) // 2 if split == "midpoint" else 1
    b1, a1 = _seq(a, b[:cut], split, counter)
    b2, a2 = _seq(a1, b[cut:], split, counter)
    return b1 + b2, a2


__all__ = [
    "ALL_CASES",
    "SeqTransformPair",
    "StepCounter",
    "TransformPair",
    "normalize",
    "transform_seq",
    "transform_single",
    "transform_single_with_case",
    "EMPTY",
]
