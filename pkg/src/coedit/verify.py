"""Brute-force and randomized evidence that the transforms converge.

The convergence identity is its own oracle: apply two concurrent edits in
both orders, with the transformed counterparts, and compare the resulting
strings.  At desk scale the single-diff identity can be checked exhaustively
over every document and every ordered diff pair; the sequence identity and
the protocol are checked on seeded random corpora.  Checkers report, they
never raise: a non-empty counterexample list is the failure signal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product

from .diffs import EMPTY, ApplyError, Delete, Diff, DiffSeq, Insert, apply, apply_seq
from .transform import (
    ALL_CASES,
    StepCounter,
    transform_seq,
    transform_single,
    transform_single_with_case,
)


@dataclass(frozen=True)
class EnumBounds:
    """Instance-size limits for the exhaustive enumeration."""

    max_doc_len: int
    max_text_len: int
    alphabet: str

    def __post_init__(self) -> None:
        if self.max_doc_len < 0 or self.max_text_len < 1 or not self.alphabet:
            raise ValueError(f"bad enumeration bounds {self}")


def enumerate_diffs(doc_len: int, bounds: EnumBounds) -> list[Diff]:
    """Every diff applicable to a document of length ``doc_len``.

    Inserts come first (position ascending, then text by length then
    alphabet order), deletes after (position ascending, then length
    ascending).  The count is exact and deterministic.
    """
    out: list[Diff] = []
    for pos in range(doc_len + 1):
        for text_len in range(1, bounds.max_text_len + 1):
            for chars in product(bounds.alphabet, repeat=text_len):
                out.append(Insert(pos, "".join(chars)))
    for pos in range(doc_len):
        for length in range(1, doc_len - pos + 1):
            out.append(Delete(pos, length))
    return out


def enumerate_docs(bounds: EnumBounds):
    """Every document over the alphabet up to the length bound."""
    for doc_len in range(bounds.max_doc_len + 1):
        for chars in product(bounds.alphabet, repeat=doc_len):
            yield "".join(chars)


@dataclass
class Counterexample:
    doc: str
    first: Diff
    second: Diff
    first_then_second: str
    second_then_first: str


@dataclass
class TP1Report:
    """Outcome of the exhaustive single-diff convergence check."""

    pairs: int = 0
    counterexamples: list[Counterexample] = field(default_factory=list)
    case_hits: dict[str, int] = field(default_factory=dict)

    @property
    def missing_cases(self) -> tuple[str, ...]:
        return tuple(sorted(ALL_CASES - set(self.case_hits)))

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.missing_cases


def check_tp1_exhaustive(
    bounds: EnumBounds, *, equal_delete_rule: str = "cancel"
) -> TP1Report:
    """Check the convergence identity for every document and ordered diff
    pair within ``bounds``, tallying which table branches fired.

    ``equal_delete_rule="keep-first"`` swaps in the known-broken identical-
    deletes rule; the expected outcome is then a non-empty counterexample
    list, which demonstrates the check can fail at all.
    """
    report = TP1Report()
    for doc in enumerate_docs(bounds):
        diffs = enumerate_diffs(len(doc), bounds)
        for first in diffs:
            after_first = apply(doc, first)
            for second in diffs:
                report.pairs += 1
                if equal_delete_rule == "cancel":
                    pair, case = transform_single_with_case(first, second)
                    report.case_hits[case] = report.case_hits.get(case, 0) + 1
                else:
                    pair = transform_single(
                        first, second, equal_delete_rule=equal_delete_rule
                    )
                try:
                    one = apply_seq(after_first, pair.second_after_first)
                    two = apply_seq(apply(doc, second), pair.first_after_second)
                except ApplyError as exc:
                    # A transformed diff that no longer fits is as much a
                    # convergence failure as a wrong result.
                    report.counterexamples.append(
                        Counterexample(doc, first, second, f"<{exc}>", "")
                    )
                    continue
                if one != two:
                    report.counterexamples.append(
                        Counterexample(doc, first, second, one, two)
                    )
    return report


def random_diff(
    rng: random.Random,
    doc: str,
    *,
    insert_prob: float = 0.6,
    max_insert_len: int = 3,
    max_delete_len: int = 4,
    alphabet: str = "ab",
) -> Diff:
    """One random diff applicable to ``doc`` (an empty doc forces an insert)."""
    if not doc or rng.random() < insert_prob:
        pos = rng.randint(0, len(doc))
        length = rng.randint(1, max_insert_len)
        return Insert(pos, "".join(rng.choice(alphabet) for _ in range(length)))
    pos = rng.randint(0, len(doc) - 1)
    return Delete(pos, rng.randint(1, min(max_delete_len, len(doc) - pos)))


def random_seq(rng: random.Random, doc: str, length: int, **kwargs) -> DiffSeq:
    """A random diff sequence applicable to ``doc``, built by simulation."""
    out: list[Diff] = []
    for _ in range(length):
        d = random_diff(rng, doc, **kwargs)
        out.append(d)
        doc = apply(doc, d)
    return tuple(out)


def _split_heavy_instance(rng: random.Random, alphabet: str) -> tuple[str, DiffSeq, DiffSeq]:
    """An instance guaranteed to push an insert strictly inside a delete,
    exercising the two-fragment transform outputs."""
    doc = "".join(rng.choice(alphabet) for _ in range(rng.randint(4, 12)))
    span = rng.randint(2, min(4, len(doc)))
    start = rng.randint(0, len(doc) - span)
    ins = Insert(rng.randint(start + 1, start + span - 1), rng.choice(alphabet))
    del_ = Delete(start, span)
    a = (ins,) + random_seq(rng, apply(doc, ins), rng.randint(0, 3), alphabet=alphabet)
    b = (del_,) + random_seq(rng, apply(doc, del_), rng.randint(0, 3), alphabet=alphabet)
    return doc, a, b


@dataclass
class SeqCounterexample:
    doc: str
    a: DiffSeq
    b: DiffSeq
    reason: str


@dataclass
class SeqReport:
    """Outcome of the randomized sequence-identity check."""

    trials: int = 0
    passes: int = 0
    counterexamples: list[SeqCounterexample] = field(default_factory=list)
    fragmentation_violations: int = 0
    max_budget_ratio: float = 0.0
    single_transforms: int = 0

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.fragmentation_violations


def check_seq_identity(
    trials: int,
    *,
    seed: int = 0,
    max_seq_len: int = 5,
    max_doc_len: int = 12,
    alphabet: str = "ab",
    split_every: int = 10,
) -> SeqReport:
    """Fuzz the sequence transform against the double-application oracle.

    Each trial draws a document and two independently applicable sequences,
    then asserts three things: both application orders agree, the midpoint
    and leftmost split strategies are apply-equal, and the transformed side
    never exceeds the fragmentation bound ``|b'| <= |b| * (|a| + 1)``.  Every
    ``split_every``-th trial is built around a forced insert-inside-delete
    pair so the two-fragment path is always exercised.  Also tracks the
    single-transform step count against the ``4*(|a|+1)*(|b|+1)`` budget.
    """
    rng = random.Random(seed)
    report = SeqReport()
    for t in range(trials):
        report.trials += 1
        if split_every and t % split_every == split_every - 1:
            doc, a, b = _split_heavy_instance(rng, alphabet)
        else:
            doc = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, max_doc_len)))
            a = random_seq(rng, doc, rng.randint(0, max_seq_len), alphabet=alphabet)
            b = random_seq(rng, doc, rng.randint(0, max_seq_len), alphabet=alphabet)
        counter = StepCounter()
        pair = transform_seq(a, b, counter=counter)
        report.single_transforms += counter.calls
        budget = 4 * (len(a) + 1) * (len(b) + 1)
        report.max_budget_ratio = max(report.max_budget_ratio, counter.calls / budget)
        one = apply_seq(apply_seq(doc, a), pair.b_after_a)
        two = apply_seq(apply_seq(doc, b), pair.a_after_b)
        if one != two:
            report.counterexamples.append(SeqCounterexample(doc, a, b, "orders disagree"))
            continue
        alt = transform_seq(a, b, split="leftmost")
        if (
            apply_seq(apply_seq(doc, a), alt.b_after_a) != one
            or apply_seq(apply_seq(doc, b), alt.a_after_b) != one
        ):
            report.counterexamples.append(
                SeqCounterexample(doc, a, b, "split strategies disagree")
            )
            continue
        if len(pair.b_after_a) > len(b) * (len(a) + 1) or len(pair.a_after_b) > len(a) * (
            len(b) + 1
        ):
            report.fragmentation_violations += 1
            continue
        report.passes += 1
    return report


def check_epsilon_absorption(
    trials: int,
    *,
    seed: int = 0,
    max_seq_len: int = 4,
    max_doc_len: int = 10,
    alphabet: str = "ab",
) -> SeqReport:
    """Check that empty-diff markers spliced anywhere into either sequence
    leave the transform apply-equal to the marker-free run."""
    rng = random.Random(seed)
    report = SeqReport()
    for _ in range(trials):
        report.trials += 1
        doc = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, max_doc_len)))
        a = random_seq(rng, doc, rng.randint(0, max_seq_len), alphabet=alphabet)
        b = random_seq(rng, doc, rng.randint(0, max_seq_len), alphabet=alphabet)
        a_marked = _splice_markers(rng, a)
        b_marked = _splice_markers(rng, b)
        plain = transform_seq(a, b)
        marked = transform_seq(a_marked, b_marked)
        base_a = apply_seq(doc, a)
        base_b = apply_seq(doc, b)
        if (
            apply_seq(base_a, marked.b_after_a) != apply_seq(base_a, plain.b_after_a)
            or apply_seq(base_b, marked.a_after_b) != apply_seq(base_b, plain.a_after_b)
        ):
            report.counterexamples.append(
                SeqCounterexample(doc, a_marked, b_marked, "markers changed the result")
            )
            continue
        report.passes += 1
    return report


def _splice_markers(rng: random.Random, seq: DiffSeq) -> tuple:
    out = list(seq)
    for _ in range(rng.randint(1, 3)):
        out.insert(rng.randint(0, len(out)), EMPTY)
    return tuple(out)
