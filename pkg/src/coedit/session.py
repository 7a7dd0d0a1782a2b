"""Central-server synchronisation of many clients editing one document.

The server owns the authoritative document and one pending queue per client:
the rebased foreign edits that client has not yet fetched.  A client edits
its local copy, flushes its outbox to the server (``put``), and fetches its
pending queue (``get``).  A put is rebased against the putter's own pending
queue before it touches the document, and the rebased form is appended to
every other client's queue.  When all outboxes are flushed and all queues
drained, every client's document equals the server's.

States are immutable; each operation returns the successor state.  A server
state must only ever be advanced by one serialized command loop: the
operations are pure, but interleaving two puts derived from the same
predecessor state would fork history.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from .diffs import Diff, DiffSeq, apply, apply_seq, ApplyError
from .transform import StepCounter, normalize, transform_seq

ClientId = str


class SessionError(Exception):
    """Protocol misuse: unknown/duplicate client or inapplicable edits."""


@dataclass(frozen=True)
class ServerState:
    """Authoritative document plus one pending queue per joined client."""

    doc: str
    pending: Mapping[ClientId, DiffSeq]

    @property
    def joined(self) -> frozenset[ClientId]:
        return frozenset(self.pending)


@dataclass(frozen=True)
class ClientState:
    """A client's local document and its not-yet-put edits.

    ``doc`` is always the last synchronised base with ``outbox`` applied;
    outbox elements are in local coordinates, left to right.
    """

    id: ClientId
    doc: str
    outbox: DiffSeq = ()


def new_server(doc: str = "") -> ServerState:
    return ServerState(doc=doc, pending={})


def server_join(st: ServerState, c: ClientId) -> tuple[ServerState, str]:
    """Admit a client and hand it the current document.

    A client must join (receive the document) before it can put edits.
    """
    if c in st.pending:
        raise SessionError(f"client {c!r} already joined")
    pending = dict(st.pending)
    pending[c] = ()
    return ServerState(doc=st.doc, pending=pending), st.doc


def server_put(
    st: ServerState, c: ClientId, d: DiffSeq, *, counter: StepCounter | None = None
) -> ServerState:
    """Accept a batch of edits from ``c`` and fold it into the document.

    The batch was made against a document missing everything in ``c``'s
    pending queue, so it is rebased over that queue; the rebased batch is
    applied to the document and appended to every other client's queue, and
    ``c``'s own queue is rebased over the incoming batch in exchange.
    """
    if c not in st.pending:
        raise SessionError(f"client {c!r} has not joined")
    pair = transform_seq(st.pending[c], normalize(d), counter=counter)
    try:
        doc = apply_seq(st.doc, pair.b_after_a)
    except ApplyError as exc:
        raise SessionError(f"inapplicable put from {c!r}: {exc}") from None
    pending = {
        other: q + pair.b_after_a if other != c else pair.a_after_b
        for other, q in st.pending.items()
    }
    return ServerState(doc=doc, pending=pending)


def server_get(st: ServerState, c: ClientId) -> tuple[ServerState, DiffSeq]:
    """Hand ``c`` its pending queue and empty it."""
    if c not in st.pending:
        raise SessionError(f"client {c!r} has not joined")
    delivered = st.pending[c]
    pending = dict(st.pending)
    pending[c] = ()
    return ServerState(doc=st.doc, pending=pending), delivered


def client_edit(cs: ClientState, d: Diff) -> ClientState:
    """Apply a local edit and queue it for the next flush."""
    try:
        doc = apply(cs.doc, d)
    except ApplyError as exc:
        raise SessionError(f"inapplicable local edit: {exc}") from None
    return replace(cs, doc=doc, outbox=cs.outbox + (d,))


def client_flush(cs: ClientState) -> tuple[ClientState, DiffSeq]:
    """Take the outbox for transmission.  The local document is unchanged:
    putting does not move the putter's own view, the server rebases."""
    return replace(cs, outbox=()), cs.outbox


def client_receive(
    cs: ClientState,
    delivered: DiffSeq,
    *,
    live: bool = False,
    counter: StepCounter | None = None,
) -> ClientState:
    """Fold a fetched pending queue into the local document.

    With an empty outbox (the only case the convergence argument covers)
    this is plain application.  ``live=True`` additionally permits a
    non-empty outbox by rebasing the delivery and the outbox against each
    other; it reuses the same sequence transform but sits outside the
    quiescence guarantees.
    """
    if cs.outbox and not live:
        raise SessionError(
            f"client {cs.id!r} received a delivery with a non-empty outbox"
        )
    if not cs.outbox:
        try:
            doc = apply_seq(cs.doc, delivered)
        except ApplyError as exc:
            raise SessionError(f"inapplicable delivery to {cs.id!r}: {exc}") from None
        return replace(cs, doc=doc)
    pair = transform_seq(cs.outbox, normalize(delivered), counter=counter)
    try:
        doc = apply_seq(cs.doc, pair.b_after_a)
    except ApplyError as exc:
        raise SessionError(f"inapplicable delivery to {cs.id!r}: {exc}") from None
    return replace(cs, doc=doc, outbox=pair.a_after_b)
