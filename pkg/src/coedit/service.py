"""Transport-independent core of the collaboration service.

:class:`ServiceCore` is the single-threaded state machine behind the
WebSocket server: the session state plus, per client, a ledger of numbered
diff batches that the client has not yet confirmed applying.  Confirmation
rides on the messages the client was going to send anyway: a put's ``seen``
field, or a fetch in pull mode (the paper-style stack drain, which confirms
everything it delivers).

Pull mode is the reference behaviour: clients explicitly fetch, a fetch
empties the ledger, and nothing is ever delivered unasked.  Push mode
delivers every new batch immediately, which lets a delivery cross a put in
flight.  The ledger makes that race safe server-side: the put is rebased
against exactly the batches its ``seen`` does not cover, and the client's
ledger is rewritten into the putter's new coordinate frame.  The reply to a
put carries that rewritten remainder, so a client that skipped deliveries
while its put was in flight receives the same content again, already rebased.
Replies repeat the client's current serial instead of allocating a new one,
which is how the client tells a reply from a fresh batch.

All methods are synchronous and must be invoked from one serialized command
loop; they either return the complete effect (new outbound messages) or
raise :class:`ServiceError` leaving the state untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diffs import ApplyError, Diff, DiffSeq, apply, apply_seq
from .session import ServerState, new_server, server_join
from .transform import normalize, transform_seq
from .wire import diffs_msg, doc_msg, get_msg, join_msg, put_msg

Outbound = tuple[str, dict]


class ServiceError(Exception):
    """Rejected command; the offending connection should get an err frame."""


@dataclass(frozen=True)
class Batch:
    """One numbered group of diffs owed to a particular client."""

    serial: int
    diffs: DiffSeq


class ServiceCore:
    """Document, per-client batch ledgers, and the put/get/join commands."""

    def __init__(self, doc: str = "", mode: str = "pull") -> None:
        if mode not in ("push", "pull"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self._state: ServerState = new_server(doc)
        self._ledgers: dict[str, list[Batch]] = {}
        self._serial: dict[str, int] = {}
        self._max_seen: dict[str, int] = {}

    @property
    def doc(self) -> str:
        return self._state.doc

    @property
    def clients(self) -> tuple[str, ...]:
        return tuple(self._ledgers)

    def ledger(self, client: str) -> tuple[Batch, ...]:
        return tuple(self._ledgers[client])

    def session_state(self) -> ServerState:
        """The equivalent session-level state (pending == ledger content)."""
        return self._state

    def join(self, client: str) -> list[Outbound]:
        try:
            state, text = server_join(self._state, client)
        except Exception as exc:
            raise ServiceError(str(exc)) from None
        self._state = state
        self._ledgers[client] = []
        self._serial[client] = 0
        self._max_seen[client] = 0
        return [(client, doc_msg(text, 0))]

    def leave(self, client: str) -> None:
        """Forget a disconnected client; undelivered batches are dropped."""
        if client not in self._ledgers:
            return
        pending = {c: q for c, q in self._state.pending.items() if c != client}
        self._state = ServerState(doc=self._state.doc, pending=pending)
        del self._ledgers[client]
        del self._serial[client]
        del self._max_seen[client]

    def put(self, client: str, diffs: DiffSeq, seen: int) -> list[Outbound]:
        """Fold a batch from ``client`` into the document and fan it out.

        ``seen`` confirms every batch numbered at or below it; the rest of
        the client's ledger is what the put gets rebased against, and is in
        turn rewritten into the client's post-put frame.  An empty put is a
        pure acknowledgment (and, in push mode, a request to re-deliver the
        unconfirmed remainder).
        """
        if client not in self._ledgers:
            raise ServiceError(f"client {client!r} has not joined")
        if seen > self._serial[client]:
            raise ServiceError(
                f"seen {seen} exceeds serial {self._serial[client]} for {client!r}"
            )
        if seen < self._max_seen[client]:
            raise ServiceError(
                f"stale seen {seen}: {client!r} already confirmed {self._max_seen[client]}"
            )
        remainder = [b for b in self._ledgers[client] if b.serial > seen]
        rebased = normalize(diffs)
        new_remainder: list[Batch] = []
        for batch in remainder:
            pair = transform_seq(batch.diffs, rebased)
            rebased = pair.b_after_a
            new_remainder.append(Batch(batch.serial, pair.a_after_b))
        try:
            doc = apply_seq(self._state.doc, rebased)
        except ApplyError as exc:
            raise ServiceError(f"inapplicable put from {client!r}: {exc}") from None

        # All validation done; commit.
        self._max_seen[client] = seen
        self._ledgers[client] = new_remainder
        pending = dict(self._state.pending)
        pending[client] = _content(new_remainder)
        out: list[Outbound] = []
        if rebased:
            for other in self._ledgers:
                if other == client:
                    continue
                self._serial[other] += 1
                self._ledgers[other].append(Batch(self._serial[other], rebased))
                pending[other] = pending[other] + rebased
                if self.mode == "push":
                    out.append((other, diffs_msg(rebased, self._serial[other])))
        self._state = ServerState(doc=doc, pending=pending)
        if self.mode == "push":
            # Reply to the putter: the unconfirmed remainder in its new
            # frame, under its *current* serial (no new batch is created).
            out.append(
                (client, diffs_msg(_content(new_remainder), self._serial[client]))
            )
        return out

    def get(self, client: str) -> list[Outbound]:
        """Deliver and confirm everything owed to ``client`` (pull mode)."""
        if self.mode != "pull":
            raise ServiceError("explicit fetch is only available in pull mode")
        if client not in self._ledgers:
            raise ServiceError(f"client {client!r} has not joined")
        delivered = _content(self._ledgers[client])
        serial = self._serial[client]
        self._ledgers[client] = []
        self._max_seen[client] = serial
        pending = dict(self._state.pending)
        pending[client] = ()
        self._state = ServerState(doc=self._state.doc, pending=pending)
        return [(client, diffs_msg(delivered, serial))]

    def handle(self, client: str, msg: dict) -> list[Outbound]:
        """Dispatch a decoded client-to-server message."""
        tag = msg.get("t")
        if tag == "join":
            if msg["client"] != client:
                raise ServiceError("join id does not match the connection")
            return self.join(client)
        if tag == "put":
            return self.put(client, msg["diffs"], msg["seen"])
        if tag == "get":
            return self.get(client)
        raise ServiceError(f"unexpected message type {tag!r}")


def _content(batches: list[Batch]) -> DiffSeq:
    out: DiffSeq = ()
    for b in batches:
        out = out + b.diffs
    return out


class ScriptedClient:
    """Reference client for driving :class:`ServiceCore` in tests.

    Mirrors the browser editor's bookkeeping: ``applied`` is the highest
    serial folded into the local document, ``known`` the highest serial ever
    announced, ``in_flight`` the number of unanswered puts.  In push mode a
    delivery that arrives while a put is in flight is skipped; its content
    comes back inside the put reply, rebased into this client's frame (a
    reply is recognised by repeating ``known`` instead of advancing it).
    No transform logic lives here.
    """

    def __init__(self, cid: str, mode: str = "pull") -> None:
        self.cid = cid
        self.mode = mode
        self.doc: str | None = None
        self.applied = 0
        self.known = 0
        self.in_flight = 0

    @property
    def joined(self) -> bool:
        return self.doc is not None

    def hello(self) -> dict:
        return join_msg(self.cid)

    def edit(self, diff: Diff) -> dict:
        """Apply a local edit and produce the put frame for it."""
        self.doc = apply(self.doc, diff)
        if self.mode == "push":
            self.in_flight += 1
        return put_msg((diff,), self.applied)

    def fetch(self) -> dict:
        return get_msg()

    def sync(self) -> dict:
        """An empty put: pure acknowledgment, and in push mode a request to
        re-deliver the unconfirmed remainder."""
        if self.mode == "push":
            self.in_flight += 1
        return put_msg((), self.applied)

    def receive(self, msg: dict) -> None:
        tag = msg["t"]
        if tag == "doc":
            self.doc = msg["text"]
            self.applied = self.known = msg["serial"]
            self.in_flight = 0
            return
        if tag == "err":
            raise ServiceError(f"{self.cid}: server error: {msg['msg']}")
        if tag != "diffs":
            raise ServiceError(f"{self.cid}: unexpected message {tag!r}")
        serial, diffs = msg["serial"], msg["diffs"]
        if self.mode == "pull":
            # Fetch response: may jump several batches at once.
            if serial < self.known:
                raise ServiceError(f"{self.cid}: serial went backwards to {serial}")
            self.known = serial
            self._apply(diffs, serial)
            return
        if serial == self.known + 1:
            # Fresh batch.  With a put in flight its content is stale for us;
            # the put reply will re-deliver it rebased.
            self.known = serial
            if self.in_flight == 0:
                self._apply(diffs, serial)
            return
        if serial == self.known and self.in_flight > 0:
            # Put reply: the full unapplied remainder in our frame.
            self.in_flight -= 1
            if self.in_flight == 0:
                self._apply(diffs, serial)
            return
        raise ServiceError(
            f"{self.cid}: serial {serial} out of order (known {self.known})"
        )

    def _apply(self, diffs: DiffSeq, serial: int) -> None:
        self.doc = apply_seq(self.doc, diffs)
        self.applied = serial
