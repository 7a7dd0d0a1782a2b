"""Deterministic scripted schedules driven through the service core.

A schedule is generated once per seed, independent of the delivery mode:
per phase, each client types a burst of edits against its own mirror, the
server processes every resulting put in one fixed interleaving, and nothing
is delivered until the phase ends (transport delay).  In push mode that
means every delivery generated during the phase crosses the recipients'
in-flight puts, exercising the acknowledgment ledger; in pull mode clients
fetch at the phase boundary.  Both modes therefore see byte-identical put
streams, and the final documents must match exactly across modes.

All frames pass through the wire codec so the JSON message schema is
exercised end to end.
"""

import random

from coedit.diffs import Delete, Insert
from coedit.service import ScriptedClient, ServiceCore
from coedit.wire import decode_msg, encode_msg


def make_schedule(seed):
    """(client count, phases); each phase is (bursts per client, put order)."""
    rng = random.Random(seed)
    n_clients = rng.randint(2, 4)
    phases = []
    for _ in range(rng.randint(1, 4)):
        bursts = {}
        for i in range(n_clients):
            intents = []
            for _ in range(rng.randint(0, 4)):
                kind = "insert" if rng.random() < 0.65 else "delete"
                text = rng.choice("abcdefg") * rng.randint(1, 2)
                intents.append((kind, rng.random(), text, rng.randint(1, 3)))
            bursts[f"c{i}"] = intents
        order = [cid for cid, intents in bursts.items() for _ in intents]
        rng.shuffle(order)
        phases.append((bursts, order))
    return n_clients, phases


def materialize(intent, doc):
    """Turn an abstract intent into a diff applicable to ``doc``."""
    kind, rel, text, del_len = intent
    if kind == "delete" and doc:
        pos = min(int(rel * len(doc)), len(doc) - 1)
        return Delete(pos, min(del_len, len(doc) - pos))
    return Insert(round(rel * len(doc)), text)


class Harness:
    """Service core plus scripted clients with explicit delivery queues."""

    def __init__(self, mode, n_clients, doc=""):
        self.mode = mode
        self.core = ServiceCore(doc, mode=mode)
        self.clients = {f"c{i}": ScriptedClient(f"c{i}", mode) for i in range(n_clients)}
        self.boxes = {cid: [] for cid in self.clients}
        for cid, client in self.clients.items():
            self.send(cid, client.hello())
            self.deliver(cid)

    def send(self, cid, msg):
        """One client frame through the codec into the core; queue replies."""
        outbounds = self.core.handle(cid, decode_msg(encode_msg(msg)))
        for target, out in outbounds:
            self.boxes[target].append(encode_msg(out))

    def deliver(self, cid):
        while self.boxes[cid]:
            self.clients[cid].receive(decode_msg(self.boxes[cid].pop(0)))

    def deliver_one(self, cid):
        if self.boxes[cid]:
            self.clients[cid].receive(decode_msg(self.boxes[cid].pop(0)))

    def assert_ledger_matches_session(self):
        # The session-level pending queue is exactly the concatenation of the
        # client's unconfirmed ledger batches.
        state = self.core.session_state()
        for cid in self.clients:
            concat = ()
            for batch in self.core.ledger(cid):
                concat = concat + batch.diffs
            assert state.pending[cid] == concat, cid

    def assert_synced(self):
        for cid, client in self.clients.items():
            assert client.doc == self.core.doc, (self.mode, cid)


def run_schedule(seed, mode):
    """Run one generated schedule; returns (server doc, per-client docs)."""
    n_clients, phases = make_schedule(seed)
    h = Harness(mode, n_clients)
    for bursts, order in phases:
        queues = {cid: [] for cid in h.clients}
        for cid, intents in bursts.items():
            for intent in intents:
                diff = materialize(intent, h.clients[cid].doc)
                queues[cid].append(h.clients[cid].edit(diff))
        for cid in order:
            h.send(cid, queues[cid].pop(0))
        for cid in h.clients:
            h.deliver(cid)
        if mode == "pull":
            for cid in h.clients:
                h.send(cid, h.clients[cid].fetch())
                h.deliver(cid)
        h.assert_synced()
        h.assert_ledger_matches_session()
    return h.core.doc, {cid: c.doc for cid, c in h.clients.items()}


def run_push_stress(seed, steps=120):
    """Unstructured push-mode run: random edits, server steps, and one-frame
    deliveries interleaved arbitrarily, then a drain and one sync round."""
    rng = random.Random(seed)
    n_clients = rng.randint(2, 4)
    h = Harness("push", n_clients)
    inbound = {cid: [] for cid in h.clients}
    for _ in range(steps):
        cid = f"c{rng.randrange(n_clients)}"
        action = rng.choice(("edit", "server", "deliver"))
        if action == "edit":
            intent = (
                "insert" if rng.random() < 0.6 else "delete",
                rng.random(),
                rng.choice("xyz"),
                rng.randint(1, 2),
            )
            diff = materialize(intent, h.clients[cid].doc)
            inbound[cid].append(h.clients[cid].edit(diff))
        elif action == "server" and inbound[cid]:
            h.send(cid, inbound[cid].pop(0))
        elif action == "deliver":
            h.deliver_one(cid)
    for cid in h.clients:
        while inbound[cid]:
            h.send(cid, inbound[cid].pop(0))
    for cid in h.clients:
        h.deliver(cid)
    # One empty put per client re-delivers anything still unconfirmed.
    for cid in h.clients:
        h.send(cid, h.clients[cid].sync())
        h.deliver(cid)
    h.assert_synced()
    h.assert_ledger_matches_session()
    return h.core.doc
