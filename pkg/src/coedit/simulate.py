"""Deterministic end-to-end simulation of the client/server protocol.

Drives the session module with a seeded random schedule of edit, flush, and
get actions, then quiesces (flush everything, deliver everything) and checks
that every client's document equals the server's.  Identical configurations
produce byte-identical reports.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field

from .session import (
    ClientState,
    client_edit,
    client_flush,
    client_receive,
    new_server,
    server_get,
    server_join,
    server_put,
)
from .transform import StepCounter
from .verify import random_diff

ACTIONS = ("edit", "flush", "get")


@dataclass(frozen=True)
class SimConfig:
    """Knobs for one simulation run; the seed fixes everything."""

    clients: int = 2
    steps: int = 200
    seed: int = 0
    insert_prob: float = 0.6
    max_insert_len: int = 3
    max_delete_len: int = 4
    alphabet: str = "ab"
    schedule_mix: tuple[float, float, float] = (0.5, 0.25, 0.25)
    initial_doc: str = ""
    mode: str = "faithful"

    def __post_init__(self) -> None:
        if self.clients < 2:
            raise ValueError("need at least two clients")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if not self.alphabet:
            raise ValueError("alphabet must be non-empty")
        if not 0.0 <= self.insert_prob <= 1.0:
            raise ValueError("insert_prob must be in [0, 1]")
        if self.max_insert_len < 1 or self.max_delete_len < 1:
            raise ValueError("edit size limits must be >= 1")
        mix = self.schedule_mix
        if len(mix) != 3 or any(p < 0 for p in mix) or sum(mix) <= 0:
            raise ValueError(f"bad schedule mix {mix!r}")
        if self.mode not in ("faithful", "live"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @classmethod
    def from_dict(cls, obj: dict) -> "SimConfig":
        if "schedule_mix" in obj:
            obj = dict(obj, schedule_mix=tuple(obj["schedule_mix"]))
        return cls(**obj)


@dataclass
class SimReport:
    """What a run did and whether it converged."""

    converged: bool
    server_doc: str
    final_docs: dict[str, str]
    counts: dict[str, int]
    max_pending_len: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass
class _Sim:
    config: SimConfig
    rng: random.Random = field(init=False)

    def __post_init__(self) -> None:
        self.rng = random.Random(self.config.seed)
        self.counter = StepCounter()
        self.server = new_server(self.config.initial_doc)
        self.clients: dict[str, ClientState] = {}
        self.counts = {"edits": 0, "puts": 0, "gets": 0}
        self.max_pending = 0
        for i in range(self.config.clients):
            cid = f"c{i}"
            self.server, doc = server_join(self.server, cid)
            self.clients[cid] = ClientState(id=cid, doc=doc)

    def _note_pending(self) -> None:
        longest = max(len(q) for q in self.server.pending.values())
        self.max_pending = max(self.max_pending, longest)

    def edit(self, cid: str) -> None:
        cfg = self.config
        cs = self.clients[cid]
        d = random_diff(
            self.rng,
            cs.doc,
            insert_prob=cfg.insert_prob,
            max_insert_len=cfg.max_insert_len,
            max_delete_len=cfg.max_delete_len,
            alphabet=cfg.alphabet,
        )
        self.clients[cid] = client_edit(cs, d)
        self.counts["edits"] += 1

    def flush(self, cid: str) -> None:
        cs, batch = client_flush(self.clients[cid])
        if not batch:
            return
        self.clients[cid] = cs
        self.server = server_put(self.server, cid, batch, counter=self.counter)
        self.counts["puts"] += 1
        self._note_pending()

    def get(self, cid: str, *, only_if_owed: bool = False) -> None:
        cs = self.clients[cid]
        if cs.outbox and self.config.mode == "faithful":
            # The convergence argument only covers fetching with an empty
            # outbox; in faithful mode the action is skipped instead.
            return
        if only_if_owed and not self.server.pending[cid]:
            return
        self.server, delivered = server_get(self.server, cid)
        self.clients[cid] = client_receive(
            cs, delivered, live=self.config.mode == "live", counter=self.counter
        )
        self.counts["gets"] += 1

    def step(self) -> None:
        cid = f"c{self.rng.randrange(self.config.clients)}"
        mix = self.config.schedule_mix
        action = self.rng.choices(ACTIONS, weights=mix, k=1)[0]
        getattr(self, action)(cid)

    def quiesce(self) -> None:
        # Flush-then-get rounds; no new edits happen, so two rounds suffice,
        # but loop to the fixed point anyway and guard against stalls.
        for _ in range(4):
            for cid in self.clients:
                self.flush(cid)
            for cid in self.clients:
                self.get(cid, only_if_owed=True)
            if all(not cs.outbox for cs in self.clients.values()) and all(
                not q for q in self.server.pending.values()
            ):
                return
        raise RuntimeError("quiescence did not settle")


def run_sim(config: SimConfig) -> SimReport:
    """Run one seeded schedule to quiescence and report."""
    sim = _Sim(config)
    for _ in range(config.steps):
        sim.step()
    sim.quiesce()
    final_docs = {cid: cs.doc for cid, cs in sim.clients.items()}
    counts = dict(sim.counts, transforms=sim.counter.calls)
    return SimReport(
        converged=all(doc == sim.server.doc for doc in final_docs.values()),
        server_doc=sim.server.doc,
        final_docs=final_docs,
        counts=counts,
        max_pending_len=sim.max_pending,
    )
