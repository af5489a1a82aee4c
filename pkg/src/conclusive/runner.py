"""Execution context shared by all protocols.

A protocol is a plain function ``fn(q, c, run)`` that calls ``run.measure`` at
each measurement. The ``chooser`` passed to :class:`Run` decides which branch
is followed: a random chooser gives a sampled run, a replaying chooser lets
:mod:`conclusive.analysis` walk the full outcome tree with the same code.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .measurement import select_branch
from .statevec import StateVector, partial_trace

# chooser(depth, branch_probabilities) -> index of the branch to follow
Chooser = Callable[[int, Sequence[float]], int]


@dataclass(frozen=True)
class Event:
    party: str
    action: str
    outcome: str | None = None

    def to_dict(self) -> dict:
        return {"party": self.party, "action": self.action, "outcome": self.outcome}


@dataclass(frozen=True)
class Step:
    """One measurement along a run: who measured, what, and the outcome."""

    party: str
    action: str
    index: int
    label: str
    probability: float


@dataclass(eq=False)
class ProtocolTrace:
    protocol_id: str
    events: list[Event]
    bits: dict[str, int]
    success: bool
    final_state: np.ndarray
    fidelity: float
    steps: tuple[Step, ...]
    probability: float
    snapshots: dict[str, StateVector] = field(default_factory=dict, repr=False)
    receiver: str = "bob"

    @property
    def path(self) -> tuple[str, ...]:
        return tuple(f"{s.party}:{s.label}" for s in self.steps)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(s.index for s in self.steps)

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol_id,
            "receiver": self.receiver,
            "events": [e.to_dict() for e in self.events],
            "path": list(self.path),
            "bits": dict(self.bits),
            "success": self.success,
            "fidelity": round(self.fidelity, 12),
            "final_state": [[round(z.real, 12), round(z.imag, 12)] for z in self.final_state],
        }


@dataclass(eq=False)
class SecretShareTrace(ProtocolTrace):
    claimant: str = "charlie"
    single_party_recovery: dict[str, bool] = field(
        default_factory=lambda: {"bob": False, "charlie": False}
    )

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["claimant"] = self.claimant
        d["single_party_recovery"] = dict(self.single_party_recovery)
        return d


def rng_chooser(rng) -> Chooser:
    """One uniform draw from ``rng.random()`` per measurement."""

    def choose(depth, probs):
        return select_branch(probs, rng.random())

    return choose


class Run:
    """Mutable record of one protocol execution.

    ``branch_cache`` may be shared between runs of the same protocol on the
    same inputs: measurement branches are then keyed by the outcome indices
    leading to them and computed once.
    """

    def __init__(self, chooser: Chooser, branch_cache: dict | None = None):
        self._choose = chooser
        self._cache = branch_cache
        self.events: list[Event] = []
        self.steps: list[Step] = []
        self.bits: dict[str, int] = defaultdict(int)
        self.probability = 1.0
        self.snapshots: dict[str, StateVector] = {}

    def measure(self, party: str, action: str, state: StateVector, m, targets: Sequence[str]):
        if self._cache is None:
            branches = m.branches(state, targets)
        else:
            key = tuple(st.index for st in self.steps)
            branches = self._cache.get(key)
            if branches is None:
                branches = self._cache[key] = m.branches(state, targets)
        i = self._choose(len(self.steps), [b.probability for b in branches])
        b = branches[i]
        self.probability *= b.probability
        self.steps.append(Step(party, action, i, b.label, b.probability))
        self.events.append(Event(party, action, b.label))
        return b

    def send(self, src: str, dst: str, nbits: int, message: str):
        self.bits[f"{src}_to_{dst}"] += nbits
        self.events.append(Event(src, f"send {nbits} bit(s) to {dst}", message))

    def note_channel(self, src: str, dst: str):
        """Declare a directed channel that carries zero bits in this protocol."""
        self.bits[f"{src}_to_{dst}"] += 0

    def act(self, party: str, action: str):
        self.events.append(Event(party, action))

    def snapshot(self, name: str, state: StateVector):
        self.snapshots[name] = state

    def finish(self, protocol_id, state, receiver_label, q, success, receiver="bob", cls=ProtocolTrace, **extra):
        rho = partial_trace(state, [receiver_label])
        target = q.vector
        fid = float(np.real(np.vdot(target, rho @ target)))
        w, v = np.linalg.eigh(rho)
        final = v[:, -1]
        k = int(np.argmax(np.abs(final)))
        final = final * (abs(final[k]) / final[k])
        return cls(
            protocol_id=protocol_id,
            events=self.events,
            bits=dict(self.bits),
            success=bool(success),
            final_state=final,
            fidelity=min(max(fid, 0.0), 1.0),
            steps=tuple(self.steps),
            probability=self.probability,
            snapshots=self.snapshots,
            receiver=receiver,
            **extra,
        )
