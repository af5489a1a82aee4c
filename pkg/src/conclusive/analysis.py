"""Exact outcome trees, seeded Monte Carlo, and classical-bit accounting.

RNG contract for :func:`monte_carlo`: ``np.random.default_rng(seed)`` draws
a ``(shots, MAX_DEPTH)`` array of uniforms in one call; row ``i`` is the
stream of shot ``i`` and its ``k``-th measurement uses column ``k``. Rows are
filled sequentially from one PCG64 stream, so row ``i`` depends only on
``(seed, i)`` and results do not depend on how shots are scheduled.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import protocols as _tp
from . import secretshare as _ss
from .errors import InputDependence, SimulationError, UnknownProtocol
from .measurement import cumulative, pick
from .params import ChannelSpec, InputQubit
from .runner import ProtocolTrace, Run, rng_chooser
from .statevec import partial_trace

MAX_DEPTH = 4
# branches below this probability are not expanded
PRUNE = 1e-15


@dataclass(frozen=True)
class ProtocolInfo:
    fn: Callable
    receiver: str
    receiver_label: str
    secret_sharing: bool = False


PROTOCOLS: dict[str, ProtocolInfo] = {
    "standard": ProtocolInfo(_tp._standard, "bob", "B"),
    "mh": ProtocolInfo(_tp._mh, "bob", "B"),
    "qact1": ProtocolInfo(_tp._qact1, "bob", "B"),
    "qact2": ProtocolInfo(_tp._qact2, "bob", "B"),
    "hbb": ProtocolInfo(_ss._hbb, "charlie", "C", True),
    "css1_mh": ProtocolInfo(_ss._css1_mh, "charlie", "C", True),
    "css1_qact1": ProtocolInfo(_ss._css1_qact1, "charlie", "C", True),
    "css2": ProtocolInfo(_ss._css2, "charlie", "C", True),
    "css3": ProtocolInfo(_ss._css3, "charlie", "C", True),
}
CONCLUSIVE = ("mh", "qact1", "qact2", "css1_mh", "css1_qact1", "css2", "css3")


def protocol_info(protocol_id: str) -> ProtocolInfo:
    try:
        return PROTOCOLS[protocol_id]
    except KeyError:
        raise UnknownProtocol(
            f"unknown protocol {protocol_id!r}; choose from {', '.join(PROTOCOLS)}"
        ) from None


def run_protocol(protocol_id: str, q: InputQubit, c: ChannelSpec, rng) -> ProtocolTrace:
    """One sampled run; ``rng`` needs only a ``random()`` method."""
    return protocol_info(protocol_id).fn(q, c, Run(rng_chooser(rng)))


@dataclass(frozen=True, eq=False)
class Branch:
    path: tuple[str, ...]
    probability: float
    success: bool
    fidelity: float
    bits: dict[str, int]
    trace: ProtocolTrace = field(repr=False)


@dataclass(eq=False)
class OutcomeDistribution:
    protocol_id: str
    branches: list[Branch]

    @property
    def total_probability(self) -> float:
        return math.fsum(b.probability for b in self.branches)

    @property
    def success_probability(self) -> float:
        return math.fsum(b.probability for b in self.branches if b.success)

    def mass(self, predicate: Callable[[Branch], bool]) -> float:
        return math.fsum(b.probability for b in self.branches if predicate(b))

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol_id,
            "branches": [
                {
                    "path": list(b.path),
                    "probability": b.probability,
                    "success": b.success,
                    "fidelity": round(b.fidelity, 12),
                    "bits": dict(b.bits),
                }
                for b in self.branches
            ],
        }


def _walk(fn, q, c) -> list[ProtocolTrace]:
    """Depth-first walk of the outcome tree by replaying forced prefixes."""
    leaves = []
    cache: dict = {}
    stack: list[tuple[int, ...]] = [()]
    while stack:
        prefix = stack.pop()
        seen: list = []

        def choose(depth, probs, prefix=prefix, seen=seen):
            seen.append(probs)
            if depth < len(prefix):
                return prefix[depth]
            return next(i for i, p in enumerate(probs) if p > PRUNE)

        trace = fn(q, c, Run(choose, cache))
        path = trace.indices
        for depth in range(len(prefix), len(path)):
            for i, p in enumerate(seen[depth]):
                if i != path[depth] and p > PRUNE:
                    stack.append(path[:depth] + (i,))
        leaves.append(trace)
    leaves.sort(key=lambda t: t.indices)
    return leaves


def enumerate_protocol(protocol_id: str, q: InputQubit, c: ChannelSpec) -> OutcomeDistribution:
    info = protocol_info(protocol_id)
    branches = [
        Branch(t.path, t.probability, t.success, t.fidelity, t.bits, t)
        for t in _walk(info.fn, q, c)
    ]
    return OutcomeDistribution(protocol_id, branches)


def success_probability(protocol_id: str, c: ChannelSpec, n_random: int = 5, seed: int = 20240601) -> float:
    """Exact success probability for the reference input.

    Raises :class:`InputDependence` if any of ``n_random`` Haar-random inputs
    gives a value differing by more than 1e-10.
    """
    p = enumerate_protocol(protocol_id, InputQubit.reference(), c).success_probability
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        other = enumerate_protocol(protocol_id, InputQubit.random(rng), c).success_probability
        if abs(other - p) > 1e-10:
            raise InputDependence(f"{protocol_id}: {other} vs {p} for different inputs")
    return p


# ------------------------------------------------------------------ sampling


@dataclass(eq=False)
class SampleStats:
    protocol_id: str
    shots: int
    successes: int
    mean_fidelity: float
    frequencies: dict[str, int]
    seed: int

    @property
    def success_frequency(self) -> float:
        return self.successes / self.shots

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol_id,
            "shots": self.shots,
            "seed": self.seed,
            "successes": self.successes,
            "success_frequency": self.success_frequency,
            "mean_fidelity": round(self.mean_fidelity, 12),
            "frequencies": dict(sorted(self.frequencies.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _Sampler:
    """Per-shot sampling with memoized tree nodes.

    A shot follows exactly the branches a fresh sampled run would pick from
    its uniform row. Branch probabilities of visited nodes and the traces of
    visited leaves are cached, so the protocol code only runs when a shot
    reaches a part of the tree no earlier shot has seen.
    """

    def __init__(self, fn, q, c):
        self.fn, self.q, self.c = fn, q, c
        self.nodes: dict[tuple[int, ...], list[float]] = {}  # prefix -> cumulative probs
        self.leaves: dict[tuple[int, ...], ProtocolTrace] = {}

    def _fresh(self, prefix, row) -> ProtocolTrace:
        path: list[int] = []

        def choose(depth, probs):
            if depth >= len(row):
                raise SimulationError(f"protocol exceeds MAX_DEPTH={len(row)} measurements")
            cum = self.nodes[tuple(path)] = cumulative(probs)
            i = prefix[depth] if depth < len(prefix) else pick(cum, row[depth])
            path.append(i)
            return i

        trace = self.fn(self.q, self.c, Run(choose))
        self.leaves[trace.indices] = trace
        return trace

    def shot(self, row) -> ProtocolTrace:
        path: tuple[int, ...] = ()
        while True:
            leaf = self.leaves.get(path)
            if leaf is not None:
                return leaf
            cum = self.nodes.get(path)
            if cum is None:
                return self._fresh(path, row)
            path += (pick(cum, row[len(path)]),)


def shot_uniforms(seed: int, shots: int) -> np.ndarray:
    return np.random.default_rng(seed).random((shots, MAX_DEPTH))


def monte_carlo(protocol_id: str, q: InputQubit, c: ChannelSpec, shots: int, seed: int) -> SampleStats:
    if shots < 1:
        raise SimulationError("shots must be >= 1")
    sampler = _Sampler(protocol_info(protocol_id).fn, q, c)
    counts: Counter[str] = Counter()
    successes = 0
    fid_sum = 0.0
    keys: dict[int, str] = {}
    for row in shot_uniforms(seed, shots).tolist():
        t = sampler.shot(row)
        key = keys.get(id(t))
        if key is None:
            key = keys[id(t)] = "/".join(t.path)
        counts[key] += 1
        successes += t.success
        fid_sum += t.fidelity
    return SampleStats(protocol_id, shots, successes, fid_sum / shots, dict(counts), seed)


def binomial_bound(p: float, shots: int, k: float = 4.0) -> float:
    return k * math.sqrt(max(p * (1 - p), 0.0) / shots)


# ------------------------------------------------------------------- bits


@dataclass(eq=False)
class BitReport:
    protocol_id: str
    per_branch: list[tuple[tuple[str, ...], dict[str, int]]]
    expected: dict[str, float]
    expected_given_success: dict[str, float] | None

    @property
    def expected_total(self) -> float:
        return math.fsum(self.expected.values())

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol_id,
            "per_branch": [{"path": list(p), "bits": b} for p, b in self.per_branch],
            "expected": self.expected,
            "expected_given_success": self.expected_given_success,
        }


def bit_report(d: OutcomeDistribution) -> BitReport:
    channels = sorted({k for b in d.branches for k in b.bits})
    expected = {ch: math.fsum(b.probability * b.bits.get(ch, 0) for b in d.branches) for ch in channels}
    ps = d.success_probability
    given = None
    if ps > 0:
        given = {
            ch: math.fsum(b.probability * b.bits.get(ch, 0) for b in d.branches if b.success) / ps
            for ch in channels
        }
    return BitReport(d.protocol_id, [(b.path, dict(b.bits)) for b in d.branches], expected, given)


# ----------------------------------------------------- density-level checks


def initial_receiver_density(d: OutcomeDistribution) -> np.ndarray:
    label = protocol_info(d.protocol_id).receiver_label
    return partial_trace(d.branches[0].trace.snapshots["initial"], [label])


def averaged_receiver_density(d: OutcomeDistribution, snapshot: str = "pre_comm") -> np.ndarray:
    """Receiver's density at ``snapshot`` averaged over every branch."""
    label = protocol_info(d.protocol_id).receiver_label
    return sum(b.probability * partial_trace(b.trace.snapshots[snapshot], [label]) for b in d.branches)


def charlie_views(d: OutcomeDistribution) -> dict[tuple[str, ...], np.ndarray]:
    """Charlie's density just before Bob's message, per Alice announcement.

    Branches are grouped by Alice's outcomes (what Charlie has been told) and
    averaged over Bob's outcomes (which Charlie has not yet heard).
    """
    groups: dict[tuple[str, ...], list] = {}
    for b in d.branches:
        key = tuple(f"{s.party}:{s.label}" for s in b.trace.steps if s.party == "alice")
        rho = partial_trace(b.trace.snapshots["charlie_view"], ["C"])
        groups.setdefault(key, []).append((b.probability, rho))
    return {k: sum(p * r for p, r in v) / math.fsum(p for p, _ in v) for k, v in groups.items()}
