"""Teleportation over a pure, possibly non-maximal, two-qubit channel.

Qubit labels: ``"1"`` is the unknown input, ``"2"`` Alice's ancilla,
``"A"``/``"B"`` the channel halves, ``"B2"`` Bob's ancilla. Each protocol is
a ``_name(q, c, run)`` function executed against a :class:`~conclusive.runner.Run`;
the public wrappers take a numpy ``Generator`` (or anything with
``.random()``) and return a single sampled trace.

Message conventions (the bit counts are what the traces record):

* Bell outcome: 2 bits ``(flip, phase)``, see :data:`BELL_BITS`.
* Two-step conclusive measurement: 3 bits ``(conclusive, subspace, sign)``.
  The receiver applies ``Z**sign X**subspace`` when ``conclusive`` is set.
* Ancilla-assisted measurement: 2 bits naming a rank-1 outcome, or the 3-bit
  message above for a rank-2 outcome.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .gates import Operator, cnot, pauli_correction, projector
from .measurement import (
    BELL_BITS,
    ProjectiveMeasurement,
    bell_measurement,
    computational_subspaces,
    discrimination_povm,
    embed_povm,
)
from .params import ChannelSpec, InputQubit
from .runner import ProtocolTrace, Run, rng_chooser
from .statevec import StateVector, apply_operator, basis_state, make_state, tensor


def channel_state(c: ChannelSpec, labels=("A", "B")) -> StateVector:
    """``alpha|00> + beta|11>``."""
    return make_state([c.alpha, 0, 0, c.beta], labels)


def ancilla_state(c: ChannelSpec, label: str = "2") -> StateVector:
    """Alice's ancilla, prepared with the channel's Schmidt coefficients."""
    return make_state([c.alpha, c.beta], [label])


# ---------------------------------------------------------------- measurements

# Alice's first step on (1, A): span{|00>,|11>} then span{|01>,|10>}
_PAIR_SUBSPACES = computational_subspaces([[0, 3], [1, 2]], 2, ("even", "odd"))
# POVM coordinates inside each subspace, larger Schmidt weight first
_PAIR_BASES = ((0b00, 0b11), (0b10, 0b01))


@lru_cache(maxsize=256)
def _pair_povm(c: ChannelSpec, subspace: int):
    return embed_povm(discrimination_povm(c), _PAIR_BASES[subspace], 2)


@lru_cache(maxsize=256)
def _single_povm(c: ChannelSpec, flip: int):
    """Discrimination on one qubit; ``flip`` swaps the roles of |0> and |1>."""
    return embed_povm(discrimination_povm(c), (1, 0) if flip else (0, 1), 1)


def qact1_basis() -> list[StateVector]:
    """The eight orthonormal states of qubits (1, 2, A) used by Alice."""
    s = 1 / np.sqrt(2)
    labels = ["1", "2", "A"]

    def ket(terms):
        v = np.zeros(8, dtype=complex)
        for bits, amp in terms:
            v[int(bits, 2)] = amp
        return make_state(v, labels)

    return [
        basis_state("000", labels),
        basis_state("111", labels),
        basis_state("011", labels),
        basis_state("100", labels),
        ket([("010", s), ("101", s)]),
        ket([("010", s), ("101", -s)]),
        ket([("001", s), ("110", s)]),
        ket([("001", s), ("110", -s)]),
    ]


_QACT1_LABELS = ("P1", "P2", "P3", "P4", "P5", "P6")


@lru_cache(maxsize=1)
def qact1_measurement() -> ProjectiveMeasurement:
    """Two rank-2 projectors (onto {Phi1,Phi2}, {Phi3,Phi4}) and four rank-1."""
    phi = qact1_basis()
    rank1 = [projector(p.amps) for p in phi]
    ops = [
        Operator(rank1[0].mat + rank1[1].mat, "P1"),
        Operator(rank1[2].mat + rank1[3].mat, "P2"),
    ] + [Operator(r.mat, f"P{i + 3}") for i, r in enumerate(rank1[4:])]
    return ProjectiveMeasurement(ops, _QACT1_LABELS)


# basis-index pairs of the rank-2 outcomes, larger weight first: (Phi1, Phi2), (Phi4, Phi3)
_QACT1_BASES = ((0b000, 0b111), (0b100, 0b011))


@lru_cache(maxsize=256)
def _qact1_povm(c: ChannelSpec, subspace: int):
    return embed_povm(discrimination_povm(c.derived()), _QACT1_BASES[subspace], 3)


# ------------------------------------------------------------ shared sub-steps


def two_step_measure(run: Run, party: str, state: StateVector, c: ChannelSpec, pair):
    """Subspace projection then conclusive POVM on ``pair``.

    Returns ``(state, conclusive, flip, phase)``.
    """
    sub = run.measure(party, "subspace projection", state, _PAIR_SUBSPACES, pair)
    flip = sub.outcome_index
    res = run.measure(party, "conclusive discrimination", sub.post_state, _pair_povm(c, flip), pair)
    conclusive = res.outcome_index < 2
    return res.post_state, conclusive, flip, res.outcome_index if conclusive else 0


def ancilla_measure(run: Run, party: str, state: StateVector, c: ChannelSpec, triple):
    """Three-qubit measurement, followed by a POVM on a rank-2 outcome.

    Returns ``(state, conclusive, flip, phase, nbits)``.
    """
    res = run.measure(party, "three-qubit measurement", state, qact1_measurement(), triple)
    if res.outcome_index >= 2:
        flip, phase = BELL_BITS[res.outcome_index - 2]
        return res.post_state, True, flip, phase, 2
    sub = res.outcome_index
    pov = run.measure(party, "conclusive discrimination", res.post_state, _qact1_povm(c, sub), triple)
    conclusive = pov.outcome_index < 2
    return pov.post_state, conclusive, sub, pov.outcome_index if conclusive else 0, 3


def ancilla_recovery(run: Run, party: str, state: StateVector, c: ChannelSpec, qubit: str, ancilla: str, flip: int):
    """Local recovery of ``(a, b)`` from a qubit holding ``(a*alpha, b*beta)``.

    With ``flip`` set the qubit holds ``(a*beta, b*alpha)`` and the POVM basis
    is swapped. The recovered state ends up on ``ancilla``.
    """
    state = tensor(state, basis_state("0", [ancilla]))
    state = apply_operator(state, cnot(), [qubit, ancilla])
    run.act(party, f"prepare |0> on {ancilla}, CNOT {qubit}->{ancilla}")
    res = run.measure(party, "conclusive discrimination", state, _single_povm(c, flip), [qubit])
    conclusive = res.outcome_index < 2
    state = res.post_state
    if conclusive and res.outcome_index == 1:
        state = apply_operator(state, pauli_correction((0, 1)), [ancilla])
        run.act(party, f"apply Z on {ancilla}")
    return state, conclusive


def _correct(run: Run, party: str, state: StateVector, label: str, flip: int, phase: int):
    op = pauli_correction((flip, phase))
    run.act(party, f"apply {op.name} on {label}")
    return apply_operator(state, op, [label])


# ------------------------------------------------------------------ protocols


def _standard(q: InputQubit, c: ChannelSpec, run: Run) -> ProtocolTrace:
    state = tensor(q.state("1"), channel_state(c))
    run.snapshot("initial", state)
    res = run.measure("alice", "bell measurement", state, bell_measurement(), ["1", "A"])
    state = res.post_state
    run.snapshot("pre_comm", state)
    flip, phase = BELL_BITS[res.outcome_index]
    run.send("alice", "bob", 2, f"{flip}{phase}")
    state = _correct(run, "bob", state, "B", flip, phase)
    return run.finish("standard", state, "B", q, c.is_maximal)


def _mh(q: InputQubit, c: ChannelSpec, run: Run) -> ProtocolTrace:
    state = tensor(q.state("1"), channel_state(c))
    run.snapshot("initial", state)
    state, ok, flip, phase = two_step_measure(run, "alice", state, c, ["1", "A"])
    run.snapshot("pre_comm", state)
    run.send("alice", "bob", 3, f"{int(ok)}{flip}{phase}")
    if ok:
        state = _correct(run, "bob", state, "B", flip, phase)
    return run.finish("mh", state, "B", q, ok)


def _qact1(q: InputQubit, c: ChannelSpec, run: Run) -> ProtocolTrace:
    state = tensor(q.state("1"), ancilla_state(c, "2"), channel_state(c))
    run.act("alice", "prepare ancilla 2 in (alpha, beta)")
    run.snapshot("initial", state)
    state, ok, flip, phase, nbits = ancilla_measure(run, "alice", state, c, ["1", "2", "A"])
    run.snapshot("pre_comm", state)
    msg = f"{flip}{phase}" if nbits == 2 else f"{int(ok)}{flip}{phase}"
    run.send("alice", "bob", nbits, msg)
    if ok:
        state = _correct(run, "bob", state, "B", flip, phase)
    return run.finish("qact1", state, "B", q, ok)


def _qact2(q: InputQubit, c: ChannelSpec, run: Run) -> ProtocolTrace:
    state = tensor(q.state("1"), channel_state(c))
    run.snapshot("initial", state)
    res = run.measure("alice", "bell measurement", state, bell_measurement(), ["1", "A"])
    state = res.post_state
    run.snapshot("pre_comm", state)
    flip, phase = BELL_BITS[res.outcome_index]
    run.send("alice", "bob", 2, f"{flip}{phase}")
    run.note_channel("bob", "alice")
    state = _correct(run, "bob", state, "B", flip, phase)
    run.snapshot("bob_distorted", state)
    state, ok = ancilla_recovery(run, "bob", state, c, "B", "B2", flip)
    return run.finish("qact2", state, "B2", q, ok)


def standard_teleport(q: InputQubit, c: ChannelSpec, rng) -> ProtocolTrace:
    """Bell-measurement teleportation; perfect only on a maximal channel."""
    return _standard(q, c, Run(rng_chooser(rng)))


def mh_teleport(q: InputQubit, c: ChannelSpec, rng) -> ProtocolTrace:
    """Two-step conclusive teleportation: subspace projection then POVM."""
    return _mh(q, c, Run(rng_chooser(rng)))


def qact1_teleport(q: InputQubit, c: ChannelSpec, rng) -> ProtocolTrace:
    """Alice adds an ancilla and measures three qubits; POVM only on rank-2 outcomes."""
    return _qact1(q, c, Run(rng_chooser(rng)))


def qact2_teleport(q: InputQubit, c: ChannelSpec, rng) -> ProtocolTrace:
    """Standard teleportation followed by Bob's local ancilla + CNOT + POVM."""
    return _qact2(q, c, Run(rng_chooser(rng)))
