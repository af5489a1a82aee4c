"""Three-party secret sharing over ``alpha|000> + beta|111>``.

Alice holds the input ``"1"`` and ``"A"``; Bob holds ``"B"``; Charlie holds
``"C"`` and always ends up with the secret. Alice's announcement goes to both
Bob and Charlie and is counted once per recipient.

Stages of the three-party scheme:

1. Alice measures and broadcasts. Bob applies ``X**flip`` to ``B`` and Charlie
   ``Z**phase X**flip`` to ``C``, leaving ``a|00> + b|11>`` on (B, C) for a
   maximal channel.
2. Bob measures ``B`` in the x basis and sends 1 bit to Charlie.
3. Charlie applies ``Z`` on ``x-``.
"""

from __future__ import annotations

import math

from .gates import pauli_correction
from .measurement import BELL_BITS, bell_measurement, x_measurement
from .params import ChannelSpec, InputQubit
from .protocols import _single_povm, ancilla_measure, ancilla_recovery, ancilla_state, two_step_measure
from .runner import Run, SecretShareTrace, rng_chooser
from .statevec import StateVector, apply_operator, make_state, tensor

GHZ = ChannelSpec(math.sqrt(0.5), math.sqrt(0.5))


def tripartite_state(c: ChannelSpec, labels=("A", "B", "C")) -> StateVector:
    """``alpha|000> + beta|111>``; the GHZ state for the maximal channel."""
    amps = [0.0] * 8
    amps[0], amps[7] = c.alpha, c.beta
    return make_state(amps, labels)


def _broadcast(run: Run, nbits: int, message: str):
    run.send("alice", "bob", nbits, message)
    run.send("alice", "charlie", nbits, message)


def _stage1_corrections(run: Run, state: StateVector, flip: int, phase: int) -> StateVector:
    if flip:
        state = apply_operator(state, pauli_correction((1, 0)), ["B"])
        run.act("bob", "apply X on B")
    op = pauli_correction((flip, phase))
    run.act("charlie", f"apply {op.name} on C")
    return apply_operator(state, op, ["C"])


def _x_stage(run: Run, state: StateVector) -> tuple[StateVector, int]:
    """Stage 2 measurement; the Bob->Charlie message is sent by the caller."""
    res = run.measure("bob", "x-basis measurement", state, x_measurement(), ["B"])
    return res.post_state, res.outcome_index


def _charlie_phase(run: Run, state: StateVector, label: str, sign: int) -> StateVector:
    if sign:
        run.act("charlie", f"apply Z on {label}")
        state = apply_operator(state, pauli_correction((0, 1)), [label])
    return state


def _start(q: InputQubit, c: ChannelSpec, run: Run) -> StateVector:
    state = tensor(q.state("1"), tripartite_state(c))
    run.snapshot("initial", state)
    run.note_channel("bob", "charlie")
    return state


def _alice_bell(run: Run, state: StateVector):
    res = run.measure("alice", "bell measurement", state, bell_measurement(), ["1", "A"])
    run.snapshot("pre_comm", res.post_state)
    flip, phase = BELL_BITS[res.outcome_index]
    _broadcast(run, 2, f"{flip}{phase}")
    return _stage1_corrections(run, res.post_state, flip, phase), flip


def _hbb(q: InputQubit, c: ChannelSpec, run: Run) -> SecretShareTrace:
    state = _start(q, c, run)
    state, _ = _alice_bell(run, state)
    run.snapshot("stage1", state)
    state, sign = _x_stage(run, state)
    run.snapshot("charlie_view", state)
    run.send("bob", "charlie", 1, str(sign))
    state = _charlie_phase(run, state, "C", sign)
    return run.finish("hbb", state, "C", q, c.is_maximal, receiver="charlie", cls=SecretShareTrace)


def _css1(q: InputQubit, c: ChannelSpec, run: Run, alice_method: str) -> SecretShareTrace:
    pid = f"css1_{alice_method}"
    state = _start(q, c, run)
    if alice_method == "mh":
        state, ok, flip, phase = two_step_measure(run, "alice", state, c, ["1", "A"])
        nbits, msg = 3, f"{int(ok)}{flip}{phase}"
    elif alice_method == "qact1":
        state = tensor(ancilla_state(c, "2"), state)
        run.act("alice", "prepare ancilla 2 in (alpha, beta)")
        state, ok, flip, phase, nbits = ancilla_measure(run, "alice", state, c, ["1", "2", "A"])
        msg = f"{flip}{phase}" if nbits == 2 else f"{int(ok)}{flip}{phase}"
    else:
        raise ValueError(f"alice_method must be 'mh' or 'qact1', got {alice_method!r}")
    run.snapshot("pre_comm", state)
    _broadcast(run, nbits, msg)
    if not ok:
        run.snapshot("charlie_view", state)
        return run.finish(pid, state, "C", q, False, receiver="charlie", cls=SecretShareTrace)
    state = _stage1_corrections(run, state, flip, phase)
    run.snapshot("stage1", state)
    state, sign = _x_stage(run, state)
    run.snapshot("charlie_view", state)
    run.send("bob", "charlie", 1, str(sign))
    state = _charlie_phase(run, state, "C", sign)
    return run.finish(pid, state, "C", q, True, receiver="charlie", cls=SecretShareTrace)


def _css1_mh(q, c, run):
    return _css1(q, c, run, "mh")


def _css1_qact1(q, c, run):
    return _css1(q, c, run, "qact1")


def _css2(q: InputQubit, c: ChannelSpec, run: Run) -> SecretShareTrace:
    state = _start(q, c, run)
    state, flip = _alice_bell(run, state)
    run.snapshot("stage1", state)
    res = run.measure("bob", "conclusive discrimination", state, _single_povm(c, flip), ["B"])
    state = res.post_state
    run.snapshot("charlie_view", state)
    ok = res.outcome_index < 2
    sign = res.outcome_index if ok else 0
    run.send("bob", "charlie", 2, f"{int(ok)}{sign}")
    if ok:
        state = _charlie_phase(run, state, "C", sign)
    return run.finish("css2", state, "C", q, ok, receiver="charlie", cls=SecretShareTrace)


def _css3(q: InputQubit, c: ChannelSpec, run: Run) -> SecretShareTrace:
    state = _start(q, c, run)
    state, flip = _alice_bell(run, state)
    run.snapshot("stage1", state)
    state, sign = _x_stage(run, state)
    run.snapshot("charlie_view", state)
    run.send("bob", "charlie", 1, str(sign))
    state = _charlie_phase(run, state, "C", sign)
    run.snapshot("charlie_distorted", state)
    state, ok = ancilla_recovery(run, "charlie", state, c, "C", "C2", flip)
    return run.finish("css3", state, "C2", q, ok, receiver="charlie", cls=SecretShareTrace)


def hbb_secret_share(q: InputQubit, rng, c: ChannelSpec = GHZ) -> SecretShareTrace:
    """Three-party sharing; perfect on the GHZ state.

    A non-maximal ``c`` runs the same steps unchanged and leaves Charlie with
    a state proportional to ``(a*alpha, b*beta)`` (or its swap on a Psi outcome).
    """
    return _hbb(q, c, Run(rng_chooser(rng)))


def css1(q: InputQubit, c: ChannelSpec, alice_method: str, rng) -> SecretShareTrace:
    """Alice measures conclusively (``"mh"`` or ``"qact1"``), then stages 2-3 as usual."""
    return _css1(q, c, Run(rng_chooser(rng)), alice_method.lower())


def css2(q: InputQubit, c: ChannelSpec, rng) -> SecretShareTrace:
    """Bob replaces the x-basis measurement by conclusive discrimination."""
    return _css2(q, c, Run(rng_chooser(rng)))


def css3(q: InputQubit, c: ChannelSpec, rng) -> SecretShareTrace:
    """Full three-party run, then Charlie's local ancilla recovery."""
    return _css3(q, c, Run(rng_chooser(rng)))
