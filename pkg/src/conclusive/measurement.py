"""Projective and POVM measurements with exact branch enumeration.

Every measurement exposes all of its branches (probability and normalized
post-measurement state). Random sampling picks one of them by inverse CDF on a
single uniform draw, so sampled runs and enumerated trees share the same
branch data.
"""

from __future__ import annotations

from dataclasses import dataclass
from bisect import bisect_right
from functools import lru_cache
from itertools import accumulate
from typing import Sequence

import numpy as np

from .errors import InvalidMeasurement, InvalidPovm, NotPsd
from .gates import Operator, projector, x_basis
from .params import ChannelSpec
from .statevec import StateVector, apply_operator

BUILD_TOL = 1e-9
ZERO_PROB = 1e-12


@dataclass(frozen=True, eq=False)
class BranchResult:
    outcome_index: int
    label: str
    probability: float
    post_state: StateVector
    # False when probability <= ZERO_PROB; post_state is then the zero vector
    reachable: bool = True


def _branches(s: StateVector, ops: Sequence[Operator], labels, targets) -> list[BranchResult]:
    out = []
    for i, (op, label) in enumerate(zip(ops, labels)):
        image = apply_operator(s, op, targets)
        p = float(np.vdot(image.amps, image.amps).real)
        if p > ZERO_PROB:
            out.append(BranchResult(i, label, p, StateVector(image.amps / np.sqrt(p), s.labels)))
        else:
            zero = StateVector(np.zeros_like(s.amps), s.labels)
            out.append(BranchResult(i, label, max(p, 0.0), zero, reachable=False))
    return out


class ProjectiveMeasurement:
    """Complete set of mutually orthogonal projectors (ranks may differ)."""

    def __init__(self, projectors: Sequence[Operator], outcome_labels: Sequence[str] | None = None):
        self.projectors = tuple(projectors)
        if outcome_labels is None:
            outcome_labels = [str(i) for i in range(len(self.projectors))]
        self.outcome_labels = tuple(outcome_labels)
        self._validate()

    def _validate(self):
        if not self.projectors or len(self.outcome_labels) != len(self.projectors):
            raise InvalidMeasurement("need one label per projector")
        dim = self.projectors[0].dim
        if any(p.dim != dim for p in self.projectors):
            raise InvalidMeasurement("projectors have different dimensions")
        for p in self.projectors:
            if not p.is_projector(BUILD_TOL):
                raise InvalidMeasurement(f"{p.name or 'element'} is not a projector")
        for i, p in enumerate(self.projectors):
            for q in self.projectors[i + 1 :]:
                if not np.allclose(p.mat @ q.mat, 0, atol=BUILD_TOL):
                    raise InvalidMeasurement("projectors are not pairwise orthogonal")
        total = sum(p.mat for p in self.projectors)
        if not np.allclose(total, np.eye(dim), atol=BUILD_TOL, rtol=0):
            raise InvalidMeasurement("projectors do not sum to the identity")

    @property
    def n_qubits(self) -> int:
        return self.projectors[0].n_qubits

    def branches(self, s: StateVector, targets: Sequence[str]) -> list[BranchResult]:
        return _branches(s, self.projectors, self.outcome_labels, targets)


class PovmSet:
    """Generalized measurement with PSD square-root Kraus operators.

    ``conclusive_mask[i]`` marks outcomes that identify the input state.
    """

    def __init__(
        self,
        elements: Sequence[Operator],
        outcome_labels: Sequence[str],
        conclusive_mask: Sequence[bool],
        kraus: Sequence[Operator] | None = None,
    ):
        self.elements = tuple(elements)
        self.outcome_labels = tuple(outcome_labels)
        self.conclusive_mask = tuple(bool(c) for c in conclusive_mask)
        if kraus is None:
            kraus = [kraus_from_element(a, InvalidPovm) for a in self.elements]
        self.kraus = tuple(kraus)
        self._validate()

    def _validate(self):
        n = len(self.elements)
        if n == 0 or not (len(self.outcome_labels) == len(self.conclusive_mask) == len(self.kraus) == n):
            raise InvalidPovm("elements, labels, mask and Kraus operators must align")
        dim = self.elements[0].dim
        for a, k in zip(self.elements, self.kraus):
            if a.dim != dim or k.dim != dim:
                raise InvalidPovm("POVM operators have different dimensions")
            if not a.is_psd(BUILD_TOL):
                raise InvalidPovm(f"element {a.name!r} is not positive semidefinite")
            if not np.allclose(k.mat.conj().T @ k.mat, a.mat, atol=BUILD_TOL, rtol=0):
                raise InvalidPovm(f"Kraus operator does not reproduce element {a.name!r}")
        total = sum(a.mat for a in self.elements)
        if not np.allclose(total, np.eye(dim), atol=BUILD_TOL, rtol=0):
            raise InvalidPovm("POVM elements do not sum to the identity")

    @property
    def n_qubits(self) -> int:
        return self.elements[0].n_qubits

    def branches(self, s: StateVector, targets: Sequence[str]) -> list[BranchResult]:
        return _branches(s, self.kraus, self.outcome_labels, targets)


def kraus_from_element(a: Operator, error=NotPsd) -> Operator:
    """Unique PSD square root of a PSD element, via eigendecomposition."""
    if not a.is_hermitian(BUILD_TOL):
        raise error(f"element {a.name!r} is not Hermitian")
    herm = 0.5 * (a.mat + a.mat.conj().T)
    w, v = np.linalg.eigh(herm)
    if w.min() < -BUILD_TOL:
        raise error(f"element {a.name!r} has eigenvalue {w.min():.3g} < 0")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return Operator(root, f"sqrt({a.name})")


def cumulative(probs: Sequence[float]) -> list[float]:
    return list(accumulate(max(float(p), 0.0) for p in probs))


def pick(cum: Sequence[float], u: float) -> int:
    """Index chosen by uniform ``u`` from a cumulative probability list."""
    i = bisect_right(cum, u * cum[-1])
    if i >= len(cum):
        i = len(cum) - 1
        while i > 0 and cum[i] == cum[i - 1]:
            i -= 1
    return i


def select_branch(probs: Sequence[float], u: float) -> int:
    """Inverse-CDF pick of a branch for a uniform draw ``u`` in [0, 1).

    Zero-probability branches are never selected.
    """
    return pick(cumulative(probs), u)


def enumerate_projective(s: StateVector, m: ProjectiveMeasurement, targets: Sequence[str]) -> list[BranchResult]:
    return m.branches(s, targets)


def enumerate_povm(s: StateVector, p: PovmSet, targets: Sequence[str]) -> list[BranchResult]:
    return p.branches(s, targets)


def projective_measure(s, m: ProjectiveMeasurement, targets, rng) -> BranchResult:
    branches = m.branches(s, targets)
    return branches[select_branch([b.probability for b in branches], rng.random())]


def povm_measure(s, p: PovmSet, targets, rng) -> BranchResult:
    branches = p.branches(s, targets)
    return branches[select_branch([b.probability for b in branches], rng.random())]


@lru_cache(maxsize=256)
def discrimination_povm(c: ChannelSpec) -> PovmSet:
    """Optimal unambiguous discrimination of ``(alpha, beta)`` vs ``(alpha, -beta)``.

    Outcome ``"+"`` never fires on ``(alpha, -beta)``, ``"-"`` never fires on
    ``(alpha, beta)``, ``"?"`` is inconclusive. For equiprobable inputs the
    conclusive probability is ``2 beta^2``.
    """
    a, b = c.alpha, c.beta
    scale = 1.0 / (2.0 * a * a)
    plus = Operator(scale * np.array([[b * b, a * b], [a * b, a * a]]), "A+")
    minus = Operator(scale * np.array([[b * b, -a * b], [-a * b, a * a]]), "A-")
    fail = Operator(np.diag([1.0 - (b * b) / (a * a), 0.0]), "A?")
    return PovmSet([plus, minus, fail], ["+", "-", "?"], [True, True, False])


def embed_povm(p: PovmSet, basis: Sequence[int], n_qubits: int) -> PovmSet:
    """Lift a POVM acting on ``span(basis)`` to ``n_qubits`` qubits.

    ``basis`` lists computational basis indices playing the roles of |0>, |1>,
    ... of ``p``. The orthogonal complement is absorbed by the last
    inconclusive outcome so completeness holds on the full space.
    """
    dim = 2**n_qubits
    v = np.zeros((dim, p.elements[0].dim), dtype=complex)
    for col, idx in enumerate(basis):
        v[idx, col] = 1.0
    rest = np.eye(dim) - v @ v.conj().T
    sink = max(i for i, c in enumerate(p.conclusive_mask) if not c)
    elements, kraus = [], []
    for i, (a, k) in enumerate(zip(p.elements, p.kraus)):
        ea, ek = v @ a.mat @ v.conj().T, v @ k.mat @ v.conj().T
        if i == sink:
            ea, ek = ea + rest, ek + rest
        elements.append(Operator(ea, a.name))
        kraus.append(Operator(ek, k.name))
    return PovmSet(elements, p.outcome_labels, p.conclusive_mask, kraus)


def _bell_vectors():
    s = 1 / np.sqrt(2)
    return {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }


BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")
# (flip, phase) bits announced for each Bell outcome
BELL_BITS = {0: (0, 0), 1: (0, 1), 2: (1, 0), 3: (1, 1)}

_BELL = ProjectiveMeasurement(
    [projector(v, k) for k, v in _bell_vectors().items()], BELL_LABELS
)
_X = ProjectiveMeasurement(x_basis(), ("x+", "x-"))


def bell_measurement() -> ProjectiveMeasurement:
    return _BELL


def x_measurement() -> ProjectiveMeasurement:
    return _X


def computational_subspaces(groups: Sequence[Sequence[int]], n_qubits: int, labels=None) -> ProjectiveMeasurement:
    """Projectors onto spans of computational basis states."""
    dim = 2**n_qubits
    ops = []
    for g in groups:
        m = np.zeros((dim, dim))
        m[list(g), list(g)] = 1.0
        ops.append(Operator(m))
    return ProjectiveMeasurement(ops, labels)
