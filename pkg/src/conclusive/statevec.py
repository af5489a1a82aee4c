"""Dense pure-state vectors over labeled qubits.

Index convention: bit k of a basis index (most significant first) is the
computational value of ``labels[k]``, so ``|01>`` on ``("A", "B")`` is index 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import (
    BadShape,
    DimensionMismatch,
    DuplicateLabel,
    LabelMismatch,
    SimulationError,
    UnknownLabel,
    ZeroNorm,
)

TOL = 1e-10
BUILD_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes over ``2**n`` basis states plus the qubit labels.

    Instances produced by :func:`make_state`, :func:`tensor` and unitary
    evolution are normalized. Applying a non-unitary operator (a projector or
    Kraus operator) returns the unnormalized image; measurement code
    renormalizes.
    """

    amps: np.ndarray
    labels: tuple[str, ...]

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> StateVector:
        n = self.norm()
        if n < 1e-300:
            raise ZeroNorm("cannot normalize a zero vector")
        return StateVector(self.amps / n, self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(f"no qubit labeled {label!r} in {self.labels}") from None

    def __repr__(self) -> str:
        terms = []
        for i, amp in enumerate(self.amps):
            if abs(amp) > 1e-12:
                terms.append(f"({amp:.4g})|{i:0{self.n_qubits}b}>")
        return f"StateVector[{','.join(self.labels)}]: " + (" + ".join(terms) or "0")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    mat: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        m = self.mat
        if not np.allclose(m, m.conj().T, atol=TOL, rtol=0):
            raise SimulationError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TOL:
            raise SimulationError(f"density matrix trace {np.trace(m).real} != 1")
        if np.linalg.eigvalsh(m).min() < -TOL:
            raise SimulationError("density matrix is not positive semidefinite")

    @property
    def n_qubits(self) -> int:
        return len(self.labels)


def _check_labels(labels: Sequence[str]) -> tuple[str, ...]:
    labels = tuple(str(l) for l in labels)
    if len(set(labels)) != len(labels):
        raise DuplicateLabel(f"repeated qubit label in {labels}")
    return labels


def make_state(amps, labels: Sequence[str]) -> StateVector:
    """Validated, normalized copy of ``amps`` on the given qubit labels."""
    labels = _check_labels(labels)
    vec = np.array(amps, dtype=complex).reshape(-1)
    if not labels or vec.size != 2 ** len(labels):
        raise BadShape(f"{vec.size} amplitudes do not fit {len(labels)} qubits")
    if not np.all(np.isfinite(vec)):
        raise SimulationError("amplitudes must be finite")
    norm = np.linalg.norm(vec)
    if norm < BUILD_TOL:
        raise ZeroNorm("all amplitudes are (numerically) zero")
    return StateVector(vec / norm, labels)


def basis_state(bits: str, labels: Sequence[str]) -> StateVector:
    """Computational basis state, e.g. ``basis_state("01", ["A", "B"])``."""
    vec = np.zeros(2 ** len(bits), dtype=complex)
    vec[int(bits, 2)] = 1.0
    return make_state(vec, labels)


def tensor(*states: StateVector) -> StateVector:
    """Kronecker product, labels concatenated in argument order."""
    if not states:
        raise BadShape("tensor needs at least one state")
    labels: tuple[str, ...] = ()
    amps = np.ones(1, dtype=complex)
    for s in states:
        labels += s.labels
        amps = np.outer(amps, s.amps).reshape(-1)
    return StateVector(amps, _check_labels(labels))


def _target_axes(s: StateVector, targets: Sequence[str]) -> list[int]:
    axes = [s.index(t) for t in targets]
    if len(set(axes)) != len(axes):
        raise DuplicateLabel(f"repeated target in {list(targets)}")
    return axes


@lru_cache(maxsize=1024)
def _perms(n: int, axes: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    perm = axes + tuple(i for i in range(n) if i not in axes)
    return perm, tuple(int(i) for i in np.argsort(perm))


def apply_operator(s: StateVector, op, targets: Sequence[str]) -> StateVector:
    """Apply ``op`` to the ``targets`` qubits (in that order), identity elsewhere."""
    mat = np.asarray(op, dtype=complex)
    k = len(targets)
    if mat.shape != (2**k, 2**k):
        raise DimensionMismatch(f"operator of shape {mat.shape} on {k} target qubits")
    n = s.n_qubits
    perm, inv = _perms(n, tuple(_target_axes(s, targets)))
    shape = (2,) * n
    psi = s.amps.reshape(shape).transpose(perm).reshape(2**k, -1)
    out = (mat @ psi).reshape(shape).transpose(inv)
    return StateVector(out.reshape(-1), s.labels)


def permute(s: StateVector, labels: Sequence[str]) -> StateVector:
    """Reorder the qubits of ``s`` to match ``labels``."""
    if sorted(labels) != sorted(s.labels):
        raise LabelMismatch(f"{list(labels)} is not a reordering of {s.labels}")
    axes = [s.index(l) for l in labels]
    amps = np.transpose(s.amps.reshape((2,) * s.n_qubits), axes).reshape(-1)
    return StateVector(amps, tuple(labels))


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>."""
    if a.labels != b.labels:
        raise LabelMismatch(f"{a.labels} vs {b.labels}")
    return complex(np.vdot(a.amps, b.amps))


def fidelity_pure(a: StateVector, b: StateVector) -> float:
    f = abs(inner(a.normalized(), b.normalized())) ** 2
    return float(min(max(f, 0.0), 1.0))


def partial_trace(s: StateVector, keep: Sequence[str]) -> np.ndarray:
    """Unvalidated reduced density matrix of ``keep`` (trace normalized)."""
    if not keep:
        raise UnknownLabel("keep must name at least one qubit")
    keep_axes = _target_axes(s, keep)
    rest = [i for i in range(s.n_qubits) if i not in keep_axes]
    psi = np.transpose(s.amps.reshape((2,) * s.n_qubits), keep_axes + rest)
    m = psi.reshape(2 ** len(keep_axes), -1)
    rho = m @ m.conj().T
    tr = np.trace(rho).real
    if tr < 1e-300:
        raise ZeroNorm("cannot reduce a zero vector")
    rho = rho / tr
    return 0.5 * (rho + rho.conj().T)


def reduced_density(s: StateVector, keep: Sequence[str]) -> DensityMatrix:
    """Partial trace over every qubit not in ``keep``; result ordered as ``keep``."""
    return DensityMatrix(partial_trace(s, keep), tuple(keep))
