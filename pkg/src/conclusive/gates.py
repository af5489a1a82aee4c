"""Fixed operators used by the protocols."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, SimulationError

TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix acting on ``log2(dim)`` qubits."""

    mat: np.ndarray
    name: str = ""

    def __post_init__(self):
        m = np.array(self.mat, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"operator must be square, got shape {m.shape}")
        dim = m.shape[0]
        if dim < 1 or dim & (dim - 1):
            raise DimensionMismatch(f"operator dimension {dim} is not a power of two")
        if not np.all(np.isfinite(m)):
            raise SimulationError("operator entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    def __array__(self, dtype=None, copy=None):
        return self.mat if dtype is None else self.mat.astype(dtype)

    def __matmul__(self, other: Operator) -> Operator:
        return Operator(self.mat @ other.mat, f"{self.name}{other.name}")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    @property
    def dagger(self) -> Operator:
        return Operator(self.mat.conj().T, f"{self.name}†")

    def is_hermitian(self, tol: float = TOL) -> bool:
        return bool(np.allclose(self.mat, self.mat.conj().T, atol=tol, rtol=0))

    def is_unitary(self, tol: float = TOL) -> bool:
        return bool(np.allclose(self.mat.conj().T @ self.mat, np.eye(self.dim), atol=tol, rtol=0))

    def is_psd(self, tol: float = TOL) -> bool:
        return self.is_hermitian(tol) and float(np.linalg.eigvalsh(self.mat).min()) >= -tol

    def is_projector(self, tol: float = TOL) -> bool:
        return self.is_hermitian(tol) and bool(
            np.allclose(self.mat @ self.mat, self.mat, atol=tol, rtol=0)
        )

    def rank(self, tol: float = 1e-9) -> int:
        return int(np.linalg.matrix_rank(self.mat, tol=tol))


def projector(vec, name: str = "") -> Operator:
    """|v><v| for a (normalized copy of) ``vec``."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    return Operator(np.outer(v, v.conj()), name)


I = Operator(np.eye(2), "I")
X = Operator([[0, 1], [1, 0]], "X")
Z = Operator([[1, 0], [0, -1]], "Z")


def identity(n_qubits: int = 1) -> Operator:
    return Operator(np.eye(2**n_qubits), "I")


@lru_cache(maxsize=None)
def pauli_correction(bits: tuple[int, int]) -> Operator:
    """Receiver's rotation for a Bell-type outcome.

    ``bits = (flip, phase)``: Phi+ = (0, 0), Phi- = (0, 1), Psi+ = (1, 0),
    Psi- = (1, 1). The returned operator is ``Z**phase @ X**flip``, i.e. the
    bit flip is undone first.
    """
    flip, phase = (int(b) for b in bits)
    if flip not in (0, 1) or phase not in (0, 1):
        raise SimulationError(f"correction bits must be 0/1, got {bits}")
    op = I
    if flip:
        op = X @ op
    if phase:
        op = Z @ op
    name = {(0, 0): "I", (0, 1): "Z", (1, 0): "X", (1, 1): "ZX"}[(flip, phase)]
    return Operator(op.mat, name)


_CNOT = Operator(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    "CNOT",
)


def cnot() -> Operator:
    """Controlled-NOT, first qubit controls: |10> -> |11>, |11> -> |10>."""
    return _CNOT


_X_PLUS = projector([1, 1], "x+")
_X_MINUS = projector([1, -1], "x-")


def x_basis() -> tuple[Operator, Operator]:
    """Projectors onto (|0> + |1>)/sqrt2 and (|0> - |1>)/sqrt2."""
    return _X_PLUS, _X_MINUS
