"""Channel and input-qubit parameters shared by every protocol."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadSpec
from .statevec import StateVector, make_state

SPEC_TOL = 1e-9


@dataclass(frozen=True)
class ChannelSpec:
    """Schmidt pair of the shared resource ``alpha|0..0> + beta|1..1>``."""

    alpha: float
    beta: float

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise BadSpec("Schmidt coefficients must be finite")
        if b < 0 or a < b - SPEC_TOL:
            raise BadSpec(f"need alpha >= beta >= 0, got alpha={a}, beta={b}")
        if a <= 0:
            raise BadSpec("alpha must be positive")
        if abs(a * a + b * b - 1.0) > SPEC_TOL:
            raise BadSpec(f"alpha^2 + beta^2 = {a * a + b * b}, expected 1")
        # snap values accepted within tolerance onto the exact constraint set
        r = math.hypot(a, b)
        a, b = a / r, b / r
        if b > a:
            a = b = math.sqrt(0.5)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def from_beta(cls, beta: float) -> ChannelSpec:
        beta = float(beta)
        if not 0.0 <= beta <= 1.0:
            raise BadSpec(f"beta={beta} outside [0, 1]")
        return cls(math.sqrt(max(0.0, 1.0 - beta * beta)), beta)

    @classmethod
    def from_alpha(cls, alpha: float) -> ChannelSpec:
        alpha = float(alpha)
        if not 0.0 <= alpha <= 1.0:
            raise BadSpec(f"alpha={alpha} outside [0, 1]")
        return cls(alpha, math.sqrt(max(0.0, 1.0 - alpha * alpha)))

    @classmethod
    def maximal(cls) -> ChannelSpec:
        return cls(math.sqrt(0.5), math.sqrt(0.5))

    @property
    def is_maximal(self) -> bool:
        return abs(self.alpha - self.beta) < 1e-12

    def derived(self) -> ChannelSpec:
        """Coefficients ``(alpha^2, beta^2) / sqrt(alpha^4 + beta^4)``.

        These describe the pair of states left in a rank-2 outcome of the
        ancilla-assisted three-qubit measurement.
        """
        a2, b2 = self.alpha**2, self.beta**2
        r = math.hypot(a2, b2)
        return ChannelSpec(a2 / r, b2 / r)


@dataclass(frozen=True)
class InputQubit:
    """The unknown state ``a|0> + b|1>``."""

    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        if not all(math.isfinite(x) for x in (a.real, a.imag, b.real, b.imag)):
            raise BadSpec("input amplitudes must be finite")
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > SPEC_TOL:
            raise BadSpec(f"|a|^2 + |b|^2 = {abs(a) ** 2 + abs(b) ** 2}, expected 1")
        r = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        a, b = a / r, b / r
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def reference(cls) -> InputQubit:
        return cls(math.sqrt(1 / 3), math.sqrt(2 / 3))

    @classmethod
    def random(cls, rng: np.random.Generator) -> InputQubit:
        """Haar-random pure qubit."""
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        return cls(v[0], v[1])

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=complex)

    def state(self, label: str = "1") -> StateVector:
        return make_state(self.vector, [label])
