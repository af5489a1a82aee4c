from __future__ import annotations

import math

import numpy as np
import pytest

from conclusive.params import ChannelSpec, InputQubit


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=[0.2, 0.6, math.sqrt(0.5)], ids=["b0.2", "b0.6", "bmax"])
def channel(request):
    return ChannelSpec.from_beta(request.param)


@pytest.fixture
def ref():
    return InputQubit.reference()


def random_state_vector(rng, n):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


def kron_lift(op, targets, n):
    """Full 2**n matrix for ``op`` on adjacent, ascending ``targets`` (oracle)."""
    k = len(targets)
    first = targets[0]
    assert list(targets) == list(range(first, first + k))
    return np.kron(np.kron(np.eye(2**first), op), np.eye(2 ** (n - first - k)))
