from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conclusive.errors import BadSpec
from conclusive.params import ChannelSpec, InputQubit


def test_channel_from_beta():
    c = ChannelSpec.from_beta(0.6)
    assert math.isclose(c.alpha, 0.8) and math.isclose(c.beta, 0.6)
    assert not c.is_maximal
    assert ChannelSpec.maximal().is_maximal


@pytest.mark.parametrize("alpha,beta", [(0.6, 0.8), (0.5, 0.5), (1.0, -0.0001), (math.nan, 0.5), (0.0, 0.0)])
def test_channel_rejects(alpha, beta):
    with pytest.raises(BadSpec):
        ChannelSpec(alpha, beta)


def test_channel_snaps_within_tolerance():
    c = ChannelSpec(math.sqrt(0.5) - 1e-11, math.sqrt(0.5) + 1e-11)
    assert c.alpha == c.beta
    assert abs(c.alpha**2 + c.beta**2 - 1) < 1e-15


@given(st.floats(0.0, math.sqrt(0.5)))
def test_derived_coefficients(beta):
    c = ChannelSpec.from_beta(beta)
    d = c.derived()
    r = math.sqrt(c.alpha**4 + c.beta**4)
    assert math.isclose(d.alpha, c.alpha**2 / r, abs_tol=1e-12)
    assert math.isclose(d.beta, c.beta**2 / r, abs_tol=1e-12)
    assert d.beta <= c.beta + 1e-12


def test_input_qubit():
    q = InputQubit.reference()
    assert np.isclose(abs(q.a) ** 2, 1 / 3)
    with pytest.raises(BadSpec):
        InputQubit(1.0, 1.0)
    rng = np.random.default_rng(0)
    r = InputQubit.random(rng)
    assert np.isclose(np.linalg.norm(r.vector), 1.0)
    assert r.state("x").labels == ("x",)
