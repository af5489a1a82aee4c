from __future__ import annotations

import math

import numpy as np
import pytest

from conclusive.analysis import (
    CONCLUSIVE,
    PROTOCOLS,
    averaged_receiver_density,
    binomial_bound,
    bit_report,
    enumerate_protocol,
    initial_receiver_density,
    monte_carlo,
    protocol_info,
    shot_uniforms,
    success_probability,
)
from conclusive.errors import UnknownProtocol
from conclusive.params import ChannelSpec, InputQubit


def test_unknown_protocol():
    with pytest.raises(UnknownProtocol):
        protocol_info("teleport9")


@pytest.mark.parametrize("pid", list(PROTOCOLS))
def test_distributions_sum_to_one(pid, ref):
    d = enumerate_protocol(pid, ref, ChannelSpec.from_beta(0.3))
    assert math.isclose(d.total_probability, 1.0, abs_tol=1e-12)
    paths = [b.path for b in d.branches]
    assert len(set(paths)) == len(paths)
    assert all(b.probability > 0 for b in d.branches)


@pytest.mark.parametrize("pid", CONCLUSIVE)
def test_success_probability_closed_form(pid):
    for beta in (0.15, 0.55):
        assert math.isclose(success_probability(pid, ChannelSpec.from_beta(beta)), 2 * beta * beta, abs_tol=1e-12)


def test_qact1_bit_budget(ref):
    # 2 bits on rank-1 outcomes (mass 2 a^2 b^2), else 3
    c = ChannelSpec.from_beta(0.5)
    r = bit_report(enumerate_protocol("qact1", ref, c))
    a2b2 = c.alpha**2 * c.beta**2
    want = 2 * (2 * a2b2) + 3 * (1 - 2 * a2b2)
    assert math.isclose(r.expected["alice_to_bob"], want, abs_tol=1e-12)
    assert math.isclose(r.expected_total, want, abs_tol=1e-12)
    assert r.expected_given_success is not None
    assert set(r.to_dict()) == {"protocol", "per_branch", "expected", "expected_given_success"}


def test_bit_report_without_success(ref):
    r = bit_report(enumerate_protocol("standard", ref, ChannelSpec.from_beta(0.2)))
    assert r.expected_given_success is None
    assert list(r.expected) == ["alice_to_bob"]
    assert math.isclose(r.expected["alice_to_bob"], 2.0, abs_tol=1e-12)


@pytest.mark.parametrize("pid", list(PROTOCOLS))
def test_no_signaling_before_messages(pid, rng):
    c = ChannelSpec.from_beta(0.4)
    d = enumerate_protocol(pid, InputQubit.random(rng), c)
    assert np.allclose(averaged_receiver_density(d), initial_receiver_density(d), atol=1e-12)


def test_monte_carlo_within_bound(ref):
    c = ChannelSpec.from_beta(0.5)
    stats = monte_carlo("css1_qact1", ref, c, 20_000, 11)
    p = enumerate_protocol("css1_qact1", ref, c).success_probability
    assert abs(stats.success_frequency - p) <= binomial_bound(p, 20_000)
    assert sum(stats.frequencies.values()) == 20_000


def test_monte_carlo_seed_changes_sample(ref):
    c = ChannelSpec.from_beta(0.5)
    assert monte_carlo("mh", ref, c, 500, 1).to_json() != monte_carlo("mh", ref, c, 500, 2).to_json()


def test_shot_uniforms_layout():
    u = shot_uniforms(3, 10)
    assert u.shape == (10, 4)
    assert np.array_equal(u, np.random.default_rng(3).random((10, 4)))


def test_binomial_bound():
    assert binomial_bound(0.5, 100) == pytest.approx(0.2)
    assert binomial_bound(1.0, 100) == 0.0


def test_distribution_to_dict(ref):
    d = enumerate_protocol("mh", ref, ChannelSpec.from_beta(0.3)).to_dict()
    assert d["protocol"] == "mh"
    assert math.isclose(sum(b["probability"] for b in d["branches"]), 1.0)


@pytest.mark.parametrize("pid", list(PROTOCOLS))
def test_monte_carlo_agrees_with_enumeration_on_random_pairs(pid):
    rng = np.random.default_rng(2024)
    for k in range(10):
        q = InputQubit.random(rng)
        c = ChannelSpec.from_beta(rng.uniform(0.05, math.sqrt(0.5)))
        p = enumerate_protocol(pid, q, c).success_probability
        stats = monte_carlo(pid, q, c, 100_000, 500 + k)
        assert abs(stats.success_frequency - p) <= binomial_bound(p, 100_000) + 1e-12


@pytest.mark.parametrize("pid", CONCLUSIVE)
def test_success_probability_is_input_independent(pid):
    c = ChannelSpec.from_beta(0.37)
    rng = np.random.default_rng(77)
    values = [enumerate_protocol(pid, InputQubit.random(rng), c).success_probability for _ in range(20)]
    assert max(values) - min(values) < 1e-10


def test_degenerate_channel_always_fails(ref):
    c = ChannelSpec.from_beta(0.0)
    for pid in CONCLUSIVE:
        d = enumerate_protocol(pid, ref, c)
        assert d.success_probability == 0.0
        assert math.isclose(d.total_probability, 1.0, abs_tol=1e-12)
