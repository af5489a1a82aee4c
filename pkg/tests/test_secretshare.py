from __future__ import annotations

import math

import numpy as np
import pytest

from conclusive.analysis import charlie_views, enumerate_protocol
from conclusive.params import ChannelSpec, InputQubit
from conclusive.secretshare import GHZ, css1, css2, css3, hbb_secret_share, tripartite_state
from conclusive.statevec import partial_trace

SS = ["hbb", "css1_mh", "css1_qact1", "css2", "css3"]
BITS = {
    "hbb": {"alice_to_bob": 2, "alice_to_charlie": 2, "bob_to_charlie": 1},
    "css2": {"alice_to_bob": 2, "alice_to_charlie": 2, "bob_to_charlie": 2},
    "css3": {"alice_to_bob": 2, "alice_to_charlie": 2, "bob_to_charlie": 1},
}


def test_tripartite_state():
    s = tripartite_state(ChannelSpec.from_beta(0.6))
    assert np.isclose(s.amps[0], 0.8) and np.isclose(s.amps[7], 0.6)
    assert np.count_nonzero(np.abs(s.amps) > 0) == 2


def test_hbb_perfect_on_ghz(rng):
    for _ in range(20):
        q = InputQubit.random(rng)
        t = hbb_secret_share(q, rng)
        assert t.success and t.receiver == "charlie"
        assert math.isclose(t.fidelity, 1.0, abs_tol=1e-12)
        assert t.single_party_recovery == {"bob": False, "charlie": False}


def _bc_state(branch):
    s = branch.trace.snapshots["stage1"]
    rho = partial_trace(s, ["B", "C"])
    return rho


@pytest.mark.parametrize("pid", ["hbb", "css1_mh", "css1_qact1"])
def test_stage1_leaves_entangled_copy_on_bob_and_charlie(pid, rng):
    q = InputQubit.random(rng)
    c = GHZ if pid == "hbb" else ChannelSpec.from_beta(0.35)
    want = np.zeros(4, dtype=complex)
    want[0], want[3] = q.a, q.b
    n = 0
    for b in enumerate_protocol(pid, q, c).branches:
        if "stage1" not in b.trace.snapshots:
            continue
        n += 1
        assert np.allclose(_bc_state(b), np.outer(want, want.conj()), atol=1e-12)
    assert n > 0


def test_single_party_cannot_recover(rng):
    q = InputQubit.random(rng)
    for b in enumerate_protocol("hbb", q, GHZ).branches:
        s = b.trace.snapshots["stage1"]
        for label in ("B", "C"):
            rho = partial_trace(s, [label])
            assert np.allclose(rho, np.diag([abs(q.a) ** 2, abs(q.b) ** 2]), atol=1e-12)
            f = float(np.real(np.vdot(q.vector, rho @ q.vector)))
            assert f < 1 - 1e-6


@pytest.mark.parametrize("pid", SS)
def test_charlie_learns_nothing_before_bob_speaks(pid, rng):
    c = ChannelSpec.from_beta(0.5) if pid != "hbb" else GHZ
    for _ in range(5):
        views = charlie_views(enumerate_protocol(pid, InputQubit.random(rng), c))
        for rho in views.values():
            assert abs(rho[0, 1]) < 1e-12


@pytest.mark.parametrize("pid", SS[1:])
def test_conclusive_sharing_success(pid, channel, rng):
    q = InputQubit.random(rng)
    d = enumerate_protocol(pid, q, channel)
    assert math.isclose(d.total_probability, 1.0, abs_tol=1e-12)
    assert math.isclose(d.success_probability, 2 * channel.beta**2, abs_tol=1e-12)
    for b in d.branches:
        if b.success:
            assert b.fidelity > 1 - 1e-12
        if pid in BITS:
            assert b.bits == BITS[pid]


def test_css1_bits_follow_alice_method(ref):
    c = ChannelSpec.from_beta(0.5)
    for b in enumerate_protocol("css1_mh", ref, c).branches:
        assert b.bits["alice_to_bob"] == b.bits["alice_to_charlie"] == 3
        assert b.bits["bob_to_charlie"] == (1 if b.success else 0)
    for b in enumerate_protocol("css1_qact1", ref, c).branches:
        assert b.bits["alice_to_bob"] in (2, 3)


def test_css1_rejects_unknown_method(ref):
    with pytest.raises(ValueError):
        css1(ref, GHZ, "bogus", np.random.default_rng(0))


def test_css3_recovers_on_separate_qubit(ref):
    t = css3(ref, ChannelSpec.from_beta(0.6), np.random.default_rng(4))
    assert any(e.action.startswith("prepare |0> on C2") for e in t.events)
    assert "C2" not in t.snapshots["initial"].labels
    assert t.receiver == "charlie"


def test_public_wrappers_seeded(ref):
    c = ChannelSpec.from_beta(0.4)
    assert css2(ref, c, np.random.default_rng(8)).to_dict() == css2(ref, c, np.random.default_rng(8)).to_dict()
    assert css1(ref, c, "QACT1", np.random.default_rng(8)).protocol_id == "css1_qact1"
