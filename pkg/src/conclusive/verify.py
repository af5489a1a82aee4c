"""Acceptance checks, each reporting measured versus expected values.

Run with ``conclusive verify``; exit status 0 means every check passed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analysis import (
    CONCLUSIVE,
    PROTOCOLS,
    averaged_receiver_density,
    binomial_bound,
    charlie_views,
    enumerate_protocol,
    initial_receiver_density,
    monte_carlo,
    success_probability,
)
from .measurement import PovmSet, discrimination_povm
from .params import ChannelSpec, InputQubit
from .protocols import _pair_povm, _qact1_povm, _single_povm
from .statevec import partial_trace

TOL = 1e-10
BETA_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, math.sqrt(0.5))
SEED = 1729
TIME_LIMIT = 60.0
SECRET_SHARING = tuple(k for k, v in PROTOCOLS.items() if v.secret_sharing)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: str
    expected: str

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:>2}. {self.title}: measured {self.measured}; expected {self.expected}"

    def to_dict(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "measured": self.measured,
            "expected": self.expected,
        }


def _random_inputs(n: int, seed: int) -> list[InputQubit]:
    rng = np.random.default_rng(seed)
    return [InputQubit.random(rng) for _ in range(n)]


def _balanced_inputs(n: int, seed: int) -> list[InputQubit]:
    """Inputs with |a| = |b| and random relative phase."""
    rng = np.random.default_rng(seed)
    s = math.sqrt(0.5)
    return [InputQubit(s, s * np.exp(1j * rng.uniform(0, 2 * math.pi))) for _ in range(n)]


def _first_label(b) -> str:
    return b.trace.steps[0].label


def check_success_probability() -> CriterionResult:
    worst, where = 0.0, ""
    closed_form = 0.0
    for beta in BETA_GRID:
        c = ChannelSpec.from_beta(beta)
        target = 2 * beta * beta
        for pid in CONCLUSIVE:
            err = abs(success_probability(pid, c) - target)
            if err >= worst:
                worst, where = err, f"{pid} at beta={beta:.4f}"
        a2, b2 = c.alpha**2, c.beta**2
        closed_form = max(closed_form, abs(2 * b2 * b2 + 2 * a2 * b2 - target))
    return CriterionResult(
        1,
        "exact success probability = 2 beta^2 (7 conclusive protocols x beta grid)",
        worst < TOL and closed_form < TOL,
        f"max |measured - 2beta^2| = {worst:.2e} ({where}); |2b^4 + 2a^2b^2 - 2b^2| = {closed_form:.1e}",
        f"< {TOL:.0e}",
    )


def check_qact1_branches() -> CriterionResult:
    err_a = err_b = err_btot = 0.0
    for beta in BETA_GRID:
        c = ChannelSpec.from_beta(beta)
        a2, b2 = c.alpha**2, c.beta**2
        for q in _random_inputs(10, SEED) + _balanced_inputs(10, SEED):
            d = enumerate_protocol("qact1", q, c)
            for lab in ("P3", "P4", "P5", "P6"):
                err_a = max(err_a, abs(d.mass(lambda b: _first_label(b) == lab) - a2 * b2 / 2))
            typeb = d.mass(lambda b: _first_label(b) in ("P1", "P2"))
            err_btot = max(err_btot, abs(typeb - (a2 * a2 + b2 * b2)))
        for q in _balanced_inputs(10, SEED + 1):
            d = enumerate_protocol("qact1", q, c)
            for lab in ("P1", "P2"):
                err_b = max(err_b, abs(d.mass(lambda b: _first_label(b) == lab) - (a2 * a2 + b2 * b2) / 2))
    worst = max(err_a, err_b, err_btot)
    return CriterionResult(
        2,
        "three-qubit measurement branch masses",
        worst < TOL,
        f"rank-1 outcome err {err_a:.1e}; rank-2 outcome err (|a|=|b|) {err_b:.1e}; "
        f"rank-2 total err {err_btot:.1e}",
        f"each rank-1 = a^2b^2/2, each rank-2 = (a^4+b^4)/2, within {TOL:.0e}",
    )


def check_conclusive_subprobability() -> CriterionResult:
    err_class = err_sub = 0.0
    for beta in BETA_GRID:
        c = ChannelSpec.from_beta(beta)
        a4, b4 = c.alpha**4, c.beta**4
        target = 2 * b4 / (a4 + b4)
        for q in _random_inputs(10, SEED + 2):
            d = enumerate_protocol("qact1", q, c)
            typeb = d.mass(lambda b: _first_label(b) in ("P1", "P2"))
            ok = d.mass(lambda b: b.success and _first_label(b) in ("P1", "P2"))
            err_class = max(err_class, abs(ok / typeb - target))
        for q in _balanced_inputs(5, SEED + 3):
            d = enumerate_protocol("qact1", q, c)
            for lab in ("P1", "P2"):
                sub = d.mass(lambda b: _first_label(b) == lab)
                ok = d.mass(lambda b: b.success and _first_label(b) == lab)
                err_sub = max(err_sub, abs(ok / sub - target))
    return CriterionResult(
        3,
        "conclusive probability inside a rank-2 outcome",
        max(err_class, err_sub) < TOL,
        f"max err {err_class:.1e} (any input), {err_sub:.1e} (per subspace, |a|=|b|)",
        f"2b^4/(a^4+b^4) within {TOL:.0e}",
    )


def check_conclusive_fidelity(n_inputs: int = 100) -> CriterionResult:
    worst, count = 0.0, 0
    inputs = _random_inputs(n_inputs, SEED + 4)
    for pid in PROTOCOLS:
        for beta in BETA_GRID:
            c = ChannelSpec.from_beta(beta)
            for q in inputs:
                for b in enumerate_protocol(pid, q, c).branches:
                    if b.success:
                        count += 1
                        worst = max(worst, 1.0 - b.fidelity)
    return CriterionResult(
        4,
        "fidelity of every success branch",
        worst < TOL and count > 0,
        f"max (1 - F) = {worst:.1e} over {count} success branches",
        f"F = 1 within {TOL:.0e}",
    )


def check_standard_baseline() -> CriterionResult:
    err_p = err_f = err_state = 0.0
    nbranches = set()
    for q in _random_inputs(20, SEED + 5):
        d = enumerate_protocol("standard", q, ChannelSpec.maximal())
        nbranches.add(len(d.branches))
        for b in d.branches:
            err_p = max(err_p, abs(b.probability - 0.25))
            err_f = max(err_f, 1.0 - b.fidelity)
        for beta in BETA_GRID[:-1]:
            c = ChannelSpec.from_beta(beta)
            d = enumerate_protocol("standard", q, c)
            (phi_plus,) = [b for b in d.branches if _first_label(b) == "phi+"]
            rho = partial_trace(phi_plus.trace.snapshots["pre_comm"], ["B"])
            w = np.array([q.a * c.alpha, q.b * c.beta])
            w /= np.linalg.norm(w)
            err_state = max(err_state, float(np.abs(rho - np.outer(w, w.conj())).max()))
    passed = nbranches == {4} and err_p < TOL and err_f < TOL and err_state < 1e-12
    return CriterionResult(
        5,
        "standard teleportation baseline",
        passed,
        f"maximal: {sorted(nbranches)} branches, |p - 1/4| <= {err_p:.1e}, 1 - F <= {err_f:.1e}; "
        f"phi+ state err {err_state:.1e}",
        "4 branches of 1/4 with F = 1; Bob's phi+ state prop. to (a alpha, b beta) within 1e-12",
    )


def _bits_ok(pid, c, q, rule: Callable) -> list[str]:
    bad = []
    for b in enumerate_protocol(pid, q, c).branches:
        expect = rule(b)
        got = {k: b.bits.get(k, 0) for k in expect}
        if got != expect:
            bad.append(f"{pid} {'/'.join(b.path)}: {got} != {expect}")
    return bad


def check_bits() -> CriterionResult:
    q = InputQubit.reference()
    bad: list[str] = []
    typeb = ("P1", "P2")
    for beta in (0.3, 0.6, math.sqrt(0.5)):
        c = ChannelSpec.from_beta(beta)
        bad += _bits_ok("mh", c, q, lambda b: {"alice_to_bob": 3})
        bad += _bits_ok("qact1", c, q, lambda b: {"alice_to_bob": 3 if _first_label(b) in typeb else 2})
        bad += _bits_ok("qact2", c, q, lambda b: {"alice_to_bob": 2, "bob_to_alice": 0})
        bad += _bits_ok(
            "hbb", c, q, lambda b: {"alice_to_bob": 2, "alice_to_charlie": 2, "bob_to_charlie": 1}
        )
        bad += _bits_ok(
            "css2", c, q, lambda b: {"alice_to_bob": 2, "alice_to_charlie": 2, "bob_to_charlie": 2}
        )
    return CriterionResult(
        6,
        "classical-bit accounting",
        not bad,
        "all branches match" if not bad else "; ".join(bad[:3]),
        "mh 3; qact1 2 (rank-1) / 3 (rank-2); qact2 2 + 0; hbb 2+2 broadcast, 1 Bob->Charlie; css2 2 Bob->Charlie",
    )


def _povm_errors(p: PovmSet) -> tuple[float, float]:
    total = sum(a.mat for a in p.elements)
    comp = float(np.abs(total - np.eye(total.shape[0])).max())
    kraus = max(float(np.abs(k.mat.conj().T @ k.mat - a.mat).max()) for a, k in zip(p.elements, p.kraus))
    return comp, kraus


def check_povm_validity() -> CriterionResult:
    comp = kraus = 0.0
    n = 0
    for beta in (0.0,) + BETA_GRID:
        c = ChannelSpec.from_beta(beta)
        sets = [discrimination_povm(c), discrimination_povm(c.derived())]
        sets += [_pair_povm(c, s) for s in (0, 1)] + [_single_povm(c, f) for f in (0, 1)]
        sets += [_qact1_povm(c, s) for s in (0, 1)]
        for p in sets:
            e1, e2 = _povm_errors(p)
            comp, kraus, n = max(comp, e1), max(kraus, e2), n + 1
    return CriterionResult(
        7,
        "POVM completeness and Kraus consistency (beta in {0} + grid)",
        comp < TOL and kraus < TOL,
        f"{n} POVMs: max |sum A - I| = {comp:.1e}, max |K^dag K - A| = {kraus:.1e}",
        f"< {TOL:.0e}",
    )


def check_no_signaling() -> CriterionResult:
    worst, where = 0.0, ""
    inputs = [InputQubit.reference()] + _random_inputs(5, SEED + 6)
    for pid in PROTOCOLS:
        for beta in (0.3, 0.6, math.sqrt(0.5)):
            c = ChannelSpec.from_beta(beta)
            for q in inputs:
                d = enumerate_protocol(pid, q, c)
                err = float(np.abs(averaged_receiver_density(d) - initial_receiver_density(d)).max())
                if err >= worst:
                    worst, where = err, f"{pid} beta={beta:.3f}"
    return CriterionResult(
        8,
        "no-signaling of the receiver's averaged density",
        worst < TOL,
        f"max deviation {worst:.1e} ({where})",
        f"< {TOL:.0e}",
    )


def check_monte_carlo(shots: int = 100_000) -> CriterionResult:
    c = ChannelSpec.from_beta(0.6)
    q = InputQubit.reference()
    rows, ok = [], True
    for pid in PROTOCOLS:
        exact = enumerate_protocol(pid, q, c).success_probability
        s1 = monte_carlo(pid, q, c, shots, SEED)
        s2 = monte_carlo(pid, q, c, shots, SEED)
        dev = abs(s1.success_frequency - exact)
        bound = binomial_bound(exact, shots)
        same = s1.to_json() == s2.to_json()
        ok &= same and dev <= bound + 1e-15
        rows.append(f"{pid} {s1.success_frequency:.5f}/{exact:.5f}")
    return CriterionResult(
        9,
        f"Monte Carlo ({shots} shots, beta=0.6) vs exact",
        ok,
        "; ".join(rows),
        "|freq - p| <= 4 sqrt(p(1-p)/n); identical seeds give identical output",
    )


def check_secrecy(n_inputs: int = 50) -> CriterionResult:
    worst = 0.0
    inputs = _random_inputs(n_inputs, SEED + 7)
    for pid in SECRET_SHARING:
        for beta in (0.3, 0.6, math.sqrt(0.5)):
            c = ChannelSpec.from_beta(beta)
            for q in inputs:
                for rho in charlie_views(enumerate_protocol(pid, q, c)).values():
                    worst = max(worst, abs(rho[0, 1]))
    return CriterionResult(
        10,
        "Charlie has no phase information before Bob's message",
        worst < TOL,
        f"max |rho_01| = {worst:.1e}",
        f"< {TOL:.0e}",
    )


CHECKS: list[Callable[[], CriterionResult]] = [
    check_success_probability,
    check_qact1_branches,
    check_conclusive_subprobability,
    check_conclusive_fidelity,
    check_standard_baseline,
    check_bits,
    check_povm_validity,
    check_no_signaling,
    check_monte_carlo,
    check_secrecy,
]


def run_all(echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    start = time.perf_counter()
    results = []
    for check in CHECKS:
        r = check()
        results.append(r)
        if echo:
            echo(r.line())
    elapsed = time.perf_counter() - start
    r = CriterionResult(11, "verify suite runtime", elapsed < TIME_LIMIT, f"{elapsed:.1f} s", f"< {TIME_LIMIT:.0f} s")
    results.append(r)
    if echo:
        echo(r.line())
    return results
