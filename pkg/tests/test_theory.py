import math

import pytest
from hypothesis import given, settings, strategies as st

from fedmyopic.errors import CapacityError, InputError
from fedmyopic.federation import ClientSpec, ModelSpec, complete_pairs
from fedmyopic.pipeline import run_pipeline
from fedmyopic.theory import (
    client_signal_coeffs,
    impossibility_condition,
    kl_bernoulli,
    recovery_condition,
    recovery_threshold,
)

from oracles import kl


def full(n, p, q, r, K=1, strict=True):
    labels = [1] * (n // 2) + [-1] * (n // 2)
    return ModelSpec(n=n, labels=labels, strict=strict,
                     clients=[ClientSpec(fov=complete_pairs(range(n)), p=p, q=q, r=r) for _ in range(K)])


def uniform_complete_phi(c, n):
    # best cut of c*K_n is a balanced bisection
    return c * n * n / (8 * (n - 1))


def test_single_full_client_matches_direct_evaluation():
    n = 12
    rep = recovery_condition(full(n, 0.9, 0.1, 0.1))
    phi = uniform_complete_phi(0.64, n)
    noise = (n - 1) * 0.82 * 0.18
    threshold = (3 * phi * phi - 8 * phi * math.log(n)) / (48 * math.log(n))
    assert rep.phi_bar == pytest.approx(phi, rel=1e-12)
    assert rep.noise == pytest.approx(noise, rel=1e-12)
    assert rep.threshold == pytest.approx(threshold, rel=1e-12)
    assert rep.satisfied == (phi > 0 and 4 * noise <= threshold)
    assert not rep.satisfied and rep.failure_probability_bound is None


def test_chain_split_not_satisfied():
    m = ModelSpec(n=10, labels=[1, -1] * 5, clients=[
        ClientSpec(fov=complete_pairs(range(5)), p=0.9, q=0.1, r=0.1),
        ClientSpec(fov=complete_pairs(range(5, 10)), p=0.9, q=0.1, r=0.1),
    ])
    rep = recovery_condition(m)
    assert rep.phi_bar <= 0 and not rep.satisfied


def test_noiseless_limit():
    n = 8
    root = 8 * math.log(n) / 3
    for K in (4, 5):
        rep = recovery_condition(full(n, 1.0, 0.0, 0.0, K=K, strict=False))
        assert rep.noise == 0.0
        assert rep.phi_bar == pytest.approx(uniform_complete_phi(K, n))
        assert rep.satisfied == (rep.phi_bar >= root)
    assert not recovery_condition(full(n, 1.0, 0.0, 0.0, K=4, strict=False)).satisfied
    rep = recovery_condition(full(n, 1.0, 0.0, 0.0, K=5, strict=False))
    assert rep.satisfied and rep.failure_probability_bound == pytest.approx(0.25)


def test_threshold_formula():
    assert recovery_threshold(10.0, 8) == pytest.approx((300 - 80 * math.log(8)) / (48 * math.log(8)))


def test_recovery_condition_errors():
    c = ClientSpec(fov=[(0, 1)], p=0.9, q=0.1, r=0.1)
    m = ModelSpec(n=2, labels=[1, -1], clients=[c])
    recovery_condition(m)
    with pytest.raises(CapacityError):
        recovery_condition(full(22, 0.9, 0.1, 0.1))


def test_satisfied_models_recover_in_simulation():
    n, K = 8, 21
    m = full(n, 0.99, 0.01, 0.01, K=K)
    rep = recovery_condition(m)
    assert rep.satisfied
    trials = 40
    wins = sum(run_pipeline(m, seed).recovered for seed in range(trials))
    assert wins / trials >= 1 - rep.failure_probability_bound


def test_client_signal_coeff_examples():
    sp, sm = client_signal_coeffs(ClientSpec(fov=[(0, 1)], p=0.9, q=0.1, r=0.4))
    assert (sp, sm) == (pytest.approx(0.58), pytest.approx(0.42))
    sp, sm = client_signal_coeffs(ClientSpec(fov=[(0, 1)], p=0.9, q=0.1, r=0.1))
    assert (sp, sm) == (pytest.approx(0.82), pytest.approx(0.18))
    sp, sm = client_signal_coeffs(ClientSpec(fov=[(0, 1)], p=0.9, q=0.1, r=0.5))
    assert sp == pytest.approx(0.5) and sm == pytest.approx(0.5)


def test_impossibility_frozen_values():
    rep = impossibility_condition(ClientSpec(fov=[(0, 1)], p=0.9, q=0.1, r=0.4), 10, fov_size=45)
    assert rep.kl_ratio == pytest.approx(0.0256 / 0.2436, abs=1e-12)
    assert abs(rep.kl_ratio - 0.1051) <= 0.0005
    assert rep.threshold == pytest.approx(1 / 9)
    assert rep.impossible
    kl_max = 0.16 * math.log(58 / 42)
    assert rep.kl_max == pytest.approx(kl_max, rel=1e-12)
    assert rep.fano_bound == pytest.approx(1 - (45 * kl_max + math.log(2)) / (10 * math.log(2)), rel=1e-12)


def test_impossibility_limits():
    spec = ClientSpec(fov=[(0, 1)], p=0.5, q=0.5, r=0.2)
    assert impossibility_condition(spec, 3, fov_size=10**6).impossible
    spec = ClientSpec(fov=[(0, 1)], p=0.9, q=0.1, r=0.1)
    assert not impossibility_condition(spec, 10, fov_size=10**6).impossible
    rep = impossibility_condition(ClientSpec(fov=complete_pairs(range(5)), p=0.9, q=0.1, r=0.1), 5)
    assert rep.fov_size == 10
    with pytest.raises(InputError):
        impossibility_condition(spec, 0, fov_size=4)


def test_kl_bernoulli():
    assert kl_bernoulli(0.3, 0.3) == 0.0
    assert kl_bernoulli(0.0, 0.5) == pytest.approx(math.log(2))
    assert kl_bernoulli(0.5, 0.0) == math.inf
    assert kl_bernoulli(0.58, 0.42) == pytest.approx(kl(0.58, 0.42))


probs = st.floats(0.01, 0.99)


@settings(max_examples=200, deadline=None)
@given(probs, probs, st.floats(0.0, 0.49))
def test_signal_gap_identity_and_kl_bound(a, b, r):
    p, q = max(a, b), min(a, b)
    if p - q < 1e-6:
        return
    spec = ClientSpec(fov=[(0, 1)], p=p, q=q, r=r)
    sp, sm = client_signal_coeffs(spec)
    assert sp - sm == pytest.approx((1 - 2 * r) * (p - q), abs=1e-12)
    assert 0 < sm < sp < 1
    gap2 = (sp - sm) ** 2
    assert kl_bernoulli(sp, sm) <= gap2 / (sm * (1 - sm)) + 1e-12
    assert kl_bernoulli(sm, sp) <= gap2 / (sp * (1 - sp)) + 1e-12


@settings(max_examples=200, deadline=None)
@given(probs, probs, st.floats(0.01, 0.49), st.integers(1, 200), st.integers(1, 5000))
def test_impossibility_invariants(a, b, r, n_k, m):
    p, q = max(a, b), min(a, b)
    rep = impossibility_condition(ClientSpec(fov=[(0, 1)], p=p, q=q, r=r), n_k, fov_size=m)
    assert rep.impossible == (rep.kl_ratio <= n_k / (2 * m))
    assert rep.fano_bound <= 1.0
