import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bellsim.errors import DomainError
from bellsim.loss import (
    Estimate, LossChannel, LossyLogicalQubit, apply_loss, binomial_estimate,
    bm_success_prob_lossy, gate_teleport_success_prob, k_fail_probability, loss_mixture,
    mc_bm_success_lossy, mc_gate_teleport_success,
)

ETA = st.floats(0.0, 1.0)
SMALL_N = st.integers(1, 64)


def test_channel_from_decay():
    assert LossChannel.from_decay(0.0, 5.0).eta == 0.0
    assert LossChannel.from_decay(1.0, math.log(2)).eta == pytest.approx(0.5)
    with pytest.raises(DomainError):
        LossChannel(1.5)
    with pytest.raises(DomainError):
        LossChannel.from_decay(-1.0, 1.0)


def test_lossy_qubit_validation():
    with pytest.raises(ValueError):
        LossyLogicalQubit(1, 0, 5, False, 4)
    with pytest.raises(ValueError):
        LossyLogicalQubit(1, 0, 4, True, 4)
    q = LossyLogicalQubit(0.6, 0.8, 2, True, 4)
    assert q.amplitudes == (0.6, -0.8)
    assert LossyLogicalQubit(1, 0, 0, False, 4).erased


@given(SMALL_N, ETA)
def test_mixture_is_normalized(N, eta):
    mix = loss_mixture(0.6, 0.8, N, eta)
    assert mix.total() == pytest.approx(1.0, abs=1e-12)
    assert len(mix.branches) == (1 if eta == 0 else 2 * N + 1)


def test_mixture_branches_pair_up():
    mix = loss_mixture(1, 0, 3, 0.2)
    w = {(q.n_surviving, q.z_error): p for p, q in mix.branches}
    for k in range(1, 4):
        assert w[(3 - k, False)] == pytest.approx(w[(3 - k, True)])
        assert w[(3 - k, False)] * 2 == pytest.approx(math.comb(3, k) * 0.2**k * 0.8 ** (3 - k))


def test_mixture_rejects_bad_input():
    with pytest.raises(DomainError):
        loss_mixture(1, 0, 0, 0.1)
    with pytest.raises(DomainError):
        loss_mixture(1, 0, 2, -0.1)


def test_apply_loss_statistics():
    rng = np.random.default_rng(9)
    N, eta, n = 6, 0.2, 40_000
    lost, z, lossy = 0, 0, 0
    for _ in range(n):
        q = apply_loss(LossyLogicalQubit(1, 0, N, False, N), eta, rng)
        lost += N - q.n_surviving
        if q.n_surviving < N:
            lossy += 1
            z += q.z_error
    assert abs(lost / n - N * eta) < 4 * math.sqrt(N * eta * (1 - eta) / n)
    assert abs(z / lossy - 0.5) < 4 * math.sqrt(0.25 / lossy)


def test_apply_loss_on_erased_qubit_is_a_no_op():
    q = LossyLogicalQubit(1, 0, 0, True, 3)
    assert apply_loss(q, 0.9, np.random.default_rng(0)) == q


@pytest.mark.parametrize("N", [1, 2, 4, 8, 16, 80])
def test_boundaries(N):
    assert bm_success_prob_lossy(N, 0.0) == 1 - 2.0**-N
    assert bm_success_prob_lossy(N, 1.0) == 0.0
    assert gate_teleport_success_prob(N, 0.0) == 1 - 2.0**-N
    assert gate_teleport_success_prob(N, 1.0) == 0.0


@given(SMALL_N, ETA, ETA)
def test_success_falls_with_loss(N, e1, e2):
    lo, hi = sorted((e1, e2))
    assert bm_success_prob_lossy(N, hi) <= bm_success_prob_lossy(N, lo) + 1e-15
    assert gate_teleport_success_prob(N, hi) <= gate_teleport_success_prob(N, lo) + 1e-15


@given(st.integers(1, 63), ETA)
def test_success_grows_with_photons(N, eta):
    assert bm_success_prob_lossy(N + 1, eta) >= bm_success_prob_lossy(N, eta) - 1e-15


@given(SMALL_N, ETA)
def test_one_sided_loss_dominates(N, eta):
    assert gate_teleport_success_prob(N, eta) >= bm_success_prob_lossy(N, eta) - 1e-15


@given(st.integers(1, 40), ETA)
def test_decomposition_by_failed_pairs(N, eta):
    # k damaged pairs leave N - k pairs, each revealing the state half the time
    probs = [k_fail_probability(N, k, eta) for k in range(N + 1)]
    assert math.fsum(probs) == pytest.approx(1.0, abs=1e-12)
    total = math.fsum(p * (1 - 2.0 ** -(N - k)) for k, p in enumerate(probs))
    assert total == pytest.approx(bm_success_prob_lossy(N, eta), abs=1e-12)


def test_rejects_bad_eta():
    with pytest.raises(DomainError):
        bm_success_prob_lossy(4, 1.1)
    with pytest.raises(DomainError):
        mc_bm_success_lossy(4, 0.1, 0, 1)


@pytest.mark.parametrize("N", [1, 4, 16])
@pytest.mark.parametrize("eta", [0.0, 0.1, 0.3])
def test_monte_carlo_matches_closed_forms(N, eta):
    a = mc_bm_success_lossy(N, eta, 50_000, 2)
    b = mc_gate_teleport_success(N, eta, 50_000, 2)
    assert a.within(bm_success_prob_lossy(N, eta))
    assert b.within(gate_teleport_success_prob(N, eta))


def test_monte_carlo_is_reproducible_and_seeded():
    assert mc_bm_success_lossy(4, 0.1, 10_000, 1) == mc_bm_success_lossy(4, 0.1, 10_000, 1)
    assert mc_bm_success_lossy(4, 0.1, 10_000, 1) != mc_bm_success_lossy(4, 0.1, 10_000, 2)


def test_monte_carlo_chunking_is_invisible():
    from bellsim.loss import _mc

    a = _mc(4, 0.2, 10_000, 3, True, 0x10551, chunk=1000)
    b = _mc(4, 0.2, 10_000, 3, True, 0x10551)
    assert a == b


def test_estimates():
    e = binomial_estimate(50, 100)
    assert e.value == 0.5 and e.stderr == pytest.approx(0.05)
    assert Estimate(1.0, 0.0, 10).within(1.0)
    assert not Estimate(0.99, 0.01, 100).within(1.0)
    # no failures in 1000 trials is unremarkable when one is expected
    assert Estimate(1.0, 0.0, 1000).within(0.999)
    assert not Estimate(1.0, 0.0, 10**6).within(0.99)
