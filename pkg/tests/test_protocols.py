import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellsim import protocols as P
from bellsim.errors import DomainError
from bellsim.loss import bm_success_prob_lossy, gate_teleport_success_prob
from bellsim.photonic import Bell

ANGLES = st.floats(0, math.pi)
PHASES = st.floats(0, 2 * math.pi)


def _qubit(theta, phi, N=1):
    return P.LogicalQubitState(math.cos(theta / 2), cmath.exp(1j * phi) * math.sin(theta / 2), N)


def _random_qubits(seed, count, N):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield P.LogicalQubitState.from_vector(rng.normal(size=2) + 1j * rng.normal(size=2), N)


def _same_ray(u, v, tol=1e-12):
    u, v = np.asarray(u).reshape(-1), np.asarray(v).reshape(-1)
    return abs(abs(np.vdot(u, v)) ** 2 - 1.0) < tol


def test_state_validation():
    with pytest.raises(DomainError):
        P.LogicalQubitState(1, 1, 2)
    with pytest.raises(DomainError):
        P.LogicalQubitState(1, 0, 0)


@settings(max_examples=40)
@given(ANGLES, PHASES, st.integers(1, 6))
def test_pauli_x_flips_every_photon(theta, phi, N):
    q = _qubit(theta, phi, N)
    vec = q.expand()
    for k in range(N):
        vec = P.apply_to_photon(vec, P.PHOTON_FLIP, k, N)
    assert np.allclose(vec, P.pauli_x(q).expand(), atol=1e-12)


@settings(max_examples=40)
@given(ANGLES, PHASES, PHASES, st.integers(1, 6), st.data())
def test_z_rotation_touches_one_photon(theta, phi, alpha, N, data):
    q = _qubit(theta, phi, N)
    k = data.draw(st.integers(0, N - 1))
    vec = P.apply_to_photon(q.expand(), P.photon_phase(alpha), k, N)
    assert np.allclose(vec, P.z_rotation(q, alpha).expand(), atol=1e-12)


@given(ANGLES, PHASES, PHASES, PHASES)
def test_z_rotations_compose(theta, phi, a, b):
    q = _qubit(theta, phi, 3)
    two = P.z_rotation(P.z_rotation(q, a), b)
    assert _same_ray(two.vector, P.z_rotation(q, a + b).vector)


@given(ANGLES, PHASES)
def test_pauli_x_is_an_involution(theta, phi):
    q = _qubit(theta, phi, 2)
    assert P.pauli_x(P.pauli_x(q)) == q


def test_expansion_limit():
    with pytest.raises(DomainError):
        P.photon_expansion(1, 0, P.MAX_EXPANSION_N + 1)


def test_photon_expansion_is_ghz():
    v = P.photon_expansion(1, 0, 3)
    assert np.allclose(v, np.full(8, 8 ** -0.5))
    r = 2 ** -0.5
    assert np.linalg.norm(P.photon_expansion(r, r, 5)) == pytest.approx(1.0)


def test_correction_table():
    assert np.allclose(P.CORRECTIONS[Bell.PHI_PLUS].matrix, P.I2)
    assert np.allclose(P.CORRECTIONS[Bell.PHI_MINUS].matrix, P.Z)
    assert np.allclose(P.CORRECTIONS[Bell.PSI_PLUS].matrix, P.X)
    assert np.allclose(P.CORRECTIONS[Bell.PSI_MINUS].matrix, P.Z @ P.X)


@pytest.mark.parametrize("theta", np.linspace(0, math.pi, 9))
@pytest.mark.parametrize("phi", np.linspace(0, 2 * math.pi, 9))
def test_every_outcome_is_correctable(theta, phi):
    # dense grid of inputs, every Bell outcome, teleport and Hadamard channels
    q = _qubit(theta, phi)
    for resource, gate in ((P.teleportation_channel(), P.I2), (P.z_resource(), P.HADAMARD)):
        state = np.tensordot(q.vector, resource, axes=0)
        for bell in Bell:
            out = P._project(state, 0, 1, bell)
            assert np.linalg.norm(out) ** 2 == pytest.approx(0.25)
            (fix,) = P.conjugated_corrections(gate, [bell])
            assert _same_ray(fix.matrix @ out / np.linalg.norm(out), gate @ q.vector)


def test_cz_corrections_cover_all_outcomes():
    rng = np.random.default_rng(4)
    for b1 in Bell:
        for b2 in Bell:
            q1, q2 = _random_qubits(int(rng.integers(1 << 30)), 2, 1)
            joint = np.tensordot(np.outer(q1.vector, q2.vector), P.z_prime_resource(), axes=0)
            rest = P._project(joint, 0, 2, b1)
            out = P._project(rest, 0, 2, b2).reshape(-1)
            fixes = P.conjugated_corrections(P.CZ, [b1, b2])
            fixed = np.kron(fixes[0].matrix, fixes[1].matrix) @ out
            assert _same_ray(fixed / np.linalg.norm(fixed), P.CZ @ np.kron(q1.vector, q2.vector))


def test_teleportation_fidelity():
    rng = np.random.default_rng(0)
    done = 0
    for q in _random_qubits(1, 100, 4):
        r = P.teleport(q, 0.0, rng)
        if r.success:
            done += 1
            assert abs(r.output.fidelity(q) - 1.0) < 1e-12
            assert r.n_surviving == 4
    assert done > 80


def test_hadamard_matches_oracle():
    rng = np.random.default_rng(1)
    for q in _random_qubits(2, 100, 3):
        r = P.hadamard_via_teleport(q, 0.0, rng)
        if r.success:
            assert abs(r.output.fidelity(P.HADAMARD @ q.vector) - 1.0) < 1e-12


def test_cz_matches_oracle():
    rng = np.random.default_rng(2)
    qs = list(_random_qubits(3, 200, 3))
    for q1, q2 in zip(qs[::2], qs[1::2]):
        r = P.cz_via_teleport(q1, q2, 0.0, rng)
        if r.success:
            want = P.CZ @ np.kron(q1.vector, q2.vector)
            assert abs(abs(np.vdot(want, r.output)) ** 2 - 1.0) < 1e-12
            assert len(r.corrections) == 2


def test_hadamard_twice_is_identity():
    rng = np.random.default_rng(3)
    for q in _random_qubits(4, 30, 2):
        r1 = P.hadamard_via_teleport(q, 0.0, rng)
        if not r1.success:
            continue
        r2 = P.hadamard_via_teleport(r1.output, 0.0, rng)
        if r2.success:
            assert abs(r2.output.fidelity(q) - 1.0) < 1e-12


def test_cz_is_symmetric():
    assert np.allclose(P.z_prime_resource(), P.z_prime_resource().transpose(2, 3, 0, 1))


def test_cz_needs_matching_codes():
    a, b = _qubit(0.3, 0.1, 2), _qubit(0.3, 0.1, 3)
    with pytest.raises(DomainError):
        P.cz_via_teleport(a, b, 0.0, np.random.default_rng(0))


def test_failure_reports_no_output():
    rng = np.random.default_rng(5)
    q = _qubit(1.0, 0.5, 1)
    results = [P.teleport(q, 0.0, rng) for _ in range(200)]
    fails = [r for r in results if not r.success]
    assert fails and all(r.output is None and r.n_surviving == 0 for r in fails)


def test_bad_eta():
    with pytest.raises(DomainError):
        P.teleport(_qubit(0, 0), 1.5, np.random.default_rng(0))
    with pytest.raises(DomainError):
        P.success_rate("teleport", 2, -0.1, 10, 0)


def test_sampled_teleport_rate():
    rng = np.random.default_rng(11)
    N, eta, n = 2, 0.1, 20_000
    q = _qubit(1.1, 0.2, N)
    hits = sum(P.teleport(q, eta, rng).success for _ in range(n))
    p = bm_success_prob_lossy(N, eta)
    assert abs(hits / n - p) < 4 * math.sqrt(p * (1 - p) / n)


@pytest.mark.parametrize("N", [1, 2, 4, 8])
@pytest.mark.parametrize("eta", [0.0, 0.05, 0.1])
def test_success_rates_match_closed_forms(N, eta):
    p1 = gate_teleport_success_prob(N, eta)
    assert P.success_rate("teleport", N, eta, 100_000, 1).within(bm_success_prob_lossy(N, eta))
    assert P.success_rate("hadamard", N, eta, 100_000, 1).within(p1)
    assert P.success_rate("cz", N, eta, 100_000, 1).within(p1 * p1)


def test_success_rate_is_reproducible():
    a = P.success_rate("cz", 3, 0.05, 20_000, 9)
    assert a == P.success_rate("cz", 3, 0.05, 20_000, 9)
    assert a == P.success_rate("cz", 3, 0.05, 20_000, 9, chunk=777)


def test_lossless_n4_teleportation():
    est = P.success_rate("teleport", 4, 0.0, 100_000, 0)
    assert est.within(0.9375)
    assert est.value > 0.9


def test_resource_cost():
    assert P.resource_cost(1, 1, 1) == 605
    assert P.resource_cost(0, 0, 0) == 0
    assert P.resource_cost(2, 3, 4) == 2 * 98 + 3 * 343 + 4 * 164
    for bad in ((-1, 0, 0), (0.5, 0, 0)):
        with pytest.raises(DomainError):
            P.resource_cost(*bad)


def test_operation_fractions_sum_to_one():
    assert sum(P.FRACTIONS.values()) == pytest.approx(1.0)
