"""Photon loss on GHZ-encoded logical qubits.

Every photon is lost independently with probability ``eta``. Losing ``k``
photons of an N-photon qubit leaves an (N - k)-photon GHZ qubit that carries
a logical Z error with probability 1/2. All photons lost means the qubit is
gone and any measurement on it fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bellsim import _rng
from bellsim.errors import DomainError


def _check_eta(eta: float) -> None:
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"loss rate must lie in [0, 1], got {eta}")


@dataclass(frozen=True)
class LossChannel:
    eta: float

    def __post_init__(self):
        _check_eta(self.eta)

    @classmethod
    def from_decay(cls, gamma: float, t: float) -> "LossChannel":
        """Loss rate after time ``t`` at decay constant ``gamma``."""
        if gamma < 0 or t < 0:
            raise DomainError("gamma and t must be nonnegative")
        return cls(1.0 - math.exp(-gamma * t))


@dataclass(frozen=True)
class LossyLogicalQubit:
    a: complex
    b: complex
    n_surviving: int
    z_error: bool
    N: int

    def __post_init__(self):
        if not 0 <= self.n_surviving <= self.N:
            raise ValueError("n_surviving must lie in [0, N]")
        if self.z_error and self.n_surviving == self.N:
            raise ValueError("a Z error requires at least one lost photon")

    @property
    def erased(self) -> bool:
        return self.n_surviving == 0

    @property
    def amplitudes(self) -> tuple[complex, complex]:
        """Logical amplitudes with the Z frame applied."""
        return (self.a, -self.b) if self.z_error else (self.a, self.b)


@dataclass(frozen=True)
class LossMixture:
    branches: tuple[tuple[float, LossyLogicalQubit], ...]

    def total(self) -> float:
        return math.fsum(p for p, _ in self.branches)


def loss_mixture(a: complex, b: complex, N: int, eta: float) -> LossMixture:
    """All 2N + 1 branches: intact, then k = 1..N losses with and without a Z error."""
    _check_eta(eta)
    if N < 1:
        raise DomainError("N must be at least 1")
    branches = [((1.0 - eta) ** N, LossyLogicalQubit(a, b, N, False, N))]
    if eta == 0.0:
        return LossMixture(tuple(branches))
    for k in range(1, N + 1):
        w = math.comb(N, k) * (1.0 - eta) ** (N - k) * eta**k
        for z in (False, True):
            branches.append((w / 2, LossyLogicalQubit(a, b, N - k, z, N)))
    return LossMixture(tuple(branches))


def apply_loss(qubit: LossyLogicalQubit, eta: float, rng: np.random.Generator) -> LossyLogicalQubit:
    """Sample one branch of the loss channel acting on the surviving photons."""
    _check_eta(eta)
    lost = int(rng.binomial(qubit.n_surviving, eta)) if qubit.n_surviving else 0
    if lost == 0:
        return qubit
    z = qubit.z_error ^ bool(rng.integers(2))
    return LossyLogicalQubit(qubit.a, qubit.b, qubit.n_surviving - lost, z, qubit.N)


def bm_success_prob_lossy(N: int, eta: float) -> float:
    """Logical Bell measurement success when both qubits suffer loss."""
    _check_eta(eta)
    return 1.0 - ((1.0 + eta * (2.0 - eta)) / 2.0) ** N


def gate_teleport_success_prob(N: int, eta: float) -> float:
    """Success of a gate teleportation whose offline resource is lossless."""
    _check_eta(eta)
    return 1.0 - ((1.0 + eta) / 2.0) ** N


def k_fail_probability(N: int, k: int, eta: float) -> float:
    """Probability that exactly ``k`` photon pairs lose at least one photon."""
    return math.comb(N, k) * (1 - eta) ** (2 * (N - k)) * eta**k * (2 - eta) ** k


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    trials: int

    def within(self, target: float, sigmas: float = 4.0) -> bool:
        """Binomial test against ``target``, using the spread expected under it.

        The sample spread vanishes when no failure shows up, which happens
        often for targets a hair below 1; a target of exactly 0 or 1 still
        has to be hit exactly.
        """
        sd = math.sqrt(target * (1.0 - target) / self.trials)
        return abs(self.value - target) <= sigmas * sd


def binomial_estimate(successes: int, trials: int) -> Estimate:
    p = successes / trials
    return Estimate(p, math.sqrt(p * (1 - p) / trials), trials)


def _lossy_bm_successes(N, eta, seed, t0, t1, two_sided, salt):
    """Count successes for trials ``t0 <= t < t1``.

    A uniformly random logical Bell state is expanded into pairwise labels:
    N - 1 free signs plus one fixed by the logical sign. A pair is detectable
    when both photons survive and its label carries a minus sign.
    """
    trials = np.arange(t0, t1)
    u = _rng.uniforms(_rng.stream_keys(seed, trials, salt), 3 * N + 1)
    lost = u[:, :N] < eta
    if two_sided:
        lost |= u[:, N:2 * N] < eta
    signs = (u[:, 2 * N:3 * N - 1] < 0.5).astype(np.int64)
    logical_minus = (u[:, 3 * N] < 0.5).astype(np.int64)
    last = (logical_minus - signs.sum(axis=1)) % 2
    minus = np.concatenate([signs, last[:, None]], axis=1).astype(bool)
    return int(np.count_nonzero((minus & ~lost).any(axis=1)))


def _mc(N, eta, trials, seed, two_sided, salt, chunk=1 << 16):
    _check_eta(eta)
    if trials < 1:
        raise DomainError("trials must be positive")
    hits = 0
    for t0 in range(0, trials, chunk):
        hits += _lossy_bm_successes(N, eta, seed, t0, min(trials, t0 + chunk), two_sided, salt)
    return binomial_estimate(hits, trials)


def mc_bm_success_lossy(N: int, eta: float, trials: int, seed: int) -> Estimate:
    """Monte Carlo estimate of :func:`bm_success_prob_lossy`."""
    return _mc(N, eta, trials, seed, True, 0x10551)


def mc_gate_teleport_success(N: int, eta: float, trials: int, seed: int) -> Estimate:
    """Monte Carlo estimate of :func:`gate_teleport_success_prob` (input-side loss only)."""
    return _mc(N, eta, trials, seed, False, 0x10552)
