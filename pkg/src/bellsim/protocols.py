"""Teleportation and gates on GHZ-encoded qubits.

States are tracked at the level of logical amplitudes; the logical Bell
measurement itself is sampled pair by pair so that photon loss enters
exactly as it does in the optics. Pauli X flips every photon between
``|+>`` and ``|->`` and a Z rotation acts on a single photon, so both are
deterministic. Hadamard and CZ are teleported through the offline resources
``|Z> = (|00> + |01> + |10> - |11>)/2`` and
``|Z'> = (|0000> + |0011> + |1100> - |1111>)/2``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from bellsim import _rng
from bellsim.errors import DomainError
from bellsim.logical_bm import FAILURE, LogicalBellLabel, LogicalBmResult, bs_channel, measure_logical_bell
from bellsim.loss import Estimate, binomial_estimate
from bellsim.photonic import FAIL, Bell

MAX_EXPANSION_N = 10
_R2 = 1.0 / math.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * _R2
CZ = np.diag([1, 1, 1, -1]).astype(complex)

#: operation fractions of one telecorrection round
FRACTIONS = {"memory": 0.284, "hadamard": 0.098, "cz": 0.343, "diagonal": 0.164, "x_measurement": 0.111}
#: operations of each kind in one round of roughly a thousand
RESOURCE_WEIGHTS = {"hadamard": 98, "cz": 343, "diagonal": 164}


def photon_expansion(a: complex, b: complex, N: int) -> np.ndarray:
    """``a |+>^N + b |->^N`` in the photon H/V product basis."""
    if N > MAX_EXPANSION_N:
        raise DomainError(f"photon-level expansion limited to N <= {MAX_EXPANSION_N}")
    plus = np.array([_R2, _R2], dtype=complex)
    minus = np.array([_R2, -_R2], dtype=complex)
    p, m = np.ones(1, dtype=complex), np.ones(1, dtype=complex)
    for _ in range(N):
        p, m = np.kron(p, plus), np.kron(m, minus)
    return a * p + b * m


def apply_to_photon(vec: np.ndarray, op: np.ndarray, photon: int, N: int) -> np.ndarray:
    t = np.moveaxis(vec.reshape((2,) * N), photon, 0)
    t = np.tensordot(op, t, axes=([1], [0]))
    return np.moveaxis(t, 0, photon).reshape(-1)


@dataclass(frozen=True)
class LogicalQubitState:
    a: complex
    b: complex
    N: int = 1

    def __post_init__(self):
        if self.N < 1:
            raise DomainError("N must be at least 1")
        n = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(n - 1.0) > 1e-9:
            raise DomainError(f"amplitudes must be normalized, |a|^2+|b|^2 = {n}")

    @classmethod
    def from_vector(cls, v, N: int = 1) -> "LogicalQubitState":
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(complex(v[0]), complex(v[1]), N)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=complex)

    def expand(self) -> np.ndarray:
        return photon_expansion(self.a, self.b, self.N)

    def fidelity(self, other) -> float:
        v = other.vector if isinstance(other, LogicalQubitState) else np.asarray(other, dtype=complex)
        return float(abs(np.vdot(v, self.vector)) ** 2)


def pauli_x(q: LogicalQubitState) -> LogicalQubitState:
    """Flip every photon, ``|+> <-> |->``."""
    return LogicalQubitState(q.b, q.a, q.N)


def z_rotation(q: LogicalQubitState, theta: float) -> LogicalQubitState:
    """Relative phase ``e^{i theta}`` on ``|1_L>``, applied to one photon only."""
    return LogicalQubitState(q.a, cmath.exp(1j * theta) * q.b, q.N)


#: per-photon |+> <-> |-> flip; applied to every photon it is the logical X
PHOTON_FLIP = Z


def photon_phase(theta: float) -> np.ndarray:
    plus = np.array([_R2, _R2], dtype=complex)
    minus = np.array([_R2, -_R2], dtype=complex)
    return np.outer(plus, plus.conj()) + cmath.exp(1j * theta) * np.outer(minus, minus.conj())


# -- logical Bell bookkeeping ----------------------------------------------------

LOGICAL_BELL = {
    Bell.PHI_PLUS: np.array([[1, 0], [0, 1]], dtype=complex) * _R2,
    Bell.PHI_MINUS: np.array([[1, 0], [0, -1]], dtype=complex) * _R2,
    Bell.PSI_PLUS: np.array([[0, 1], [1, 0]], dtype=complex) * _R2,
    Bell.PSI_MINUS: np.array([[0, 1], [-1, 0]], dtype=complex) * _R2,
}
_BELL_ORDER = (Bell.PHI_PLUS, Bell.PHI_MINUS, Bell.PSI_PLUS, Bell.PSI_MINUS)


@dataclass(frozen=True)
class PauliCorrection:
    x: bool = False
    z: bool = False

    @property
    def matrix(self) -> np.ndarray:
        """X first, then Z."""
        return (Z if self.z else I2) @ (X if self.x else I2)


#: outcome of the logical Bell measurement -> frame fix for plain teleportation
CORRECTIONS = {
    Bell.PHI_PLUS: PauliCorrection(False, False),
    Bell.PHI_MINUS: PauliCorrection(False, True),
    Bell.PSI_PLUS: PauliCorrection(True, False),
    Bell.PSI_MINUS: PauliCorrection(True, True),
}


def _proportional(m: np.ndarray, ref: np.ndarray) -> bool:
    k = np.vdot(ref.reshape(-1), m.reshape(-1)) / np.vdot(ref.reshape(-1), ref.reshape(-1))
    return abs(abs(k) - 1.0) < 1e-9 and np.allclose(m, k * ref, atol=1e-9)


def conjugated_corrections(gate: np.ndarray, bells) -> tuple[PauliCorrection, ...]:
    """Per-qubit fixes for ``gate . (sigma_1 x sigma_2 ...)``: the Pauli ``P``
    with ``P gate sigma = gate`` up to phase."""
    n = len(bells)
    frame = np.eye(1, dtype=complex)
    for b in bells:
        frame = np.kron(frame, CORRECTIONS[b].matrix.conj().T)
    target = gate @ frame @ gate.conj().T
    for combo in itertools.product(CORRECTIONS.values(), repeat=n):
        m = np.eye(1, dtype=complex)
        for c in combo:
            m = np.kron(m, c.matrix)
        if _proportional(m, target.conj().T):
            return combo
    raise AssertionError("gate is not Clifford")  # pragma: no cover


def _project(state: np.ndarray, q1: int, q2: int, bell: Bell) -> np.ndarray:
    return np.tensordot(LOGICAL_BELL[bell].conj(), state, axes=([0, 1], [q1, q2]))


def _sample_bell(state: np.ndarray, q1: int, q2: int, rng) -> tuple[Bell, np.ndarray]:
    branches = [_project(state, q1, q2, b) for b in _BELL_ORDER]
    p = np.array([np.vdot(br, br).real for br in branches])
    k = int(rng.choice(4, p=p / p.sum()))
    br = branches[k]
    return _BELL_ORDER[k], br / math.sqrt(p[k])


def _lost_pairs(N: int, eta: float, rng, two_sided: bool):
    lost = rng.random(N) < eta
    if two_sided:
        lost |= rng.random(N) < eta
    return lost


def _loss_flip(N: int, eta: float, rng) -> bool:
    """Z error left behind by losing some photons of a qubit, tracked but not applied."""
    if eta == 0.0:
        return False
    k = int(rng.binomial(N, eta))
    return bool(k and rng.integers(2))


@dataclass(frozen=True)
class GateResult:
    success: bool
    output: object
    corrections: tuple = ()
    measurements: tuple[LogicalBmResult, ...] = ()
    loss_z: bool = False
    n_surviving: int = 0
    raw: np.ndarray | None = field(default=None, repr=False)


def _measure(bell: Bell, N: int, eta: float, rng, two_sided: bool) -> LogicalBmResult:
    label = LogicalBellLabel(bell.family, bell.minus, N)
    return measure_logical_bell(label, rng, _lost_pairs(N, eta, rng, two_sided))


def _check(eta):
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"loss rate must lie in [0, 1], got {eta}")


def teleportation_channel() -> np.ndarray:
    return LOGICAL_BELL[Bell.PHI_PLUS].copy()


def z_resource() -> np.ndarray:
    """``|Z>`` on two logical qubits."""
    return np.array([[1, 1], [1, -1]], dtype=complex) / 2


def z_prime_resource() -> np.ndarray:
    """``|Z'>`` on four logical qubits, ordered as (in1, out1, in2, out2)."""
    t = np.zeros((2,) * 4, dtype=complex)
    for x, y in itertools.product((0, 1), repeat=2):
        t[x, x, y, y] = (-1) ** (x * y) / 2
    return t


def _run_one(q: LogicalQubitState, resource: np.ndarray, gate: np.ndarray, eta, rng, two_sided):
    _check(eta)
    N = q.N
    state = np.tensordot(q.vector, resource, axes=0)
    bell, out = _sample_bell(state, 0, 1, rng)
    meas = _measure(bell, N, eta, rng, two_sided)
    loss_z = _loss_flip(N, eta, rng) ^ (two_sided and _loss_flip(N, eta, rng))
    if not meas.success:
        return GateResult(False, None, (), (meas,), loss_z, 0, None)
    seen = Bell.of(meas.outcome.family, meas.outcome.minus)
    (fix,) = conjugated_corrections(gate, [seen])
    fixed = fix.matrix @ out
    return GateResult(True, LogicalQubitState.from_vector(fixed, N), (fix,), (meas,), loss_z, N, out)


def teleport(q: LogicalQubitState, eta: float, rng: np.random.Generator) -> GateResult:
    """Teleport through ``(|0_L 0_L> + |1_L 1_L>)/sqrt2``; both halves lose photons."""
    return _run_one(q, teleportation_channel(), I2, eta, rng, True)


def hadamard_via_teleport(q: LogicalQubitState, eta: float, rng: np.random.Generator) -> GateResult:
    """Teleport through ``|Z>``; only the input qubit loses photons."""
    return _run_one(q, z_resource(), HADAMARD, eta, rng, False)


def cz_via_teleport(q1: LogicalQubitState, q2: LogicalQubitState, eta: float,
                    rng: np.random.Generator) -> GateResult:
    """Two logical Bell measurements into ``|Z'>``; both must succeed."""
    _check(eta)
    if q1.N != q2.N:
        raise DomainError("both qubits must carry the same number of photons")
    N = q1.N
    joint = np.tensordot(np.outer(q1.vector, q2.vector), z_prime_resource(), axes=0)
    # axes: in q1, in q2, r_in1, r_out1, r_in2, r_out2
    b1, rest = _sample_bell(joint, 0, 2, rng)
    # remaining axes: q2, out1, r_in2, out2
    b2, out = _sample_bell(rest, 0, 2, rng)
    m1 = _measure(b1, N, eta, rng, False)
    m2 = _measure(b2, N, eta, rng, False)
    loss_z = _loss_flip(N, eta, rng) or _loss_flip(N, eta, rng)
    if not (m1.success and m2.success):
        return GateResult(False, None, (), (m1, m2), loss_z, 0, None)
    seen = [Bell.of(m.outcome.family, m.outcome.minus) for m in (m1, m2)]
    fixes = conjugated_corrections(CZ, seen)
    fixed = np.kron(fixes[0].matrix, fixes[1].matrix) @ out.reshape(-1)
    fixed = fixed / np.linalg.norm(fixed)
    return GateResult(True, fixed, fixes, (m1, m2), loss_z, N, out)


def resource_cost(n_h: int, n_cz: int, n_plus: int) -> int:
    """Photon resources consumed by one telecorrection round."""
    for v in (n_h, n_cz, n_plus):
        if int(v) != v or v < 0:
            raise DomainError("resource counts must be nonnegative integers")
    w = RESOURCE_WEIGHTS
    return w["hadamard"] * int(n_h) + w["cz"] * int(n_cz) + w["diagonal"] * int(n_plus)


# -- batched success statistics ---------------------------------------------------

_KINDS = {"teleport": (True, 1, 0x7E1E), "hadamard": (False, 1, 0x4AD), "cz": (False, 2, 0xC2)}


def success_rate(kind: str, N: int, eta: float, trials: int, seed: int, chunk: int = 1 << 16) -> Estimate:
    """Vectorized success frequency of ``teleport``, ``hadamard`` or ``cz``.

    Each logical Bell measurement sees a uniformly random Bell outcome (the
    resources are maximally entangled), random pair signs of the right
    parity, and per-photon loss on the measured qubits.
    """
    _check(eta)
    if trials < 1:
        raise DomainError("trials must be positive")
    two_sided, n_meas, salt = _KINDS[kind]
    channel = bs_channel()
    ok = {b: channel[b] != FAIL for b in Bell}
    width = 1 + 3 * N
    hits = 0
    for t0 in range(0, trials, chunk):
        t1 = min(trials, t0 + chunk)
        u = _rng.uniforms(_rng.stream_keys(seed, np.arange(t0, t1), salt, N), n_meas * width)
        good = np.ones(t1 - t0, dtype=bool)
        for m in range(n_meas):
            v = u[:, m * width:(m + 1) * width]
            bell = np.minimum((v[:, 0] * 4).astype(np.int64), 3)
            free = (v[:, 1:N] < 0.5).astype(np.int64)
            minus_bit = bell & 1
            last = (minus_bit - free.sum(axis=1)) % 2
            signs = np.concatenate([free, last[:, None]], axis=1).astype(bool)
            lost = v[:, N:2 * N] < eta
            if two_sided:
                lost |= v[:, 2 * N:3 * N] < eta
            family = bell >> 1
            seen = np.zeros(t1 - t0, dtype=bool)
            for f, fam in enumerate(("Phi", "Psi")):
                sel = family == f
                pair_ok = np.where(signs[sel], ok[Bell.of(fam, True)], ok[Bell.of(fam, False)])
                seen[sel] = (pair_ok & ~lost[sel]).any(axis=1)
            good &= seen
        hits += int(good.sum())
    return binomial_estimate(hits, trials)

