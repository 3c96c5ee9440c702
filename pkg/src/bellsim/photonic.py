"""Two-photon linear optics and the standard polarization Bell analyzer.

Modes are flattened as ``2 * spatial + polarization`` with H = 0 and V = 1.
A two-photon state is a symmetric tensor ``T`` with
``|psi> = sum_ij T_ij a_i^dag a_j^dag |0>``; a mode unitary ``U`` sends it to
``U T U^T``. The Fock amplitude of the pair ``{i, j}`` is ``2 T_ij`` for
``i != j`` and ``sqrt(2) T_ii`` for a bunched pair, so the norm is the plain
sum of squared amplitudes in any basis.

The analyzer: a polarizing beam splitter (PBS) that transmits H and reflects
V combines the two input photons. Each output port then passes a half-wave
plate at 22.5 degrees and a second PBS, so the four on-off detectors resolve
the diagonal polarizations ``+`` and ``-`` at the upper and lower port.
Optional wave plates on the inputs choose which two Bell states are
identified.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from bellsim.errors import DimensionMismatch, InconsistentDevice

H, V = 0, 1
N_SPATIAL = 4
N_MODES = 2 * N_SPATIAL
_R2 = 1.0 / math.sqrt(2.0)
#: vanishing-amplitude tolerance for derived tables
ZERO = 1e-10

KET_H = np.array([1.0, 0.0], dtype=complex)
KET_V = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = np.array([_R2, _R2], dtype=complex)
KET_MINUS = np.array([_R2, -_R2], dtype=complex)


class Bell(str, Enum):
    """Polarization Bell states written in the diagonal ``|+>, |->`` basis."""

    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"
    PSI_PLUS = "PsiPlus"
    PSI_MINUS = "PsiMinus"

    @property
    def family(self) -> str:
        return "Phi" if self in (Bell.PHI_PLUS, Bell.PHI_MINUS) else "Psi"

    @property
    def minus(self) -> bool:
        return self in (Bell.PHI_MINUS, Bell.PSI_MINUS)

    @classmethod
    def of(cls, family: str, minus: bool) -> "Bell":
        return {
            ("Phi", False): cls.PHI_PLUS,
            ("Phi", True): cls.PHI_MINUS,
            ("Psi", False): cls.PSI_PLUS,
            ("Psi", True): cls.PSI_MINUS,
        }[(family, bool(minus))]


FAIL = "Fail"


def bell_matrix(label: Bell) -> np.ndarray:
    """Coefficients ``M[x, y]`` of ``|x>_a |y>_b`` in the H/V basis."""
    d = (KET_PLUS, KET_MINUS)
    s = -1.0 if label.minus else 1.0
    if label.family == "Phi":
        m = np.outer(d[0], d[0]) + s * np.outer(d[1], d[1])
    else:
        m = np.outer(d[0], d[1]) + s * np.outer(d[1], d[0])
    return m * _R2


def mode(spatial: int, pol: int) -> int:
    return 2 * spatial + pol


# -- states -----------------------------------------------------------------

@dataclass(frozen=True)
class TwoPhotonState:
    """Exactly two photons spread over ``n_modes`` modes."""

    tensor: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.tensor, dtype=complex)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise DimensionMismatch("two-photon tensor must be square")
        t = (t + t.T) / 2
        t.setflags(write=False)
        object.__setattr__(self, "tensor", t)

    @property
    def n_modes(self) -> int:
        return self.tensor.shape[0]

    @classmethod
    def from_amplitudes(cls, amplitudes: dict, n_modes: int = N_MODES) -> "TwoPhotonState":
        """Build from Fock amplitudes keyed by mode pairs ``(i, j)``."""
        t = np.zeros((n_modes, n_modes), dtype=complex)
        for (i, j), c in amplitudes.items():
            if i == j:
                t[i, i] += c / math.sqrt(2.0)
            else:
                t[i, j] += c / 2
                t[j, i] += c / 2
        return cls(t)

    @classmethod
    def product(cls, pol_a, pol_b, spatial_a: int = 0, spatial_b: int = 1,
                n_modes: int = N_MODES) -> "TwoPhotonState":
        """One photon per spatial input with the given Jones vectors."""
        return cls.entangled(np.outer(pol_a, pol_b), spatial_a, spatial_b, n_modes)

    @classmethod
    def entangled(cls, coeffs, spatial_a: int = 0, spatial_b: int = 1,
                  n_modes: int = N_MODES) -> "TwoPhotonState":
        """``sum_xy coeffs[x, y] |x>_a |y>_b`` for distinct spatial inputs."""
        if spatial_a == spatial_b:
            raise ValueError("photons must enter through different spatial modes")
        t = np.zeros((n_modes, n_modes), dtype=complex)
        for x, y in itertools.product((H, V), repeat=2):
            i, j = mode(spatial_a, x), mode(spatial_b, y)
            t[i, j] += coeffs[x][y] / 2
            t[j, i] += coeffs[x][y] / 2
        return cls(t)

    @classmethod
    def bell(cls, label: Bell) -> "TwoPhotonState":
        return cls.entangled(bell_matrix(Bell(label)))

    @property
    def amplitudes(self) -> dict[tuple[int, int], complex]:
        """Nonzero Fock amplitudes keyed by ``(i, j)`` with ``i <= j``."""
        out = {}
        t = self.tensor
        for i in range(self.n_modes):
            for j in range(i, self.n_modes):
                c = math.sqrt(2.0) * t[i, i] if i == j else 2 * t[i, j]
                if c != 0:
                    out[(i, j)] = complex(c)
        return out

    def norm(self) -> float:
        return math.fsum(abs(c) ** 2 for c in self.amplitudes.values())


def evolve(state: TwoPhotonState, unitary) -> TwoPhotonState:
    u = np.asarray(unitary, dtype=complex)
    if u.shape != (state.n_modes, state.n_modes):
        raise DimensionMismatch(f"unitary {u.shape} does not act on {state.n_modes} modes")
    return TwoPhotonState(u @ state.tensor @ u.T)


# -- optical elements ---------------------------------------------------------

def beam_splitter(n_modes: int, i: int, j: int, theta: float = math.pi / 4) -> np.ndarray:
    """Lossless splitter mixing modes ``i`` and ``j``; 50:50 by default."""
    u = np.eye(n_modes, dtype=complex)
    c, s = math.cos(theta), math.sin(theta)
    u[i, i], u[i, j], u[j, i], u[j, j] = c, s, s, -c
    return u


def pbs(p: int, q: int, n_spatial: int = N_SPATIAL) -> np.ndarray:
    """PBS between spatial ports ``p`` and ``q``: H passes, V swaps ports."""
    u = np.eye(2 * n_spatial, dtype=complex)
    a, b = mode(p, V), mode(q, V)
    u[[a, b]] = u[[b, a]]
    return u


def plate(spatial: int, jones, n_spatial: int = N_SPATIAL) -> np.ndarray:
    """A 2x2 Jones matrix acting on the polarization of one spatial mode."""
    u = np.eye(2 * n_spatial, dtype=complex)
    k = mode(spatial, H)
    u[k:k + 2, k:k + 2] = jones
    return u


def half_wave_plate(angle: float) -> np.ndarray:
    c, s = math.cos(2 * angle), math.sin(2 * angle)
    return np.array([[c, s], [s, -c]], dtype=complex)


# detectors sit on the four spatial outputs
UPPER = (0, 2)
LOWER = (1, 3)
DETECTOR_LABEL = {0: "+", 1: "+", 2: "-", 3: "-"}

#: identified pairs accepted by :func:`build_bs_network`
TARGET_PAIRS = (
    (Bell.PHI_MINUS, Bell.PSI_MINUS),
    (Bell.PHI_PLUS, Bell.PSI_PLUS),
    (Bell.PHI_MINUS, Bell.PSI_PLUS),
    (Bell.PHI_PLUS, Bell.PSI_MINUS),
)


def _input_plates(first: Bell, second: Bell):
    """Jones matrices for photons a and b that turn ``first`` into
    ``(|HH> - |VV>)/sqrt2`` and ``second`` into ``(|HH> + |VV>)/sqrt2``.

    Both land on separate ports of the first PBS, where the diagonal analysis
    tells them apart. Plates act as ``M -> A M B^T``; ``A`` diagonalizes
    ``M1 M2^-1`` into ``Z`` and ``B^T`` then undoes ``A M2``.
    """
    m1, m2 = bell_matrix(first), bell_matrix(second)
    q = m1 @ np.linalg.inv(m2)
    herm = q / np.sqrt((q @ q)[0, 0])
    _, vecs = np.linalg.eigh((herm + herm.conj().T) / 2)
    a = np.array([vecs[:, 1], vecs[:, 0]]).conj()
    b_t = np.linalg.inv(a @ m2) * _R2
    return a, b_t.T


@dataclass(frozen=True)
class BsNetwork:
    unitary: np.ndarray
    target: tuple[Bell, Bell]


def build_bs_network(target_pair=TARGET_PAIRS[0]) -> BsNetwork:
    """Three PBSs, wave plates and four detectors identifying ``target_pair``."""
    target = tuple(Bell(t) for t in target_pair)
    if target not in TARGET_PAIRS:
        raise ValueError(f"unsupported target pair {target_pair!r}")
    a, b = _input_plates(*target)
    hwp = half_wave_plate(math.pi / 8)
    u = pbs(0, 1) @ plate(1, b) @ plate(0, a)
    u = plate(0, hwp) @ plate(1, hwp) @ u
    u = pbs(0, 2) @ pbs(1, 3) @ u
    return BsNetwork(u, target)


# -- detection ------------------------------------------------------------------

def detector_of(m: int) -> int:
    return m // 2


def click_distribution(state: TwoPhotonState) -> dict[frozenset, float]:
    """On-off click patterns and their probabilities."""
    out: dict[frozenset, float] = {}
    for (i, j), c in state.amplitudes.items():
        p = abs(c) ** 2
        if p == 0.0:
            continue
        key = frozenset((detector_of(i), detector_of(j)))
        out[key] = out.get(key, 0.0) + p
    return out


def _pattern_key(pattern: frozenset) -> tuple:
    return tuple(sorted(pattern))


@dataclass(frozen=True)
class BsOutcome:
    label: str
    pattern: frozenset


@dataclass(frozen=True)
class BsOutcomeTable:
    """Click pattern -> declared outcome, with the per-Bell-state probabilities."""

    labels: dict
    probabilities: dict
    target: tuple

    def outcome(self, pattern) -> str:
        return self.labels.get(frozenset(pattern), FAIL)

    def success_probability(self, bell: Bell) -> float:
        bell = Bell(bell)
        return math.fsum(
            p.get(bell, 0.0) for pat, p in self.probabilities.items() if self.labels[pat] == bell.value
        )

    def patterns(self) -> list[frozenset]:
        return sorted(self.labels, key=_pattern_key)

    def channel(self) -> dict[Bell, str]:
        """Deterministic Bell-state -> outcome map (every state succeeds or fails surely)."""
        out = {}
        for bell in Bell:
            s = self.success_probability(bell)
            if abs(s - 1.0) < ZERO:
                out[bell] = bell.value
            elif s < ZERO:
                out[bell] = FAIL
            else:
                raise InconsistentDevice(f"{bell.value} succeeds with probability {s}")
        return out

    def to_dict(self) -> dict:
        return {
            "target": [t.value for t in self.target],
            "patterns": [
                {
                    "clicked": list(_pattern_key(pat)),
                    "label": self.labels[pat],
                    "probabilities": {b.value: self.probabilities[pat].get(b, 0.0) for b in Bell},
                }
                for pat in self.patterns()
            ],
        }


def derive_bs_table(network: BsNetwork | None = None) -> BsOutcomeTable:
    """Label each reachable pattern by the Bell states that can produce it."""
    network = network or build_bs_network()
    probs: dict[frozenset, dict] = {}
    for bell in Bell:
        out = evolve(TwoPhotonState.bell(bell), network.unitary)
        for pat, p in click_distribution(out).items():
            if p > ZERO:
                probs.setdefault(pat, {})[bell] = p
    labels = {}
    others = [b for b in Bell if b not in network.target]
    for pat, by_state in probs.items():
        sources = set(by_state)
        hit = [b for b in others if b in sources]
        if len(hit) == 1 and len(sources) == 1:
            raise InconsistentDevice(f"pattern {sorted(pat)} singles out {hit[0].value}")
        labels[pat] = next(iter(sources)).value if len(sources) == 1 else FAIL
    return BsOutcomeTable(labels, probs, network.target)


@lru_cache(maxsize=None)
def standard_table() -> BsOutcomeTable:
    """Table of the analyzer that identifies ``PhiMinus`` and ``PsiMinus``."""
    return derive_bs_table(build_bs_network(TARGET_PAIRS[0]))


def simulate_bs(state, rng: np.random.Generator, table: BsOutcomeTable | None = None,
                shots: int | None = None):
    """Sample click patterns for ``state`` (a TwoPhotonState or Bell label).

    Returns one :class:`BsOutcome`, or a list of ``shots`` outcomes.
    """
    table = table or standard_table()
    if not isinstance(state, TwoPhotonState):
        state = TwoPhotonState.bell(Bell(state))
    network = _network(table.target)
    dist = click_distribution(evolve(state, network.unitary))
    pats = sorted(dist, key=_pattern_key)
    p = np.array([dist[k] for k in pats])
    picks = rng.choice(len(pats), size=shots or 1, p=p / p.sum())
    out = [BsOutcome(table.outcome(pats[k]), pats[k]) for k in picks.tolist()]
    return out if shots is not None else out[0]


@lru_cache(maxsize=None)
def _network(target) -> BsNetwork:
    return build_bs_network(target)
