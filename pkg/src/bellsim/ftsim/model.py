"""Per-location error rates fed between concatenation levels."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from bellsim.ftsim.circuit import LOCATION_KINDS
from bellsim.loss import gate_teleport_success_prob


@dataclass(frozen=True)
class LocationRates:
    """``located``: heralded failure followed by full depolarization.

    ``x`` and ``z``: independent silent Pauli flips, applied when the
    location is not heralded.
    """

    located: float = 0.0
    x: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for v in (self.located, self.x, self.z):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"rates must lie in [0, 1], got {self}")

    def thresholds(self, online: bool) -> list[float]:
        """Cumulative cut points used by the samplers.

        Offline sections are postselected on heralds, so there the located
        part is dropped and the silent part keeps its conditional rates.
        """
        loc = self.located if online else 0.0
        px, pz = self.x, self.z
        rest = 1.0 - loc
        return [
            loc * 0.25,
            loc * 0.5,
            loc * 0.75,
            loc,
            loc + px * pz * rest,
            loc + px * rest,
            loc + (px + (1.0 - px) * pz) * rest,
        ]


@dataclass(frozen=True)
class ErrorRateVector:
    """Rates for the five location kinds ``PREP, H, CZ, MEM, MX``."""

    prep: LocationRates
    h: LocationRates
    cz: LocationRates
    mem: LocationRates
    mx: LocationRates

    @classmethod
    def uniform(cls, located: float, x: float, z: float) -> "ErrorRateVector":
        r = LocationRates(located, x, z)
        return cls(r, r, r, r, r)

    @classmethod
    def zero(cls) -> "ErrorRateVector":
        return cls.uniform(0.0, 0.0, 0.0)

    def by_kind(self) -> dict[str, LocationRates]:
        return dict(zip(LOCATION_KINDS, (self.prep, self.h, self.cz, self.mem, self.mx)))

    @property
    def memory_z(self) -> float:
        return self.mem.z

    @property
    def gate_fail(self) -> float:
        return self.cz.located

    @property
    def x_rate(self) -> float:
        return self.mem.x

    @property
    def z_rate(self) -> float:
        return self.mem.z

    def is_zero(self) -> bool:
        return all(r == LocationRates() for r in self.by_kind().values())

    def threshold_table(self) -> np.ndarray:
        """Array ``[online, kind, 7]`` of sampler cut points."""
        rows = self.by_kind()
        return np.ascontiguousarray(
            [[rows[k].thresholds(online) for k in LOCATION_KINDS] for online in (False, True)],
            dtype=np.float64,
        )

    def to_dict(self) -> dict:
        return {k: asdict(v) for k, v in self.by_kind().items()}


def level1_error_model(N: int, eta: float) -> ErrorRateVector:
    """Physical-level rates for N-photon GHZ qubits at loss rate ``eta``.

    Memory, preparation and measurement pick up a silent Z with probability
    ``(1 - (1 - eta)^N) / 2``. Hadamard and CZ are gate teleportations that
    fail, detectably, with probability ``1 - P'_s(eta)``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    pz = (1.0 - (1.0 - eta) ** N) / 2.0
    fail = 1.0 - gate_teleport_success_prob(N, eta)
    silent = LocationRates(0.0, 0.0, pz)
    gate = LocationRates(fail, 0.0, 0.0)
    return ErrorRateVector(prep=silent, h=gate, cz=gate, mem=silent, mx=silent)
