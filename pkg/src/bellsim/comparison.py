"""Bell-measurement success probability against mean photon number.

Closed forms for the GHZ-encoded scheme and for competing linear-optics
proposals, plus the table behind the comparison figure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from bellsim.errors import DomainError

ZAIDI_R = 0.6585
ZAIDI_PS = 0.643
SCHEMES = ("ours", "ewert_parity_m2", "grice", "ewert_ancilla", "coherent", "hybrid", "zaidi")


def _positive(nbar):
    if nbar <= 0:
        raise DomainError(f"nbar must be positive, got {nbar}")


def ps_ours(nbar: float) -> float:
    _positive(nbar)
    return 1.0 - 2.0 ** (-nbar / 2.0)


def ps_grice(nbar: float) -> float:
    _positive(nbar)
    return 1.0 - 1.0 / nbar


def ps_ewert_ancilla(nbar: float) -> float:
    _positive(nbar)
    return 1.0 - 2.0 ** (-nbar / 4.0 - 0.5)


def ps_ewert_parity(nbar: float, m: int) -> float:
    _positive(nbar)
    if m < 1:
        raise DomainError("m must be at least 1")
    return 1.0 - 2.0 ** (-nbar / (2.0 * m))


def ps_hybrid(nbar: float) -> float:
    if nbar < 2:
        raise DomainError("the hybrid scheme needs nbar >= 2")
    return 1.0 - math.exp(-nbar + 2.0) / 2.0


def zaidi_nbar(r: float) -> float:
    """Photons in two squeezed single-photon qubits."""
    if r < 0:
        raise DomainError("squeezing must be nonnegative")
    return 2.0 * math.cosh(2.0 * r) + 4.0 * math.sinh(r) ** 2


def zaidi_point(r: float = ZAIDI_R) -> tuple[float, float | None]:
    """``(nbar, ps)``; the success probability is only known at the optimum."""
    ps = ZAIDI_PS if r == ZAIDI_R else None
    return zaidi_nbar(r), ps


def coherent_nbar(alpha: float) -> float:
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    a2 = alpha * alpha
    e2, e4 = math.exp(-2 * a2), math.exp(-4 * a2)
    return a2 * ((1 - e2) / (1 + e4) + (1 + e2) / (-math.expm1(-4 * a2)))


def coherent_ps(alpha: float) -> float:
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    return 1.0 - 1.0 / (2.0 * math.cosh(2.0 * alpha * alpha))


def coherent_scheme(alpha: float) -> tuple[float, float]:
    return coherent_nbar(alpha), coherent_ps(alpha)


def coherent_alpha_for(nbar: float) -> float:
    """Invert the mean photon number, which grows monotonically in alpha."""
    lo, hi = 1e-6, 10.0
    if not coherent_nbar(lo) < nbar < coherent_nbar(hi):
        raise DomainError(f"nbar={nbar} outside the coherent-state range")
    return brentq(lambda a: coherent_nbar(a) - nbar, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


@dataclass(frozen=True)
class SchemeCurvePoint:
    scheme: str
    nbar: float
    ps: float
    is_physical_point: bool


def _on_lattice(x: float, step: float, offset: float = 0.0) -> bool:
    k = (x - offset) / step
    return k >= 0 and abs(k - round(k)) < 1e-9


def _is_power_of_two(x: float) -> bool:
    k = math.log2(x) if x > 0 else -1
    return k >= 0 and abs(k - round(k)) < 1e-9


def generate_figure2(nbar_grid) -> list[SchemeCurvePoint]:
    """All curves on ``nbar_grid`` followed by the single squeezing point."""
    grid = [float(x) for x in nbar_grid]
    if any(not 2.0 <= x <= 20.0 for x in grid):
        raise DomainError("grid must lie within [2, 20]")
    out = []
    for x in grid:
        out += [
            SchemeCurvePoint("ours", x, ps_ours(x), _on_lattice(x, 2.0)),
            SchemeCurvePoint("ewert_parity_m2", x, ps_ewert_parity(x, 2), _on_lattice(x, 4.0)),
            SchemeCurvePoint("grice", x, ps_grice(x), _is_power_of_two(x)),
            SchemeCurvePoint("ewert_ancilla", x, ps_ewert_ancilla(x), _on_lattice(x, 4.0, 2.0)),
            SchemeCurvePoint("coherent", x, coherent_ps(coherent_alpha_for(x)), True),
            SchemeCurvePoint("hybrid", x, ps_hybrid(x), True),
        ]
    n, ps = zaidi_point()
    out.append(SchemeCurvePoint("zaidi", n, ps, True))
    return out
