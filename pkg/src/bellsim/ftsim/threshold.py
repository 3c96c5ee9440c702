"""Threshold search over the loss rate by concatenated Monte Carlo."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from bellsim.errors import NoContraction
from bellsim.ftsim.circuit import Circuit, default_circuit
from bellsim.ftsim.engine import LevelResult, simulate_level
from bellsim.ftsim.model import level1_error_model

ETA_FLOOR = 1e-5
ETA_CEIL = 5e-2
TOLERANCE = 5e-5
DEFAULT_TRIALS = 100_000
#: a level whose total rate exceeds this is treated as diverged
DIVERGED = 0.5


@dataclass(frozen=True)
class ThresholdResult:
    N: int
    eta_threshold: float
    levels_checked: int
    trials_per_level: int
    seed: int
    contraction_curve: list[float]
    bracket: tuple[float, float]
    divergence_curve: list[float] = field(default_factory=list)
    probes: list[tuple[float, bool]] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bracket"] = list(self.bracket)
        d["probes"] = [list(p) for p in self.probes]
        return d


def level_curve(N: int, eta: float, levels: int, trials: int, seed: int,
                circuit: Circuit | None = None, **kw) -> list[LevelResult]:
    """Output rates of each concatenation level, stopping early on divergence."""
    circuit = circuit or default_circuit()
    rates = level1_error_model(N, eta)
    out = []
    for lv in range(levels):
        res = simulate_level(rates, circuit, trials, seed, lv, **kw)
        out.append(res)
        if res.total > DIVERGED:
            break
        rates = res.next_rates()
    return out


def contracts(totals: list[float], levels: int) -> bool:
    """Strict decrease level over level; a rate that has reached zero may stay there."""
    if len(totals) < levels:
        return False
    for prev, cur in zip(totals, totals[1:]):
        if not (cur < prev or cur == prev == 0.0):
            return False
    return True


def find_threshold(
    N: int,
    levels: int = 4,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    *,
    tol: float = TOLERANCE,
    circuit: Circuit | None = None,
    **kw,
) -> ThresholdResult:
    """Largest probed loss rate at which the per-level rates still contract.

    Bisects in log(eta) between ``ETA_FLOOR`` and ``ETA_CEIL`` until the
    bracket is narrower than ``tol``. The same random streams are reused at
    every probe, so the result depends only on the arguments.
    """
    if levels < 3:
        raise ValueError("levels must be at least 3")
    if trials < 1:
        raise ValueError("trials must be positive")
    circuit = circuit or default_circuit()
    probes: list[tuple[float, bool]] = []

    def probe(eta):
        totals = [r.total for r in level_curve(N, eta, levels, trials, seed, circuit, **kw)]
        ok = contracts(totals, levels)
        probes.append((eta, ok))
        return ok, totals

    ok, lo_curve = probe(ETA_FLOOR)
    if not ok:
        raise NoContraction(f"N={N}: rates do not contract even at eta={ETA_FLOOR:g}: {lo_curve}")
    lo, hi = ETA_FLOOR, ETA_CEIL
    ok, hi_curve = probe(hi)
    if ok:
        lo, lo_curve = hi, hi_curve
    else:
        while hi - lo > tol:
            mid = math.sqrt(lo * hi)
            ok, curve = probe(mid)
            if ok:
                lo, lo_curve = mid, curve
            else:
                hi, hi_curve = mid, curve
    return ThresholdResult(
        N=N,
        eta_threshold=lo,
        levels_checked=levels,
        trials_per_level=trials,
        seed=seed,
        contraction_curve=lo_curve,
        bracket=(lo, hi),
        divergence_curve=hi_curve,
        probes=probes,
    )
