"""Backend selection and the Monte Carlo driver for one telecorrection level."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from bellsim.ftsim import _kernels_py, codes
from bellsim.ftsim.circuit import Circuit, default_circuit
from bellsim.ftsim.model import ErrorRateVector

try:
    from bellsim.ftsim import _kernels as _kernels_c
except ImportError:  # pragma: no cover - exercised only without a compiler
    _kernels_c = None

BACKENDS = {"python": _kernels_py}
if _kernels_c is not None:
    BACKENDS["cython"] = _kernels_c

#: backend used when none is requested; override with BELLSIM_BACKEND
DEFAULT_BACKEND = os.environ.get("BELLSIM_BACKEND") or ("cython" if _kernels_c else "python")
MAX_ATTEMPTS = 1000
_CHUNK = 4096


def worker_count() -> int:
    cap = os.environ.get("BELLSIM_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def get_backend(name: str | None = None):
    name = name or DEFAULT_BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(BACKENDS)}") from None


@lru_cache(maxsize=1)
def _tables():
    return (
        np.ascontiguousarray(codes.DECODE),
        np.ascontiguousarray(codes.TIE),
        np.ascontiguousarray(codes.SYNDROME),
        np.ascontiguousarray(codes.PARITY),
        np.ascontiguousarray(codes.LEADER),
    )


def run_status(
    circuit: Circuit,
    rates: ErrorRateVector,
    trials: int,
    seed: int,
    level: int = 0,
    *,
    backend: str | None = None,
    workers: int | None = None,
    inject=None,
    max_attempts: int = MAX_ATTEMPTS,
) -> np.ndarray:
    """Per-trial status bits: 1 heralded, 2 logical X, 4 logical Z.

    ``inject`` is a sequence of ``(statement_index, code_first_qubit,
    code_second_qubit)`` faults added after the given locations, with codes
    built from 1 (X), 2 (Z) and 4 (heralded).
    """
    kernel = get_backend(backend)
    ops, blocks, masks = circuit.compile()
    thr = rates.threshold_table()
    dec, tie, syn, par, leader = _tables()
    inj = np.array(inject or [], dtype=np.int64).reshape(-1)
    out = np.zeros(trials, dtype=np.uint8)
    seed &= 0xFFFFFFFFFFFFFFFF

    def work(t0):
        t1 = min(trials, t0 + _CHUNK)
        kernel.run_trials(ops, blocks, masks, thr, dec, tie, syn, par, leader,
                          seed, level, t0, t1, max_attempts, inj, out[t0:t1])

    starts = range(0, trials, _CHUNK)
    n = workers or worker_count()
    if n <= 1 or len(starts) <= 1:
        for t0 in starts:
            work(t0)
    else:
        with ThreadPoolExecutor(n) as pool:
            list(pool.map(work, starts))
    return out


@dataclass(frozen=True)
class LevelResult:
    located: float
    x: float
    z: float
    trials: int

    @property
    def total(self) -> float:
        return self.located + self.x + self.z

    def next_rates(self) -> ErrorRateVector:
        """Rates seen by every location of the next concatenation level."""
        return ErrorRateVector.uniform(self.located, self.x, self.z)


def summarize(status: np.ndarray) -> LevelResult:
    n = len(status)
    her = (status & 1).astype(bool)
    lx = ((status & 2) != 0) & ~her
    lz = ((status & 4) != 0) & ~her
    return LevelResult(her.sum() / n, lx.sum() / n, lz.sum() / n, n)


def simulate_telecorrection(
    rates_in: ErrorRateVector,
    circuit: Circuit | None = None,
    trials: int = 100_000,
    seed: int = 0,
    level: int = 0,
    **kw,
) -> ErrorRateVector:
    """Encoded error rates after one round of telecorrection."""
    return simulate_level(rates_in, circuit, trials, seed, level, **kw).next_rates()


def simulate_level(rates_in, circuit=None, trials=100_000, seed=0, level=0, **kw) -> LevelResult:
    circuit = circuit or default_circuit()
    return summarize(run_status(circuit, rates_in, trials, seed, level, **kw))
