"""Logical Bell measurement on N-photon GHZ qubits.

With ``|0_L> = |+>^N`` and ``|1_L> = |->^N`` every logical Bell state is an
equal-weight superposition of products of N photon-pair Bell states of one
family. A ``Phi`` state contains only ``Phi+``/``Phi-`` pairs, a ``Psi``
state only ``Psi+``/``Psi-`` pairs, and the number of minus pairs is even
for the plus sign and odd for the minus sign. Running the standard analyzer
on every pair reveals each minus pair, so any single success fixes the
family and the parity of the success count fixes the sign.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from bellsim import _rng
from bellsim.errors import InconsistentRun, ResourceBoundError
from bellsim.loss import Estimate, binomial_estimate
from bellsim.photonic import FAIL, Bell, standard_table

MAX_EXPAND_N = 20
FAILURE = "Failure"
FAMILIES = ("Phi", "Psi")
_SALT = 0xB311


@dataclass(frozen=True)
class LogicalBellLabel:
    family: str
    minus: bool
    N: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be Phi or Psi, got {self.family!r}")
        if self.N < 1:
            raise ValueError("N must be at least 1")
        object.__setattr__(self, "minus", bool(self.minus))

    @property
    def sign(self) -> str:
        return "Minus" if self.minus else "Plus"

    def pair(self, minus: bool) -> Bell:
        return Bell.of(self.family, minus)

    def __str__(self) -> str:
        return f"{self.family}{'-' if self.minus else '+'}(N={self.N})"


def all_labels(N: int) -> list[LogicalBellLabel]:
    return [LogicalBellLabel(f, m, N) for f in FAMILIES for m in (False, True)]


@dataclass(frozen=True)
class PairwiseDecomposition:
    label: LogicalBellLabel
    terms: tuple[tuple[float, tuple[Bell, ...]], ...]


def _sign_masks(N: int, minus: bool) -> np.ndarray:
    masks = np.arange(1 << N, dtype=np.int64)
    parity = np.zeros_like(masks)
    for i in range(N):
        parity ^= (masks >> i) & 1
    return masks[parity == int(minus)]


def expand_logical_bell(label: LogicalBellLabel) -> PairwiseDecomposition:
    """All ``2^(N-1)`` pair-label strings with the correct sign parity."""
    N = label.N
    if N > MAX_EXPAND_N:
        raise ResourceBoundError(f"expansion limited to N <= {MAX_EXPAND_N}, got {N}")
    amp = 1.0 / math.sqrt(2.0 ** (N - 1))
    plus, minus = label.pair(False), label.pair(True)
    terms = tuple(
        (amp, tuple(minus if (m >> i) & 1 else plus for i in range(N)))
        for m in _sign_masks(N, label.minus).tolist()
    )
    return PairwiseDecomposition(label, terms)


def bs_channel() -> dict[Bell, str]:
    """Pair Bell state -> analyzer outcome, read off the derived device table."""
    return standard_table().channel()


def classify(per_pair):
    """Logical label from per-pair outcomes, or ``FAILURE`` if all failed."""
    per_pair = [getattr(o, "value", o) for o in per_pair]
    if not per_pair:
        raise ValueError("need at least one pair outcome")
    bad = set(per_pair) - {Bell.PHI_MINUS.value, Bell.PSI_MINUS.value, FAIL}
    if bad:
        raise ValueError(f"unexpected analyzer outcomes {sorted(bad)}")
    n_phi = per_pair.count(Bell.PHI_MINUS.value)
    n_psi = per_pair.count(Bell.PSI_MINUS.value)
    if n_phi and n_psi:
        raise InconsistentRun(f"both PhiMinus ({n_phi}) and PsiMinus ({n_psi}) in one run")
    if not (n_phi or n_psi):
        return FAILURE
    family = "Phi" if n_phi else "Psi"
    return LogicalBellLabel(family, (n_phi + n_psi) % 2 == 1, len(per_pair))


@dataclass(frozen=True)
class LogicalBmResult:
    outcome: object
    per_pair: tuple[str, ...]
    n_phiminus: int
    n_psiminus: int

    @property
    def success(self) -> bool:
        return self.outcome != FAILURE


def _result(per_pair) -> LogicalBmResult:
    per_pair = tuple(per_pair)
    return LogicalBmResult(
        classify(per_pair),
        per_pair,
        per_pair.count(Bell.PHI_MINUS.value),
        per_pair.count(Bell.PSI_MINUS.value),
    )


def measure_logical_bell(label: LogicalBellLabel, rng: np.random.Generator, lost=None) -> LogicalBmResult:
    """Sample a decomposition term and run the analyzer on every pair.

    ``lost`` optionally marks pairs that lost a photon; those pairs fail.
    """
    N = label.N
    signs = [bool(b) for b in rng.integers(0, 2, N - 1)] if N > 1 else []
    signs.append((sum(signs) % 2 == 1) != label.minus)
    channel = bs_channel()
    per_pair = [channel[label.pair(s)] for s in signs]
    if lost is not None:
        per_pair = [FAIL if gone else o for o, gone in zip(per_pair, lost)]
    return _result(per_pair)


def outcome_distribution(N: int) -> dict[tuple[str, int], Fraction]:
    """Exact probabilities of ``(outcome, n_phiminus)`` for a uniformly random input."""
    channel = bs_channel()
    out: dict[tuple[str, int], Fraction] = {}
    w = Fraction(1, 4 * 2 ** (N - 1))
    for label in all_labels(N):
        for _, pairs in expand_logical_bell(label).terms:
            res = _result(channel[p] for p in pairs)
            key = (str(res.outcome), res.n_phiminus)
            out[key] = out.get(key, 0) + w
    return out


def exact_success_probability(N: int, label: LogicalBellLabel | None = None) -> Fraction:
    """Success probability by enumerating decomposition terms.

    ``label=None`` averages over the four logical Bell states.
    """
    if N > MAX_EXPAND_N:
        raise ResourceBoundError(f"enumeration limited to N <= {MAX_EXPAND_N}, got {N}")
    channel = bs_channel()
    labels = [label] if label is not None else all_labels(N)
    total = Fraction(0)
    for lab in labels:
        ok_plus = channel[lab.pair(False)] != FAIL
        ok_minus = channel[lab.pair(True)] != FAIL
        masks = _sign_masks(N, lab.minus)
        n_minus = np.zeros(len(masks), dtype=np.int64)
        for i in range(N):
            n_minus += (masks >> i) & 1
        good = np.zeros(len(masks), dtype=bool)
        if ok_minus:
            good |= n_minus > 0
        if ok_plus:
            good |= n_minus < N
        total += Fraction(int(good.sum()), len(masks))
    return total / len(labels)


def _draw(N, seed, t0, t1):
    """Label index and pair signs for trials ``t0 <= t < t1``."""
    u = _rng.uniforms(_rng.stream_keys(seed, np.arange(t0, t1), _SALT, N), N)
    label = np.minimum((u[:, 0] * 4).astype(np.int64), 3)
    free = (u[:, 1:] < 0.5).astype(np.int64)
    last = ((label & 1) - free.sum(axis=1)) % 2
    signs = np.concatenate([free, last[:, None]], axis=1).astype(bool)
    return label, signs


def _label_index(label: LogicalBellLabel) -> int:
    return 2 * FAMILIES.index(label.family) + int(label.minus)


def _mc_cells(N, seed, t0, t1):
    """Per-trial outcome string and PhiMinus count."""
    channel = bs_channel()
    labels = all_labels(N)
    idx, signs = _draw(N, seed, t0, t1)
    n_minus = signs.sum(axis=1)
    outcome = np.empty(len(idx), dtype=object)
    n_phi = np.zeros(len(idx), dtype=np.int64)
    for lab in labels:
        sel = idx == _label_index(lab)
        ok_plus = channel[lab.pair(False)] != FAIL
        ok_minus = channel[lab.pair(True)] != FAIL
        hits = np.zeros(int(sel.sum()), dtype=np.int64)
        if ok_minus:
            hits += n_minus[sel]
        if ok_plus:
            hits += N - n_minus[sel]
        outcome[sel] = np.where(hits > 0, str(lab), FAILURE)
        if lab.family == "Phi":
            n_phi[sel] = hits
    return outcome, n_phi


def monte_carlo_cells(N: int, trials: int, seed: int, chunk: int = 1 << 16) -> dict[tuple[str, int], int]:
    """Counts of ``(outcome, n_phiminus)`` over uniformly random inputs."""
    counts: dict[tuple[str, int], int] = {}
    for t0 in range(0, trials, chunk):
        out, n_phi = _mc_cells(N, seed, t0, min(trials, t0 + chunk))
        keys, c = np.unique(np.array([f"{o}|{k}" for o, k in zip(out, n_phi)]), return_counts=True)
        for key, n in zip(keys.tolist(), c.tolist()):
            o, k = key.rsplit("|", 1)
            counts[(o, int(k))] = counts.get((o, int(k)), 0) + n
    return counts


def monte_carlo_success(N: int, trials: int, seed: int, chunk: int = 1 << 16) -> Estimate:
    """Sampled success frequency over uniformly random logical Bell inputs."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if N < 1:
        raise ValueError("N must be at least 1")
    hits = 0
    for t0 in range(0, trials, chunk):
        out, _ = _mc_cells(N, seed, t0, min(trials, t0 + chunk))
        hits += int(np.count_nonzero(out != FAILURE))
    return binomial_estimate(hits, trials)


def success_table(Ns, trials: int, seed: int) -> list[dict]:
    rows = []
    for N in Ns:
        est = monte_carlo_success(N, trials, seed)
        rows.append({
            "N": N,
            "exact": float(exact_success_probability(N)),
            "mc_estimate": est.value,
            "mc_stderr": est.stderr,
            "trials": trials,
            "seed": seed,
        })
    return rows


def permutations_agree(per_pair) -> bool:
    """True if every reordering of ``per_pair`` classifies identically."""
    first = classify(per_pair)
    return all(classify(p) == first for p in itertools.permutations(per_pair))
