"""Counter-based random numbers.

Every draw is a pure function of integer coordinates, e.g.
``(seed, trial, index)``, hashed with the SplitMix64 finalizer. Results do
not depend on how trials are split across workers, and the compiled kernels
reproduce the same stream exactly.
"""

from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = (np.uint64(s) for s in (30, 27, 31, 11))
_INV53 = 1.0 / 9007199254740992.0


def mix(z):
    """SplitMix64 step applied elementwise to a uint64 array."""
    # wraparound is the point; numpy only warns about it for scalars
    with np.errstate(over="ignore"):
        z = np.asarray(z, dtype=np.uint64) + GOLDEN
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def unit(h):
    """Map 64-bit hashes to doubles uniform on [0, 1)."""
    return (np.asarray(h, dtype=np.uint64) >> _S11).astype(np.float64) * _INV53


def stream_keys(seed: int, trials, *salt: int):
    """Per-trial keys derived from the master seed and optional salts."""
    k = mix(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))
    for s in salt:
        k = mix(k ^ np.uint64(s & 0xFFFFFFFFFFFFFFFF))
    return mix(k ^ np.asarray(trials, dtype=np.int64).astype(np.uint64))


def uniforms(keys, n: int):
    """Matrix of shape ``(len(keys), n)``; row ``i`` depends only on ``keys[i]``."""
    keys = np.asarray(keys, dtype=np.uint64)
    return unit(mix(keys[:, None] + np.arange(n, dtype=np.uint64)[None, :]))
