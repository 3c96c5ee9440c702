"""Lookup tables for the seven-qubit Steane code.

Qubit ``i`` of a block carries the Hamming column ``i + 1``, so the syndrome
of a 7-bit error pattern ``e`` is the XOR of ``i + 1`` over its set bits.
Both X and Z frames use the same tables because the code is self-dual.
"""

from __future__ import annotations

import numpy as np

N_QUBITS = 7


def popcount(x: int) -> int:
    return bin(x).count("1")


def syndrome(e: int) -> int:
    s = 0
    for i in range(N_QUBITS):
        if e >> i & 1:
            s ^= i + 1
    return s


#: classical Hamming [7,4] codewords; the odd-weight half are logical operators
CODEWORDS = tuple(e for e in range(128) if syndrome(e) == 0)
#: weight-4 words of the even subcode, i.e. the stabilizer supports
STABILIZERS = tuple(e for e in CODEWORDS if popcount(e) == 4)
#: weight-3 codewords, usable as verification checks on a |0_L> block
LINES = tuple(
    tuple(i for i in range(N_QUBITS) if e >> i & 1) for e in CODEWORDS if popcount(e) == 3
)

#: minimum-weight representative of each syndrome class
LEADER = np.array([0] + [1 << i for i in range(N_QUBITS)], dtype=np.uint8)
SYNDROME = np.array([syndrome(e) for e in range(128)], dtype=np.uint8)
PARITY = np.array([popcount(e) & 1 for e in range(128)], dtype=np.uint8)


def _build_decoder():
    """Erasure-aware minimum-weight decoder.

    For every (syndrome, erasure mask) the candidate errors form two logical
    classes. The cost of a candidate counts only flips outside the erasure
    mask. The cheaper class wins; a tie is reported as a heralded failure
    because no decision is better than a coin toss.
    """
    corr = np.zeros((8, 128), dtype=np.uint8)
    tie = np.zeros((8, 128), dtype=np.uint8)
    for s in range(8):
        e0 = int(LEADER[s])
        for m in range(128):
            best = {0: (99, 0), 1: (99, 0)}
            for c in CODEWORDS:
                e = e0 ^ c
                cls = popcount(c) & 1
                cost = popcount(e & ~m)
                bc, be = best[cls]
                if cost < bc or (cost == bc and popcount(e) < popcount(be)):
                    best[cls] = (cost, e)
            (c0, e0_), (c1, e1_) = best[0], best[1]
            if c0 < c1:
                corr[s, m] = e0_
            elif c1 < c0:
                corr[s, m] = e1_
            else:
                corr[s, m] = e0_
                tie[s, m] = 1
    return corr, tie


DECODE, TIE = _build_decoder()


def decode(e: int, mask: int = 0) -> tuple[bool, bool]:
    """Return ``(logical_flip, heralded)`` for a 7-bit error and erasure mask."""
    s = int(SYNDROME[e])
    c = int(DECODE[s, mask])
    return bool(PARITY[e ^ c]), bool(TIE[s, mask])
