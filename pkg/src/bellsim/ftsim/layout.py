"""Generator for the shipped telecorrection round.

The round teleports a data block ``D`` into ``A2`` through an encoded Bell
pair ``(A1, A2)``:

* offline, each of ``A1`` and ``A2`` starts as ``|0_L>`` built from a graph
  state and idles for a few steps. Four weight-3 Z parities (a basis of the
  Hamming code) are then read out with one ``|+>`` ancilla each, which
  rejects every harmful X error. Transversal Hadamards turn the block into
  ``|+_L>`` and three weight-4 Z parities reject the remaining X errors
  (former Z errors), each guarded by a flag ancilla. Either check failing restarts the preparation;
* the two verified blocks are joined by a transversal CZ;
* online, a transversal CZ couples ``D`` to ``A1``, both are measured in the
  X basis, and the decoded outcomes fix ``A2`` with ``Z_L`` and ``X_L``.
  ``A2`` idles meanwhile.

Run as a module to regenerate ``data/telecorrection.circ``.
"""

from __future__ import annotations

#: qubits 0, 1 and 3 carry the information; each row lists the qubits a
#: |+> on the information qubit is fanned out to
GRAPH_ROWS = ((0, 2, 4, 6), (1, 2, 5, 6), (3, 4, 5, 6))
INFO_QUBITS = (0, 1, 3)
#: weight-3 codewords spanning the Hamming code: Z on each is +1 on |0_L>
ZERO_CHECKS = ((0, 1, 2), (0, 3, 4), (1, 3, 5), (2, 3, 6))
#: weight-4 stabilizers spanning the even subcode: Z on each is +1 on |+_L>
PLUS_CHECKS = ((3, 4, 5, 6), (1, 2, 5, 6), (0, 2, 4, 6))


def _checks(block, ancillas, checks):
    out = []
    for anc, check in zip(ancillas, checks):
        out.append(f"PREP {anc}")
        out += [f"CZ {anc} {block[q]}" for q in check]
        out.append(f"MX {anc}")
    out.append("VERIFY " + " ".join(map(str, ancillas)))
    return out


def _flagged_checks(block, ancillas, checks):
    """Weight-4 parities, each with a flag ancilla.

    An X fault on the check ancilla midway through its four CZs would leave
    a weight-2 Z error on the block. The flag is coupled around that window,
    so such a fault also flips the flag and the preparation is rejected.
    """
    out = []
    used = []
    for k, check in enumerate(checks):
        a, f = ancillas[2 * k], ancillas[2 * k + 1]
        q = [block[i] for i in check]
        out += [f"PREP {a}", f"PREP {f}", f"CZ {a} {q[0]}", f"CZ {a} {f}",
                f"CZ {a} {q[1]}", f"CZ {a} {q[2]}", f"CZ {a} {f}", f"CZ {a} {q[3]}",
                f"MX {a}", f"MX {f}"]
        used += [a, f]
    out.append("VERIFY " + " ".join(map(str, used)))
    return out


def _prep_plus(block, ancillas, memory):
    out = [f"PREP {q}" for q in block]
    for info, row in zip(INFO_QUBITS, GRAPH_ROWS):
        out += [f"CZ {block[info]} {block[p]}" for p in row if p != info]
    out += [f"H {block[p]}" for p in range(7) if p not in INFO_QUBITS]
    for _ in range(memory):
        out += [f"MEM {q}" for q in block]
    n0 = len(ZERO_CHECKS)
    out += _checks(block, ancillas[:n0], ZERO_CHECKS)
    out += [f"H {q}" for q in block]
    out += _flagged_checks(block, ancillas[n0:], PLUS_CHECKS)
    return out


def telecorrection_text(prep_memory=(5, 4), online_memory: int = 2) -> str:
    n_anc = len(ZERO_CHECKS) + 2 * len(PLUS_CHECKS)
    data = tuple(range(0, 7))
    a1 = tuple(range(7, 14))
    a2 = tuple(range(14, 21))
    anc1 = tuple(range(21, 21 + n_anc))
    anc2 = tuple(range(21 + n_anc, 21 + 2 * n_anc))
    lines = [
        "# Steane-code telecorrection round (teleportation-based error correction)",
        "BLOCK D " + " ".join(map(str, data)),
        "BLOCK A1 " + " ".join(map(str, a1)),
        "BLOCK A2 " + " ".join(map(str, a2)),
    ]
    for block, anc, name, mem in ((a1, anc1, "A1", prep_memory[0]), (a2, anc2, "A2", prep_memory[1])):
        lines.append(f"# verified |+_L> on {name}")
        lines.append("OFFLINE")
        lines += _prep_plus(block, anc, mem)
        lines.append(f"CANON {name}")
        lines.append("END")
    lines.append("# encoded Bell pair")
    lines.append("OFFLINE")
    lines += [f"CZ {p} {q}" for p, q in zip(a1, a2)]
    lines.append("END")
    lines.append("# teleport D into A2")
    lines += [f"CZ {p} {q}" for p, q in zip(data, a1)]
    lines += [f"MX {q}" for q in data]
    lines += [f"MX {q}" for q in a1]
    for _ in range(online_memory):
        lines += [f"MEM {q}" for q in a2]
    lines.append("DECODE D A2 Z")
    lines.append("DECODE A1 A2 X")
    lines.append("OUTPUT A2")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":  # pragma: no cover
    from pathlib import Path

    target = Path(__file__).with_name("data") / "telecorrection.circ"
    target.write_text(telecorrection_text())
    print(target)
