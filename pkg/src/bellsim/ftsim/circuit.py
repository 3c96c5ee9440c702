"""Declarative telecorrection circuits.

A circuit is plain text, one statement per line::

    BLOCK A1 7 8 9 10 11 12 13     # name a 7-qubit code block
    OFFLINE                        # start a postselected section
    PREP 7                         # |+> preparation
    CZ 7 9
    H 9
    MEM 7                          # idle step
    MX 21                          # X-basis measurement
    VERIFY 21 22+23                # restart the section if measurement 21
                                   # or the product of 22 and 23 reads -1
    CANON A1                       # X frame of a |+_L> block modulo stabilizers
    END
    DECODE D A2 Z                  # decode the MX record of D, fix A2 with Z_L
    OUTPUT A2                      # final ideal decode of the surviving block

``PREP``, ``H``, ``CZ``, ``MEM`` and ``MX`` are noisy locations; everything
else is classical bookkeeping and costs nothing.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from bellsim.errors import CircuitError
from bellsim.ftsim import codes

LOCATION_KINDS = ("PREP", "H", "CZ", "MEM", "MX")
OPCODES = {
    "PREP": 0,
    "H": 1,
    "CZ": 2,
    "MEM": 3,
    "MX": 4,
    "OFFLINE": 5,
    "VERIFY": 6,
    "END": 7,
    "CANON": 8,
    "DECODE": 9,
    "OUTPUT": 10,
}
MAX_QUBITS = 64


@dataclass
class Circuit:
    """Parsed circuit plus the integer arrays consumed by the kernels."""

    statements: list[tuple] = field(default_factory=list)
    blocks: dict[str, tuple[int, ...]] = field(default_factory=dict)

    @property
    def n_qubits(self) -> int:
        qs = [q for st in self.statements if st[0] in LOCATION_KINDS for q in st[1:]]
        qs += [q for b in self.blocks.values() for q in b]
        return max(qs) + 1 if qs else 0

    def location_counts(self) -> Counter:
        return Counter(st[0] for st in self.statements if st[0] in LOCATION_KINDS)

    def location_fractions(self) -> dict[str, float]:
        cnt = self.location_counts()
        total = sum(cnt.values())
        return {k: cnt[k] / total for k in LOCATION_KINDS}

    def locations(self) -> list[int]:
        """Statement indices of noisy locations."""
        return [i for i, st in enumerate(self.statements) if st[0] in LOCATION_KINDS]

    def to_text(self) -> str:
        lines = [f"BLOCK {n} " + " ".join(map(str, qs)) for n, qs in self.blocks.items()]
        for st in self.statements:
            if st[0] == "VERIFY":
                lines.append("VERIFY " + " ".join("+".join(map(str, g)) for g in st[1:]))
            else:
                lines.append(" ".join(str(x) for x in st))
        return "\n".join(lines) + "\n"

    def compile(self):
        """Return ``(ops, blocks, masks)`` arrays for the kernels."""
        names = list(self.blocks)
        blocks = np.array([self.blocks[n] for n in names], dtype=np.int32).reshape(-1, 7)
        masks: list[int] = []
        ops = np.zeros((len(self.statements), 4), dtype=np.int32)
        for i, st in enumerate(self.statements):
            kind = st[0]
            row = [OPCODES[kind], 0, 0, 0]
            if kind in ("PREP", "H", "MEM", "MX"):
                row[1] = st[1]
            elif kind == "CZ":
                row[1], row[2] = st[1], st[2]
            elif kind == "VERIFY":
                row[1], row[2] = len(masks), len(st) - 1
                for group in st[1:]:
                    m = 0
                    for q in group:
                        m |= 1 << q
                    masks.append(m)
            elif kind in ("CANON", "OUTPUT"):
                row[1] = names.index(st[1])
            elif kind == "DECODE":
                row[1] = names.index(st[1])
                row[2] = names.index(st[2])
                row[3] = 0 if st[3] == "X" else 1
            ops[i] = row
        return ops, np.ascontiguousarray(blocks), np.array(masks or [0], dtype=np.uint64)


def parse(text: str) -> Circuit:
    circ = Circuit()
    in_section = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0].upper()
        args = parts[1:]
        try:
            if kind == "BLOCK":
                qs = tuple(int(a) for a in args[1:])
                if len(qs) != codes.N_QUBITS:
                    raise CircuitError(f"line {lineno}: a block needs 7 qubits")
                circ.blocks[args[0]] = qs
                continue
            if kind in ("PREP", "H", "MEM", "MX"):
                if len(args) != 1:
                    raise CircuitError(f"line {lineno}: {kind} takes one qubit")
                st = (kind, int(args[0]))
            elif kind == "CZ":
                if len(args) != 2 or args[0] == args[1]:
                    raise CircuitError(f"line {lineno}: CZ takes two distinct qubits")
                st = (kind, int(args[0]), int(args[1]))
            elif kind == "OFFLINE":
                if in_section:
                    raise CircuitError(f"line {lineno}: nested OFFLINE")
                in_section = True
                st = (kind,)
            elif kind == "END":
                if not in_section:
                    raise CircuitError(f"line {lineno}: END without OFFLINE")
                in_section = False
                st = (kind,)
            elif kind == "VERIFY":
                if not in_section:
                    raise CircuitError(f"line {lineno}: VERIFY outside an OFFLINE section")
                if not args:
                    raise CircuitError(f"line {lineno}: VERIFY needs at least one measurement")
                st = (kind, *(tuple(int(q) for q in a.split("+")) for a in args))
            elif kind in ("CANON", "OUTPUT"):
                st = (kind, args[0])
            elif kind == "DECODE":
                if len(args) != 3 or args[2].upper() not in ("X", "Z"):
                    raise CircuitError(f"line {lineno}: DECODE <src> <target> X|Z")
                st = (kind, args[0], args[1], args[2].upper())
            else:
                raise CircuitError(f"line {lineno}: unknown statement {kind!r}")
        except (ValueError, IndexError) as exc:
            raise CircuitError(f"line {lineno}: malformed statement {raw!r}") from exc
        circ.statements.append(st)
    if in_section:
        raise CircuitError("unterminated OFFLINE section")
    _validate(circ)
    return circ


def _validate(circ: Circuit) -> None:
    if circ.n_qubits > MAX_QUBITS:
        raise CircuitError(f"at most {MAX_QUBITS} qubits are supported")
    for st in circ.statements:
        for name in st[1:]:
            if isinstance(name, str) and name not in ("X", "Z") and name not in circ.blocks:
                raise CircuitError(f"unknown block {name!r}")
    if not any(st[0] == "OUTPUT" for st in circ.statements):
        raise CircuitError("circuit has no OUTPUT block")


def load(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def default_circuit() -> Circuit:
    """The shipped Steane-code telecorrection round."""
    text = resources.files("bellsim.ftsim").joinpath("data/telecorrection.circ").read_text()
    return parse(text)
