"""Gate intermediate representation.

A gate is a kind, its target wires and a tuple of ``(wire, value)`` controls.
A control with value 1 is *closed* (fires on |1>), value 0 is *open*.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

ONE_QUBIT_KINDS = frozenset({"X", "Y", "Z", "H", "S", "SDG", "T", "TDG", "SX", "RZ", "RY", "P"})
PARAMETRIC_KINDS = frozenset({"RZ", "RY", "P"})
CONTROLLED_KINDS = frozenset({"MCX", "MCSWAP", "MCH"})
TWO_TARGET_KINDS = frozenset({"SWAP", "MCSWAP"})
ALL_KINDS = ONE_QUBIT_KINDS | CONTROLLED_KINDS | {"SWAP"}
# gates G with G @ G == I, used by the cancellation pass
SELF_INVERSE_KINDS = frozenset({"X", "Y", "Z", "H", "SWAP", "MCX", "MCSWAP", "MCH"})


class GateError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[tuple[int, int], ...] = ()
    angle: float = 0.0

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(
            self, "controls", tuple((int(q), 1 if v else 0) for q, v in self.controls)
        )
        if kind not in ALL_KINDS:
            raise GateError(f"unknown gate kind {kind!r}")
        want = 2 if kind in TWO_TARGET_KINDS else 1
        if len(self.targets) != want:
            raise GateError(f"{kind} takes {want} target(s), got {len(self.targets)}")
        if self.controls and kind not in CONTROLLED_KINDS:
            raise GateError(f"{kind} does not take controls; use MCX/MCSWAP/MCH")
        wires = list(self.targets) + [q for q, _ in self.controls]
        if len(set(wires)) != len(wires):
            raise GateError(f"{kind}: overlapping target/control wires {wires}")
        if any(w < 0 for w in wires):
            raise GateError(f"{kind}: negative wire index")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + tuple(q for q, _ in self.controls)

    @property
    def num_controls(self) -> int:
        return len(self.controls)

    def is_cx(self) -> bool:
        return self.kind == "MCX" and len(self.controls) == 1 and self.controls[0][1] == 1

    def is_native(self) -> bool:
        """True for gates in the {1-qubit, CX} basis."""
        if self.kind in ONE_QUBIT_KINDS:
            return True
        if self.kind == "MCX" and not self.controls:
            return True
        return self.is_cx()

    def matrix(self) -> np.ndarray:
        """2x2 matrix of the single-qubit action (for MCX/MCH the controlled part)."""
        return one_qubit_matrix(self.kind, self.angle)

    def to_text(self) -> str:
        head = self.kind
        if self.kind in PARAMETRIC_KINDS:
            head = f"{self.kind}({self.angle!r})"
        parts = [head, *map(str, self.targets)]
        if self.controls:
            parts.append("|")
            parts.extend(f"{'+' if v else '-'}{q}" for q, v in self.controls)
        return " ".join(parts)

    @classmethod
    def from_text(cls, line: str) -> "Gate":
        tokens = line.split()
        if not tokens:
            raise GateError("empty gate line")
        head, rest = tokens[0], tokens[1:]
        angle = 0.0
        if "(" in head:
            head, arg = head.split("(", 1)
            angle = float(arg.rstrip(")"))
        if "|" in rest:
            cut = rest.index("|")
            tgt, ctl = rest[:cut], rest[cut + 1:]
        else:
            tgt, ctl = rest, []
        controls = []
        for tok in ctl:
            if tok[0] not in "+-":
                raise GateError(f"bad control token {tok!r}")
            controls.append((int(tok[1:]), 1 if tok[0] == "+" else 0))
        return cls(head, tuple(int(t) for t in tgt), tuple(controls), angle)


_SQ2 = 1 / math.sqrt(2)
_FIXED = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "MCX": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "MCH": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "T": np.array([[1, 0], [0, cmath.exp(1j * math.pi / 4)]], dtype=complex),
    "TDG": np.array([[1, 0], [0, cmath.exp(-1j * math.pi / 4)]], dtype=complex),
    "SX": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
}


def one_qubit_matrix(kind: str, angle: float = 0.0) -> np.ndarray:
    if kind in _FIXED:
        return _FIXED[kind]
    if kind == "RZ":
        return np.array([[cmath.exp(-0.5j * angle), 0], [0, cmath.exp(0.5j * angle)]])
    if kind == "RY":
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "P":
        return np.array([[1, 0], [0, cmath.exp(1j * angle)]])
    raise GateError(f"{kind} has no single-qubit matrix")


# Constructors. Controls accept bare wire ints (closed) or (wire, value) pairs.

def _ctl(controls) -> tuple[tuple[int, int], ...]:
    out = []
    for c in controls:
        if isinstance(c, tuple):
            out.append((int(c[0]), int(c[1])))
        else:
            out.append((int(c), 1))
    return tuple(out)


def x(q: int) -> Gate:
    return Gate("X", (q,))


def h(q: int) -> Gate:
    return Gate("H", (q,))


def rz(q: int, angle: float) -> Gate:
    return Gate("RZ", (q,), angle=angle)


def ry(q: int, angle: float) -> Gate:
    return Gate("RY", (q,), angle=angle)


def phase(q: int, angle: float) -> Gate:
    return Gate("P", (q,), angle=angle)


def cx(control, target: int) -> Gate:
    return Gate("MCX", (target,), _ctl([control]))


def ccx(c1, c2, target: int) -> Gate:
    return Gate("MCX", (target,), _ctl([c1, c2]))


def mcx(controls, target: int) -> Gate:
    return Gate("MCX", (target,), _ctl(controls))


def swap(a: int, b: int) -> Gate:
    return Gate("SWAP", (a, b))


def mcswap(controls, a: int, b: int) -> Gate:
    return Gate("MCSWAP", (a, b), _ctl(controls))


def mch(controls, target: int) -> Gate:
    return Gate("MCH", (target,), _ctl(controls))


def single(kind: str, q: int, angle: float = 0.0) -> Gate:
    return Gate(kind, (q,), angle=angle)


__all__ = [
    "Gate", "GateError", "ONE_QUBIT_KINDS", "CONTROLLED_KINDS", "SELF_INVERSE_KINDS",
    "one_qubit_matrix", "x", "h", "rz", "ry", "phase", "cx", "ccx", "mcx", "swap",
    "mcswap", "mch", "single",
]
