"""Circuits: construction, decomposition to {1-qubit, CX}, resource counting."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import gates as G
from .gates import Gate, GateError
from .statevec import Program, RegisterLayout, StateVector, apply_gate, new_state

UNITARY_MAX_QUBITS = 12


class DecompositionError(GateError):
    pass


@dataclass
class Circuit:
    layout: RegisterLayout
    gates: list[Gate] = field(default_factory=list)
    measured: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.gates = list(self.gates)
        self.measured = [int(q) for q in self.measured]
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        if max(g.qubits) >= self.layout.total:
            raise GateError(f"{g.to_text()}: wire outside layout of {self.layout.total} qubits")

    def append(self, gate: Gate) -> "Circuit":
        self._check(gate)
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.layout != self.layout:
            raise ValueError("cannot concatenate circuits over different layouts")
        measured = other.measured or self.measured
        return Circuit(self.layout, self.gates + other.gates, measured)

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def num_qubits(self) -> int:
        return self.layout.total

    def is_native(self) -> bool:
        return all(g.is_native() for g in self.gates)

    def run(self, state: StateVector | None = None) -> StateVector:
        """Apply every gate to ``state`` (default |0...0>), in place."""
        if state is None:
            state = new_state(self.layout.total, self.layout)
        return Program(state.num_qubits, self.gates).run(state)

    def to_text(self) -> str:
        lines = ["# layout " + " ".join(f"{n}:{w}" for n, w in self.layout.blocks)]
        if self.measured:
            lines.append("# measure " + " ".join(map(str, self.measured)))
        lines.extend(g.to_text() for g in self.gates)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        layout = None
        measured: list[int] = []
        gates = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("# layout"):
                blocks = [tok.split(":") for tok in line.split()[2:]]
                layout = RegisterLayout((n, int(w)) for n, w in blocks)
            elif line.startswith("# measure"):
                measured = [int(t) for t in line.split()[2:]]
            elif line.startswith("#"):
                continue
            else:
                gates.append(Gate.from_text(line))
        if layout is None:
            raise ValueError("circuit text lacks a '# layout' header")
        return cls(layout, gates, measured)


@dataclass(frozen=True)
class ResourceReport:
    cx_count: int
    one_qubit_count: int
    depth: int
    ancilla_used: int

    @property
    def total_gates(self) -> int:
        return self.cx_count + self.one_qubit_count


# --- decomposition -------------------------------------------------------

def _toffoli(c1: int, c2: int, t: int) -> list[Gate]:
    """Six-CX Toffoli, exact (no global phase)."""
    return [
        G.h(t),
        G.cx(c2, t), G.single("TDG", t),
        G.cx(c1, t), G.single("T", t),
        G.cx(c2, t), G.single("TDG", t),
        G.cx(c1, t), G.single("T", c2), G.single("T", t),
        G.h(t),
        G.cx(c1, c2), G.single("T", c1), G.single("TDG", c2),
        G.cx(c1, c2),
    ]


def _open_wrapped(controls, body: list[Gate]) -> list[Gate]:
    flips = [G.x(q) for q, v in controls if not v]
    return flips + body + flips


def _closed(controls) -> list[int]:
    return [q for q, _ in controls]


def _v_chain(ctrl: list[int], target: int, ancillas: list[int]) -> list[Gate]:
    """MCX on closed controls ``ctrl`` using ``len(ctrl) - 2`` clean ancillas."""
    k = len(ctrl)
    work = ancillas[: k - 2]
    compute = [G.ccx(ctrl[0], ctrl[1], work[0])]
    for i in range(2, k - 1):
        compute.append(G.ccx(work[i - 2], ctrl[i], work[i - 1]))
    return compute + [G.ccx(work[-1], ctrl[-1], target)] + compute[::-1]


def _lower(gate: Gate, ancillas: Sequence[int]) -> list[Gate]:
    """Rewrite ``gate`` into 1-qubit gates, CX and closed Toffolis."""
    kind = gate.kind
    if kind in G.ONE_QUBIT_KINDS:
        return [gate]
    if kind == "SWAP":
        a, b = gate.targets
        return [G.cx(a, b), G.cx(b, a), G.cx(a, b)]
    if kind == "MCSWAP":
        a, b = gate.targets
        inner = G.mcx(list(gate.controls) + [(a, 1)], b)
        return [G.cx(b, a), *_lower(inner, ancillas), G.cx(b, a)]
    if kind == "MCH":
        (t,) = gate.targets
        core = _lower(G.mcx(gate.controls, t), ancillas)
        # H = A X A^dag with A = RY(pi/4) H
        return [G.ry(t, -math.pi / 4), G.h(t), *core, G.h(t), G.ry(t, math.pi / 4)]
    if kind == "MCX":
        (t,) = gate.targets
        ctrl = _closed(gate.controls)
        k = len(ctrl)
        if k == 0:
            body = [G.x(t)]
        elif k == 1:
            body = [G.cx(ctrl[0], t)]
        elif k == 2:
            body = [G.ccx(ctrl[0], ctrl[1], t)]
        else:
            free = [a for a in ancillas if a not in gate.qubits]
            if len(free) < k - 2:
                raise DecompositionError(
                    f"{gate.to_text()}: needs {k - 2} clean ancilla qubits, {len(free)} available"
                )
            body = _v_chain(ctrl, t, free)
        return _open_wrapped(gate.controls, body)
    raise DecompositionError(f"cannot decompose {gate.to_text()}")


def _cancel_key(g: Gate):
    targets = tuple(sorted(g.targets)) if g.kind in ("SWAP", "MCSWAP") else g.targets
    return g.kind, targets, frozenset(g.controls), g.angle


def cancel_adjacent(gates: Iterable[Gate]) -> list[Gate]:
    """Drop pairs of identical self-inverse gates with nothing in between on their wires."""
    out: list[Gate | None] = []
    keys: list = []
    stacks: dict[int, list[int]] = defaultdict(list)
    for g in gates:
        qs = g.qubits
        tops = [stacks[q][-1] for q in qs if stacks[q]]
        if tops and g.kind in G.SELF_INVERSE_KINDS:
            last = max(tops)
            if keys[last] == _cancel_key(g):
                out[last] = None
                for q in qs:
                    stacks[q].pop()
                continue
        idx = len(out)
        out.append(g)
        keys.append(_cancel_key(g))
        for q in qs:
            stacks[q].append(idx)
    return [g for g in out if g is not None]


def decompose(circuit: Circuit, ancilla_block: str | None = "anc") -> Circuit:
    """Lower ``circuit`` to 1-qubit gates and CX.

    Multi-controlled X uses a V-chain of Toffolis over ``ancilla_block``
    (``k - 2`` clean wires for ``k`` controls).  Adjacent inverse pairs are
    cancelled at Toffoli level, then each Toffoli becomes 6 CX.
    """
    ancillas = circuit.layout[ancilla_block] if ancilla_block and ancilla_block in circuit.layout else []
    lowered: list[Gate] = []
    for g in circuit.gates:
        lowered.extend(_lower(g, ancillas))
    lowered = cancel_adjacent(lowered)
    native: list[Gate] = []
    for g in lowered:
        if g.kind == "MCX" and len(g.controls) == 2:
            native.extend(_toffoli(g.controls[0][0], g.controls[1][0], g.targets[0]))
        else:
            native.append(g)
    native = cancel_adjacent(native)
    return Circuit(circuit.layout, native, circuit.measured)


def resource_report(circuit: Circuit, ancilla_block: str = "anc") -> ResourceReport:
    cx = one = 0
    level: dict[int, int] = defaultdict(int)
    depth = 0
    for g in circuit.gates:
        if not g.is_native():
            raise DecompositionError(f"undecomposed gate {g.to_text()}; run decompose() first")
        if g.kind == "MCX" and g.controls:
            cx += 1
        else:
            one += 1
        layer = 1 + max(level[q] for q in g.qubits)
        for q in g.qubits:
            level[q] = layer
        depth = max(depth, layer)
    anc = set(circuit.layout[ancilla_block]) if ancilla_block in circuit.layout else set()
    touched = {q for g in circuit.gates for q in g.qubits}
    return ResourceReport(cx, one, depth, len(anc & touched))


def unitary_of(circuit: Circuit) -> np.ndarray:
    """Dense matrix of ``circuit``; column ``j`` is the image of basis state ``j``."""
    q = circuit.layout.total
    if q > UNITARY_MAX_QUBITS:
        raise ValueError(f"unitary_of limited to {UNITARY_MAX_QUBITS} qubits, circuit has {q}")
    # Treat U as a 2q-wire state whose high q bits are the row index; gates on
    # wires < q then act on rows, i.e. left-multiply the identity.
    dim = 1 << q
    work = StateVector(2 * q, np.eye(dim, dtype=np.complex128).reshape(-1))
    for g in circuit.gates:
        apply_gate(work, g)
    return work.amplitudes.reshape(dim, dim)


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, atol: float = 1e-9) -> bool:
    idx = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(u[idx]) < atol:
        return False
    ph = v[idx] / u[idx]
    ph /= abs(ph)
    return bool(np.max(np.abs(u * ph - v)) < atol)


def data_block(u: np.ndarray, layout: RegisterLayout, ancilla_block: str = "anc") -> np.ndarray:
    """Restrict ``u`` to inputs with a clean ancilla block.

    Returns the full-height columns for ancilla-zero inputs; a correct
    decomposition has no weight outside the ancilla-zero rows.
    """
    if ancilla_block not in layout:
        return u
    cols = [j for j in range(u.shape[1]) if layout.split_index(j)[ancilla_block] == 0]
    return u[:, cols]
