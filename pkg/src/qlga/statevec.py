"""Dense statevector simulator.

Wire ``w`` of a ``Q``-wire register lives at bit ``Q - 1 - w`` of the basis
index, so wire 0 is the most significant bit and the ket string
``|w0 w1 ... w{Q-1}>`` reads left to right.  Registers are laid out block by
block in the order given to :class:`RegisterLayout`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .gates import Gate, GateError

# |a|^2 below this counts as zero when enumerating support
SUPPORT_THRESHOLD = 1e-24
MAX_QUBITS = 30


class RegisterLayout:
    """Ordered named blocks of wires, first block most significant."""

    def __init__(self, blocks: Iterable[tuple[str, int]]):
        self.blocks: tuple[tuple[str, int], ...] = tuple((str(n), int(w)) for n, w in blocks)
        names = [n for n, _ in self.blocks]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate block names in {names}")
        if any(w < 0 for _, w in self.blocks):
            raise ValueError("block widths must be non-negative")
        self._offsets = {}
        off = 0
        for name, width in self.blocks:
            self._offsets[name] = (off, width)
            off += width
        self.total = off

    def __getitem__(self, name: str) -> list[int]:
        off, width = self._offsets[name]
        return list(range(off, off + width))

    def __contains__(self, name: str) -> bool:
        return name in self._offsets

    def width(self, name: str) -> int:
        return self._offsets[name][1]

    def bit(self, wire: int) -> int:
        return self.total - 1 - wire

    def index_of(self, **values: int) -> int:
        """Basis index with each named block set to an integer value (MSB first)."""
        idx = 0
        for name, width in self.blocks:
            v = int(values.get(name, 0))
            if not 0 <= v < (1 << width) and width > 0:
                raise ValueError(f"value {v} does not fit block {name!r} of width {width}")
            idx = (idx << width) | v
        return idx

    def split_index(self, index: int) -> dict[str, int]:
        out = {}
        shift = self.total
        for name, width in self.blocks:
            shift -= width
            out[name] = (index >> shift) & ((1 << width) - 1)
        return out

    def __eq__(self, other):
        return isinstance(other, RegisterLayout) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return f"RegisterLayout({list(self.blocks)!r})"


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray
    layout: RegisterLayout | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes, got {self.amplitudes.shape}"
            )

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy(), self.layout)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def bit(self, wire: int) -> int:
        return self.num_qubits - 1 - wire

    def probabilities(self, wires: Sequence[int]) -> np.ndarray:
        """Marginal distribution over ``wires``; outcome index is MSB-first in ``wires``."""
        if len(wires) == self.num_qubits and list(wires) == list(range(self.num_qubits)):
            return np.abs(self.amplitudes) ** 2
        bits = np.array([self.bit(w) for w in wires], dtype=np.int64)
        return _kernels.marginal_probabilities(self.amplitudes, bits)

    def support(self, threshold: float = SUPPORT_THRESHOLD) -> np.ndarray:
        """Basis indices carrying probability above ``threshold``."""
        p = self.amplitudes.real ** 2 + self.amplitudes.imag ** 2
        return np.flatnonzero(p > threshold)


def new_state(num_qubits: int, layout: RegisterLayout | None = None) -> StateVector:
    if num_qubits > MAX_QUBITS:
        raise MemoryError(f"{num_qubits} qubits exceeds simulator capacity ({MAX_QUBITS})")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps, layout)


def new_basis_state(layout: RegisterLayout | int, index: int) -> StateVector:
    if isinstance(layout, RegisterLayout):
        q = layout.total
    else:
        q, layout = int(layout), None
    if not 0 <= index < (1 << q):
        raise ValueError(f"basis index {index} out of range for {q} qubits")
    state = new_state(q, layout)
    state.amplitudes[0] = 0.0
    state.amplitudes[index] = 1.0
    return state


def _control_mask(state: StateVector, controls) -> tuple[int, int]:
    mask = val = 0
    for q, v in controls:
        b = 1 << state.bit(q)
        mask |= b
        if v:
            val |= b
    return mask, val


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply ``gate`` in place and return ``state``."""
    for q in gate.qubits:
        if not 0 <= q < state.num_qubits:
            raise GateError(f"{gate.to_text()}: wire {q} outside {state.num_qubits}-qubit state")
    psi = state.amplitudes
    mask, val = _control_mask(state, gate.controls)
    kind = gate.kind
    if kind in ("SWAP", "MCSWAP"):
        a, b = gate.targets
        _kernels.apply_swap(psi, state.bit(a), state.bit(b), mask, val)
        return state
    bit = state.bit(gate.targets[0])
    if kind in ("X", "MCX"):
        _kernels.apply_x(psi, bit, mask, val)
        return state
    m = gate.matrix()
    if m[0, 1] == 0 and m[1, 0] == 0:
        _kernels.apply_diag(psi, bit, mask, val, m[0, 0], m[1, 1])
    else:
        _kernels.apply_matrix(psi, bit, mask, val, m[0, 0], m[0, 1], m[1, 0], m[1, 1])
    return state


def apply_gates(state: StateVector, gates: Iterable[Gate]) -> StateVector:
    for g in gates:
        apply_gate(state, g)
    return state


class Program:
    """Gates lowered to flat arrays so a whole range runs in one kernel call."""

    def __init__(self, num_qubits: int, gates: Sequence[Gate]):
        gates = list(gates)
        k = len(gates)
        self.num_qubits = num_qubits
        self.ops = np.empty(k, dtype=np.int64)
        self.bits = np.zeros(k, dtype=np.int64)
        self.bits2 = np.zeros(k, dtype=np.int64)
        self.cmasks = np.zeros(k, dtype=np.int64)
        self.cvals = np.zeros(k, dtype=np.int64)
        self.mats = np.zeros((k, 4), dtype=np.complex128)
        def bit(w: int) -> int:
            return num_qubits - 1 - w

        for i, g in enumerate(gates):
            for q in g.qubits:
                if not 0 <= q < num_qubits:
                    raise GateError(f"{g.to_text()}: wire {q} outside {num_qubits}-qubit state")
            for q, v in g.controls:
                self.cmasks[i] |= 1 << bit(q)
                if v:
                    self.cvals[i] |= 1 << bit(q)
            self.bits[i] = bit(g.targets[0])
            if g.kind in ("SWAP", "MCSWAP"):
                self.ops[i] = _kernels.OP_SWAP
                self.bits2[i] = bit(g.targets[1])
            elif g.kind in ("X", "MCX"):
                self.ops[i] = _kernels.OP_X
            else:
                m = g.matrix()
                self.mats[i] = m.reshape(-1)
                diagonal = m[0, 1] == 0 and m[1, 0] == 0
                self.ops[i] = _kernels.OP_DIAG if diagonal else _kernels.OP_MATRIX

    def __len__(self) -> int:
        return len(self.ops)

    def run(self, state: StateVector, start: int = 0, stop: int | None = None) -> StateVector:
        if state.num_qubits != self.num_qubits:
            raise ValueError(f"program for {self.num_qubits} qubits, state has {state.num_qubits}")
        stop = len(self) if stop is None else stop
        if stop > start:
            _kernels.run_program(state.amplitudes, self.ops, self.bits, self.bits2,
                                 self.cmasks, self.cvals, self.mats, start, stop)
        return state


def apply_pauli(state: StateVector, wire: int, pauli: int) -> None:
    """Apply Pauli 1=X, 2=Y, 3=Z (0 is identity) on ``wire``."""
    if pauli == 0:
        return
    bit = state.bit(wire)
    psi = state.amplitudes
    if pauli == 1:
        _kernels.apply_x(psi, bit, 0, 0)
    elif pauli == 2:
        _kernels.apply_matrix(psi, bit, 0, 0, 0j, -1j, 1j, 0j)
    elif pauli == 3:
        _kernels.apply_diag(psi, bit, 0, 0, 1 + 0j, -1 + 0j)
    else:
        raise ValueError(f"bad Pauli code {pauli}")


@dataclass
class ShotHistogram:
    """Outcome counts keyed by bitstrings over ``qubits`` (first qubit leftmost)."""

    qubits: tuple[int, ...]
    counts: dict[str, int]
    seed: int | None = None

    @property
    def shots(self) -> int:
        return sum(self.counts.values())

    def frequencies(self) -> dict[str, float]:
        total = self.shots
        return {k: v / total for k, v in self.counts.items()}

    def int_counts(self) -> dict[int, int]:
        return {int(k, 2): v for k, v in self.counts.items()}

    @classmethod
    def from_outcomes(cls, qubits, outcomes: np.ndarray, seed=None) -> "ShotHistogram":
        k = len(qubits)
        tally = Counter(outcomes.tolist())
        counts = {format(o, f"0{k}b"): c for o, c in sorted(tally.items())}
        return cls(tuple(qubits), counts, seed)


def shot_uniforms(seed: int, shots: int) -> np.ndarray:
    """One uniform per shot from a counter-based stream keyed by ``seed``.

    Shot ``s`` always receives the ``s``-th value, so any chunking of the shot
    range reproduces the same outcomes.
    """
    gen = np.random.Generator(np.random.Philox(key=int(seed) & (2 ** 128 - 1)))
    return gen.random(shots)


def sample_from_probabilities(probs: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    return np.minimum(np.searchsorted(cdf, uniforms, side="right"), len(probs) - 1)


def sample_measurements(
    state: StateVector, measured_qubits: Sequence[int], shots: int, seed: int
) -> ShotHistogram:
    """Draw ``shots`` i.i.d. outcomes from the Born marginal; ``state`` is untouched."""
    qubits = tuple(int(q) for q in measured_qubits)
    if not qubits:
        raise ValueError("measured_qubits must not be empty")
    if len(set(qubits)) != len(qubits):
        raise ValueError("measured_qubits must be distinct")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = state.probabilities(qubits)
    outcomes = sample_from_probabilities(probs, shot_uniforms(seed, shots))
    return ShotHistogram.from_outcomes(qubits, outcomes, seed)
