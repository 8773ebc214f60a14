"""Quantum HPP lattice gas on an N x N periodic lattice.

Registers: ``l`` (2 log2 N qubits holding ``k = y + x N``, so the high half
is ``x`` and the low half ``y``), ``c = c1..c4`` (+x, +y, -x, -y), ``a``
(collision work bit ``a1`` and branch label ``a2 a3``) and ``anc``.

Branch table after mapping:

====  =======  ========
a2a3  channel  shift
====  =======  ========
00    c4 (-y)  y - 1
10    c2 (+y)  y + 1
01    c1 (+x)  x + 1
11    c3 (-x)  x - 1
====  =======  ========

All four branches carry information; there is no junk branch.
"""

from __future__ import annotations

import numpy as np

from . import gates as G
from .circuit import Circuit
from .encoding import loaded_state, loading_gates
from .fields import DecodeError, OccupancyField, check_budget, fill_ranked
from .lga import HPP, LatticeState, site_index  # noqa: F401  (re-exported)
from .shift import directed_shift
from .statevec import RegisterLayout, ShotHistogram, StateVector

BRANCH_CHANNEL = {0b00: 3, 0b10: 1, 0b01: 0, 0b11: 2}


class HppLayout:
    def __init__(self, side: int, ancillas: int | None = None):
        h = int(side).bit_length() - 1
        if side < 2 or 1 << h != side:
            raise ValueError(f"lattice side must be a power of two >= 2, got {side}")
        # site loading controls on all 2h lattice bits; collision MCX has 4 controls
        need = max(2, 2 * h - 2)
        w = need if ancillas is None else int(ancillas)
        if w < need:
            raise ValueError(f"side {side} needs at least {need} ancilla qubits, got {w}")
        self.side = side
        self.h = h
        self.n = 2 * h
        self.w = w
        self.layout = RegisterLayout([("l", self.n), ("c", 4), ("a", 3), ("anc", w)])
        self.l = self.layout["l"]
        self.c = self.layout["c"]
        self.a = self.layout["a"]
        self.anc = self.layout["anc"]

    @property
    def x_bits(self) -> list[int]:
        return self.l[: self.h]

    @property
    def y_bits(self) -> list[int]:
        return self.l[self.h:]

    @property
    def sites(self) -> int:
        return self.side * self.side

    @property
    def total(self) -> int:
        return self.layout.total

    @property
    def measured(self) -> list[int]:
        return self.l + self.a

    def __repr__(self):
        return f"HppLayout(side={self.side}, ancillas={self.w})"


def _check_field(lay: HppLayout, occ: LatticeState) -> None:
    if occ.model != HPP or occ.dims != (lay.side, lay.side):
        raise ValueError(f"expected an HPP field of side {lay.side}, got {occ.model} {occ.dims}")


def build_initialization_hpp(lay: HppLayout, occ: LatticeState) -> Circuit:
    _check_field(lay, occ)
    return Circuit(lay.layout, loading_gates(lay.l, lay.c, occ.channels), lay.measured)


def initial_state_hpp(lay: HppLayout, occ: LatticeState) -> StateVector:
    _check_field(lay, occ)
    return loaded_state(lay.layout, occ.codes())


def build_collision_hpp(lay: HppLayout) -> Circuit:
    """Exchange ``|1010>`` and ``|0101>`` on ``c``, with ``a1`` as scratch."""
    c1, c2, c3, c4 = lay.c
    a1 = lay.a[0]
    p1010 = [(c1, 1), (c2, 0), (c3, 1), (c4, 0)]
    p0101 = [(c1, 0), (c2, 1), (c3, 0), (c4, 1)]
    return Circuit(lay.layout, [
        G.mcx(p1010, a1),
        G.mcx(p0101, a1),
        *[G.cx(a1, q) for q in lay.c],
        G.mcx(p0101, a1),
        G.mcx(p1010, a1),
    ])


def build_mapping_hpp(lay: HppLayout) -> Circuit:
    c1, c2, c3, c4 = lay.c
    a1, a2, a3 = lay.a
    return Circuit(lay.layout, [
        G.h(a2),
        G.h(a3),
        G.mcswap([(a2, 0), (a3, 0)], c4, a1),
        G.mcswap([(a2, 1), (a3, 0)], c2, a1),
        G.mcswap([(a2, 0), (a3, 1)], c1, a1),
        G.mcswap([(a2, 1), (a3, 1)], c3, a1),
    ])


def build_propagation_hpp(lay: HppLayout) -> Circuit:
    """Shift ``y`` on branches 00/10 and ``x`` on branches 01/11.

    The x branches swap the two halves of ``l`` (controlled on ``a3``) so one
    shift of the low half serves both axes.  ``CX(a3 -> a2)`` makes ``a2``
    the direction bit: decrement when it reads 0.
    """
    if lay.side < 4:
        raise ValueError("propagation needs a lattice side of at least 4")
    _, a2, a3 = lay.a
    swaps = [G.mcswap([a3], x, y) for x, y in zip(lay.x_bits, lay.y_bits)]
    gates = swaps + [G.cx(a3, a2)]
    gates += directed_shift(lay.y_bits, lay.anc, direction=(a2, 0))
    gates += [G.cx(a3, a2)] + swaps
    return Circuit(lay.layout, gates, lay.measured)


def build_step_hpp(lay: HppLayout) -> Circuit:
    circ = build_collision_hpp(lay) + build_mapping_hpp(lay) + build_propagation_hpp(lay)
    circ.measured = lay.measured
    return circ


def _decode(weights, lay: HppLayout, mass_budget, total) -> OccupancyField:
    if not weights or total <= 0:
        raise DecodeError("cannot decode an empty histogram")
    check_budget(mass_budget, 4 * lay.sites)
    candidates = [
        (w, outcome, outcome >> 3, BRANCH_CHANNEL[outcome & 0b11])
        for outcome, w in weights.items()
        if (outcome >> 2) & 1
    ]
    lattice = fill_ranked(candidates, HPP, (lay.side, lay.side), mass_budget)
    return OccupancyField(lattice, 0.0)


def decode_shots_hpp(hist: ShotHistogram, lay: HppLayout, mass_budget: int | None) -> OccupancyField:
    if list(hist.qubits) != lay.measured:
        raise DecodeError("histogram must cover the l and a registers in layout order")
    return _decode(hist.int_counts(), lay, mass_budget, hist.shots)


def decode_distribution_hpp(probs: np.ndarray, lay: HppLayout, mass_budget: int | None = None,
                            threshold: float = 1e-24) -> OccupancyField:
    support = np.flatnonzero(probs > threshold)
    return _decode({int(i): float(probs[i]) for i in support}, lay, mass_budget, float(probs.sum()))
