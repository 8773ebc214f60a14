"""Binary-encoded D1Q3 quantum lattice gas: circuits and decoding.

Registers, in basis-index order: ``l`` (n lattice qubits, site index),
``c = c1 c2 c3`` (right, left, rest occupancy), ``a = a1 a2 a3`` (mapping
register) and ``anc`` (clean work qubits for the shift and decompositions).

After the mapping stage ``a2 a3`` labels the branch and ``a1`` holds the
isolated channel bit:

====  ==========  =============
a2a3  channel     shift of ``l``
====  ==========  =============
00    right (c1)  +1
10    left (c2)   -1
01    rest (c3)    0
11    junk         0
====  ==========  =============
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from . import gates as G
from .circuit import Circuit
from .encoding import loaded_state, loading_gates
from .fields import DecodeError, OccupancyField, check_budget, fill_ranked
from .lga import D1Q3, LatticeState
from .shift import directed_shift
from .statevec import RegisterLayout, ShotHistogram, StateVector

BRANCH_CHANNEL = {0b00: 0, 0b10: 1, 0b01: 2}
JUNK_BRANCH = 0b11


class D1q3Layout:
    def __init__(self, n: int, ancillas: int | None = None):
        if n < 1:
            raise ValueError("need at least one lattice qubit")
        need = max(1, n - 2)
        w = need if ancillas is None else int(ancillas)
        if w < need:
            raise ValueError(f"n={n} needs at least {need} ancilla qubits, got {w}")
        self.n = n
        self.w = w
        self.layout = RegisterLayout([("l", n), ("c", 3), ("a", 3), ("anc", w)])
        self.l = self.layout["l"]
        self.c = self.layout["c"]
        self.a = self.layout["a"]
        self.anc = self.layout["anc"]

    @classmethod
    def for_sites(cls, sites: int, ancillas: int | None = None) -> "D1q3Layout":
        n = int(sites).bit_length() - 1
        if sites < 2 or 1 << n != sites:
            raise ValueError(f"site count must be a power of two >= 2, got {sites}")
        return cls(n, ancillas)

    @property
    def sites(self) -> int:
        return 1 << self.n

    @property
    def total(self) -> int:
        return self.layout.total

    @property
    def measured(self) -> list[int]:
        return self.l + self.a

    def __repr__(self):
        return f"D1q3Layout(n={self.n}, ancillas={self.w})"


def _check_field(lay: D1q3Layout, occ: LatticeState) -> None:
    if occ.model != D1Q3 or occ.sites != lay.sites:
        raise ValueError(f"expected a D1Q3 field with {lay.sites} sites, got {occ.model} {occ.sites}")


def build_initialization(lay: D1q3Layout, occ: LatticeState) -> Circuit:
    """Load ``occ`` as a uniform superposition of site/channel basis strings."""
    _check_field(lay, occ)
    return Circuit(lay.layout, loading_gates(lay.l, lay.c, occ.channels), lay.measured)


def initial_state(lay: D1q3Layout, occ: LatticeState) -> StateVector:
    """The state the initialization circuit prepares, written directly."""
    _check_field(lay, occ)
    return loaded_state(lay.layout, occ.codes())


def build_collision(lay: D1q3Layout) -> Circuit:
    """Four CX and one Toffoli exchanging |110> and |001> on ``c``."""
    c1, c2, c3 = lay.c
    return Circuit(lay.layout, [
        G.cx(c3, c2),
        G.cx(c3, c1),
        G.ccx(c1, c2, c3),
        G.cx(c3, c1),
        G.cx(c3, c2),
    ])


def build_mapping(lay: D1q3Layout, variant: str = "swap") -> Circuit:
    c1, c2, c3 = lay.c
    a1, a2, a3 = lay.a
    if variant == "swap":
        return Circuit(lay.layout, [
            G.h(a2),
            G.h(a3),
            G.mcswap([(a2, 0), (a3, 0)], c1, a1),
            G.mcswap([(a2, 1), (a3, 0)], c2, a1),
            G.mcswap([(a2, 0), (a3, 1)], c3, a1),
        ])
    if variant == "nonswap":
        # Hadamard-based mapping into a1, a2 only; unequal branch weights.
        return Circuit(lay.layout, [
            G.mch([c1, c2], a1),
            G.mcx([c1, c2, a1], a2),
            G.ccx(c1, c2, a1),
            G.x(c1),
            G.mch([c3, a1], a2),
            G.ccx(c1, c2, a2),
            G.mch([c1, c2, c3], a1),
            G.x(c1),
            G.x(c2),
            G.mch([c1, c2], a2),
            G.x(c1),
            G.mcx([c1, c2, c3], a1),
            G.mcx([c1, c2, c3], a2),
        ])
    raise ValueError(f"unknown mapping variant {variant!r}")


def build_propagation(lay: D1q3Layout) -> Circuit:
    """Shift ``l`` by +1 on branch a2a3=00 and by -1 on branch 10."""
    if lay.n < 2:
        raise ValueError("propagation needs at least 2 lattice qubits")
    _, a2, a3 = lay.a
    gates = directed_shift(lay.l, lay.anc, direction=(a2, 1), enable=(a3, 0))
    return Circuit(lay.layout, gates, lay.measured)


def build_step(lay: D1q3Layout, variant: str = "swap") -> Circuit:
    """Collision, mapping and propagation; measures ``l`` and ``a``."""
    circ = build_collision(lay) + build_mapping(lay, variant) + build_propagation(lay)
    circ.measured = lay.measured
    return circ


def _decode(weights: Mapping[int, float], lay: D1q3Layout, mass_budget, total) -> OccupancyField:
    if not weights or total <= 0:
        raise DecodeError("cannot decode an empty histogram")
    check_budget(mass_budget, 4 * lay.sites)
    junk = 0.0
    candidates = []
    for outcome, w in weights.items():
        branch = outcome & 0b11
        if branch == JUNK_BRANCH:
            junk += w
            continue
        if (outcome >> 2) & 1:
            candidates.append((w, outcome, outcome >> 3, BRANCH_CHANNEL[branch]))
    lattice = fill_ranked(candidates, D1Q3, (lay.sites,), mass_budget)
    junk_fraction = junk / total
    return OccupancyField(lattice, junk_fraction, no_information=junk_fraction >= 1.0)


def decode_shots(hist: ShotHistogram, lay: D1q3Layout, mass_budget: int | None) -> OccupancyField:
    """Decode measured ``l a1 a2 a3`` outcomes into channel occupancies."""
    if list(hist.qubits) != lay.measured:
        raise DecodeError("histogram must cover the l and a registers in layout order")
    return _decode(hist.int_counts(), lay, mass_budget, hist.shots)


def decode_distribution(probs: np.ndarray, lay: D1q3Layout, mass_budget: int | None = None,
                        threshold: float = 1e-24) -> OccupancyField:
    """Infinite-shot decode from the exact marginal over ``l a``."""
    support = np.flatnonzero(probs > threshold)
    weights = {int(i): float(probs[i]) for i in support}
    return _decode(weights, lay, mass_budget, float(probs.sum()))
