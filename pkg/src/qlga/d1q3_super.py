"""Superposition-encoded D1Q3: one basis term per particle.

Each particle contributes a term ``|site>_l |code>_c``.  Codes: right
``100``, left ``010``, rest ``001``.  Sites that will collide are marked
classically first: a lone rest particle becomes ``111`` and a lone
left/right pair becomes ``000``.  The collision circuit turns ``111`` into
an equal superposition of the left and right codes (flag ``a2`` set) and
``000`` into ``110`` with flag ``a1`` set, which decodes as a rest
particle.  The flags cannot be cleared unitarily, so they stay set; the
next step reloads from the decoded field anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gates as G
from .circuit import Circuit, decompose
from .d1q3_binary import D1q3Layout
from .fields import DecodeError, OccupancyField, check_budget, fill_ranked
from .lga import D1Q3, LatticeState
from .noise import NoiseModel, run_noisy_shots
from .shift import directed_shift
from .statevec import ShotHistogram, StateVector, new_state, sample_measurements

RIGHT, LEFT, REST = 0b100, 0b010, 0b001
REST_MARK, PAIR_MARK = 0b111, 0b000
ONE_HOT = {0: RIGHT, 1: LEFT, 2: REST}
CODE_CHANNEL = {RIGHT: 0, LEFT: 1, REST: 2}


@dataclass
class MarkedEncoding:
    """Per-particle ``(site, code)`` terms of a D1Q3 field after marking."""

    sites: int
    terms: list[tuple[int, int]]

    def codes_at(self, site: int) -> list[int]:
        return [c for s, c in self.terms if s == site]


def premark(occ: LatticeState) -> MarkedEncoding:
    if occ.model != D1Q3:
        raise ValueError("premark expects a D1Q3 field")
    terms = []
    for site, row in enumerate(occ.channels):
        r, l, rest = (bool(v) for v in row)
        if rest and not r and not l:
            terms.append((site, REST_MARK))
        elif r and l and not rest:
            terms.append((site, PAIR_MARK))
        else:
            terms.extend((site, ONE_HOT[ch]) for ch in range(3) if row[ch])
    return MarkedEncoding(occ.sites, terms)


def unmark(marked: MarkedEncoding) -> LatticeState:
    """Inverse of :func:`premark`."""
    out = LatticeState.empty(D1Q3, (marked.sites,))
    for site, code in marked.terms:
        if code == REST_MARK:
            out.channels[site, 2] = True
        elif code == PAIR_MARK:
            out.channels[site, :2] = True
        else:
            out.channels[site, CODE_CHANNEL[code]] = True
    return out


def initial_state(lay: D1q3Layout, marked: MarkedEncoding) -> StateVector:
    """Equal-weight superposition of the marked terms, loaded directly."""
    if marked.sites != lay.sites:
        raise ValueError(f"expected {lay.sites} sites, got {marked.sites}")
    if not marked.terms:
        raise ValueError("cannot load an empty lattice")
    state = new_state(lay.total, lay.layout)
    state.amplitudes[0] = 0.0
    amp = 1.0 / math.sqrt(len(marked.terms))
    for site, code in marked.terms:
        state.amplitudes[lay.layout.index_of(l=site, c=code)] = amp
    return state


def build_collision_super(lay: D1q3Layout) -> Circuit:
    c1, c2, c3 = lay.c
    a1, a2, a3 = lay.a
    both_empty = [(c1, 0), (c2, 0)]
    return Circuit(lay.layout, [
        # flag a2 on |111>, then drop c3 and split c1
        G.ccx(c1, c2, a3),
        G.ccx(c3, a3, a2),
        G.ccx(c1, c2, a3),
        G.cx(a2, c3),
        G.mch([a2], c1),
        G.x(c3),
        G.ccx(a2, c1, c2),
        # flag a1 on |000>, then write 110
        G.mcx(both_empty, a3),
        G.ccx(c3, a3, a1),
        G.mcx(both_empty, a3),
        G.x(c3),
        G.cx(a1, c1),
        G.cx(a1, c2),
    ])


def build_propagation_super(lay: D1q3Layout) -> Circuit:
    """Right code moves +1, left code -1; rest and ``110`` stay.

    ``CX(c2 -> c1)`` turns ``c1`` into a "moving" flag and leaves ``c2`` as
    the direction bit for the duration of the shift.
    """
    if lay.n < 2:
        raise ValueError("propagation needs at least 2 lattice qubits")
    c1, c2, _ = lay.c
    gates = [G.cx(c2, c1)]
    gates += directed_shift(lay.l, lay.anc, direction=(c2, 1), enable=(c1, 1))
    gates.append(G.cx(c2, c1))
    return Circuit(lay.layout, gates, measured_wires(lay))


def measured_wires(lay: D1q3Layout) -> list[int]:
    return lay.l + lay.c + lay.a[:1]


def build_step_super(lay: D1q3Layout) -> Circuit:
    circ = build_collision_super(lay) + build_propagation_super(lay)
    circ.measured = measured_wires(lay)
    return circ


def outcome_channel(c: int, a1: int) -> int | None:
    if c == 0b110 and a1:
        return 2
    if a1:
        return None
    return CODE_CHANNEL.get(c)


def _decode(weights, lay: D1q3Layout, mass_budget, total) -> OccupancyField:
    if not weights or total <= 0:
        raise DecodeError("cannot decode an empty histogram")
    check_budget(mass_budget, 4 * lay.sites)
    junk = 0.0
    candidates = []
    for outcome, w in weights.items():
        ch = outcome_channel((outcome >> 1) & 0b111, outcome & 1)
        if ch is None:
            junk += w
            continue
        candidates.append((w, outcome, outcome >> 4, ch))
    lattice = fill_ranked(candidates, D1Q3, (lay.sites,), mass_budget)
    junk_fraction = junk / total
    return OccupancyField(lattice, junk_fraction, no_information=not candidates)


def decode_shots_super(hist: ShotHistogram, lay: D1q3Layout, mass_budget: int | None) -> OccupancyField:
    if list(hist.qubits) != measured_wires(lay):
        raise DecodeError("histogram must cover l, c and a1 in layout order")
    return _decode(hist.int_counts(), lay, mass_budget, hist.shots)


def decode_distribution_super(probs: np.ndarray, lay: D1q3Layout, mass_budget: int | None = None,
                              threshold: float = 1e-24) -> OccupancyField:
    support = np.flatnonzero(probs > threshold)
    return _decode({int(i): float(probs[i]) for i in support}, lay, mass_budget, float(probs.sum()))


def run_hybrid_step(
    marked: MarkedEncoding,
    shots: int | None,
    noise: NoiseModel | None = None,
    seed: int = 0,
    mass_budget: int | None = None,
    max_trajectories: int | None = None,
) -> tuple[OccupancyField, MarkedEncoding]:
    """Load, collide, propagate, measure and decode one step.

    ``shots=None`` decodes the exact distribution.  Returns the decoded field
    and its marking for the next step.  An empty lattice is returned as is.
    """
    lay = D1q3Layout.for_sites(marked.sites)
    if not marked.terms:
        empty = OccupancyField(LatticeState.empty(D1Q3, (marked.sites,)))
        return empty, marked
    state = initial_state(lay, marked)
    circ = build_step_super(lay)
    noisy = noise is not None and not noise.is_noiseless
    if shots is None:
        if noisy:
            raise ValueError("exact decoding is only defined without noise")
        circ.run(state)
        field = decode_distribution_super(state.probabilities(circ.measured), lay, mass_budget)
    else:
        if shots < 1:
            raise ValueError("shots must be >= 1")
        if noisy:
            hist = run_noisy_shots(decompose(circ), noise, shots, seed, initial_state=state,
                                   max_trajectories=max_trajectories)
        else:
            hist = sample_measurements(circ.run(state), circ.measured, shots, seed)
        field = decode_shots_super(hist, lay, mass_budget)
    return field, premark(field.lattice)
