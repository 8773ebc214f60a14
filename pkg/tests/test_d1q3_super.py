import math

import numpy as np
import pytest

from qlga.circuit import decompose, unitary_of
from qlga.d1q3_binary import D1q3Layout
from qlga.d1q3_super import (LEFT, PAIR_MARK, REST, REST_MARK, RIGHT, MarkedEncoding, build_collision_super,
                             build_propagation_super, build_step_super, decode_distribution_super,
                             initial_state, measured_wires, outcome_channel, premark, run_hybrid_step, unmark)
from qlga.lga import D1Q3, LatticeState, step
from qlga.statevec import new_basis_state


def field(sites, **occupied):
    out = LatticeState.empty(D1Q3, (sites,))
    for name, ch in (("right", 0), ("left", 1), ("rest", 2)):
        for s in occupied.get(name, ()):
            out.channels[s, ch] = True
    return out


def test_premark_examples():
    assert premark(field(4, rest=[1])).terms == [(1, REST_MARK)]
    assert premark(field(4, right=[2], left=[2])).terms == [(2, PAIR_MARK)]
    assert premark(field(4, right=[0], rest=[0])).terms == [(0, RIGHT), (0, REST)]
    assert premark(field(4, right=[0, 3], left=[1])).terms == [(0, RIGHT), (1, LEFT), (3, RIGHT)]
    with pytest.raises(ValueError):
        premark(LatticeState.empty("HPP", (4, 4)))


def test_premark_round_trip(rng):
    for _ in range(50):
        occ = LatticeState(D1Q3, (8,), rng.random((8, 3)) < 0.5)
        assert unmark(premark(occ)) == occ


def test_initial_state_amplitudes():
    lay = D1q3Layout(3)
    marked = premark(field(8, right=[0], rest=[4]))
    s = initial_state(lay, marked)
    assert len(s.support()) == 2
    assert s.amplitudes[lay.layout.index_of(l=4, c=REST_MARK)] == pytest.approx(1 / math.sqrt(2))
    with pytest.raises(ValueError):
        initial_state(lay, MarkedEncoding(8, []))


def test_collision_codes():
    lay = D1q3Layout(2)
    circ = build_collision_super(lay)
    r = 1 / math.sqrt(2)

    def run(code):
        s = circ.run(new_basis_state(lay.layout, lay.layout.index_of(c=code)))
        return {int(i): s.amplitudes[i] for i in s.support()}

    out = run(REST_MARK)
    assert out.keys() == {lay.layout.index_of(c=LEFT, a=0b010), lay.layout.index_of(c=RIGHT, a=0b010)}
    assert abs(abs(out[lay.layout.index_of(c=LEFT, a=0b010)]) - r) < 1e-12
    assert abs(abs(out[lay.layout.index_of(c=RIGHT, a=0b010)]) - r) < 1e-12

    out = run(PAIR_MARK)
    assert out.keys() == {lay.layout.index_of(c=0b110, a=0b100)}

    for code in (RIGHT, LEFT, REST, 0b101, 0b011):
        assert run(code).keys() == {lay.layout.index_of(c=code)}


def test_circuits_are_unitary():
    lay = D1q3Layout(3)
    for circ in (build_collision_super(lay), build_propagation_super(lay)):
        u = unitary_of(decompose(circ))
        assert np.max(np.abs(u.conj().T @ u - np.eye(len(u)))) < 1e-10


def test_propagation_moves_codes():
    lay = D1q3Layout(3)
    prop = build_propagation_super(lay)
    for site, code, want in ((3, RIGHT, 4), (7, RIGHT, 0), (0, LEFT, 7), (5, REST, 5), (5, 0b110, 5)):
        s = prop.run(new_basis_state(lay.layout, lay.layout.index_of(l=site, c=code)))
        (idx,) = s.support()
        parts = lay.layout.split_index(int(idx))
        assert (parts["l"], parts["c"], parts["anc"]) == (want, code, 0)


def test_outcome_channel():
    assert outcome_channel(RIGHT, 0) == 0
    assert outcome_channel(LEFT, 0) == 1
    assert outcome_channel(REST, 0) == 2
    assert outcome_channel(0b110, 1) == 2
    assert outcome_channel(0b110, 0) is None
    assert outcome_channel(RIGHT, 1) is None
    assert outcome_channel(0b000, 0) is None


def test_hybrid_examples():
    out, marked = run_hybrid_step(premark(field(8, rest=[2])), shots=None)
    assert out.lattice == field(8, left=[1], right=[3])
    assert marked.terms == [(1, LEFT), (3, RIGHT)]

    out, _ = run_hybrid_step(premark(field(8, right=[2], left=[2])), shots=None)
    assert out.lattice == field(8, rest=[2])

    out, marked = run_hybrid_step(MarkedEncoding(8, []), shots=100)
    assert out.lattice == field(8) and marked.terms == []

    with pytest.raises(ValueError):
        run_hybrid_step(premark(field(8, rest=[2])), shots=0)


def test_exact_step_matches_oracle(rng):
    for sites in (4, 8, 16):
        lay = D1q3Layout.for_sites(sites)
        for _ in range(20):
            occ = LatticeState(D1Q3, (sites,), rng.random((sites, 3)) < 0.4)
            if not occ.channels.any():
                continue
            s = build_step_super(lay).run(initial_state(lay, premark(occ)))
            got = decode_distribution_super(s.probabilities(measured_wires(lay)), lay)
            assert got.lattice == step(occ)
            assert got.junk_fraction == 0


def test_sampled_step_matches_oracle(rng):
    occ = LatticeState(D1Q3, (16,), rng.random((16, 3)) < 0.3)
    out, _ = run_hybrid_step(premark(occ), shots=4000, seed=3, mass_budget=occ.total_mass())
    assert out.lattice == step(occ)
