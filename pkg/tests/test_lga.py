import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlga.lga import (D1Q3, HPP, LatticeState, collide, mass_profile, propagate, run, site_index, step)


def d1q3(rows):
    return LatticeState(D1Q3, (len(rows),), np.array(rows, dtype=bool))


def single_hpp(n, x, y, ch):
    s = LatticeState.empty(HPP, (n, n))
    s.channels[site_index(x, y, n), ch] = True
    return s


def test_collision_table():
    assert collide(d1q3([(1, 1, 0)])).channels.tolist() == [[False, False, True]]
    assert collide(d1q3([(1, 0, 1)])).channels.tolist() == [[True, False, True]]
    h = LatticeState(HPP, (1, 1), np.array([[0, 1, 0, 1]], dtype=bool))
    assert collide(h).channels.astype(int).tolist() == [[1, 0, 1, 0]]
    empty = LatticeState.empty(D1Q3, 4)
    assert collide(empty) == empty


def test_propagation_examples():
    s = LatticeState.empty(D1Q3, 8)
    s.channels[3, 0] = True
    assert np.flatnonzero(propagate(s).channels[:, 0]).tolist() == [4]
    s = LatticeState.empty(D1Q3, 8)
    s.channels[7, 0] = True
    assert np.flatnonzero(propagate(s).channels[:, 0]).tolist() == [0]
    moved = propagate(single_hpp(4, 1, 3, 1))
    assert moved == single_hpp(4, 1, 0, 1)


def test_step_examples():
    s = d1q3([(0, 0, 0), (1, 1, 0), (0, 0, 0), (0, 0, 0)])
    assert step(s) == d1q3([(0, 0, 0), (0, 0, 1), (0, 0, 0), (0, 0, 0)])
    s = d1q3([(0, 0, 0), (0, 0, 1), (0, 0, 0), (0, 0, 0)])
    assert step(s) == d1q3([(0, 1, 0), (0, 0, 0), (1, 0, 0), (0, 0, 0)])
    assert step(LatticeState.empty(D1Q3, 4)) == LatticeState.empty(D1Q3, 4)


def test_mass_profile():
    s = d1q3([(0, 0, 0), (1, 0, 0), (0, 0, 1), (1, 1, 1)])
    assert mass_profile(s, 1).tolist() == [0, 1, 2, 4]
    full = LatticeState(D1Q3, (512,), np.ones((512, 3), dtype=bool))
    prof = mass_profile(full, 32)
    assert prof.shape == (16,) and np.all(prof == 128)
    assert np.all(mass_profile(LatticeState.empty(D1Q3, 8), 4) == 0)
    with pytest.raises(ValueError, match="block must divide sites"):
        mass_profile(full, 33)


def test_site_index():
    assert site_index(0, 0, 4) == 0
    assert site_index(1, 2, 4) == 6
    assert site_index(3, 3, 4) == 15
    with pytest.raises(ValueError):
        site_index(4, 0, 4)


def test_validation():
    with pytest.raises(ValueError):
        LatticeState.empty(D1Q3, 6)
    with pytest.raises(ValueError):
        LatticeState.empty(HPP, (4, 8))
    with pytest.raises(ValueError):
        LatticeState(D1Q3, (4,), np.zeros((4, 4), dtype=bool))


def test_collision_involution_exhaustive():
    for model, c in ((D1Q3, 3), (HPP, 4)):
        dims = (1 << c,) if model == D1Q3 else (4, 4)
        sites = int(np.prod(dims))
        states = np.array(list(itertools.product([0, 1], repeat=c)), dtype=bool)
        s = LatticeState(model, dims, states[: sites] if model == HPP else states)
        assert collide(collide(s)) == s


def test_hpp_self_duality():
    states = np.array(list(itertools.product([0, 1], repeat=4)), dtype=bool)
    s = LatticeState(HPP, (4, 4), states)
    flip = LatticeState(HPP, (4, 4), ~states)
    assert collide(flip).channels.tolist() == (~collide(s).channels).tolist()


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([D1Q3, HPP]), st.integers(1, 4), st.integers(0, 2**32 - 1), st.integers(0, 20))
def test_conservation(model, logn, seed, steps):
    rng = np.random.default_rng(seed)
    n = 1 << logn
    dims = (n,) if model == D1Q3 else (n, n)
    s = LatticeState(model, dims, rng.random((int(np.prod(dims)), 3 if model == D1Q3 else 4)) < 0.4)
    traj = run(s, steps)
    assert {t.total_mass() for t in traj} == {s.total_mass()}
    assert {t.momentum() for t in traj} == {s.momentum()}


def test_csv_roundtrip(tmp_path, rng):
    for model, dims in ((D1Q3, (8,)), (HPP, (4, 4))):
        s = LatticeState(model, dims, rng.random((int(np.prod(dims)), 3 if model == D1Q3 else 4)) < 0.5)
        s.to_csv(tmp_path / "f.csv")
        assert LatticeState.from_csv(tmp_path / "f.csv") == s
