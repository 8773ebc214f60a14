import numpy as np
import pytest

from qlga import gates as G
from qlga.circuit import Circuit, DecompositionError, decompose
from qlga.d1q3_binary import D1q3Layout, build_step, decode_shots, initial_state
from qlga.lga import D1Q3, LatticeState
from qlga.noise import NoiseModel, preset, run_noisy_shots, shot_generator
from qlga.statevec import RegisterLayout, sample_measurements


def test_presets():
    assert preset("none") == NoiseModel(0, 0, 0)
    assert preset("low") == NoiseModel(1e-5, 1e-4, 1e-4)
    assert preset("mid") == NoiseModel(3e-5, 2e-3, 2e-3)
    assert preset("high") == NoiseModel(6e-3, 2e-2, 2e-2)
    assert preset("none").is_noiseless and not preset("low").is_noiseless
    with pytest.raises(ValueError):
        preset("extreme")
    with pytest.raises(ValueError):
        NoiseModel(p1=1.5)


def test_shot_streams_are_distinct_and_reproducible():
    a = shot_generator(7, 0).random(4)
    assert np.array_equal(a, shot_generator(7, 0).random(4))
    assert not np.array_equal(a, shot_generator(7, 1).random(4))
    assert not np.array_equal(a, shot_generator(8, 0).random(4))


def test_noiseless_basis_preparation():
    circ = Circuit(RegisterLayout([("q", 3)]), [G.x(0), G.x(2)], [0, 1, 2])
    assert run_noisy_shots(circ, preset("none"), 100, seed=1).counts == {"101": 100}


def test_readout_flips_are_fair():
    circ = Circuit(RegisterLayout([("q", 1)]), [], [0])
    hist = run_noisy_shots(circ, NoiseModel(p_readout=0.5), 100_000, seed=2)
    assert abs(hist.frequencies()["1"] - 0.5) < 0.01


def test_certain_two_qubit_error_spreads_support():
    circ = Circuit(RegisterLayout([("q", 2)]), [G.cx(0, 1)], [0, 1])
    hist = run_noisy_shots(circ, NoiseModel(p2=1.0), 2000, seed=3)
    assert set(hist.counts) - {"00"}
    # 12 of the 15 two-qubit Paulis flip at least one bit
    assert abs(hist.counts.get("00", 0) / 2000 - 3 / 15) < 0.05


def test_undecomposed_circuit_is_rejected():
    circ = Circuit(RegisterLayout([("q", 3)]), [G.ccx(0, 1, 2)], [0, 1, 2])
    with pytest.raises(DecompositionError):
        run_noisy_shots(circ, preset("low"), 10, seed=0)
    with pytest.raises(ValueError):
        run_noisy_shots(decompose(circ), preset("low"), 0, seed=0)


def _step_circuit(sites=8, seed=5):
    lay = D1q3Layout.for_sites(sites)
    rng = np.random.default_rng(seed)
    occ = LatticeState(D1Q3, (sites,), rng.random((sites, 3)) < 0.5)
    return lay, occ, decompose(build_step(lay)), initial_state(lay, occ)


def test_zero_noise_matches_direct_sampling():
    lay, _, circ, start = _step_circuit()
    shots = 100_000
    noisy = run_noisy_shots(circ, preset("none"), shots, seed=9, initial_state=start)
    direct = sample_measurements(circ.run(start.copy()), lay.measured, shots, seed=9)
    keys = set(noisy.counts) | set(direct.counts)
    tv = 0.5 * sum(abs(noisy.counts.get(k, 0) - direct.counts.get(k, 0)) for k in keys) / shots
    assert tv < 0.01


def test_histogram_independent_of_workers():
    _, _, circ, start = _step_circuit()
    model = preset("high")
    one = run_noisy_shots(circ, model, 300, seed=11, initial_state=start)
    four = run_noisy_shots(circ, model, 300, seed=11, initial_state=start, workers=4)
    assert one.counts == four.counts
    capped = run_noisy_shots(circ, model, 300, seed=11, initial_state=start, max_trajectories=16, workers=3)
    assert capped.counts == run_noisy_shots(circ, model, 300, seed=11, initial_state=start,
                                            max_trajectories=16).counts


def test_junk_fraction_degrades_with_noise():
    # the branch register makes junk about 1/4 at every level, so order holds within a margin
    lay, occ, circ, start = _step_circuit()
    margin = 0.02
    means = {}
    for level in ("none", "low", "high"):
        junk = [decode_shots(run_noisy_shots(circ, preset(level), 400, seed=s, initial_state=start,
                                             max_trajectories=64), lay, occ.total_mass()).junk_fraction
                for s in range(20)]
        means[level] = float(np.mean(junk))
    assert means["none"] <= means["low"] + margin
    assert means["low"] <= means["high"] + margin
