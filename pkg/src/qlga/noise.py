"""Depolarizing gate noise and readout flips as Monte Carlo Pauli trajectories.

Every shot owns a counter-based random stream keyed by ``(seed, shot)``.
From it the shot draws, in order: its outcome uniform, its readout flips and
its gate-error pattern.  Shots whose error patterns coincide share one
statevector trajectory, so the histogram does not depend on how shots are
grouped or scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, DecompositionError
from .statevec import Program, ShotHistogram, StateVector, apply_pauli, new_state

# memory for cached noiseless prefix states
CHECKPOINT_BYTES = 256 * 2**20


@dataclass(frozen=True)
class NoiseModel:
    p1: float = 0.0
    p2: float = 0.0
    p_readout: float = 0.0

    def __post_init__(self):
        for name in ("p1", "p2", "p_readout"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @property
    def is_noiseless(self) -> bool:
        return self.p1 == 0 and self.p2 == 0 and self.p_readout == 0

    def as_dict(self) -> dict:
        return {"p1": self.p1, "p2": self.p2, "p_readout": self.p_readout}


PRESETS = {
    "none": NoiseModel(0.0, 0.0, 0.0),
    "low": NoiseModel(1e-5, 1e-4, 1e-4),
    "mid": NoiseModel(3e-5, 2e-3, 2e-3),
    "high": NoiseModel(6e-3, 2e-2, 2e-2),
}


def preset(level: str) -> NoiseModel:
    try:
        return PRESETS[level.lower()]
    except KeyError:
        raise ValueError(f"unknown noise level {level!r}; choose from {sorted(PRESETS)}") from None


def shot_generator(seed: int, shot: int) -> np.random.Generator:
    key = ((int(seed) & (2**64 - 1)) << 64) | int(shot)
    return np.random.Generator(np.random.Philox(key=key))


class _Plan:
    """Error locations of a native circuit."""

    def __init__(self, circuit: Circuit):
        one, two = [], []
        for i, g in enumerate(circuit.gates):
            if not g.is_native():
                raise DecompositionError(f"undecomposed gate {g.to_text()}; run decompose() first")
            if g.kind == "MCX" and g.controls:
                two.append(i)
            else:
                one.append(i)
        self.one = np.array(one, dtype=np.int64)
        self.two = np.array(two, dtype=np.int64)
        self.gates = circuit.gates

    def draw(self, rng: np.random.Generator, model: NoiseModel) -> tuple:
        """Sorted ``(gate_index, pauli_a, pauli_b)`` triples for one trajectory."""
        events = []
        if model.p1 > 0 and len(self.one):
            k = rng.binomial(len(self.one), model.p1)
            if k:
                where = rng.choice(len(self.one), size=k, replace=False)
                paulis = rng.integers(1, 4, size=k)
                events += [(int(self.one[w]), int(p), 0) for w, p in zip(where, paulis)]
        if model.p2 > 0 and len(self.two):
            k = rng.binomial(len(self.two), model.p2)
            if k:
                where = rng.choice(len(self.two), size=k, replace=False)
                pairs = rng.integers(1, 16, size=k)
                events += [(int(self.two[w]), int(p) >> 2, int(p) & 3) for w, p in zip(where, pairs)]
        return tuple(sorted(events))

    def apply_event(self, state: StateVector, event: tuple) -> None:
        gi, pa, pb = event
        g = self.gates[gi]
        if g.controls:
            apply_pauli(state, g.controls[0][0], pa)
            apply_pauli(state, g.targets[0], pb)
        else:
            apply_pauli(state, g.targets[0], pa)


class _Checkpoints:
    """Noiseless prefix states, so a trajectory starts at its first error."""

    def __init__(self, program: Program, start: StateVector):
        n = len(program)
        budget = max(1, CHECKPOINT_BYTES // max(1, start.amplitudes.nbytes))
        self.stride = max(1, math.ceil((n + 1) / budget))
        self.states = {0: start.copy()}
        work = start.copy()
        for pos in range(self.stride, n + 1, self.stride):
            program.run(work, pos - self.stride, pos)
            self.states[pos] = work.copy()
        last = (n // self.stride) * self.stride
        program.run(work, last, n)
        self.final = work

    def before(self, position: int) -> tuple[int, StateVector]:
        pos = (position // self.stride) * self.stride
        return pos, self.states[pos].copy()


def _trajectory(program, plan, checkpoints, pattern, measured_bits) -> np.ndarray:
    if not pattern:
        state = checkpoints.final
    else:
        pos, state = checkpoints.before(pattern[0][0])
        for event in pattern:
            gi = event[0]
            program.run(state, pos, gi + 1)
            plan.apply_event(state, event)
            pos = gi + 1
        program.run(state, pos)
    probs = state.probabilities(measured_bits)
    cdf = np.cumsum(probs)
    return cdf / cdf[-1]


def run_noisy_shots(
    circuit: Circuit,
    model: NoiseModel,
    shots: int,
    seed: int,
    initial_state: StateVector | None = None,
    max_trajectories: int | None = None,
    workers: int = 1,
) -> ShotHistogram:
    """Sample ``shots`` measurements of ``circuit`` under ``model``.

    With ``max_trajectories`` set, shot ``s`` reuses the error pattern of
    shot ``s mod max_trajectories``; outcome draws and readout flips stay
    per shot.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if not circuit.measured:
        raise ValueError("circuit has no measured qubits")
    if max_trajectories is not None and max_trajectories < 1:
        raise ValueError("max_trajectories must be >= 1")
    plan = _Plan(circuit)
    measured = list(circuit.measured)
    m = len(measured)
    start = initial_state.copy() if initial_state is not None else new_state(circuit.layout.total, circuit.layout)
    program = Program(start.num_qubits, circuit.gates)

    n_traj = shots if max_trajectories is None else min(shots, max_trajectories)
    uniforms = np.empty(shots)
    flips = np.zeros(shots, dtype=np.int64)
    weights = 1 << np.arange(m - 1, -1, -1, dtype=np.int64)
    index_of: dict[tuple, int] = {}
    traj_of_shot = np.empty(shots, dtype=np.int64)
    for s in range(shots):
        rng = shot_generator(seed, s)
        uniforms[s] = rng.random()
        if model.p_readout > 0:
            flips[s] = int((rng.random(m) < model.p_readout) @ weights)
        if s < n_traj:
            traj_of_shot[s] = index_of.setdefault(plan.draw(rng, model), len(index_of))
        else:
            traj_of_shot[s] = traj_of_shot[s % n_traj]
    pattern_list = list(index_of)

    checkpoints = _Checkpoints(program, start)

    def job(pat):
        return _trajectory(program, plan, checkpoints, pat, measured)

    if workers > 1 and len(pattern_list) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cdfs = list(pool.map(job, pattern_list))
    else:
        cdfs = [job(p) for p in pattern_list]

    outcomes = np.empty(shots, dtype=np.int64)
    for t, cdf in enumerate(cdfs):
        idx = np.flatnonzero(traj_of_shot == t)
        outcomes[idx] = np.minimum(np.searchsorted(cdf, uniforms[idx], side="right"), len(cdf) - 1)
    outcomes ^= flips
    return ShotHistogram.from_outcomes(tuple(measured), outcomes, seed)
