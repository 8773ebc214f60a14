"""Multi-step experiments: quantum step, decode, reload; with a classical twin.

Each ensemble member draws an initial field, evolves it with the quantum
model (one circuit execution per time step, decoded and reloaded in between)
and with the classical automaton, and records block-summed mass profiles.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import lga
from .circuit import Circuit, decompose
from .d1q3_binary import (D1q3Layout, build_initialization, build_step, decode_distribution,
                          decode_shots, initial_state)
from .d1q3_super import premark, run_hybrid_step
from .fields import OccupancyField
from .hpp import (HppLayout, build_initialization_hpp, build_step_hpp, decode_distribution_hpp,
                  decode_shots_hpp, initial_state_hpp)
from .lga import D1Q3, HPP, LatticeState
from .noise import PRESETS, NoiseModel, run_noisy_shots
from .statevec import MAX_QUBITS, sample_measurements

MODELS = ("d1q3-binary", "d1q3-super", "hpp")
# a step counts as non-propagating when fewer than this share of the
# particles the automaton would produce are found in the decoded field
FROZEN_FIDELITY = 0.5
WARN_QUBITS = 24


class ConfigError(ValueError):
    pass


class CapacityError(RuntimeError):
    pass


@dataclass
class InitialCondition:
    kind: str = "random-pulse"
    p_inside: float = 0.95
    p_outside: float = 0.05
    region: tuple[float, float] = (0.375, 0.625)
    explicit_field: LatticeState | None = None

    def validate(self) -> None:
        if self.kind not in ("random-pulse", "explicit"):
            raise ConfigError(f"unknown initial condition kind {self.kind!r}")
        for name in ("p_inside", "p_outside"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        a, b = self.region
        if not (0.0 <= a < b <= 1.0):
            raise ConfigError(f"region must satisfy 0 <= start < end <= 1, got {self.region}")
        if self.kind == "explicit" and self.explicit_field is None:
            raise ConfigError("explicit initial condition needs a field")


@dataclass
class ExperimentConfig:
    model: str = "d1q3-binary"
    sites: int = 512
    steps: int = 16
    shots: int | None = None  # None decodes the exact distribution
    noise: NoiseModel = field(default_factory=NoiseModel)
    ensemble: int = 1
    block: int = 32
    seed: int = 0
    initial: InitialCondition = field(default_factory=InitialCondition)
    shared_field: bool = False
    max_trajectories: int | None = None
    workers: int = 1

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.sites < 2 or self.sites & (self.sites - 1):
            raise ConfigError(f"sites must be a power of two >= 2, got {self.sites}")
        if self.model == "hpp":
            side = math.isqrt(self.sites)
            if side * side != self.sites or side < 4:
                raise ConfigError(f"hpp needs sites = N*N with N >= 4 a power of two, got {self.sites}")
        elif self.sites < 4:
            raise ConfigError("D1Q3 models need at least 4 sites")
        if self.block < 1 or self.sites % self.block:
            raise ConfigError(f"block must divide sites ({self.block} does not divide {self.sites})")
        if self.steps < 0:
            raise ConfigError("steps must be >= 0")
        if self.ensemble < 1:
            raise ConfigError("ensemble must be >= 1")
        if self.shots is not None and self.shots < 1:
            raise ConfigError("shots must be >= 1")
        if self.shots is None and not self.noise.is_noiseless:
            raise ConfigError("exact decoding needs the noiseless model; set shots")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        self.initial.validate()
        if self.initial.kind == "explicit":
            f = self.initial.explicit_field
            if f.sites != self.sites or f.model != model_kind(self.model):
                raise ConfigError("explicit field does not match model and sites")

    @property
    def dims(self) -> tuple[int, ...]:
        if self.model == "hpp":
            side = math.isqrt(self.sites)
            return (side, side)
        return (self.sites,)

    def qubits(self) -> int:
        if self.model == "hpp":
            return HppLayout(self.dims[0]).total
        return D1q3Layout.for_sites(self.sites).total

    def to_dict(self) -> dict:
        d = {
            "model": self.model, "sites": self.sites, "steps": self.steps,
            "shots": self.shots, "ensemble": self.ensemble, "block": self.block,
            "seed": self.seed, "shared_field": self.shared_field,
            "max_trajectories": self.max_trajectories,
            "noise": self.noise.as_dict(),
        }
        ini = self.initial
        d["initial"] = {"kind": ini.kind, "p_inside": ini.p_inside, "p_outside": ini.p_outside,
                        "region": list(ini.region)}
        return d


def model_kind(model: str) -> str:
    return HPP if model == "hpp" else D1Q3


def derive_seed(master: int, *path: int) -> int:
    """Independent 64-bit seed for a named sub-stream of ``master``."""
    ss = np.random.SeedSequence([int(master) & (2**64 - 1), *[int(p) for p in path]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# sub-stream tags
_INITIAL, _STEP = 1, 2


def generate_initial(cfg: InitialCondition, sites: int, model: str, seed: int) -> LatticeState:
    """Independent per-channel occupation, denser inside the pulse region."""
    kind = model_kind(model)
    if cfg.kind == "explicit":
        return cfg.explicit_field.copy()
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    a, b = cfg.region
    if kind == D1Q3:
        dims = (sites,)
        pos = np.arange(sites) / sites
        inside = (pos >= a) & (pos < b)
    else:
        side = math.isqrt(sites)
        dims = (side, side)
        pos = np.arange(side) / side
        axis = (pos >= a) & (pos < b)
        inside = (axis[:, None] & axis[None, :]).reshape(-1)  # [x, y] -> k = y + x*N
    p = np.where(inside, cfg.p_inside, cfg.p_outside)
    nch = lga.CHANNELS[kind]
    occ = rng.random((sites, nch)) < p[:, None]
    return LatticeState(kind, dims, occ)


@lru_cache(maxsize=None)
def _d1q3(sites: int):
    lay = D1q3Layout.for_sites(sites)
    step = build_step(lay)
    return lay, step, decompose(step)


@lru_cache(maxsize=None)
def _hpp(side: int):
    lay = HppLayout(side)
    step = build_step_hpp(lay)
    return lay, step, decompose(step)


def _noisy(init: Circuit, step_native: Circuit, cfg: ExperimentConfig, seed: int):
    circ = decompose(init) + step_native
    return run_noisy_shots(circ, cfg.noise, cfg.shots, seed,
                           max_trajectories=cfg.max_trajectories, workers=cfg.workers)


def quantum_step(cfg: ExperimentConfig, current: LatticeState, seed: int, mass_budget: int | None) -> OccupancyField:
    """One quantum time step of ``current`` under ``cfg`` (model, shots, noise)."""
    noisy = not cfg.noise.is_noiseless
    if cfg.model == "d1q3-super":
        decoded, _ = run_hybrid_step(premark(current), cfg.shots, cfg.noise, seed, mass_budget,
                                     max_trajectories=cfg.max_trajectories)
        return decoded
    if cfg.model == "d1q3-binary":
        lay, step, step_native = _d1q3(cfg.sites)
        prepare, build_init = initial_state, build_initialization
        exact, sampled = decode_distribution, decode_shots
    else:
        lay, step, step_native = _hpp(cfg.dims[0])
        prepare, build_init = initial_state_hpp, build_initialization_hpp
        exact, sampled = decode_distribution_hpp, decode_shots_hpp
    if noisy:
        hist = _noisy(build_init(lay, current), step_native, cfg, seed)
        return sampled(hist, lay, mass_budget)
    state = step.run(prepare(lay, current))
    if cfg.shots is None:
        return exact(state.probabilities(lay.measured), lay, mass_budget)
    return sampled(sample_measurements(state, lay.measured, cfg.shots, seed), lay, mass_budget)


def propagation_fidelity(previous: LatticeState, decoded: LatticeState) -> float:
    """Share of the automaton's next-step particles present in ``decoded``."""
    expected = lga.step(previous).channels
    total = int(expected.sum())
    if total == 0:
        return 1.0
    return float((expected & decoded.channels).sum()) / total


@dataclass
class ProfileSeries:
    profiles: np.ndarray  # [steps + 1, sites / block]
    junk: np.ndarray  # [steps + 1]
    frozen: np.ndarray  # [steps + 1], share of members flagged
    metadata: dict = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return self.profiles.shape[0] - 1

    def total_mass(self) -> np.ndarray:
        return self.profiles.sum(axis=1)


def ensemble_average(series: list[ProfileSeries]) -> ProfileSeries:
    if not series:
        raise ValueError("need at least one series")
    shape = series[0].profiles.shape
    if any(s.profiles.shape != shape for s in series):
        raise ValueError("profile shapes differ across ensemble members")
    if len(series) == 1:
        return series[0]
    seeds = [sd for s in series for sd in s.metadata.get("member_seeds", [])]
    meta = {**series[0].metadata, "member_seeds": seeds, "members": len(series)}
    return ProfileSeries(
        np.mean([s.profiles for s in series], axis=0),
        np.mean([s.junk for s in series], axis=0),
        np.mean([s.frozen for s in series], axis=0),
        meta,
    )


def run_member(cfg: ExperimentConfig, member: int) -> tuple[ProfileSeries, ProfileSeries, list[LatticeState]]:
    """Evolve one ensemble member; returns quantum and classical series and the quantum fields."""
    init_seed = derive_seed(cfg.seed, _INITIAL, 0 if cfg.shared_field else member)
    start = generate_initial(cfg.initial, cfg.sites, cfg.model, init_seed)
    budget = start.total_mass()
    classical = lga.run(start, cfg.steps)
    fields = [start]
    junk = np.zeros(cfg.steps + 1)
    frozen = np.zeros(cfg.steps + 1)
    current = start
    for t in range(1, cfg.steps + 1):
        decoded = quantum_step(cfg, current, derive_seed(cfg.seed, _STEP, member, t), budget)
        junk[t] = decoded.junk_fraction
        nxt = current if decoded.no_information else decoded.lattice
        if decoded.no_information or propagation_fidelity(current, nxt) < FROZEN_FIDELITY:
            frozen[t] = 1.0
        fields.append(nxt)
        current = nxt
    meta = {"config": cfg.to_dict(), "member_seeds": [init_seed]}
    quantum = ProfileSeries(np.array([lga.mass_profile(f, cfg.block) for f in fields]), junk, frozen, meta)
    twin = ProfileSeries(np.array([lga.mass_profile(f, cfg.block) for f in classical]),
                         np.zeros(cfg.steps + 1), np.zeros(cfg.steps + 1), meta)
    return quantum, twin, fields


def run_experiment(cfg: ExperimentConfig) -> tuple[ProfileSeries, ProfileSeries]:
    cfg.validate()
    q = cfg.qubits()
    if q > MAX_QUBITS:
        raise CapacityError(f"{q} qubits exceeds simulator capacity ({MAX_QUBITS})")
    quantum, classical = [], []
    for member in range(cfg.ensemble):
        qs, cs, _ = run_member(cfg, member)
        quantum.append(qs)
        classical.append(cs)
    qa, ca = ensemble_average(quantum), ensemble_average(classical)
    for s in (qa, ca):
        s.metadata = {**s.metadata, "qubits": q, "warn_large": q > WARN_QUBITS}
    return qa, ca


def l1_distance(a: ProfileSeries, b: ProfileSeries) -> np.ndarray:
    """Per-step L1 distance between two profile series."""
    return np.abs(a.profiles - b.profiles).sum(axis=1)


def _echo(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), sort_keys=True)


def write_profile_csv(path, quantum: ProfileSeries, classical: ProfileSeries, cfg: ExperimentConfig) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# config: {_echo(cfg)}\n# seed: {cfg.seed}\n")
        w = csv.writer(fh)
        w.writerow(["step", "block_index", "quantum_mass", "classical_mass", "junk_fraction"])
        for t in range(quantum.steps + 1):
            for b in range(quantum.profiles.shape[1]):
                w.writerow([t, b, repr(float(quantum.profiles[t, b])),
                            repr(float(classical.profiles[t, b])), repr(float(quantum.junk[t]))])
    sidecar = {
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "member_seeds": quantum.metadata.get("member_seeds", []),
        "frozen": quantum.frozen.tolist(),
        "qubits": quantum.metadata.get("qubits"),
    }
    path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def read_profile_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns quantum profiles, classical profiles and junk per step."""
    with Path(path).open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")][1:]
    steps = max(int(r[0]) for r in rows) + 1
    blocks = max(int(r[1]) for r in rows) + 1
    q = np.zeros((steps, blocks))
    c = np.zeros((steps, blocks))
    junk = np.zeros(steps)
    for r in rows:
        t, b = int(r[0]), int(r[1])
        q[t, b], c[t, b], junk[t] = float(r[2]), float(r[3]), float(r[4])
    return q, c, junk


def with_noise(cfg: ExperimentConfig, level: str, shots: int | None) -> ExperimentConfig:
    return replace(cfg, noise=PRESETS[level], shots=shots)

