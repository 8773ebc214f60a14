"""Classical lattice-gas automata (D1Q3 and HPP) on periodic lattices.

Channel order is fixed throughout the package:

* D1Q3: ``n1`` right, ``n2`` left, ``n3`` rest (mass 2).
* HPP:  ``n1`` +x, ``n2`` +y, ``n3`` -x, ``n4`` -y.

HPP sites are stored flat with ``k = y + x * N``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

D1Q3 = "D1Q3"
HPP = "HPP"
CHANNELS = {D1Q3: 3, HPP: 4}
MASS = {D1Q3: np.array([1, 1, 2]), HPP: np.array([1, 1, 1, 1])}


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass
class LatticeState:
    model: str
    dims: tuple[int, ...]
    channels: np.ndarray  # bool [sites, channels]

    def __post_init__(self):
        self.model = self.model.upper()
        if self.model not in CHANNELS:
            raise ValueError(f"unknown model {self.model!r}")
        self.dims = tuple(int(d) for d in self.dims)
        if self.model == D1Q3 and len(self.dims) != 1:
            raise ValueError("D1Q3 lattices are one-dimensional")
        if self.model == HPP and (len(self.dims) != 2 or self.dims[0] != self.dims[1]):
            raise ValueError("HPP lattices are square (N, N)")
        if not all(_is_pow2(d) for d in self.dims):
            raise ValueError(f"lattice dimensions must be powers of two, got {self.dims}")
        self.channels = np.asarray(self.channels, dtype=bool)
        want = (self.sites, CHANNELS[self.model])
        if self.channels.shape != want:
            raise ValueError(f"channel array shape {self.channels.shape}, expected {want}")

    @property
    def sites(self) -> int:
        return int(np.prod(self.dims))

    @property
    def num_channels(self) -> int:
        return CHANNELS[self.model]

    @classmethod
    def empty(cls, model: str, dims) -> "LatticeState":
        dims = (dims,) if np.isscalar(dims) else tuple(dims)
        model = model.upper()
        return cls(model, dims, np.zeros((int(np.prod(dims)), CHANNELS[model]), dtype=bool))

    def copy(self) -> "LatticeState":
        return LatticeState(self.model, self.dims, self.channels.copy())

    def __eq__(self, other):
        return (
            isinstance(other, LatticeState)
            and self.model == other.model
            and self.dims == other.dims
            and np.array_equal(self.channels, other.channels)
        )

    def codes(self) -> np.ndarray:
        """Per-site channel pattern as an integer, first channel most significant."""
        c = self.num_channels
        weights = 1 << np.arange(c - 1, -1, -1)
        return self.channels.astype(np.int64) @ weights

    @classmethod
    def from_codes(cls, model: str, dims, codes) -> "LatticeState":
        model = model.upper()
        c = CHANNELS[model]
        codes = np.asarray(codes, dtype=np.int64)
        bits = (codes[:, None] >> np.arange(c - 1, -1, -1)) & 1
        dims = (dims,) if np.isscalar(dims) else tuple(dims)
        return cls(model, dims, bits.astype(bool))

    def site_masses(self) -> np.ndarray:
        return self.channels.astype(np.int64) @ MASS[self.model]

    def total_mass(self) -> int:
        return int(self.site_masses().sum())

    def momentum(self):
        n = self.channels.astype(np.int64).sum(axis=0)
        if self.model == D1Q3:
            return int(n[0] - n[1])
        return int(n[0] - n[2]), int(n[1] - n[3])

    def particle_count(self) -> int:
        return int(self.channels.sum())

    # csv: one row per site, one column per channel
    def to_csv(self, path) -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            chans = [f"n{i + 1}" for i in range(self.num_channels)]
            if self.model == D1Q3:
                w.writerow(["site", *chans])
                for k, row in enumerate(self.channels.astype(int)):
                    w.writerow([k, *row])
            else:
                n = self.dims[0]
                w.writerow(["x", "y", *chans])
                for k, row in enumerate(self.channels.astype(int)):
                    w.writerow([k // n, k % n, *row])

    @classmethod
    def from_csv(cls, path) -> "LatticeState":
        with Path(path).open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
        header, body = rows[0], rows[1:]
        if header[0] == "site":
            chans = np.array([[int(v) for v in r[1:]] for r in body], dtype=bool)
            order = np.argsort([int(r[0]) for r in body])
            return cls(D1Q3, (len(body),), chans[order])
        n = int(round(np.sqrt(len(body))))
        chans = np.zeros((len(body), 4), dtype=bool)
        for r in body:
            x, y = int(r[0]), int(r[1])
            chans[y + x * n] = [int(v) for v in r[2:]]
        return cls(HPP, (n, n), chans)


def _collision_table(model: str) -> np.ndarray:
    size = 1 << CHANNELS[model]
    table = np.arange(size)
    a, b = (0b110, 0b001) if model == D1Q3 else (0b1010, 0b0101)
    table[a], table[b] = b, a
    return table


_TABLES = {m: _collision_table(m) for m in CHANNELS}


def collide(state: LatticeState) -> LatticeState:
    """Per-site collision lookup; all other channel patterns are fixed."""
    return LatticeState.from_codes(state.model, state.dims, _TABLES[state.model][state.codes()])


def propagate(state: LatticeState) -> LatticeState:
    ch = state.channels
    out = np.empty_like(ch)
    if state.model == D1Q3:
        out[:, 0] = np.roll(ch[:, 0], 1)
        out[:, 1] = np.roll(ch[:, 1], -1)
        out[:, 2] = ch[:, 2]
    else:
        n = state.dims[0]
        grid = ch.reshape(n, n, 4)  # [x, y, channel] since k = y + x*N
        moved = np.empty_like(grid)
        moved[..., 0] = np.roll(grid[..., 0], 1, axis=0)
        moved[..., 1] = np.roll(grid[..., 1], 1, axis=1)
        moved[..., 2] = np.roll(grid[..., 2], -1, axis=0)
        moved[..., 3] = np.roll(grid[..., 3], -1, axis=1)
        out = moved.reshape(n * n, 4)
    return LatticeState(state.model, state.dims, out)


def step(state: LatticeState) -> LatticeState:
    """One time step: collision followed by propagation."""
    return propagate(collide(state))


def run(state: LatticeState, steps: int) -> list[LatticeState]:
    out = [state]
    for _ in range(steps):
        out.append(step(out[-1]))
    return out


def mass_profile(state: LatticeState, block: int) -> np.ndarray:
    """Sum of site masses over contiguous, aligned blocks of ``block`` sites."""
    sites = state.sites
    if block < 1 or sites % block:
        raise ValueError(f"block must divide sites ({block} does not divide {sites})")
    return state.site_masses().reshape(-1, block).sum(axis=1).astype(float)


def site_index(x: int, y: int, n: int) -> int:
    if not (0 <= x < n and 0 <= y < n):
        raise ValueError(f"coordinates ({x}, {y}) outside a {n}x{n} lattice")
    return y + x * n
