"""Decoded occupancy fields and the ranked, mass-budgeted channel filling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lga import MASS, LatticeState


class DecodeError(ValueError):
    pass


@dataclass
class OccupancyField:
    lattice: LatticeState
    junk_fraction: float = 0.0
    no_information: bool = False

    @property
    def channels(self) -> np.ndarray:
        return self.lattice.channels


def fill_ranked(
    candidates: list[tuple[float, int, int, int]],
    model: str,
    dims: tuple[int, ...],
    mass_budget: int | None,
) -> LatticeState:
    """Occupy channels from ``(weight, outcome, site, channel)`` candidates.

    Candidates are taken by descending weight, ties by ascending outcome
    index.  Each accepted particle spends its mass from ``mass_budget``;
    candidates that no longer fit are skipped.  ``None`` accepts everything.
    """
    out = LatticeState.empty(model, dims)
    mass = MASS[out.model]
    remaining = mass_budget
    for weight, _, site, ch in sorted(candidates, key=lambda c: (-c[0], c[1])):
        if remaining is not None and remaining <= 0:
            break
        if out.channels[site, ch]:
            continue
        m = int(mass[ch])
        if remaining is not None:
            if m > remaining:
                continue
            remaining -= m
        out.channels[site, ch] = True
    return out


def check_budget(mass_budget: int | None, lattice_capacity: int) -> None:
    if mass_budget is None:
        return
    if mass_budget < 0:
        raise DecodeError("mass budget must be non-negative")
    if mass_budget > lattice_capacity:
        raise DecodeError(
            f"mass budget {mass_budget} exceeds lattice capacity {lattice_capacity}"
        )
