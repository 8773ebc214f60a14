"""Basis-string loading shared by the binary-encoded models.

A field is loaded as ``2**-n/2 * sum_i |i>_l |code(i)>_c``: Hadamards on the
lattice register, then one site-addressed MCX per occupied channel.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import gates as G
from .gates import Gate
from .statevec import RegisterLayout, StateVector, new_state


def gray_order(n: int) -> list[int]:
    return [g ^ (g >> 1) for g in range(1 << n)]


def site_controls(l_wires: Sequence[int], site: int) -> list[tuple[int, int]]:
    """Controls that fire only when ``l`` holds ``site`` (MSB first)."""
    n = len(l_wires)
    return [(w, (site >> (n - 1 - k)) & 1) for k, w in enumerate(l_wires)]


def loading_gates(l_wires: Sequence[int], c_wires: Sequence[int], channels: np.ndarray) -> list[Gate]:
    """Hadamards plus per-site MCX, sites visited in Gray-code order.

    Consecutive sites then differ in one control, so after decomposition
    most of each V-chain cancels against its neighbour.
    """
    out = [G.h(q) for q in l_wires]
    for site in gray_order(len(l_wires)):
        ctl = site_controls(l_wires, site)
        for ch, occupied in enumerate(channels[site]):
            if occupied:
                out.append(G.mcx(ctl, c_wires[ch]))
    return out


def loaded_state(layout: RegisterLayout, codes: np.ndarray) -> StateVector:
    """The state ``loading_gates`` prepares, written amplitude by amplitude."""
    sites = len(codes)
    state = new_state(layout.total, layout)
    state.amplitudes[0] = 0.0
    shift = sum(w for name, w in layout.blocks[2:])
    c_width = layout.blocks[1][1]
    idx = ((np.arange(sites, dtype=np.int64) << c_width) | np.asarray(codes, dtype=np.int64)) << shift
    state.amplitudes[idx] = 1.0 / math.sqrt(sites)
    return state
