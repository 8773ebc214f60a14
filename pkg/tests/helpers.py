"""Shared test helpers."""

import numpy as np

from qlga import gates as G


def random_gate(rng, q):
    kind = rng.choice(["H", "X", "T", "RY", "RZ", "SX", "CX", "MCX", "SWAP", "MCSWAP", "MCH"])
    wires = [int(w) for w in rng.permutation(q)]
    if kind in ("H", "X", "T", "SX"):
        return G.single(str(kind), wires[0])
    if kind in ("RY", "RZ"):
        return G.single(str(kind), wires[0], float(rng.uniform(0, 2 * np.pi)))
    if kind == "CX":
        return G.cx(wires[0], wires[1])
    if kind == "SWAP":
        return G.swap(wires[0], wires[1])
    k = int(rng.integers(1, min(3, q - 2) + 1))
    ctl = [(w, int(rng.integers(0, 2))) for w in wires[2:2 + k]]
    if kind == "MCSWAP":
        return G.mcswap(ctl, wires[0], wires[1])
    if kind == "MCH":
        return G.mch(ctl, wires[0])
    return G.mcx(ctl, wires[0])


def every_gate_kind():
    """One instance of each gate kind on three wires."""
    yield from (G.single(k, 0) for k in ("X", "Y", "Z", "H", "S", "SDG", "T", "TDG", "SX"))
    yield from (G.single(k, 0, 0.7) for k in ("RZ", "RY", "P"))
    yield G.swap(0, 1)
    yield G.cx(0, 1)
    yield G.ccx(0, 1, 2)
    yield G.mcx([(0, 0), (1, 1)], 2)
    yield G.mcswap([(2, 1)], 0, 1)
    yield G.mch([(0, 1), (1, 0)], 2)
