"""Modular increment/decrement of a lattice register.

The adder is a carry ladder of Toffolis over an ancilla block, so an
``n``-bit increment with an enable qubit costs ``2n - 3`` Toffolis and
``n - 1`` CX using ``n - 2`` ancillas; the CX count is linear in ``n``.
"""

from __future__ import annotations

from typing import Sequence

from . import gates as G
from .gates import Gate


def ancillas_needed(nbits: int, enabled: bool = True) -> int:
    chain = nbits + (1 if enabled else 0)
    return max(0, chain - 3)


def increment(
    bits: Sequence[int], ancillas: Sequence[int], enable: tuple[int, int] | None = None
) -> list[Gate]:
    """Add one (mod ``2**len(bits)``) to the register ``bits`` (MSB first).

    ``enable`` is an optional ``(wire, value)`` condition; with it the add only
    happens on that branch.
    """
    lsb_first = list(reversed(bits))
    q = ([enable[0]] if enable else []) + lsb_first
    m = len(q) - 1
    need = max(0, m - 2)
    if len(ancillas) < need:
        raise ValueError(f"increment of {len(bits)} bits needs {need} ancillas, got {len(ancillas)}")
    if m < 0:
        return []
    if m == 0:
        body = [G.x(q[0])]
    elif m == 1:
        body = [G.cx(q[0], q[1])]
    else:
        anc = list(ancillas[:need])
        # and_wire[j] holds AND(q[0..j])
        and_wire = {0: q[0]}
        body = []
        for j in range(1, m - 1):
            body.append(G.ccx(and_wire[j - 1], q[j], anc[j - 1]))
            and_wire[j] = anc[j - 1]
        body.append(G.ccx(and_wire[m - 2], q[m - 1], q[m]))
        for j in range(m - 1, 0, -1):
            if j <= m - 2:
                body.append(G.ccx(and_wire[j - 1], q[j], anc[j - 1]))
            body.append(G.cx(and_wire[j - 1], q[j]))
    if not enable:
        if m >= 1:
            body.append(G.x(q[0]))
        return body
    if enable[1] == 0:
        return [G.x(enable[0])] + body + [G.x(enable[0])]
    return body


def directed_shift(
    bits: Sequence[int],
    ancillas: Sequence[int],
    direction: tuple[int, int],
    enable: tuple[int, int] | None = None,
) -> list[Gate]:
    """Increment, or decrement on the branch where ``direction`` holds.

    Decrement is the increment conjugated by bitwise NOT; the NOT is made
    conditional with one CX per lattice bit.
    """
    dwire, dval = direction
    flip = [G.cx(dwire, b) for b in bits]
    if dval == 0:
        flip = [G.x(dwire)] + flip + [G.x(dwire)]
    return flip + increment(bits, ancillas, enable) + flip
