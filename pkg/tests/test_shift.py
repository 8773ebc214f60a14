import pytest

from qlga.circuit import Circuit, decompose, resource_report
from qlga.shift import directed_shift, increment
from qlga.statevec import RegisterLayout, new_basis_state


def _final_index(lay, gates, **values):
    s = new_basis_state(lay, lay.index_of(**values))
    Circuit(lay, gates).run(s)
    (idx,) = s.support()
    return lay.split_index(int(idx))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_increment_all_values(n):
    lay = RegisterLayout([("r", n), ("e", 1), ("anc", max(1, n - 2))])
    gates = increment(lay["r"], lay["anc"], enable=(lay["e"][0], 1))
    for v in range(1 << n):
        assert _final_index(lay, gates, r=v, e=1) == {"r": (v + 1) % (1 << n), "e": 1, "anc": 0}
        assert _final_index(lay, gates, r=v, e=0) == {"r": v, "e": 0, "anc": 0}


@pytest.mark.parametrize("n", [2, 3, 5])
def test_directed_shift(n):
    lay = RegisterLayout([("r", n), ("d", 1), ("e", 1), ("anc", max(1, n - 2))])
    gates = directed_shift(lay["r"], lay["anc"], direction=(lay["d"][0], 1), enable=(lay["e"][0], 0))
    size = 1 << n
    for v in range(size):
        assert _final_index(lay, gates, r=v, d=0, e=0)["r"] == (v + 1) % size
        assert _final_index(lay, gates, r=v, d=1, e=0)["r"] == (v - 1) % size
        assert _final_index(lay, gates, r=v, d=1, e=1)["r"] == v


def test_too_few_ancillas():
    with pytest.raises(ValueError):
        increment([0, 1, 2, 3, 4], [], enable=(5, 1))


def test_cx_count_linear():
    counts = []
    for n in range(4, 10):
        lay = RegisterLayout([("r", n), ("e", 1), ("anc", n)])
        c = Circuit(lay, increment(lay["r"], lay["anc"], enable=(lay["e"][0], 1)))
        counts.append(resource_report(decompose(c)).cx_count)
    diffs = [b - a for a, b in zip(counts, counts[1:])]
    assert len(set(diffs)) == 1
