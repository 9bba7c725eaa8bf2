import math

import pytest

from entkit import schmidt
from entkit.states import bell, ghz, w_state

L3 = math.log2(3)
FOUR_QUBIT = {
    "GHZ": [1, 1, 1, 1, 1, 1, 1],
    "W": [2, L3, L3, 1, 1, 1, 1],
    "cluster": [2, 1, 1, 1, 2, 2, 1],
    "phi+phi+": [2, 1, 1, 0, 2, 2, 1],
}


@pytest.fixture(scope="module")
def table():
    return schmidt.four_qubit_table()


@pytest.mark.parametrize("name", sorted(FOUR_QUBIT))
def test_four_qubit_column(table, name):
    for b, want in zip(table[name], FOUR_QUBIT[name]):
        assert b.exact
        assert b.lower == pytest.approx(want, abs=1e-12)


def test_three_party_examples():
    assert schmidt.schmidt_measure_bounds(ghz(3), "A1A2A3").lower == pytest.approx(1)
    b = schmidt.schmidt_measure_bounds(w_state(3), "A1A2A3")
    assert b.exact and b.lower == pytest.approx(L3)


def test_bounds_ordered():
    b = schmidt.schmidt_measure_bounds(bell() @ bell(), "A1A2A3A4")
    assert b.lower <= b.upper


@pytest.mark.parametrize("lam", [0.1, 0.5, 0.9, 1.0])
def test_ghz_mixture_column(lam):
    assert all(v == pytest.approx(lam, abs=1e-12) for v in schmidt.ghz_mixture_table([lam])[lam].values())


def test_bad_split():
    with pytest.raises(schmidt.BadSplit):
        schmidt.parse_split("(A1A2)A2", 3)
