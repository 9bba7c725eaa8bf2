import math
from itertools import permutations

import numpy as np
import pytest

from entkit import perm_distill as P
from entkit.states import BadParameter, bell, random_pure


def test_multiplicities_and_weights():
    assert (P.multiplicity(1, 1), P.multiplicity(1, 0)) == (1, 1)
    assert (P.weight(1, 1), P.weight(1, 0)) == (P.Fraction(3, 4), P.Fraction(1, 4))
    assert [P.multiplicity(2, j) for j in (2, 1, 0)] == [1, 3, 2]
    assert [P.multiplicity(2, j) ** 2 * P.weight(2, j) for j in (2, 1, 0)] == \
        [P.Fraction(5, 16), P.Fraction(9, 16), P.Fraction(2, 16)]
    with pytest.raises(BadParameter):
        P.multiplicity(2, P.Fraction(1, 2))


@pytest.mark.parametrize("n", [2, 6, 20, 60])
def test_weight_normalization(n):
    J = P.Fraction(n, 2)
    assert sum(P.multiplicity(J, j) ** 2 * P.weight(J, j) for j in P.spins(n)) == 1
    for alpha in np.linspace(0, 1, 11):
        assert sum(P.block_weights(n, alpha).values()) == pytest.approx(1, abs=1e-12)


def test_bell_pairs_n2():
    r = P.distillable_after_permutation(2, 0.5)
    assert r.D_after == pytest.approx(0.75 * math.log2(3), abs=1e-12)
    assert r.ratio == pytest.approx(1, abs=1e-9)


def test_n4_value():
    r = P.distillable_after_permutation(4, 0.5)
    assert r.D_after == pytest.approx(5 / 16 * math.log2(5) + 9 / 16 * math.log2(3), abs=1e-12)


@pytest.mark.parametrize("alpha", np.linspace(0, 1, 11))
def test_two_pair_curve(alpha):
    r = P.distillable_after_permutation(2, alpha)
    o = P.oracle_report(2, alpha)
    assert r.D_after == pytest.approx(P.full_form_n2(alpha), abs=1e-9)
    assert r.D_after == pytest.approx(o.D_after, abs=1e-9)
    assert r.info_loss == pytest.approx(o.info_loss, abs=1e-9)
    assert r.ratio == pytest.approx(1, abs=1e-9)


def test_oracle_bell_spectrum():
    o = P.brute_force_oracle(bell(), 2)
    w = np.sort(np.linalg.eigvalsh(o.sigma))[::-1]
    assert np.allclose(w[:2], [0.75, 0.25]) and np.allclose(w[2:], 0)


def test_oracle_invariance():
    sigma = P.brute_force_oracle(P.pair_state(0.3), 3).sigma
    for pa in permutations(range(3)):
        for pb in permutations(range(3)):
            U = np.kron(P._perm_operator(pa, 3), P._perm_operator(pb, 3))
            assert np.abs(U @ sigma @ U.T - sigma).max() < 1e-9


def test_odd_n_oracle_ratio():
    for alpha in (0.2, 0.5):
        assert P.oracle_report(3, alpha).ratio <= 1 + 1e-9


def test_oracle_size_limit():
    with pytest.raises(P.DimensionTooLarge):
        P.brute_force_oracle(bell(), 4)


def test_closed_form_rejects_odd():
    with pytest.raises(BadParameter):
        P.distillable_after_permutation(3, 0.5)


def test_ratio_never_exceeds_one():
    for n in range(2, 61, 2):
        for alpha in np.linspace(0, 1, 11):
            r = P.distillable_after_permutation(n, alpha)
            assert r.ratio <= 1 + 1e-9
            assert min(r.D_before, r.D_after, r.info_loss) >= -1e-12


def test_reordered_ancilla_spectrum_and_information():
    w = np.sort(np.linalg.eigvalsh(P.reordered_ancilla_state()))[::-1]
    assert np.allclose(w[:2], [0.75, 0.25]) and np.allclose(w[2:], 0)
    r = P.asymmetric_example53()
    assert r.info_loss == pytest.approx(2 - 0.75 * math.log2(3), abs=1e-9)
    assert r.D_after == pytest.approx(0.75 * math.log2(3) - 0.5, abs=1e-9)
    assert r.ratio < 1


def test_rel_ent_bound_single_member():
    psi = random_pure((2, 2), np.random.default_rng(1))
    d, i, _ = P.rel_ent_information_bound([(1.0, psi)])
    assert d == pytest.approx(0, abs=2e-3) and i == pytest.approx(0, abs=1e-9)
