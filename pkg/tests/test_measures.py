import math

import numpy as np
import pytest

from entkit import measures, qla
from entkit.states import (bell, entanglement_entropy, haar_unitary, product_basis_state, random_density,
                           random_pure, werner2, werner_sym)


def test_negativity_sigma_a():
    sa = werner_sym(0.0, 3)
    assert measures.negativity(sa, 1) == pytest.approx(2 / 3, abs=1e-12)
    assert measures.log_negativity(sa, 1) == pytest.approx(math.log2(5 / 3), abs=1e-12)


def test_negativity_product_and_min_eigenvalue(rng):
    assert measures.negativity(product_basis_state("01").density()) == pytest.approx(0, abs=1e-12)
    for _ in range(20):
        rho = random_density(4, rng, (2, 2))
        lam = qla.eig_hermitian(qla.partial_transpose(rho.matrix, 1, (2, 2)))[0][-1]
        assert measures.negativity(rho) == pytest.approx(2 * max(-lam, 0), abs=1e-10)


def test_concurrence_and_eof_bell():
    assert measures.concurrence(bell().density()) == pytest.approx(1)
    assert measures.eof_two_qubit(bell().density()) == pytest.approx(1)


@pytest.mark.parametrize("lam", np.linspace(0, 1, 11))
def test_werner_concurrence(lam):
    rho = werner2(lam)
    assert measures.concurrence(rho) == pytest.approx(max(0, (3 * lam - 1) / 2), abs=1e-9)
    assert measures.negativity(rho) == pytest.approx(measures.concurrence(rho), abs=1e-9)


def test_er_pure_state(rng):
    psi = random_pure((2, 2), rng)
    r = measures.rel_ent_entanglement(psi.density())
    assert r.value == pytest.approx(entanglement_entropy(psi), abs=2e-3)
    assert r.converged


def test_er_separable_is_zero(rng):
    a, b = random_density(2, rng), random_density(2, rng)
    r = measures.rel_ent_entanglement(a @ b)
    assert r.value <= r.gap + 1e-6


def test_er_ppt_reference_sigma_a():
    r = measures.rel_ent_entanglement(werner_sym(0.0, 3), reference="ppt")
    assert r.value == pytest.approx(1, abs=5e-3)


def test_er_fixed_marginals_bell():
    r = measures.rel_ent_entanglement(bell().density(), reference="separable-fixed-marginals")
    assert r.value == pytest.approx(1, abs=5e-3)


def test_lower_bounds_chain(rng):
    for _ in range(5):
        rho = random_density(4, rng, (2, 2))
        er = measures.rel_ent_entanglement(rho, tol=1e-4).value
        assert er <= measures.eof_two_qubit(rho) + 5e-3
        assert measures.entropy_lower_bound(rho) <= er + 5e-3


def test_subadditivity_witness():
    assert measures.subadditivity_witness().value == pytest.approx(math.log2(3), abs=1e-9)


def test_trace_norm_measure_bell():
    r = measures.trace_norm_measure(bell().density())
    assert r.value == pytest.approx(1, abs=1e-2)


def test_trace_norm_measure_separable(rng):
    rho = random_density(2, rng) @ random_density(2, rng)
    assert measures.trace_norm_measure(rho).value == pytest.approx(0, abs=1e-3)


def test_schmidt_measure_werner2():
    assert measures.schmidt_measure_werner2(1 / 3) == 0
    assert measures.schmidt_measure_werner2(1.0) == pytest.approx(1)
    assert measures.schmidt_measure_werner2(0.0) == 0


def test_montecarlo_product_never_violates(rng):
    d = 2
    s = np.kron(random_density(d, rng).matrix, random_density(d, rng).matrix)
    r = np.kron(random_density(d, rng).matrix, random_density(d, rng).matrix)
    prod = np.kron(qla.partial_trace(r, [0], (d, d)), qla.partial_trace(r, [1], (d, d)))
    assert qla.relative_entropy(s, r) == pytest.approx(qla.relative_entropy(s, prod), abs=1e-9)


def test_montecarlo_reports_counts():
    res = measures.conjecture210_frequency(trials=50, seed=3)
    assert res.trials == 50 and 0 <= res.violations <= 50
