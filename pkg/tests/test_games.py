import math

import numpy as np
import pytest

from entkit import games as G
from entkit.states import haar_unitary

PD = G.prisoners_dilemma()


def test_initial_state_and_projectors():
    assert np.allclose(G.initial_state(0).amplitudes, [1, 0, 0, 0])
    assert np.allclose(G.initial_state(math.pi / 2).amplitudes, np.array([1, 0, 0, 1j]) / math.sqrt(2))
    for g in (0, 0.3, math.pi / 2):
        P = G.measurement_projectors(g)
        gram = np.array([[np.trace(a @ b).real for b in P] for a in P])
        assert np.allclose(gram, np.eye(4), atol=1e-10)
    assert np.allclose([np.diag(p) for p in G.measurement_projectors(0)], np.eye(4))


def test_classical_embedding():
    for spec in (PD, G.chicken(), G.GameSpec((1.0, 2, 3, 4), (5.0, 6, 7, 8), 0.7)):
        for i, (x, y) in enumerate([(G.C(), G.C()), (G.C(), G.D()), (G.D(), G.C()), (G.D(), G.D())]):
            assert G.payoff(spec, x, y) == pytest.approx((spec.payoffA[i], spec.payoffB[i]), abs=1e-12)


def test_s1_is_classical_mixing(rng):
    A = np.array(PD.payoffA).reshape(2, 2)
    for _ in range(20):
        ta, tb = rng.random(2) * math.pi
        pa, pb = math.cos(ta / 2) ** 2, math.cos(tb / 2) ** 2
        want = np.array([pa, 1 - pa]) @ A @ np.array([pb, 1 - pb])
        got = G.payoff(PD, G.StrategyPoint("S1", (ta,)), G.StrategyPoint("S1", (tb,)))[0]
        assert got == pytest.approx(want, abs=1e-12)


def test_closed_form_agrees(rng):
    for _ in range(50):
        a = G.StrategyPoint("S2", (rng.random() * math.pi, rng.random() * math.pi / 2))
        b = G.StrategyPoint("S2", (rng.random() * math.pi, rng.random() * math.pi / 2))
        assert G.payoff(PD, a, b) == pytest.approx(G.payoff_closed_form(PD, a, b), abs=1e-10)


def test_global_phase_invariance(rng):
    for _ in range(10):
        U, V = haar_unitary(2, rng), haar_unitary(2, rng)
        ph = np.exp(1j * rng.random(2) * 2 * math.pi)
        assert G.payoff(PD, U, V) == pytest.approx(G.payoff(PD, ph[0] * U, ph[1] * V), abs=1e-12)


def test_golden_payoffs():
    assert G.payoff(PD, G.Q(), G.Q()) == pytest.approx((3, 3))
    assert G.payoff(G.chicken(), G.Q(), G.Q()) == pytest.approx((6, 6))
    assert G.payoff(G.chicken(), G.D(), G.Q())[1] == pytest.approx(8)
    assert G.payoff(G.chicken(), G.D(), G.C())[1] == pytest.approx(2)


def test_focal():
    assert G.focal_payoff(PD) == (2.25, 2.25)
    assert G.focal_payoff(G.chicken()) == (4, 4)
    assert G.focal_payoff(G.GameSpec((0.0,) * 4, (0.0,) * 4)) == (0, 0)


def test_optimal_answer_against_q():
    assert G.payoff(PD, G.Q(), G.optimal_answer(G.Q().unitary()))[1] == pytest.approx(5)


def test_bad_gamma():
    with pytest.raises(G.BadParameter):
        G.initial_state(2.0)
