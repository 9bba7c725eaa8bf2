import math
from fractions import Fraction as F

import numpy as np
import pytest

from entkit import werner_lp

LP_OPTIMA = {
    1: [F(1, 2), F(1, 2)],
    2: [F(2, 3), 0, F(1, 3)],
    3: [F(4, 5), 0, 0, F(1, 5)],
    4: [F(3, 8), F(1, 2), 0, 0, F(1, 8)],
    5: [F(33, 106), F(45, 106), F(10, 53), 0, 0, F(4, 53)],
    6: [F(23, 87), F(30, 87), F(30, 87), 0, 0, 0, F(4, 87)],
    7: [F(7, 24), F(7, 72), F(7, 12), 0, 0, 0, 0, F(1, 36)],
}


@pytest.mark.parametrize("n", sorted(LP_OPTIMA))
def test_lp_optimal_vectors(n):
    sol = werner_lp.max_antisym_weight(n)
    assert list(sol.p) == LP_OPTIMA[n]
    assert werner_lp.ppt_constraints(n).feasible([float(x) for x in sol.p])


def test_series_first_values():
    want = [1, math.log2(3) / 2, math.log2(5) / 3, 3 / 4, math.log2(13.25) / 5,
            math.log2(21.75) / 6, math.log2(36) / 7]
    assert np.allclose(werner_lp.e_series_antisym(7), want, atol=1e-9, rtol=0)


def test_full_space_ppt_crosscheck():
    for n in (1, 2):
        p = [float(x) for x in werner_lp.max_antisym_weight(n).p]
        assert werner_lp.full_space_ppt(p)


def test_general_lambda_zero_matches_lp():
    r = werner_lp.e_general(3, 0.0)
    assert r.value == pytest.approx(werner_lp.e_antisym(3))


def test_general_lambda_interior():
    r = werner_lp.e_general(3, 0.2)
    assert r.converged
    assert 0 <= r.value <= werner_lp.e_antisym(3) + 1e-9
    assert werner_lp.ppt_constraints(3).feasible(r.p, tol=1e-7)


def test_lambda_half_is_separable():
    # (sigma_s + sigma_a)/2 on C3 x C3 is PPT; the divergence vanishes
    assert werner_lp.e_general(2, 0.5).value == pytest.approx(0, abs=1e-6)
