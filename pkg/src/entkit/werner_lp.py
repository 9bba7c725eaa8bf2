"""PPT-constrained linear program for tensor powers of the antisymmetric Werner state.

Copies of sigma_a and sigma_s are counted by k (number of sigma_a factors).
A permutation-symmetric reference state is fixed by weights p_0..p_n; its
partial transpose is positive iff every row of the reduced constraint system
is non-negative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import simplex
from .simplex import Infeasible

EXACT_MAX_N = 64


@dataclass(frozen=True)
class PptConstraintSystem:
    n: int
    coeffs: tuple  # coeffs[s][k], Fractions

    def as_float(self):
        return np.array([[float(v) for v in row] for row in self.coeffs])

    def feasible(self, p, tol=1e-10):
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= -tol) and abs(p.sum() - 1) <= 1e-9
                    and np.all(self.as_float() @ p >= -tol))


@dataclass(frozen=True)
class LpSolution:
    p: tuple
    objective: object
    status: str


@lru_cache(maxsize=None)
def ppt_constraints(n):
    if not 1 <= n <= EXACT_MAX_N:
        raise ValueError(f"n={n} outside 1..{EXACT_MAX_N}")
    half = Fraction(-1, 2)
    rows = []
    for s in range(n + 1):
        row = []
        for k in range(n + 1):
            acc = sum(half ** l * math.comb(n - s, k - l) * math.comb(s, l)
                      for l in range(max(0, k - (n - s)), min(k, s) + 1))
            row.append(acc * 2 ** k / math.comb(n, k))
        rows.append(tuple(row))
    return PptConstraintSystem(n, tuple(rows))


def simplex_maximize(objective, system):
    """Maximise a linear objective over {p >= 0, sum p = 1, C p >= 0}.

    Standard form uses slacks t_s = (C p)_s >= 0. The point p_0 = 1 is
    always feasible, so it seeds the starting basis.
    """
    n = system.n
    nv = n + 1
    zero, one = Fraction(0), Fraction(1)
    A, b = [], []
    for s, row in enumerate(system.coeffs):
        slack = [zero] * nv
        slack[s] = -one
        A.append(list(row) + slack)
        b.append(zero)
    A.append([one] * nv + [zero] * nv)
    b.append(one)
    c = [Fraction(v) for v in objective] + [zero] * nv
    basis = list(range(nv, 2 * nv)) + [0]
    try:
        res = simplex.maximize(c, A, b, basis)
    except Infeasible:
        return LpSolution(tuple(), None, "infeasible")
    return LpSolution(tuple(res.x[:nv]), res.objective, "optimal")


@lru_cache(maxsize=None)
def max_antisym_weight(n):
    obj = [0] * n + [1]
    sol = simplex_maximize(obj, ppt_constraints(n))
    return sol


def e_antisym(n):
    """Per-copy relative entropy bound for n copies of sigma_a."""
    p_n = max_antisym_weight(n).p[n]
    return -math.log2(p_n) / n


def e_series_antisym(n_max):
    return [e_antisym(n) for n in range(1, n_max + 1)]


def binomial_weights(n, lam):
    return np.array([math.comb(n, k) * lam ** (n - k) * (1 - lam) ** k for k in range(n + 1)])


@dataclass(frozen=True)
class GeneralResult:
    value: float
    p: tuple
    converged: bool
    kkt_residual: float


def e_general(n, lam, tol=1e-9):
    """Per-copy relative entropy of (lam sigma_s + (1-lam) sigma_a)^{(x)n} to the PPT polytope.

    Both states share the same sector decomposition, so the objective is
    the classical divergence between the binomial weights and p.
    """
    if not 0 <= lam <= 1:
        raise ValueError("lambda outside [0, 1]")
    if lam == 0:
        sol = max_antisym_weight(n)
        return GeneralResult(e_antisym(n), tuple(float(v) for v in sol.p), True, 0.0)
    import cvxpy as cp

    w = binomial_weights(n, lam)
    C = ppt_constraints(n).as_float()
    p = cp.Variable(n + 1)
    supp = w > 0
    obj = cp.Maximize(w[supp] @ cp.log(p[supp]))
    prob = cp.Problem(obj, [p >= 0, cp.sum(p) == 1, C @ p >= 0])
    prob.solve(solver=cp.CLARABEL)
    pv = np.clip(np.asarray(p.value, dtype=float), 0, None)
    pv = pv / pv.sum()
    val = float(np.sum(w[supp] * np.log2(w[supp] / np.maximum(pv[supp], 1e-300)))) / n
    # KKT: stationarity residual of the log objective against the constraint duals
    resid = _kkt_residual(w, pv, C)
    return GeneralResult(val, tuple(pv), prob.status == "optimal" and resid < max(tol, 1e-6), resid)


def _kkt_residual(w, p, C):
    """Optimality gap of p via the linearised problem (Frank-Wolfe gap over the polytope)."""
    from scipy.optimize import linprog

    supp = w > 0
    grad = np.zeros_like(p)
    grad[supp] = -w[supp] / np.maximum(p[supp], 1e-300) / math.log(2)
    n1 = p.size
    res = linprog(grad, A_ub=-C, b_ub=np.zeros(C.shape[0]), A_eq=np.ones((1, n1)), b_eq=[1],
                  bounds=[(0, None)] * n1, method="highs")
    return float(grad @ p - res.fun) if res.success else float("inf")


def reference_state(p, dims=3):
    """Assemble the full-space reference state for n = len(p) - 1 copies.

    Tensor factor order is (A1 B1)(A2 B2)...; each sector k is the uniform
    average over placements of k normalized sigma_a factors.
    """
    from .states import werner_sym

    n = len(p) - 1
    sa = werner_sym(0.0, dims).matrix
    ss = werner_sym(1.0, dims).matrix
    D = dims ** (2 * n)
    rho = np.zeros((D, D), dtype=complex)
    for k in range(n + 1):
        if p[k] == 0:
            continue
        places = list(combinations(range(n), k))
        for pl in places:
            m = np.ones((1, 1))
            for i in range(n):
                m = np.kron(m, sa if i in pl else ss)
            rho += float(p[k]) / len(places) * m
    return rho


def full_space_ppt(p, dims=3, tol=1e-10):
    """PPT test of the assembled reference state across the Alice|Bob cut."""
    from .qla import permute_subsystems, partial_transpose

    n = len(p) - 1
    rho = reference_state(p, dims)
    order = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
    m = permute_subsystems(rho, (dims,) * (2 * n), order)
    pt = partial_transpose(m, 1, (dims ** n, dims ** n))
    return bool(np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0] >= -tol)
