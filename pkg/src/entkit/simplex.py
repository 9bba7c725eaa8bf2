"""Dense tableau simplex over exact rationals with Bland's pivoting rule."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class Infeasible(ValueError):
    pass


class Unbounded(ValueError):
    pass


@dataclass
class SimplexResult:
    x: list
    objective: object
    basis: list
    pivots: int


def maximize(c, A, b, basis, zero=Fraction(0)):
    """Maximize c.x subject to A x = b, x >= 0, from a feasible starting basis.

    `basis` lists one column per row whose submatrix is invertible and
    whose basic solution is non-negative. Works with Fraction or float
    entries; with floats pass a small positive `zero` used as tolerance.
    """
    m, n = len(A), len(c)
    T = [list(row) + [bi] for row, bi in zip(A, b)]
    basis = list(basis)
    # bring the starting basis into canonical form
    for r, col in enumerate(basis):
        piv = next((i for i in range(r, m) if abs(T[i][col]) > zero), None)
        if piv is None:
            raise Infeasible("starting basis is singular")
        T[r], T[piv] = T[piv], T[r]
        _pivot(T, r, col)
    if any(T[i][-1] < -zero for i in range(m)):
        raise Infeasible("starting basis is not primal feasible")

    pivots = 0
    while True:
        # reduced costs c_j - c_B B^-1 A_j
        red = [c[j] - sum(c[basis[i]] * T[i][j] for i in range(m)) for j in range(n)]
        enter = next((j for j in range(n) if j not in basis and red[j] > zero), None)
        if enter is None:
            break
        best, leave = None, None
        for i in range(m):
            a = T[i][enter]
            if a > zero:
                ratio = T[i][-1] / a
                # Bland: smallest ratio, ties by smallest basic index
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise Unbounded(f"column {enter} unbounded")
        _pivot(T, leave, enter)
        basis[leave] = enter
        pivots += 1

    x = [zero * 0] * n
    for i, col in enumerate(basis):
        x[col] = T[i][-1]
    obj = sum(ci * xi for ci, xi in zip(c, x))
    return SimplexResult(x, obj, basis, pivots)


def _pivot(T, r, col):
    pr = T[r]
    p = pr[col]
    if p != 1:
        pr = [v / p for v in pr]
        T[r] = pr
    for i, row in enumerate(T):
        if i != r:
            f = row[col]
            if f:
                T[i] = [a - f * bb for a, bb in zip(row, pr)]
