"""Pure-state LOCC and catalysed-LOCC transformation criteria.

Spectra are Schmidt coefficients as probabilities. `majorizes(x, y)` tests
x < y in the majorization order, which is the condition for x -> y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import StateVector, schmidt

TOL = 1e-12


class BadEnsemble(ValueError):
    pass


class BadInput(ValueError):
    pass


@dataclass(frozen=True)
class TransformVerdict:
    possible: str  # "yes", "no" or "unknown"
    witness: object = None
    detail: dict = None

    def __bool__(self):
        return self.possible == "yes"

    def to_dict(self):
        out = {"possible": self.possible}
        if self.witness is not None:
            w = self.witness
            out["witness"] = w.tolist() if isinstance(w, np.ndarray) else w
        if self.detail:
            out.update(self.detail)
        return out


def spectrum_of(x, cut=(0,)):
    """Descending normalized Schmidt spectrum of a vector, or of a given list."""
    if isinstance(x, StateVector):
        v = schmidt(x, cut).coefficients
    else:
        v = np.asarray(x, dtype=float).ravel()
        if np.any(v < -TOL):
            raise BadInput("negative spectrum entry")
    v = np.clip(v, 0, None)
    s = v.sum()
    if s <= 0:
        raise BadInput("empty spectrum")
    return np.sort(v / s)[::-1]


def _pad(x, y):
    n = max(len(x), len(y))
    return np.pad(x, (0, n - len(x))), np.pad(y, (0, n - len(y)))


def majorization_violation(x, y, tol=TOL):
    """First 1-based k with sum_{i<=k} x_i > sum_{i<=k} y_i, else None."""
    x, y = _pad(np.sort(np.asarray(x, float))[::-1], np.sort(np.asarray(y, float))[::-1])
    cx, cy = np.cumsum(x), np.cumsum(y)
    bad = np.nonzero(cx > cy + tol)[0]
    return int(bad[0]) + 1 if bad.size else None


def majorizes(x, y, tol=TOL):
    """True iff x is majorized by y."""
    return majorization_violation(x, y, tol) is None


def nielsen_transformable(psi, phi, cut=(0,)):
    a, b = spectrum_of(psi, cut), spectrum_of(phi, cut)
    k = majorization_violation(a, b)
    return TransformVerdict("yes") if k is None else TransformVerdict("no", k)


def kron_spectrum(x, w):
    return np.sort(np.outer(x, w).ravel())[::-1]


def catalyst_enables(psi, phi, omega, cut=(0,)):
    """Does psi (x) omega -> phi (x) omega satisfy the majorization condition?"""
    a, b, w = spectrum_of(psi, cut), spectrum_of(phi, cut), spectrum_of(omega, cut)
    k = majorization_violation(kron_spectrum(a, w), kron_spectrum(b, w))
    if k is None:
        return TransformVerdict("yes", w)
    return TransformVerdict("no", k)


def default_xi_grid():
    return np.logspace(-3, 3, 400)


def powersum_obstruction(psi, phi, xi_grid=None, cut=(0,)):
    """Falsification search over power sums; never answers "yes".

    A catalysed transformation psi -> phi forces sum a^xi <= sum b^xi for
    xi > 1 (convex power) and sum a^xi >= sum b^xi for 0 < xi < 1 (concave
    power). The xi -> 0 limit compares Schmidt ranks, xi -> inf the largest
    coefficients.
    """
    a, b = spectrum_of(psi, cut), spectrum_of(phi, cut)
    a, b = a[a > TOL], b[b > TOL]
    if len(a) < len(b):
        return TransformVerdict("no", 0.0, {"reason": "schmidt rank increases"})
    if a[0] > b[0] + TOL:
        return TransformVerdict("no", math.inf, {"reason": "largest coefficient decreases"})
    grid = default_xi_grid() if xi_grid is None else np.asarray(xi_grid, float)
    # purity (xi = 2) and its concave mirror first, then the full grid
    for xi in np.concatenate(([2.0, 0.5], grid)):
        if xi == 1:
            continue
        sa, sb = np.sum(a ** xi), np.sum(b ** xi)
        scale = max(sa, sb)
        if xi > 1 and sa > sb + 1e-12 * scale:
            return TransformVerdict("no", float(xi), {"sum_psi": float(sa), "sum_phi": float(sb)})
        if xi < 1 and sa < sb - 1e-12 * scale:
            return TransformVerdict("no", float(xi), {"sum_psi": float(sa), "sum_phi": float(sb)})
    return TransformVerdict("unknown")


def powersum_at(psi, phi, xi, cut=(0,)):
    """(sum a^xi, sum b^xi)."""
    a, b = spectrum_of(psi, cut), spectrum_of(phi, cut)
    return float(np.sum(a[a > 0] ** xi)), float(np.sum(b[b > 0] ** xi))


def e_k_vector(psi, cut=(0,)):
    """Tail sums E_k = sum_{i >= k} a_i for k = 1..N."""
    a = spectrum_of(psi, cut)
    return np.cumsum(a[::-1])[::-1]


def pure_to_ensemble_transformable(psi, ensemble, cut=(0,)):
    """Check sum_i p_i E_k(phi_i) <= E_k(psi) for all k on the given decomposition."""
    probs = np.array([p for p, _ in ensemble], float)
    if np.any(probs < -TOL) or abs(probs.sum() - 1) > 1e-9:
        raise BadEnsemble("ensemble probabilities must be non-negative and sum to 1")
    e_psi = e_k_vector(psi, cut)
    n = len(e_psi)
    acc = np.zeros(n)
    for p, phi in ensemble:
        e = e_k_vector(phi, cut)
        if len(e) > n:
            n2 = len(e)
            acc = np.pad(acc, (0, n2 - n))
            e_psi = np.pad(e_psi, (0, n2 - n))
            n = n2
        acc += p * np.pad(e, (0, n - len(e)))
    return bool(np.all(acc <= e_psi + 1e-12))


@dataclass(frozen=True)
class FidelityResult:
    value: float
    gamma: np.ndarray
    converged: bool


def optimal_fidelity_locc(psi, phi, cut=(0,)):
    """max |<phi|xi>|^2 over pure xi reachable from psi, with aligned Schmidt bases.

    The reachable xi are those whose spectrum gamma majorizes psi's; the
    overlap (sum sqrt(b_i g_i))^2 is concave in gamma, so the problem is a
    small convex program.
    """
    import cvxpy as cp

    a, b = spectrum_of(psi, cut), spectrum_of(phi, cut)
    a, b = _pad(a, b)
    if majorizes(a, b):
        return FidelityResult(1.0, b, True)
    n = len(a)
    tails = np.cumsum(a[::-1])[::-1]
    g = cp.Variable(n, nonneg=True)
    cons = [cp.sum(g) == 1]
    cons += [g[i] >= g[i + 1] for i in range(n - 1)]
    cons += [cp.sum(g[k:]) <= tails[k] for k in range(1, n)]
    prob = cp.Problem(cp.Maximize(np.sqrt(b) @ cp.sqrt(g)), cons)
    prob.solve(solver=cp.CLARABEL)
    gv = np.clip(np.asarray(g.value, float), 0, None)
    gv /= gv.sum()
    gv = _pull_feasible(np.sort(gv)[::-1], a)
    val = float(np.sum(np.sqrt(b * gv)) ** 2)
    return FidelityResult(min(val, 1.0), gv, prob.status == "optimal")


def _pull_feasible(g, a):
    """Shortest move from g towards a (feasible) that satisfies a < g exactly."""
    if majorizes(a, g):
        return g
    lo, hi = 0.0, 1.0  # weight kept on g
    for _ in range(60):
        t = (lo + hi) / 2
        if majorizes(a, t * g + (1 - t) * a):
            lo = t
        else:
            hi = t
    return lo * g + (1 - lo) * a


def five_level_fidelity(eps):
    return (5 + 8 * eps ** 2 + 4 * math.sqrt(3) * math.sqrt(5 - 4 * eps ** 2) * eps) / 20


def five_level_source(eps):
    """Schmidt weights (0.4e^2, 0.4e^2, 0.1e^2, 0.1e^2, 1-e^2)."""
    e2 = eps * eps
    return np.array([0.4 * e2, 0.4 * e2, 0.1 * e2, 0.1 * e2, 1 - e2])


def catalysed_route_value(lam, eps):
    """Fidelity lam e^2 + (1 - lam e^2)/2 reached with the catalyst."""
    return lam * eps ** 2 + (1 - lam * eps ** 2) / 2


def uncatalysed_upper_bound(lam, eps, phi=(0.5, 0.25, 0.25)):
    return (1 - lam) / 2 + lam * optimal_fidelity_locc(five_level_source(eps), np.array(phi)).value


def lemma33_necessary(psi, exclusion, phi, cut=(0,)):
    """Necessary condition for a rank-two mixture of psi and an excluded product vector.

    chi = Pi psi psi^dagger Pi with Pi = 1 - |x><x|; the normalized marginal
    spectrum of chi must be majorized by phi's.
    """
    if not isinstance(psi, StateVector) or not isinstance(exclusion, StateVector):
        raise BadInput("psi and the exclusion vector must be StateVector instances")
    if schmidt(exclusion, cut).rank != 1:
        raise BadInput("exclusion vector is not a product vector")
    if isinstance(phi, StateVector):
        if abs(np.vdot(exclusion.amplitudes, phi.amplitudes)) > 1e-9:
            raise BadInput("target is not orthogonal to the exclusion vector")
    x = exclusion.amplitudes
    v = psi.amplitudes - x * np.vdot(x, psi.amplitudes)
    tr_chi = float(np.real(np.vdot(v, v)))
    if tr_chi < 1e-15:
        raise BadInput("psi coincides with the exclusion vector")
    chi_state = StateVector(v / math.sqrt(tr_chi), psi.dims)
    chi_spec = spectrum_of(chi_state, cut)
    k = majorization_violation(chi_spec, spectrum_of(phi, cut))
    detail = {"trace_chi": tr_chi, "chi_spectrum": chi_spec.tolist()}
    if k is None:
        return TransformVerdict("unknown", None, detail)
    return TransformVerdict("no", k, detail)
