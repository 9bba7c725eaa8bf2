"""Entanglement monotones: closed forms and numeric minimisers.

Numeric measures are upper bounds on the true minimum; `gap` reports the
Frank-Wolfe duality gap, so true value lies in [value - gap, value].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import qla
from .qla import DensityMatrix, DimensionMismatch
from .states import BadParameter, make_rng, random_density

LN2 = math.log(2)


@dataclass
class MeasureResult:
    value: float
    method: str
    gap: float = 0.0
    converged: bool = True
    certificate: object = None
    iterations: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"value": self.value, "method": self.method, "gap": self.gap,
               "converged": self.converged, "iterations": self.iterations}
        if isinstance(self.certificate, np.ndarray):
            out["certificate"] = qla.matrix_to_json(self.certificate)
        out.update(self.extra)
        return out


def as_bipartite(rho, cut=None, dims=None):
    """Return (matrix, (dA, dB)).

    `cut` is None for an already bipartite state, an int k to put the
    first k parties on side A, or an explicit list of side-A parties.
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    dims = tuple(dims or getattr(rho, "dims", ()) or (m.shape[0],))
    if cut is None:
        if len(dims) != 2:
            raise BadParameter(f"state has {len(dims)} parties; give a cut")
        return m, dims
    parties = list(range(cut)) if isinstance(cut, int) else list(cut)
    return qla.bipartite_view(m, parties, dims)


# closed forms

def negativity(rho, cut=None, dims=None):
    """||rho^{T_B}|| - 1."""
    m, d = as_bipartite(rho, cut, dims)
    return max(qla.trace_norm(qla.partial_transpose(m, 1, d)) - 1.0, 0.0)


def log_negativity(rho, cut=None, dims=None):
    return math.log2(negativity(rho, cut, dims) + 1.0)


_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


def concurrence(rho):
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    dims = getattr(rho, "dims", (2, 2))
    if m.shape != (4, 4) or tuple(dims) != (2, 2):
        raise DimensionMismatch("concurrence is defined here for two qubits only")
    # lambda_i are the singular values of X^T (Y(x)Y) X for rho = X X^dagger; dropping
    # negligible eigenvectors avoids square roots of round-off
    w, V = np.linalg.eigh((m + m.conj().T) / 2)
    keep = w > 1e-14 * max(w.max(), 1e-300)
    X = V[:, keep] * np.sqrt(w[keep])
    lam = np.zeros(4)
    sv = np.linalg.svd(X.T @ _YY @ X, compute_uv=False)
    lam[:sv.size] = sv
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def binary_entropy(x):
    return qla.shannon_entropy([x, 1 - x])


def eof_two_qubit(rho):
    c = min(concurrence(rho), 1.0)
    return binary_entropy((1 + math.sqrt(1 - c * c)) / 2)


def entropy_lower_bound(rho, cut=None, dims=None):
    """max(S(tr_A rho) - S(rho), S(tr_B rho) - S(rho), 0)."""
    m, d = as_bipartite(rho, cut, dims)
    s = qla.von_neumann_entropy(m)
    sa = qla.von_neumann_entropy(qla.partial_trace(m, [0], d))
    sb = qla.von_neumann_entropy(qla.partial_trace(m, [1], d))
    return max(sa - s, sb - s, 0.0)


# relative entropy minimisation

def _log_gradient(sigma, X):
    """Gradient of X -> S(sigma||X) in bits."""
    w, V = np.linalg.eigh(X)
    w = np.clip(w, 1e-15, None)
    lw = np.log(w)
    dw = w[:, None] - w[None, :]
    dl = lw[:, None] - lw[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        L = np.where(np.abs(dw) > 1e-14 * np.maximum(w[:, None], w[None, :]), dl / dw, 1.0 / w[:, None])
    S = V.conj().T @ sigma @ V
    G = -V @ (L * S) @ V.conj().T / LN2
    return (G + G.conj().T) / 2


def _fval(sigma, X, floor=1e-15):
    """S(sigma||X) with X's spectrum floored, so the value stays finite for line searches."""
    ws = np.clip(np.linalg.eigvalsh(sigma), 0, None)
    wr, V = np.linalg.eigh(X)
    logx = np.log2(np.clip(wr, floor, None))
    cross = np.real(np.einsum("ij,ji->", (V * logx) @ V.conj().T, sigma))
    nz = ws > 0
    return float(np.sum(ws[nz] * np.log2(ws[nz])) - cross)


def _marginal_basis(dA, dB):
    """Orthonormal real-linear basis of operators H (x) 1 and 1 (x) K."""
    def herm_basis(d):
        out = []
        for i in range(d):
            e = np.zeros((d, d), complex)
            e[i, i] = 1
            out.append(e)
        for i in range(d):
            for j in range(i + 1, d):
                e = np.zeros((d, d), complex)
                e[i, j] = e[j, i] = 1 / math.sqrt(2)
                out.append(e)
                e = np.zeros((d, d), complex)
                e[i, j], e[j, i] = -1j / math.sqrt(2), 1j / math.sqrt(2)
                out.append(e)
        return out

    ops = [np.kron(h, np.eye(dB)) for h in herm_basis(dA)]
    ops += [np.kron(np.eye(dA), h) for h in herm_basis(dB)]
    vecs = np.array([np.concatenate([o.real.ravel(), o.imag.ravel()]) for o in ops])
    u, s, vh = np.linalg.svd(vecs, full_matrices=False)
    keep = s > 1e-10 * s[0]
    D = dA * dB
    return [(v[: D * D] + 1j * v[D * D:]).reshape(D, D) for v in vh[keep]]


def _expect(H, P):
    return float(np.real(np.vdot(H.conj().T, P)))  # tr(H P) for Hermitian H


def _product_lmo(G, dA, dB, rng, starts=16, sweeps=80, return_all=False):
    """Approximately minimise <ab|G|ab> over product unit vectors.

    All starts are iterated together as one batch of alternating
    minimum-eigenvector updates.
    """
    T = G.reshape(dA, dB, dA, dB)
    b = rng.standard_normal((starts, dB)) + 1j * rng.standard_normal((starts, dB))
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    prev = np.full(starts, np.inf)
    for _ in range(sweeps):
        Ma = np.einsum("ibjc,sb,sc->sij", T, b.conj(), b)
        _, Va = np.linalg.eigh((Ma + np.conj(np.swapaxes(Ma, 1, 2))) / 2)
        a = Va[:, :, 0]
        Mb = np.einsum("aibj,sa,sb->sij", T, a.conj(), a)
        wb, Vb = np.linalg.eigh((Mb + np.conj(np.swapaxes(Mb, 1, 2))) / 2)
        b = Vb[:, :, 0]
        val = wb[:, 0]
        if np.all(prev - val < 1e-13):
            break
        prev = val
    k = int(np.argmin(val))
    v = np.kron(a[k], b[k])
    if return_all:
        vs = [np.kron(a[i], b[i]) for i in np.argsort(val)]
        return [np.outer(x, x.conj()) for x in vs], np.sort(val)
    return np.outer(v, v.conj()), float(val[k])


def _completed_product_basis(P, dA, dB):
    """All products of orthonormal bases completing the factors of a product projector P."""
    T = P.reshape(dA, dB, dA, dB)
    ra = np.einsum("ibjb->ij", T)
    rb = np.einsum("aiaj->ij", T)
    Va = np.linalg.eigh(ra)[1][:, ::-1]
    Vb = np.linalg.eigh(rb)[1][:, ::-1]
    out = []
    for i in range(dA):
        for j in range(dB):
            v = np.kron(Va[:, i], Vb[:, j])
            out.append(np.outer(v, v.conj()))
    return out


def _ppt_lmo_factory(dA, dB, marginals=None):
    import cvxpy as cp

    D = dA * dB
    X = cp.Variable((D, D), hermitian=True)
    Gp = cp.Parameter((D, D), hermitian=True)
    cons = [X >> 0, cp.partial_transpose(X, (dA, dB), 1) >> 0, cp.real(cp.trace(X)) == 1]
    if marginals is not None:
        ra, rb = marginals
        cons += [cp.partial_trace(X, (dA, dB), 1) == ra, cp.partial_trace(X, (dA, dB), 0) == rb]
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(Gp @ X))), cons)

    def lmo(G, rng=None):
        Gp.value = (G + G.conj().T) / 2
        prob.solve(solver=cp.CLARABEL)
        P = np.asarray(X.value)
        P = (P + P.conj().T) / 2
        P /= np.trace(P).real
        return P, _expect(G, P)

    return lmo


def _solve_weights(sigma, atoms, w0, A_eq=None, b_eq=None):
    """Minimise S(sigma || sum_t w_t P_t) over the weights."""
    stack = np.array(atoms)

    def build(w):
        return np.tensordot(w, stack, axes=1)

    def fun(w):
        X = build(w)
        f = _fval(sigma, X)
        G = _log_gradient(sigma, X)
        g = np.real(np.einsum("ij,tji->t", G, stack))
        return f, g

    n = len(atoms)
    cons = []
    if A_eq is not None:
        # keep an independent set of rows so the SQP subproblem stays regular
        u, sv, vh = np.linalg.svd(A_eq, full_matrices=False)
        k = int(np.sum(sv > 1e-10 * sv[0]))
        A_eq, b_eq = sv[:k, None] * vh[:k], u[:, :k].T @ b_eq
        cons.append({"type": "eq", "fun": lambda w: A_eq @ w - b_eq, "jac": lambda w: A_eq})
    else:
        cons.append({"type": "eq", "fun": lambda w: np.sum(w) - 1, "jac": lambda w: np.ones((1, n))})
    res = minimize(fun, w0, jac=True, method="SLSQP", bounds=[(0, 1)] * n,
                   constraints=cons, options={"ftol": 1e-14, "maxiter": 500})
    w = np.clip(res.x, 0, None)
    if A_eq is None:
        w /= w.sum()
    elif np.max(np.abs(A_eq @ w - b_eq)) > 1e-9:
        return np.asarray(w0, dtype=float)
    if fun(w)[0] > fun(np.asarray(w0, dtype=float))[0]:
        return np.asarray(w0, dtype=float)
    return w


def _constraint_multipliers(G, atoms, H, b):
    """Multipliers y making G - sum y_c H_c stationary on the current atoms.

    Solves the dual of min_mu tr(G sum mu_j P_j) s.t. A mu = b, mu >= 0.
    """
    from scipy.optimize import linprog

    A = np.array([[_expect(h, P) for h in H] for P in atoms])
    g = np.array([_expect(G, P) for P in atoms])
    res = linprog(-b, A_ub=A, b_ub=g, bounds=[(None, None)] * len(H), method="highs")
    if res.status != 0:
        return np.linalg.lstsq(A, g, rcond=None)[0]
    return res.x


def _initial_product_atoms(m, d):
    """Eigen-products of the marginals with weights lambda_i mu_j (product of marginals)."""
    dA, dB = d
    la, Va = np.linalg.eigh(qla.partial_trace(m, [0], d))
    lb, Vb = np.linalg.eigh(qla.partial_trace(m, [1], d))
    atoms, w = [], []
    for i in range(dA):
        for j in range(dB):
            v = np.kron(Va[:, i], Vb[:, j])
            atoms.append(np.outer(v, v.conj()))
            w.append(max(la[i], 0) * max(lb[j], 0))
    w = np.array(w)
    return atoms, w / w.sum()


def rel_ent_entanglement(rho, cut=None, reference="separable", tol=1e-4, max_iter=300,
                         seed=0, dims=None):
    """Relative entropy of entanglement and its PPT / fixed-marginal variants.

    reference: "separable", "ppt", "separable-fixed-marginals", "ppt-fixed-marginals".
    Fully corrective Frank-Wolfe; the certificate is the optimal reference state.
    """
    if tol < 1e-6:
        raise BadParameter("tol below 1e-6 is not supported")
    m, d = as_bipartite(rho, cut, dims)
    m = (m + m.conj().T) / 2
    dA, dB = d
    rng = make_rng(seed)
    fixed = reference.endswith("fixed-marginals")
    ppt = reference.startswith("ppt")
    if reference not in ("separable", "ppt", "separable-fixed-marginals", "ppt-fixed-marginals"):
        raise BadParameter(f"unknown reference set {reference!r}")

    atoms, w = _initial_product_atoms(m, d)
    H = _marginal_basis(dA, dB) if fixed else None
    if ppt:
        ra = qla.partial_trace(m, [0], d)
        rb = qla.partial_trace(m, [1], d)
        ppt_lmo = _ppt_lmo_factory(dA, dB, (ra, rb) if fixed else None)

    def constraints():
        if not fixed or ppt:
            return None, None
        A = np.array([[_expect(h, P) for P in atoms] for h in H])
        b = np.array([_expect(h, m) for h in H])
        return A, b

    gap, it, f = np.inf, 0, np.inf
    for it in range(1, max_iter + 1):
        A, b = constraints()
        w = _solve_weights(m, atoms, w, A, b)
        X = np.tensordot(w, np.array(atoms), axes=1)
        f = qla.relative_entropy(m, X)
        G = _log_gradient(m, X)
        Gp = G
        if fixed and not ppt:
            y = _constraint_multipliers(G, atoms, H, np.array([_expect(h, m) for h in H]))
            Gp = G - sum(yc * h for yc, h in zip(y, H))
        if ppt:
            P, low = ppt_lmo(Gp)
            fresh = [P]
        else:
            cands, lows = _product_lmo(Gp, dA, dB, rng, return_all=True)
            low = lows[0]
            level = _expect(Gp, X)
            fresh = [c for c, lw in zip(cands, lows) if lw < level - 1e-12][:8]
            if fixed and fresh:
                # single atoms cannot move under the marginal constraints; add their bases
                fresh = [q for P in fresh[:2] for q in _completed_product_basis(P, dA, dB)]
        gap = max(_expect(Gp, X) - low, 0.0)
        if gap <= tol:
            break
        # prune dead atoms to keep the weight problem small
        keep = w > 1e-12
        atoms = [a for a, k in zip(atoms, keep) if k]
        w = w[keep]
        for P in fresh:
            if all(np.abs(P - Q).max() > 1e-7 for Q in atoms):
                atoms.append(P)
                w = np.concatenate([w, [0.0]])
    return MeasureResult(float(f), "frank-wolfe", float(gap), gap <= tol, X, it,
                         {"reference": reference})


def relative_entropy_bound(sigma, reference_state):
    """E_R upper bound from an explicit reference state."""
    val = qla.relative_entropy(sigma, reference_state)
    ref = reference_state.matrix if isinstance(reference_state, DensityMatrix) else reference_state
    return MeasureResult(float(val), "closed-form", 0.0, True, np.asarray(ref))


def subadditivity_witness(n=3):
    """S(sigma_a (x) sigma_a || (1/3) sigma_a (x) sigma_a + (2/3) sigma_s (x) sigma_s)."""
    from .states import werner_sym

    sa = werner_sym(0.0, n).matrix
    ss = werner_sym(1.0, n).matrix
    ref = np.kron(sa, sa) / 3 + 2 * np.kron(ss, ss) / 3
    return relative_entropy_bound(np.kron(sa, sa), ref)


# trace-norm measure

def trace_norm_measure(rho, cut=None, tol=1e-4, max_iter=200, seed=0, dims=None,
                       reference="separable"):
    """min ||rho - X||_1 over separable (or PPT) X with the marginals of rho."""
    import cvxpy as cp

    m, d = as_bipartite(rho, cut, dims)
    m = (m + m.conj().T) / 2
    dA, dB = d
    D = dA * dB
    rng = make_rng(seed)
    ra = qla.partial_trace(m, [0], d)
    rb = qla.partial_trace(m, [1], d)

    if reference == "ppt":
        X = cp.Variable((D, D), hermitian=True)
        Pp = cp.Variable((D, D), hermitian=True)
        Nn = cp.Variable((D, D), hermitian=True)
        cons = [X >> 0, cp.partial_transpose(X, (dA, dB), 1) >> 0, Pp >> 0, Nn >> 0,
                m - X == Pp - Nn,
                cp.partial_trace(X, (dA, dB), 1) == ra, cp.partial_trace(X, (dA, dB), 0) == rb]
        prob = cp.Problem(cp.Minimize(cp.real(cp.trace(Pp + Nn))), cons)
        prob.solve(solver=cp.CLARABEL)
        return MeasureResult(float(prob.value), "sdp", 0.0, prob.status == "optimal",
                             np.asarray(X.value), 1, {"reference": "ppt"})

    lower = trace_norm_measure(m, dims=d, reference="ppt").value
    H = _marginal_basis(dA, dB)
    atoms, _ = _initial_product_atoms(m, d)
    A_all = np.array([[_expect(h, P) for P in atoms] for h in H])
    b = np.array([_expect(h, m) for h in H])
    best_hist = []
    gap, it, val, X = np.inf, 0, np.inf, m
    for it in range(1, max_iter + 1):
        n = len(atoms)
        S = np.array([P.ravel(order="F") for P in atoms]).T
        w = cp.Variable(n, nonneg=True)
        Xe = cp.reshape(S @ w, (D, D), order="F")
        Pp = cp.Variable((D, D), hermitian=True)
        Nn = cp.Variable((D, D), hermitian=True)
        split = m - Xe == Pp - Nn
        eq = A_all @ w == b
        cons = [Pp >> 0, Nn >> 0, split, eq]
        prob = cp.Problem(cp.Minimize(cp.real(cp.trace(Pp + Nn))), cons)
        prob.solve(solver=cp.CLARABEL)
        wv = np.clip(np.asarray(w.value), 0, None)
        X = np.tensordot(wv, np.array(atoms), axes=1)
        val = qla.trace_norm(m - X)
        gap = max(val - lower, 0.0)
        best_hist.append(val)
        if gap <= tol:
            break
        if len(best_hist) > 15 and best_hist[-16] - val < tol / 10:
            break
        # reduced cost of a new column P is tr(K P), K from the duals
        Z = np.asarray(split.dual_value)
        y = np.asarray(eq.dual_value)
        K = -(Z + Z.conj().T) / 2 + sum(yc * h for yc, h in zip(y, H))
        cands, lows = _product_lmo(K, dA, dB, rng, return_all=True)
        if lows[0] > -1e-12:
            break
        fresh = [P for P, lw in zip(cands, lows) if lw < -1e-12]
        fresh = [q for P in fresh[:2] for q in _completed_product_basis(P, dA, dB)]
        # drop near-duplicate candidates
        for P in fresh:
            if all(np.abs(P - Q).max() > 1e-6 for Q in atoms):
                atoms.append(P)
        A_all = np.array([[_expect(h, P) for P in atoms] for h in H])
    return MeasureResult(float(val), "frank-wolfe", float(gap), gap <= tol, X, it,
                         {"reference": "separable", "ppt_lower_bound": float(lower)})


def schmidt_measure_werner2(lam):
    if not 0 <= lam <= 1:
        raise BadParameter(f"lambda={lam} outside [0, 1]")
    return max(0.0, (3 * lam - 1) / 2)


# Monte-Carlo test of the marginal-product inequality

@dataclass
class MonteCarloResult:
    trials: int
    violations: int
    seed: int

    @property
    def frequency(self):
        return self.violations / self.trials


def conjecture210_frequency(trials=5000, seed=0, d=4, margin=1e-9):
    """Count samples with S(s1 (x) s2 || rho) < S(s1 (x) s2 || rho_1 (x) rho_2) - margin.

    All three states are drawn from the same ensemble: Haar eigenbasis and
    spectrum uniform on the simplex.
    """
    if trials < 1:
        raise BadParameter("trials >= 1")
    rng = make_rng(seed)
    bad = 0
    for _ in range(trials):
        s1 = random_density(d, rng).matrix
        s2 = random_density(d, rng).matrix
        r = random_density(d * d, rng, (d, d)).matrix
        s = np.kron(s1, s2)
        prod = np.kron(qla.partial_trace(r, [0], (d, d)), qla.partial_trace(r, [1], (d, d)))
        if qla.relative_entropy(s, r) < qla.relative_entropy(s, prod) - margin:
            bad += 1
    return MonteCarloResult(trials, bad, seed)
