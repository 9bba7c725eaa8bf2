"""Schmidt measure: bounds on the minimal number of product terms of a multi-party vector.

Upper bounds come from explicit product decompositions found by alternating
least squares. Lower bounds combine flattening ranks with an exact
substitution argument evaluated in rational arithmetic.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .states import StateVector, make_rng

RESIDUAL_TOL = 1e-7
NORM_CAP = 1e3


class BadSplit(ValueError):
    pass


@dataclass(frozen=True)
class SchmidtMeasureBounds:
    lower: float
    upper: float
    split: str
    rank_lower: int = 0
    rank_upper: int = 0

    @property
    def exact(self):
        return self.rank_lower == self.rank_upper


def parse_split(label, n=None):
    """Turn labels such as "A1A2(A3A4)" into [(0,), (1,), (2, 3)]."""
    groups = []
    for m in re.finditer(r"\(([^)]*)\)|A(\d+)", label.replace(" ", "")):
        if m.group(1) is not None:
            idx = tuple(int(x) - 1 for x in re.findall(r"A(\d+)", m.group(1)))
            if not idx:
                raise BadSplit(f"empty group in {label!r}")
            groups.append(idx)
        else:
            groups.append((int(m.group(2)) - 1,))
    flat = [i for g in groups for i in g]
    if len(set(flat)) != len(flat) or not flat:
        raise BadSplit(f"repeated or missing parties in {label!r}")
    if n is not None and sorted(flat) != list(range(n)):
        raise BadSplit(f"split {label!r} does not cover {n} parties")
    return groups


def split_label(groups):
    return "".join(("(" + "".join(f"A{i + 1}" for i in g) + ")") if len(g) > 1 else f"A{g[0] + 1}"
                   for g in groups)


def split_tensor(psi, groups):
    dims = psi.dims
    order = [i for g in groups for i in g]
    shape = [int(np.prod([dims[i] for i in g])) for g in groups]
    return psi.amplitudes.reshape(dims).transpose(order).reshape(shape)


def flattening_rank_lower(T, tol=1e-10):
    """Largest matrix rank over all bipartitions of the modes."""
    k = T.ndim
    best = 1
    for r in range(1, k // 2 + 1):
        for side in combinations(range(k), r):
            rest = [i for i in range(k) if i not in side]
            M = T.transpose(list(side) + rest).reshape(int(np.prod([T.shape[i] for i in side])), -1)
            s = np.linalg.svd(M, compute_uv=False)
            best = max(best, int(np.sum(s > tol * s[0])))
    return best


# exact substitution lower bound

def _to_sympy(T, tol=1e-12):
    import sympy as sp

    out = {}
    for idx in zip(*np.nonzero(np.abs(T) > tol)):
        v = T[idx]
        out[tuple(int(i) for i in idx)] = sp.nsimplify(complex(v).real, rational=True) + \
            sp.I * sp.nsimplify(complex(v).imag, rational=True)
    return out, tuple(T.shape)


def _min_matrix_rank(entries, shape, symbols):
    """Minimal rank over all complex parameter values of a symbolic matrix."""
    import sympy as sp

    M = sp.zeros(*shape)
    for (i, j), v in entries.items():
        M[i, j] = v
    rows = [i for i in range(shape[0]) if any(M[i, j] != 0 for j in range(shape[1]))]
    cols = [j for j in range(shape[1]) if any(M[i, j] != 0 for i in range(shape[0]))]
    M = M.extract(rows, cols) if rows and cols else sp.zeros(1, 1)
    free = sorted(M.free_symbols, key=str)
    if not free:
        return int(M.rank())
    best = 0
    for r in range(1, min(M.shape) + 1):
        minors = {sp.expand(M.extract(list(ri), list(ci)).det())
                  for ri in combinations(range(M.shape[0]), r)
                  for ci in combinations(range(M.shape[1]), r)}
        minors.discard(0)
        if not minors:
            break
        if any(m.is_number for m in minors):
            best = r
            continue
        gb = sp.groebner(list(minors), *free, order="grevlex")
        if list(gb.exprs) == [1]:
            best = r
        else:
            break
    return best


def _flatten_entries(entries, shape, mode):
    rest = [i for i in range(len(shape)) if i != mode]
    ncols = int(np.prod([shape[i] for i in rest])) if rest else 1
    out = {}
    for idx, v in entries.items():
        col = 0
        for i in rest:
            col = col * shape[i] + idx[i]
        out[(idx[mode], col)] = out.get((idx[mode], col), 0) + v
    return out, (shape[mode], ncols)


def _substitution_bound(entries, shape, depth, counter, target):
    """R(T) >= 1 + min_c R(T with one slice eliminated), maximised over slice choices."""
    import sympy as sp

    entries = {k: v for k, v in entries.items() if v != 0}
    if not entries:
        return 0
    # drop modes of size one
    keep = [i for i, s in enumerate(shape) if s > 1]
    if len(keep) < len(shape):
        entries = {tuple(k[i] for i in keep): v for k, v in entries.items()}
        shape = tuple(shape[i] for i in keep)
    if len(shape) <= 1:
        return 1
    if len(shape) == 2:
        return _min_matrix_rank(entries, shape, None)
    best = max(_min_matrix_rank(*_flatten_entries(entries, shape, m), None) for m in range(len(shape)))
    if depth == 0 or best >= target:
        return best
    for mode in range(len(shape)):
        for j in range(shape[mode]):
            sl = {k: v for k, v in entries.items() if k[mode] == j}
            # the eliminated slice must be nonzero for every parameter value
            if not any(v.is_number and v != 0 for v in sl.values()):
                continue
            new = {}
            cs = {}
            for i in range(shape[mode]):
                if i == j:
                    continue
                counter[0] += 1
                cs[i] = sp.Symbol(f"c{counter[0]}")
            for k, v in entries.items():
                i = k[mode]
                if i == j:
                    continue
                ni = i if i < j else i - 1
                nk = k[:mode] + (ni,) + k[mode + 1:]
                new[nk] = new.get(nk, 0) + v
            for k, v in sl.items():
                for i, c in cs.items():
                    ni = i if i < j else i - 1
                    nk = k[:mode] + (ni,) + k[mode + 1:]
                    new[nk] = sp.expand(new.get(nk, 0) + c * v)
            nshape = shape[:mode] + (shape[mode] - 1,) + shape[mode + 1:]
            b = 1 + _substitution_bound(new, nshape, depth - 1, counter, target - 1)
            best = max(best, b)
            if best >= target:
                return best
    return best


def substitution_rank_lower(T, target, depth=3):
    entries, shape = _to_sympy(T)
    return _substitution_bound(entries, shape, depth, [0], target)


# alternating least squares upper bound

def _als(T, r, rng, iters=400):
    k = T.ndim
    norm = np.linalg.norm(T)
    Tn = T / norm
    F = [(rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))) / math.sqrt(2 * n) for n in T.shape]
    letters = "abcdefgh"[:k]
    res = np.inf
    for _ in range(iters):
        for m in range(k):
            others = [i for i in range(k) if i != m]
            gram = np.ones((r, r), complex)
            for i in others:
                gram = gram * (F[i].conj().T @ F[i])
            spec = ",".join([letters] + [letters[i] + "z" for i in others]) + "->" + letters[m] + "z"
            rhs = np.einsum(spec, Tn, *[F[i].conj() for i in others])
            F[m] = np.linalg.lstsq(gram, rhs.T, rcond=None)[0].T
        approx = _cp_tensor(F)
        new_res = np.linalg.norm(approx - Tn)
        if new_res < RESIDUAL_TOL * 1e-2 or abs(res - new_res) < 1e-15:
            res = new_res
            break
        res = new_res
    term_norms = np.prod([np.linalg.norm(f, axis=0) for f in F], axis=0)
    return res, float(term_norms.max()), F


def _cp_tensor(F):
    k = len(F)
    letters = "abcdefgh"[:k]
    spec = ",".join(l + "z" for l in letters) + "->" + letters
    return np.einsum(spec, *F)


def product_decomposition(T, r, restarts=40, seed=0):
    """Search for T = sum of r product terms with bounded term norms."""
    rng = make_rng(seed)
    for _ in range(restarts):
        res, tn, F = _als(T, r, rng)
        if res < RESIDUAL_TOL and tn <= NORM_CAP:
            return F
    return None


def trivial_rank_upper(T, tol=1e-12):
    count = int(np.sum(np.abs(T) > tol))
    flat = min(int(np.prod(T.shape)) // s for s in T.shape)
    return max(1, min(count, flat))


def schmidt_measure_bounds(psi, split, seed=0, restarts=40):
    """Bounds on log2 of the minimal number of product terms across `split`."""
    n = len(psi.dims)
    groups = parse_split(split, n) if isinstance(split, str) else [tuple(g) for g in split]
    label = split_label(groups)
    T = split_tensor(psi, groups)
    T = T[tuple(slice(None) for _ in T.shape)]
    if len(groups) == 1:
        return SchmidtMeasureBounds(0.0, 0.0, label, 1, 1)
    lower = flattening_rank_lower(T)
    if len(groups) == 2:
        return SchmidtMeasureBounds(math.log2(lower), math.log2(lower), label, lower, lower)
    upper = trivial_rank_upper(T)
    if lower < upper:
        lower = max(lower, substitution_rank_lower(T, upper))
    r = lower
    while r < upper:
        if product_decomposition(T, r, restarts, seed) is not None:
            upper = r
            break
        r += 1
    return SchmidtMeasureBounds(math.log2(lower), math.log2(upper), label, lower, upper)


FOUR_QUBIT_SPLITS = ["A1A2A3A4", "A1A2(A3A4)", "(A1A2)A3A4", "(A1A2)(A3A4)",
                 "(A1A3)(A2A4)", "(A1A4)(A2A3)", "(A1A2A3)A4"]
THREE_QUBIT_SPLITS = ["A1A2A3", "(A1A2)A3", "(A1A3)A2", "(A2A3)A1"]


def four_qubit_table(states_by_name=None, seed=0):
    from . import states as st

    if states_by_name is None:
        states_by_name = {
            "GHZ": st.ghz(4),
            "W": st.w_state(4),
            "cluster": st.cluster4(),
            "phi+phi+": st.bell("phi+") @ st.bell("phi+"),
        }
    return {name: [schmidt_measure_bounds(v, s, seed) for s in FOUR_QUBIT_SPLITS]
            for name, v in states_by_name.items()}


# mixed states on the span of two product vectors

def _differing_parts(x, y, groups, dims, tol=1e-9):
    """Number of split parts on which two product vectors differ (up to scalars)."""
    psx = StateVector(x, dims)
    psy = StateVector(y, dims)
    tx, ty = split_tensor(psx, groups), split_tensor(psy, groups)
    count = 0
    for m in range(len(groups)):
        fx = _factor(tx, m)
        fy = _factor(ty, m)
        if abs(abs(np.vdot(fx, fy)) - 1) > tol:
            count += 1
    return count


def _factor(T, mode):
    M = np.moveaxis(T, mode, 0).reshape(T.shape[mode], -1)
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size > 1 and s[1] > 1e-9 * s[0]:
        raise BadSplit("vector is not a product across the split")
    return u[:, 0]


def schmidt_measure_two_product_support(rho, x, y, split):
    """Exact convex-roof Schmidt measure of a state living on span{x, y}.

    x, y are orthonormal product vectors that differ on at least two parts
    of the split, so every other vector in the span has exactly two product
    terms. The minimal entangled weight of a decomposition is 2|c| when the
    coherence c fits under both populations, else c^2/B + B.
    """
    m = rho.matrix if hasattr(rho, "matrix") else np.asarray(rho, complex)
    dims = getattr(rho, "dims", None) or (2,) * int(round(math.log2(m.shape[0])))
    n = len(dims)
    groups = parse_split(split, n) if isinstance(split, str) else [tuple(g) for g in split]
    x = np.asarray(x, complex) / np.linalg.norm(x)
    y = np.asarray(y, complex) / np.linalg.norm(y)
    if abs(np.vdot(x, y)) > 1e-9:
        raise ValueError("support vectors must be orthogonal")
    Pxy = np.outer(x, x.conj()) + np.outer(y, y.conj())
    if np.abs(Pxy @ m @ Pxy - m).max() > 1e-9:
        raise ValueError("state is not supported on span{x, y}")
    if _differing_parts(x, y, groups, dims) < 2:
        raise ValueError("support vectors differ on fewer than two parts of the split")
    A = float(np.real(x.conj() @ m @ x))
    B = float(np.real(y.conj() @ m @ y))
    c = abs(complex(x.conj() @ m @ y))
    if c < 1e-15:
        val = 0.0
    else:
        lo = min(A, B)
        val = 2 * c if c <= lo + 1e-15 else c * c / lo + lo
    return SchmidtMeasureBounds(val, val, split_label(groups), 0, 0)


def ghz_mixture_table(lams=(0.25, 0.5, 0.75, 1.0)):
    """Schmidt measure of rho_G(lam) on every split of three qubits."""
    from .states import product_basis_state, rho_g

    x = product_basis_state("000").amplitudes
    y = product_basis_state("111").amplitudes
    return {lam: {s: schmidt_measure_two_product_support(rho_g(lam), x, y, s).lower for s in THREE_QUBIT_SPLITS}
            for lam in lams}
