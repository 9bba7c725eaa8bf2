"""Dense complex linear algebra and entropy functionals.

Logarithms are base 2 everywhere. Subsystem 0 is the leftmost tensor factor.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

HERM_TOL = 1e-10
NEG_TOL = 1e-10
KERNEL_TOL = 1e-12
SUPPORT_TOL = 1e-9


class NotHermitian(ValueError):
    pass


class NotPositive(ValueError):
    pass


class BadIndex(IndexError):
    pass


class DimensionMismatch(ValueError):
    pass


def _as_array(M):
    if isinstance(M, DensityMatrix):
        return M.matrix
    return np.asarray(M, dtype=complex)


def check_hermitian(M, tol=HERM_TOL):
    M = _as_array(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotHermitian(f"not square: shape {M.shape}")
    dev = np.max(np.abs(M - M.conj().T)) if M.size else 0.0
    if dev > tol:
        raise NotHermitian(f"hermiticity defect {dev:.3e}")
    return M


@dataclass(frozen=True)
class DensityMatrix:
    """Positive unit-trace operator with its tensor factor dimensions."""

    matrix: np.ndarray
    dims: tuple = field(default=())

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        dims = tuple(int(d) for d in self.dims) if self.dims else (m.shape[0],)
        if int(np.prod(dims)) != m.shape[0]:
            raise DimensionMismatch(f"dims {dims} do not multiply to {m.shape[0]}")
        check_hermitian(m)
        m = (m + m.conj().T) / 2
        tr = np.trace(m).real
        if abs(tr - 1) > 1e-10:
            raise ValueError(f"trace {tr!r} is not 1")
        lam_min = np.linalg.eigvalsh(m)[0] if m.size else 0.0
        if lam_min < -NEG_TOL:
            raise NotPositive(f"eigenvalue {lam_min:.3e} below tolerance")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def from_vector(cls, psi, dims=()):
        dims = dims or getattr(psi, "dims", ())
        psi = np.asarray(getattr(psi, "amplitudes", psi), dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), dims)

    def spectrum(self):
        return spectrum(self.matrix)

    def to_json(self):
        return matrix_to_json(self.matrix, self.dims)

    def __matmul__(self, other):
        return tensor(self, other)


def eig_hermitian(M):
    """Eigen-decomposition with eigenvalues in descending order.

    Returns (values, V) with M = V diag(values) V^dagger.
    """
    M = check_hermitian(M)
    w, V = np.linalg.eigh((M + M.conj().T) / 2)
    return w[::-1].copy(), V[:, ::-1].copy()


def spectrum(M):
    """Descending eigenvalues of a positive operator, tiny negatives clamped."""
    w, _ = eig_hermitian(M)
    if w.size and w[-1] < -NEG_TOL:
        raise NotPositive(f"eigenvalue {w[-1]:.3e} below tolerance")
    return np.clip(w, 0.0, None)


def tensor(*ops):
    """Kronecker product. Density matrices stay density matrices."""
    if all(isinstance(o, DensityMatrix) for o in ops):
        m = reduce(np.kron, [o.matrix for o in ops])
        return DensityMatrix(m, sum((o.dims for o in ops), ()))
    return reduce(np.kron, [_as_array(o) for o in ops])


def matrix_exp_hermitian(H, scale=1.0):
    """exp(i * scale * H) for Hermitian H."""
    w, V = eig_hermitian(H)
    return (V * np.exp(1j * scale * w)) @ V.conj().T


def matrix_function(M, f):
    w, V = eig_hermitian(M)
    return (V * f(w)) @ V.conj().T


def partial_trace(rho, keep, dims=None):
    """Trace out every subsystem not listed in `keep`."""
    m = _as_array(rho)
    dims = tuple(dims or getattr(rho, "dims", ()) or (m.shape[0],))
    keep = sorted(set(int(k) for k in ([keep] if np.isscalar(keep) else keep)))
    n = len(dims)
    for k in keep:
        if not 0 <= k < n:
            raise BadIndex(f"subsystem {k} out of range for {n} parties")
    t = m.reshape(dims + dims)
    drop = [i for i in range(n) if i not in keep]
    # trace highest index first so the remaining axis numbers stay valid
    for cur, i in enumerate(sorted(drop, reverse=True)):
        nleft = n - cur
        t = np.trace(t, axis1=i, axis2=i + nleft)
    kd = tuple(dims[k] for k in keep)
    d = int(np.prod(kd)) if kd else 1
    out = t.reshape(d, d)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(out, kd or (1,))
    return out


def coarse_grain(dims, cut):
    """Collapse a multi-party dims list to (dA, dB) for the parties in `cut` vs the rest.

    The cut parties must form a prefix after permutation; callers permute first.
    """
    dims = tuple(dims)
    a = int(np.prod([dims[i] for i in cut]))
    return a, int(np.prod(dims)) // a


def permute_subsystems(M, dims, order):
    """Reorder tensor factors of an operator so that new factor i is old order[i]."""
    m = _as_array(M)
    dims = tuple(dims)
    n = len(dims)
    t = m.reshape(dims + dims)
    t = t.transpose(list(order) + [n + o for o in order])
    d = m.shape[0]
    return t.reshape(d, d)


def bipartite_view(rho, cut, dims=None):
    """Return (matrix, (dA, dB)) with the parties in `cut` grouped first."""
    m = _as_array(rho)
    dims = tuple(dims or getattr(rho, "dims", ()) or (m.shape[0],))
    cut = [cut] if np.isscalar(cut) else list(cut)
    rest = [i for i in range(len(dims)) if i not in cut]
    if not cut or not rest:
        raise BadIndex("cut must leave parties on both sides")
    order = cut + rest
    m2 = permute_subsystems(m, dims, order)
    return m2, (int(np.prod([dims[i] for i in cut])), int(np.prod([dims[i] for i in rest])))


def partial_transpose(rho, subsystem=1, dims=None):
    """Partial transpose of a bipartite operator on subsystem 0 or 1."""
    m = _as_array(rho)
    dims = tuple(dims or getattr(rho, "dims", ()))
    if len(dims) != 2:
        raise BadIndex("partial_transpose needs a bipartite dims pair; coarse-grain first")
    if subsystem not in (0, 1):
        raise BadIndex(f"subsystem {subsystem} not in (0, 1)")
    a, b = dims
    t = m.reshape(a, b, a, b)
    t = t.transpose(2, 1, 0, 3) if subsystem == 0 else t.transpose(0, 3, 2, 1)
    return t.reshape(a * b, a * b)


def trace_norm(M):
    return float(np.sum(np.linalg.svd(_as_array(M), compute_uv=False)))


def _xlogx(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def shannon_entropy(p):
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    return float(-np.sum(_xlogx(p))) + 0.0


def von_neumann_entropy(rho):
    return shannon_entropy(spectrum(_as_array(rho)))


def relative_entropy(sigma, rho):
    """S(sigma||rho) in bits, +inf when the support condition fails."""
    s, r = _as_array(sigma), _as_array(rho)
    if s.shape != r.shape:
        raise DimensionMismatch(f"{s.shape} vs {r.shape}")
    ws, Vs = eig_hermitian(s)
    wr, Vr = eig_hermitian(r)
    ws = np.clip(ws, 0, None)
    # weights of sigma's eigenvectors on rho's eigenvectors
    overlap = np.abs(Vs.conj().T @ Vr) ** 2
    kernel = wr < KERNEL_TOL
    if np.any(kernel):
        leak = float(ws @ overlap[:, kernel].sum(axis=1))
        if leak > SUPPORT_TOL:
            return float("inf")
    logr = np.where(kernel, 0.0, np.log2(np.where(kernel, 1.0, wr)))
    cross = float(ws @ overlap @ logr)
    val = float(np.sum(_xlogx(ws))) - cross
    return max(val, 0.0) if val > -1e-12 else val


def sqrtm_psd(M):
    return matrix_function(M, lambda w: np.sqrt(np.clip(w, 0, None)))


def fidelity(sigma, rho):
    """(tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2."""
    s, r = _as_array(sigma), _as_array(rho)
    if s.shape != r.shape:
        raise DimensionMismatch(f"{s.shape} vs {r.shape}")
    rs = sqrtm_psd(s)
    inner = rs @ r @ rs
    w = np.clip(np.linalg.eigvalsh((inner + inner.conj().T) / 2), 0, None)
    return float(min(1.0, np.sum(np.sqrt(w)) ** 2))


def matrix_to_json(M, dims=None):
    m = _as_array(M)
    return {
        "dims": list(dims) if dims else [m.shape[0]],
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    return re + 1j * im, tuple(obj.get("dims") or (re.shape[0],))
