"""Named states, Schmidt decomposition and random sampling."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .qla import DensityMatrix, BadIndex


class BadParameter(ValueError):
    pass


class BadPartition(ValueError):
    pass


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    dims: tuple

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).ravel()
        dims = tuple(int(d) for d in self.dims) if self.dims else (a.size,)
        if int(np.prod(dims)) != a.size:
            raise BadParameter(f"dims {dims} do not match {a.size} amplitudes")
        nrm = np.linalg.norm(a)
        if abs(nrm - 1) > 1e-10:
            raise BadParameter(f"state has norm {nrm!r}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "dims", dims)

    def density(self):
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)

    def __matmul__(self, other):
        return StateVector(np.kron(self.amplitudes, other.amplitudes), self.dims + other.dims)


def state(amplitudes, dims=None):
    """Normalise and wrap amplitudes."""
    a = np.asarray(amplitudes, dtype=complex).ravel()
    return StateVector(a / np.linalg.norm(a), dims or (a.size,))


def basis_index(bits, dims=None):
    dims = dims or (2,) * len(bits)
    idx = 0
    for b, d in zip(bits, dims):
        idx = idx * d + int(b)
    return idx


def product_basis_state(bits, dims=None):
    bits = [int(b) for b in bits]
    dims = tuple(dims or (2,) * len(bits))
    a = np.zeros(int(np.prod(dims)), dtype=complex)
    a[basis_index(bits, dims)] = 1
    return StateVector(a, dims)


def _from_terms(terms, n):
    a = np.zeros(2 ** n, dtype=complex)
    for coeff, bits in terms:
        a[basis_index(bits)] += coeff
    return state(a, (2,) * n)


def bell(kind="phi+"):
    k = kind.lower().replace("Φ", "phi").replace("Ψ", "psi").replace("φ", "phi").replace("ψ", "psi")
    table = {
        "phi+": [(1, "00"), (1, "11")],
        "phi-": [(1, "00"), (-1, "11")],
        "psi+": [(1, "01"), (1, "10")],
        "psi-": [(1, "01"), (-1, "10")],
    }
    if k not in table:
        raise BadParameter(f"unknown Bell state {kind!r}")
    return _from_terms(table[k], 2)


def ghz(n=3):
    if n < 2:
        raise BadParameter("ghz needs n >= 2")
    return _from_terms([(1, "0" * n), (1, "1" * n)], n)


def w_state(n=3):
    if n < 2:
        raise BadParameter("w_state needs n >= 2")
    return _from_terms([(1, "0" * i + "1" + "0" * (n - i - 1)) for i in range(n)], n)


def cluster4():
    return _from_terms([(1, "0000"), (1, "0011"), (1, "1100"), (-1, "1111")], 4)


def schmidt_state(coeffs, dims=None):
    """sum_i sqrt(coeffs_i)|ii>, coefficients given as probabilities."""
    c = np.asarray(coeffs, dtype=float)
    if np.any(c < -1e-12):
        raise BadParameter("negative Schmidt weight")
    c = np.clip(c, 0, None)
    c = c / c.sum()
    d = dims or (c.size, c.size)
    a = np.zeros(d[0] * d[1], dtype=complex)
    for i, ci in enumerate(c):
        a[i * d[1] + i] = np.sqrt(ci)
    return StateVector(a, tuple(d))


def sym_antisym_projectors(n):
    if n < 2:
        raise BadParameter("need local dimension >= 2")
    swap = np.zeros((n * n, n * n))
    for i, j in product(range(n), repeat=2):
        swap[j * n + i, i * n + j] = 1
    eye = np.eye(n * n)
    return (eye + swap) / 2, (eye - swap) / 2


def werner_sym(lam, n=3):
    """lam * sigma_s + (1 - lam) * sigma_a on C^n (x) C^n."""
    if not 0 <= lam <= 1:
        raise BadParameter(f"lambda={lam} outside [0, 1]")
    ps, pa = sym_antisym_projectors(n)
    m = lam * ps / np.trace(ps) + (1 - lam) * pa / np.trace(pa)
    return DensityMatrix(m, (n, n))


def werner2(lam):
    """lam * singlet + (1 - lam) * identity/4."""
    if not 0 <= lam <= 1:
        raise BadParameter(f"lambda={lam} outside [0, 1]")
    s = bell("psi-").density().matrix
    return DensityMatrix(lam * s + (1 - lam) * np.eye(4) / 4, (2, 2))


def maximally_mixed(dims):
    dims = tuple(dims) if not np.isscalar(dims) else (int(dims),)
    d = int(np.prod(dims))
    return DensityMatrix(np.eye(d) / d, dims)


def rho_g(lam):
    """lam * GHZ_3 + (1 - lam) |000><000|."""
    if not 0 <= lam <= 1:
        raise BadParameter(f"lambda={lam} outside [0, 1]")
    g = ghz(3).density().matrix
    z = product_basis_state("000").density().matrix
    return DensityMatrix(lam * g + (1 - lam) * z, (2, 2, 2))


@dataclass(frozen=True)
class SchmidtData:
    coefficients: np.ndarray
    basisA: np.ndarray
    basisB: np.ndarray

    @property
    def rank(self):
        return int(np.sum(self.coefficients > 1e-10))

    def reconstruct(self):
        amps = np.sqrt(self.coefficients)
        return np.einsum("k,ik,jk->ij", amps, self.basisA, self.basisB).ravel()


def bipartite_matrix(psi, cut):
    """Reshape a vector into a dA x dB matrix for the parties in `cut` vs the rest."""
    dims = psi.dims
    cut = [cut] if np.isscalar(cut) else list(cut)
    if any(not 0 <= c < len(dims) for c in cut) or len(set(cut)) != len(cut):
        raise BadPartition(f"bad cut {cut} for {len(dims)} parties")
    rest = [i for i in range(len(dims)) if i not in cut]
    t = psi.amplitudes.reshape(dims).transpose(cut + rest)
    da = int(np.prod([dims[i] for i in cut])) if cut else 1
    return t.reshape(da, -1)


def schmidt(psi, cut=(0,)):
    m = bipartite_matrix(psi, cut)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return SchmidtData(s ** 2, u, vh.T)


def entanglement_entropy(psi, cut=(0,)):
    from .qla import shannon_entropy
    return shannon_entropy(schmidt(psi, cut).coefficients)


def haar_unitary(d, rng):
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def random_simplex(d, rng):
    cuts = np.sort(rng.random(d - 1))
    return np.diff(np.concatenate(([0.0], cuts, [1.0])))


def random_density(d, rng, dims=None):
    """U D U^dagger with U Haar and D uniform on the simplex."""
    if d < 1:
        raise BadParameter("d >= 1 required")
    u = haar_unitary(d, rng)
    p = random_simplex(d, rng)
    return DensityMatrix((u * p) @ u.conj().T, dims or (d,))


def random_pure(dims, rng):
    dims = (dims,) if np.isscalar(dims) else tuple(dims)
    d = int(np.prod(dims))
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return StateVector(z / np.linalg.norm(z), dims)


def make_rng(seed=None):
    return np.random.Generator(np.random.PCG64(seed))


def named_state(spec):
    """Build a state from identifiers such as "ghz:3", "werner2:0.75", "wernersym:0.0:3".

    Returns a DensityMatrix; pure states are returned as projectors.
    """
    parts = spec.strip().split(":")
    name, args = parts[0].lower(), parts[1:]
    try:
        if name == "bell":
            return bell(args[0] if args else "phi+").density()
        if name == "ghz":
            return ghz(int(args[0]) if args else 3).density()
        if name == "w":
            return w_state(int(args[0]) if args else 3).density()
        if name == "cluster4":
            return cluster4().density()
        if name == "product":
            return product_basis_state(args[0]).density()
        if name == "werner2":
            return werner2(float(args[0]))
        if name == "wernersym":
            return werner_sym(float(args[0]), int(args[1]) if len(args) > 1 else 3)
        if name == "sigma_a":
            return werner_sym(0.0, int(args[0]) if args else 3)
        if name == "sigma_s":
            return werner_sym(1.0, int(args[0]) if args else 3)
        if name == "rhog":
            return rho_g(float(args[0]))
        if name == "schmidt":
            return schmidt_state([float(x) for x in args[0].split(",")]).density()
        if name == "mixed":
            return maximally_mixed([int(x) for x in args[0].split(",")])
    except (IndexError, ValueError) as exc:
        raise BadParameter(f"cannot build {spec!r}: {exc}") from exc
    raise BadParameter(f"unknown state identifier {spec!r}")


def named_vector(spec):
    """Pure-state variant of named_state, for factories that are pure."""
    parts = spec.strip().split(":")
    name, args = parts[0].lower(), parts[1:]
    builders = {
        "bell": lambda: bell(args[0] if args else "phi+"),
        "ghz": lambda: ghz(int(args[0]) if args else 3),
        "w": lambda: w_state(int(args[0]) if args else 3),
        "cluster4": cluster4,
        "product": lambda: product_basis_state(args[0]),
        "schmidt": lambda: schmidt_state([float(x) for x in args[0].split(",")]),
    }
    if name not in builders:
        raise BadParameter(f"{spec!r} is not a pure-state identifier")
    return builders[name]()
