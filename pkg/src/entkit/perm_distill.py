"""Distillable entanglement of pure pairs after both sides lose the order of their qubits.

Schur-Weyl duality splits (C^2)^{(x)n} into spin-j irreps V_j with
multiplicity d_j. Independent permutations on each side leave a maximally
entangled state on V_j (x) V_j per block and maximal mixing on the
multiplicity spaces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from fractions import Fraction
from itertools import permutations

import numpy as np

from . import qla
from .states import BadParameter, StateVector, bell


class DimensionTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class PermutationReport:
    n: int
    alpha: float
    D_before: float
    D_after: float
    info_loss: float
    ratio: float

    @property
    def delta_D(self):
        return self.D_before - self.D_after

    def to_dict(self):
        out = asdict(self)
        out["delta_D"] = self.delta_D
        return out


def spins(n):
    """Allowed total spins j for n qubits, as Fractions, from n/2 downwards."""
    J = Fraction(n, 2)
    out = []
    j = J
    while j >= 0:
        out.append(j)
        j -= 1
    return out


def multiplicity(J, j):
    """d_j = (2j+1)/(2J+1) * C(2J+1, J-j)."""
    J, j = Fraction(J), Fraction(j)
    if j < 0 or j > J or (J - j).denominator != 1:
        raise BadParameter(f"invalid spin pair J={J}, j={j}")
    val = Fraction(int(2 * j + 1), int(2 * J + 1)) * math.comb(int(2 * J + 1), int(J - j))
    assert val.denominator == 1
    return int(val)


def weight(J, j):
    """Eigenvalue p_j = (2j+1) / (2^{2J} d_j) of the symmetrized Bell-pair state."""
    d = multiplicity(J, j)
    return Fraction(int(2 * Fraction(j) + 1), 2 ** int(2 * Fraction(J)) * d)


def _block_data(n, alpha):
    """Per block j: (d_j, N_j, normalized m-distribution)."""
    if not 0 <= alpha <= 1:
        raise BadParameter(f"alpha={alpha} outside [0, 1]")
    beta = 1 - alpha
    J = Fraction(n, 2)
    out = []
    for j in spins(n):
        d = multiplicity(J, j)
        # m runs over -j..j; exponent of alpha is J+m, of beta J-m
        ms = [-j + k for k in range(int(2 * j) + 1)]
        terms = np.array([alpha ** float(J + m) * beta ** float(J - m) for m in ms])
        N = float(terms.sum())
        out.append((j, d, N, terms / N if N > 0 else terms))
    return out


def block_weights(n, alpha):
    """w_j = d_j N_j; sums to 1."""
    return {j: d * N for j, d, N, _ in _block_data(n, alpha)}


def distillable_after_permutation(n, alpha=0.5):
    if n < 2 or n % 2 or n > 60:
        raise BadParameter("closed form implemented for even n in 2..60")
    beta = 1 - alpha
    D_before = n * qla.shannon_entropy([alpha, beta])
    D_after = 0.0
    S = 0.0
    for j, d, N, dist in _block_data(n, alpha):
        w = d * N
        if w <= 0:
            continue
        D_after += w * qla.shannon_entropy(dist)
        # block j of sigma: pure state on V_j (x) V_j tensored with 1/d^2 on the multiplicity spaces
        S -= w * math.log2(w / d ** 2)
    info = S
    dD = D_before - D_after
    ratio = dD / info if info > 1e-15 else 1.0
    return PermutationReport(n, alpha, float(D_before), float(D_after), float(info), float(ratio))


def full_form_n2(alpha):
    """Closed expression for n = 2: (1-ab)log(1-ab) - (a^2 log a^2 + b^2 log b^2 + ab log ab)."""
    a, b = alpha, 1 - alpha

    def xl(x):
        return x * math.log2(x) if x > 0 else 0.0

    return xl(1 - a * b) - (xl(a * a) + xl(b * b) + xl(a * b))


# explicit oracle

def _perm_operator(perm, n):
    """Unitary permuting n qubit factors: factor i goes to position perm[i]."""
    d = 2 ** n
    P = np.zeros((d, d))
    for x in range(d):
        bits = [(x >> (n - 1 - i)) & 1 for i in range(n)]
        nb = [0] * n
        for i, p in enumerate(perm):
            nb[p] = bits[i]
        y = int("".join(map(str, nb)), 2)
        P[y, x] = 1
    return P


def _pairs_state(pair, n):
    """pair^{(x)n} reordered as A1..An B1..Bn."""
    v = pair.amplitudes
    full = v
    for _ in range(n - 1):
        full = np.kron(full, v)
    order = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
    return full.reshape((2,) * (2 * n)).transpose(order).ravel()


def symmetrize(rho, n):
    """Average of (pi_A (x) pi_B) rho (pi_A (x) pi_B)^dagger over S_n x S_n."""
    perms = [_perm_operator(p, n) for p in permutations(range(n))]
    acc = np.zeros_like(rho)
    for PA in perms:
        left = [np.kron(PA, PB) for PB in perms]
        for U in left:
            acc += U @ rho @ U.T
    return acc / len(perms) ** 2


def _spin_ops(n):
    sx = np.array([[0, 1], [1, 0]]) / 2
    sy = np.array([[0, -1j], [1j, 0]]) / 2
    sz = np.array([[1, 0], [0, -1]]) / 2

    def embed(op, k):
        return np.kron(np.kron(np.eye(2 ** k), op), np.eye(2 ** (n - k - 1)))

    return [[embed(s, k) for s in (sx, sy, sz)] for k in range(n)]


def coupling_projectors(n):
    """Projectors onto joint eigenspaces of the partial total spins J^2_{1..k}, k = 2..n."""
    ops = _spin_ops(n)
    casimirs = []
    for k in range(2, n + 1):
        tot = [sum(ops[i][c] for i in range(k)) for c in range(3)]
        casimirs.append(sum(t @ t for t in tot))
    if not casimirs:
        return [np.eye(2)]
    rng = np.random.default_rng(12345)
    M = sum(r * C for r, C in zip(rng.random(len(casimirs)) + 1, casimirs))
    _, V = np.linalg.eigh(M)
    labels = {}
    for col in range(V.shape[1]):
        v = V[:, col]
        key = tuple(round(float(np.real(v.conj() @ C @ v)), 6) for C in casimirs)
        labels.setdefault(key, []).append(v)
    return [sum(np.outer(v, v.conj()) for v in vs) for vs in labels.values()]


@dataclass(frozen=True)
class OracleResult:
    sigma: np.ndarray
    D: float
    S: float
    blocks: list


def brute_force_oracle(pair, n):
    """Explicit symmetrization in 4^n dimensions and the block-measurement protocol value."""
    if n > 3:
        raise DimensionTooLarge(f"oracle works in 4^n dimensions; n={n} exceeds 3")
    if n < 2:
        raise BadParameter("need at least two pairs")
    psi = _pairs_state(pair, n)
    rho = np.outer(psi, psi.conj())
    sigma = symmetrize(rho, n)
    projs = coupling_projectors(n)
    dA = 2 ** n
    D = 0.0
    blocks = []
    for PA in projs:
        for PB in projs:
            P = np.kron(PA, PB)
            block = P @ sigma @ P
            prob = float(np.real(np.trace(block)))
            if prob < 1e-13:
                continue
            w = np.linalg.eigvalsh(block / prob)
            if w[-2] > 1e-9:
                raise RuntimeError("projected block is not pure; protocol assumption violated")
            v = np.linalg.eigh(block)[1][:, -1]
            e = qla.shannon_entropy(np.linalg.svd(v.reshape(dA, dA), compute_uv=False) ** 2)
            D += prob * e
            blocks.append((prob, e))
    S = qla.von_neumann_entropy(sigma)
    return OracleResult(sigma, D, S, blocks)


def pair_state(alpha):
    a = np.array([math.sqrt(alpha), 0, 0, math.sqrt(1 - alpha)])
    return StateVector(a, (2, 2))


def oracle_report(n, alpha):
    res = brute_force_oracle(pair_state(alpha), n)
    before = n * qla.shannon_entropy([alpha, 1 - alpha])
    dD = before - res.D
    ratio = dD / res.S if res.S > 1e-15 else 1.0
    return PermutationReport(n, alpha, float(before), float(res.D), float(res.S), float(ratio))


def reordered_ancilla_state():
    """sigma on A B1 B2 after Bob's two qubits are permuted, one of them a Bell half."""
    def ket(bits):
        v = np.zeros(8)
        v[int(bits, 2)] = 1
        return v

    p1 = (ket("000") + ket("110")) / math.sqrt(2)
    p2 = (ket("000") + ket("101")) / math.sqrt(2)
    return (np.outer(p1, p1) + np.outer(p2, p2)) / 2


def asymmetric_example53():
    """Loss of distillable entanglement and of information for one Bell pair plus a |0> on Bob's side."""
    sigma = reordered_ancilla_state()
    w, V = np.linalg.eigh(sigma)
    D_after = 0.0
    for lam, v in zip(w, V.T):
        if lam < 1e-12:
            continue
        D_after += lam * qla.shannon_entropy(np.linalg.svd(v.reshape(2, 4), compute_uv=False) ** 2)
    # Bob can tell the eigenvectors apart locally: their B-supports are orthogonal
    supports = [qla.partial_trace(np.outer(v, v.conj()), [1, 2], (2, 2, 2)) for lam, v in zip(w, V.T) if lam > 1e-12]
    distinguishable = all(abs(np.trace(a @ b)) < 1e-10 for i, a in enumerate(supports) for b in supports[i + 1:])
    if not distinguishable:
        raise RuntimeError("eigenvectors not locally distinguishable by Bob")
    S = qla.von_neumann_entropy(sigma)
    before = 1.0
    dD = before - D_after
    return PermutationReport(1, 0.5, before, float(D_after), float(S), float(dD / S))


def rel_ent_information_bound(ensemble, tol=1e-4, seed=0, dims=None):
    """(upper estimate of the E_R loss, information loss) for mixing a pure ensemble.

    Pure members use E_R = entropy of the marginal; the mixture uses the
    numerical minimiser, whose duality gap is folded into the upper estimate.
    """
    from .measures import rel_ent_entanglement

    probs = np.array([p for p, _ in ensemble], float)
    if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-9:
        raise BadParameter("ensemble probabilities must sum to 1")
    vecs = [getattr(v, "amplitudes", v) for _, v in ensemble]
    dims = dims or ensemble[0][1].dims
    if len(dims) != 2:
        raise BadParameter("bipartite ensemble expected")
    sigma = sum(p * np.outer(v, v.conj()) for p, v in zip(probs, vecs))
    pure = sum(p * qla.shannon_entropy(np.linalg.svd(np.asarray(v).reshape(dims), compute_uv=False) ** 2)
               for p, v in zip(probs, vecs))
    res = rel_ent_entanglement(sigma, dims=tuple(dims), tol=tol, seed=seed)
    dER_upper = pure - (res.value - res.gap)
    dI = qla.von_neumann_entropy(sigma)
    return dER_upper, dI, res


def reordered_pairs_ensemble():
    """The four equally likely orderings of two Bell pairs, as vectors on (A1A2)(B1B2)."""
    psi = _pairs_state(bell("phi+"), 2)
    P = _perm_operator((1, 0), 2)
    I = np.eye(4)
    out = []
    for UA in (I, P):
        for UB in (I, P):
            out.append((0.25, StateVector(np.kron(UA, UB) @ psi, (4, 4))))
    return out
