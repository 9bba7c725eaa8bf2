"""Randomized laws: majorization order, entropy identities, negativity, monotonicity."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entkit import measures, perm_distill, qla, transform
from entkit.states import haar_unitary, make_rng, random_density, random_pure, random_simplex

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
FAST = settings(max_examples=40, deadline=None)


def _spec(rng, d):
    return np.sort(random_simplex(d, rng))[::-1]


@FAST
@given(seeds, st.integers(2, 6))
def test_majorization_reflexive_transitive(seed, d):
    rng = make_rng(seed)
    x, y, z = (_spec(rng, d) for _ in range(3))
    assert transform.majorizes(x, x)
    if transform.majorizes(x, y) and transform.majorizes(y, z):
        assert transform.majorizes(x, z)
    # chain built by mixing towards the uniform vector is always ordered
    u = np.ones(d) / d
    a, b = 0.7 * x + 0.3 * u, 0.3 * x + 0.7 * u
    assert transform.majorizes(b, a) and transform.majorizes(a, x)


@FAST
@given(seeds, st.integers(2, 5))
def test_majorization_antisymmetric(seed, d):
    rng = make_rng(seed)
    x, y = _spec(rng, d), _spec(rng, d)
    if transform.majorizes(x, y) and transform.majorizes(y, x):
        assert np.allclose(x, y, atol=1e-10)
    assert transform.majorizes(x, rng.permutation(x))


@FAST
@given(seeds, st.integers(2, 4), st.integers(2, 4))
def test_catalysis_matches_bruteforce(seed, d, k):
    rng = make_rng(seed)
    x, y, w = _spec(rng, d), _spec(rng, d), _spec(rng, k)
    a = np.sort(np.kron(x, w))[::-1]
    b = np.sort(np.kron(y, w))[::-1]
    brute = all(a[:i].sum() <= b[:i].sum() + 1e-12 for i in range(1, len(a) + 1))
    verdict = transform.catalyst_enables(x, y, w)
    assert bool(verdict) == brute
    if verdict:
        assert transform.powersum_obstruction(x, y).possible != "no"


@FAST
@given(seeds)
def test_entropy_additivity_and_convexity(seed):
    rng = make_rng(seed)
    r1, r2 = random_density(2, rng).matrix, random_density(3, rng).matrix
    s1, s2 = random_density(2, rng).matrix, random_density(3, rng).matrix
    assert qla.von_neumann_entropy(np.kron(r1, r2)) == pytest.approx(
        qla.von_neumann_entropy(r1) + qla.von_neumann_entropy(r2), abs=1e-9)
    lhs = qla.relative_entropy(np.kron(s1, s2), np.kron(r1, r2))
    assert lhs == pytest.approx(qla.relative_entropy(s1, r1) + qla.relative_entropy(s2, r2), abs=1e-9)
    for lam in (0.25, 0.5, 0.75):
        a, b = random_density(3, rng).matrix, random_density(3, rng).matrix
        mixed = qla.relative_entropy(lam * s2 + (1 - lam) * a, lam * r2 + (1 - lam) * b)
        assert mixed <= lam * qla.relative_entropy(s2, r2) + (1 - lam) * qla.relative_entropy(a, b) + 1e-9


@FAST
@given(seeds, st.floats(0.05, 0.95))
def test_entropy_direct_sum(seed, p):
    rng = make_rng(seed)
    s1, r1 = random_density(2, rng).matrix, random_density(2, rng).matrix
    s2, r2 = random_density(3, rng).matrix, random_density(3, rng).matrix
    q = rng.uniform(0.05, 0.95)

    def block(a, b, w):
        out = np.zeros((5, 5), complex)
        out[:2, :2], out[2:, 2:] = w * a, (1 - w) * b
        return out

    lhs = qla.relative_entropy(block(s1, s2, p), block(r1, r2, q))
    rhs = p * qla.relative_entropy(s1, r1) + (1 - p) * qla.relative_entropy(s2, r2) \
        + qla.relative_entropy(np.diag([p, 1 - p]), np.diag([q, 1 - q]))
    assert lhs == pytest.approx(rhs, abs=1e-9)


@FAST
@given(seeds)
def test_trace_norm_multiplicative(seed):
    rng = make_rng(seed)
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    B = rng.normal(size=(2, 2))
    assert qla.trace_norm(np.kron(A, B)) == pytest.approx(qla.trace_norm(A) * qla.trace_norm(B), rel=1e-9)


@FAST
@given(seeds, st.sampled_from([0.25, 0.5, 0.75]))
def test_negativity_convex(seed, lam):
    rng = make_rng(seed)
    a, b = random_density(4, rng, (2, 2)), random_density(4, rng, (2, 2))
    mix = lam * a.matrix + (1 - lam) * b.matrix
    assert measures.negativity(mix, dims=(2, 2)) <= \
        lam * measures.negativity(a) + (1 - lam) * measures.negativity(b) + 1e-9


@FAST
@given(seeds)
def test_log_negativity_additive(seed):
    rng = make_rng(seed)
    a = random_density(4, rng, (2, 2)).matrix
    b = random_density(4, rng, (2, 2)).matrix
    # sides: (A1 B1 | A2 B2) reordered to (A1 A2 | B1 B2)
    ab = qla.permute_subsystems(np.kron(a, b), (2, 2, 2, 2), (0, 2, 1, 3))
    joint = measures.log_negativity(ab, [0, 1], (2, 2, 2, 2))
    assert joint == pytest.approx(measures.log_negativity(a, dims=(2, 2)) + measures.log_negativity(b, dims=(2, 2)),
                                  abs=1e-8)


@FAST
@given(seeds)
def test_negativity_equals_concurrence_pure(seed):
    psi = random_pure((2, 2), make_rng(seed)).density()
    assert measures.negativity(psi) == pytest.approx(measures.concurrence(psi), abs=1e-9)


def _local_kraus(rng):
    """Two-outcome instrument on side A: K1 = U sqrt(E), K2 = V sqrt(1-E)."""
    w, V = np.linalg.eigh(random_density(2, rng).matrix)
    E = V @ np.diag(np.clip(w * 1.6, 0, 1)) @ V.conj().T
    vals, vecs = np.linalg.eigh(E)
    sq = vecs @ np.diag(np.sqrt(np.clip(vals, 0, 1))) @ vecs.conj().T
    sq2 = vecs @ np.diag(np.sqrt(np.clip(1 - vals, 0, 1))) @ vecs.conj().T
    return [np.kron(haar_unitary(2, rng) @ sq, np.eye(2)), np.kron(haar_unitary(2, rng) @ sq2, np.eye(2))]


@pytest.mark.slow
@pytest.mark.parametrize("seed", [11, 12, 13])
def test_trace_norm_measure_monotone(seed):
    rng = make_rng(seed)
    psi = random_pure((2, 2), rng).density().matrix
    rho = 0.7 * psi + 0.3 * random_density(4, rng, (2, 2)).matrix
    before = measures.trace_norm_measure(rho, dims=(2, 2), seed=seed)
    total, slack = 0.0, before.gap
    ks = _local_kraus(rng)
    assert np.allclose(sum(K.conj().T @ K for K in ks), np.eye(4))
    for K in ks:
        out = K @ rho @ K.conj().T
        p = np.trace(out).real
        if p < 1e-9:
            continue
        r = measures.trace_norm_measure(out / p, dims=(2, 2), seed=seed)
        total += p * (r.value - r.gap)
    assert total <= before.value + slack + 1e-4


@pytest.mark.slow
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_mixing_pure_states_information_bound(seed):
    rng = make_rng(seed)
    lam = rng.uniform(0.2, 0.8)
    ens = [(lam, random_pure((2, 2), rng)), (1 - lam, random_pure((2, 2), rng))]
    d_er, d_i, res = perm_distill.rel_ent_information_bound(ens, tol=1e-4)
    assert d_er <= d_i + 2 * res.gap + 1e-6
