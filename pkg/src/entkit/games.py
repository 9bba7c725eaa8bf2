"""Two-player, two-strategy games played on an entangled qubit pair.

The referee prepares J(gamma)|00>, the players apply local unitaries, the
referee undoes J and measures in the computational basis. Outcome 0 means
C, outcome 1 means D; the first qubit belongs to Alice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .states import BadParameter, StateVector

OUTCOMES = ("CC", "CD", "DC", "DD")
SETS = ("S1", "S2", "SU2")


@dataclass(frozen=True)
class GameSpec:
    payoffA: tuple
    payoffB: tuple
    gamma: float = math.pi / 2
    name: str = "custom"

    def __post_init__(self):
        for table in (self.payoffA, self.payoffB):
            if len(table) != 4 or not all(math.isfinite(x) for x in table):
                raise BadParameter("payoff tables need four finite entries (CC, CD, DC, DD)")
        if not -1e-12 <= self.gamma <= math.pi / 2 + 1e-12:
            raise BadParameter(f"gamma={self.gamma} outside [0, pi/2]")

    def with_gamma(self, gamma):
        return GameSpec(self.payoffA, self.payoffB, gamma, self.name)

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(map(float, obj["A"])), tuple(map(float, obj["B"])),
                   float(obj.get("gamma", math.pi / 2)), obj.get("name", "custom"))


def prisoners_dilemma(gamma=math.pi / 2):
    return GameSpec((3.0, 0.0, 5.0, 1.0), (3.0, 5.0, 0.0, 1.0), gamma, "pd")


def chicken(gamma=math.pi / 2):
    return GameSpec((6.0, 2.0, 8.0, 0.0), (6.0, 8.0, 2.0, 0.0), gamma, "chicken")


GAMES = {"pd": prisoners_dilemma, "chicken": chicken}


@dataclass(frozen=True)
class StrategyPoint:
    set: str
    params: tuple

    def __post_init__(self):
        if self.set not in SETS:
            raise BadParameter(f"unknown strategy set {self.set!r}")
        need = {"S1": 1, "S2": 2, "SU2": 3}[self.set]
        if len(self.params) != need:
            raise BadParameter(f"{self.set} takes {need} parameters")

    def unitary(self):
        return _unitary(self.set, np.array(self.params, float)[None, :])[0]


def _unitary(kind, P):
    """Batch of 2x2 unitaries from an (m, k) parameter array."""
    t = P[:, 0]
    c, s = np.cos(t / 2), np.sin(t / 2)
    phi = P[:, 1] if kind in ("S2", "SU2") else np.zeros_like(t)
    psi = P[:, 2] if kind == "SU2" else np.zeros_like(t)
    U = np.empty((len(t), 2, 2), complex)
    U[:, 0, 0] = np.exp(1j * phi) * c
    U[:, 0, 1] = np.exp(1j * psi) * s
    U[:, 1, 0] = -np.exp(-1j * psi) * s
    U[:, 1, 1] = np.exp(-1j * phi) * c
    return U


def C():
    return StrategyPoint("S2", (0.0, 0.0))


def D():
    return StrategyPoint("S2", (math.pi, 0.0))


def Q():
    return StrategyPoint("S2", (0.0, math.pi / 2))


def M():
    return StrategyPoint("S2", (math.pi / 2, math.pi / 2))


_DD = np.array([[0, 1], [-1, 0]], complex)


def entangler(gamma):
    """J(gamma) = exp(i gamma/2 D(x)D); (D(x)D)^2 = 1 so the exponential is a cos/sin pair."""
    K = np.kron(_DD, _DD)
    return math.cos(gamma / 2) * np.eye(4) + 1j * math.sin(gamma / 2) * K


def initial_state(gamma):
    if not -1e-12 <= gamma <= math.pi / 2 + 1e-12:
        raise BadParameter(f"gamma={gamma} outside [0, pi/2]")
    return StateVector(entangler(gamma)[:, 0], (2, 2))


def measurement_projectors(gamma):
    J = entangler(gamma)
    out = []
    for x in ("C", "D"):
        for y in ("C", "D"):
            X = np.eye(2) if x == "C" else _DD
            Y = np.eye(2) if y == "C" else _DD
            v = np.kron(X, Y) @ J[:, 0]
            out.append(np.outer(v, v.conj()))
    return out


def _as_unitary(s):
    if isinstance(s, StrategyPoint):
        return s.unitary()
    U = np.asarray(s, complex)
    if U.shape != (2, 2) or not np.allclose(U.conj().T @ U, np.eye(2), atol=1e-10):
        raise BadParameter("strategy must be a 2x2 unitary")
    return U


def outcome_probabilities(gamma, UA, UB):
    """Outcome distribution for batches of unitaries UA (m,2,2), UB (m,2,2)."""
    J = entangler(gamma)
    v0 = J[:, 0]
    UA = np.asarray(UA).reshape(-1, 2, 2)
    UB = np.asarray(UB).reshape(-1, 2, 2)
    ket = v0.reshape(2, 2)
    # (UA (x) UB) v0 as UA @ ket @ UB^T
    out = np.einsum("mab,bc,mdc->mad", UA, ket, UB).reshape(-1, 4)
    fin = out @ J.conj()  # J^dagger acting: (J^dagger x)_k = sum_l conj(J_lk) x_l
    return np.abs(fin) ** 2


def payoff(spec, sA, sB):
    UA, UB = _as_unitary(sA), _as_unitary(sB)
    J = entangler(spec.gamma)
    sigma_vec = J.conj().T @ np.kron(UA, UB) @ J[:, 0]
    sigma = np.outer(sigma_vec, sigma_vec.conj())
    # projectors in the referee's frame after J^dagger are the computational basis
    probs = np.real(np.diag(sigma))
    return float(probs @ np.array(spec.payoffA)), float(probs @ np.array(spec.payoffB))


def payoff_closed_form(spec, sA, sB):
    """Outcome probabilities written out for S2 strategies at maximal entanglement."""
    if sA.set != "S2" or sB.set != "S2" or abs(spec.gamma - math.pi / 2) > 1e-12:
        raise BadParameter("closed form covers S2 strategies with gamma = pi/2")
    tA, pA = sA.params
    tB, pB = sB.params
    cA, sA_, cB, sB_ = math.cos(tA / 2), math.sin(tA / 2), math.cos(tB / 2), math.sin(tB / 2)
    probs = np.array([
        (math.cos(pA + pB) * cA * cB) ** 2,
        (math.sin(pB) * cB * sA_ - math.cos(pA) * cA * sB_) ** 2,
        (math.sin(pA) * cA * sB_ - math.cos(pB) * cB * sA_) ** 2,
        (math.sin(pA + pB) * cA * cB + sA_ * sB_) ** 2,
    ])
    return float(probs @ np.array(spec.payoffA)), float(probs @ np.array(spec.payoffB))


def _bounds(kind):
    return {"S1": [(0, math.pi)],
            "S2": [(0, math.pi), (0, math.pi / 2)],
            "SU2": [(0, math.pi), (0, 2 * math.pi), (0, 2 * math.pi)]}[kind]


def _grid(kind, density):
    axes = []
    for lo, hi in _bounds(kind):
        periodic = hi == 2 * math.pi
        axes.append(np.linspace(lo, hi, density, endpoint=not periodic))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _payoffs_vs(spec, player, kind, P, opponent_U):
    Us = _unitary(kind, P)
    other = np.broadcast_to(opponent_U, Us.shape)
    if player == "A":
        pr = outcome_probabilities(spec.gamma, Us, other)
        return pr @ np.array(spec.payoffA)
    pr = outcome_probabilities(spec.gamma, other, Us)
    return pr @ np.array(spec.payoffB)


def best_response(spec, opponent, kind, grid_density=64, player="A"):
    """Best reply of `player` to a fixed opponent strategy: (StrategyPoint, payoff)."""
    U = _as_unitary(opponent)
    P = _grid(kind, grid_density)
    vals = _payoffs_vs(spec, player, kind, P, U)
    i = int(np.argmax(vals))  # first maximiser wins ties
    x0, best = P[i], float(vals[i])
    bnds = _bounds(kind)

    def neg(x):
        x = np.clip(x, [b[0] for b in bnds], [b[1] for b in bnds])
        return -float(_payoffs_vs(spec, player, kind, x[None, :], U)[0])

    res = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 2000})
    x = np.clip(res.x, [b[0] for b in bnds], [b[1] for b in bnds])
    if -neg(x) > best:
        x0, best = x, -neg(x)
    return StrategyPoint(kind, tuple(float(v) for v in x0)), best


@dataclass(frozen=True)
class NashVerdict:
    nash: bool
    payoffs: tuple
    deviation: StrategyPoint | None
    deviator: str | None
    deviation_payoff: float | None

    def __bool__(self):
        return self.nash


def is_nash(spec, sA, sB, kind, grid_density=64, tol=1e-4):
    pa, pb = payoff(spec, sA, sB)
    for player, opp, cur in (("A", sB, pa), ("B", sA, pb)):
        dev, val = best_response(spec, opp, kind, grid_density, player)
        if val > cur + tol:
            return NashVerdict(False, (pa, pb), dev, player, val)
    return NashVerdict(True, (pa, pb), None, None, None)


def optimal_answer(U):
    """The SU(2) reply that hands the replying player outcome DC/CD with certainty at maximal entanglement."""
    U = _as_unitary(U)
    a, b = U[0]
    c, d = U[1]
    return np.array([[-1j * b, a], [-d, -1j * c]])


def focal_payoff(spec):
    """Payoff when the joint state is driven to the maximally mixed state."""
    return float(np.mean(spec.payoffA)), float(np.mean(spec.payoffB))


PARTIAL_A = (np.eye(2, dtype=complex), np.diag([-1j, 1j]))
PARTIAL_B = (np.array([[0, 1], [-1, 0]], complex), np.array([[0, -1j], [-1j, 0]]))


@dataclass(frozen=True)
class MixedCheck:
    identities: bool
    mixture_payoff: tuple
    max_pure_deviation: float

    def __bool__(self):
        return self.identities and all(abs(v - 2.5) < 1e-10 for v in self.mixture_payoff) \
            and self.max_pure_deviation <= 2.5 + 1e-6


def mixed_equilibrium_check(spec=None, grid_density=48):
    spec = spec or prisoners_dilemma()
    ok = True
    for i in range(2):
        for k in range(2):
            pa, pb = payoff(spec, PARTIAL_A[i], PARTIAL_B[k])
            want = (0.0, 5.0) if i == k else (5.0, 0.0)
            ok &= abs(pa - want[0]) < 1e-10 and abs(pb - want[1]) < 1e-10
    mixA = np.mean([payoff(spec, a, b)[0] for a in PARTIAL_A for b in PARTIAL_B])
    mixB = np.mean([payoff(spec, a, b)[1] for a in PARTIAL_A for b in PARTIAL_B])
    P = _grid("SU2", grid_density)
    devA = np.mean([_payoffs_vs(spec, "A", "SU2", P, b) for b in PARTIAL_B], axis=0).max()
    devB = np.mean([_payoffs_vs(spec, "B", "SU2", P, a) for a in PARTIAL_A], axis=0).max()
    return MixedCheck(bool(ok), (float(mixA), float(mixB)), float(max(devA, devB)))


def _guaranteed(spec, P):
    """min over Bob's classical mixtures of Alice's payoff; linear in p_B so the endpoints suffice."""
    vc = _payoffs_vs(spec, "A", "S2", P, C().unitary())
    vd = _payoffs_vs(spec, "A", "S2", P, D().unitary())
    return np.minimum(vc, vd)


def unfair_minmax(spec, gamma=None, grid=128, return_strategy=False):
    spec = spec.with_gamma(spec.gamma if gamma is None else gamma)
    P = _grid("S2", grid)
    vals = _guaranteed(spec, P)
    i = int(np.argmax(vals))
    x, best = P[i], float(vals[i])

    def neg(y):
        y = np.clip(y, [0, 0], [math.pi, math.pi / 2])
        return -float(_guaranteed(spec, y[None, :])[0])

    res = minimize(neg, x, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
    y = np.clip(res.x, [0, 0], [math.pi, math.pi / 2])
    if -neg(y) > best:
        x, best = y, -neg(y)
    if return_strategy:
        return best, StrategyPoint("S2", tuple(float(v) for v in x))
    return best


def threshold_sweep(spec, gammas, grid=128):
    return [(float(g), unfair_minmax(spec, g, grid)) for g in gammas]


def strategy_switch(spec, grid=128, tol=1e-4):
    """Smallest gamma at which playing D stops being Alice's max-min choice."""
    d_value = lambda g: float(_guaranteed(spec.with_gamma(g), np.array([[math.pi, 0.0]]))[0])

    def switched(g):
        return unfair_minmax(spec, g, grid) > d_value(g) + 1e-9

    lo, hi = 0.0, math.pi / 2
    if switched(lo) or not switched(hi):
        return None
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if switched(mid):
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2
