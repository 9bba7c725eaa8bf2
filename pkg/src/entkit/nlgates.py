"""Distributed gate protocols: exact branch enumeration and resource accounting.

A circuit names its qubits, assigns each to a party, and lists local
operations, computational-basis measurements, classical sends and
classically controlled corrections. Shared ebits are created by an
explicit instruction so the ledger counts them where they are used.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import qla
from .states import StateVector

X = np.array([[0, 1], [1, 0]], complex)
Z = np.diag([1.0 + 0j, -1.0])
H = np.array([[1, 1], [1, -1]], complex) / math.sqrt(2)
CNOT = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


class LocalityViolation(ValueError):
    pass


class NotUnitary(ValueError):
    pass


class AncillaEntangled(RuntimeError):
    pass


def controlled(U, n_controls=1):
    """|1..1><1..1| (x) U + rest (x) 1, controls first."""
    U = np.asarray(U, complex)
    d = U.shape[0]
    k = 2 ** n_controls
    out = np.eye(k * d, dtype=complex)
    out[(k - 1) * d:, (k - 1) * d:] = U
    return out


def _check_unitary(U):
    U = np.asarray(U, complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1] or not np.allclose(U.conj().T @ U, np.eye(len(U)), atol=1e-10):
        raise NotUnitary("matrix is not unitary")
    return U


# instructions

@dataclass(frozen=True)
class Gate:
    party: str
    qubits: tuple
    U: np.ndarray = field(repr=False)
    label: str = ""


@dataclass(frozen=True)
class Measure:
    party: str
    qubit: str
    bit: str


@dataclass(frozen=True)
class Send:
    sender: str
    receiver: str
    bit: str


@dataclass(frozen=True)
class IfBit:
    party: str
    bit: str
    qubits: tuple
    U: np.ndarray = field(repr=False)
    label: str = ""


@dataclass(frozen=True)
class Discard:
    party: str
    qubit: str


@dataclass(frozen=True)
class Ebit:
    partyA: str
    qubitA: str
    partyB: str
    qubitB: str


@dataclass
class ResourceLedger:
    ebits_consumed: int = 0
    cbits: Counter = field(default_factory=Counter)

    @property
    def cbits_total(self):
        return sum(self.cbits.values())

    def to_dict(self):
        return {"ebits": self.ebits_consumed, "cbits_total": self.cbits_total,
                "cbits": {f"{a}->{b}": n for (a, b), n in sorted(self.cbits.items())}}


class Circuit:
    """Builder for a distributed protocol; methods return self for chaining."""

    def __init__(self, data, name="circuit"):
        # data: list of (qubit, party) in input order
        self.name = name
        self.owner = {}
        self.data_in = []
        for q, p in data:
            self._add_qubit(q, p)
            self.data_in.append(q)
        self.data_out = list(self.data_in)
        self.instructions = []
        self._known = {}  # bit -> set of parties that hold it

    def _add_qubit(self, q, p):
        if q in self.owner:
            raise ValueError(f"qubit {q!r} declared twice")
        self.owner[q] = p

    def _local(self, party, qubits):
        for q in qubits:
            if self.owner.get(q) != party:
                raise LocalityViolation(f"{party} cannot act on {q!r} (owned by {self.owner.get(q)})")

    def gate(self, party, qubits, U, label=""):
        qubits = tuple(qubits)
        self._local(party, qubits)
        U = _check_unitary(U)
        if U.shape[0] != 2 ** len(qubits):
            raise ValueError("gate size does not match qubit count")
        self.instructions.append(Gate(party, qubits, U, label))
        return self

    def measure(self, party, qubit, bit):
        self._local(party, (qubit,))
        if bit in self._known:
            raise ValueError(f"bit {bit!r} reused")
        self._known[bit] = {party}
        self.instructions.append(Measure(party, qubit, bit))
        return self

    def send(self, sender, receiver, bit):
        if sender not in self._known.get(bit, ()):
            raise LocalityViolation(f"{sender} does not hold bit {bit!r}")
        self._known[bit].add(receiver)
        self.instructions.append(Send(sender, receiver, bit))
        return self

    def if_bit(self, party, bit, qubits, U, label=""):
        qubits = tuple(qubits)
        self._local(party, qubits)
        if party not in self._known.get(bit, ()):
            raise LocalityViolation(f"{party} conditions on bit {bit!r} it never received")
        self.instructions.append(IfBit(party, bit, qubits, _check_unitary(U), label))
        return self

    def discard(self, party, qubit):
        self._local(party, (qubit,))
        self.instructions.append(Discard(party, qubit))
        return self

    def ebit(self, partyA, qubitA, partyB, qubitB):
        self._add_qubit(qubitA, partyA)
        self._add_qubit(qubitB, partyB)
        self.instructions.append(Ebit(partyA, qubitA, partyB, qubitB))
        return self

    def outputs(self, qubits):
        self.data_out = list(qubits)
        return self

    def ledger(self):
        led = ResourceLedger()
        for ins in self.instructions:
            if isinstance(ins, Ebit):
                led.ebits_consumed += 1
            elif isinstance(ins, Send):
                led.cbits[(ins.sender, ins.receiver)] += 1
        return led

    def parties(self):
        return sorted(set(self.owner[q] for q in self.data_in))

    def without(self, predicate):
        """Copy with every instruction matching `predicate` removed (for mutation tests)."""
        c = Circuit([], self.name + "-mutant")
        c.owner = dict(self.owner)
        c.data_in = list(self.data_in)
        c.data_out = list(self.data_out)
        c._known = {k: set(v) for k, v in self._known.items()}
        c.instructions = [i for i in self.instructions if not predicate(i)]
        return c


# simulation on tensors with one trailing "column" axis

class _Reg:
    def __init__(self, names, tensor):
        self.names = list(names)
        self.t = tensor

    def copy(self):
        return _Reg(self.names, self.t.copy())

    def apply(self, qubits, U):
        k = len(qubits)
        axes = [self.names.index(q) for q in qubits]
        G = U.reshape((2,) * (2 * k))
        out = np.tensordot(G, self.t, axes=(list(range(k, 2 * k)), axes))
        self.t = np.moveaxis(out, list(range(k)), axes)

    def add_pair(self, a, b):
        bell = np.array([[1, 0], [0, 1]], complex) / math.sqrt(2)
        self.t = np.tensordot(self.t, bell, axes=0)
        self.t = np.moveaxis(self.t, [-2, -1], [len(self.names), len(self.names) + 1])
        self.names += [a, b]

    def project(self, q, outcome):
        ax = self.names.index(q)
        self.t = np.take(self.t, outcome, axis=ax)
        self.names.pop(ax)

    def remove_product(self, q):
        ax = self.names.index(q)
        M = np.moveaxis(self.t, ax, 0).reshape(2, -1)
        s = np.linalg.svd(M, compute_uv=False)
        if s[0] > 0 and s[1] > 1e-9 * s[0]:
            raise AncillaEntangled(f"qubit {q!r} is entangled with the rest when discarded")
        u, s, vh = np.linalg.svd(M, full_matrices=False)
        rest = np.moveaxis(self.t, ax, 0).shape[1:]
        self.t = (s[0] * vh[0]).reshape(rest)
        self.names.pop(ax)

    def norm2(self):
        return float(np.vdot(self.t, self.t).real)


def _enumerate(circuit, reg):
    """Depth-first enumeration of all measurement records: list of (transcript, register)."""
    out = []

    def walk(pos, reg, bits):
        for i in range(pos, len(circuit.instructions)):
            ins = circuit.instructions[i]
            if isinstance(ins, Gate):
                reg.apply(ins.qubits, ins.U)
            elif isinstance(ins, IfBit):
                if bits[ins.bit]:
                    reg.apply(ins.qubits, ins.U)
            elif isinstance(ins, Ebit):
                reg.add_pair(ins.qubitA, ins.qubitB)
            elif isinstance(ins, Discard):
                reg.remove_product(ins.qubit)
            elif isinstance(ins, Measure):
                for m in (0, 1):
                    r = reg.copy()
                    r.project(ins.qubit, m)
                    walk(i + 1, r, {**bits, ins.bit: m})
                return
        leftover = [q for q in reg.names if q not in circuit.data_out]
        for q in leftover:
            reg.remove_product(q)
        order = [reg.names.index(q) for q in circuit.data_out]
        reg.t = np.moveaxis(reg.t, order, list(range(len(order))))
        reg.names = list(circuit.data_out)
        out.append((bits, reg))

    walk(0, reg, {})
    return out


@dataclass(frozen=True)
class Branch:
    probability: float
    state: StateVector
    transcript: dict


@dataclass(frozen=True)
class BranchSet:
    branches: list

    def total_probability(self):
        return sum(b.probability for b in self.branches)

    def __len__(self):
        return len(self.branches)


def run(circuit, psi):
    vec = getattr(psi, "amplitudes", psi)
    k = len(circuit.data_in)
    if vec.size != 2 ** k:
        raise qla.DimensionMismatch(f"input has {vec.size} amplitudes, circuit expects {2 ** k}")
    reg = _Reg(circuit.data_in, np.asarray(vec, complex).reshape((2,) * k))
    branches = []
    for bits, r in _enumerate(circuit, reg):
        p = r.norm2()
        if p < 1e-15:
            branches.append(Branch(0.0, None, bits))
            continue
        branches.append(Branch(p, StateVector(r.t.ravel() / math.sqrt(p), (2,) * k), bits))
    bs = BranchSet(branches)
    if abs(bs.total_probability() - 1) > 1e-10:
        raise RuntimeError("branch probabilities do not sum to one")
    return bs, circuit.ledger()


def branch_operators(circuit):
    """Kraus operator per measurement record, mapping data_in to data_out."""
    k = len(circuit.data_in)
    iso = np.eye(2 ** k, dtype=complex).reshape((2,) * k + (2 ** k,))
    reg = _Reg(circuit.data_in, iso)
    return [(bits, r.t.reshape(2 ** len(circuit.data_out), 2 ** k)) for bits, r in _enumerate(circuit, reg)]


_PROBES = {
    "0": np.array([1, 0], complex),
    "1": np.array([0, 1], complex),
    "+": np.array([1, 1], complex) / math.sqrt(2),
    "+i": np.array([1, 1j], complex) / math.sqrt(2),
}


def probe_inputs(k):
    """4^k product inputs from {|0>,|1>,|+>,|+i>}; they span the operator space."""
    for labels in itertools.product(_PROBES, repeat=k):
        v = np.array([1.0 + 0j])
        for lab in labels:
            v = np.kron(v, _PROBES[lab])
        yield labels, v


@dataclass(frozen=True)
class Equivalence:
    equal: bool
    worst_fidelity: float
    witness: tuple | None
    branches: int

    def __bool__(self):
        return self.equal


def channel_equivalence(circuit, ideal, tol=1e-10):
    ideal = _check_unitary(ideal)
    k = len(circuit.data_in)
    if ideal.shape[0] != 2 ** k or len(circuit.data_out) != k:
        raise qla.DimensionMismatch("ideal gate arity differs from the circuit's data register")
    ops = branch_operators(circuit)
    labels, vecs = zip(*probe_inputs(k))
    V = np.array(vecs).T
    want = ideal @ V
    worst, witness = 1.0, None
    phase_ok = True
    for bits, K in ops:
        out = K @ V
        p = np.einsum("ij,ij->j", out.conj(), out).real
        live = np.flatnonzero(p > 1e-14)
        if live.size == 0:
            continue
        ov = np.einsum("ij,ij->j", want[:, live].conj(), out[:, live]) / np.sqrt(p[live])
        f = np.abs(ov) ** 2
        j = int(np.argmin(f))
        if f[j] < worst - 1e-12:
            worst, witness = float(f[j]), labels[live[j]]
        # one phase shared by every probe
        ref = ov[0] / abs(ov[0]) if abs(ov[0]) > 1e-12 else 1.0
        bad = np.flatnonzero(np.abs(ov - ref * np.abs(ov)) > 1e-8)
        if bad.size:
            phase_ok = False
            if witness is None:
                witness = labels[live[bad[0]]]
    equal = worst >= 1 - tol and phase_ok
    return Equivalence(bool(equal), float(worst), None if equal else witness, len(ops))


# shipped protocols

def protocol_control_u(U, name="cu"):
    """Controlled-U with the control at Alice and the target at Bob; one ebit, one bit each way."""
    U = _check_unitary(U)
    c = Circuit([("a", "A"), ("b", "B")], name)
    c.ebit("A", "ea", "B", "eb")
    c.gate("A", ("a", "ea"), CNOT, "cnot")
    c.measure("A", "ea", "m1").send("A", "B", "m1")
    c.if_bit("B", "m1", ("eb",), X, "x")
    c.gate("B", ("eb", "b"), controlled(U), "cu")
    c.gate("B", ("eb",), H, "h")
    c.measure("B", "eb", "m2").send("B", "A", "m2")
    c.if_bit("A", "m2", ("a",), Z, "z")
    return c


def protocol_nonlocal_cnot():
    return protocol_control_u(X, "cnot")


def _teleport(c, src, party_from, mem_from, mem_to, party_to, tag):
    c.ebit(party_from, mem_from, party_to, mem_to)
    c.gate(party_from, (src, mem_from), CNOT, "cnot")
    c.gate(party_from, (src,), H, "h")
    c.measure(party_from, src, tag + "z").measure(party_from, mem_from, tag + "x")
    c.send(party_from, party_to, tag + "x").send(party_from, party_to, tag + "z")
    c.if_bit(party_to, tag + "x", (mem_to,), X, "x")
    c.if_bit(party_to, tag + "z", (mem_to,), Z, "z")


def protocol_swap():
    """Swap by teleporting each qubit across; two ebits, two bits each way."""
    c = Circuit([("a", "A"), ("b", "B")], "swap")
    _teleport(c, "a", "A", "ta", "tb", "B", "t1")
    _teleport(c, "b", "B", "sb", "sa", "A", "t2")
    return c.outputs(["sa", "tb"])


def protocol_n_control_u(N, U, name=None):
    """N-1 controls held by parties P1..P{N-1}, target held by party P{N}."""
    if N < 3:
        raise ValueError("need N >= 3 parties")
    U = _check_unitary(U)
    T = f"P{N}"
    data = [(f"c{i}", f"P{i}") for i in range(1, N)] + [("t", T)]
    c = Circuit(data, name or f"ncu{N}")
    for i in range(1, N):
        P = f"P{i}"
        c.ebit(P, f"p{i}", T, f"q{i}")
        c.gate(P, (f"c{i}", f"p{i}"), CNOT, "cnot")
        c.measure(P, f"p{i}", f"m{i}").send(P, T, f"m{i}")
        c.if_bit(T, f"m{i}", (f"q{i}",), X, "x")
    qs = tuple(f"q{i}" for i in range(1, N))
    c.gate(T, qs + ("t",), controlled(U, N - 1), "mcu")
    for q in qs:
        c.gate(T, (q,), H, "h")
    for i in range(N - 1, 0, -1):
        c.measure(T, f"q{i}", f"n{i}").send(T, f"P{i}", f"n{i}")
        c.if_bit(f"P{i}", f"n{i}", (f"c{i}",), Z, "z")
    return c


def protocol_toffoli():
    return protocol_n_control_u(3, X, "toffoli")


def ideal_gate(circuit_name, U=None, N=None):
    if circuit_name == "cnot":
        return CNOT
    if circuit_name == "swap":
        return SWAP
    if circuit_name == "toffoli":
        return controlled(X, 2)
    if circuit_name in ("cu",):
        return controlled(U)
    return controlled(U, N - 1)


def drop_corrections(circuit, label="z"):
    """Mutant that forgets every classically controlled correction with the given label."""
    return circuit.without(lambda ins: isinstance(ins, IfBit) and ins.label == label)


# entangling power

def _local_candidates(rng, samples):
    singles = list(_PROBES.values())
    bell = np.array([1, 0, 0, 1], complex) / math.sqrt(2)
    cands = [np.kron(s, [1, 0]) for s in singles] + [bell]
    for _ in range(samples):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        cands.append(v / np.linalg.norm(v))
    return cands


def entangling_power_check(gate, parties=None, samples=40, seed=0):
    """Largest entanglement entropy across any one-party cut that `gate` creates from a product input.

    Each data qubit may be entangled with a private reference qubit held by
    the same party, so gates that move entanglement (swap) are credited.
    """
    if isinstance(gate, Circuit):
        circuit = gate
        U = np.zeros((2 ** len(circuit.data_in),) * 2, complex)
        for bits, K in branch_operators(circuit):
            U = K
            break
        parties = [circuit.owner[q] for q in circuit.data_in]
        gate = U
    U = _check_unitary(gate)
    k = int(round(math.log2(U.shape[0])))
    parties = parties or list(range(k))
    if len(parties) != k:
        raise ValueError("one party label per data qubit")
    rng = np.random.default_rng(seed)
    cands = _local_candidates(rng, samples)
    # full register ordering: data qubits then references, same index order
    dims = (2,) * (2 * k)
    labels = sorted(set(parties), key=parties.index)
    best = 0.0
    choices = range(len(cands))
    pool = list(itertools.product(choices, repeat=k)) if len(cands) ** k <= 20000 else \
        [tuple(rng.integers(len(cands), size=k)) for _ in range(20000)]
    full_U = np.kron(U, np.eye(2 ** k))
    for combo in pool:
        # each candidate is on (data_i, ref_i); reorder to data..., ref...
        v = np.array([1.0 + 0j])
        for i in combo:
            v = np.kron(v, cands[i])
        order = [2 * i for i in range(k)] + [2 * i + 1 for i in range(k)]
        v = v.reshape(dims).transpose(order).ravel()
        out = full_U @ v
        for lab in labels:
            side = [i for i in range(k) if parties[i] == lab]
            keep = side + [k + i for i in side]
            M = np.moveaxis(out.reshape(dims), keep, list(range(len(keep)))).reshape(2 ** len(keep), -1)
            s = np.linalg.svd(M, compute_uv=False) ** 2
            best = max(best, qla.shannon_entropy(s[s > 1e-15]))
    return float(best)
