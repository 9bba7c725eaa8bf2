import math

import numpy as np
import pytest

from entkit import nlgates as N
from entkit.states import haar_unitary


def test_unitary_only_circuit():
    c = N.Circuit([("a", "A"), ("b", "A")]).gate("A", ("a", "b"), N.CNOT)
    bs, led = N.run(c, np.array([0, 0, 1, 0]))
    assert len(bs) == 1 and np.allclose(bs.branches[0].state.amplitudes, [0, 0, 0, 1])
    assert led.ebits_consumed == 0 and led.cbits_total == 0


def test_measuring_half_a_bell_pair():
    c = N.Circuit([("a", "A")]).ebit("A", "e", "B", "f").measure("A", "e", "m")
    bs, _ = N.run(c, np.array([1, 0]))
    assert [b.probability for b in bs.branches] == pytest.approx([0.5, 0.5])


def test_cnot_branches_on_plus_zero():
    c = N.protocol_nonlocal_cnot()
    bs, led = N.run(c, np.kron([1, 1], [1, 0]) / math.sqrt(2))
    assert len(bs) == 4
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    for b in bs.branches:
        assert abs(np.vdot(bell, b.state.amplitudes)) == pytest.approx(1)
    assert led.to_dict()["cbits"] == {"A->B": 1, "B->A": 1}


def test_locality_enforced():
    c = N.Circuit([("a", "A"), ("b", "B")])
    with pytest.raises(N.LocalityViolation):
        c.gate("A", ("a", "b"), N.CNOT)
    c.measure("A", "a", "m")
    with pytest.raises(N.LocalityViolation):
        c.if_bit("B", "m", ("b",), N.X)


def test_not_unitary():
    with pytest.raises(N.NotUnitary):
        N.protocol_control_u(np.array([[1, 1], [0, 1]]))


def test_entangled_discard_detected():
    c = N.Circuit([("a", "A")]).ebit("A", "e", "B", "f").discard("A", "e")
    with pytest.raises(N.AncillaEntangled):
        N.run(c, np.array([1, 0]))


def test_branch_count_is_power_of_two():
    for c in (N.protocol_nonlocal_cnot(), N.protocol_swap(), N.protocol_n_control_u(4, N.X)):
        measurements = sum(isinstance(i, N.Measure) for i in c.instructions)
        assert len(N.branch_operators(c)) == 2 ** measurements


def test_entangling_power():
    assert N.entangling_power_check(N.CNOT) == pytest.approx(1, abs=1e-9)
    assert N.entangling_power_check(N.SWAP) == pytest.approx(2, abs=1e-9)
    assert N.entangling_power_check(np.eye(4)) == pytest.approx(0, abs=1e-9)


def test_power_within_ledger(rng):
    U = haar_unitary(2, rng)
    for c, gate in [(N.protocol_nonlocal_cnot(), N.CNOT), (N.protocol_control_u(U), N.controlled(U)),
                    (N.protocol_swap(), N.SWAP)]:
        assert N.entangling_power_check(gate) <= c.ledger().ebits_consumed + 1e-9
    tof = N.protocol_toffoli()
    assert N.entangling_power_check(N.controlled(N.X, 2), ["P1", "P2", "P3"]) <= tof.ledger().ebits_consumed


def test_wrong_ideal_is_rejected():
    assert not N.channel_equivalence(N.protocol_nonlocal_cnot(), N.SWAP)
