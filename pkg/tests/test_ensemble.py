from fractions import Fraction as F
import itertools

import pytest
from hypothesis import given, settings, strategies as st

from invset import ensemble
from invset.bits import BitString


def test_qubit_born_frequency():
    q = ensemble.make_qubit(3, 1, 8)
    assert q.amp2() == F(3, 8)
    assert ensemble.born_frequency(q, 1) == F(3, 8)
    assert ensemble.born_frequency(q, -1) == F(5, 8)


def test_rotation_leaves_labels_alone():
    q = ensemble.make_qubit(3, 0, 8)
    for n in range(16):
        r = q.rotate(n)
        assert r.bits == q.bits and r.amp2() == q.amp2()
    assert q.rotate(16).phase_exponent == 0
    assert q.rotate(8).phase_string() == -q.bits


def test_make_qubit_validation():
    with pytest.raises(ValueError):
        ensemble.make_qubit(9, 0, 8)
    with pytest.raises(ValueError):
        ensemble.make_qubit(1, 0, 6)
    with pytest.raises(ValueError):
        ensemble.QubitEnsemble(4, BitString([1, 1]))


qubits = st.integers(0, 4).flatmap(
    lambda k: st.tuples(st.integers(0, 2**k), st.just(2**k), st.integers(0, 20)))


@settings(max_examples=60, deadline=None)
@given(st.lists(qubits, min_size=1, max_size=3))
def test_tensor_counts_match_enumeration(specs):
    qs = [ensemble.make_qubit(m, n, p) for m, p, n in specs]
    joint = ensemble.tensor(*qs)
    counts = joint.joint_counts()
    assert counts == joint.enumerate_counts()
    assert sum(counts.values()) == joint.size
    for outcome in itertools.product((1, -1), repeat=len(qs)):
        expected = F(1)
        for q, o in zip(qs, outcome):
            expected *= ensemble.born_frequency(q, o)
        assert joint.joint_frequency(outcome) == expected
    for k, q in enumerate(qs):
        assert joint.marginal_counts(k) == {1: q.bits.count(1), -1: q.bits.count(-1)}


def test_tensor_flattens():
    a, b, c = (ensemble.make_qubit(1, 0, 2) for _ in range(3))
    assert len(ensemble.tensor(ensemble.tensor(a, b), c).components) == 3


def test_frequency_csv():
    text = ensemble.tensor(ensemble.make_qubit(1, 0, 2), ensemble.make_qubit(3, 0, 4)).frequency_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "q0,q1,count,frequency"
    assert lines[1] == "1,1,3,3/8"


@pytest.mark.parametrize("p", [1, 2, 4, 16, 64, 256, 512])
def test_singlet_correlation_exact(p):
    for m in range(p + 1):
        s = ensemble.singlet_ensemble(p, m)
        assert s.agreements() == m
        assert ensemble.correlation(s) == -s.cos_theta


def test_singlet_marginals_balanced():
    s = ensemble.singlet_ensemble(16, 5)
    assert int(s.pairs[:, 0].sum()) == 0


def test_singlet_csv():
    lines = ensemble.singlet_ensemble(4, 1).to_csv().strip().split("\n")
    assert lines == ["i,A,B", "0,1,1", "1,-1,1", "2,1,-1", "3,-1,1"]


def test_singlet_validation():
    with pytest.raises(ValueError):
        ensemble.singlet_ensemble(4, 5)
    with pytest.raises(ValueError):
        ensemble.SingletPairEnsemble(4, 1, [[1, 1]])
