from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relayaudit.core import Alphabet, pair_pack
from relayaudit.empirics import (
    conditional_type,
    count,
    empirical_pmf,
    factorization_gap,
    joint_conditional_type,
)
from relayaudit.simulate import NetworkSpec, RngStream, run_network, sample_iid
from relayaudit.attacks import FixedPermutation, Identity, IidAttack
from relayaudit.core import Pmf, StochasticMatrix


# -- brute-force oracles: nested loops and exact rationals ----------------

def oracle_pmf(seq, size):
    n = len(seq)
    return [Fraction(sum(1 for s in seq if s == sym), n) for sym in range(1, size + 1)]


def oracle_conditional(outputs, inputs, out_size, in_size):
    cols = []
    defined = []
    for u in range(1, in_size + 1):
        denom = sum(1 for x in inputs if x == u)
        defined.append(denom > 0)
        if denom == 0:
            cols.append([Fraction(1 if v == u else 0) for v in range(1, out_size + 1)])
            continue
        col = []
        for v in range(1, out_size + 1):
            num = sum(1 for x, y in zip(inputs, outputs) if x == u and y == v)
            col.append(Fraction(num, denom))
        cols.append(col)
    return cols, defined


def test_count_basic():
    assert count(2, [1, 2, 2, 3]) == 2
    assert count(5, [1, 2]) == 0


def test_empirical_pmf_rejects_bad_input():
    with pytest.raises(ValueError):
        empirical_pmf([], Alphabet(2))
    with pytest.raises(ValueError):
        empirical_pmf([3], Alphabet(2))


def test_conditional_type_undefined_columns_are_identity():
    t = conditional_type([1, 1], [1, 1], Alphabet(2), Alphabet(2))
    assert not t.defined[1]
    assert np.array_equal(t.matrix[:, 1], [0.0, 1.0])
    assert t.deviation_from_identity() == 0.0


def test_conditional_type_entries_are_count_ratios():
    t = conditional_type([1, 2, 1, 2], [1, 1, 1, 2], Alphabet(2), Alphabet(2))
    assert t.matrix[0, 0] == pytest.approx(2 / 3)
    assert t.matrix[1, 0] == pytest.approx(1 / 3)
    assert t.matrix[1, 1] == 1.0


def test_length_mismatch_raises():
    with pytest.raises(ValueError):
        conditional_type([1], [1, 2], Alphabet(2), Alphabet(2))
    with pytest.raises(ValueError):
        joint_conditional_type([1], [1, 2], [1, 2], [1, 2], 2, 2)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_matches_brute_force_oracle(data):
    in_size = data.draw(st.integers(1, 4))
    out_size = data.draw(st.integers(1, 4))
    n = data.draw(st.integers(1, 200))
    inputs = data.draw(st.lists(st.integers(1, in_size), min_size=n, max_size=n))
    outputs = data.draw(st.lists(st.integers(1, out_size), min_size=n, max_size=n))

    pmf = empirical_pmf(inputs, Alphabet(in_size))
    assert [Fraction(v).limit_denominator(n) for v in pmf.values] == oracle_pmf(
        inputs, in_size
    )

    t = conditional_type(outputs, inputs, Alphabet(out_size), Alphabet(in_size))
    cols, defined = oracle_conditional(outputs, inputs, out_size, in_size)
    assert list(t.defined) == defined
    for j, col in enumerate(cols):
        for i, frac in enumerate(col):
            assert t.matrix[i, j] == pytest.approx(float(frac), abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_joint_type_equals_type_of_packed_sequences(data):
    a, b = data.draw(st.integers(1, 3)), data.draw(st.integers(1, 3))
    n = data.draw(st.integers(1, 60))
    seqs = [
        data.draw(st.lists(st.integers(1, size), min_size=n, max_size=n))
        for size in (a, b, a, b)
    ]
    v1, v2, u1, u2 = seqs
    joint = joint_conditional_type(v1, v2, u1, u2, a, b)
    direct = conditional_type(
        pair_pack(v1, v2, b), pair_pack(u1, u2, b), Alphabet(a * b), Alphabet(a * b)
    )
    assert np.array_equal(joint.matrix, direct.matrix)
    assert np.array_equal(joint.defined, direct.defined)


def test_pair_packed_pmf_equals_flattened_joint():
    rng = np.random.default_rng(11)
    u1 = rng.integers(1, 3, 100)
    u2 = rng.integers(1, 4, 100)
    packed = pair_pack(u1, u2, 3)
    pmf = empirical_pmf(packed, Alphabet(6))
    for k in range(1, 3):
        for t in range(1, 4):
            frac = np.mean((u1 == k) & (u2 == t))
            assert pmf.values[(k - 1) * 3 + t - 1] == pytest.approx(frac)


def _network():
    p_x = Pmf(np.array([0.5, 0.5]))
    m = StochasticMatrix(np.array([[0.9, 0.0], [0.1, 0.1], [0.0, 0.9]]))
    return NetworkSpec.from_product(p_x, m, m, StochasticMatrix.identity(9))


def test_factorization_gap_zero_for_identity_attacks():
    trace = run_network(_network(), Identity(), Identity(), 5000, 77)
    assert factorization_gap(trace.v1, trace.v2, trace.u1, trace.u2, 3, 3) == 0.0


def test_factorization_gap_small_for_independent_iid_attacks():
    # every relay-input pair needs decent mass, otherwise the rarely seen
    # columns dominate the gap with sampling noise
    p_x = Pmf(np.array([0.5, 0.5]))
    m = StochasticMatrix(np.array([[0.7, 0.1], [0.2, 0.2], [0.1, 0.7]]))
    net = NetworkSpec.from_product(p_x, m, m, StochasticMatrix.identity(9))
    p = StochasticMatrix(
        np.array(
            [[0.995, 0.0025, 0.0025], [0.0025, 0.995, 0.0025], [0.0025, 0.0025, 0.995]]
        )
    )
    for seed in range(2000, 2020):
        trace = run_network(net, IidAttack(p), IidAttack(p), 10**5, seed)
        gap = factorization_gap(trace.v1, trace.v2, trace.u1, trace.u2, 3, 3)
        assert gap < 0.05


def test_factorization_gap_detects_colluding_permutation():
    # same-order random permutation at both relays, correlated inputs:
    # the joint type no longer factorizes
    net = _network()
    n = 10**4
    order = np.random.default_rng(5).permutation(n) + 1
    attack = FixedPermutation(order=order)
    trace = run_network(net, attack, attack, n, 79)
    gap = factorization_gap(trace.v1, trace.v2, trace.u1, trace.u2, 3, 3)
    # relay inputs are strongly correlated, so shuffling both with the same
    # order decouples v from u marginally but not jointly
    assert gap > 0.5
