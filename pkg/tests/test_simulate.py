import numpy as np
import pytest

from relayaudit.attacks import Identity, IidAttack
from relayaudit.core import Alphabet, Pmf, StochasticMatrix
from relayaudit.empirics import conditional_type, empirical_pmf
from relayaudit.simulate import (
    NetworkSpec,
    RngStream,
    run_network,
    sample_iid,
    sample_through,
)


def test_rng_stream_rejects_unknown_role():
    with pytest.raises(ValueError):
        RngStream(0, 0, "destination")


def test_rng_streams_are_deterministic_and_distinct():
    a = RngStream(1, 0, "source").generator().random(5)
    b = RngStream(1, 0, "source").generator().random(5)
    c = RngStream(1, 1, "source").generator().random(5)
    d = RngStream(1, 0, "relay-channel").generator().random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_sample_iid_deterministic_pmf():
    seq = sample_iid(Pmf(np.array([0.0, 1.0, 0.0])), 50, RngStream(0, 0, "source"))
    assert seq.dtype == np.uint8
    assert np.all(seq == 2)


def test_sample_iid_frequencies_concentrate():
    p = np.array([0.2, 0.5, 0.3])
    seq = sample_iid(Pmf(p), 10**5, RngStream(42, 0, "source"))
    freq = empirical_pmf(seq, Alphabet(3)).values
    assert np.abs(freq - p).max() < 0.01


def test_sample_iid_rejects_nonpositive_n():
    with pytest.raises(ValueError):
        sample_iid(Pmf(np.array([1.0])), 0, RngStream(0, 0, "source"))


def test_sample_through_deterministic_channel():
    flip = StochasticMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    out = sample_through(flip, [1, 2, 1], RngStream(0, 0, "forward-channel"))
    assert np.array_equal(out, [2, 1, 2])


def test_sample_through_validates_symbols():
    m = StochasticMatrix(np.eye(2))
    with pytest.raises(ValueError):
        sample_through(m, [0, 1], RngStream(0, 0, "forward-channel"))
    with pytest.raises(ValueError):
        sample_through(m, [], RngStream(0, 0, "forward-channel"))


def test_sample_through_conditional_frequencies():
    m = StochasticMatrix(np.array([[0.7, 0.2], [0.3, 0.8]]))
    inputs = np.tile([1, 2], 5 * 10**4)
    out = sample_through(m, inputs, RngStream(7, 0, "relay-channel"))
    t = conditional_type(out, inputs, Alphabet(2), Alphabet(2))
    assert np.abs(t.matrix - m.entries).max() < 0.01


def _network():
    p_x = Pmf(np.array([0.5, 0.5]))
    m = StochasticMatrix(np.array([[0.9, 0.0], [0.1, 0.1], [0.0, 0.9]]))
    return NetworkSpec.from_product(p_x, m, m, StochasticMatrix.identity(9))


def test_from_product_expands_column_by_column():
    net = _network()
    m = np.array([[0.9, 0.0], [0.1, 0.1], [0.0, 0.9]])
    for x in range(2):
        expect = np.outer(m[:, x], m[:, x]).ravel()
        assert np.allclose(net.relay_channel.entries[:, x], expect)


def test_observation_channel_joint_input():
    ch = _network().observation_channel()
    assert ch.joint_input.values.sum() == pytest.approx(1.0)
    # P(u1=1, u2=1) = mean over x of P(u1=1|x) P(u2=1|x)
    assert ch.joint_input.values[0] == pytest.approx(0.5 * 0.81)


def test_run_network_reproducible():
    net = _network()
    t1 = run_network(net, Identity(), Identity(), 500, 9, trial_index=3)
    t2 = run_network(net, Identity(), Identity(), 500, 9, trial_index=3)
    for a, b in zip(t1, t2):
        assert np.array_equal(a, b)
    t3 = run_network(net, Identity(), Identity(), 500, 9, trial_index=4)
    assert not np.array_equal(t1.y, t3.y)


def test_attack_streams_do_not_disturb_the_rest_of_the_network():
    # replacing relay 1's attack must leave the relay inputs, relay 2's
    # output and the channel draws untouched
    net = _network()
    p = StochasticMatrix(
        np.array([[0.5, 0.25, 0.25], [0.25, 0.5, 0.25], [0.25, 0.25, 0.5]])
    )
    base = run_network(net, Identity(), Identity(), 2000, 13)
    attacked = run_network(net, IidAttack(p), Identity(), 2000, 13)
    assert np.array_equal(base.u1, attacked.u1)
    assert np.array_equal(base.u2, attacked.u2)
    assert np.array_equal(base.v2, attacked.v2)
    assert not np.array_equal(base.v1, attacked.v1)


def test_run_network_identity_passthrough():
    trace = run_network(_network(), Identity(), Identity(), 1000, 21)
    assert np.array_equal(trace.u1, trace.v1)
    assert np.array_equal(trace.u2, trace.v2)
    # identity forward map: y is the packed pair
    assert np.array_equal(trace.y, (trace.v1.astype(int) - 1) * 3 + trace.v2)


def test_network_spec_validation():
    p_x = Pmf(np.array([0.5, 0.5]))
    m = StochasticMatrix(np.array([[0.9, 0.0], [0.1, 0.1], [0.0, 0.9]]))
    with pytest.raises(ValueError):
        NetworkSpec(
            p_x=p_x,
            relay_channel=StochasticMatrix(np.eye(4)),
            forward=StochasticMatrix.identity(9),
            u1_size=3,
            u2_size=3,
        )
    with pytest.raises(ValueError):
        NetworkSpec.from_product(p_x, m, m, StochasticMatrix.identity(8))
