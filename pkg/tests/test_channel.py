import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqsim import fork_rng
from cqsim.channel import (BROADCAST, UNICAST, ResolvedChannel,
                           link_success_prob, transmit)
from cqsim.rng import Rng

CH = ResolvedChannel(range_m=150.0, falloff_m=15.0)
CH_ACKLESS = ResolvedChannel(range_m=150.0, falloff_m=15.0, ack_lossless=True)


def rng(seed=0):
    return fork_rng(Rng.from_seed(seed), "channel")


class TestLinkSuccessProb:
    def test_zero_distance(self):
        assert link_success_prob(0.0, CH) == 1.0

    def test_at_range_boundary(self):
        assert link_success_prob(150.0, CH) == 1.0

    def test_one_falloff_beyond(self):
        assert link_success_prob(165.0, CH) == pytest.approx(math.exp(-1.0))

    def test_negative_distance_rejected(self):
        with pytest.raises(ValueError):
            link_success_prob(-1.0, CH)

    @given(st.floats(0.0, 1e4))
    def test_valid_probability(self, d):
        assert 0.0 <= link_success_prob(d, CH) <= 1.0


class TestTransmit:
    def test_unicast_in_range(self):
        positions = [(0.0, 0.0), (100.0, 0.0)]
        out = transmit(0, UNICAST, 1, positions, CH_ACKLESS, rng())
        assert out.receivers == {1} and out.acks == {1}

    def test_broadcast_reaches_all_in_range(self):
        positions = [(0.0, 0.0), (50.0, 0.0), (0.0, 50.0), (100.0, 100.0)]
        out = transmit(0, BROADCAST, None, positions, CH, rng())
        assert out.receivers == {1, 2, 3}

    def test_unicast_requires_distinct_target(self):
        with pytest.raises(ValueError):
            transmit(0, UNICAST, 0, [(0, 0), (1, 1)], CH, rng())

    def test_empirical_rate_beyond_range(self):
        # d = range + falloff, so each trial succeeds with probability 1/e
        positions = [(0.0, 0.0), (165.0, 0.0)]
        r = rng(99)
        n = 20000
        hits = sum(
            1 in transmit(0, UNICAST, 1, positions, CH_ACKLESS, r).receivers
            for _ in range(n))
        assert hits / n == pytest.approx(math.exp(-1.0), abs=0.02)

    def test_lossy_acks_thin_out(self):
        positions = [(0.0, 0.0), (165.0, 0.0)]
        r = rng(7)
        n = 20000
        rx = ack = 0
        for _ in range(n):
            out = transmit(0, UNICAST, 1, positions, CH, r)
            rx += 1 in out.receivers
            ack += 1 in out.acks
        assert ack / n == pytest.approx(math.exp(-2.0), abs=0.02)
        assert ack < rx

    @settings(max_examples=50)
    @given(seed=st.integers(0, 2**32 - 1),
           mode=st.sampled_from([UNICAST, BROADCAST]))
    def test_acks_subset_of_receivers(self, seed, mode):
        positions = [(0.0, 0.0), (140.0, 0.0), (160.0, 0.0), (200.0, 40.0)]
        out = transmit(0, mode, 1 if mode == UNICAST else None,
                       positions, CH, rng(seed))
        assert out.acks <= out.receivers

    def test_deterministic_given_stream(self):
        positions = [(0.0, 0.0), (170.0, 0.0), (180.0, 20.0)]
        a = [transmit(0, BROADCAST, None, positions, CH, rng(5)).receivers
             for _ in range(1)]
        b = [transmit(0, BROADCAST, None, positions, CH, rng(5)).receivers
             for _ in range(1)]
        assert a == b
