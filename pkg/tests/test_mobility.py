import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqsim import FlowSpec, MobilityConfig, SimConfig, fork_rng
from cqsim.config import BENCHMARK_5, RANDOM_WAYPOINT, STATIC, UNIFORM
from cqsim.mobility import (NodeKinematics, Region, assign_regions,
                            benchmark_regions, gm_step, initial_kinematics,
                            reflect_at_edges, rwp_step, step)
from cqsim.rng import Rng


def rng(seed=0):
    return fork_rng(Rng.from_seed(seed), "mobility")


def area_cfg(n=10, layout=UNIFORM, model="gauss_markov", **mob):
    return SimConfig(node_count=n, flows=[FlowSpec(0, n - 1)],
                     mobility=MobilityConfig(model=model, region_layout=layout, **mob))


BIG = Region(0.0, 1e6, 0.0, 1e6)


class TestGaussMarkov:
    def test_full_memory_keeps_state(self):
        k = NodeKinematics(x=10.0, y=10.0, speed=3.0, heading=1.2, mean_heading=0.5)
        cfg = MobilityConfig(mu=1.0, mean_speed_mps=9.0, speed_sigma=2.0)
        out = gm_step(k, cfg, rng(), BIG, dt=1.0)
        assert out.speed == 3.0 and out.heading == 1.2

    def test_memoryless_jumps_to_means(self):
        k = NodeKinematics(x=10.0, y=10.0, speed=3.0, heading=1.2, mean_heading=0.5)
        cfg = MobilityConfig(mu=0.0, mean_speed_mps=9.0, speed_sigma=0.0, angle_sigma=0.0)
        out = gm_step(k, cfg, rng(), BIG, dt=1.0)
        assert out.speed == 9.0 and out.heading == 0.5

    def test_straight_line_motion(self):
        k = NodeKinematics(x=10.0, y=10.0, speed=2.0, heading=0.0, mean_heading=0.0)
        cfg = MobilityConfig(mu=1.0, mean_speed_mps=2.0)
        out = gm_step(k, cfg, rng(), BIG, dt=1.0)
        assert (out.x, out.y) == (12.0, 10.0)

    def test_speed_clamped_nonnegative(self):
        k = NodeKinematics(x=10.0, y=10.0, speed=0.1, heading=0.0, mean_heading=0.0)
        cfg = MobilityConfig(mu=0.5, mean_speed_mps=0.0, speed_sigma=50.0)
        r = rng(5)
        for _ in range(200):
            k = gm_step(k, cfg, r, BIG, dt=1.0)
            assert k.speed >= 0.0

    def test_stationary_mean_near_base_speed(self):
        # quick version of the acceptance criterion
        cfg = MobilityConfig(mu=0.85, mean_speed_mps=4.0)
        k = NodeKinematics(x=5e5, y=5e5, speed=4.0, heading=0.0, mean_heading=0.0)
        r = rng(11)
        total = 0.0
        n = 20000
        for _ in range(n):
            k = gm_step(k, cfg, r, BIG, dt=1.0)
            total += k.speed
        assert total / n == pytest.approx(4.0, rel=0.05)


class TestRandomWaypoint:
    def test_linear_approach(self):
        k = NodeKinematics(x=0.0, y=0.0, speed=1.0, heading=0.0, mean_heading=0.0,
                           waypoint=(5.0, 0.0))
        cfg = MobilityConfig(model=RANDOM_WAYPOINT, mean_speed_mps=1.0)
        out = rwp_step(k, cfg, rng(), BIG, dt=1.0)
        assert out.x == pytest.approx(1.0) and out.y == pytest.approx(0.0)

    def test_arrival_resamples_waypoint_inside_region(self):
        reg = Region(0.0, 50.0, 0.0, 20.0)
        k = NodeKinematics(x=10.0, y=10.0, speed=1.0, heading=0.0, mean_heading=0.0,
                           waypoint=(10.0, 10.0))
        cfg = MobilityConfig(model=RANDOM_WAYPOINT, mean_speed_mps=1.0)
        out = rwp_step(k, cfg, rng(3), reg, dt=1.0)
        assert out.waypoint != (10.0, 10.0)
        wx, wy = out.waypoint
        assert 0.0 <= wx <= 50.0 and 0.0 <= wy <= 20.0

    def test_deterministic_trajectories(self):
        cfg = MobilityConfig(model=RANDOM_WAYPOINT, mean_speed_mps=2.0)
        reg = Region(0.0, 100.0, 0.0, 100.0)

        def trajectory():
            r = rng(8)
            k = NodeKinematics(x=50.0, y=50.0, speed=2.0, heading=0.0, mean_heading=0.0)
            pts = []
            for _ in range(50):
                k = rwp_step(k, cfg, r, reg, dt=1.0)
                pts.append((k.x, k.y))
            return pts

        assert trajectory() == trajectory()


class TestRegions:
    def test_benchmark_bands_cover_area_with_overlap(self):
        cfg = area_cfg(n=30, layout=BENCHMARK_5)
        regions = benchmark_regions(cfg)
        assert regions[0].x_min == 0.0
        assert regions[4].x_max == pytest.approx(cfg.area_width_m)
        for a, b in zip(regions, regions[1:]):
            overlap = a.x_max - b.x_min
            assert overlap == pytest.approx(0.10 * (a.x_max - a.x_min))

    def test_even_distribution(self):
        cfg = area_cfg(n=30, layout=BENCHMARK_5)
        region_of, regions = assign_regions(cfg)
        counts = [region_of.count(b) for b in range(5)]
        assert counts == [6, 6, 6, 6, 6]
        assert region_of[0] == 0                      # flow source leftmost
        assert region_of[29] == 4                     # flow destination rightmost

    def test_variance_scales(self):
        cfg = area_cfg(n=10, layout=BENCHMARK_5)
        _, regions = assign_regions(cfg)
        scales = [r.variance_scale for r in regions]
        assert scales[2] / scales[1] == 2.0
        assert scales[0] / scales[1] == 0.5
        assert scales == [0.5, 1.0, 2.0, 1.0, 0.5]

    def test_too_few_nodes_rejected(self):
        cfg = area_cfg(n=10, layout=BENCHMARK_5)
        cfg.node_count = 4
        cfg.flows = [FlowSpec(0, 3)]
        with pytest.raises(ValueError):
            assign_regions(cfg)

    def test_uniform_layout_single_region(self):
        region_of, regions = assign_regions(area_cfg(n=6, layout=UNIFORM))
        assert len(regions) == 1 and set(region_of) == {0}


class TestReflectAtEdges:
    def test_clamp_and_aim_inward(self):
        reg = Region(10.0, 50.0, 0.0, 20.0)
        k = NodeKinematics(x=5.0, y=10.0, speed=1.0, heading=math.pi, mean_heading=math.pi)
        out = reflect_at_edges(k, reg)
        assert out.x == 10.0 and out.y == 10.0
        cx, cy = reg.center
        assert out.mean_heading == pytest.approx(math.atan2(cy - 10.0, cx - 10.0))

    def test_interior_no_op(self):
        reg = Region(0.0, 50.0, 0.0, 20.0)
        k = NodeKinematics(x=25.0, y=10.0, speed=1.0, heading=0.3, mean_heading=0.3)
        assert reflect_at_edges(k, reg) is k

    def test_corner_clamps_both_axes(self):
        reg = Region(0.0, 50.0, 0.0, 20.0)
        k = NodeKinematics(x=-3.0, y=25.0, speed=1.0, heading=0.0, mean_heading=0.0)
        out = reflect_at_edges(k, reg)
        assert (out.x, out.y) == (0.0, 20.0)


class TestPlacement:
    def test_static_positions_pinned(self):
        cfg = area_cfg(n=3, layout=UNIFORM, model=STATIC)
        cfg.flows = [FlowSpec(0, 2)]
        cfg.mobility.initial_positions = [(1.0, 2.0), (3.0, 4.0), (5.0, 6.0)]
        kins, _, _ = initial_kinematics(cfg, rng())
        assert [(k.x, k.y) for k in kins] == [(1.0, 2.0), (3.0, 4.0), (5.0, 6.0)]
        assert all(k.speed == 0.0 for k in kins)

    def test_random_placement_inside_regions(self):
        cfg = area_cfg(n=10, layout=BENCHMARK_5)
        kins, regions, region_of = initial_kinematics(cfg, rng(4))
        for node, k in enumerate(kins):
            assert regions[region_of[node]].contains(k.x, k.y)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), model=st.sampled_from(["gauss_markov", RANDOM_WAYPOINT]))
def test_positions_never_leave_area(seed, model):
    cfg = area_cfg(n=6, layout=BENCHMARK_5, model=model, mean_speed_mps=20.0)
    r = rng(seed)
    kins, regions, region_of = initial_kinematics(cfg, r)
    for _ in range(200):
        for i, k in enumerate(kins):
            kins[i] = step(k, cfg.mobility, r, regions[region_of[i]], dt=1.0)
            assert 0.0 <= kins[i].x <= cfg.area_width_m
            assert 0.0 <= kins[i].y <= cfg.area_height_m
