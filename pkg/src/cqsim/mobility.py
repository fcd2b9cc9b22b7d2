"""Node position evolution.

Speed and heading follow an AR(1) (Gauss-Markov) process

    v' = mu*v + (1-mu)*v_mean + sqrt(1-mu^2) * N(0, sigma_v)
    phi' = mu*phi + (1-mu)*phi_mean + sqrt(1-mu^2) * N(0, sigma_phi)

so motion is temporally correlated and smooth; random-waypoint and static
models are available as alternates.  The benchmark layout splits the area
into five vertical bands with 10% pairwise overlap: traffic endpoints sit in
the outer bands (half speed variance), the center band has double variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .config import (BENCHMARK_5, GAUSS_MARKOV, RANDOM_WAYPOINT, STATIC,
                     MobilityConfig, SimConfig)
from .rng import Rng

# variance multipliers for the five benchmark bands, left to right
BENCHMARK_VARIANCE_SCALES = (0.5, 1.0, 2.0, 1.0, 0.5)


@dataclass(frozen=True)
class Region:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    variance_scale: float = 1.0

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


@dataclass
class NodeKinematics:
    x: float
    y: float
    speed: float
    heading: float
    mean_heading: float
    region: int = 0
    waypoint: tuple[float, float] | None = None


def benchmark_regions(cfg: SimConfig) -> list[Region]:
    """Five vertical bands spanning the area width with pairwise overlap."""
    frac = cfg.mobility.region_overlap_frac
    w = cfg.area_width_m / (5.0 - 4.0 * frac)
    stride = w * (1.0 - frac)
    return [
        Region(i * stride, i * stride + w, 0.0, cfg.area_height_m,
               BENCHMARK_VARIANCE_SCALES[i])
        for i in range(5)
    ]


def assign_regions(cfg: SimConfig) -> tuple[list[int], list[Region]]:
    """Map every node to a region.

    benchmark_5: the first flow's source goes to the leftmost band and its
    destination to the rightmost; remaining nodes fill the bands evenly.
    uniform: a single region covering the whole area.
    """
    if cfg.mobility.region_layout != BENCHMARK_5:
        return [0] * cfg.node_count, [Region(0.0, cfg.area_width_m, 0.0, cfg.area_height_m)]
    if cfg.node_count < 5:
        raise ValueError("benchmark_5 region layout requires node_count >= 5")
    regions = benchmark_regions(cfg)
    region_of = [-1] * cfg.node_count
    counts = [0] * 5
    src, dst = cfg.flows[0].source, cfg.flows[0].destination
    region_of[src] = 0
    region_of[dst] = 4
    counts[0] += 1
    counts[4] += 1
    for node in range(cfg.node_count):
        if region_of[node] >= 0:
            continue
        band = min(range(5), key=lambda b: (counts[b], b))
        region_of[node] = band
        counts[band] += 1
    return region_of, regions


def initial_kinematics(cfg: SimConfig, rng: Rng) -> tuple[list[NodeKinematics], list[Region], list[int]]:
    """Place nodes (uniformly inside their region unless positions are pinned)
    and start them at the mean speed with a random heading."""
    region_of, regions = assign_regions(cfg)
    mob = cfg.mobility
    kins: list[NodeKinematics] = []
    for node in range(cfg.node_count):
        reg = regions[region_of[node]]
        if mob.initial_positions is not None:
            x, y = mob.initial_positions[node]
        else:
            x = rng.uniform(reg.x_min, reg.x_max)
            y = rng.uniform(reg.y_min, reg.y_max)
        heading = rng.uniform(0.0, 2.0 * math.pi)
        speed = 0.0 if mob.model == STATIC else mob.base_speed
        kins.append(NodeKinematics(x=x, y=y, speed=speed, heading=heading,
                                   mean_heading=heading, region=region_of[node]))
    return kins, regions, region_of


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def reflect_at_edges(k: NodeKinematics, region: Region) -> NodeKinematics:
    """Clamp a node inside its region; on contact the mean heading is re-aimed
    at the region center so the AR(1) process pulls the node back inward."""
    if region.contains(k.x, k.y):
        return k
    x = min(max(k.x, region.x_min), region.x_max)
    y = min(max(k.y, region.y_min), region.y_max)
    cx, cy = region.center
    mean_heading = math.atan2(cy - y, cx - x)
    # keep the heading numerically close to the new mean so the pull inward
    # does not spiral through intermediate angles
    heading = mean_heading + _wrap_angle(k.heading - mean_heading)
    return replace(k, x=x, y=y, heading=heading, mean_heading=mean_heading)


def gm_step(k: NodeKinematics, cfg: MobilityConfig, rng: Rng,
            region: Region, dt: float) -> NodeKinematics:
    """One Gauss-Markov tick: AR(1) speed/heading, then straight-line motion."""
    mu = cfg.mu
    noise = math.sqrt(max(0.0, 1.0 - mu * mu))
    sigma_v = cfg.speed_sigma_resolved * math.sqrt(region.variance_scale)
    speed = mu * k.speed + (1.0 - mu) * cfg.base_speed
    heading = mu * k.heading + (1.0 - mu) * k.mean_heading
    if noise > 0.0:
        speed += noise * rng.normal(0.0, sigma_v) if sigma_v > 0 else 0.0
        heading += noise * rng.normal(0.0, cfg.angle_sigma) if cfg.angle_sigma > 0 else 0.0
    speed = max(0.0, speed)
    nxt = replace(k, x=k.x + speed * dt * math.cos(heading),
                  y=k.y + speed * dt * math.sin(heading),
                  speed=speed, heading=heading)
    return reflect_at_edges(nxt, region)


def rwp_step(k: NodeKinematics, cfg: MobilityConfig, rng: Rng,
             region: Region, dt: float) -> NodeKinematics:
    """One random-waypoint tick: move straight at the current speed; on arrival
    draw a fresh waypoint inside the region and a fresh speed."""
    if k.waypoint is None:
        k = _new_waypoint(k, cfg, rng, region)
    wx, wy = k.waypoint
    dist = math.hypot(wx - k.x, wy - k.y)
    step = k.speed * dt
    if dist <= step or dist == 0.0:
        arrived = replace(k, x=wx, y=wy)
        return _new_waypoint(arrived, cfg, rng, region)
    heading = math.atan2(wy - k.y, wx - k.x)
    nxt = replace(k, x=k.x + step * math.cos(heading),
                  y=k.y + step * math.sin(heading),
                  heading=heading, mean_heading=heading)
    return reflect_at_edges(nxt, region)


def _new_waypoint(k: NodeKinematics, cfg: MobilityConfig, rng: Rng,
                  region: Region) -> NodeKinematics:
    wx = rng.uniform(region.x_min, region.x_max)
    wy = rng.uniform(region.y_min, region.y_max)
    sigma = cfg.speed_sigma_resolved * math.sqrt(region.variance_scale)
    speed = max(0.0, rng.uniform(cfg.base_speed - sigma, cfg.base_speed + sigma))
    heading = math.atan2(wy - k.y, wx - k.x)
    return replace(k, waypoint=(wx, wy), speed=speed,
                   heading=heading, mean_heading=heading)


def step(k: NodeKinematics, cfg: MobilityConfig, rng: Rng,
         region: Region, dt: float) -> NodeKinematics:
    if cfg.model == STATIC:
        return k
    if cfg.model == GAUSS_MARKOV:
        return gm_step(k, cfg, rng, region, dt)
    if cfg.model == RANDOM_WAYPOINT:
        return rwp_step(k, cfg, rng, region, dt)
    raise ValueError(f"unknown mobility model {cfg.model!r}")
