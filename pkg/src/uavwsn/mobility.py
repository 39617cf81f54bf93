"""UAV kinematics: first-order autoregressive speed/direction/pitch
(Gauss-Markov) and constant-speed random-direction flight at fixed altitude.

Ground sensors never move; the UAV is the only mobile node.  Both models
produce piecewise-linear trajectories, so positions between state updates are
exact linear interpolations and containment inside the arena box follows from
its convexity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import engine
from .engine import MOBILITY_TICK

TWO_PI = 2.0 * math.pi


@dataclass(slots=True)
class MobilityState:
    model: str
    position: tuple[float, float, float]
    speed: float
    direction: float  # radians, [0, 2*pi)
    pitch: float
    mean_speed: float
    mean_direction: float
    mean_pitch: float
    alpha: float
    noise_std: tuple[float, float, float]  # (speed m/s, direction rad, pitch rad)
    bounds: tuple[float, float, float, float, float, float]
    pause_remaining: float = 0.0


def velocity_of(s: MobilityState) -> tuple[float, float, float]:
    cp = math.cos(s.pitch)
    return (
        s.speed * math.cos(s.direction) * cp,
        s.speed * math.sin(s.direction) * cp,
        s.speed * math.sin(s.pitch),
    )


def gauss_markov_step(s: MobilityState, dt: float, rng) -> MobilityState:
    """One memory-alpha update: position advances dt along the OLD velocity,
    then speed/direction/pitch relax toward their means with Gaussian noise
    scaled by sqrt(1 - alpha^2).  A step that would exit the bounds mirrors
    the offending mean angle and clamps the position inside."""
    a = s.alpha
    vx, vy, vz = velocity_of(s)
    x = s.position[0] + vx * dt
    y = s.position[1] + vy * dt
    z = s.position[2] + vz * dt
    x_min, x_max, y_min, y_max, z_min, z_max = s.bounds
    mean_dir = s.mean_direction
    mean_pitch = s.mean_pitch
    if x < x_min or x > x_max:
        x = min(max(x, x_min), x_max)
        mean_dir = (math.pi - mean_dir) % TWO_PI
    if y < y_min or y > y_max:
        y = min(max(y, y_min), y_max)
        mean_dir = (-mean_dir) % TWO_PI
    if z < z_min or z > z_max:
        z = min(max(z, z_min), z_max)
        mean_pitch = -mean_pitch
    nudge = math.sqrt(1.0 - a * a)
    speed = a * s.speed + (1.0 - a) * s.mean_speed + nudge * s.noise_std[0] * rng.standard_normal()
    direction = (
        a * s.direction + (1.0 - a) * mean_dir + nudge * s.noise_std[1] * rng.standard_normal()
    )
    pitch = a * s.pitch + (1.0 - a) * mean_pitch + nudge * s.noise_std[2] * rng.standard_normal()
    return replace(
        s,
        position=(x, y, z),
        speed=max(0.0, speed),
        direction=direction % TWO_PI,
        pitch=pitch,
        mean_direction=mean_dir,
        mean_pitch=mean_pitch,
    )


def _time_to_boundary_2d(pos, direction, speed, bounds) -> float:
    x_min, x_max, y_min, y_max = bounds[:4]
    vx = speed * math.cos(direction)
    vy = speed * math.sin(direction)
    t = math.inf
    if vx > 0:
        t = min(t, (x_max - pos[0]) / vx)
    elif vx < 0:
        t = min(t, (x_min - pos[0]) / vx)
    if vy > 0:
        t = min(t, (y_max - pos[1]) / vy)
    elif vy < 0:
        t = min(t, (y_min - pos[1]) / vy)
    return max(0.0, t)


def random_direction_2d_step(s: MobilityState, rng) -> tuple[MobilityState, float]:
    """Advance the pause-travel cycle: a paused state whose pause elapsed draws
    a uniform direction and flies at mean_speed straight to the boundary (the
    returned delay is the exact intersection time); a moving state that just
    arrived lands on the boundary and enters the pause."""
    x_min, x_max, y_min, y_max = s.bounds[:4]
    if s.speed == 0.0:
        # pause_remaining holds the configured pause and rides along unchanged.
        direction = rng.uniform(0.0, TWO_PI) % TWO_PI
        moving = replace(s, speed=s.mean_speed, direction=direction)
        delay = _time_to_boundary_2d(s.position, direction, s.mean_speed, s.bounds)
        return moving, delay
    travel = _time_to_boundary_2d(s.position, s.direction, s.speed, s.bounds)
    x = s.position[0] + s.speed * math.cos(s.direction) * travel
    y = s.position[1] + s.speed * math.sin(s.direction) * travel
    x = min(max(x, x_min), x_max)
    y = min(max(y, y_min), y_max)
    paused = replace(s, position=(x, y, s.position[2]), speed=0.0)
    return paused, s.pause_remaining


class SegmentError(ValueError):
    """Position query outside the current constant-velocity segment."""


class NodeMobility:
    """Engine-facing trajectory: current constant-velocity segment plus the
    model stepping that replaces it.  ``position_at_ns`` is only valid inside
    the current segment."""

    def __init__(self, state: MobilityState, sim=None, rng=None):
        self.state = state
        self.sim = sim
        self.rng = rng
        self._gm_dt = 1.0
        self.seg_start_ns = 0
        self.seg_end_ns: int | float = math.inf
        self.seg_origin = state.position
        self.seg_velocity = (0.0, 0.0, 0.0)
        self.trace: list[str] | None = None

    def position_at_ns(self, t_ns: int) -> tuple[float, float, float]:
        if t_ns < self.seg_start_ns or t_ns > self.seg_end_ns:
            raise SegmentError(
                f"t={t_ns} ns outside segment [{self.seg_start_ns}, {self.seg_end_ns}]"
            )
        dt = (t_ns - self.seg_start_ns) / engine.NS_PER_S
        ox, oy, oz = self.seg_origin
        vx, vy, vz = self.seg_velocity
        return (ox + vx * dt, oy + vy * dt, oz + vz * dt)

    def _set_segment(self, start_ns: int, duration_s: float, origin, velocity) -> None:
        self.seg_start_ns = start_ns
        self.seg_end_ns = start_ns + engine.to_ns(duration_s) if duration_s != math.inf else math.inf
        self.seg_origin = origin
        self.seg_velocity = velocity

    def _record(self, t_ns: int) -> None:
        if self.trace is not None:
            x, y, z = self.state.position
            self.trace.append(
                f"{t_ns / engine.NS_PER_S:.3f} {x:.3f} {y:.3f} {z:.3f} "
                f"{self.state.speed:.3f} {self.state.direction:.5f}"
            )

    def start(self) -> None:
        from .scenario import CONSTANT_POSITION, GAUSS_MARKOV

        model = self.state.model
        if model == CONSTANT_POSITION or self.state.mean_speed == 0.0:
            return  # the initial infinite zero-velocity segment stands
        if model == GAUSS_MARKOV:
            self._record(self.sim.now_ns)
            self._gm_tick()
        else:
            self._rd2d_tick()

    def _gm_tick(self) -> None:
        now = self.sim.now_ns
        dt = self._gm_dt
        new_state = gauss_markov_step(self.state, dt, self.rng)
        # Interpolate between the sampled endpoints: clamping at the walls can
        # bend the nominal path, but both endpoints stay inside the box.
        ox, oy, oz = self.state.position
        nx, ny, nz = new_state.position
        velocity = ((nx - ox) / dt, (ny - oy) / dt, (nz - oz) / dt)
        self._set_segment(now, dt, (ox, oy, oz), velocity)
        self.state = new_state
        self.sim.schedule_ns(
            now + engine.to_ns(dt), MOBILITY_TICK, 0, self._gm_tick_arrive
        )

    def _gm_tick_arrive(self) -> None:
        self._record(self.sim.now_ns)
        self._gm_tick()

    def start_gauss_markov(self, timestep: float) -> None:
        self._gm_dt = timestep

    def _rd2d_tick(self) -> None:
        now = self.sim.now_ns
        new_state, delay = random_direction_2d_step(self.state, self.rng)
        if new_state.speed > 0.0:
            self._set_segment(now, delay, self.state.position, velocity_of(new_state))
        else:
            self._set_segment(now, delay, new_state.position, (0.0, 0.0, 0.0))
        self.state = new_state
        self._record(now)
        self.sim.schedule_ns(now + engine.to_ns(delay), MOBILITY_TICK, 0, self._rd2d_tick)


def build_uav_mobility(sc, sim, rng) -> NodeMobility:
    """Initial UAV state per the scenario: start at the arena centre at the
    configured altitude; Gauss-Markov draws its mean heading uniformly once."""
    from .scenario import (
        CONSTANT_POSITION,
        GAUSS_MARKOV,
        RANDOM_DIRECTION_2D,
        uav_start_position,
    )

    pos = uav_start_position(sc)
    bounds = sc.area
    if sc.uav_mobility == GAUSS_MARKOV:
        heading = rng.uniform(0.0, TWO_PI) % TWO_PI
        state = MobilityState(
            model=GAUSS_MARKOV,
            position=pos,
            speed=sc.uav_mean_speed,
            direction=heading,
            pitch=0.0,
            mean_speed=sc.uav_mean_speed,
            mean_direction=heading,
            mean_pitch=0.0,
            alpha=sc.gm_alpha,
            noise_std=(sc.noise_speed, sc.gm_noise_direction, sc.gm_noise_pitch),
            bounds=bounds,
        )
        nm = NodeMobility(state, sim, rng)
        nm.start_gauss_markov(sc.gm_timestep)
        return nm
    if sc.uav_mobility == RANDOM_DIRECTION_2D:
        state = MobilityState(
            model=RANDOM_DIRECTION_2D,
            position=pos,
            speed=0.0,
            direction=0.0,
            pitch=0.0,
            mean_speed=sc.uav_mean_speed,
            mean_direction=0.0,
            mean_pitch=0.0,
            alpha=0.0,
            noise_std=(0.0, 0.0, 0.0),
            bounds=bounds,
            pause_remaining=sc.rd2d_pause,
        )
        return NodeMobility(state, sim, rng, pause=sc.rd2d_pause)
    state = MobilityState(
        model=CONSTANT_POSITION,
        position=pos,
        speed=0.0,
        direction=0.0,
        pitch=0.0,
        mean_speed=0.0,
        mean_direction=0.0,
        mean_pitch=0.0,
        alpha=0.0,
        noise_std=(0.0, 0.0, 0.0),
        bounds=bounds,
    )
    return NodeMobility(state, sim, rng)
