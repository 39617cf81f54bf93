"""Experiment configuration: validation, sensor grid placement, config-file
parsing and one-axis parameter sweeps with derived replication seeds."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

CONSTANT_POSITION = "constant_position"
GAUSS_MARKOV = "gauss_markov"
RANDOM_DIRECTION_2D = "random_direction_2d"
MOBILITY_KINDS = (CONSTANT_POSITION, GAUSS_MARKOV, RANDOM_DIRECTION_2D)


class ScenarioError(ValueError):
    """Bad configuration: syntax or domain violation."""


@dataclass(frozen=True)
class Scenario:
    """Full description of one simulation run.

    The arena, grid spacing and radio range are not pinned by any experiment
    we reproduce; they are documented defaults chosen so the UAV covers only
    part of the sensor field at a time (otherwise its velocity would not
    matter).  All times are seconds, rates bits/s, distances metres.
    """

    n_sta: int = 25
    sta_grid_spacing: float = 50.0
    area: tuple[float, float, float, float, float, float] = (0.0, 400.0, 0.0, 400.0, 20.0, 50.0)
    uav_mobility: str = GAUSS_MARKOV
    uav_mean_speed: float = 50.0
    gm_alpha: float = 0.85
    gm_timestep: float = 1.0
    max_range: float = 100.0
    rts_threshold: int = 0
    data_rate_phy: float = 12e6
    traffic_rate_per_sta: float = 6e6
    payload_size: int = 512
    sim_time: float = 30.0
    seed: int = 1
    beacon_interval: float = 0.1
    uav_altitude: float = 35.0
    rd2d_pause: float = 0.5
    gm_noise_speed: float | None = None
    gm_noise_direction: float = 0.2
    gm_noise_pitch: float = 0.02
    eifs_enabled: bool = True
    traffic_on: float = 1.0
    traffic_off: float = 0.0

    def validate(self) -> "Scenario":
        a = self.area
        if len(a) != 6 or a[0] >= a[1] or a[2] >= a[3] or a[4] > a[5]:
            raise ScenarioError(f"malformed area {a}: need x_min<x_max, y_min<y_max, z_min<=z_max")
        if self.n_sta < 0:
            raise ScenarioError("n_sta must be >= 0")
        if self.sim_time <= 0:
            raise ScenarioError("sim_time must be > 0")
        if not 0.0 <= self.gm_alpha <= 1.0:
            raise ScenarioError(f"gm_alpha must be in [0, 1], got {self.gm_alpha}")
        if self.max_range <= 0:
            raise ScenarioError("max_range must be > 0")
        if not 0 <= self.rts_threshold <= 65535:
            raise ScenarioError(f"rts_threshold must be in [0, 65535], got {self.rts_threshold}")
        if self.sta_grid_spacing <= 0:
            raise ScenarioError("sta_grid_spacing must be > 0")
        if self.payload_size <= 0:
            raise ScenarioError("payload_size must be > 0")
        if self.traffic_rate_per_sta <= 0:
            raise ScenarioError("traffic_rate_per_sta must be > 0")
        if self.data_rate_phy <= 0:
            raise ScenarioError("data_rate_phy must be > 0")
        if self.beacon_interval <= 0:
            raise ScenarioError("beacon_interval must be > 0")
        if self.gm_timestep <= 0:
            raise ScenarioError("gm_timestep must be > 0")
        if self.uav_mean_speed < 0:
            raise ScenarioError("uav_mean_speed must be >= 0")
        if self.uav_mobility not in MOBILITY_KINDS:
            raise ScenarioError(
                f"uav_mobility must be one of {', '.join(MOBILITY_KINDS)}, got {self.uav_mobility!r}"
            )
        if not a[4] <= self.uav_altitude <= a[5]:
            raise ScenarioError(
                f"uav_altitude {self.uav_altitude} outside area z-range [{a[4]}, {a[5]}]"
            )
        if self.seed < 0:
            raise ScenarioError("seed must be >= 0")
        if self.traffic_on <= 0 or self.traffic_off < 0:
            raise ScenarioError("traffic_on must be > 0 and traffic_off >= 0")
        if self.rd2d_pause < 0:
            raise ScenarioError("rd2d_pause must be >= 0")
        grid_positions(self)  # raises if the lattice does not fit the footprint
        return self

    @property
    def noise_speed(self) -> float:
        return 0.1 * self.uav_mean_speed if self.gm_noise_speed is None else self.gm_noise_speed

    @property
    def data_mpdu_bytes(self) -> int:
        # payload + 8 UDP + 20 IP + 8 LLC/SNAP + 24 MAC header + 4 FCS
        return self.payload_size + 64

    @property
    def uses_rts(self) -> bool:
        return self.data_mpdu_bytes > self.rts_threshold

    @property
    def access_label(self) -> str:
        return "rtscts" if self.uses_rts else "basic"

    @property
    def mobility_label(self) -> str:
        return {CONSTANT_POSITION: "const", GAUSS_MARKOV: "gm", RANDOM_DIRECTION_2D: "rd2d"}[
            self.uav_mobility
        ]


def grid_positions(sc: Scenario) -> dict[int, tuple[float, float, float]]:
    """Sensor placement: ceil(sqrt(n)) x ceil(sqrt(n)) lattice, row-major,
    centred in the area footprint at z = 0.  Node ids start at 1 (0 is the AP)."""
    n = sc.n_sta
    if n == 0:
        return {}
    side = math.ceil(math.sqrt(n))
    extent = (side - 1) * sc.sta_grid_spacing
    x_min, x_max, y_min, y_max = sc.area[:4]
    if extent > (x_max - x_min) or extent > (y_max - y_min):
        raise ScenarioError(
            f"{n} sensors at {sc.sta_grid_spacing} m spacing need a "
            f"{extent} m square, larger than the area footprint"
        )
    x0 = (x_min + x_max) / 2 - extent / 2
    y0 = (y_min + y_max) / 2 - extent / 2
    out = {}
    for i in range(n):
        row, col = divmod(i, side)
        out[i + 1] = (x0 + col * sc.sta_grid_spacing, y0 + row * sc.sta_grid_spacing, 0.0)
    return out


def uav_start_position(sc: Scenario) -> tuple[float, float, float]:
    x_min, x_max, y_min, y_max = sc.area[:4]
    return ((x_min + x_max) / 2, (y_min + y_max) / 2, sc.uav_altitude)


_BOOL_WORDS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _convert(name: str, text: str):
    ftypes = {f.name: f.type for f in fields(Scenario)}
    if name not in ftypes:
        raise ScenarioError(f"unknown configuration key {name!r}")
    text = text.strip()
    try:
        if name == "area":
            parts = [float(p) for p in text.replace(",", " ").split()]
            if len(parts) != 6:
                raise ValueError("need 6 numbers")
            return tuple(parts)
        if name == "uav_mobility":
            return text
        if name == "eifs_enabled":
            if text.lower() not in _BOOL_WORDS:
                raise ValueError("expected true/false")
            return _BOOL_WORDS[text.lower()]
        if name in ("n_sta", "rts_threshold", "payload_size", "seed"):
            return int(float(text))
        if name == "gm_noise_speed" and text.lower() in ("none", "auto"):
            return None
        return float(text)
    except ValueError as exc:
        raise ScenarioError(f"bad value for {name}: {text!r} ({exc})") from exc


def parse_scenario(text: str, overrides: dict[str, str] | None = None) -> Scenario:
    """Parse the flat ``key = value`` config format (# comments, UTF-8).

    Omitted keys take the documented defaults; syntax errors carry the line
    number; domain violations raise ScenarioError.
    """
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if not key:
            raise ScenarioError(f"line {lineno}: empty key")
        try:
            values[key] = _convert(key, val)
        except ScenarioError as exc:
            raise ScenarioError(f"line {lineno}: {exc}") from exc
    for key, val in (overrides or {}).items():
        values[key] = _convert(key, val)
    return Scenario(**values).validate()


SWEEPABLE = {
    f.name
    for f in fields(Scenario)
    if f.name not in ("area",)
}


def expand_sweep(base: Scenario, parameter: str, values, replications: int = 1):
    """Expand one swept axis into |values| x replications runs.

    Replication r of every point uses seed = base.seed + r, so the streams of
    a replication are reproducible and documented.  Ordering is value-major,
    then replication.
    """
    if parameter not in SWEEPABLE:
        raise ScenarioError(f"unknown sweep parameter {parameter!r}")
    if replications < 1:
        raise ScenarioError("replications must be >= 1")
    out = []
    for value in values:
        for r in range(replications):
            seed = base.seed + r
            sc = replace(base, **{parameter: value, "seed": seed}).validate()
            out.append((sc, seed))
    return out
