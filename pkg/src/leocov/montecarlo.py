"""Snapshot Monte Carlo cross-check of the analytic coverage model.

Each realization draws a constellation, a target device, and the active
interferers on the serving footprint, then scores the uplink. Realization i
always consumes its own child stream of the base seed (spawn key (i,)), so
results are bit-identical no matter how realizations are chunked across
workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import excess_gain_sample, excess_gain_samples, path_gain
from .errors import ConfigError
from .geometry import EARTH_RADIUS_KM, EarthModel, GeometryContext, sample_cap_points
from .scenario import (EMPIRICAL, RANDOM_BPP, WALKER_STAR, ConstellationSpec,
                       CoverageResult, Scenario)

_TWO_PI = 2.0 * math.pi


def _rng_for(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                        spawn_key=(index,)))


def realize_constellation(spec: ConstellationSpec, rng: np.random.Generator,
                          earth: EarthModel = EarthModel()) -> np.ndarray:
    """Cartesian satellite positions in km, shape (n_sats, 3).

    random_bpp scatters satellites uniformly on the shell. The Walker kinds
    build the deterministic lattice (planes from the square-root rule unless
    given; RAAN spread over a full turn for delta, a half turn for star) and
    then apply one random RAAN shift and one random along-track phase shift,
    drawn in that order, so each realization is an independently rotated
    copy of the same constellation.
    """
    r = earth.radius_km + spec.altitude_km
    if spec.kind == RANDOM_BPP:
        z = rng.uniform(-1.0, 1.0, spec.n_sats)
        az = rng.uniform(0.0, _TWO_PI, spec.n_sats)
        s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        return r * np.column_stack((s * np.cos(az), s * np.sin(az), z))

    planes = spec.resolved_planes()
    per_plane, remainder = divmod(spec.n_sats, planes)
    if remainder or per_plane < 1:
        raise ConfigError(
            f"{spec.n_sats} satellites cannot fill {planes} equal planes; "
            f"the nearest filled lattice holds {max(per_plane, 1) * planes}")
    raan_shift = rng.uniform(0.0, _TWO_PI)
    phase_shift = rng.uniform(0.0, _TWO_PI)
    raan_span = math.pi if spec.kind == WALKER_STAR else _TWO_PI
    inc = math.radians(spec.resolved_inclination_deg())
    j = np.arange(planes)
    k = np.arange(per_plane)
    raan = raan_shift + raan_span * j / planes
    u = (phase_shift + _TWO_PI * k[None, :] / per_plane
         + _TWO_PI * spec.phasing * j[:, None] / spec.n_sats)
    cos_o = np.cos(raan)[:, None]
    sin_o = np.sin(raan)[:, None]
    cos_u = np.cos(u)
    sin_u = np.sin(u)
    cos_i = math.cos(inc)
    sin_i = math.sin(inc)
    x = cos_o * cos_u - sin_o * cos_i * sin_u
    y = sin_o * cos_u + cos_o * cos_i * sin_u
    z = sin_i * sin_u
    return r * np.column_stack((x.ravel(), y.ravel(), z.ravel()))


def latitude_filter(position_km, spec: ConstellationSpec,
                    varphi_max_rad: float) -> bool:
    """True when a ground point can ever be served by the constellation.

    Walker shells never carry a satellite above their inclination, so
    latitudes beyond inclination + footprint half-angle are permanently dark
    and are excluded from target sampling. Uniform shells cover everything.
    """
    if not spec.is_walker:
        return True
    p = np.asarray(position_km, dtype=float)
    lat = math.asin(min(1.0, max(-1.0, p[2] / float(np.linalg.norm(p)))))
    limit = math.radians(spec.resolved_inclination_deg()) + varphi_max_rad
    return abs(lat) <= limit


@dataclass(frozen=True, eq=False)
class SphericalCap:
    """Ground cap of the given half-angle about a unit axis."""

    axis: np.ndarray
    half_angle_rad: float
    radius_km: float = EARTH_RADIUS_KM

    def area_km2(self) -> float:
        r = self.radius_km
        return _TWO_PI * r * r * (1.0 - math.cos(self.half_angle_rad))


def realize_users(active_density_per_km2: float, cap: SphericalCap,
                  rng: np.random.Generator,
                  reference_point_km=None) -> tuple[np.ndarray, int]:
    """Active interferers on the cap plus the reference device.

    Draws a Poisson count at the active density over the cap area, scatters
    that many users uniformly on the cap (count first, then positions), and
    prepends the reference device, which is the target and never interferes.
    Returns (positions_km, target_index); target_index is always 0.
    """
    if active_density_per_km2 < 0.0:
        raise ValueError(
            f"active density must be nonnegative, got {active_density_per_km2!r}")
    count = int(rng.poisson(active_density_per_km2 * cap.area_km2()))
    others = cap.radius_km * sample_cap_points(rng, cap.half_angle_rad, count,
                                               axis=cap.axis)
    if reference_point_km is None:
        reference = cap.radius_km * np.asarray(cap.axis, dtype=float)
    else:
        reference = np.asarray(reference_point_km, dtype=float)
    return np.vstack((reference[None, :], others)), 0


@dataclass(frozen=True, eq=False)
class Snapshot:
    """One frozen instant: satellites, ground devices, and who the target is."""

    sat_positions_km: np.ndarray
    user_positions_km: np.ndarray
    target_index: int


@dataclass(frozen=True)
class SnapshotRecord:
    """Outcome of one snapshot. sinr_db and interference_w are NaN when the
    target is not served (no satellite inside its serviceable cone)."""

    served: bool
    sinr_db: float
    varphi_o_rad: float
    interference_w: float
    n_interferers: int


def evaluate_snapshot(snapshot: Snapshot, scenario: Scenario,
                      rng: np.random.Generator) -> SnapshotRecord:
    """Score the target uplink in one snapshot.

    The target attaches to the satellite with the smallest Earth-centered
    zenith angle (first index wins exact ties). If that angle exceeds the
    footprint limit the snapshot is unserved and no gains are drawn.
    Otherwise the desired-link excess gain is drawn first, then one gain per
    interferer inside the serving footprint, and the SINR is formed against
    the kappa-scaled interference sum plus noise.
    """
    geo = scenario.geometry()
    budget = scenario.budget
    sats = np.asarray(snapshot.sat_positions_km, dtype=float)
    users = np.asarray(snapshot.user_positions_km, dtype=float)
    target = users[snapshot.target_index]
    sat_unit = sats / np.linalg.norm(sats, axis=1, keepdims=True)
    t_unit = target / np.linalg.norm(target)
    closeness = sat_unit @ t_unit
    i_star = int(np.argmax(closeness))
    varphi_o = float(np.arccos(np.clip(closeness[i_star], -1.0, 1.0)))
    if varphi_o > geo.varphi_max_rad:
        return SnapshotRecord(False, float("nan"), varphi_o, float("nan"), 0)

    altitude = scenario.constellation.altitude_km
    zeta0 = excess_gain_sample(rng, varphi_o, scenario.channel, geo.alpha)
    p_rx = budget.eirp_gain_w * path_gain(varphi_o, altitude, budget.freq_hz,
                                          scenario.earth) * zeta0

    serving = sat_unit[i_star]
    u_unit = users / np.linalg.norm(users, axis=1, keepdims=True)
    zenith_cos = u_unit @ serving
    in_footprint = zenith_cos >= math.cos(geo.varphi_max_rad)
    in_footprint[snapshot.target_index] = False
    varphi_i = np.arccos(np.clip(zenith_cos[in_footprint], -1.0, 1.0))
    if varphi_i.size:
        zeta_i = excess_gain_samples(rng, varphi_i, scenario.channel, geo.alpha)
        gains = path_gain(varphi_i, altitude, budget.freq_hz, scenario.earth)
        interference = budget.kappa * budget.eirp_gain_w * float(np.sum(gains * zeta_i))
    else:
        interference = 0.0
    sinr_db = 10.0 * math.log10(p_rx / (interference + budget.noise_w))
    return SnapshotRecord(True, sinr_db, varphi_o, interference, int(varphi_i.size))


def _sample_target_unit(rng: np.random.Generator, spec: ConstellationSpec,
                        geo: GeometryContext) -> np.ndarray:
    # Uniform on the sphere; Walker kinds reject latitudes no satellite can
    # ever serve, conditioning the target on the reachable band.
    while True:
        z = rng.uniform(-1.0, 1.0)
        az = rng.uniform(0.0, _TWO_PI)
        s = math.sqrt(max(0.0, 1.0 - z * z))
        unit = np.array([s * math.cos(az), s * math.sin(az), z])
        if latitude_filter(unit * geo.earth.radius_km, spec, geo.varphi_max_rad):
            return unit


def _one_record(scenario: Scenario, geo: GeometryContext, seed: int,
                index: int) -> SnapshotRecord:
    rng = _rng_for(seed, index)
    spec = scenario.constellation
    sats = realize_constellation(spec, rng, scenario.earth)
    t_unit = _sample_target_unit(rng, spec, geo)
    target = t_unit * geo.earth.radius_km
    # Users are only materialized when the target is served; an unserved
    # snapshot never looks at them, and skipping the draw keeps unserved
    # snapshots cheap without touching the served ones' streams.
    sat_unit = sats / np.linalg.norm(sats, axis=1, keepdims=True)
    closeness = sat_unit @ t_unit
    i_star = int(np.argmax(closeness))
    varphi_o = float(np.arccos(np.clip(closeness[i_star], -1.0, 1.0)))
    if varphi_o <= geo.varphi_max_rad:
        cap = SphericalCap(sat_unit[i_star], geo.varphi_max_rad, geo.earth.radius_km)
        users, target_index = realize_users(scenario.active_density_per_km2, cap,
                                            rng, reference_point_km=target)
    else:
        users, target_index = target[None, :], 0
    return evaluate_snapshot(Snapshot(sats, users, target_index), scenario, rng)


def _record_chunk(scenario: Scenario, seed: int, start: int,
                  stop: int) -> list[SnapshotRecord]:
    geo = scenario.geometry()
    return [_one_record(scenario, geo, seed, i) for i in range(start, stop)]


@dataclass(frozen=True, eq=False)
class SimulationRecords:
    """Per-realization outcomes in realization order."""

    served: np.ndarray
    sinr_db: np.ndarray
    varphi_o_rad: np.ndarray
    interference_w: np.ndarray
    n_interferers: np.ndarray

    def __len__(self) -> int:
        return len(self.served)


def simulate_records(scenario: Scenario, n_realizations: int, seed: int, *,
                     workers: int = 1) -> SimulationRecords:
    """Run independent snapshots and collect their records by index.

    Records are assembled in realization order whatever the worker count;
    combined with per-index child streams this makes every downstream
    statistic bit-identical for any chunking.
    """
    if n_realizations < 1:
        raise ValueError(f"n_realizations must be at least 1, got {n_realizations!r}")
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers!r}")
    if workers == 1:
        records = _record_chunk(scenario, seed, 0, n_realizations)
    else:
        bounds = np.linspace(0, n_realizations, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_record_chunk, scenario, seed, int(a), int(b))
                       for a, b in zip(bounds[:-1], bounds[1:])]
            records = [rec for fut in futures for rec in fut.result()]
    return SimulationRecords(
        served=np.array([r.served for r in records], dtype=bool),
        sinr_db=np.array([r.sinr_db for r in records], dtype=float),
        varphi_o_rad=np.array([r.varphi_o_rad for r in records], dtype=float),
        interference_w=np.array([r.interference_w for r in records], dtype=float),
        n_interferers=np.array([r.n_interferers for r in records], dtype=int),
    )


def empirical_coverage(scenario: Scenario, n_realizations: int, seed: int, *,
                       workers: int = 1) -> CoverageResult:
    """Monte Carlo estimate of coverage probability.

    A snapshot counts as covered when it is served and its SINR exceeds the
    detection threshold. The confidence halfwidth is the 95% normal
    approximation; mean interference averages served snapshots only.
    """
    records = simulate_records(scenario, n_realizations, seed, workers=workers)
    covered = records.served & (records.sinr_db > scenario.budget.target_sinr_db)
    p = float(covered.mean())
    ci = 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / n_realizations)
    served_i = records.interference_w[records.served]
    mean_i = float(served_i.mean()) if served_i.size else float("nan")
    return CoverageResult(p_cov=p, method=EMPIRICAL, ci_halfwidth=ci,
                          mean_interference_w=mean_i)


def interference_samples(scenario: Scenario, n_realizations: int, seed: int, *,
                         workers: int = 1) -> np.ndarray:
    """Interference draws with the serving satellite pinned at the zenith.

    Isolates the interferer model from attachment randomness: one satellite
    sits directly above the target, users are drawn on its footprint, and
    the recorded interference power is returned per realization. This is the
    sampling twin of average_interference.
    """
    if n_realizations < 1:
        raise ValueError(f"n_realizations must be at least 1, got {n_realizations!r}")
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers!r}")
    if workers == 1:
        values = _interference_chunk(scenario, seed, 0, n_realizations)
    else:
        bounds = np.linspace(0, n_realizations, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_interference_chunk, scenario, seed, int(a), int(b))
                       for a, b in zip(bounds[:-1], bounds[1:])]
            values = [v for fut in futures for v in fut.result()]
    return np.array(values, dtype=float)


def _interference_chunk(scenario: Scenario, seed: int, start: int,
                        stop: int) -> list[float]:
    geo = scenario.geometry()
    radius = geo.earth.radius_km
    zenith = np.array([0.0, 0.0, 1.0])
    sats = np.array([[0.0, 0.0, radius + scenario.constellation.altitude_km]])
    target = np.array([0.0, 0.0, radius])
    cap = SphericalCap(zenith, geo.varphi_max_rad, radius)
    out = []
    for i in range(start, stop):
        rng = _rng_for(seed, i)
        users, target_index = realize_users(scenario.active_density_per_km2, cap,
                                            rng, reference_point_km=target)
        record = evaluate_snapshot(Snapshot(sats, users, target_index), scenario, rng)
        out.append(record.interference_w)
    return out
