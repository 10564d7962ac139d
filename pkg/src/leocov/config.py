"""Flat key=value configuration files and scenario assembly.

Configs use human units (degrees, km, GHz, dB, users per km^2); everything
is converted exactly once, here, on the way into a Scenario. Unknown keys,
type mismatches, and duplicates are reported with file and line. noise_dbw,
kappa, and the device density have no defaults and must always be stated.
"""

from __future__ import annotations

import math
import os

from .channel import ChannelParams, LinkBudget
from .errors import ConfigError
from .geometry import BeamConfig
from .scenario import CONSTELLATION_KINDS, ConstellationSpec, Scenario

ENV_CONFIG = "LEOCOV_CONFIG"

_INT_KEYS = frozenset({"n_sats", "planes", "phasing", "seed", "realizations",
                       "workers", "grid_resolution"})
_FLOAT_KEYS = frozenset({
    "altitude_km", "psi_deg", "psi_s_deg", "psi_t_deg", "inclination_deg",
    "freq_ghz", "eirp_dbw", "gain_s_dbi", "noise_dbw", "kappa",
    "target_sinr_db", "beta", "mu_los_db", "mu_nlos_db", "sigma_los_db",
    "sigma_nlos_db", "density_per_km2", "duty_cycle",
})
_STR_KEYS = frozenset({"constellation", "format", "axis", "mode", "out",
                       "grid", "h_grid", "psi_grid", "h_bounds", "psi_bounds",
                       "density_grid"})
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS

# Reference parameter set for the suburban S-band uplink study; anything a
# config leaves out falls back to these. Deployment choices (noise floor,
# interference activity, device density) are deliberately absent.
SCENARIO_DEFAULTS = {
    "constellation": "random_bpp",
    "phasing": 0,
    "freq_ghz": 2.0,
    "eirp_dbw": 23.0,
    "gain_s_dbi": 0.0,
    "target_sinr_db": -20.0,
    "duty_cycle": 0.01,
    "beta": 2.3,
    "mu_los_db": 0.0,
    "mu_nlos_db": 12.0,
    "sigma_los_db": 2.8,
    "sigma_nlos_db": 9.0,
}

RUN_DEFAULTS = {
    "seed": 1,
    "realizations": 1000,
    "workers": 1,
    "format": "csv",
}

_REQUIRED = ("n_sats", "altitude_km", "density_per_km2", "noise_dbw", "kappa")


def parse_config_file(path: str) -> dict[str, tuple[str, str]]:
    """Read one KEY = VALUE per line; '#' starts a comment.

    Returns raw string values keyed by lowercased name, each tagged with its
    origin ("path:line") for later diagnostics.
    """
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, tuple[str, str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            origin = f"{path}:{lineno}"
            if "=" not in line:
                raise ConfigError(f"{origin}: expected KEY = VALUE, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip().lower()
            value = value.strip()
            if not key or not value:
                raise ConfigError(f"{origin}: expected KEY = VALUE, got {raw.strip()!r}")
            if key not in KNOWN_KEYS:
                raise ConfigError(f"{origin}: unknown key {key!r}")
            if key in values:
                raise ConfigError(f"{origin}: duplicate key {key!r} "
                                  f"(first set at {values[key][1]})")
            values[key] = (value, origin)
    return values


def parse_overrides(pairs) -> dict[str, tuple[str, str]]:
    """KEY=VALUE strings from the command line, validated like file lines."""
    values: dict[str, tuple[str, str]] = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"override {pair!r}: expected KEY=VALUE")
        key, _, value = pair.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"override {pair!r}: expected KEY=VALUE")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"override {pair!r}: unknown key {key!r}")
        values[key] = (value, "command line")
    return values


def _convert(key: str, value: str, origin: str):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError:
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise ConfigError(f"{origin}: key {key!r} expects {kind}, got {value!r}") from None
    return value


def resolve_values(file_values: dict[str, tuple[str, str]],
                   overrides: dict[str, tuple[str, str]]) -> dict:
    """Merge file values and overrides (overrides win) into typed values."""
    merged = dict(file_values)
    merged.update(overrides)
    return {k: _convert(k, v, origin) for k, (v, origin) in merged.items()}


def build_scenario(values: dict) -> Scenario:
    """Typed key/value mapping -> Scenario, with every unit conversion."""
    missing = [k for k in _REQUIRED if k not in values]
    has_psi = "psi_deg" in values
    has_s = "psi_s_deg" in values
    has_t = "psi_t_deg" in values
    if has_psi and (has_s or has_t):
        raise ConfigError("give either psi_deg or the psi_s_deg/psi_t_deg pair, not both")
    if (has_s or has_t) and not (has_s and has_t):
        raise ConfigError("psi_s_deg and psi_t_deg must be given together")
    if not has_psi and not has_s:
        missing.append("psi_deg (or psi_s_deg with psi_t_deg)")
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(sorted(missing)))

    def get(key):
        return values.get(key, SCENARIO_DEFAULTS.get(key))

    kind = get("constellation")
    if kind not in CONSTELLATION_KINDS:
        raise ConfigError(f"constellation must be one of {CONSTELLATION_KINDS}, "
                          f"got {kind!r}")
    try:
        spec = ConstellationSpec(
            n_sats=values["n_sats"],
            altitude_km=values["altitude_km"],
            kind=kind,
            inclination_deg=values.get("inclination_deg"),
            planes=values.get("planes"),
            phasing=get("phasing"),
        )
        channel = ChannelParams(
            beta=get("beta"),
            mu_los_db=get("mu_los_db"),
            mu_nlos_db=get("mu_nlos_db"),
            sigma_los_db=get("sigma_los_db"),
            sigma_nlos_db=get("sigma_nlos_db"),
        )
        budget = LinkBudget(
            noise_dbw=values["noise_dbw"],
            kappa=values["kappa"],
            eirp_dbw=get("eirp_dbw"),
            gain_s_dbi=get("gain_s_dbi"),
            freq_hz=get("freq_ghz") * 1e9,
            target_sinr_db=get("target_sinr_db"),
        )
        if has_psi:
            return Scenario(constellation=spec, channel=channel, budget=budget,
                            user_density_per_km2=values["density_per_km2"],
                            duty_cycle=get("duty_cycle"),
                            psi_rad=math.radians(values["psi_deg"]))
        beams = BeamConfig(psi_s_rad=math.radians(values["psi_s_deg"]),
                           psi_t_rad=math.radians(values["psi_t_deg"]))
        return Scenario(constellation=spec, channel=channel, budget=budget,
                        user_density_per_km2=values["density_per_km2"],
                        duty_cycle=get("duty_cycle"), beams=beams)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def run_setting(values: dict, key: str, override=None):
    """Run-control lookup: explicit override, then config, then default."""
    if override is not None:
        return override
    return values.get(key, RUN_DEFAULTS.get(key))


def scenario_manifest(scenario: Scenario) -> dict:
    """SI-resolved view of a scenario for run manifests."""
    geo = scenario.geometry()
    spec = scenario.constellation
    budget = scenario.budget
    ch = scenario.channel
    return {
        "n_sats": spec.n_sats,
        "constellation": spec.kind,
        "planes": spec.resolved_planes() if spec.is_walker else None,
        "phasing": spec.phasing if spec.is_walker else None,
        "inclination_deg": spec.resolved_inclination_deg() if spec.is_walker else None,
        "earth_radius_m": geo.earth.radius_m,
        "altitude_m": spec.altitude_km * 1e3,
        "alpha": geo.alpha,
        "psi_rad": geo.psi_rad,
        "psi_horizon_rad": geo.psi_horizon_rad,
        "varphi_max_rad": geo.varphi_max_rad,
        "freq_hz": budget.freq_hz,
        "eirp_gain_w": budget.eirp_gain_w,
        "noise_w": budget.noise_w,
        "kappa": budget.kappa,
        "target_sinr": budget.target_sinr,
        "beta": ch.beta,
        "mu_los_db": ch.mu_los_db,
        "mu_nlos_db": ch.mu_nlos_db,
        "sigma_los_db": ch.sigma_los_db,
        "sigma_nlos_db": ch.sigma_nlos_db,
        "density_per_m2": scenario.user_density_per_km2 / 1e6,
        "duty_cycle": scenario.duty_cycle,
        "active_density_per_m2": scenario.active_density_per_m2,
    }
