"""Spherical geometry of a satellite shell above a spherical Earth.

All angles are radians and all lengths are kilometers unless a name says
otherwise. Degree conversion happens only at the user-facing boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EARTH_RADIUS_KM = 6371.0

# Inverse trig arguments this close to +/-1 are treated as rounding noise
# and clamped; anything further out is a genuine domain error.
_CLAMP_EPS = 1e-12


def _clamped_unit(x: float, name: str) -> float:
    if x > 1.0:
        if x > 1.0 + _CLAMP_EPS:
            raise ValueError(f"{name} argument {x!r} lies outside [-1, 1]")
        return 1.0
    if x < -1.0:
        if x < -1.0 - _CLAMP_EPS:
            raise ValueError(f"{name} argument {x!r} lies outside [-1, 1]")
        return -1.0
    return x


def clamped_asin(x: float) -> float:
    """asin that forgives sub-1e-12 excursions past the domain edge."""
    return math.asin(_clamped_unit(x, "asin"))


def clamped_acos(x: float) -> float:
    """acos that forgives sub-1e-12 excursions past the domain edge."""
    return math.acos(_clamped_unit(x, "acos"))


@dataclass(frozen=True)
class EarthModel:
    """Spherical Earth. The default radius is the volumetric mean."""

    radius_km: float = EARTH_RADIUS_KM

    def __post_init__(self):
        if not self.radius_km > 0.0:
            raise ValueError(f"Earth radius must be positive, got {self.radius_km!r}")

    @property
    def radius_m(self) -> float:
        return self.radius_km * 1e3

    def visibility_ratio(self, altitude_km: float) -> float:
        """Ratio R/(R+h) of Earth radius to orbital shell radius."""
        if not altitude_km > 0.0:
            raise ValueError(f"altitude must be positive, got {altitude_km!r}")
        return self.radius_km / (self.radius_km + altitude_km)


@dataclass(frozen=True)
class BeamConfig:
    """Half-power beamwidths of the satellite and user terminal antennas."""

    psi_s_rad: float
    psi_t_rad: float

    def __post_init__(self):
        for name, value in (("psi_s_rad", self.psi_s_rad), ("psi_t_rad", self.psi_t_rad)):
            if not 0.0 < value <= 2.0 * math.pi:
                raise ValueError(f"{name} must lie in (0, 2*pi], got {value!r}")


def effective_beamwidth(beams: BeamConfig, alpha: float) -> float:
    """Effective beamwidth of the satellite-terminal pair.

    The terminal cone of half-angle psi_t/2, projected from the ground onto
    the orbital shell, subtends 2*asin(alpha*sin(psi_t/2)) at the satellite;
    the narrower of that and the satellite's own beam wins. Beamwidths above
    pi are treated as isotropic (clamped to pi).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    psi_s = min(beams.psi_s_rad, math.pi)
    psi_t = min(beams.psi_t_rad, math.pi)
    projected = 2.0 * clamped_asin(alpha * math.sin(psi_t / 2.0))
    return min(psi_s, projected)


def horizon_beamwidth(alpha: float) -> float:
    """Beamwidth 2*asin(alpha) beyond which the beam spills past the horizon."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    return 2.0 * clamped_asin(alpha)


def max_zenith_angle(psi: float, alpha: float) -> float:
    """Largest Earth-centered zenith angle a satellite may have and still serve.

    Below the horizon-limited beamwidth the footprint edge is set by the
    beam cone; at or above it, by the geometric horizon acos(alpha).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not 0.0 < psi <= math.pi:
        raise ValueError(f"psi must lie in (0, pi], got {psi!r}")
    if psi < horizon_beamwidth(alpha):
        return clamped_asin(math.sin(psi / 2.0) / alpha) - psi / 2.0
    return clamped_acos(alpha)


def contact_angle_cdf(varphi, n_sats: int):
    """CDF of the Earth-centered angle to the nearest of n uniform satellites.

    Accepts scalars or arrays. For a binomial point process the exact CDF is
    1 - (cap complement fraction)^n; the exponential form below is its
    large-n limit and is the model used throughout.
    """
    if n_sats < 1:
        raise ValueError(f"n_sats must be at least 1, got {n_sats!r}")
    varphi = np.asarray(varphi, dtype=float)
    out = 1.0 - np.exp(-0.5 * n_sats * (1.0 - np.cos(varphi)))
    return float(out) if out.ndim == 0 else out


def contact_angle_pdf(varphi, n_sats: int):
    """Density of the nearest-satellite contact angle. Scalar or array."""
    if n_sats < 1:
        raise ValueError(f"n_sats must be at least 1, got {n_sats!r}")
    varphi = np.asarray(varphi, dtype=float)
    out = 0.5 * n_sats * np.sin(varphi) * np.exp(-0.5 * n_sats * (1.0 - np.cos(varphi)))
    return float(out) if out.ndim == 0 else out


def _rotation_from_z(axis: np.ndarray) -> np.ndarray:
    """Rotation matrix taking the +z unit vector onto the given unit axis."""
    axis = np.asarray(axis, dtype=float)
    c = axis[2]
    if c > 1.0 - 1e-12:
        return np.eye(3)
    if c < -1.0 + 1e-12:
        return np.diag([1.0, -1.0, -1.0])
    v = np.array([-axis[1], axis[0], 0.0])  # cross(z, axis)
    vx = np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])
    return np.eye(3) + vx + vx @ vx * ((1.0 - c) / (v @ v))


def sample_cap_points(rng: np.random.Generator, varphi_max: float, n: int,
                      axis=None) -> np.ndarray:
    """n points uniform on the spherical cap of half-angle varphi_max.

    Returns unit vectors, shape (n, 3). The cap is centered on +z unless an
    axis is given. Draw order: one uniform batch for the polar coordinate,
    then one for azimuth, so streams are reproducible.
    """
    if not 0.0 < varphi_max <= math.pi:
        raise ValueError(f"varphi_max must lie in (0, pi], got {varphi_max!r}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n!r}")
    u = rng.random(n)
    cos_theta = 1.0 - u * (1.0 - math.cos(varphi_max))
    sin_theta = np.sqrt(np.clip(1.0 - cos_theta * cos_theta, 0.0, None))
    az = rng.uniform(0.0, 2.0 * math.pi, n)
    pts = np.column_stack((sin_theta * np.cos(az), sin_theta * np.sin(az), cos_theta))
    if axis is not None:
        pts = pts @ _rotation_from_z(axis).T
    return pts


def sample_cap_point(rng: np.random.Generator, varphi_max: float, axis=None) -> np.ndarray:
    """One point uniform on the cap; see sample_cap_points."""
    return sample_cap_points(rng, varphi_max, 1, axis=axis)[0]


@dataclass(frozen=True)
class GeometryContext:
    """Derived geometry for one altitude/beamwidth pair."""

    altitude_km: float
    alpha: float
    psi_rad: float
    psi_horizon_rad: float
    varphi_max_rad: float
    earth: EarthModel

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not 0.0 < self.psi_rad <= math.pi:
            raise ValueError(f"psi_rad must lie in (0, pi], got {self.psi_rad!r}")
        if not 0.0 < self.varphi_max_rad <= clamped_acos(self.alpha) + _CLAMP_EPS:
            raise ValueError(
                f"varphi_max_rad {self.varphi_max_rad!r} exceeds the horizon limit")

    @property
    def shell_radius_km(self) -> float:
        return self.earth.radius_km + self.altitude_km

    def footprint_area_km2(self) -> float:
        """Area of the ground cap one satellite can serve."""
        r = self.earth.radius_km
        return 2.0 * math.pi * r * r * (1.0 - math.cos(self.varphi_max_rad))


def make_context(altitude_km: float, psi_rad: float | None = None,
                 beams: BeamConfig | None = None,
                 earth: EarthModel = EarthModel()) -> GeometryContext:
    """Resolve altitude plus one beamwidth pathway into a GeometryContext.

    Either psi_rad (an already-effective beamwidth) or beams (the
    satellite/terminal pair) must be given, not both.
    """
    if (psi_rad is None) == (beams is None):
        raise ValueError("exactly one of psi_rad or beams must be given")
    alpha = earth.visibility_ratio(altitude_km)
    if beams is not None:
        psi = effective_beamwidth(beams, alpha)
    else:
        if not psi_rad > 0.0:
            raise ValueError(f"psi_rad must be positive, got {psi_rad!r}")
        psi = min(psi_rad, math.pi)
    return GeometryContext(
        altitude_km=altitude_km,
        alpha=alpha,
        psi_rad=psi,
        psi_horizon_rad=horizon_beamwidth(alpha),
        varphi_max_rad=max_zenith_angle(psi, alpha),
        earth=earth,
    )
