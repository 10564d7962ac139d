"""Analytic coverage probability for the uplink of a dense LEO shell.

The model: the target device connects to the nearest satellite; the link
succeeds when that satellite lies within the serviceable zenith cone and the
SINR against mean interference plus noise clears the detection threshold.
Averaging the shadowing CDF over the contact-angle density gives a pair of
one-dimensional integrals evaluated with adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .channel import RHO, SPEED_OF_LIGHT
from .errors import NumericalError, QuadratureError
from .geometry import contact_angle_cdf
from .scenario import ANALYTIC, CoverageResult, Scenario

# The integrands flatten abruptly near the footprint edge; a fixed split
# keeps the adaptive rule from wasting its subdivision budget there.
_SPLIT_FRACTION = 0.98

_SQRT2 = math.sqrt(2.0)

DEFAULT_COVERAGE_ABS_TOL = 1e-9
DEFAULT_INTERFERENCE_REL_TOL = 1e-10

SWEEP_AXES = ("altitude", "beamwidth", "density")


def _quad(fn, lo: float, hi: float, epsabs: float, epsrel: float) -> tuple[float, float]:
    out = integrate.quad(fn, lo, hi, epsabs=epsabs, epsrel=epsrel,
                         limit=200, full_output=1)
    value, abserr = out[0], out[1]
    if len(out) > 3:
        raise QuadratureError(
            f"quadrature on [{lo!r}, {hi!r}] did not converge: {out[3]}",
            achieved_tolerance=abserr)
    return value, abserr


def _split_quad(fn, lo: float, hi: float, epsabs: float, epsrel: float) -> float:
    cut = lo + (hi - lo) * _SPLIT_FRACTION
    v1, _ = _quad(fn, lo, cut, epsabs / 2.0 if epsabs else 0.0, epsrel)
    v2, _ = _quad(fn, cut, hi, epsabs / 2.0 if epsabs else 0.0, epsrel)
    return v1 + v2


def average_interference(scenario: Scenario, *,
                         rel_tol: float = DEFAULT_INTERFERENCE_REL_TOL) -> float:
    """Mean uplink interference power in watts at the serving satellite.

    Campbell averaging over the active-user process on the serving
    footprint: 2*pi*lambda*R^2*kappa*PtGtGs times the integral of
    path gain * mean excess gain * sin(varphi) up to the footprint edge.
    """
    budget = scenario.budget
    lam_m2 = scenario.active_density_per_m2
    if budget.kappa == 0.0 or lam_m2 == 0.0:
        return 0.0
    geo = scenario.geometry()
    ch = scenario.channel
    alpha = geo.alpha
    beta = ch.beta
    rm = geo.earth.radius_m
    rp = rm + geo.altitude_km * 1e3
    k_fspl = (SPEED_OF_LIGHT / (4.0 * math.pi * budget.freq_hz)) ** 2
    los_f = math.exp(0.5 * (RHO * ch.sigma_los_db) ** 2 - RHO * ch.mu_los_db)
    nlos_f = math.exp(0.5 * (RHO * ch.sigma_nlos_db) ** 2 - RHO * ch.mu_nlos_db)

    def integrand(phi: float) -> float:
        c = math.cos(phi)
        s = math.sin(phi)
        gain = k_fspl / (rm * rm + rp * rp - 2.0 * rm * rp * c)
        d = c - alpha
        p_los = math.exp(-beta * s / d) if d > 0.0 else 0.0
        zbar = p_los * los_f + (1.0 - p_los) * nlos_f
        return gain * zbar * s

    value = _split_quad(integrand, 0.0, geo.varphi_max_rad, 0.0, rel_tol)
    return 2.0 * math.pi * lam_m2 * rm * rm * budget.kappa * budget.eirp_gain_w * value


def coverage_probability(scenario: Scenario, *,
                         abs_tol: float = DEFAULT_COVERAGE_ABS_TOL) -> CoverageResult:
    """Probability the target's uplink is both served and above threshold.

    Availability (nearest satellite inside the serviceable cone) minus the
    outage integral: the shadowing-gain CDF evaluated at the threshold-
    normalized link deficit, weighted by the contact-angle density.
    """
    geo = scenario.geometry()
    budget = scenario.budget
    ch = scenario.channel
    n = scenario.constellation.n_sats
    ibar = average_interference(scenario)
    alpha = geo.alpha
    beta = ch.beta
    half_n = 0.5 * n
    rm = geo.earth.radius_m
    rp = rm + geo.altitude_km * 1e3
    k_fspl = (SPEED_OF_LIGHT / (4.0 * math.pi * budget.freq_hz)) ** 2
    # Threshold on the excess gain, before dividing by the distance gain.
    thr = budget.target_sinr * (ibar + budget.noise_w) / budget.eirp_gain_w
    mu_los = ch.mu_los_db
    mu_nlos = ch.mu_nlos_db
    s_los = _SQRT2 * ch.sigma_los_db
    s_nlos = _SQRT2 * ch.sigma_nlos_db

    def integrand(phi: float) -> float:
        c = math.cos(phi)
        s = math.sin(phi)
        pdf = half_n * s * math.exp(-half_n * (1.0 - c))
        if thr <= 0.0:
            return 0.0
        x = thr * (rm * rm + rp * rp - 2.0 * rm * rp * c) / k_fspl
        xdb = 10.0 * math.log10(x)
        d = c - alpha
        p_los = math.exp(-beta * s / d) if d > 0.0 else 0.0
        cdf = (0.5 + 0.5 * p_los * math.erf((xdb + mu_los) / s_los)
               + 0.5 * (1.0 - p_los) * math.erf((xdb + mu_nlos) / s_nlos))
        return cdf * pdf

    outage = _split_quad(integrand, 0.0, geo.varphi_max_rad, abs_tol, 0.0)
    availability = contact_angle_cdf(geo.varphi_max_rad, n)
    p = availability - outage
    if p < -10.0 * abs_tol or p > availability + 10.0 * abs_tol:
        raise NumericalError(
            f"coverage integral produced {p!r} outside [0, {availability!r}]")
    p = min(max(p, 0.0), availability)
    return CoverageResult(p_cov=p, method=ANALYTIC, ci_halfwidth=0.0,
                          mean_interference_w=ibar)


@dataclass(frozen=True)
class SweepPoint:
    """One sweep sample: the axis value, a result, or the failure reason."""

    value: float
    result: CoverageResult | None
    error: str | None = None


def coverage_sweep(scenario: Scenario, axis: str, grid, *,
                   abs_tol: float = DEFAULT_COVERAGE_ABS_TOL) -> list[SweepPoint]:
    """Evaluate analytic coverage along one axis.

    axis is one of 'altitude' (km), 'beamwidth' (radians, replaces any beam
    pair), or 'density' (users per km^2, all devices). The grid must be
    nonempty and strictly increasing. Per-point numerical failures are
    recorded on the point rather than aborting the sweep.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    grid = [float(v) for v in grid]
    if not grid:
        raise ValueError("sweep grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("sweep grid must be strictly increasing")
    points: list[SweepPoint] = []
    for value in grid:
        if axis == "altitude":
            s = scenario.with_altitude(value)
        elif axis == "beamwidth":
            s = scenario.with_psi(value)
        else:
            s = scenario.with_density(value)
        try:
            points.append(SweepPoint(value, coverage_probability(s, abs_tol=abs_tol)))
        except NumericalError as exc:
            points.append(SweepPoint(value, None, str(exc)))
    return points
