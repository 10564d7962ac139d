"""Uplink channel model: distance-dependent gain and shadowed excess gain.

The excess gain is a two-component lognormal mixture gated by the
line-of-sight probability at the user's Earth-centered zenith angle. Mixture
means are attenuations, so they enter the exponent negated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .geometry import EarthModel

SPEED_OF_LIGHT = 2.99792458e8  # m/s

# dB-to-natural-log scale factor for lognormal moment formulas.
RHO = math.log(10.0) / 10.0

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ChannelParams:
    """Shadowing mixture parameters. Defaults are a suburban S-band fit."""

    beta: float = 2.3
    mu_los_db: float = 0.0
    mu_nlos_db: float = 12.0
    sigma_los_db: float = 2.8
    sigma_nlos_db: float = 9.0

    def __post_init__(self):
        if self.beta < 0.0:
            raise ValueError(f"beta must be nonnegative, got {self.beta!r}")
        if not self.sigma_los_db > 0.0 or not self.sigma_nlos_db > 0.0:
            raise ValueError("shadowing sigmas must be positive")


@dataclass(frozen=True)
class LinkBudget:
    """Transmit-side EIRP, receive gain, and detection settings.

    noise_dbw and kappa carry no defaults on purpose: they are deployment
    choices, not channel physics, and must be stated explicitly.
    """

    noise_dbw: float
    kappa: float
    eirp_dbw: float = 23.0
    gain_s_dbi: float = 0.0
    freq_hz: float = 2.0e9
    target_sinr_db: float = -20.0

    def __post_init__(self):
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError(f"kappa must lie in [0, 1], got {self.kappa!r}")
        if not self.freq_hz > 0.0:
            raise ValueError(f"freq_hz must be positive, got {self.freq_hz!r}")

    @property
    def eirp_gain_w(self) -> float:
        """Pt*Gt*Gs in watts (linear)."""
        return 10.0 ** ((self.eirp_dbw + self.gain_s_dbi) / 10.0)

    @property
    def noise_w(self) -> float:
        return 10.0 ** (self.noise_dbw / 10.0)

    @property
    def target_sinr(self) -> float:
        return 10.0 ** (self.target_sinr_db / 10.0)


def path_gain(varphi, altitude_km: float, freq_hz: float,
              earth: EarthModel = EarthModel()):
    """Free-space gain (c/4/pi/f)^2 / d^2 at Earth-centered zenith angle varphi.

    The slant distance d follows from the law of cosines between the user
    radius R and the shell radius R+h. Scalar or array.
    """
    if not altitude_km > 0.0:
        raise ValueError(f"altitude must be positive, got {altitude_km!r}")
    if not freq_hz > 0.0:
        raise ValueError(f"freq_hz must be positive, got {freq_hz!r}")
    varphi = np.asarray(varphi, dtype=float)
    rm = earth.radius_m
    rp = rm + altitude_km * 1e3
    d2 = rm * rm + rp * rp - 2.0 * rm * rp * np.cos(varphi)
    if np.any(d2 <= 0.0):
        raise ValueError("slant distance vanished; geometry is degenerate")
    k = (SPEED_OF_LIGHT / (4.0 * math.pi * freq_hz)) ** 2
    out = k / d2
    return float(out) if out.ndim == 0 else out


def los_probability(varphi, alpha: float, beta: float):
    """Probability the link at zenith angle varphi is line of sight.

    Zero at and beyond the horizon angle acos(alpha). Scalar or array.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if beta < 0.0:
        raise ValueError(f"beta must be nonnegative, got {beta!r}")
    varphi = np.asarray(varphi, dtype=float)
    denom = np.cos(varphi) - alpha
    visible = denom > 0.0
    # Force the exponent to -inf where the link is past the horizon so the
    # masked exp underflows to exactly zero instead of overflowing.
    expo = np.where(visible, -beta * np.sin(varphi) / np.where(visible, denom, 1.0),
                    -np.inf)
    out = np.exp(expo)
    return float(out) if out.ndim == 0 else out


def excess_gain_mean(varphi, params: ChannelParams, alpha: float):
    """Mean linear excess gain at zenith angle varphi.

    Each lognormal component with dB-mean mu and dB-sigma s contributes
    exp(rho^2 s^2 / 2 - rho mu), rho = ln(10)/10; the mixture weights are
    the LoS/NLoS probabilities. Scalar or array.
    """
    p_los = los_probability(varphi, alpha, params.beta)
    los_f = math.exp(0.5 * (RHO * params.sigma_los_db) ** 2 - RHO * params.mu_los_db)
    nlos_f = math.exp(0.5 * (RHO * params.sigma_nlos_db) ** 2 - RHO * params.mu_nlos_db)
    out = p_los * los_f + (1.0 - p_los) * nlos_f
    return float(out) if np.ndim(out) == 0 else out


def excess_gain_cdf(x, varphi, params: ChannelParams, alpha: float):
    """CDF of the linear excess gain evaluated at x > 0. Scalar or array."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("excess_gain_cdf is defined for x > 0 only")
    xdb = 10.0 * np.log10(x)
    p_los = los_probability(varphi, alpha, params.beta)
    t_los = special.erf((xdb + params.mu_los_db) / (_SQRT2 * params.sigma_los_db))
    t_nlos = special.erf((xdb + params.mu_nlos_db) / (_SQRT2 * params.sigma_nlos_db))
    out = 0.5 + 0.5 * p_los * t_los + 0.5 * (1.0 - p_los) * t_nlos
    return float(out) if out.ndim == 0 else out


def excess_gain_samples(rng: np.random.Generator, varphi, params: ChannelParams,
                        alpha: float) -> np.ndarray:
    """Draw one linear excess gain per entry of varphi.

    Draw order per call: one uniform batch to pick the mixture component,
    then one normal batch for the dB gain. Means are negated because the
    parameters describe attenuation.
    """
    varphi = np.atleast_1d(np.asarray(varphi, dtype=float))
    p_los = np.atleast_1d(los_probability(varphi, alpha, params.beta))
    is_los = rng.random(varphi.shape) < p_los
    mu = np.where(is_los, -params.mu_los_db, -params.mu_nlos_db)
    sigma = np.where(is_los, params.sigma_los_db, params.sigma_nlos_db)
    gain_db = rng.normal(mu, sigma)
    return 10.0 ** (gain_db / 10.0)


def excess_gain_sample(rng: np.random.Generator, varphi: float,
                       params: ChannelParams, alpha: float) -> float:
    """Single draw; consumes the stream exactly like a size-1 batch."""
    return float(excess_gain_samples(rng, [varphi], params, alpha)[0])
