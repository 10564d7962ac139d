"""Scenario and result containers shared by the analytic and simulation paths."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .channel import ChannelParams, LinkBudget
from .geometry import BeamConfig, EarthModel, GeometryContext, make_context

RANDOM_BPP = "random_bpp"
WALKER_DELTA = "walker_delta"
WALKER_STAR = "walker_star"
CONSTELLATION_KINDS = (RANDOM_BPP, WALKER_DELTA, WALKER_STAR)

# Reference inclinations for the two Walker layouts when none is given.
DEFAULT_INCLINATION_DEG = {WALKER_DELTA: 86.4, WALKER_STAR: 53.0}


@dataclass(frozen=True)
class ConstellationSpec:
    """One orbital shell: satellite count, altitude, and layout."""

    n_sats: int
    altitude_km: float
    kind: str = RANDOM_BPP
    inclination_deg: float | None = None
    planes: int | None = None
    phasing: int = 0

    def __post_init__(self):
        if self.n_sats < 1:
            raise ValueError(f"n_sats must be at least 1, got {self.n_sats!r}")
        if not self.altitude_km > 0.0:
            raise ValueError(f"altitude_km must be positive, got {self.altitude_km!r}")
        if self.kind not in CONSTELLATION_KINDS:
            raise ValueError(
                f"kind must be one of {CONSTELLATION_KINDS}, got {self.kind!r}")
        if self.inclination_deg is not None and not 0.0 <= self.inclination_deg <= 90.0:
            raise ValueError(
                f"inclination_deg must lie in [0, 90], got {self.inclination_deg!r}")
        if self.planes is not None and self.planes < 1:
            raise ValueError(f"planes must be at least 1, got {self.planes!r}")

    @property
    def is_walker(self) -> bool:
        return self.kind in (WALKER_DELTA, WALKER_STAR)

    def resolved_planes(self) -> int:
        """Plane count: explicit, else the square-root rule."""
        if self.planes is not None:
            return self.planes
        return max(1, round(math.sqrt(self.n_sats)))

    def resolved_inclination_deg(self) -> float:
        if self.inclination_deg is not None:
            return self.inclination_deg
        if self.kind in DEFAULT_INCLINATION_DEG:
            return DEFAULT_INCLINATION_DEG[self.kind]
        return 90.0


@dataclass(frozen=True)
class Scenario:
    """Everything needed to evaluate coverage once.

    The beamwidth comes in through exactly one of psi_rad (already
    effective) or beams (satellite/terminal pair). user_density_per_km2 is
    the density of all devices; duty_cycle scales it down to the
    simultaneously active ones.
    """

    constellation: ConstellationSpec
    channel: ChannelParams
    budget: LinkBudget
    user_density_per_km2: float
    duty_cycle: float
    psi_rad: float | None = None
    beams: BeamConfig | None = None
    earth: EarthModel = EarthModel()

    def __post_init__(self):
        if (self.psi_rad is None) == (self.beams is None):
            raise ValueError("exactly one of psi_rad or beams must be given")
        if self.psi_rad is not None and not self.psi_rad > 0.0:
            raise ValueError(f"psi_rad must be positive, got {self.psi_rad!r}")
        if self.user_density_per_km2 < 0.0:
            raise ValueError(
                f"user density must be nonnegative, got {self.user_density_per_km2!r}")
        if not 0.0 <= self.duty_cycle <= 1.0:
            raise ValueError(f"duty_cycle must lie in [0, 1], got {self.duty_cycle!r}")

    def geometry(self) -> GeometryContext:
        return make_context(self.constellation.altitude_km, psi_rad=self.psi_rad,
                            beams=self.beams, earth=self.earth)

    @property
    def active_density_per_km2(self) -> float:
        return self.duty_cycle * self.user_density_per_km2

    @property
    def active_density_per_m2(self) -> float:
        return self.active_density_per_km2 / 1e6

    def with_altitude(self, altitude_km: float) -> "Scenario":
        return replace(self, constellation=replace(self.constellation,
                                                   altitude_km=altitude_km))

    def with_psi(self, psi_rad: float) -> "Scenario":
        return replace(self, psi_rad=psi_rad, beams=None)

    def with_density(self, density_per_km2: float) -> "Scenario":
        return replace(self, user_density_per_km2=density_per_km2)

    def with_kind(self, kind: str) -> "Scenario":
        return replace(self, constellation=replace(self.constellation, kind=kind))


ANALYTIC = "analytic"
EMPIRICAL = "empirical"


@dataclass(frozen=True)
class CoverageResult:
    """Coverage probability with provenance.

    ci_halfwidth is the normal-approximation 95% halfwidth for empirical
    results and zero for analytic ones. mean_interference_w is the average
    received interference power in watts (model mean for analytic results,
    sample mean over served snapshots for empirical ones; NaN when no
    snapshot was served).
    """

    p_cov: float
    method: str
    ci_halfwidth: float = 0.0
    mean_interference_w: float = float("nan")

    def __post_init__(self):
        if self.method not in (ANALYTIC, EMPIRICAL):
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.p_cov <= 1.0:
            raise ValueError(f"p_cov must lie in [0, 1], got {self.p_cov!r}")
        if self.ci_halfwidth < 0.0:
            raise ValueError(f"ci_halfwidth must be nonnegative, got {self.ci_halfwidth!r}")
