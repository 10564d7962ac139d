"""Uplink coverage probability for dense LEO constellations.

Analytic model, snapshot Monte Carlo cross-check, and coverage-maximizing
design search over altitude and antenna beamwidth.
"""

from .channel import ChannelParams, LinkBudget
from .coverage import SweepPoint, average_interference, coverage_probability, coverage_sweep
from .errors import ConfigError, NumericalError, QuadratureError
from .geometry import BeamConfig, EarthModel, GeometryContext, make_context
from .montecarlo import (Snapshot, SnapshotRecord, empirical_coverage,
                         evaluate_snapshot, realize_constellation, realize_users,
                         simulate_records)
from .optimize import (OptimizationRequest, OptimizationResult,
                       optimal_beamwidth_curve, optimize_altitude,
                       optimize_beamwidth, optimize_joint)
from .scenario import ConstellationSpec, CoverageResult, Scenario

__version__ = "0.1.0"

__all__ = [
    "BeamConfig", "ChannelParams", "ConfigError", "ConstellationSpec",
    "CoverageResult", "EarthModel", "GeometryContext", "LinkBudget",
    "NumericalError", "OptimizationRequest", "OptimizationResult",
    "QuadratureError", "Scenario", "Snapshot", "SnapshotRecord", "SweepPoint",
    "average_interference", "coverage_probability", "coverage_sweep",
    "empirical_coverage", "evaluate_snapshot", "make_context",
    "optimal_beamwidth_curve", "optimize_altitude", "optimize_beamwidth",
    "optimize_joint", "realize_constellation", "realize_users",
    "simulate_records",
]
