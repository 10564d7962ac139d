"""Coverage maximization over altitude, beamwidth, or both.

Strategy: evaluate a coarse grid, then refine around the best cell with
golden-section search (coordinate-wise for the joint problem). The coverage
surface is smooth in altitude and piecewise smooth in beamwidth with an
exact plateau past the horizon-limited beamwidth, where all beamwidths give
the same footprint; ties always resolve to the smaller parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coverage import coverage_probability
from .geometry import horizon_beamwidth
from .scenario import Scenario

ALTITUDE_TOL_KM = 1.0
BEAMWIDTH_TOL_RAD = math.radians(0.1)
_TIE_EPS = 1e-12
_GOLD = (math.sqrt(5.0) - 1.0) / 2.0
_MAX_COORDINATE_PASSES = 20

MODES = ("altitude", "beamwidth", "joint")


@dataclass(frozen=True)
class OptimizationRequest:
    """What to optimize and how hard to look.

    Bounds are closed intervals in km (altitude) and radians (beamwidth).
    grid_resolution is the coarse point count per axis, at least 3; the
    joint mode accepts an (altitude, beamwidth) pair of counts.
    """

    scenario: Scenario
    mode: str
    h_bounds: tuple[float, float] | None = None
    psi_bounds: tuple[float, float] | None = None
    grid_resolution: int | tuple[int, int] = 64
    refine: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode in ("altitude", "joint"):
            _check_bounds("h_bounds", self.h_bounds)
        if self.mode in ("beamwidth", "joint"):
            _check_bounds("psi_bounds", self.psi_bounds)
            if not self.psi_bounds[0] > 0.0:
                raise ValueError("psi_bounds must be positive")
        for n in self.resolutions():
            if n < 3:
                raise ValueError(f"grid_resolution must be at least 3, got {n!r}")

    def resolutions(self) -> tuple[int, ...]:
        if isinstance(self.grid_resolution, int):
            return (self.grid_resolution,)
        return tuple(self.grid_resolution)


def _check_bounds(name: str, bounds) -> None:
    if bounds is None:
        raise ValueError(f"{name} is required for this mode")
    lo, hi = bounds
    if not lo < hi:
        raise ValueError(f"{name} must satisfy lower < upper, got {bounds!r}")


@dataclass(frozen=True)
class OptimizationResult:
    """Argmax, value, and bookkeeping from one optimization run.

    grid_trace holds the coarse-grid evaluations as (point, p_cov) pairs;
    p_cov_star is never below any traced value. Boundary flags mark an
    argmax pinned to its bound. converged is False only when the joint
    coordinate passes ran out before both moves fell under tolerance.
    """

    p_cov_star: float
    h_star_km: float | None = None
    psi_star_rad: float | None = None
    evaluations: int = 0
    h_on_boundary: bool = False
    psi_on_boundary: bool = False
    converged: bool = True
    grid_trace: tuple = ()


class _Cached:
    """Memoizing wrapper so grid, refinement, and snap reuse evaluations."""

    def __init__(self, fn):
        self._fn = fn
        self._seen: dict = {}
        self.evaluations = 0

    def __call__(self, *key):
        if key not in self._seen:
            self._seen[key] = self._fn(*key)
            self.evaluations += 1
        return self._seen[key]


def _golden_max(fn, lo: float, hi: float, tol: float) -> float:
    """Golden-section maximizer; equal probes shrink toward the left so
    plateau ties land on the smaller parameter."""
    a, b = lo, hi
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def _grid_argmax(xs, vals) -> int:
    # Strict improvement beyond the tie window keeps the smallest maximizer.
    best = 0
    for i in range(1, len(vals)):
        if vals[i] > vals[best] + _TIE_EPS:
            best = i
    return best


def _better(v_new: float, x_new: float, v_old: float, x_old: float) -> bool:
    if v_new > v_old + _TIE_EPS:
        return True
    return v_new >= v_old - _TIE_EPS and x_new < x_old


def _maximize_1d(fn, lo: float, hi: float, n: int, refine: bool,
                 tol: float) -> tuple[float, float, bool, tuple]:
    xs = np.linspace(lo, hi, n)
    vals = [fn(float(x)) for x in xs]
    i = _grid_argmax(xs, vals)
    x_star, v_star = float(xs[i]), vals[i]
    on_boundary = i == 0 or i == n - 1
    trace = tuple((float(x), v) for x, v in zip(xs, vals))
    if refine:
        a = float(xs[max(i - 1, 0)])
        b = float(xs[min(i + 1, n - 1)])
        if b - a > tol:
            x_ref = _golden_max(fn, a, b, tol)
            v_ref = fn(x_ref)
            if _better(v_ref, x_ref, v_star, x_star):
                x_star, v_star = x_ref, v_ref
    return x_star, v_star, on_boundary, trace


def optimize_altitude(request: OptimizationRequest, objective=None) -> OptimizationResult:
    """Best altitude at the request's fixed beamwidth.

    objective (altitude_km -> p_cov) defaults to the analytic model and
    exists as a seam for tests and studies.
    """
    if request.mode != "altitude":
        raise ValueError(f"request mode is {request.mode!r}, expected 'altitude'")
    scenario = request.scenario
    fn = _Cached(objective or (lambda h: coverage_probability(
        scenario.with_altitude(h)).p_cov))
    lo, hi = request.h_bounds
    n = request.resolutions()[0]
    h, p, on_bound, trace = _maximize_1d(fn, lo, hi, n, request.refine,
                                         ALTITUDE_TOL_KM)
    return OptimizationResult(p_cov_star=p, h_star_km=h, evaluations=fn.evaluations,
                              h_on_boundary=on_bound, grid_trace=trace)


def _snap_to_plateau(fn, psi: float, p: float, lo: float, alpha: float) -> tuple[float, float]:
    # Past the horizon-limited beamwidth the footprint, and therefore the
    # coverage, is exactly constant; report the smallest beamwidth on the
    # plateau when the optimum sits there.
    psi_o = horizon_beamwidth(alpha)
    if lo <= psi_o < psi:
        p_o = fn(psi_o)
        if p_o >= p - _TIE_EPS:
            return psi_o, p_o
    return psi, p


def optimize_beamwidth(request: OptimizationRequest, objective=None) -> OptimizationResult:
    """Best effective beamwidth at the request's fixed altitude."""
    if request.mode != "beamwidth":
        raise ValueError(f"request mode is {request.mode!r}, expected 'beamwidth'")
    scenario = request.scenario
    fn = _Cached(objective or (lambda psi: coverage_probability(
        scenario.with_psi(psi)).p_cov))
    lo, hi = request.psi_bounds
    hi = min(hi, math.pi)
    if not lo < hi:
        raise ValueError(f"psi_bounds collapse after clamping to pi: {request.psi_bounds!r}")
    n = request.resolutions()[0]
    psi, p, on_bound, trace = _maximize_1d(fn, lo, hi, n, request.refine,
                                           BEAMWIDTH_TOL_RAD)
    alpha = scenario.geometry().alpha
    psi, p = _snap_to_plateau(fn, psi, p, lo, alpha)
    return OptimizationResult(p_cov_star=p, psi_star_rad=psi, evaluations=fn.evaluations,
                              psi_on_boundary=on_bound, grid_trace=trace)


def optimize_joint(request: OptimizationRequest, objective=None) -> OptimizationResult:
    """Best altitude and beamwidth together.

    Coarse lattice scan, then alternating golden-section passes on each
    coordinate inside the best cell until both moves drop below tolerance.
    objective takes (altitude_km, psi_rad).
    """
    if request.mode != "joint":
        raise ValueError(f"request mode is {request.mode!r}, expected 'joint'")
    scenario = request.scenario
    fn = _Cached(objective or (lambda h, psi: coverage_probability(
        scenario.with_altitude(h).with_psi(psi)).p_cov))
    h_lo, h_hi = request.h_bounds
    p_lo, p_hi = request.psi_bounds
    p_hi = min(p_hi, math.pi)
    if not p_lo < p_hi:
        raise ValueError(f"psi_bounds collapse after clamping to pi: {request.psi_bounds!r}")
    res = request.resolutions()
    n_h, n_p = (res[0], res[0]) if len(res) == 1 else res
    hs = np.linspace(h_lo, h_hi, n_h)
    ps = np.linspace(p_lo, p_hi, n_p)

    trace = []
    h_star = p_star = None
    v_star = -math.inf
    ih_star = ip_star = 0
    for ih, h in enumerate(hs):
        for ip, psi in enumerate(ps):
            v = fn(float(h), float(psi))
            trace.append(((float(h), float(psi)), v))
            if v > v_star + _TIE_EPS:
                h_star, p_star, v_star = float(h), float(psi), v
                ih_star, ip_star = ih, ip
    h_on_bound = ih_star in (0, n_h - 1)
    p_on_bound = ip_star in (0, n_p - 1)

    converged = True
    if request.refine:
        dh = (h_hi - h_lo) / (n_h - 1)
        dp = (p_hi - p_lo) / (n_p - 1)
        converged = False
        for _ in range(_MAX_COORDINATE_PASSES):
            move = 0.0
            h_new = _golden_max(lambda h: fn(h, p_star),
                                max(h_lo, h_star - dh), min(h_hi, h_star + dh),
                                ALTITUDE_TOL_KM)
            if _better(fn(h_new, p_star), h_new, v_star, h_star):
                move = max(move, abs(h_new - h_star))
                h_star, v_star = h_new, fn(h_new, p_star)
            p_new = _golden_max(lambda psi: fn(h_star, psi),
                                max(p_lo, p_star - dp), min(p_hi, p_star + dp),
                                BEAMWIDTH_TOL_RAD)
            if _better(fn(h_star, p_new), p_new, v_star, p_star):
                move = max(move, abs(p_new - p_star))
                p_star, v_star = p_new, fn(h_star, p_new)
            if move < min(ALTITUDE_TOL_KM, BEAMWIDTH_TOL_RAD):
                converged = True
                break

    alpha = scenario.with_altitude(h_star).geometry().alpha
    p_star, v_star = _snap_to_plateau(lambda psi: fn(h_star, psi), p_star, v_star,
                                      p_lo, alpha)
    return OptimizationResult(p_cov_star=v_star, h_star_km=h_star, psi_star_rad=p_star,
                              evaluations=fn.evaluations, h_on_boundary=h_on_bound,
                              psi_on_boundary=p_on_bound, converged=converged,
                              grid_trace=tuple(trace))


def optimal_beamwidth_curve(scenario: Scenario, h_grid_km, *,
                            psi_bounds: tuple[float, float],
                            grid_resolution: int = 64, refine: bool = True,
                            objective=None) -> list[tuple[float, OptimizationResult]]:
    """psi*(h): the best beamwidth at each altitude in the grid.

    objective, when given, takes (altitude_km, psi_rad) and replaces the
    analytic model for every altitude.
    """
    out = []
    for h in h_grid_km:
        h = float(h)
        bound = (objective and (lambda psi, _h=h: objective(_h, psi))) or None
        req = OptimizationRequest(scenario=scenario.with_altitude(h), mode="beamwidth",
                                  psi_bounds=psi_bounds,
                                  grid_resolution=grid_resolution, refine=refine)
        out.append((h, optimize_beamwidth(req, objective=bound)))
    return out
