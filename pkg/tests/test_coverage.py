"""Analytic coverage and interference: quadrature oracles, limits, sweeps."""

import math

import numpy as np
import pytest

from leocov.channel import excess_gain_cdf, excess_gain_mean, path_gain
from leocov.coverage import (
    DEFAULT_COVERAGE_ABS_TOL,
    SWEEP_AXES,
    average_interference,
    coverage_probability,
    coverage_sweep,
)
from leocov.errors import NumericalError, QuadratureError
from leocov.geometry import contact_angle_cdf, contact_angle_pdf

from conftest import reference_scenario


def interference_oracle(scenario, n_grid=200_001):
    """Trapezoid evaluation of the mean-interference integral.

    Built from the vectorized public channel functions, so it shares no
    code with the scalar quadrature closure in average_interference.
    """
    geo = scenario.geometry()
    varphi = np.linspace(0.0, geo.varphi_max_rad, n_grid)
    gain = path_gain(varphi, scenario.constellation.altitude_km,
                     scenario.budget.freq_hz, earth=scenario.earth)
    zeta_bar = excess_gain_mean(varphi, scenario.channel, geo.alpha)
    integrand = gain * zeta_bar * np.sin(varphi)
    integral = np.trapezoid(integrand, varphi)
    lam = scenario.active_density_per_m2
    factor = (2.0 * math.pi * lam * scenario.earth.radius_m ** 2
              * scenario.budget.kappa * scenario.budget.eirp_gain_w)
    return factor * integral


def coverage_oracle(scenario, n_grid=200_001):
    """Trapezoid evaluation of the coverage integral (same independence)."""
    geo = scenario.geometry()
    ibar = interference_oracle(scenario, n_grid)
    n = scenario.constellation.n_sats
    threshold = (scenario.budget.target_sinr
                 * (ibar + scenario.budget.noise_w)
                 / scenario.budget.eirp_gain_w)
    varphi = np.linspace(0.0, geo.varphi_max_rad, n_grid)
    gain = path_gain(varphi, scenario.constellation.altitude_km,
                     scenario.budget.freq_hz, earth=scenario.earth)
    outage_cdf = excess_gain_cdf(threshold / gain, varphi,
                                 scenario.channel, geo.alpha)
    pdf = contact_angle_pdf(varphi, n)
    outage = np.trapezoid(outage_cdf * pdf, varphi)
    return contact_angle_cdf(geo.varphi_max_rad, n) - outage


class TestAverageInterference:
    def test_matches_quadrature_oracle(self, table1):
        ibar = average_interference(table1)
        assert ibar == pytest.approx(interference_oracle(table1), rel=1e-8)

    def test_oracle_match_across_beamwidths(self):
        for psi_deg in (30.0, 60.0, 120.0):
            scn = reference_scenario(psi_deg=psi_deg)
            assert average_interference(scn) == pytest.approx(
                interference_oracle(scn), rel=1e-8)

    def test_reference_value_pinned(self, table1):
        # Frozen from the oracle-verified implementation; regression guard.
        assert average_interference(table1) == pytest.approx(
            1.8249284729441557e-11, rel=1e-12)

    def test_zero_when_kappa_zero(self):
        scn = reference_scenario(kappa=0.0)
        assert average_interference(scn) == 0.0

    def test_zero_when_no_users(self):
        scn = reference_scenario(density_per_km2=0.0)
        assert average_interference(scn) == 0.0

    def test_linear_in_kappa_and_density(self, table1):
        ibar = average_interference(table1)
        half = reference_scenario(kappa=0.5)
        assert average_interference(half) == pytest.approx(0.5 * ibar, rel=1e-12)
        dense = reference_scenario(density_per_km2=0.08)
        assert average_interference(dense) == pytest.approx(2.0 * ibar, rel=1e-12)

    def test_grows_with_beamwidth(self):
        values = [average_interference(reference_scenario(psi_deg=d))
                  for d in (30.0, 60.0, 90.0, 120.0)]
        assert all(b > a for a, b in zip(values, values[1:]))


class TestCoverageProbability:
    def test_matches_quadrature_oracle(self, table1):
        result = coverage_probability(table1)
        assert result.p_cov == pytest.approx(coverage_oracle(table1), abs=1e-7)

    def test_oracle_match_on_off_reference(self):
        scn = reference_scenario(n_sats=400, altitude_km=900.0, psi_deg=40.0,
                                 density_per_km2=0.02)
        assert coverage_probability(scn).p_cov == pytest.approx(
            coverage_oracle(scn), abs=1e-7)

    def test_reference_values_pinned(self, table1):
        assert coverage_probability(table1).p_cov == pytest.approx(
            0.05940927698900478, rel=1e-10)
        quiet = reference_scenario(kappa=0.0)
        assert coverage_probability(quiet).p_cov == pytest.approx(
            0.8069651513041409, rel=1e-10)

    def test_result_fields(self, table1):
        result = coverage_probability(table1)
        assert result.method == "analytic"
        assert result.ci_halfwidth == 0.0
        assert result.mean_interference_w == pytest.approx(
            average_interference(table1), rel=1e-12)

    def test_bounded_by_availability(self):
        for psi_deg in (20.0, 60.0, 90.0, 150.0):
            scn = reference_scenario(psi_deg=psi_deg)
            geo = scn.geometry()
            avail = contact_angle_cdf(geo.varphi_max_rad, scn.constellation.n_sats)
            p = coverage_probability(scn).p_cov
            assert 0.0 <= p <= avail

    def test_plateau_is_bitwise_constant(self):
        # Beyond the horizon crossing the cap stops growing, so identical
        # geometry must produce identical floats, not merely close ones.
        a = coverage_probability(reference_scenario(psi_deg=150.0)).p_cov
        b = coverage_probability(reference_scenario(psi_deg=170.0)).p_cov
        assert a == b

    def test_low_threshold_recovers_availability(self):
        scn = reference_scenario(kappa=0.0, target_sinr_db=-200.0)
        geo = scn.geometry()
        avail = contact_angle_cdf(geo.varphi_max_rad, scn.constellation.n_sats)
        assert coverage_probability(scn).p_cov == pytest.approx(avail, abs=1e-6)

    def test_high_threshold_kills_coverage(self):
        scn = reference_scenario(target_sinr_db=100.0)
        assert coverage_probability(scn).p_cov == pytest.approx(0.0, abs=1e-6)

    def test_tolerance_insensitivity(self, table1):
        p_default = coverage_probability(table1, abs_tol=DEFAULT_COVERAGE_ABS_TOL).p_cov
        p_tight = coverage_probability(table1, abs_tol=DEFAULT_COVERAGE_ABS_TOL / 2).p_cov
        assert abs(p_default - p_tight) < 1e-6


class TestMonteCarloAgreement:
    def test_interference_sampler_agrees(self):
        from leocov.montecarlo import interference_samples
        scn = reference_scenario(psi_deg=60.0)
        samples = interference_samples(scn, 2000, seed=5)
        ibar = average_interference(scn)
        stderr = samples.std(ddof=1) / math.sqrt(len(samples))
        assert abs(samples.mean() - ibar) < 3.0 * stderr

    def test_coverage_simulator_agrees(self, table1):
        from leocov.montecarlo import empirical_coverage
        emp = empirical_coverage(table1, 4000, seed=5)
        ana = coverage_probability(table1).p_cov
        assert abs(emp.p_cov - ana) <= max(0.02, emp.ci_halfwidth)


class TestCoverageSweep:
    def test_altitude_axis_matches_direct(self, table1):
        grid = [300.0, 700.0, 1100.0]
        points = coverage_sweep(table1, "altitude", grid)
        assert [p.value for p in points] == grid
        for point in points:
            direct = coverage_probability(table1.with_altitude(point.value))
            assert point.result.p_cov == direct.p_cov
            assert point.error is None

    def test_beamwidth_axis_in_radians(self, table1):
        grid = [0.5, 1.0, 2.0]
        points = coverage_sweep(table1, "beamwidth", grid)
        direct = coverage_probability(table1.with_psi(1.0))
        assert points[1].result.p_cov == direct.p_cov

    def test_density_axis(self, table1):
        points = coverage_sweep(table1, "density", [0.01, 0.04])
        direct = coverage_probability(table1.with_density(0.01))
        assert points[0].result.p_cov == direct.p_cov

    def test_axis_names(self):
        assert SWEEP_AXES == ("altitude", "beamwidth", "density")

    def test_rejects_unknown_axis(self, table1):
        with pytest.raises(ValueError, match="axis"):
            coverage_sweep(table1, "inclination", [1.0])

    def test_rejects_empty_grid(self, table1):
        with pytest.raises(ValueError, match="empty"):
            coverage_sweep(table1, "altitude", [])

    def test_rejects_non_increasing_grid(self, table1):
        with pytest.raises(ValueError, match="increasing"):
            coverage_sweep(table1, "altitude", [500.0, 500.0])
        with pytest.raises(ValueError, match="increasing"):
            coverage_sweep(table1, "altitude", [700.0, 500.0])

    def test_collects_per_point_failures(self, table1, monkeypatch):
        import leocov.coverage as cov
        real = cov.coverage_probability

        def flaky(scenario, *, abs_tol=DEFAULT_COVERAGE_ABS_TOL):
            if scenario.constellation.altitude_km == 700.0:
                raise NumericalError("synthetic failure")
            return real(scenario, abs_tol=abs_tol)

        monkeypatch.setattr(cov, "coverage_probability", flaky)
        points = cov.coverage_sweep(table1, "altitude", [500.0, 700.0, 900.0])
        assert points[0].error is None and points[2].error is None
        assert points[1].result is None
        assert points[1].error == "synthetic failure"


class TestQuadratureError:
    def test_carries_achieved_tolerance(self):
        err = QuadratureError("integral did not converge", achieved_tolerance=3e-4)
        assert err.achieved_tolerance == 3e-4
        assert isinstance(err, NumericalError)
