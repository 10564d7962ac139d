"""Simulator tests: constellation realizations, snapshot scoring, determinism."""

import math

import numpy as np
import pytest
from numpy.random import default_rng
from scipy import stats

from leocov.channel import excess_gain_sample, excess_gain_samples, path_gain
from leocov.errors import ConfigError
from leocov.geometry import EARTH_RADIUS_KM, contact_angle_cdf
from leocov.montecarlo import (
    Snapshot,
    SphericalCap,
    empirical_coverage,
    evaluate_snapshot,
    interference_samples,
    latitude_filter,
    realize_constellation,
    realize_users,
    simulate_records,
)
from leocov.scenario import ConstellationSpec

from conftest import reference_scenario


def orbit_normals(positions, planes, per_plane):
    """Recover one unit normal per plane, oriented to the north."""
    normals = []
    for j in range(planes):
        p0 = positions[j * per_plane]
        p1 = positions[j * per_plane + 1]
        n = np.cross(p0, p1)
        n = n / np.linalg.norm(n)
        if n[2] < 0:
            n = -n
        normals.append(n)
    return np.array(normals)


class TestRandomShell:
    def test_radii(self):
        spec = ConstellationSpec(n_sats=500, altitude_km=650.0, kind="random_bpp")
        pos = realize_constellation(spec, default_rng(1))
        assert pos.shape == (500, 3)
        np.testing.assert_allclose(np.linalg.norm(pos, axis=1),
                                   EARTH_RADIUS_KM + 650.0, rtol=1e-12)

    def test_uniformity(self):
        spec = ConstellationSpec(n_sats=1000, altitude_km=500.0, kind="random_bpp")
        rng = default_rng(2)
        pos = np.vstack([realize_constellation(spec, rng) for _ in range(20)])
        r = np.linalg.norm(pos, axis=1)
        z = pos[:, 2] / r
        assert stats.kstest(z, "uniform", args=(-1.0, 2.0)).statistic < 0.02
        az = np.mod(np.arctan2(pos[:, 1], pos[:, 0]), 2.0 * math.pi)
        assert stats.kstest(az, "uniform", args=(0.0, 2.0 * math.pi)).statistic < 0.02

    def test_deterministic_given_state(self):
        spec = ConstellationSpec(n_sats=64, altitude_km=500.0, kind="random_bpp")
        a = realize_constellation(spec, default_rng(3))
        b = realize_constellation(spec, default_rng(3))
        np.testing.assert_array_equal(a, b)


class TestWalkerLattice:
    def test_shape_and_radius(self):
        spec = ConstellationSpec(n_sats=16, altitude_km=550.0, kind="walker_delta",
                                 planes=4, inclination_deg=60.0)
        pos = realize_constellation(spec, default_rng(4))
        assert pos.shape == (16, 3)
        np.testing.assert_allclose(np.linalg.norm(pos, axis=1),
                                   EARTH_RADIUS_KM + 550.0, rtol=1e-12)

    def test_plane_structure_and_inclination(self):
        spec = ConstellationSpec(n_sats=16, altitude_km=550.0, kind="walker_delta",
                                 planes=4, inclination_deg=60.0)
        pos = realize_constellation(spec, default_rng(4))
        normals = orbit_normals(pos, 4, 4)
        # Every satellite of a plane lies in that plane.
        for j in range(4):
            block = pos[j * 4:(j + 1) * 4]
            assert np.max(np.abs(block @ normals[j])) < 1e-6
        np.testing.assert_allclose(np.degrees(np.arccos(normals[:, 2])),
                                   60.0, atol=1e-9)

    def test_raan_spread_delta_full_turn(self):
        spec = ConstellationSpec(n_sats=16, altitude_km=550.0, kind="walker_delta",
                                 planes=4, inclination_deg=60.0)
        pos = realize_constellation(spec, default_rng(4))
        normals = orbit_normals(pos, 4, 4)
        raan = np.mod(np.arctan2(normals[:, 0], -normals[:, 1]), 2.0 * math.pi)
        gaps = np.mod(np.diff(raan), 2.0 * math.pi)
        np.testing.assert_allclose(gaps, 2.0 * math.pi / 4, atol=1e-9)

    def test_raan_spread_star_half_turn(self):
        spec = ConstellationSpec(n_sats=16, altitude_km=550.0, kind="walker_star",
                                 planes=4, inclination_deg=75.0)
        pos = realize_constellation(spec, default_rng(4))
        normals = orbit_normals(pos, 4, 4)
        raan = np.mod(np.arctan2(normals[:, 0], -normals[:, 1]), 2.0 * math.pi)
        gaps = np.mod(np.diff(raan), 2.0 * math.pi)
        np.testing.assert_allclose(gaps, math.pi / 4, atol=1e-9)

    def test_latitude_never_exceeds_inclination(self):
        spec = ConstellationSpec(n_sats=32, altitude_km=500.0, kind="walker_delta",
                                 planes=4, inclination_deg=53.0)
        r = EARTH_RADIUS_KM + 500.0
        cap = r * math.sin(math.radians(53.0))
        for seed in range(5):
            pos = realize_constellation(spec, default_rng(seed))
            assert np.max(np.abs(pos[:, 2])) <= cap + 1e-6
        # With 8 slots per plane the lattice comes close to the cap too.
        assert np.max(np.abs(pos[:, 2])) > 0.9 * cap

    def test_phasing_changes_lattice(self):
        base = dict(n_sats=16, altitude_km=550.0, kind="walker_delta",
                    planes=4, inclination_deg=60.0)
        a = realize_constellation(ConstellationSpec(phasing=0, **base), default_rng(6))
        b = realize_constellation(ConstellationSpec(phasing=1, **base), default_rng(6))
        assert not np.allclose(a, b)

    def test_default_inclinations(self):
        delta = ConstellationSpec(n_sats=16, altitude_km=500.0, kind="walker_delta")
        star = ConstellationSpec(n_sats=16, altitude_km=500.0, kind="walker_star")
        assert delta.resolved_inclination_deg() == 86.4
        assert star.resolved_inclination_deg() == 53.0

    def test_square_root_plane_rule(self):
        spec = ConstellationSpec(n_sats=1024, altitude_km=500.0, kind="walker_delta")
        assert spec.resolved_planes() == 32

    def test_unfillable_lattice_rejected(self):
        spec = ConstellationSpec(n_sats=1000, altitude_km=500.0, kind="walker_delta")
        with pytest.raises(ConfigError, match="cannot fill 32 equal planes"):
            realize_constellation(spec, default_rng(0))
        with pytest.raises(ConfigError, match="992"):
            realize_constellation(spec, default_rng(0))


class TestLatitudeFilter:
    def test_uniform_shell_everywhere(self):
        spec = ConstellationSpec(n_sats=100, altitude_km=500.0, kind="random_bpp")
        pole = np.array([0.0, 0.0, EARTH_RADIUS_KM])
        assert latitude_filter(pole, spec, 0.1)

    def test_walker_band(self):
        spec = ConstellationSpec(n_sats=16, altitude_km=500.0, kind="walker_star",
                                 inclination_deg=53.0)
        varphi_max = 0.08
        limit = math.radians(53.0) + varphi_max

        def at_latitude(lat):
            return EARTH_RADIUS_KM * np.array([math.cos(lat), 0.0, math.sin(lat)])

        assert latitude_filter(at_latitude(limit - 1e-9), spec, varphi_max)
        assert latitude_filter(at_latitude(-limit + 1e-9), spec, varphi_max)
        assert not latitude_filter(at_latitude(limit + 1e-6), spec, varphi_max)
        assert not latitude_filter(at_latitude(-limit - 1e-6), spec, varphi_max)


class TestRealizeUsers:
    def test_poisson_count(self):
        cap = SphericalCap(np.array([0.0, 0.0, 1.0]), 0.3)
        density = 1e-5
        expected = density * cap.area_km2()
        rng = default_rng(7)
        counts = [realize_users(density, cap, rng)[0].shape[0] - 1
                  for _ in range(200)]
        stderr = math.sqrt(expected / 200)
        assert abs(np.mean(counts) - expected) < 4.0 * stderr

    def test_cap_containment(self):
        axis = np.array([1.0, 0.0, 0.0])
        cap = SphericalCap(axis, 0.25)
        positions, target_index = realize_users(2e-5, cap, default_rng(8))
        assert target_index == 0
        np.testing.assert_allclose(np.linalg.norm(positions, axis=1),
                                   EARTH_RADIUS_KM, rtol=1e-9)
        unit = positions / np.linalg.norm(positions, axis=1, keepdims=True)
        assert np.min(unit @ axis) >= math.cos(0.25) - 1e-12

    def test_reference_point_preserved(self):
        cap = SphericalCap(np.array([0.0, 0.0, 1.0]), 0.2)
        ref = np.array([1.0, 2.0, 6370.0])
        positions, target_index = realize_users(1e-5, cap, default_rng(9),
                                                reference_point_km=ref)
        np.testing.assert_array_equal(positions[target_index], ref)

    def test_default_reference_is_cap_center(self):
        axis = np.array([0.0, 1.0, 0.0])
        cap = SphericalCap(axis, 0.2)
        positions, _ = realize_users(0.0, cap, default_rng(10))
        np.testing.assert_allclose(positions[0], EARTH_RADIUS_KM * axis)

    def test_negative_density_rejected(self):
        cap = SphericalCap(np.array([0.0, 0.0, 1.0]), 0.2)
        with pytest.raises(ValueError, match="nonnegative"):
            realize_users(-0.1, cap, default_rng(0))

    def test_cap_area(self):
        cap = SphericalCap(np.array([0.0, 0.0, 1.0]), 0.3, radius_km=1000.0)
        expected = 2.0 * math.pi * 1e6 * (1.0 - math.cos(0.3))
        assert cap.area_km2() == pytest.approx(expected, rel=1e-12)


class TestEvaluateSnapshot:
    def overhead_snapshot(self, scenario, extra_users=()):
        r_orbit = EARTH_RADIUS_KM + scenario.constellation.altitude_km
        sats = np.array([[0.0, 0.0, r_orbit]])
        users = np.vstack([np.array([[0.0, 0.0, EARTH_RADIUS_KM]]),
                           *[u[None, :] for u in extra_users]]) \
            if extra_users else np.array([[0.0, 0.0, EARTH_RADIUS_KM]])
        return Snapshot(sats, users, 0)

    def test_noise_limited_oracle(self):
        scn = reference_scenario(density_per_km2=0.0)
        geo = scn.geometry()
        rec = evaluate_snapshot(self.overhead_snapshot(scn), scn, default_rng(99))
        zeta0 = excess_gain_sample(default_rng(99), 0.0, scn.channel, geo.alpha)
        p_rx = (scn.budget.eirp_gain_w
                * path_gain(0.0, scn.constellation.altitude_km, scn.budget.freq_hz)
                * zeta0)
        assert rec.served
        assert rec.varphi_o_rad == 0.0
        assert rec.interference_w == 0.0
        assert rec.n_interferers == 0
        assert rec.sinr_db == pytest.approx(
            10.0 * math.log10(p_rx / scn.budget.noise_w), rel=1e-12)

    def test_footprint_gates_interferers(self):
        scn = reference_scenario()
        geo = scn.geometry()
        inside = EARTH_RADIUS_KM * np.array(
            [math.sin(0.05), 0.0, math.cos(0.05)])
        outside = EARTH_RADIUS_KM * np.array(
            [math.sin(geo.varphi_max_rad + 0.05), 0.0,
             math.cos(geo.varphi_max_rad + 0.05)])
        snap = self.overhead_snapshot(scn, extra_users=(inside, outside))
        rec = evaluate_snapshot(snap, scn, default_rng(13))
        assert rec.served
        assert rec.n_interferers == 1
        # Replay the stream: desired gain first, then the one interferer.
        rng = default_rng(13)
        excess_gain_sample(rng, 0.0, scn.channel, geo.alpha)
        u_unit = snap.user_positions_km / np.linalg.norm(
            snap.user_positions_km, axis=1, keepdims=True)
        varphi_i = np.arccos(np.clip(u_unit[1] @ np.array([0.0, 0.0, 1.0]), -1, 1))
        zeta_i = excess_gain_samples(rng, np.array([varphi_i]), scn.channel,
                                     geo.alpha)
        expected = (scn.budget.kappa * scn.budget.eirp_gain_w
                    * path_gain(varphi_i, scn.constellation.altitude_km,
                                scn.budget.freq_hz)
                    * zeta_i[0])
        assert rec.interference_w == pytest.approx(expected, rel=1e-12)

    def test_kappa_scales_interference(self):
        full = reference_scenario(kappa=1.0)
        half = reference_scenario(kappa=0.5)
        inside = EARTH_RADIUS_KM * np.array([math.sin(0.04), 0.0, math.cos(0.04)])
        snap = self.overhead_snapshot(full, extra_users=(inside,))
        rec_full = evaluate_snapshot(snap, full, default_rng(14))
        rec_half = evaluate_snapshot(snap, half, default_rng(14))
        assert rec_half.interference_w == pytest.approx(
            0.5 * rec_full.interference_w, rel=1e-12)

    def test_unserved_far_satellite(self):
        scn = reference_scenario(density_per_km2=0.0)
        r_orbit = EARTH_RADIUS_KM + scn.constellation.altitude_km
        snap = Snapshot(np.array([[r_orbit, 0.0, 0.0]]),
                        np.array([[0.0, 0.0, EARTH_RADIUS_KM]]), 0)
        rec = evaluate_snapshot(snap, scn, default_rng(15))
        assert not rec.served
        assert rec.varphi_o_rad == pytest.approx(math.pi / 2, rel=1e-12)
        assert math.isnan(rec.sinr_db)
        assert math.isnan(rec.interference_w)
        assert rec.n_interferers == 0

    def test_tie_breaks_to_first_satellite(self):
        scn = reference_scenario(density_per_km2=0.0)
        r_orbit = EARTH_RADIUS_KM + scn.constellation.altitude_km
        single = Snapshot(np.array([[0.0, 0.0, r_orbit]]),
                          np.array([[0.0, 0.0, EARTH_RADIUS_KM]]), 0)
        doubled = Snapshot(np.array([[0.0, 0.0, r_orbit], [0.0, 0.0, r_orbit]]),
                           np.array([[0.0, 0.0, EARTH_RADIUS_KM]]), 0)
        a = evaluate_snapshot(single, scn, default_rng(16))
        b = evaluate_snapshot(doubled, scn, default_rng(16))
        assert a.sinr_db == b.sinr_db


def records_equal(a, b):
    return (np.array_equal(a.served, b.served)
            and np.array_equal(a.sinr_db, b.sinr_db, equal_nan=True)
            and np.array_equal(a.varphi_o_rad, b.varphi_o_rad, equal_nan=True)
            and np.array_equal(a.interference_w, b.interference_w, equal_nan=True)
            and np.array_equal(a.n_interferers, b.n_interferers))


class TestSimulateRecords:
    def test_deterministic_across_runs(self, table1):
        a = simulate_records(table1, 50, seed=21)
        b = simulate_records(table1, 50, seed=21)
        assert len(a) == 50
        assert records_equal(a, b)

    def test_seed_matters(self, table1):
        a = simulate_records(table1, 50, seed=21)
        b = simulate_records(table1, 50, seed=22)
        assert not np.array_equal(a.sinr_db, b.sinr_db, equal_nan=True)

    def test_worker_count_invisible(self, table1):
        a = simulate_records(table1, 30, seed=23, workers=1)
        b = simulate_records(table1, 30, seed=23, workers=3)
        assert records_equal(a, b)

    def test_nearest_angle_distribution(self):
        scn = reference_scenario(density_per_km2=0.0)
        records = simulate_records(scn, 3000, seed=24)
        n = scn.constellation.n_sats
        ks = stats.kstest(records.varphi_o_rad,
                          lambda x: contact_angle_cdf(x, n))
        assert ks.statistic < 0.035

    def test_validation(self, table1):
        with pytest.raises(ValueError, match="n_realizations"):
            simulate_records(table1, 0, seed=1)
        with pytest.raises(ValueError, match="workers"):
            simulate_records(table1, 10, seed=1, workers=0)


class TestEmpiricalCoverage:
    def test_consistent_with_records(self, table1):
        result = empirical_coverage(table1, 400, seed=25)
        records = simulate_records(table1, 400, seed=25)
        covered = records.served & (records.sinr_db > table1.budget.target_sinr_db)
        assert result.p_cov == covered.mean()
        assert result.method == "empirical"
        expected_ci = 1.96 * math.sqrt(result.p_cov * (1 - result.p_cov) / 400)
        assert result.ci_halfwidth == pytest.approx(expected_ci, rel=1e-12)
        assert result.mean_interference_w == pytest.approx(
            records.interference_w[records.served].mean(), rel=1e-12)

    def test_nothing_served(self):
        scn = reference_scenario(n_sats=1, psi_deg=0.5, density_per_km2=0.0)
        result = empirical_coverage(scn, 25, seed=26)
        assert result.p_cov == 0.0
        assert result.ci_halfwidth == 0.0
        assert math.isnan(result.mean_interference_w)


class TestInterferenceSamples:
    def test_deterministic_and_nonnegative(self):
        scn = reference_scenario(psi_deg=60.0)
        a = interference_samples(scn, 40, seed=27)
        b = interference_samples(scn, 40, seed=27)
        np.testing.assert_array_equal(a, b)
        assert np.all(a >= 0.0)

    def test_worker_count_invisible(self):
        scn = reference_scenario(psi_deg=60.0)
        a = interference_samples(scn, 24, seed=28, workers=1)
        b = interference_samples(scn, 24, seed=28, workers=2)
        np.testing.assert_array_equal(a, b)

    def test_zero_density_is_silent(self):
        scn = reference_scenario(density_per_km2=0.0)
        assert np.all(interference_samples(scn, 10, seed=29) == 0.0)
