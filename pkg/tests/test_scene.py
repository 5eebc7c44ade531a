import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ambit_channel as ac
from ambit_channel.errors import ConfigurationError, ParameterDomainError

V0 = 40.0 / 3.6


class TestDeriveGeometry:
    def test_reference_scenario(self):
        radius, density = ac.derive_geometry(100.0, 100.0, V0)
        assert radius == pytest.approx(7.074, abs=5e-4)
        assert density == pytest.approx(0.6362, abs=5e-5)

    def test_unit_radius_fixed_point(self):
        # N_s = pi^2, R_s = 2 pi, v0 = 1 solves to R = 1, density = pi
        radius, density = ac.derive_geometry(math.pi ** 2, 2.0 * math.pi, 1.0)
        assert radius == pytest.approx(1.0, rel=1e-12)
        assert density == pytest.approx(math.pi, rel=1e-12)

    def test_scaling_counts_together_leaves_radius(self):
        r1, d1 = ac.derive_geometry(100.0, 100.0, V0)
        r2, d2 = ac.derive_geometry(5000.0, 5000.0, V0)
        assert r2 == pytest.approx(r1, rel=1e-12)
        assert r2 == pytest.approx(7.074, abs=5e-4)
        assert d2 == pytest.approx(31.81, abs=5e-3)
        assert d2 == pytest.approx(50.0 * d1, rel=1e-12)

    @pytest.mark.parametrize("bad", [(0.0, 1.0, 1.0), (1.0, -2.0, 1.0),
                                     (1.0, 1.0, 0.0)])
    def test_rejects_non_positive(self, bad):
        with pytest.raises(ParameterDomainError):
            ac.derive_geometry(*bad)

    @given(n_s=st.floats(1e-3, 1e4), r_s=st.floats(1e-3, 1e4),
           v0=st.floats(1e-3, 1e3))
    @settings(deadline=None, max_examples=200)
    def test_roundtrip_satisfies_both_relations(self, n_s, r_s, v0):
        radius, density = ac.derive_geometry(n_s, r_s, v0)
        assert math.sqrt(n_s / (density * math.pi)) == pytest.approx(
            radius, rel=1e-9)
        assert r_s / (2.0 * radius * v0) == pytest.approx(density, rel=1e-9)


class TestDistances:
    def test_pythagorean_triple(self):
        assert ac.euclidean_distance(0, 0, 3, 4) == 5.0

    def test_identity(self):
        assert ac.euclidean_distance(2.5, -7.1, 2.5, -7.1) == 0.0

    def test_base_station_to_origin_offset(self):
        d = ac.euclidean_distance(-100.0, 20.0, 0.0, 5.0)
        assert d == pytest.approx(math.sqrt(10225.0), rel=1e-12)
        assert d == pytest.approx(101.1187, abs=1e-4)

    def test_propagation_two_segments(self, default_geo, default_traj):
        d = ac.propagation_distance(default_geo, default_traj, 0.0, 0.0, 5.0)
        assert d == pytest.approx(math.sqrt(10225.0) + 5.0, rel=1e-12)

    def test_propagation_scatterer_at_mobile(self, default_geo, default_traj):
        d = ac.propagation_distance(default_geo, default_traj, 0.0, 0.0, 0.0)
        assert d == pytest.approx(
            ac.euclidean_distance(-100.0, 20.0, 0.0, 0.0), rel=1e-15)

    def test_propagation_at_later_time(self, default_geo, default_traj):
        d = ac.propagation_distance(default_geo, default_traj, 1.0,
                                    V0 * 1.0, 5.0)
        expected = math.hypot(-100.0 - V0, 20.0 - 5.0) + 5.0
        assert d == pytest.approx(expected, rel=1e-12)

    @given(t=st.floats(0.0, 10.0), sx=st.floats(-50.0, 150.0),
           sy=st.floats(-50.0, 50.0))
    @settings(deadline=None, max_examples=200)
    def test_triangle_inequality(self, default_geo, default_traj, t, sx, sy):
        mu_x, mu_y = ac.mu_position(default_traj, t)
        los = ac.euclidean_distance(default_geo.bs_x_m, default_geo.bs_y_m,
                                    mu_x, mu_y)
        assert ac.propagation_distance(default_geo, default_traj, t, sx, sy) \
            >= los - 1e-9


class TestTrajectory:
    def test_initial_position(self):
        traj = ac.TrajectoryModel(V0, 0.0, initial_y_m=-3.0)
        assert ac.mu_position(traj, 0.0) == (0.0, -3.0)

    def test_constant_velocity(self):
        traj = ac.TrajectoryModel(V0)
        x, y = ac.mu_position(traj, 2.0)
        assert x == pytest.approx(2.0 * V0, rel=1e-15)
        assert y == 0.0

    def test_uniform_acceleration(self):
        traj = ac.TrajectoryModel(10.0, 2.0)
        x, _ = ac.mu_position(traj, 3.0)
        assert x == pytest.approx(39.0, rel=1e-15)

    def test_negative_speed_horizon_rejected(self):
        traj = ac.TrajectoryModel(1.0, -1.0)
        with pytest.raises(ConfigurationError):
            ac.mu_position(traj, 2.0)
        with pytest.raises(ConfigurationError):
            traj.validate_horizon(2.0)
        traj.validate_horizon(0.5)

    def test_negative_initial_speed_rejected(self):
        with pytest.raises(ParameterDomainError):
            ac.TrajectoryModel(-1.0)


class TestChannelParams:
    def test_wave_number_and_wavelength_relations(self, params):
        lam = ac.LIGHT_SPEED_M_PER_S / 2.6e9
        assert params.wavelength_m == pytest.approx(lam, rel=1e-12)
        assert params.wave_number_per_m == pytest.approx(
            2.0 * math.pi / lam, rel=1e-12)

    def test_isotropic_gain_default(self, params):
        expected = (params.wavelength_m / (4.0 * math.pi)) ** 2
        assert params.ref_gain_scatter == pytest.approx(expected, rel=1e-12)
        assert params.ref_gain_los == pytest.approx(expected, rel=1e-12)

    def test_inconsistent_wavelength_rejected(self):
        with pytest.raises(ConfigurationError):
            ac.ChannelParams(2.6e9, 0.2, 2.0 * math.pi / 0.2, 1.7, 1.0, 1.0)


class TestGridSpec:
    def test_floor_index_bounds(self, default_geo):
        grid = ac.GridSpec.build(1e-3, 0.25, 1e-8, 1e-6, 4.0,
                                 default_geo.disc_radius_m, V0)
        radius = default_geo.disc_radius_m
        assert grid.m_half == math.floor(radius / 0.25)
        assert grid.n_half == math.floor(radius / (V0 * 1e-3))
        assert grid.p_count == 4000
        assert grid.d_count == 100

    def test_covering_guard_on_near_integer_ratio(self):
        # pitch almost divides the radius: the offset range must still cover
        # the rim cell, so the count steps up by one
        grid = ac.GridSpec.build(1.0, 1.0, 1e-9, 1e-6, 10.0,
                                 disc_radius_m=5.0 - 1e-9,
                                 initial_speed_m_per_s=1.0)
        assert grid.n_half == 5
        assert grid.m_half == 5

    @given(dt=st.floats(1e-4, 1e-2), dtau=st.floats(1e-10, 1e-7))
    @settings(deadline=None, max_examples=100)
    def test_halving_steps_at_least_doubles_counts(self, default_geo, dt, dtau):
        g1 = ac.GridSpec.build(dt, 0.25, dtau, 1e-5, 2.0,
                               default_geo.disc_radius_m, V0)
        g2 = ac.GridSpec.build(dt / 2.0, 0.25, dtau / 2.0, 1e-5, 2.0,
                               default_geo.disc_radius_m, V0)
        assert g2.p_count >= 2 * g1.p_count
        assert g2.d_count >= 2 * g1.d_count

    def test_rejects_non_positive_steps(self, default_geo):
        with pytest.raises(ParameterDomainError):
            ac.GridSpec.build(0.0, 0.25, 1e-8, 1e-6, 1.0,
                              default_geo.disc_radius_m, V0)


class TestSceneGeometry:
    def test_cross_relation_validation(self, default_geo):
        default_geo.validate(V0)
        skewed = ac.SceneGeometry(-100.0, 20.0, default_geo.disc_radius_m,
                                  default_geo.scatterer_density_per_m2,
                                  default_geo.mean_path_count * 1.5,
                                  default_geo.path_arrival_rate_per_s)
        with pytest.raises(ConfigurationError):
            skewed.validate(V0)

    def test_from_disc_implies_path_stats(self):
        geo = ac.SceneGeometry.from_disc(-100.0, 20.0, 10.0, 0.3, V0)
        assert geo.mean_path_count == pytest.approx(0.3 * math.pi * 100.0)
        geo.validate(V0)

    def test_max_propagation_delay_bound(self, default_geo, default_traj):
        grid = ac.GridSpec.build(1e-3, 0.25, 1e-8, 1e-6, 1.0,
                                 default_geo.disc_radius_m, V0)
        bound = ac.max_propagation_delay_s(default_geo, default_traj, grid)
        worst_leg = math.hypot(100.0 + (grid.p_count - 1) * V0 * 1e-3,
                               20.0 + grid.m_half * 0.25)
        expected = (worst_leg + default_geo.disc_radius_m) \
            / ac.LIGHT_SPEED_M_PER_S
        assert bound == pytest.approx(expected, rel=1e-12)
