import math

import numpy as np
import pytest

from qkbounds import (
    PI_0,
    PI_1,
    SIGMA_Z,
    LevelSet,
    NonPositiveTemperature,
    ObservableSpectrum,
    StateClass,
    ThermalModel,
    band_structure,
    classify,
    figure3_curve,
    figure4_curve,
    level_populations,
    make_spectrum,
    random_observable,
    spin_bath_levels,
    surpass_ckb,
    thermal_spectrum,
    thermal_surpass,
)

TWO_LEVEL = LevelSet((0.5, -0.5), (1, 1))


class TestThermalSpectrum:
    def test_two_level_boltzmann(self):
        s = thermal_spectrum(ThermalModel(TWO_LEVEL, 1.0))
        z = math.exp(-0.5) + math.exp(0.5)
        assert s.values == pytest.approx(
            (math.exp(-0.5) / z, math.exp(0.5) / z), abs=1e-15
        )
        assert s.values == pytest.approx((0.268941, 0.731059), abs=1e-6)

    def test_infinite_temperature_is_maximally_mixed(self):
        s = thermal_spectrum(ThermalModel(TWO_LEVEL, 0.0))
        assert classify(s) is StateClass.MAXIMALLY_MIXED

    def test_zero_temperature_is_ground_state(self):
        s = thermal_spectrum(ThermalModel(TWO_LEVEL, math.inf))
        assert classify(s) is StateClass.PURE
        degenerate_ground = LevelSet((1.0, 0.0), (1, 3))
        s = thermal_spectrum(ThermalModel(degenerate_ground, math.inf))
        assert s.values == (0.0, 1 / 3, 1 / 3, 1 / 3)

    def test_multiplicity_expansion(self):
        levels = LevelSet((1.0, 0.0, -1.0), (1, 2, 1))
        s = thermal_spectrum(ThermalModel(levels, 1.0))
        z = math.exp(-1.0) + 2.0 + math.exp(1.0)
        assert s.values == pytest.approx(
            tuple(sorted([math.exp(-1) / z, 1 / z, 1 / z, math.exp(1) / z])), abs=1e-15
        )

    def test_large_scale_does_not_overflow(self):
        s = thermal_spectrum(ThermalModel(LevelSet((500.0, -500.0), (1, 1)), 10.0))
        assert s.values[1] == pytest.approx(1.0, abs=1e-12)

    def test_negative_scale_rejected(self):
        with pytest.raises(NonPositiveTemperature):
            ThermalModel(TWO_LEVEL, -1.0)


class TestSpinBath:
    def test_two_spins(self):
        levels = spin_bath_levels(2)
        assert levels.energies == (-1.0, 0.0, 1.0)
        assert levels.multiplicities == (1, 2, 1)

    def test_single_spin(self):
        levels = spin_bath_levels(1)
        assert levels.energies == (-0.5, 0.5)
        assert levels.multiplicities == (1, 1)

    def test_ten_spins(self):
        levels = spin_bath_levels(10)
        assert len(levels.energies) == 11
        assert levels.dim == 1024

    def test_odd_spin_count_half_integer_levels(self):
        levels = spin_bath_levels(3)
        assert levels.energies == (-1.5, -0.5, 0.5, 1.5)
        assert levels.multiplicities == (1, 3, 3, 1)


class TestThermalSurpass:
    def test_two_level_plant_threshold(self):
        # bath of M spins beats the classical bound exactly when
        # M * lambda_c > lambda_s
        lam_s = 1.0
        for m_spins in (1, 2, 5, 10):
            bath = spin_bath_levels(m_spins)
            for lam_c in (0.3 / m_spins, 0.9999 / m_spins, 1.0001 / m_spins, 3.0 / m_spins):
                expected = m_spins * lam_c > lam_s
                got = thermal_surpass(TWO_LEVEL, 1.0 / lam_s, bath, 1.0 / lam_c, SIGMA_Z)
                assert got == expected

    def test_two_spin_plant_middle_projector_always_surpasses(self):
        levels = LevelSet((1.0, 0.0, -1.0), (1, 2, 1))
        bath = spin_bath_levels(10)
        for t_c in (0.1, 1.0, 100.0, 1e6):
            assert thermal_surpass(levels, 1.0, bath, t_c, PI_0)

    def test_infinite_controller_temperature_never_surpasses(self):
        levels = LevelSet((1.0, 0.0, -1.0), (1, 2, 1))
        bath = spin_bath_levels(10)
        assert not thermal_surpass(levels, 1.0, bath, math.inf, PI_1)
        assert not thermal_surpass(levels, 1.0, bath, math.inf, PI_0)

    def test_nonpositive_temperature_rejected(self):
        with pytest.raises(NonPositiveTemperature):
            thermal_surpass(TWO_LEVEL, 0.0, spin_bath_levels(2), 1.0, SIGMA_Z)
        with pytest.raises(NonPositiveTemperature):
            thermal_surpass(TWO_LEVEL, 1.0, spin_bath_levels(2), -2.0, SIGMA_Z)

    def test_agrees_with_spectral_form(self):
        # frequency-domain and spectral-domain predicates on random level
        # data; temperatures bounded away from extremes so populations are
        # well above the zero threshold
        rng = np.random.default_rng(8)
        hits = 0
        for _ in range(1000):
            n_s = int(rng.integers(2, 5))
            n_levels_c = int(rng.integers(2, 5))
            sys_levels = LevelSet(tuple(rng.uniform(-2, 2, n_s)), (1,) * n_s)
            ctrl_levels = LevelSet(tuple(rng.uniform(-2, 2, n_levels_c)), (1,) * n_levels_c)
            t_s, t_c = rng.uniform(0.4, 2.5, 2)
            obs = random_observable(rng, n_s)
            freq = thermal_surpass(sys_levels, t_s, ctrl_levels, t_c, obs)
            spec = surpass_ckb(
                thermal_spectrum(ThermalModel(sys_levels, 1.0 / t_s)),
                thermal_spectrum(ThermalModel(ctrl_levels, 1.0 / t_c)),
                obs,
            )
            assert freq == spec.upper
            hits += freq
        assert 0 < hits < 1000

    def test_bandwidth_matches_energy_width_over_temperature(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            n = int(rng.integers(2, 6))
            levels = LevelSet(tuple(rng.uniform(-3, 3, n)), (1,) * n)
            t_c = float(rng.uniform(0.3, 4.0))
            ctrl = thermal_spectrum(ThermalModel(levels, 1.0 / t_c))
            sys_s = make_spectrum([0.4, 0.6])
            obs = SIGMA_Z
            width = (max(levels.energies) - min(levels.energies)) / t_c
            b = band_structure(sys_s, ctrl, obs)
            assert b.bandwidth == pytest.approx(width, abs=1e-10)


class TestFigure3:
    def test_classical_region_flat_at_tanh(self):
        points = figure3_curve(1.0, 10, [0.0, 0.05, 0.1])
        for pt in points:
            assert pt.ckb_max == pytest.approx(math.tanh(0.5), abs=1e-12)
            assert abs(pt.gap_to_ckb) <= 1e-12

    def test_zero_controller_scale_sits_on_classical_bound(self):
        (pt,) = figure3_curve(1.0, 4, [0.0])
        assert pt.j_max == pytest.approx(pt.ckb_max, abs=1e-12)

    def test_asymptote_toward_observable_maximum(self):
        (pt,) = figure3_curve(1.0, 10, [5.0])
        assert pt.j_max > 0.99

    def test_symmetry_of_bounds(self):
        points = figure3_curve(1.0, 10, list(np.linspace(0.0, 2.0, 100)))
        for pt in points:
            assert abs(pt.j_max + pt.j_min) <= 1e-12

    def test_monotone_in_controller_scale(self):
        points = figure3_curve(1.0, 6, list(np.linspace(0.0, 2.0, 200)))
        for a, b in zip(points, points[1:]):
            assert b.j_max >= a.j_max - 1e-12

    def test_larger_bath_dominates(self):
        grid = list(np.linspace(0.05, 2.0, 50))
        small = figure3_curve(1.0, 2, grid)
        large = figure3_curve(1.0, 10, grid)
        for a, b in zip(small, large):
            assert b.j_max >= a.j_max - 1e-12

    def test_threshold_location(self):
        for m_spins in (2, 10):
            thr = 1.0 / m_spins
            below, at, above = figure3_curve(1.0, m_spins, [thr / 2, thr, thr + 0.01])
            assert abs(below.gap_to_ckb) <= 1e-12
            assert abs(at.gap_to_ckb) <= 1e-12
            assert above.gap_to_ckb > 1e-9


class TestFigure4:
    def test_middle_projector_always_above_classical(self):
        points = figure4_curve(1.0, 10, "Pi0", list(np.linspace(0.0, 1.0, 100)))
        for pt in points:
            if pt.lambda_c > 1e-3:
                assert pt.gap_to_ckb > 0.0

    def test_top_projector_threshold(self):
        points = figure4_curve(1.0, 10, "Pi1", list(np.linspace(0.0, 1.0, 101)))
        for pt in points:
            if pt.lambda_c <= 0.1:
                assert abs(pt.gap_to_ckb) <= 1e-12
            if pt.lambda_c >= 0.11:
                assert pt.gap_to_ckb > 0.0

    def test_top_projector_classical_bound_value(self):
        (pt,) = figure4_curve(1.0, 10, "Pi1", [0.05])
        z = math.exp(-1.0) + 2.0 + math.exp(1.0)
        assert pt.ckb_max == pytest.approx(math.exp(1.0) / z, abs=1e-12)
        assert pt.ckb_max == pytest.approx(0.534447, abs=1e-6)

    def test_unknown_projector_rejected(self):
        with pytest.raises(Exception):
            figure4_curve(1.0, 10, "Pi2", [0.1])


class TestLevelPopulations:
    def test_grouped_weights_sum_to_dimension(self):
        bath = spin_bath_levels(10)
        groups = level_populations(bath, 0.7)
        assert sum(m for _, m in groups) == 1024
        assert math.fsum(p * m for p, m in groups) == pytest.approx(1.0, abs=1e-12)

    def test_grouped_equals_expanded(self):
        levels = LevelSet((0.3, -0.2, 1.1), (2, 1, 3))
        lam = 1.3
        grouped = level_populations(levels, lam)
        expanded = thermal_spectrum(ThermalModel(levels, lam))
        rebuilt = []
        for p, m in grouped:
            rebuilt.extend([p] * m)
        assert tuple(sorted(rebuilt)) == pytest.approx(expanded.values, abs=1e-15)
