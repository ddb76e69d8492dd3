"""Gauge equivalence and the fast-oscillation experiment."""

import numpy as np
import pytest

from oracles import oscillatory_pairing_1d
from wicklab.dynamics import EquationSpec, Model, free_trajectory, mass, solve
from wicklab.gauge import (
    OscillationRow,
    default_test_function,
    frozen_pairing,
    gauge_equivalence_residual,
    gauge_transform,
    oscillation_experiment,
    rough_tail_field,
    truncation_flux,
)
from wicklab.spectral import SpectralField, TorusGrid, sobolev_norm

WICK = EquationSpec(Model.WICK, "defocusing")
CUBIC = EquationSpec(Model.CUBIC, "defocusing")


def random_field(grid, seed=0, unit_mass=True):
    rng = np.random.default_rng(seed)
    shape = (1.0 + grid.modes.astype(float) ** 2) ** (-1.0)
    f = SpectralField(grid, shape * (rng.standard_normal(grid.n_modes) + 1j * rng.standard_normal(grid.n_modes)))
    if unit_mass:
        f = SpectralField(grid, f.coeffs / np.sqrt(mass(f)))
    return f


class TestGaugeTransform:
    def test_gamma_zero_identity(self):
        g = TorusGrid(16)
        traj = solve(random_field(g), WICK, 0.1, 1e-3)
        out = gauge_transform(traj, 0.0)
        assert np.array_equal(out.coeffs, traj.coeffs)

    def test_single_mode_matches_wick_closed_form(self):
        g = TorusGrid(32)
        A, n = 1.0, 1
        u0 = SpectralField.from_modes(g, {n: A})
        plain = solve(u0, CUBIC, 1.0, 1e-3)
        gauged = gauge_transform(plain, 2.0)
        wick = solve(u0, WICK, 1.0, 1e-3)
        assert np.max(np.abs(gauged.coeffs - wick.coeffs)) < 1e-9

    def test_inverse_round_trip(self):
        g = TorusGrid(16)
        traj = solve(random_field(g, seed=1), CUBIC, 0.2, 1e-3)
        back = gauge_transform(gauge_transform(traj, 2.0), -2.0)
        assert np.max(np.abs(back.coeffs - traj.coeffs)) < 1e-14

    def test_preserves_sobolev_norms(self):
        g = TorusGrid(16)
        traj = solve(random_field(g, seed=2), CUBIC, 0.2, 1e-3)
        out = gauge_transform(traj, 1.3)
        for m in (0, 100, 200):
            for s in (-0.5, 0.0, 1.0):
                assert sobolev_norm(out.state(m), s) == pytest.approx(
                    sobolev_norm(traj.state(m), s), rel=1e-13
                )


class TestGaugeEquivalence:
    def test_zero_data(self):
        g = TorusGrid(16)
        assert gauge_equivalence_residual(SpectralField.zeros(g), 0.1, 1e-2) == 0.0

    def test_single_mode(self):
        g = TorusGrid(16)
        u0 = SpectralField.from_modes(g, {1: 1.0})
        assert gauge_equivalence_residual(u0, 1.0, 1e-3) < 1e-9

    def test_random_data_small(self):
        g = TorusGrid(64)
        u0 = random_field(g, seed=3)
        assert gauge_equivalence_residual(u0, 1.0, 1e-3) < 1e-6

    def test_fourth_order_decay_resolved_band(self):
        # order is measured where the retained interaction phases are
        # resolved (dt * phi_max < 1); larger bands enter this regime later
        g = TorusGrid(16)
        u0 = random_field(g, seed=3)
        coarse = gauge_equivalence_residual(u0, 1.0, 1.0 / 100)
        fine = gauge_equivalence_residual(u0, 1.0, 1.0 / 200)
        assert 12.0 < coarse / fine < 20.0


class TestFlux:
    def test_logarithmic_growth(self):
        values = [truncation_flux(-0.5, n) for n in (8, 16, 32, 64, 128)]
        assert all(b > a for a, b in zip(values, values[1:]))
        # partial sums of <m>^-1 grow like 2 log n
        increments = np.diff(values)
        assert increments == pytest.approx(2.0 * np.log(2.0), rel=0.05)

    def test_matches_field_mass(self):
        g = TorusGrid(128)
        u0 = rough_tail_field(g, -0.5, 32)
        assert mass(u0) == pytest.approx(truncation_flux(-0.5, 32), rel=1e-13)


class TestOscillation:
    def test_zero_test_function_pairs_to_zero(self):
        g = TorusGrid(64)
        u0 = rough_tail_field(g, -0.5, 8)
        tf = default_test_function(1.0)
        zero_tf = type(tf)(spatial_coeffs={}, window=tf.window)
        assert frozen_pairing(u0, mass(u0), zero_tf, 1.0, 1e-3) == 0.0

    def test_frozen_pairing_matches_1d_quadrature(self):
        g = TorusGrid(64)
        u0 = rough_tail_field(g, -0.5, 8)
        tf = default_test_function(1.0)
        flux = mass(u0)
        value = frozen_pairing(u0, flux, tf, 1.0, 1e-3)
        spatial = tf.spatial_pairing(u0)
        oracle = oscillatory_pairing_1d(tf.window, spatial, 2.0 * flux, 0.0, 1.0)
        assert value == pytest.approx(oracle, rel=1e-8)

    def test_frozen_pairing_decays_with_flux(self):
        g = TorusGrid(64)
        u0 = rough_tail_field(g, -0.5, 8)
        tf = default_test_function(2.0)
        small = frozen_pairing(u0, 5.0, tf, 2.0, 1e-3)
        large = frozen_pairing(u0, 20.0, tf, 2.0, 1e-3)
        assert large < 0.1 * small

    def test_pairing_invariant_under_global_phase(self):
        g = TorusGrid(64)
        u0 = rough_tail_field(g, -0.5, 8)
        rotated = SpectralField(g, u0.coeffs * np.exp(1.1j))
        tf = default_test_function(1.0)
        a = frozen_pairing(u0, mass(u0), tf, 1.0, 1e-3)
        b = frozen_pairing(rotated, mass(rotated), tf, 1.0, 1e-3)
        assert a == pytest.approx(b, rel=1e-12)

    def test_experiment_small_cutoffs(self):
        rows = oscillation_experiment(cutoffs=(4, 8), T=0.5)
        assert [r.cutoff for r in rows] == [4, 8]
        assert rows[1].flux > rows[0].flux
        assert all(isinstance(r, OscillationRow) and r.pairing_abs >= 0 for r in rows)

    def test_flux_monotone_for_any_tail(self):
        for tail in (-0.5, -0.45, -0.4):
            values = [truncation_flux(tail, n) for n in (4, 8, 16, 32)]
            assert all(b > a for a, b in zip(values, values[1:]))

    def test_tail_validation(self):
        with pytest.raises(ValueError):
            oscillation_experiment(tail_exponent=-0.8, cutoffs=(4,), T=0.25)
        with pytest.raises(ValueError):
            oscillation_experiment(cutoffs=(8, 4), T=0.25)
