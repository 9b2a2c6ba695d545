import math

import numpy as np
import pytest

from breather_forge import (BlowUpError, GridSpec, InsufficientTailError,
                            MixedPotentialError, PotentialSpec, SpectralField,
                            WeightSpec, boundary_floor, bounds_report,
                            classical_residual, decay_rate_fit,
                            fit_decay_profile, initial_conditions,
                            integrate_trajectory, norm_comparison,
                            strong_residual, synthesize,
                            weighted_profile_norm, x0_norm, zero_field,
                            max_amplitude_profile)

from conftest import QUARTIC


def test_bounds_arithmetic_flagship_point():
    report = bounds_report(math.sqrt(12.0), WeightSpec(0.0), QUARTIC, 0.0)
    # base (12 - 4) / (3 * 2) = 4/3 with exponents 1/2 and 1/3
    assert report.r_max == pytest.approx((4.0 / 3.0) ** 0.5, abs=1e-15)
    assert report.r_crit == pytest.approx((4.0 / 3.0) ** (1.0 / 3.0), abs=1e-15)
    assert report.nonres0_ok and report.nonres_ok
    assert report.r_crit < report.r_max


def test_bounds_weak_frequency_flags():
    report = bounds_report(math.sqrt(8.0), WeightSpec(0.0), QUARTIC, 0.5)
    assert report.nonres0_ok
    assert not report.nonres_ok  # 8 < 4 + 6
    assert report.r_crit > report.r_max
    assert report.in_ring is None


def test_bounds_monotone_in_decay_rate():
    values = [bounds_report(3.0, WeightSpec(lam), QUARTIC, 0.0).r_max
              for lam in np.linspace(0.0, 12.0, 13)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] < 0.2 * values[0]


def test_bounds_double_when_coupling_halves():
    # alpha = 1 (cubic): r_max scales like 1/kbar
    big = bounds_report(3.0, WeightSpec(0.0), PotentialSpec(cubic=1.0), 0.0)
    small = bounds_report(3.0, WeightSpec(0.0), PotentialSpec(cubic=0.5), 0.0)
    assert small.r_max == pytest.approx(2.0 * big.r_max, rel=1e-14)


def test_bounds_agree_with_direct_formula_on_grid():
    for omega in np.linspace(2.05, 4.0, 6):
        for lam in np.linspace(0.0, 2.0, 5):
            report = bounds_report(omega, WeightSpec(lam), QUARTIC, 0.0)
            base = (omega**2 - 4.0) / (3.0 * math.sqrt(2.0 * (1.0 + math.cosh(lam))))
            assert report.r_max == pytest.approx(base ** 0.5, rel=1e-14)
            assert report.r_crit == pytest.approx(base ** (1.0 / 3.0), rel=1e-14)


def test_bounds_reject_mixed_potential():
    with pytest.raises(MixedPotentialError):
        bounds_report(3.0, WeightSpec(0.0), PotentialSpec(cubic=1.0, quartic=1.0), 0.0)


def test_bounds_harmonic_limit_is_unbounded():
    report = bounds_report(3.0, WeightSpec(0.0), PotentialSpec(), 0.0)
    assert math.isinf(report.r_max) and math.isinf(report.r_crit)


def test_decay_fit_exact_exponential():
    sites = np.arange(64) - 32
    amp = np.exp(-0.7 * np.abs(sites))
    lam_eff, r2 = fit_decay_profile(amp, center=0.0)
    assert lam_eff == pytest.approx(0.7, abs=1e-10)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_decay_fit_flat_profile_fails():
    with pytest.raises(InsufficientTailError):
        fit_decay_profile(np.ones(64), center=0.0)


def test_decay_fit_narrow_window_fails():
    sites = np.arange(8) - 4
    with pytest.raises(InsufficientTailError):
        fit_decay_profile(np.exp(-0.1 * np.abs(sites)), center=0.0)


def test_decay_rate_fit_on_flagship(flagship_result):
    lam_eff, r2 = decay_rate_fit(flagship_result)
    assert lam_eff > 0.0
    assert r2 >= 0.999
    # the weighted profile norm stays finite for every lam < 2 * lam_eff
    profile = max_amplitude_profile(flagship_result.field)
    for lam in (0.5 * lam_eff, 1.2 * lam_eff, 1.8 * lam_eff):
        value = weighted_profile_norm(profile, WeightSpec(lam))
        assert math.isfinite(value)
    # direct summation oracle: the tail terms decay geometrically
    sites = np.arange(64) - 32
    terms = np.exp(1.8 * lam_eff * np.abs(sites)) * profile**2
    tail = terms[np.abs(sites) > 20]
    assert np.all(tail[:-1] * np.exp(-0.1) > tail[1:] * 0.0)  # finite, no overflow
    assert float(np.sum(terms)) < math.inf


def test_decay_rate_fit_needs_convergence(flagship_result):
    from dataclasses import replace
    broken = replace(flagship_result, status="max_iter")
    with pytest.raises(ValueError, match="converged"):
        decay_rate_fit(broken)


def test_strong_residual_cases(flagship_result):
    grid = GridSpec(32, 8, 66, 2.5)
    assert strong_residual(zero_field(grid), QUARTIC) == 0.0
    rng = np.random.default_rng(8)
    noise = SpectralField(grid, rng.standard_normal((32, 8)) + 0j)
    assert strong_residual(noise, QUARTIC) > 0.0
    res = flagship_result
    assert res.strong_residual <= 10.0 * 1e-10 * res.x2_norm


def test_classical_residual_flagship(flagship_result):
    assert classical_residual(flagship_result.field, QUARTIC) <= 1e-8


def test_initial_conditions_solve_velocity_relation(flagship_result):
    field = flagship_result.field
    x0, y0 = initial_conditions(field)
    # x(0) equals the synthesized sample row at t = 0
    assert np.allclose(x0, synthesize(field)[:, 0], atol=1e-13)
    # y reproduces xdot via the canonical coupling at t = 0
    grid = field.grid
    m = grid.harmonics
    xdot0 = 2.0 * np.sum(np.real(1j * grid.omega * m[None, :] * field.coeffs), axis=1)
    relation = 2.0 * y0 - np.roll(y0, -1) - np.roll(y0, 1)
    assert np.allclose(relation, xdot0, atol=1e-12)


def test_integrate_zero_field_has_zero_drifts():
    report = integrate_trajectory(zero_field(GridSpec(32, 8, 66, 2.5)),
                                  QUARTIC, 2, 128)
    assert report.energy_drift == 0.0
    assert report.momentum_drift == 0.0
    assert report.period_return_error == 0.0
    assert report.dt * 128 == pytest.approx(2.0 * math.pi / 2.5, rel=1e-15)


def test_integrate_rejects_coarse_grids():
    with pytest.raises(ValueError):
        integrate_trajectory(zero_field(GridSpec(32, 8, 66, 2.5)), QUARTIC, 1, 32)


def test_integrator_order_on_phonon_standing_wave():
    # band-edge standing wave of the harmonic lattice: x_n = (-1)^n a cos(2t)
    grid = GridSpec(32, 8, 66, 2.0)
    coeffs = np.zeros((32, 8), dtype=complex)
    coeffs[:, 0] = 0.05 * (-1.0) ** np.abs(grid.sites) / 2.0
    field = SpectralField(grid, coeffs)
    harmonic = PotentialSpec()
    coarse = integrate_trajectory(field, harmonic, 1, 128)
    fine = integrate_trajectory(field, harmonic, 1, 256)
    ratio = coarse.period_return_error / fine.period_return_error
    assert 3.5 <= ratio <= 4.5
    assert fine.period_return_error < coarse.period_return_error < 1e-2


def test_long_run_drifts_stay_bounded(flagship_result):
    # 100 periods at fixed dt: symplectic energy error stays bounded at the
    # dt^2 scale instead of growing secularly; momentum telescopes to
    # round-off regardless
    report = integrate_trajectory(flagship_result.field, QUARTIC, 100, 256)
    assert report.energy_drift <= 1e-6
    assert report.momentum_drift <= 1e-12


def test_trajectory_blow_up_detected():
    # soft quartic potential is unbounded below; a large kick escapes
    grid = GridSpec(32, 8, 66, 2.5)
    coeffs = np.zeros((32, 8), dtype=complex)
    coeffs[16, 0] = 4.0
    field = SpectralField(grid, coeffs)
    with pytest.raises(BlowUpError):
        integrate_trajectory(field, PotentialSpec(quartic=-1.0), 5, 128)


def test_boundary_floor(flagship_result):
    assert boundary_floor(flagship_result.field) <= 1e-10
    assert boundary_floor(zero_field(GridSpec(32, 8, 66, 2.5))) == 0.0


def test_norm_comparison_report(flagship_result, flagship_even_result):
    report = norm_comparison(flagship_even_result, flagship_result)
    assert math.isfinite(report.even_norm) and math.isfinite(report.odd_norm)
    assert report.difference == report.even_norm - report.odd_norm
    print(f"weighted-norm ordering: odd {report.odd_norm:.6f} vs even "
          f"{report.even_norm:.6f} (odd_below_even = {report.odd_below_even})")


def test_norm_comparison_identical_inputs(flagship_result):
    report = norm_comparison(flagship_result, flagship_result)
    assert report.difference == 0.0


def test_norm_comparison_refuses_bad_inputs(flagship_result):
    from dataclasses import replace
    broken = replace(flagship_result, status="diverged")
    with pytest.raises(ValueError, match="converged"):
        norm_comparison(flagship_result, broken)
    other = replace(flagship_result, omega=2.5)
    with pytest.raises(ValueError, match="frequency"):
        norm_comparison(other, flagship_result)
