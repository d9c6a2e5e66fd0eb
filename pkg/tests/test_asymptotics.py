"""Closed-form limits against their exact counterparts.

Frozen reference numbers in this file were produced by independent
brute-force quadrature (plain trapezoid sums over oversized momentum
windows, refined until stable to 1e-10) and are trusted to the printed
digits.
"""

import math

import numpy as np
import pytest

from spinmeter import (
    ERGODIC,
    GAUSSIAN,
    INTERMEDIATE,
    MIXED,
    POWER_LAW,
    ZENO,
    RegimeThresholds,
    SimParams,
    SpatialGrid,
    SpinTrace,
    classify_regime,
    ergodic_wavefunction,
    evolve_momentum,
    field_aligned_spinors,
    fit_decoherence,
    i_asymptotic,
    kernel_xi,
    oscillatory_I,
    position_density,
    reduced_density_matrix,
    sigma_z_limit,
    stationary_points,
    steady_state_rho,
    xi_saddle,
)

# (delta_x, theta) -> dephased sigma_z limit, brute trapezoid reference
SIGMA_Z_LIMIT_TABLE = {
    (10.0, math.pi / 3): 0.2502138132,
    (0.05, math.pi / 3): 0.9475710075,
    (2.0, math.pi / 2): 0.1572615414,
    (0.05, math.pi / 2): 0.9397579964,
    (0.05, math.pi / 6): 0.9693107004,
    (1.0, math.pi / 3): 0.4278802425,
    (10.0, math.pi / 6): 0.7449292953,
    (2.0, math.pi / 3): 0.2984470004,
    (0.1, math.pi / 3): 0.8986890919,
}


def test_sigma_z_limit_frozen_values():
    for (dx, th), expected in SIGMA_Z_LIMIT_TABLE.items():
        assert sigma_z_limit(dx, th) == pytest.approx(expected, abs=1e-8)


def test_sigma_z_limit_narrow_packet_expansion():
    # small-width expansion: 1 - sqrt(pi/2) sin(theta) dx + sin^2(theta) dx^2
    dx = 0.01
    for theta in (math.pi / 6, math.pi / 3, math.pi / 2):
        st = math.sin(theta)
        expansion = 1.0 - math.sqrt(math.pi / 2.0) * st * dx + (st * dx) ** 2
        assert sigma_z_limit(dx, theta) == pytest.approx(expansion, abs=1e-4)


def test_sigma_z_limit_zeno_lower_bound():
    # measured constant is sqrt(pi/2) sin(theta) <= 1.26, well under 2
    for dx in (0.01, 0.02, 0.05, 0.1):
        for theta in (math.pi / 6, math.pi / 3, math.pi / 2):
            assert sigma_z_limit(dx, theta) >= 1.0 - 2.0 * dx


def test_sigma_z_limit_validation():
    with pytest.raises(ValueError):
        sigma_z_limit(0.0, 1.0)


def test_oscillatory_integral_frozen_value():
    value = oscillatory_I(3.0, math.pi / 3, 30.0)
    assert abs(value) == pytest.approx(0.1144630857, abs=1e-8)


def test_oscillatory_integral_conjugate_signs():
    plus = oscillatory_I(2.0, 1.0, 4.0, sign=+1)
    minus = oscillatory_I(2.0, 1.0, 4.0, sign=-1)
    assert plus == pytest.approx(minus.conjugate(), abs=1e-10)


def test_oscillatory_integral_validation():
    with pytest.raises(ValueError):
        oscillatory_I(1.0, 0.0, 5.0)
    with pytest.raises(ValueError):
        oscillatory_I(1.0, math.pi, 5.0)
    with pytest.raises(ValueError):
        oscillatory_I(1.0, 1.0, 5.0, sign=2)


def test_i_asymptotic_calibrated_at_reference():
    dx, th = 3.0, math.pi / 3
    t_ref = 10.0 * dx
    assert i_asymptotic(dx, th, t_ref) == pytest.approx(
        abs(oscillatory_I(dx, th, t_ref)), rel=1e-12)
    # shape tracks the exact integral away from the calibration point
    for t in (15.0, 60.0, 150.0):
        ratio = abs(oscillatory_I(dx, th, t)) / i_asymptotic(dx, th, t)
        assert 0.5 < ratio < 2.0


def test_i_asymptotic_power_branch_at_square_field():
    # theta = pi/2 kills the Gaussian factor; envelope ~ (dx^4 + 4 t^2)^(-1/4)
    dx = 2.0
    r1 = i_asymptotic(dx, math.pi / 2, 50.0) / i_asymptotic(dx, math.pi / 2, 200.0)
    assert r1 == pytest.approx((4.0 * 200.0**2 + dx**4) ** 0.25
                               / (4.0 * 50.0**2 + dx**4) ** 0.25, rel=1e-12)


def test_stationary_points():
    plus, minus = stationary_points(10.0, math.pi / 3)
    assert plus == pytest.approx(5.0)
    assert minus == pytest.approx(-5.0)
    with pytest.raises(ValueError):
        stationary_points(0.0, 1.0)


def test_xi_saddle_matches_exact_kernel():
    """Relative L2 error of the saddle form inside |x| <= 0.8 t at t = 20."""
    t, theta = 20.0, math.pi / 3
    x = np.linspace(-0.8 * t, 0.8 * t, 1601)
    exact = kernel_xi(x, t, theta).regular
    saddle = xi_saddle(x, t, theta)
    assert np.all(np.isfinite(saddle))

    def rel_l2(i, j):
        num = np.sqrt(np.mean(np.abs(saddle[:, i, j] - exact[:, i, j]) ** 2))
        return num / np.sqrt(np.mean(np.abs(exact[:, i, j]) ** 2))

    assert rel_l2(0, 0) < 0.05
    assert rel_l2(1, 1) < 0.05
    assert rel_l2(0, 1) < 0.05


def test_xi_saddle_validity_mask_and_errors():
    out = xi_saddle(np.array([0.0, 19.5]), 20.0, 1.0)
    assert np.all(np.isfinite(out[0]))
    assert np.all(np.isnan(out[1]))  # beyond 0.95 t
    assert xi_saddle(0.0, 20.0, 1.0).shape == (2, 2)
    with pytest.raises(ValueError):
        xi_saddle(0.0, 3.0, 1.0)
    with pytest.raises(ValueError):
        xi_saddle(25.0, 20.0, 1.0)


def test_steady_state_rho_structure():
    theta = math.pi / 3
    rho = steady_state_rho(theta)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-14)
    along, against = field_aligned_spinors(theta)
    w_along = (along.conj() @ rho @ along).real
    w_against = (against.conj() @ rho @ against).real
    assert w_along == pytest.approx(math.cos(theta / 2.0) ** 2, abs=1e-14)
    assert w_against == pytest.approx(math.sin(theta / 2.0) ** 2, abs=1e-14)


def test_steady_state_rho_matches_late_dynamics():
    params = SimParams.for_time_horizon(math.pi / 3, 10.0, 60.0)
    late = reduced_density_matrix(params, 60.0)
    assert np.abs(late - steady_state_rho(math.pi / 3)).max() < 0.01


def test_ergodic_wavefunction_against_exact():
    """Two-Gaussian form: norm, packet positions, and spin-resolved weights."""
    theta, delta_x, t = math.pi / 3, 10.0, 60.0
    params = SimParams.for_time_horizon(theta, delta_x, t)
    approx = ergodic_wavefunction(params.x_grid, t, theta, delta_x)
    assert approx.total_norm() == pytest.approx(1.0, abs=5e-3)

    exact = evolve_momentum(params, t)
    dens_a = position_density(approx)
    dens_e = position_density(exact)
    # density agreement at the two packet centers x = +-t cos(theta)
    for target in (t * math.cos(theta), -t * math.cos(theta)):
        i = int(np.argmin(np.abs(exact.x - target)))
        assert dens_a[i] == pytest.approx(dens_e[i], rel=0.1)
    # each packet carries the field-axis projection weight
    mid = int(np.argmin(np.abs(exact.x)))
    w_plus = np.trapezoid(dens_a[mid:], dx=approx.grid.spacing)
    assert w_plus == pytest.approx(math.cos(theta / 2.0) ** 2, abs=0.02)


def test_ergodic_wavefunction_warns_out_of_range():
    grid = SpatialGrid(-10.0, 10.0, 101)
    with pytest.warns(UserWarning):
        ergodic_wavefunction(grid, 2.0, 1.0, 10.0)
    with pytest.warns(UserWarning):
        ergodic_wavefunction(grid, 10.0, 1.0, 1.0)


def test_classify_regime_table():
    assert classify_regime(0.05, math.pi / 3).regime == ZENO
    assert classify_regime(0.2, math.pi / 2).regime == ZENO
    assert classify_regime(10.0, math.pi / 3).regime == ERGODIC
    assert classify_regime(10.0, math.pi / 6).regime == ERGODIC
    assert classify_regime(1.0, math.pi / 3).regime == INTERMEDIATE
    # near pi/2 the two packets separate only at absurd widths
    assert classify_regime(10.0, math.pi / 2).regime == INTERMEDIATE
    with pytest.raises(ValueError):
        classify_regime(0.0, 1.0)


def test_classify_regime_predictions():
    report = classify_regime(10.0, math.pi / 3)
    (v1, w1), (v2, w2) = report.predicted_peaks
    assert (v1, v2) == (pytest.approx(0.5), pytest.approx(-0.5))
    assert (w1, w2) == (pytest.approx(0.75), pytest.approx(0.25))
    assert report.predicted_sigma_z_limit == pytest.approx(0.2502138132, abs=1e-8)
    assert not report.fringe_expected

    zeno = classify_regime(0.05, math.pi / 3)
    assert zeno.predicted_peaks == ((1.0, 1.0),)
    assert classify_regime(1.0, math.pi / 3).fringe_expected


def test_classify_regime_custom_thresholds():
    wide_zeno = RegimeThresholds(zeno_max_width=2.0)
    assert classify_regime(1.0, math.pi / 3, wide_zeno).regime == ZENO


def synthetic_trace(times, envelope):
    values = envelope * np.cos(2.0 * times)
    zeros = np.zeros_like(times)
    return SpinTrace(times=times, sigma_x=zeros, sigma_y=values,
                     sigma_z=zeros, mean_position=zeros)


def test_fit_decoherence_gaussian_synthetic():
    times = np.linspace(0.0, 40.0, 4001)
    fit = fit_decoherence(synthetic_trace(times, np.exp(-0.02 * times**2)))
    assert fit.law == GAUSSIAN
    assert fit.gaussian_rate == pytest.approx(0.02, abs=0.002)


def test_fit_decoherence_power_synthetic():
    times = np.linspace(0.5, 60.0, 6001)
    fit = fit_decoherence(synthetic_trace(times, times**-0.5))
    assert fit.law == POWER_LAW
    assert fit.power_exponent == pytest.approx(-0.5, abs=0.02)


def test_fit_decoherence_mixed_synthetic():
    # envelope exp(-a t^2) t^(-b) chosen so both models misfit equally
    times = np.linspace(1.0, 40.0, 4001)
    envelope = np.exp(-0.0003 * times**2) * times**-0.175
    fit = fit_decoherence(synthetic_trace(times, envelope))
    assert fit.law == MIXED


def test_fit_decoherence_needs_extrema():
    times = np.linspace(0.0, 10.0, 101)
    flat = SpinTrace(times=times, sigma_x=np.zeros_like(times),
                     sigma_y=np.exp(-times), sigma_z=np.zeros_like(times),
                     mean_position=np.zeros_like(times))
    with pytest.raises(ValueError, match="too few extrema"):
        fit_decoherence(flat)
    with pytest.raises(ValueError):
        fit_decoherence(synthetic_trace(times, np.ones_like(times)), component="z")
