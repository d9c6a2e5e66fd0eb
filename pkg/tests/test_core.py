"""Domain types, grids, packet/spectrum normalization, and the unit bridge."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinmeter import (
    INFINITE,
    GridCoverageError,
    MomentumGrid,
    PhysicalParams,
    SimParams,
    SpatialGrid,
    Spinor,
    SPIN_DOWN,
    SPIN_UP,
    gaussian_packet_values,
    make_gaussian_packet,
    make_gaussian_spectrum,
    rubidium87,
    to_dimensionless,
    to_physical,
)


def test_spinor_pure_accepts_normalized():
    s = Spinor.pure(1 / math.sqrt(2), 1j / math.sqrt(2))
    assert abs(s.norm_sq - 1.0) < 1e-12
    assert s.as_array().dtype == complex


def test_spinor_pure_rejects_unnormalized():
    with pytest.raises(ValueError):
        Spinor.pure(1.0, 1.0)


def test_spinor_rejects_non_finite():
    with pytest.raises(ValueError):
        Spinor(math.inf, 0.0)


def test_spin_constants():
    assert SPIN_UP.up == 1.0 and SPIN_UP.down == 0.0
    assert SPIN_DOWN.up == 0.0 and SPIN_DOWN.down == 1.0


def test_spatial_grid_basics():
    g = SpatialGrid(-5.0, 5.0, 11)
    assert g.spacing == pytest.approx(1.0)
    assert g.extent == pytest.approx(10.0)
    assert np.allclose(g.points, np.arange(-5.0, 6.0))


def test_spatial_grid_validation():
    with pytest.raises(ValueError):
        SpatialGrid(1.0, -1.0, 10)
    with pytest.raises(ValueError):
        SpatialGrid(0.0, 1.0, 1)


def test_momentum_grid_symmetric():
    g = MomentumGrid.symmetric(4.0, 9)
    assert g.p_min == -4.0
    assert g.points[4] == pytest.approx(0.0)
    with pytest.raises(ValueError):
        MomentumGrid(-3.0, 4.0, 9)


def test_sim_params_validation():
    p = MomentumGrid.symmetric(12.0, 64)
    x = SpatialGrid(-10.0, 10.0, 64)
    with pytest.raises(ValueError):
        SimParams(theta=-0.1, delta_x=1.0, mass=INFINITE, eta_in=SPIN_UP,
                  p_grid=p, x_grid=x)
    with pytest.raises(ValueError):
        SimParams(theta=1.0, delta_x=-1.0, mass=INFINITE, eta_in=SPIN_UP,
                  p_grid=p, x_grid=x)
    with pytest.raises(ValueError):
        SimParams(theta=1.0, delta_x=1.0, mass=0.0, eta_in=SPIN_UP,
                  p_grid=p, x_grid=x)


def test_sim_params_momentum_coverage_rule():
    # p_max below 8/delta_x + 2 cannot hold the spectrum
    p = MomentumGrid.symmetric(5.0, 64)
    x = SpatialGrid(-10.0, 10.0, 64)
    with pytest.raises(GridCoverageError):
        SimParams(theta=1.0, delta_x=1.0, mass=INFINITE, eta_in=SPIN_UP,
                  p_grid=p, x_grid=x)


def test_for_time_horizon_grid_shape():
    params = SimParams.for_time_horizon(math.pi / 3, 1.0, 20.0)
    n = params.p_grid.n_points
    assert n >= 512 and n & (n - 1) == 0  # power of two
    assert params.p_grid.p_max == pytest.approx(10.0)
    assert params.x_grid.n_points == n
    # light cone plus padding fits inside 80% of the half extent
    half = min(-params.x_grid.x_min, params.x_grid.x_max)
    assert 20.0 + 6.0 * params.delta_x <= 0.8 * half


def test_for_time_horizon_respects_point_cap():
    with pytest.raises(GridCoverageError):
        SimParams.for_time_horizon(math.pi / 3, 0.05, 1e6)


def test_spectrum_normalization():
    # int |A|^2 dp = 1/(2 pi) to quadrature accuracy
    for delta_x in (0.05, 1.0, 10.0):
        params = SimParams.for_time_horizon(math.pi / 3, delta_x, 10.0)
        a = make_gaussian_spectrum(delta_x, params.p_grid)
        total = np.trapezoid(a * a, dx=params.p_grid.spacing)
        assert abs(total - 1.0 / (2.0 * math.pi)) < 1e-12


def test_spectrum_rejects_leaky_grid():
    grid = MomentumGrid.symmetric(1.0, 64)
    with pytest.raises(GridCoverageError):
        make_gaussian_spectrum(2.0, grid)


def test_packet_normalization_frozen():
    x = np.linspace(-40, 40, 4001)
    for delta_x in (0.5, 2.0):
        g = gaussian_packet_values(delta_x, x)
        assert abs(np.trapezoid(np.abs(g) ** 2, x) - 1.0) < 1e-10


def test_packet_dispersion():
    """Finite mass spreads the packet but conserves its norm.

    The width of |G|^2 grows by the standard factor
    sqrt(1 + (2 t / (m delta_x^2))^2).
    """
    delta_x, mass, t = 1.0, 2.0, 3.0
    x = np.linspace(-60, 60, 12001)
    g = gaussian_packet_values(delta_x, x, t, mass)
    dens = np.abs(g) ** 2
    norm = np.trapezoid(dens, x)
    assert abs(norm - 1.0) < 1e-10
    var = np.trapezoid(x * x * dens, x)
    var0 = delta_x**2 / 4.0
    growth = 1.0 + (2.0 * t / (mass * delta_x**2)) ** 2
    assert var == pytest.approx(var0 * growth, rel=1e-8)


def test_packet_infinite_mass_is_time_independent():
    x = np.linspace(-5, 5, 101)
    g0 = gaussian_packet_values(1.0, x, 0.0, INFINITE)
    g1 = gaussian_packet_values(1.0, x, 7.0, INFINITE)
    assert np.array_equal(g0, g1)


def test_make_gaussian_packet_extent_guard():
    grid = SpatialGrid(-2.0, 2.0, 64)
    with pytest.raises(GridCoverageError):
        make_gaussian_packet(1.0, grid)


def test_physical_params_positivity():
    with pytest.raises(ValueError):
        PhysicalParams(laser_wavelength=800e-9, atom_mass=-1.0,
                       trap_frequency=1.0, larmor_half=1.0, v_so=1.0)


def test_rubidium87_closed_forms():
    """The default Rb preset has algebraically exact dimensionless numbers.

    With trap = 0.01 recoil and coupling = 0.1 recoil,
    k_r * delta_x_phys = sqrt(2 / 0.01) = sqrt(200), the spreading ratio is
    its reciprocal, and delta_x / x_so = sqrt(200) / 20 = sqrt(1/2).
    """
    phys = rubidium87()
    assert phys.laser_wavelength == pytest.approx(804.1e-9)
    assert phys.atom_mass == pytest.approx(1.4431609e-25, rel=1e-6)
    assert phys.v_so == pytest.approx(5.7099357e-3, rel=1e-6)
    assert phys.larmor_half == pytest.approx(2230.853, rel=1e-5)
    assert phys.trap_frequency == pytest.approx(223.0853, rel=1e-5)

    params, report = to_dimensionless(phys)
    k_r = 2.0 * math.pi / phys.laser_wavelength
    assert report.delta_x_physical * k_r == pytest.approx(math.sqrt(200.0), rel=1e-12)
    assert report.spreading_ratio == pytest.approx(1.0 / math.sqrt(200.0), rel=1e-12)
    assert report.delta_x_dimensionless == pytest.approx(math.sqrt(0.5), rel=1e-12)
    assert params.delta_x == pytest.approx(math.sqrt(0.5), rel=1e-12)
    assert report.regime_hint in ("ZENO", "ERGODIC", "INTERMEDIATE")
    assert report.recoil_energy > 0 and report.x_so > 0


def test_to_dimensionless_mass_scale():
    phys = rubidium87()
    params, _ = to_dimensionless(phys)
    expected = phys.atom_mass * phys.v_so * (phys.v_so / phys.larmor_half) \
        / (1.054571817e-34)
    assert params.mass == pytest.approx(expected, rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(
    delta_x=st.floats(min_value=0.05, max_value=50.0),
    mass=st.floats(min_value=1e-3, max_value=1e3),
)
def test_unit_bridge_round_trip(delta_x, mass):
    phys = to_physical(delta_x, mass, laser_wavelength=804.1e-9,
                       atom_mass=1.44e-25, v_so=5.7e-3)
    params, report = to_dimensionless(phys, t_max=1.0)
    assert report.delta_x_dimensionless == pytest.approx(delta_x, rel=1e-12)
    assert params.mass == pytest.approx(mass, rel=1e-12)
