"""Domain types, grids, initial states, and the physical-units bridge.

Everything downstream of this module works in dimensionless variables: time
in units of the inverse Zeeman half-frequency 1/omega, length in units of
x_so = v_so / omega (the distance covered at the spin-orbit velocity during
one precession time), momentum in units of 1 / x_so.

This module is also the single source of truth for normalization: the
momentum spectrum A(p) obeys  int |A|^2 dp = 1 / (2 pi)  and the position
packet G(x) obeys  int |G|^2 dx = 1.  Every other module relies on these
conventions unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

INFINITE = math.inf
"""Distinguished mass value: a frozen, non-dispersing packet."""

HBAR = constants.hbar
ATOMIC_MASS = constants.atomic_mass

_SPECTRUM_NORM = (2.0 * math.pi) ** (-0.75)


class GridCoverageError(ValueError):
    """A grid cannot hold the requested state or evolution."""


@dataclass(frozen=True)
class Spinor:
    """Two complex spin-1/2 amplitudes."""

    up: complex
    down: complex

    def __post_init__(self):
        for c in (self.up, self.down):
            if not (math.isfinite(complex(c).real) and math.isfinite(complex(c).imag)):
                raise ValueError("spinor components must be finite")

    @classmethod
    def pure(cls, up, down):
        """Normalized initial state; rejects |up|^2 + |down|^2 != 1."""
        n = abs(up) ** 2 + abs(down) ** 2
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"state not normalized: |up|^2 + |down|^2 = {n!r}")
        return cls(complex(up), complex(down))

    def as_array(self):
        return np.array([self.up, self.down], dtype=complex)

    @property
    def norm_sq(self):
        return abs(self.up) ** 2 + abs(self.down) ** 2


SPIN_UP = Spinor(1.0 + 0.0j, 0.0j)
SPIN_DOWN = Spinor(0.0j, 1.0 + 0.0j)


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform position grid, lengths in units of x_so."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("need n_points >= 2")
        if not self.x_min < self.x_max:
            raise ValueError("need x_min < x_max")

    @property
    def spacing(self):
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self):
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def extent(self):
        return self.x_max - self.x_min


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform momentum grid, symmetric about zero."""

    p_min: float
    p_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("need n_points >= 2")
        if self.p_max <= 0 or abs(self.p_min + self.p_max) > 1e-12 * self.p_max:
            raise ValueError("momentum grid must be symmetric: p_min = -p_max < 0")

    @classmethod
    def symmetric(cls, p_max, n_points):
        return cls(-float(p_max), float(p_max), int(n_points))

    @property
    def spacing(self):
        return (self.p_max - self.p_min) / (self.n_points - 1)

    @property
    def points(self):
        return np.linspace(self.p_min, self.p_max, self.n_points)


@dataclass(frozen=True)
class SimParams:
    """Dimensionless problem definition.

    theta   : field angle from the z axis, radians in [0, pi]
    delta_x : packet width in units of x_so
    mass    : dimensionless mass, or INFINITE for a frozen packet
    eta_in  : initial (pure) spin state
    p_grid  : momentum quadrature grid; must cover the spectrum (p_max >= 8/delta_x + 2)
    x_grid  : output position grid
    """

    theta: float
    delta_x: float
    mass: float
    eta_in: Spinor
    p_grid: MomentumGrid
    x_grid: SpatialGrid

    def __post_init__(self):
        if self.delta_x <= 0:
            raise ValueError("delta_x must be positive")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError("theta must lie in [0, pi]")
        if not self.mass > 0:
            raise ValueError("mass must be positive (or INFINITE)")
        needed = 8.0 / self.delta_x + 2.0
        if self.p_grid.p_max < needed - 1e-9:
            raise GridCoverageError(
                f"p_grid.p_max = {self.p_grid.p_max:g} does not cover the spectrum; "
                f"need at least 8/delta_x + 2 = {needed:g}"
            )

    @classmethod
    def for_time_horizon(cls, theta, delta_x, t_max, mass=INFINITE, eta_in=SPIN_UP,
                         x_pad=4.0, min_points=512, max_points=1 << 20):
        """Build FFT-conjugate grids that hold the evolution out to t_max.

        The momentum window follows the coverage rule p_max = max(8/delta_x + 2, 4)
        and the spatial window is sized so that the light cone plus six packet
        widths stays inside 80% of the half-extent.  n_points is a power of two
        so the momentum integral runs as an FFT.
        """
        p_max = max(8.0 / delta_x + 2.0, 4.0)
        x_need = abs(t_max) + 6.0 * delta_x + x_pad
        # half-extent of the conjugate x grid is pi * (n - 1) / (2 p_max)
        n_min = 1 + 2.0 * p_max * x_need / (0.8 * math.pi)
        n = max(int(min_points), 1 << math.ceil(math.log2(n_min)))
        if n > max_points:
            raise GridCoverageError(
                f"time horizon t_max = {t_max:g} needs {n} grid points "
                f"(cap {max_points}); shrink the horizon or raise the cap"
            )
        p_grid = MomentumGrid.symmetric(p_max, n)
        dx = 2.0 * math.pi / (n * p_grid.spacing)
        x_grid = SpatialGrid(-(n // 2) * dx, (n // 2 - 1) * dx, n)
        return cls(theta=float(theta), delta_x=float(delta_x), mass=float(mass),
                   eta_in=eta_in, p_grid=p_grid, x_grid=x_grid)


def make_gaussian_spectrum(delta_x, p_grid):
    """Gaussian momentum amplitude A(p) sampled on p_grid.

    A(p) = sqrt(delta_x) (2 pi)^(-3/4) exp(-p^2 delta_x^2 / 4), real and even,
    normalized so that int |A|^2 dp = 1/(2 pi).  Raises GridCoverageError if
    the grid misses more than 1e-6 of the spectral mass.
    """
    if delta_x <= 0:
        raise ValueError("delta_x must be positive")
    tail = math.erfc(p_grid.p_max * delta_x / math.sqrt(2.0))
    if tail > 1e-6:
        raise GridCoverageError(
            f"momentum grid holds only {1 - tail:.8f} of the spectral mass "
            f"(p_max = {p_grid.p_max:g}, delta_x = {delta_x:g})"
        )
    p = p_grid.points
    return math.sqrt(delta_x) * _SPECTRUM_NORM * np.exp(-(p * delta_x) ** 2 / 4.0)


def gaussian_packet_values(delta_x, x, t=0.0, mass=INFINITE):
    """Gaussian packet G(x, t) on arbitrary positions x.

    At t = 0 (or with infinite mass) this is the real packet
    [2 / (pi delta_x^2)]^(1/4) exp(-x^2 / delta_x^2).  With a finite mass the
    packet disperses: G(x, t) = sqrt(delta_x) (2 pi)^(-3/4) sqrt(pi / a)
    exp(-x^2 / (4a)) with a = delta_x^2/4 + i t / (2 mass).
    """
    x = np.asarray(x, dtype=float)
    if not np.isfinite(mass) or t == 0.0:
        pref = (2.0 / (math.pi * delta_x**2)) ** 0.25
        return pref * np.exp(-(x / delta_x) ** 2)
    a = delta_x**2 / 4.0 + 0.5j * t / mass
    pref = math.sqrt(delta_x) * _SPECTRUM_NORM * np.sqrt(math.pi / a)
    return pref * np.exp(-(x * x) / (4.0 * a))


def make_gaussian_packet(delta_x, x_grid):
    """Initial Gaussian packet G(x, 0) on x_grid; int |G|^2 dx = 1.

    Raises GridCoverageError when the grid extent is below 6 delta_x.
    """
    if delta_x <= 0:
        raise ValueError("delta_x must be positive")
    if x_grid.extent < 6.0 * delta_x:
        raise GridCoverageError(
            f"x grid extent {x_grid.extent:g} < 6 delta_x = {6 * delta_x:g}"
        )
    return gaussian_packet_values(delta_x, x_grid.points)


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-frame inputs, SI units.

    laser_wavelength : wavelength of the coupling lasers, m
    atom_mass        : atomic mass, kg
    trap_frequency   : harmonic trap frequency setting the packet width, rad/s
    larmor_half      : Zeeman-like coupling omega (half the precession rate), rad/s
    v_so             : spin-orbit velocity, m/s
    """

    laser_wavelength: float
    atom_mass: float
    trap_frequency: float
    larmor_half: float
    v_so: float

    def __post_init__(self):
        for name in ("laser_wavelength", "atom_mass", "trap_frequency",
                     "larmor_half", "v_so"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class FeasibilityReport:
    """Order-of-magnitude arithmetic for a laboratory realization.

    These are estimates in the same spirit as back-of-the-envelope lab
    planning: order-one factors are carried exactly, but no attempt is made
    to model the optical coupling itself.
    """

    recoil_energy: float          # J
    delta_x_physical: float       # m
    delta_x_dimensionless: float
    spreading_ratio: float        # packet spreading speed over v_so
    x_so: float                   # m
    regime_hint: str              # ZENO | ERGODIC | INTERMEDIATE


def to_dimensionless(phys, theta=math.pi / 3, eta_in=SPIN_UP, t_max=20.0):
    """Convert laboratory parameters to a dimensionless problem definition.

    Returns (SimParams, FeasibilityReport).  The SimParams is a skeleton: the
    numeric fields follow from `phys`, while theta, the initial spin, and the
    time horizon used for grid sizing are taken from the keyword arguments.
    """
    k_r = 2.0 * math.pi / phys.laser_wavelength
    recoil_energy = (HBAR * k_r) ** 2 / (2.0 * phys.atom_mass)
    delta_x_phys = math.sqrt(HBAR / (phys.atom_mass * phys.trap_frequency))
    x_so = phys.v_so / phys.larmor_half
    delta_x = delta_x_phys / x_so
    mass = phys.atom_mass * phys.v_so * x_so / HBAR
    spreading_ratio = HBAR / (delta_x_phys * phys.atom_mass * phys.v_so)

    from .asymptotics import classify_regime  # deferred: avoids an import cycle

    report = FeasibilityReport(
        recoil_energy=recoil_energy,
        delta_x_physical=delta_x_phys,
        delta_x_dimensionless=delta_x,
        spreading_ratio=spreading_ratio,
        x_so=x_so,
        regime_hint=classify_regime(delta_x, theta).regime,
    )
    params = SimParams.for_time_horizon(theta, delta_x, t_max, mass=mass,
                                        eta_in=eta_in)
    return params, report


def to_physical(delta_x, mass, laser_wavelength, atom_mass, v_so):
    """Invert to_dimensionless.

    The dimensionless pair (delta_x, mass) does not remember the wavelength,
    the atomic species, or the spin-orbit velocity, so those three are
    explicit arguments.  Round-trips with to_dimensionless to 1e-12 relative.
    """
    larmor_half = atom_mass * v_so**2 / (HBAR * mass)
    x_so = v_so / larmor_half
    delta_x_phys = delta_x * x_so
    trap_frequency = HBAR / (atom_mass * delta_x_phys**2)
    return PhysicalParams(
        laser_wavelength=laser_wavelength,
        atom_mass=atom_mass,
        trap_frequency=trap_frequency,
        larmor_half=larmor_half,
        v_so=v_so,
    )


def rubidium87(trap_over_recoil=0.01, larmor_half_over_recoil=0.1):
    """PhysicalParams for a Rb-87 atom dressed by 804.1 nm lasers.

    The spin-orbit velocity is the recoil velocity hbar k_r / m of the
    two-photon momentum kick; trap and coupling frequencies are given as
    fractions of the recoil energy over hbar.
    """
    wavelength = 804.1e-9
    m = 86.909180527 * ATOMIC_MASS
    k_r = 2.0 * math.pi / wavelength
    recoil_omega = HBAR * k_r**2 / (2.0 * m)
    return PhysicalParams(
        laser_wavelength=wavelength,
        atom_mass=m,
        trap_frequency=trap_over_recoil * recoil_omega,
        larmor_half=larmor_half_over_recoil * recoil_omega,
        v_so=HBAR * k_r / m,
    )
