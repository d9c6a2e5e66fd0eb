"""Reduced spin state, spin expectations, densities, and mean position.

Tracing the atom's position out of the pure state leaves the spin in a
mixed state: an incoherent momentum average of rotated projectors, weighted
by the (normalized) momentum distribution 2 pi |A(p)|^2.  Decoherence shows
up as the decay of the off-diagonal element; the mean position grows as the
running time integral of the sigma_z expectation, which is the anomalous
velocity written as an observable identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import make_gaussian_spectrum, MomentumGrid
from .propagator import evolve_momentum
from .spin_dynamics import SIGMA_X, SIGMA_Y, SIGMA_Z, evolution_operator


def _quadrature_grid(delta_x, t):
    """Momentum grid dense enough for the dephasing integrals at time t.

    The integrand carries phases up to exp(+-2 i omega(p) t), so its position
    bandwidth grows like 2t; the spacing is chosen so the trapezoid error
    (spectral for analytic integrands) stays below the 1e-10 ballpark.
    """
    p_max = max(8.0 / delta_x + 2.0, 4.0)
    reach = 2.0 * abs(t) + 6.0 * delta_x + 10.0
    n = max(512, 1 << math.ceil(math.log2(2.0 * p_max * reach / math.pi)))
    return MomentumGrid.symmetric(p_max, n)


def reduced_density_matrix(params, t):
    """Spin density matrix after tracing out position.

    rho(t) = 2 pi * int |A(p)|^2 U(p, t) |eta_in><eta_in| U(p, t)^dag dp,
    evaluated on an internal momentum grid sized for the requested time.
    Hermitian with unit trace by construction.
    """
    grid = _quadrature_grid(params.delta_x, t)
    p = grid.points
    weights = 2.0 * math.pi * make_gaussian_spectrum(params.delta_x, grid) ** 2 \
        * grid.spacing
    evolved = evolution_operator(p, params.theta, t) @ params.eta_in.as_array()
    rho = np.einsum("p,pa,pb->ab", weights, evolved, evolved.conj())
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def spin_expectations(rho):
    """The three Pauli traces of a spin density matrix, as real numbers."""
    return (
        float(np.trace(SIGMA_X @ rho).real),
        float(np.trace(SIGMA_Y @ rho).real),
        float(np.trace(SIGMA_Z @ rho).real),
    )


def purity(rho):
    return float(np.trace(rho @ rho).real)


def position_density(field):
    """Pointwise |psi_1|^2 + |psi_2|^2."""
    return np.sum(np.abs(field.values) ** 2, axis=1)


def mean_position(field):
    """First moment of the position density, by trapezoid quadrature."""
    dens = position_density(field)
    return float(np.trapezoid(field.x * dens, dx=field.grid.spacing))


def _simpson_nodes(f, a, b, n):
    xs = np.linspace(a, b, n)
    ys = np.array([f(x) for x in xs])
    h = (b - a) / (n - 1)
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return float(np.dot(w, ys) * h / 3.0)


def ehrenfest_position(params, t, n_time_nodes=33, tol=1e-6, max_nodes=100_000):
    """Mean position as the running integral of the sigma_z expectation.

    Composite Simpson over [0, t], with the node count doubled until two
    refinements agree to `tol`.  Evaluations of sigma_z are memoized, so a
    refinement only pays for the new midpoints.
    """
    if t == 0:
        return 0.0
    cache = {}

    def sigma_z_at(tp):
        if tp not in cache:
            cache[tp] = spin_expectations(reduced_density_matrix(params, tp))[2]
        return cache[tp]

    n = max(3, int(n_time_nodes))
    if n % 2 == 0:
        n += 1
    best = _simpson_nodes(sigma_z_at, 0.0, t, n)
    while True:
        n = 2 * n - 1
        if n > max_nodes:
            return best
        refined = _simpson_nodes(sigma_z_at, 0.0, t, n)
        if abs(refined - best) < tol:
            return refined
        best = refined


@dataclass(frozen=True, eq=False)
class SpinTrace:
    """Spin expectations and mean position sampled on a time list."""

    times: np.ndarray
    sigma_x: np.ndarray
    sigma_y: np.ndarray
    sigma_z: np.ndarray
    mean_position: np.ndarray


def spin_trace(params, t_list):
    """Evaluate the reduced spin state and mean position over a time list."""
    times = np.asarray(t_list, dtype=float)
    if times.size and (np.any(np.diff(times) < 0) or times[0] < 0):
        raise ValueError("t_list must be ascending and nonnegative")
    sx = np.empty(times.size)
    sy = np.empty(times.size)
    sz = np.empty(times.size)
    mx = np.empty(times.size)
    for i, t in enumerate(times):
        sx[i], sy[i], sz[i] = spin_expectations(reduced_density_matrix(params, t))
        mx[i] = mean_position(evolve_momentum(params, t))
    return SpinTrace(times=times, sigma_x=sx, sigma_y=sy, sigma_z=sz,
                     mean_position=mx)


@dataclass(frozen=True)
class PlateauResult:
    """Late-time plateau estimate of a sampled signal."""

    value: float
    converged: bool
    window: float


def detect_plateau(times, values, window=5.0, tol=1e-3):
    """Mean over the trailing window, flagged converged if it varies < tol.

    Sweeps must keep running on rows whose signal still rings, so a
    non-converged trailing window is reported (flagged) instead of raised.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size < 2:
        raise ValueError("need at least two samples")
    mask = times >= times[-1] - window
    tail = values[mask]
    spread = float(np.max(tail) - np.min(tail))
    return PlateauResult(value=float(np.mean(tail)), converged=spread < tol,
                         window=window)
