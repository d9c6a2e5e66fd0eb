"""Exact per-momentum spin evolution and the discrete path-sum oracle.

A momentum-p component of the atom sees the composite field
(sin theta, 0, cos theta + p), whose magnitude is omega(p, theta).  The spin
rotates about that field; position enters only through p, so the evolution
factorizes over momentum and is available in closed form at any time.

The path-sum half of the module re-derives the same operator as a sum over
discrete spin histories, binned by the time average of sigma_z along each
history.  That average is exactly the distance the atom's center of mass
travels (in units of v_so t), which is what makes it a meter reading.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Spinor

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

DEFAULT_BIN_CAP = 4096
"""Largest number of time-average bins a path sum may produce."""


def omega(p, theta):
    """Magnitude of the composite field for momentum p: sqrt((p+cos)^2 + sin^2)."""
    p = np.asarray(p, dtype=float)
    return np.sqrt((p + np.cos(theta)) ** 2 + np.sin(theta) ** 2)


def evolution_operator(p, theta, t):
    """Spin-space evolution operator for one momentum component.

    Unitary 2x2 matrix equal to exp(-i [(n . sigma) + p sigma_z] t) with
    n = (sin theta, 0, cos theta).  Vectorized: an array p of shape S yields
    an array of shape S + (2, 2).  The sin(omega t)/omega factor is evaluated
    through np.sinc, which is exact through the omega -> 0 point.
    """
    p = np.asarray(p, dtype=float)
    ct = np.cos(theta)
    st = np.sin(theta)
    shifted = p + ct
    om = np.sqrt(shifted**2 + st**2)
    cos_part = np.cos(om * t)
    sin_over = t * np.sinc(om * t / np.pi)  # sin(om t) / om
    u = np.empty(p.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = cos_part - 1j * shifted * sin_over
    u[..., 1, 1] = cos_part + 1j * shifted * sin_over
    u[..., 0, 1] = -1j * st * sin_over
    u[..., 1, 0] = u[..., 0, 1]
    return u


def spin_evolve(eta, p, theta, t):
    """Evolve a single spinor: U(p, theta, t) applied to eta."""
    out = evolution_operator(p, theta, t) @ eta.as_array()
    return Spinor(complex(out[0]), complex(out[1]))


def _step_rotation(theta, eps):
    """One short-time rotation about the field axis, exp(-i (n.sigma) eps)."""
    n_sigma = np.sin(theta) * SIGMA_X + np.cos(theta) * SIGMA_Z
    return np.cos(eps) * IDENTITY - 1j * np.sin(eps) * n_sigma


@dataclass(frozen=True)
class PathSumResult:
    """Amplitude operators of a K-step path sum, binned by time-averaged sigma_z.

    bin_centers[m] = (2m - K) / K spans [-1, 1]; amplitudes[m] is the 2x2
    operator collecting every spin history whose average lands in bin m,
    before the momentum phase exp(-i p t bin_center) is applied.
    """

    bin_centers: np.ndarray   # (K + 1,)
    amplitudes: np.ndarray    # (K + 1, 2, 2) complex
    step_count: int


def _binned_amplitudes(theta, t, k, bin_cap):
    """Dynamic program over (counted +1 spins, current spin, initial spin)."""
    if k < 1:
        raise ValueError("need at least one step")
    if t <= 0:
        raise ValueError("need t > 0")
    if k + 1 > bin_cap:
        raise ValueError(f"K = {k} needs {k + 1} bins, above the cap {bin_cap}")
    eps = t / k
    v = _step_rotation(theta, eps)
    # amp[c, s, s0]: amplitude with c spins counted +1 so far, current spin s,
    # initial spin s0 (matrix column).  The first momentum factor counts the
    # initial spin itself; each later step is a rotation followed by a count.
    amp = np.zeros((k + 1, 2, 2), dtype=complex)
    amp[1, 0, 0] = 1.0
    amp[0, 1, 1] = 1.0
    for _ in range(k - 1):
        hopped = np.einsum("ab,cbj->caj", v, amp)
        new = np.zeros_like(amp)
        new[1:, 0, :] = hopped[:-1, 0, :]
        new[:, 1, :] = hopped[:, 1, :]
        amp = new
    # final rotation: its outgoing spin labels the projector only, uncounted
    return np.einsum("ab,cbj->caj", v, amp), eps


def trotter_path_sum(p, theta, t, k, bin_cap=DEFAULT_BIN_CAP):
    """Split the K-step factorized evolution into time-average bins.

    Returns (total, PathSumResult).  total is the full K-step operator
    [rotation x momentum-phase]^K, reassembled as the phase-weighted sum of
    the bin amplitudes; it converges to evolution_operator at rate O(1/K).
    The identity between the bin sum and the K-step product is exact.
    """
    amps, eps = _binned_amplitudes(theta, t, k, bin_cap)
    counts = np.arange(k + 1)
    centers = (2.0 * counts - k) / k
    phases = np.exp(-1j * p * eps * (2.0 * counts - k))
    total = np.einsum("c,cab->ab", phases, amps)
    return total, PathSumResult(bin_centers=centers, amplitudes=amps, step_count=k)


@dataclass(frozen=True)
class PathDistribution:
    """Per-bin spinor amplitudes of the measurement-pointer reading.

    bin_centers holds the admissible time averages of sigma_z; amplitudes[m]
    is the (unnormalized) spinor reached along histories in bin m.  Mapping
    bin_centers to positions x = t * bin_center gives the finite-K skeleton
    of the position-space sub-states.
    """

    bin_centers: np.ndarray   # (K + 1,)
    amplitudes: np.ndarray    # (K + 1, 2) complex
    step_count: int


def path_average_distribution(theta, t, k, eta_in, bin_cap=DEFAULT_BIN_CAP):
    """Momentum-independent bin amplitudes applied to an initial spinor."""
    amps, _ = _binned_amplitudes(theta, t, k, bin_cap)
    centers = (2.0 * np.arange(k + 1) - k) / k
    vec = np.einsum("cab,b->ca", amps, eta_in.as_array())
    return PathDistribution(bin_centers=centers, amplitudes=vec, step_count=k)


def field_aligned_spinors(theta):
    """Spin states polarized along (+) and against (-) the field axis."""
    half = theta / 2.0
    along = np.array([np.cos(half), np.sin(half)], dtype=complex)
    against = np.array([-np.sin(half), np.cos(half)], dtype=complex)
    return along, against
