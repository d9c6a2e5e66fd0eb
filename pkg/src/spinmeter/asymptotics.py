"""Closed-form limits: steady spin, decoherence laws, saddle-point kernels,
the two-packet long-time wave function, and the regime classifier.

Everything here is an analytic shortcut with an exact counterpart elsewhere
in the package, and the tests hold each shortcut against its oracle: the
steady spin against the dynamical plateau, the saddle kernel against the
exact kernel, the two-Gaussian field against the full propagator, and the
decoherence envelope against brute quadrature of the dephasing integral.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .propagator import SpinorField
from .spin_dynamics import field_aligned_spinors

ZENO = "ZENO"
ERGODIC = "ERGODIC"
INTERMEDIATE = "INTERMEDIATE"

GAUSSIAN = "GAUSSIAN"
POWER_LAW = "POWER_LAW"
MIXED = "MIXED"


def _integration_cutoff(delta_x):
    # Gaussian weight makes the integrand negligible past 8/delta_x + a pad
    return 8.0 / delta_x + 4.0


def sigma_z_limit(delta_x, theta):
    """Long-time limit of the sigma_z expectation.

    Dephasing kills every oscillatory term, leaving the momentum average of
    the squared field-axis projection:
    (delta_x / sqrt(2 pi)) int exp(-p^2 delta_x^2 / 2)
    (p + cos)^2 / [(p + cos)^2 + sin^2] dp, evaluated adaptively to 1e-8.
    """
    if delta_x <= 0:
        raise ValueError("delta_x must be positive")
    ct = math.cos(theta)
    st2 = math.sin(theta) ** 2
    norm = delta_x / math.sqrt(2.0 * math.pi)

    def integrand(p):
        shifted_sq = (p + ct) ** 2
        return norm * math.exp(-0.5 * (p * delta_x) ** 2) * shifted_sq / (shifted_sq + st2)

    cut = _integration_cutoff(delta_x)
    pts = [-ct] if -cut < -ct < cut else None
    value, _ = quad(integrand, -cut, cut, points=pts, limit=400,
                    epsabs=1e-10, epsrel=1e-10)
    return float(value)


def oscillatory_I(delta_x, theta, t, sign=+1):
    """Exact dephasing integral int exp(+-2 i omega(p) t - p^2 dx^2/2)/omega dp.

    The off-diagonal spin coherence is proportional to this.  Rejected for
    theta in {0, pi}: the field magnitude then touches zero on the real line
    and 1/omega stops being integrable.
    """
    if math.sin(theta) < 1e-12:
        raise ValueError("theta in {0, pi}: 1/omega is not integrable")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    ct = math.cos(theta)
    st2 = math.sin(theta) ** 2
    cut = _integration_cutoff(delta_x)

    def om(p):
        return math.sqrt((p + ct) ** 2 + st2)

    def re_part(p):
        return math.cos(2.0 * sign * om(p) * t) * math.exp(-0.5 * (p * delta_x) ** 2) / om(p)

    def im_part(p):
        return math.sin(2.0 * sign * om(p) * t) * math.exp(-0.5 * (p * delta_x) ** 2) / om(p)

    pts = [-ct] if -cut < -ct < cut else None
    re, _ = quad(re_part, -cut, cut, points=pts, limit=2000, epsabs=1e-11, epsrel=1e-11)
    im, _ = quad(im_part, -cut, cut, points=pts, limit=2000, epsabs=1e-11, epsrel=1e-11)
    return complex(re, im)


def _envelope_shape(delta_x, theta, t):
    st = math.sin(theta)
    ct = math.cos(theta)
    denom = delta_x**4 * st**2 + 4.0 * t**2
    return math.sqrt(st) * denom**-0.25 * math.exp(
        -2.0 * t**2 * delta_x**2 * ct**2 / denom)


_CALIBRATION = {}


def i_asymptotic(delta_x, theta, t):
    """Interpolating magnitude estimate of the dephasing integral.

    sin^(1/2) [dx^4 sin^2 + 4 t^2]^(-1/4) exp[-2 t^2 dx^2 cos^2 / (dx^4 sin^2
    + 4 t^2)], times a constant fixed once per (delta_x, theta) by an exact
    evaluation at the reference time 10 delta_x.  For theta = pi/2 the
    exponential drops and the pure t^(-1/2) branch remains; for wide packets
    away from pi/2 the Gaussian branch exp(-2 t^2 cot^2 / dx^2) dominates.
    """
    key = (round(float(delta_x), 12), round(float(theta), 12))
    if key not in _CALIBRATION:
        t_ref = 10.0 * delta_x
        exact = abs(oscillatory_I(delta_x, theta, t_ref, +1))
        _CALIBRATION[key] = exact / _envelope_shape(delta_x, theta, t_ref)
    return _CALIBRATION[key] * _envelope_shape(delta_x, theta, t)


def stationary_points(t, theta):
    """Positions where the kernel phase is stationary: (+t cos, -t cos)."""
    if t <= 0:
        raise ValueError("need t > 0")
    return (t * math.cos(theta), -t * math.cos(theta))


def xi_saddle(x, t, theta, validity_edge=0.95):
    """Large-time saddle-point form of the smooth kernel part.

    Valid deep inside the light cone; entries where |x| > validity_edge * t
    are returned as NaN because the (t - x)^(-3/4) factor blows up at the
    edge.  Requires t >= 5 and |x| < t.
    """
    if t < 5:
        raise ValueError("saddle form needs t >= 5")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x_arr) >= t):
        raise ValueError("saddle form needs |x| < t")
    beta = math.sin(theta)
    s = np.sqrt(t * t - x_arr * x_arr)
    phase = beta * s + math.pi / 4.0
    amp = math.sqrt(2.0 * math.pi * beta)
    m = np.empty(x_arr.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = amp * (t + x_arr) ** 0.25 * (t - x_arr) ** -0.75 * np.cos(phase)
    m[..., 1, 1] = amp * (t - x_arr) ** 0.25 * (t + x_arr) ** -0.75 * np.cos(phase)
    off = -1j * amp * s**-0.5 * np.sin(phase)
    m[..., 0, 1] = off
    m[..., 1, 0] = off
    m[np.abs(x_arr) > validity_edge * t] = np.nan
    if np.isscalar(x) or np.ndim(x) == 0:
        return m[0]
    return m


def steady_state_rho(theta):
    """Long-time mixed spin state: field-aligned projectors, classical weights."""
    along, against = field_aligned_spinors(theta)
    w_along = math.cos(theta / 2.0) ** 2
    rho = w_along * np.outer(along, along.conj()) \
        + (1.0 - w_along) * np.outer(against, against.conj())
    return 0.5 * (rho + rho.conj().T)


def ergodic_wavefunction(x_grid, t, theta, delta_x):
    """Two-Gaussian approximation of the long-time wide-packet state.

    One packet per field-aligned spin projection, moving at velocity
    +-cos(theta), with complex widths that encode the slow spreading induced
    by the momentum dependence of the precession rate.  The analytic weights
    of the two packets are exactly cos^2(theta/2) and sin^2(theta/2).
    """
    if t < 5:
        warnings.warn("two-packet form assumes the packets have separated (t >= 5)",
                      stacklevel=2)
    if delta_x < 5:
        warnings.warn("two-packet form is meant for wide packets (delta_x >= 5)",
                      stacklevel=2)
    x = x_grid.points
    st2 = math.sin(theta) ** 2
    ct = math.cos(theta)
    half = theta / 2.0
    denom = 4.0 * t**2 * st2**2 + delta_x**4
    gamma_plus = (delta_x**2 - 2j * t * st2) / denom
    gamma_minus = (delta_x**2 + 2j * t * st2) / denom
    pref = 2.0**0.25 * math.pi**-0.25 * math.sqrt(delta_x)
    c_plus = pref * math.cos(half) * np.exp(-1j * (t + math.pi / 4.0)) \
        / np.sqrt(2.0 * t * st2 - 1j * delta_x**2)
    c_minus = -pref * math.sin(half) * np.exp(1j * (t + math.pi / 4.0)) \
        / np.sqrt(2.0 * t * st2 + 1j * delta_x**2)
    along, against = field_aligned_spinors(theta)
    packet_plus = np.exp(-gamma_plus * (x - t * ct) ** 2)
    packet_minus = np.exp(-gamma_minus * (x + t * ct) ** 2)
    values = c_plus * packet_plus[:, None] * along[None, :] \
        + c_minus * packet_minus[:, None] * against[None, :]
    return SpinorField(grid=x_grid, values=values, time_stamp=float(t))


@dataclass(frozen=True)
class RegimeThresholds:
    """Engineering cutoffs separating the qualitative regimes."""

    zeno_max_width: float = 0.2
    ergodic_min_width: float = 5.0
    ergodic_tan_factor: float = 3.0


@dataclass(frozen=True)
class RegimeReport:
    """Classification of a (delta_x, theta) point with its predictions.

    predicted_peaks holds (velocity, weight) pairs for a spin-up initial
    state; predicted_sigma_z_limit is the exact dephased average.
    """

    regime: str
    delta_x: float
    theta: float
    predicted_peaks: tuple
    predicted_sigma_z_limit: float
    fringe_expected: bool


def classify_regime(delta_x, theta, thresholds=None):
    """Sort a parameter point into ZENO / ERGODIC / INTERMEDIATE.

    Narrow packets resolve the spin path and freeze it (one peak moving at
    the full spin-orbit velocity); wide packets dephase into two field-aligned
    packets; in between the two channels still overlap and interfere.
    """
    if delta_x <= 0:
        raise ValueError("delta_x must be positive")
    th = thresholds or RegimeThresholds()
    tan = abs(math.tan(theta)) if abs(math.cos(theta)) > 1e-12 else math.inf
    if delta_x <= th.zeno_max_width:
        regime = ZENO
        peaks = ((1.0, 1.0),)
    elif delta_x >= th.ergodic_min_width and delta_x >= th.ergodic_tan_factor * tan:
        regime = ERGODIC
        peaks = ((math.cos(theta), math.cos(theta / 2.0) ** 2),
                 (-math.cos(theta), math.sin(theta / 2.0) ** 2))
    else:
        regime = INTERMEDIATE
        peaks = ((math.cos(theta), math.cos(theta / 2.0) ** 2),
                 (-math.cos(theta), math.sin(theta / 2.0) ** 2))
    return RegimeReport(
        regime=regime,
        delta_x=float(delta_x),
        theta=float(theta),
        predicted_peaks=peaks,
        predicted_sigma_z_limit=sigma_z_limit(delta_x, theta),
        fringe_expected=regime == INTERMEDIATE,
    )


@dataclass(frozen=True)
class DecoherenceFit:
    """Envelope-law fit of a decaying spin component."""

    law: str                # GAUSSIAN | POWER_LAW | MIXED
    gaussian_rate: float    # c in exp(-c t^2)
    power_exponent: float   # d log E / d log t (about -1/2 on the slow branch)
    fit_residual: float     # rms log residual of the winning model


def _envelope_maxima(times, values):
    """Local maxima of |values|, peak positions refined by a parabola."""
    y = np.abs(values)
    peaks = []
    for i in range(1, len(y) - 1):
        if y[i] > y[i - 1] and y[i] >= y[i + 1] and y[i] > 1e-12:
            denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
            if denom < 0:
                shift = 0.5 * (y[i - 1] - y[i + 1]) / denom
                shift = float(np.clip(shift, -1.0, 1.0))
            else:
                shift = 0.0
            dt_left = times[i] - times[i - 1]
            dt_right = times[i + 1] - times[i]
            dt = dt_right if shift >= 0 else dt_left
            t_pk = times[i] + shift * dt
            y_pk = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift
            peaks.append((t_pk, max(y_pk, y[i])))
    return peaks


def fit_decoherence(trace, component="y"):
    """Classify the decay law of an oscillating spin component.

    Extracts the envelope from the local maxima of |sigma_component| and fits
    the log envelope against a Gaussian law (linear in -t^2) and a power law
    (linear in -log t) by least squares.  Returns MIXED when the residuals
    agree within 10%.  Raises ValueError when fewer than four usable maxima
    exist (no precession means nothing to fit).
    """
    values = {"x": trace.sigma_x, "y": trace.sigma_y}.get(component)
    if values is None:
        raise ValueError("component must be 'x' or 'y'")
    peaks = [(tp, yp) for tp, yp in _envelope_maxima(trace.times, values) if tp > 0]
    if len(peaks) < 4:
        raise ValueError(f"too few extrema ({len(peaks)}) to fit an envelope law")
    t_pk = np.array([p[0] for p in peaks])
    log_e = np.log([p[1] for p in peaks])

    design_g = np.column_stack([np.ones_like(t_pk), -t_pk**2])
    coef_g, *_ = np.linalg.lstsq(design_g, log_e, rcond=None)
    res_g = float(np.sqrt(np.mean((design_g @ coef_g - log_e) ** 2)))

    design_p = np.column_stack([np.ones_like(t_pk), np.log(t_pk)])
    coef_p, *_ = np.linalg.lstsq(design_p, log_e, rcond=None)
    res_p = float(np.sqrt(np.mean((design_p @ coef_p - log_e) ** 2)))

    if abs(res_g - res_p) < 0.1 * max(res_g, res_p, 1e-300):
        law = MIXED
    elif res_g < res_p:
        law = GAUSSIAN
    else:
        law = POWER_LAW
    return DecoherenceFit(
        law=law,
        gaussian_rate=float(coef_g[1]),
        power_exponent=float(coef_p[1]),
        fit_residual=min(res_g, res_p),
    )
