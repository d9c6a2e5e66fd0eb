"""Experiment runners: turn a parsed config into tabular data.

Each runner returns an ExperimentResult carrying the column names, the rows,
and a dict of resolved parameters for the run manifest.  File writing and exit
codes live in the cli module; everything here is importable and testable
without touching the filesystem.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import (
    ZENO,
    ERGODIC,
    RegimeThresholds,
    classify_regime,
    ergodic_wavefunction,
    fit_decoherence,
    xi_saddle,
)
from .config import ExperimentConfig
from .core import (
    PhysicalParams,
    SimParams,
    Spinor,
    gaussian_packet_values,
    to_dimensionless,
)
from .observables import (
    SpinTrace,
    detect_plateau,
    position_density,
    spin_trace,
)
from .propagator import SpinorField, evolve_momentum, kernel_xi
from .spin_dynamics import field_aligned_spinors, path_average_distribution

SWEEP_FIT_START = 4.0  # skip the early transient before fitting envelopes


@dataclass
class ExperimentResult:
    """Tabular output of one experiment plus manifest extras."""

    experiment: str
    filename: str
    columns: tuple = ()
    rows: list = field(default_factory=list)
    payload: dict | None = None     # set instead of rows for report-style output
    manifest: dict = field(default_factory=dict)


def worker_cap():
    """Worker-pool size: SPINMETER_THREADS if set and sane, else cpu count."""
    env = os.environ.get("SPINMETER_THREADS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            return 1
        return max(1, cap)
    return os.cpu_count() or 1


def _eta_from(config):
    vec = np.array([config.eta_up, config.eta_down], dtype=complex)
    vec = vec / np.linalg.norm(vec)
    return Spinor(up=complex(vec[0]), down=complex(vec[1]))


def _thresholds_from(config):
    overrides = config.thresholds
    base = RegimeThresholds()
    return RegimeThresholds(
        zeno_max_width=overrides.get("zeno_max", base.zeno_max_width),
        ergodic_min_width=overrides.get("ergodic_min", base.ergodic_min_width),
        ergodic_tan_factor=overrides.get("ergodic_tan", base.ergodic_tan_factor),
    )


def _grid_manifest(params):
    return {
        "p_max": params.p_grid.p_max,
        "p_points": params.p_grid.n_points,
        "x_min": params.x_grid.x_min,
        "x_max": params.x_grid.x_max,
        "x_points": params.x_grid.n_points,
    }


def find_density_peaks(x, density, floor_frac=1e-3):
    """Local maxima of a sampled density, parabola-refined.

    Returns a list of (position, height) pairs, skipping maxima below
    floor_frac of the global maximum.  Assumes a uniform grid.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(density, dtype=float)
    floor = floor_frac * float(np.max(y))
    dx = x[1] - x[0]
    peaks = []
    for i in range(1, y.size - 1):
        if y[i] > y[i - 1] and y[i] >= y[i + 1] and y[i] > floor:
            denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
            shift = 0.0
            if denom < 0:
                shift = float(np.clip(0.5 * (y[i - 1] - y[i + 1]) / denom, -1.0, 1.0))
            peaks.append((float(x[i] + shift * dx),
                          float(y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift)))
    return peaks


# ---------------------------------------------------------------- spin-trace

SPIN_TRACE_COLUMNS = ("t", "sigma_x", "sigma_y", "sigma_z", "mean_x")


def run_spin_trace(config):
    times = config.times()
    params = SimParams.for_time_horizon(
        config.theta, config.delta_x, t_max=max(times), mass=config.mass,
        eta_in=_eta_from(config))
    trace = spin_trace(params, times)
    rows = [
        (t, sx, sy, sz, mx)
        for t, sx, sy, sz, mx in zip(trace.times, trace.sigma_x, trace.sigma_y,
                                     trace.sigma_z, trace.mean_position)
    ]
    plateau = detect_plateau(trace.times, trace.sigma_z)
    return ExperimentResult(
        experiment="spin-trace",
        filename="spin_trace",
        columns=SPIN_TRACE_COLUMNS,
        rows=rows,
        manifest={
            "grid": _grid_manifest(params),
            "sigma_z_plateau": plateau.value,
            "plateau_converged": plateau.converged,
        },
    )


# ------------------------------------------------------------ density-profile

DENSITY_COLUMNS = ("x", "P_exact", "P_approx",
                   "psi1_re", "psi1_im", "psi2_re", "psi2_im")


def _saddle_convolution(params, t, nodes_per_unit_time=320, min_nodes=4001,
                        block=256):
    """Far-field approximation of the evolved state.

    Same structure as propagator.evolve_convolution, with the exact smooth
    kernel replaced by its saddle-point form over the trusted window
    |x'| <= 0.95 t.  The frozen-spin delta channels are dropped: at the times
    where the saddle form applies they are interference-cancelled by the
    near-cone part of the smooth kernel, a cancellation the truncated saddle
    form cannot reproduce, so keeping them would plant spurious spikes at
    x = +-t.
    """
    x = params.x_grid.points
    edge = 0.95 * t
    n_src = max(int(min_nodes), int(math.ceil(nodes_per_unit_time * t)) + 1)
    if n_src % 2 == 0:
        n_src += 1
    x_src = np.linspace(-edge, edge, n_src)
    h = x_src[1] - x_src[0]
    weights = np.full(n_src, 2.0)
    weights[1::2] = 4.0
    weights[0] = weights[-1] = 1.0
    weights *= h / 3.0

    eta_vec = params.eta_in.as_array()
    ct = math.cos(params.theta)
    phase = np.exp(-1j * ct * x_src) / (2.0 * math.pi)
    smooth = phase[:, None] * (xi_saddle(x_src, t, params.theta) @ eta_vec)
    weighted = smooth * weights[:, None]

    def packet(y):
        return gaussian_packet_values(params.delta_x, y, t, params.mass)

    values = np.empty((x.size, 2), dtype=complex)
    for start in range(0, x.size, block):
        chunk = x[start:start + block]
        g = packet(chunk[:, None] - x_src[None, :])
        values[start:start + block] = g @ weighted
    return SpinorField(grid=params.x_grid, values=values, time_stamp=float(t))


def _approx_density(params, t, report):
    """Regime-appropriate closed-form density on the params grid.

    ZENO: spin-locked packets riding x = +-t.  ERGODIC: the two-packet
    far-field form (exact two-Gaussian field for a spin-up start, the same
    packet shapes reweighted by the field-axis projections otherwise).
    INTERMEDIATE: saddle-point kernel convolved with the packet, which needs
    t >= 5; earlier times get NaN rather than an invalid formula.
    """
    x = params.x_grid.points
    eta_vec = params.eta_in.as_array()
    if report.regime == ZENO:
        up = np.abs(gaussian_packet_values(params.delta_x, x - t, t, params.mass)) ** 2
        down = np.abs(gaussian_packet_values(params.delta_x, x + t, t, params.mass)) ** 2
        return abs(eta_vec[0]) ** 2 * up + abs(eta_vec[1]) ** 2 * down
    if report.regime == ERGODIC:
        if abs(eta_vec[0]) > 1.0 - 1e-12:
            approx = ergodic_wavefunction(params.x_grid, t, params.theta,
                                          params.delta_x)
            return position_density(approx)
        along, against = field_aligned_spinors(params.theta)
        w_plus = abs(np.vdot(along, eta_vec)) ** 2
        w_minus = abs(np.vdot(against, eta_vec)) ** 2
        st2 = math.sin(params.theta) ** 2
        re_gamma = params.delta_x**2 / (4.0 * t**2 * st2**2 + params.delta_x**4)
        norm = math.sqrt(2.0 * re_gamma / math.pi)
        ct = math.cos(params.theta)
        return norm * (w_plus * np.exp(-2.0 * re_gamma * (x - t * ct) ** 2)
                       + w_minus * np.exp(-2.0 * re_gamma * (x + t * ct) ** 2))
    if t < 5:
        return np.full(x.shape, np.nan)
    return position_density(_saddle_convolution(params, t))


def run_density_profile(config):
    t = config.time_at
    params = SimParams.for_time_horizon(
        config.theta, config.delta_x, t_max=t, mass=config.mass,
        eta_in=_eta_from(config))
    exact = evolve_momentum(params, t)
    p_exact = position_density(exact)
    report = classify_regime(config.delta_x, config.theta, _thresholds_from(config))
    p_approx = _approx_density(params, t, report)
    rows = [
        (x, pe, pa, v[0].real, v[0].imag, v[1].real, v[1].imag)
        for x, pe, pa, v in zip(exact.x, p_exact, p_approx, exact.values)
    ]
    return ExperimentResult(
        experiment="density-profile",
        filename="density_profile",
        columns=DENSITY_COLUMNS,
        rows=rows,
        manifest={
            "grid": _grid_manifest(params),
            "time": t,
            "regime": report.regime,
            "predicted_peaks": [list(p) for p in report.predicted_peaks],
            "total_norm": exact.total_norm(),
        },
    )


# --------------------------------------------------------------- regime-sweep

SWEEP_COLUMNS = ("delta_x", "theta", "regime", "sigma_z_plateau",
                 "sigma_z_predicted", "peak_plus", "peak_minus",
                 "decoherence_law")


def _sweep_row(args):
    """One (delta_x, theta) row; module-level so worker processes can run it.

    Any per-row failure is folded into the row itself (NaN numbers and an
    error note in the law column) so the sweep always completes.
    """
    delta_x, theta, mass, zeno_max, ergodic_min, ergodic_tan = args
    thresholds = RegimeThresholds(zeno_max_width=zeno_max,
                                  ergodic_min_width=ergodic_min,
                                  ergodic_tan_factor=ergodic_tan)
    try:
        report = classify_regime(delta_x, theta, thresholds)
        t_end = max(40.0, 5.0 * delta_x)
        times = np.round(np.arange(0.0, t_end + 0.05, 0.1), 10)
        params = SimParams.for_time_horizon(theta, delta_x, t_max=t_end, mass=mass)
        trace = spin_trace(params, times)
        plateau = detect_plateau(trace.times, trace.sigma_z)

        t_meas = max(15.0, 4.0 * delta_x)
        dens_field = evolve_momentum(params, t_meas)
        peaks = find_density_peaks(dens_field.x, position_density(dens_field))
        if report.regime == ZENO:
            peak_plus = max(peaks, key=lambda p: p[1])[0] if peaks else math.nan
            peak_minus = math.nan
        else:
            target = t_meas * math.cos(theta)
            peak_plus = min(peaks, key=lambda p: abs(p[0] - target))[0] \
                if peaks else math.nan
            peak_minus = min(peaks, key=lambda p: abs(p[0] + target))[0] \
                if peaks else math.nan

        mask = trace.times >= SWEEP_FIT_START
        window = SpinTrace(times=trace.times[mask], sigma_x=trace.sigma_x[mask],
                           sigma_y=trace.sigma_y[mask], sigma_z=trace.sigma_z[mask],
                           mean_position=trace.mean_position[mask])
        try:
            law = fit_decoherence(window, component="y").law
        except ValueError as exc:
            law = f"error: {exc}".replace(",", ";")
        return (delta_x, theta, report.regime, plateau.value,
                report.predicted_sigma_z_limit, peak_plus, peak_minus, law)
    except Exception as exc:  # keep the sweep alive; the row records the failure
        note = f"error: {exc}".replace(",", ";").replace("\n", " ")
        return (delta_x, theta, "ERROR", math.nan, math.nan, math.nan,
                math.nan, note)


def run_regime_sweep(config):
    thresholds = _thresholds_from(config)
    combos = [
        (dx, th, config.mass, thresholds.zeno_max_width,
         thresholds.ergodic_min_width, thresholds.ergodic_tan_factor)
        for dx in config.sweep_delta_x for th in config.sweep_theta
    ]
    cap = min(worker_cap(), len(combos))
    if cap <= 1:
        rows = [_sweep_row(args) for args in combos]
    else:
        with ProcessPoolExecutor(max_workers=cap) as pool:
            rows = list(pool.map(_sweep_row, combos))
    return ExperimentResult(
        experiment="regime-sweep",
        filename="regime_sweep",
        columns=SWEEP_COLUMNS,
        rows=rows,
        manifest={
            "combinations": len(combos),
            "workers": cap,
            "thresholds": {
                "zeno_max": thresholds.zeno_max_width,
                "ergodic_min": thresholds.ergodic_min_width,
                "ergodic_tan": thresholds.ergodic_tan_factor,
            },
        },
    )


# ---------------------------------------------------------------- feasibility


def run_feasibility(config):
    phys = PhysicalParams(
        laser_wavelength=config.phys["wavelength"],
        atom_mass=config.phys["atom_mass"],
        trap_frequency=config.phys["trap_frequency"],
        larmor_half=config.phys["larmor_half"],
        v_so=config.phys["v_so"],
    )
    t_max = config.time_at if config.time_at > 0 else 20.0
    params, report = to_dimensionless(phys, theta=config.theta,
                                      eta_in=_eta_from(config), t_max=t_max)
    k_r = 2.0 * math.pi / phys.laser_wavelength
    payload = {
        "experiment": "feasibility",
        "report": {
            "recoil_energy": report.recoil_energy,
            "delta_x_physical": report.delta_x_physical,
            "delta_x_in_recoil_lengths": report.delta_x_physical * k_r,
            "delta_x_dimensionless": report.delta_x_dimensionless,
            "spreading_ratio": report.spreading_ratio,
            "x_so": report.x_so,
            "regime_hint": report.regime_hint,
        },
        "dimensionless": {
            "theta": config.theta,
            "delta_x": params.delta_x,
            "mass": params.mass if math.isfinite(params.mass) else None,
        },
    }
    return ExperimentResult(
        experiment="feasibility",
        filename="feasibility",
        payload=payload,
        manifest={"grid": _grid_manifest(params)},
    )


# --------------------------------------------------------------- kernel-table

KERNEL_COLUMNS = ("x", "xi11_re", "xi11_im", "xi12_re", "xi12_im",
                  "xi21_re", "xi21_im", "xi22_re", "xi22_im")


def run_kernel_table(config):
    x = np.linspace(config.kernel_x_min, config.kernel_x_max, config.kernel_n)
    kv = kernel_xi(x, config.time_at, config.theta)
    rows = []
    for i, xi in enumerate(x):
        m = kv.regular[i]
        rows.append((float(xi),
                     m[0, 0].real, m[0, 0].imag, m[0, 1].real, m[0, 1].imag,
                     m[1, 0].real, m[1, 0].imag, m[1, 1].real, m[1, 1].imag))
    return ExperimentResult(
        experiment="kernel-table",
        filename="kernel_table",
        columns=KERNEL_COLUMNS,
        rows=rows,
        manifest={
            "time": config.time_at,
            "theta": config.theta,
            "delta_plus_weight": [kv.delta_plus_weight.real,
                                  kv.delta_plus_weight.imag],
            "delta_minus_weight": [kv.delta_minus_weight.real,
                                   kv.delta_minus_weight.imag],
            "points_inside_cone": int(np.count_nonzero(kv.support_flag)),
        },
    )


# ---------------------------------------------------------------- path-oracle

PATH_COLUMNS = ("sigma_z_avg", "up_re", "up_im", "down_re", "down_im",
                "probability")


def run_path_oracle(config):
    dist = path_average_distribution(config.theta, config.time_at,
                                     config.steps_count, _eta_from(config))
    rows = []
    for center, amp in zip(dist.bin_centers, dist.amplitudes):
        prob = float(abs(amp[0]) ** 2 + abs(amp[1]) ** 2)
        rows.append((float(center), amp[0].real, amp[0].imag,
                     amp[1].real, amp[1].imag, prob))
    return ExperimentResult(
        experiment="path-oracle",
        filename="path_oracle",
        columns=PATH_COLUMNS,
        rows=rows,
        manifest={
            "time": config.time_at,
            "steps": dist.step_count,
        },
    )


_RUNNERS = {
    "spin-trace": run_spin_trace,
    "density-profile": run_density_profile,
    "regime-sweep": run_regime_sweep,
    "feasibility": run_feasibility,
    "kernel-table": run_kernel_table,
    "path-oracle": run_path_oracle,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    return _RUNNERS[config.experiment](config)
