"""Experiment runners: configs in, tabular rows out."""

import math

import numpy as np
import pytest

from spinmeter.config import parse_config_text
from spinmeter.experiments import (
    DENSITY_COLUMNS,
    KERNEL_COLUMNS,
    PATH_COLUMNS,
    SPIN_TRACE_COLUMNS,
    SWEEP_COLUMNS,
    find_density_peaks,
    run_experiment,
    worker_cap,
)


def config_from(text, *overrides):
    return parse_config_text(text, overrides)


def test_find_density_peaks_two_gaussians():
    x = np.linspace(-20, 20, 2001)
    y = np.exp(-((x - 5.3) ** 2)) + 0.5 * np.exp(-((x + 7.1) ** 2))
    peaks = find_density_peaks(x, y)
    assert len(peaks) == 2
    positions = sorted(p[0] for p in peaks)
    assert positions[0] == pytest.approx(-7.1, abs=1e-3)
    assert positions[1] == pytest.approx(5.3, abs=1e-3)


def test_find_density_peaks_floor():
    x = np.linspace(0, 10, 1001)
    y = np.exp(-((x - 5.0) ** 2)) + 1e-5 * np.exp(-((x - 9.0) ** 2))
    assert len(find_density_peaks(x, y)) == 1


def test_worker_cap(monkeypatch):
    monkeypatch.delenv("SPINMETER_THREADS", raising=False)
    assert worker_cap() >= 1
    monkeypatch.setenv("SPINMETER_THREADS", "3")
    assert worker_cap() == 3
    monkeypatch.setenv("SPINMETER_THREADS", "0")
    assert worker_cap() == 1
    monkeypatch.setenv("SPINMETER_THREADS", "junk")
    assert worker_cap() == 1


def test_run_spin_trace_rows():
    config = config_from("experiment = spin-trace\ntime.max = 6\ntime.count = 13\n")
    result = run_experiment(config)
    assert result.columns == SPIN_TRACE_COLUMNS
    assert len(result.rows) == 13
    assert result.rows[0][0] == 0.0
    assert result.rows[0][3] == pytest.approx(1.0, abs=1e-12)  # sigma_z(0)
    assert result.rows[-1][0] == pytest.approx(6.0)
    assert "sigma_z_plateau" in result.manifest


def test_run_density_profile_zeno():
    config = config_from(
        "experiment = density-profile\ndelta_x = 0.05\ntime.at = 3\n")
    result = run_experiment(config)
    assert result.columns == DENSITY_COLUMNS
    assert result.manifest["regime"] == "ZENO"
    assert result.manifest["total_norm"] == pytest.approx(1.0, abs=1e-6)
    rows = np.array(result.rows, dtype=float)
    assert np.all(np.isfinite(rows[:, 2]))
    # single packet rides x = +t
    i_max = int(np.argmax(rows[:, 1]))
    assert rows[i_max, 0] == pytest.approx(3.0, abs=0.2)


def test_run_density_profile_intermediate_early_time_is_nan():
    # the far-field form needs t >= 5; earlier times report no approximation
    config = config_from(
        "experiment = density-profile\ndelta_x = 1\ntime.at = 3\n")
    result = run_experiment(config)
    assert result.manifest["regime"] == "INTERMEDIATE"
    approx = np.array([row[2] for row in result.rows], dtype=float)
    assert np.all(np.isnan(approx))
    exact = np.array([row[1] for row in result.rows], dtype=float)
    assert np.all(np.isfinite(exact))


def test_run_kernel_table():
    config = config_from(
        "experiment = kernel-table\ntime.at = 5\n"
        "kernel.x_min = -6\nkernel.x_max = 6\nkernel.n = 121\n")
    result = run_experiment(config)
    assert result.columns == KERNEL_COLUMNS
    assert len(result.rows) == 121
    assert result.manifest["delta_plus_weight"] == [pytest.approx(2 * math.pi), 0.0]
    assert result.manifest["points_inside_cone"] == 101  # |x| <= 5 on the grid


def test_run_path_oracle():
    config = config_from(
        "experiment = path-oracle\ntime.at = 4\nsteps.count = 16\n")
    result = run_experiment(config)
    assert result.columns == PATH_COLUMNS
    assert len(result.rows) == 17
    first, last = result.rows[0], result.rows[-1]
    assert first[0] == -1.0 and last[0] == 1.0
    for row in result.rows:
        assert row[5] == pytest.approx(row[1] ** 2 + row[2] ** 2
                                       + row[3] ** 2 + row[4] ** 2, abs=1e-12)


def test_run_feasibility_payload():
    config = config_from(
        "experiment = feasibility\n"
        "phys.wavelength = 804.1e-9\n"
        "phys.atom_mass = 1.4431609e-25\n"
        "phys.trap_frequency = 223.0853\n"
        "phys.larmor_half = 2230.853\n"
        "phys.v_so = 5.7099357e-3\n")
    result = run_experiment(config)
    assert result.payload is not None
    report = result.payload["report"]
    k_r = 2.0 * math.pi / 804.1e-9
    assert report["delta_x_in_recoil_lengths"] == pytest.approx(
        report["delta_x_physical"] * k_r, rel=1e-12)
    assert report["regime_hint"] in ("ZENO", "ERGODIC", "INTERMEDIATE")
    assert result.payload["dimensionless"]["delta_x"] == pytest.approx(
        report["delta_x_dimensionless"], rel=1e-12)


def test_run_regime_sweep_single_combo(monkeypatch):
    monkeypatch.setenv("SPINMETER_THREADS", "1")
    config = config_from(
        "experiment = regime-sweep\nsweep.delta_x = 10\nsweep.theta = pi/3\n")
    result = run_experiment(config)
    assert result.columns == SWEEP_COLUMNS
    assert len(result.rows) == 1
    row = result.rows[0]
    assert row[0] == 10.0
    assert row[2] == "ERGODIC"
    assert row[3] == pytest.approx(0.2502138132, abs=0.02)  # plateau vs limit
    assert row[4] == pytest.approx(0.2502138132, abs=1e-6)
    # density peak near +t cos(theta) at the measurement time t = 40
    assert row[5] == pytest.approx(20.0, abs=2.5)
    assert row[6] == pytest.approx(-20.0, abs=2.5)
    assert row[7] == "GAUSSIAN"
    assert result.manifest["workers"] == 1


def test_run_regime_sweep_row_failure_is_recorded(monkeypatch):
    monkeypatch.setenv("SPINMETER_THREADS", "1")
    # theta = 0 makes the decoherence fit impossible (nothing precesses);
    # the row must still come back with an error note instead of raising
    config = config_from(
        "experiment = regime-sweep\nsweep.delta_x = 10\nsweep.theta = 0\n")
    result = run_experiment(config)
    row = result.rows[0]
    assert row[2] == "ERGODIC"
    assert isinstance(row[7], str) and row[7].startswith("error:")
    assert "," not in row[7]  # stays a single CSV cell
