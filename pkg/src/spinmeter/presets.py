"""Canned experiment configs for the scenarios we keep rerunning.

Each preset is stored as literal config text so `--dump-preset` hands the
user something they can edit and feed back through `run --config`.
"""

from __future__ import annotations

from .config import parse_config_text

PRESETS = {
    # Wide-packet decoherence trace: Gaussian envelope collapse of the
    # precessing components, sigma_z settling onto its dephased plateau.
    "fig1": """\
experiment = spin-trace
theta = pi/3
delta_x = 10
time.max = 60
time.count = 1201
""",
    # Narrow packet: the pointer locks the spin and the whole packet walks
    # away at the full spin-orbit velocity.
    "fig2a": """\
experiment = density-profile
theta = pi/3
delta_x = 0.05
time.at = 20
""",
    # Wide packet at late time: two separated packets with cos^2/sin^2 weights.
    "fig2b": """\
experiment = density-profile
theta = pi/3
delta_x = 10
time.at = 60
""",
    # Intermediate width: both channels overlap and fringe.
    "fig2c": """\
experiment = density-profile
theta = pi/3
delta_x = 1
time.at = 80
""",
    # Rubidium-87 lab numbers for a typical Raman setup.
    "feasibility": """\
experiment = feasibility
phys.wavelength = 804.1e-9
phys.atom_mass = 1.4431609e-25
phys.trap_frequency = 223.0853
phys.larmor_half = 2230.853
phys.v_so = 5.7099357e-3
""",
    # Three widths by three tilts; one classified row per combination.
    "sweep": """\
experiment = regime-sweep
sweep.delta_x = 0.05, 1, 10
sweep.theta = pi/6, pi/3, pi/2
""",
    # Exact propagation kernel sampled on a line inside the light cone.
    "kernel": """\
experiment = kernel-table
theta = pi/3
time.at = 20
kernel.x_min = -19
kernel.x_max = 19
kernel.n = 1901
""",
    # Discrete path-sum cross-check of the continuum spin average.
    "paths": """\
experiment = path-oracle
theta = pi/3
time.at = 10
steps.count = 200
""",
}


def preset_names():
    return sorted(PRESETS)


def preset_text(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r} (choose from {', '.join(preset_names())})") from None


def preset_config(name):
    return parse_config_text(preset_text(name))
