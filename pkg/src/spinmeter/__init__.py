"""Numerical laboratory for a spin-orbit-coupled atom whose own position
acts as the measuring pointer of its spin.

A spin-1/2 sits in a tilted static field while a momentum-proportional term
drags each spin component in opposite directions, so the center of mass
slowly records the spin history.  The package evolves Gaussian packets
exactly (momentum-integral and position-kernel routes), extracts reduced
spin dynamics and densities, and checks the closed-form limits: spin-locked
(Zeno) transport for narrow packets, two counter-moving spin-sorted packets
for wide ones, and the interference window in between.
"""

from .asymptotics import (
    ERGODIC,
    GAUSSIAN,
    INTERMEDIATE,
    MIXED,
    POWER_LAW,
    ZENO,
    DecoherenceFit,
    RegimeReport,
    RegimeThresholds,
    classify_regime,
    ergodic_wavefunction,
    fit_decoherence,
    i_asymptotic,
    oscillatory_I,
    sigma_z_limit,
    stationary_points,
    steady_state_rho,
    xi_saddle,
)
from .core import (
    INFINITE,
    FeasibilityReport,
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
from .observables import (
    PlateauResult,
    SpinTrace,
    detect_plateau,
    ehrenfest_position,
    mean_position,
    position_density,
    purity,
    reduced_density_matrix,
    spin_expectations,
    spin_trace,
)
from .propagator import (
    KernelValue,
    SpinorField,
    SubstateField,
    eta_substates,
    evolve_convolution,
    evolve_momentum,
    evolve_momentum_direct,
    kernel_xi,
)
from .spin_dynamics import (
    PathDistribution,
    PathSumResult,
    evolution_operator,
    field_aligned_spinors,
    omega,
    path_average_distribution,
    spin_evolve,
    trotter_path_sum,
)

__version__ = "0.1.0"

__all__ = [
    "ERGODIC", "GAUSSIAN", "INTERMEDIATE", "MIXED", "POWER_LAW", "ZENO",
    "DecoherenceFit", "RegimeReport", "RegimeThresholds", "classify_regime",
    "ergodic_wavefunction", "fit_decoherence", "i_asymptotic", "oscillatory_I",
    "sigma_z_limit", "stationary_points", "steady_state_rho", "xi_saddle",
    "INFINITE", "FeasibilityReport", "GridCoverageError", "MomentumGrid",
    "PhysicalParams", "SimParams", "SpatialGrid", "Spinor", "SPIN_DOWN",
    "SPIN_UP", "gaussian_packet_values", "make_gaussian_packet",
    "make_gaussian_spectrum", "rubidium87", "to_dimensionless", "to_physical",
    "PlateauResult", "SpinTrace", "detect_plateau", "ehrenfest_position",
    "mean_position", "position_density", "purity", "reduced_density_matrix",
    "spin_expectations", "spin_trace",
    "KernelValue", "SpinorField", "SubstateField", "eta_substates",
    "evolve_convolution", "evolve_momentum", "evolve_momentum_direct",
    "kernel_xi",
    "PathDistribution", "PathSumResult", "evolution_operator",
    "field_aligned_spinors", "omega", "path_average_distribution",
    "spin_evolve", "trotter_path_sum",
    "__version__",
]
