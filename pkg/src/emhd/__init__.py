"""Pseudo-spectral electron-MHD solver on the 2pi-torus with a
Littlewood-Paley diagnostic toolkit.

Sign convention (important): the magnetic-field equation

    B_t + d_i curl((curl B) x B) = mu Laplacian(B)

is canonical.  The Coulomb-gauge potential is therefore advanced as
dA/dt = -d_i P((curl B) x B) + mu Laplacian(A), whose curl reproduces the
B equation; advancing A with the opposite sign on the Hall force would flip
the Hall term of the induced B equation.
"""

__version__ = "0.1.0"

from .grid import Grid, SpectralField, abc_field, from_physical, single_mode_field, zero_field
from .operators import (
    biot_savart,
    curl,
    divergence,
    gradient,
    hall_nonlinearity,
    identity_residual,
    inner_product,
    l2_norm,
    laplacian,
    leray_project,
    lp_norm,
)
from .littlewood_paley import (
    BesovSpec,
    LPFamily,
    bernstein_margin,
    besov_norm,
    besov_time_norm,
    decompose_low_high,
    kernel_convolve,
    low_pass,
    project_shell,
    shell_amplitudes,
)
from .mollify import MollifierSpec, SingularCurve, mollify, singular_cutoff
from .solver import SolverConfig, Trajectory, evolve, evolve_potential, step, whistler_dt_limit
from .diagnostics import (
    budget,
    cross_energy_residual,
    energy_inequality_residual,
    flux_spectrum,
    generalized_helicity_residual,
    scaling_residual,
    shell_commutator,
    uniqueness_bound_check,
)
from .regions import classify as region_classify
