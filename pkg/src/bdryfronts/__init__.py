"""Front tracking for 1-D conservation laws on the half-line with
viscosity-consistent boundary conditions, plus a viscous reference solver."""

from .systems import (GENUINELY_NONLINEAR, LINEARLY_DEGENERATE, SystemDef,
                      EigenDecomposition, eigen_structure,
                      classify_boundary_field, make_system, linear_system,
                      burgers, p_system, lagrangian_euler)
from .riemann import (Wave, RiemannFan, wave_curve, solve_riemann, sample_fan,
                      discretize_rarefaction)

__all__ = [
    "GENUINELY_NONLINEAR", "LINEARLY_DEGENERATE", "SystemDef",
    "EigenDecomposition", "eigen_structure", "classify_boundary_field",
    "make_system", "linear_system", "burgers", "p_system", "lagrangian_euler",
    "Wave", "RiemannFan", "wave_curve", "solve_riemann", "sample_fan",
    "discretize_rarefaction",
]

__version__ = "0.1.0"
