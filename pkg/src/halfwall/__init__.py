"""Stokes flow above a flat no-slip wall.

Library for the image-system Green's function of the half space, finite-size
sphere fields, sedimenting particle clouds, a body-force/Dirichlet continuum
solver, the boundary-layer corrector cascade behind the effective wall laws,
and the convergence experiments tying them together.
"""

from halfwall.greens import (
    blake_correction,
    greens,
    greens_gradient,
    greens_gradient_y,
    greens_pressure,
    greens_source_laplacian,
    image_point,
    oseen_pressure,
    oseen_tensor,
    pressure_kernel,
    reflect_vector,
)
from halfwall.stokeslet import (
    SphereSource,
    finite_sphere_field,
    free_sphere_field,
    point_stokeslet,
    rigid_deviation,
)
from halfwall.cloud import (
    DensityField,
    GridDensity,
    InfeasibleSampling,
    ParticleConfig,
    UniformDensity,
    estimate_w1,
    iid_sample,
    interaction_max,
    interaction_sum,
    load_config,
    sample,
    save_config,
    u_app,
    v_n,
    validate,
)
from halfwall.continuum import (
    DirichletSolution,
    GridField,
    TangentialField,
    divergence_fd,
    norms,
    plane_trace,
    solve_body_force,
    solve_dirichlet_halfspace,
    solve_navier,
    wall_derivative,
    wall_traces,
)
from halfwall.cascade import (
    BLProfile,
    CascadeState,
    cascade_step,
    divergence_residual,
    expansion_eval,
    stress_residual,
    u1_system,
    u2_system,
    uniform_settling_state,
)
from halfwall.analytic import (
    ChannelShearProblem,
    DimensionalParams,
    channel_fd_solver,
    intrinsic_convection_dimensional,
    intrinsic_convection_dimless,
    poiseuille_dirichlet,
    poiseuille_navier,
    settling_speed,
)
from halfwall.experiments import (
    ExperimentConfig,
    SlopeFit,
    exp_analytic,
    exp_eps_convergence,
    exp_particle_convergence,
    exp_r_sensitivity,
)

__version__ = "0.1.0"

__all__ = [
    "BLProfile",
    "CascadeState",
    "ChannelShearProblem",
    "DensityField",
    "DimensionalParams",
    "DirichletSolution",
    "ExperimentConfig",
    "GridDensity",
    "GridField",
    "InfeasibleSampling",
    "ParticleConfig",
    "SlopeFit",
    "SphereSource",
    "TangentialField",
    "UniformDensity",
    "blake_correction",
    "cascade_step",
    "channel_fd_solver",
    "divergence_fd",
    "divergence_residual",
    "estimate_w1",
    "exp_analytic",
    "exp_eps_convergence",
    "exp_particle_convergence",
    "exp_r_sensitivity",
    "expansion_eval",
    "finite_sphere_field",
    "free_sphere_field",
    "greens",
    "greens_gradient",
    "greens_gradient_y",
    "greens_pressure",
    "greens_source_laplacian",
    "iid_sample",
    "image_point",
    "interaction_max",
    "interaction_sum",
    "intrinsic_convection_dimensional",
    "intrinsic_convection_dimless",
    "load_config",
    "norms",
    "oseen_pressure",
    "oseen_tensor",
    "plane_trace",
    "point_stokeslet",
    "poiseuille_dirichlet",
    "poiseuille_navier",
    "pressure_kernel",
    "reflect_vector",
    "rigid_deviation",
    "sample",
    "save_config",
    "settling_speed",
    "solve_body_force",
    "solve_dirichlet_halfspace",
    "solve_navier",
    "stress_residual",
    "u1_system",
    "u2_system",
    "u_app",
    "uniform_settling_state",
    "v_n",
    "validate",
    "wall_derivative",
    "wall_traces",
]
