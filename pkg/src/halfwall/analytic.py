"""Closed-form channel and uniform-suspension flows used as oracles.

Two textbook situations admit exact solutions and pin down the sign and
size of the wall effects computed numerically elsewhere in the package:

* pressure-driven shear flow in the unit channel, where a slip wall
  shifts the no-slip Poiseuille parabola by a constant, so the velocity
  just outside a particle-depleted layer points with the drive
  (apparent slip), and
* a uniform suspension settling above a wall, where the bulk flow
  vanishes, the pressure is hydrostatic, and the first surviving layer
  correction is a constant velocity of size eps^2/2 pointing against
  the drive (intrinsic convection).

A small one-dimensional finite-difference solver with ghost-node slip
conditions cross-validates the channel closed forms and, with them, the
slip fixed-point logic of the half-space solver in its simplest setting.
"""

import numpy as np
from scipy.linalg import solve_banded


class ChannelShearProblem:
    """Shear flow in the unit channel driven by a constant force.

    The along-channel velocity u(x1) solves -u'' = -drive on (0, 1),
    the one-dimensional reduction of Stokes flow under the constant
    force -drive e2.  Each wall is either no-slip or a slip condition
    u = ell du/dn, with the derivative taken along the inward normal.

    Parameters
    ----------
    drive : float
        Magnitude of the constant driving force.
    slip_lo, slip_hi : float or None
        Slip length at x1 = 0 and x1 = 1; None means no-slip.
    n : int
        Number of grid intervals for the finite-difference solver.
    """

    def __init__(self, drive=1.0, slip_lo=None, slip_hi=None, n=1000):
        for ell in (slip_lo, slip_hi):
            if ell is not None and ell < 0:
                raise ValueError("slip length must be nonnegative")
        if n < 16:
            raise ValueError("need at least 16 grid intervals")
        self.drive = float(drive)
        self.slip_lo = slip_lo
        self.slip_hi = slip_hi
        self.n = int(n)


def poiseuille_dirichlet(x1):
    """No-slip channel flow (0, x1 (x1 - 1) / 2) under unit drive.

    Parameters
    ----------
    x1 : float or ndarray
        Cross-channel coordinate in [0, 1].

    Returns
    -------
    ndarray
        Velocity components, shape x1.shape + (2,).
    """
    x1 = np.asarray(x1, dtype=float)
    if np.any(x1 < 0) or np.any(x1 > 1):
        raise ValueError("channel coordinate outside [0, 1]")
    u2 = 0.5 * x1 * (x1 - 1.0)
    return np.stack([np.zeros_like(u2), u2], axis=-1)


def poiseuille_navier(x1):
    """Channel flow with unit slip length on both walls.

    The profile is the no-slip parabola shifted by the constant
    (0, -1/2): the flow slips along the wall with the drive, and the
    wall value -1/2 equals the shear rate there, which is the slip
    relation u = du/dn satisfied exactly.
    """
    out = poiseuille_dirichlet(x1)
    out[..., 1] -= 0.5
    return out


def channel_fd_solver(problem):
    """Solve a ChannelShearProblem with second-order finite differences.

    Slip walls use a ghost node eliminated through the slip relation and
    the interior stencil, which keeps the scheme second order up to the
    boundary.  For a constant drive the solution is a quadratic, on
    which the three-point stencil is exact, so the returned profile is
    accurate to rounding error of the tridiagonal solve.

    Returns
    -------
    x : ndarray
        The n + 1 grid nodes on [0, 1].
    u : ndarray
        Along-channel velocity at the nodes.
    """
    n = problem.n
    h = 1.0 / n
    rhs = np.full(n + 1, h * h * problem.drive)
    ab = np.zeros((3, n + 1))
    ab[0, 2:] = 1.0
    ab[1, 1:-1] = -2.0
    ab[2, :-2] = 1.0

    def wall(ell, i_wall, band_in):
        if ell is None or ell == 0.0:
            ab[1, i_wall] = 1.0
            ab[band_in] = 0.0
            rhs[i_wall] = 0.0
        else:
            ab[1, i_wall] = -(2.0 + 2.0 * h / ell)
            ab[band_in] = 2.0

    wall(problem.slip_lo, 0, (0, 1))
    wall(problem.slip_hi, n, (2, n - 1))
    u = solve_banded((1, 1), ab, rhs)
    return np.linspace(0.0, 1.0, n + 1), u


def intrinsic_convection_dimless(eps):
    """Slip velocity outside the depleted layer of a uniform suspension.

    With constant particle density and no extra forcing, the bulk flow
    vanishes and the pressure gradient is the constant settling drive,
    so the layer corrections vanish through first order.  The first
    surviving term is driven by the pressure gradient alone and gives
    the constant boundary velocity (0, 0, eps^2 / 2), pointing against
    the drive.

    Parameters
    ----------
    eps : float
        Width of the particle-depleted layer, positive.
    """
    if eps <= 0:
        raise ValueError("layer width must be positive")
    return np.array([0.0, 0.0, 0.5 * eps**2])


class DimensionalParams:
    """Physical constants for the dimensional intrinsic-convection slip.

    Parameters
    ----------
    radius : float
        Particle radius.
    rho_p, rho_f : float
        Particle and fluid mass densities, rho_p > rho_f.
    gravity : float
        Gravitational acceleration.
    viscosity : float
        Dynamic viscosity of the fluid.
    eps : float
        Width of the particle-depleted layer.
    phi : float
        Solid volume fraction, nonnegative.
    """

    def __init__(self, radius, rho_p, rho_f, gravity, viscosity, eps, phi):
        named = dict(radius=radius, rho_p=rho_p, rho_f=rho_f,
                     gravity=gravity, viscosity=viscosity, eps=eps)
        for name, value in named.items():
            if value <= 0:
                raise ValueError(f"{name} must be positive")
        if phi < 0:
            raise ValueError("volume fraction must be nonnegative")
        if rho_p <= rho_f:
            raise ValueError("particles must be denser than the fluid")
        self.radius = float(radius)
        self.rho_p = float(rho_p)
        self.rho_f = float(rho_f)
        self.gravity = float(gravity)
        self.viscosity = float(viscosity)
        self.eps = float(eps)
        self.phi = float(phi)


def settling_speed(params):
    """Stokes settling speed 2 R^2 (rho_p - rho_f) g / (9 mu) of a sphere."""
    return (2.0 * params.radius**2 * (params.rho_p - params.rho_f)
            * params.gravity / (9.0 * params.viscosity))


def intrinsic_convection_dimensional(params):
    """Dimensional slip speed outside the depleted layer, two ways.

    The speed is computed directly from the densities,
    g eps^2 (rho_p - rho_f) phi / (2 mu), and through the settling
    speed V0 of a single sphere as (eps / R)^2 (9/4) V0 phi.  The two
    forms are algebraically identical; for eps = R the second reduces
    to the classical (9/4) V0 phi.

    Returns
    -------
    direct, via_v0 : float
        The same speed from the two expressions; they must agree to
        rounding error.
    """
    p = params
    direct = (p.gravity * p.eps**2 * (p.rho_p - p.rho_f) * p.phi
              / (2.0 * p.viscosity))
    via_v0 = (p.eps / p.radius)**2 * 2.25 * settling_speed(p) * p.phi
    return direct, via_v0
