"""Green's function of the Stokes system in the half space above a flat wall.

The wall is the plane x1 = 0, the fluid fills x1 > 0, viscosity is 1.  The
velocity Green's tensor is assembled from the free-space Oseen tensor, its
image across the wall with a mirrored force, and a harmonic (Papkovich-Neuber
type) correction that cancels the remaining wall trace:

    G(x, y) = Phi(x - y) - Phi(x - yI) M - A(x, y),

where yI is the mirror image of y, M = diag(-1, 1, 1) mirrors the force, and
column j of A is x1 * grad(phi_j) - e1 * phi_j for scalar harmonic potentials
phi_j built from the image point.  All derivatives used here are expanded by
hand in closed form; finite differences appear only in the tests as oracles.

Every function broadcasts over leading axes: points have shape (..., 3),
tensors come back as (..., 3, 3) and gradients as (..., 3, 3, 3).
"""

import numpy as np

FOUR_PI = 4.0 * np.pi
EIGHT_PI = 8.0 * np.pi

# Mirroring across the wall flips the normal component.
_MIRROR = np.array([-1.0, 1.0, 1.0])

# Chain-rule signs of d z / d y_k for z = x - image(y):  z1 = x1 + y1.
_DZ_DY = np.array([1.0, -1.0, -1.0])

_EYE = np.eye(3)

# Separation guard: pairs closer than this (relative to the source scale)
# are rejected rather than evaluated.
GUARD_REL = 1.0e-8


def image_point(y):
    """Mirror image of a source point across the wall plane x1 = 0."""
    return np.asarray(y, dtype=float) * _MIRROR


def reflect_vector(f):
    """Mirror a force/direction vector: flips the wall-normal component."""
    return np.asarray(f, dtype=float) * _MIRROR


def _norm(v):
    return np.sqrt(np.sum(v * v, axis=-1))


def _check_separation(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = _norm(x - y)
    scale = np.maximum(1.0, _norm(y))
    if np.any(d < GUARD_REL * scale):
        raise ValueError("evaluation point too close to the singularity")
    return x, y


def _check_halfspace(x, y):
    if np.any(np.asarray(x)[..., 0] < -1.0e-14):
        raise ValueError("evaluation point below the wall")
    if np.any(np.asarray(y)[..., 0] <= 0.0):
        raise ValueError("source point must lie strictly above the wall")


def oseen_tensor(x):
    """Free-space Oseen tensor Phi(x).

    Parameters
    ----------
    x : array, shape (..., 3)
        Separation vector(s), nonzero.

    Returns
    -------
    array, shape (..., 3, 3)
        (1/8 pi) (I/|x| + x x^T / |x|^3).
    """
    x = np.asarray(x, dtype=float)
    d = _norm(x)
    if np.any(d == 0.0):
        raise ValueError("Oseen tensor is singular at the origin")
    d = d[..., None, None]
    outer = x[..., :, None] * x[..., None, :]
    return (_EYE / d + outer / d**3) / EIGHT_PI


def oseen_pressure(x):
    """Pressure companion of the Oseen tensor: x / (4 pi |x|^3)."""
    x = np.asarray(x, dtype=float)
    d = _norm(x)
    if np.any(d == 0.0):
        raise ValueError("pressure kernel is singular at the origin")
    return x / (FOUR_PI * d[..., None] ** 3)


def _oseen_gradient(x):
    """d Phi_ij / d x_k, laid out as [..., k, i, j]."""
    x = np.asarray(x, dtype=float)
    d = _norm(x)[..., None, None, None]
    xi = x[..., None, :, None]  # index i
    xj = x[..., None, None, :]  # index j
    xk = x[..., :, None, None]  # index k
    dik = _EYE[:, :, None]
    djk = _EYE[:, None, :]
    dij = _EYE[None, :, :]
    return (
        -dij * xk / d**3
        + (dik * xj + djk * xi) / d**3
        - 3.0 * xi * xj * xk / d**5
    ) / EIGHT_PI


def _oseen_laplacian(x):
    """Laplacian of the Oseen tensor, (1/4 pi)(I/|x|^3 - 3 x x^T/|x|^5)."""
    x = np.asarray(x, dtype=float)
    d = _norm(x)[..., None, None]
    outer = x[..., :, None] * x[..., None, :]
    return (_EYE / d**3 - 3.0 * outer / d**5) / FOUR_PI


def _phi_tables(x, y):
    """Harmonic potentials phi_j of the wall correction and their derivatives.

    Returns (phi, dphi, d2phi, dphi_db, ddphi_db) where, with z = x - image(y),
    b = y1 and s = (-1, 1, 1):

        phi[..., j]          = (1/4pi)(-delta_{j1}/R + b s_j z_j / R^3)
        dphi[..., i, j]      = d phi_j / d z_i
        d2phi[..., k, i, j]  = d^2 phi_j / d z_k d z_i
        dphi_db[..., j]      = d phi_j / d b
        ddphi_db[..., i, j]  = d^2 phi_j / d z_i d b
    """
    z = x - image_point(y)
    b = np.asarray(y, dtype=float)[..., 0]
    R = _norm(z)

    R1 = R[..., None]
    R2 = R[..., None, None]
    R3 = R[..., None, None, None]
    b1 = b[..., None]
    b2 = b[..., None, None]
    b3 = b[..., None, None, None]

    zi = z[..., :, None]
    zj = z[..., None, :]
    zk3 = z[..., :, None, None]
    zi3 = z[..., None, :, None]
    zj3 = z[..., None, None, :]

    e1 = _EYE[0]  # delta_{j1} over the force index
    s = _MIRROR

    phi = (-e1 / R1 + b1 * s * z / R1**3) / FOUR_PI

    dphi = (
        e1 * zi / R2**3
        + b2 * s * (_EYE / R2**3 - 3.0 * zi * zj / R2**5)
    ) / FOUR_PI

    dij = _EYE[None, :, :]
    dkj = _EYE[:, None, :]
    dik = _EYE[:, :, None]
    d2phi = (
        e1 * (dik / R3**3 - 3.0 * zk3 * zi3 / R3**5)
        + b3
        * s
        * (-3.0 * (dij * zk3 + dkj * zi3 + dik * zj3) / R3**5
           + 15.0 * zk3 * zi3 * zj3 / R3**7)
    ) / FOUR_PI

    dphi_db = s * z / (FOUR_PI * R1**3)
    ddphi_db = s * (_EYE / R2**3 - 3.0 * zi * zj / R2**5) / FOUR_PI

    return phi, dphi, d2phi, dphi_db, ddphi_db


def blake_correction(x, y):
    """Wall correction tensor A(x, y); column j is x1 grad(phi_j) - e1 phi_j."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    phi, dphi, _, _, _ = _phi_tables(x, y)
    x1 = x[..., 0][..., None, None]
    A = x1 * dphi
    A[..., 0, :] -= phi
    return A


def greens(x, y):
    """Wall Green's tensor G(x, y) for the half space x1 > 0.

    Parameters
    ----------
    x : array, shape (..., 3)
        Evaluation point(s), x1 >= 0.
    y : array, shape (..., 3)
        Source point(s), y1 > 0.

    Returns
    -------
    array, shape (..., 3, 3)
        G(x, y)F is the velocity at x of the Stokes flow driven by a point
        force F at y with no-slip wall at x1 = 0.  Columns are divergence
        free, vanish on the wall, and decay like 1/|x - y|.
    """
    x, y = _check_separation(x, y)
    _check_halfspace(x, y)
    z = x - image_point(y)
    return oseen_tensor(x - y) - oseen_tensor(z) * _MIRROR - blake_correction(x, y)


def greens_gradient(x, y):
    """d G_ij / d x_k, laid out as [..., k, i, j]."""
    x, y = _check_separation(x, y)
    _check_halfspace(x, y)
    z = x - image_point(y)
    phi, dphi, d2phi, _, _ = _phi_tables(x, y)
    x1 = x[..., 0][..., None, None, None]

    dA = x1 * d2phi
    # d/dx_k picks up the explicit x1 factor for k = 0 ...
    dA[..., 0, :, :] += dphi
    # ... and the -delta_{i1} phi_j term differentiates to -dphi[k, j].
    dA[..., :, 0, :] -= dphi

    return _oseen_gradient(x - y) - _oseen_gradient(z) * _MIRROR - dA


def greens_gradient_y(x, y):
    """d G_ij / d y_k, laid out as [..., k, i, j]."""
    x, y = _check_separation(x, y)
    _check_halfspace(x, y)
    z = x - image_point(y)
    phi, dphi, d2phi, dphi_db, ddphi_db = _phi_tables(x, y)
    x1 = x[..., 0][..., None, None, None]
    eps = _DZ_DY[:, None, None]

    dA = x1 * eps * d2phi
    dA[..., 0, :, :] += x1[..., 0, :, :] * ddphi_db
    dA[..., :, 0, :] -= eps[:, 0, :] * dphi
    dA[..., 0, 0, :] -= dphi_db

    return (
        -_oseen_gradient(x - y)
        - _oseen_gradient(z) * _MIRROR * _DZ_DY[:, None, None]
        - dA
    )


def greens_source_laplacian(x, y):
    """Laplacian of G(x, y) in the source variable y.

    Used for the finite-size (source dipole) correction of a small sphere:
    the field (1 + r^2/6 Lap_y) G(x, y) F keeps the exact translating-sphere
    solution as its free-space part and still vanishes identically on the
    wall, since G(., y) does for every y.
    """
    x, y = _check_separation(x, y)
    _check_halfspace(x, y)
    z = x - image_point(y)
    R1 = _norm(z)[..., None]
    R2 = R1[..., None]
    z1 = z[..., 0]
    zi = z[..., :, None]
    zj = z[..., None, :]
    e1_row = _EYE[0][None, :]  # delta_{1j}
    e1_col = _EYE[0][:, None]  # delta_{i1}

    # Lap_y phi_j = 2 d/dz1 d/db phi_j; same for the z_i derivative table.
    lap_phi = _MIRROR * (_EYE[0] / R1**3
                         - 3.0 * z1[..., None] * z / R1**5) / (2.0 * np.pi)
    lap_dphi = (
        _MIRROR
        * (-3.0 * (_EYE * z1[..., None, None] + e1_row * zi + e1_col * zj) / R2**5
           + 15.0 * z1[..., None, None] * zi * zj / R2**7)
        / (2.0 * np.pi)
    )

    x1 = x[..., 0][..., None, None]
    lap_A = x1 * lap_dphi
    lap_A[..., 0, :] -= lap_phi

    return (
        _oseen_laplacian(x - y)
        - _oseen_laplacian(z) * _MIRROR
        - lap_A
    )


def pressure_kernel(x, y):
    """Pressure companion of G as a covector: q(x; y, F) = pressure_kernel . F.

    Assembled from the free and image Oseen pressures plus the correction
    pressure 2 d(phi)/dx1, matching -Lap(GF) + grad q = delta_y F together
    with greens().
    """
    x, y = _check_separation(x, y)
    _check_halfspace(x, y)
    z = x - image_point(y)
    _, dphi, _, _, _ = _phi_tables(x, y)
    return (
        oseen_pressure(x - y)
        - oseen_pressure(z) * _MIRROR
        - 2.0 * dphi[..., 0, :]
    )


def greens_pressure(x, y, f):
    """Pressure at x of the wall-bounded point-force flow G(x, y) f."""
    f = np.asarray(f, dtype=float)
    return np.sum(pressure_kernel(x, y) * f, axis=-1)
