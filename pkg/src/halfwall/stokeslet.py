"""Velocity field of one sedimenting sphere near the wall.

The leading term is the wall Green's function applied to the net force.
The finite-size correction is the classical source-dipole term: applying
(1 + radius^2/6 lap_y) to the kernel reproduces the exact free-space
solution of a translating sphere and keeps the wall trace identically
zero.  The omitted image corrections are higher order in radius over
clearance, which the decay diagnostics below make measurable.
"""

import numpy as np

from .greens import greens, greens_source_laplacian, oseen_tensor, _oseen_laplacian


class SphereSource:
    """A rigid sphere subject to a net force, with wall clearance.

    Parameters
    ----------
    center : array_like, shape (3,)
        Sphere center, first coordinate is the wall distance.
    radius : float
        Sphere radius.
    force : array_like, shape (3,)
        Net force on the fluid.
    safety : float
        Clearance factor theta > 1; requires center[0] > safety * radius.
    """

    def __init__(self, center, radius, force, safety=2.0):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.force = np.asarray(force, dtype=float)
        self.safety = float(safety)
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.safety <= 1:
            raise ValueError("safety factor must exceed 1")
        if not self.center[0] > self.safety * self.radius:
            raise ValueError("wall clearance violated: center[0] <= safety * radius")


def point_stokeslet(x, src):
    """Leading-order field G(x, center) force."""
    return greens(x, src.center) @ src.force


def finite_sphere_field(x, src):
    """Point field plus the radius^2/6 source-dipole correction.

    Raises if any evaluation point lies inside the sphere.
    """
    x = np.asarray(x, dtype=float)
    d = np.linalg.norm(x - src.center, axis=-1)
    if np.any(d < src.radius * (1.0 - 1e-12)):
        raise ValueError("evaluation point inside the sphere")
    G = greens(x, src.center)
    lap = greens_source_laplacian(x, src.center)
    return (G + src.radius**2 / 6.0 * lap) @ src.force


def free_sphere_field(x, src):
    """Free-space part only: exact translating-sphere solution.

    On the surface this is the rigid velocity force/(6 pi radius).
    """
    x = np.asarray(x, dtype=float)
    r = x - src.center
    d = np.linalg.norm(r, axis=-1)
    if np.any(d < src.radius * (1.0 - 1e-12)):
        raise ValueError("evaluation point inside the sphere")
    phi = oseen_tensor(r)
    lap = _oseen_laplacian(r)
    return (phi + src.radius**2 / 6.0 * lap) @ src.force


def surface_points(src, n_samples):
    """Spiral (Fibonacci) sample of the sphere surface."""
    k = np.arange(n_samples) + 0.5
    cos_t = 1.0 - 2.0 * k / n_samples
    sin_t = np.sqrt(1.0 - cos_t**2)
    golden = np.pi * (3.0 - np.sqrt(5.0))
    ang = golden * k
    normals = np.stack([sin_t * np.cos(ang), sin_t * np.sin(ang), cos_t], axis=-1)
    return src.center + src.radius * normals


def rigid_deviation(src, n_samples=200, free_space_only=False):
    """Max distance of the surface velocity from the best rigid motion.

    Fits v + omega x (x - center) by least squares over spiral samples and
    returns the largest pointwise residual.  The wall image strains the
    sphere at order radius / clearance^2, so the deviation shrinks
    linearly in radius at fixed center.
    """
    if n_samples < 100:
        raise ValueError("need at least 100 surface samples")
    pts = surface_points(src, n_samples)
    field = free_sphere_field if free_space_only else finite_sphere_field
    u = field(pts, src)
    rel = pts - src.center
    # rows: u_i = v_i + (omega x rel)_i
    A = np.zeros((3 * n_samples, 6))
    for i in range(3):
        A[i::3, i] = 1.0
    A[0::3, 4] = rel[:, 2]
    A[0::3, 5] = -rel[:, 1]
    A[1::3, 3] = -rel[:, 2]
    A[1::3, 5] = rel[:, 0]
    A[2::3, 3] = rel[:, 1]
    A[2::3, 4] = -rel[:, 0]
    coef, *_ = np.linalg.lstsq(A, u.reshape(-1), rcond=None)
    fit = (A @ coef).reshape(-1, 3)
    return np.linalg.norm(u - fit, axis=-1).max()
