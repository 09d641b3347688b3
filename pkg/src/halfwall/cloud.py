"""Particle configurations, sampling, and the N-body approximate fields.

Conventions: the wall is x1 = 0, gravity acts along -e3 (parallel to the
wall), every particle carries the same force -e3/N.  Configurations are
immutable once built; all randomness flows through numpy Generators seeded
explicitly, so runs are reproducible.
"""

import numpy as np
from scipy.integrate import quad
from scipy.stats import wasserstein_distance

from . import kernels
from .stokeslet import SphereSource, finite_sphere_field

E_GRAV = np.array([0.0, 0.0, 1.0])

# mass of the unit bump exp(1 - 1/(1 - t^2)) on (-1, 1)
_BUMP_MASS = quad(lambda t: np.exp(1.0 - 1.0 / (1.0 - t * t)), -1.0, 1.0)[0]


def bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = np.abs(t) < 1.0
    out[m] = np.exp(1.0 - 1.0 / (1.0 - t[m] ** 2))
    return out


class DensityField:
    """Smooth product-bump density with compact support.

    rho(x) = amplitude * prod_d bump((x_d - center_d) / widths_d), supported
    on the closed box center +- widths.
    """

    def __init__(self, center, widths, amplitude=1.0):
        self.center = np.asarray(center, dtype=float)
        self.widths = np.asarray(widths, dtype=float)
        self.amplitude = float(amplitude)
        if np.any(self.widths <= 0) or self.amplitude < 0:
            raise ValueError("widths must be positive and amplitude nonnegative")
        if self.center[0] - self.widths[0] < 0:
            raise ValueError("support must stay inside the half space")
        self.support_lo = self.center - self.widths
        self.support_hi = self.center + self.widths

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        t = (x - self.center) / self.widths
        return self.amplitude * bump(t[..., 0]) * bump(t[..., 1]) * bump(t[..., 2])

    def mass(self):
        return self.amplitude * np.prod(self.widths) * _BUMP_MASS**3

    def max_value(self):
        return self.amplitude

    def normalized(self):
        return DensityField(self.center, self.widths, self.amplitude / self.mass())


class UniformDensity:
    """Constant density on a box, mainly for sampler tests."""

    def __init__(self, lo, hi, amplitude=1.0):
        self.support_lo = np.asarray(lo, dtype=float)
        self.support_hi = np.asarray(hi, dtype=float)
        self.amplitude = float(amplitude)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.all((x >= self.support_lo) & (x <= self.support_hi), axis=-1)
        return self.amplitude * inside

    def mass(self):
        return self.amplitude * np.prod(self.support_hi - self.support_lo)

    def max_value(self):
        return self.amplitude

    def normalized(self):
        return UniformDensity(self.support_lo, self.support_hi,
                              self.amplitude / self.mass())


class GridDensity:
    """Density given by samples on a uniform grid, trilinear in between."""

    def __init__(self, origin, spacing, values):
        self.origin = np.asarray(origin, dtype=float)
        self.spacing = np.asarray(spacing, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if np.any(self.values < 0):
            raise ValueError("density samples must be nonnegative")
        self.support_lo = self.origin
        self.support_hi = self.origin + self.spacing * (np.array(self.values.shape) - 1)

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        t = (x - self.origin) / self.spacing
        out = np.zeros(x.shape[0])
        shape = np.array(self.values.shape)
        ok = np.all((t >= 0) & (t <= shape - 1), axis=-1)
        if ok.any():
            ti = t[ok]
            i0 = np.minimum(ti.astype(int), shape - 2)
            w = ti - i0
            acc = np.zeros(ti.shape[0])
            for c0 in (0, 1):
                for c1 in (0, 1):
                    for c2 in (0, 1):
                        wt = (np.where(c0, w[:, 0], 1 - w[:, 0])
                              * np.where(c1, w[:, 1], 1 - w[:, 1])
                              * np.where(c2, w[:, 2], 1 - w[:, 2]))
                        acc += wt * self.values[i0[:, 0] + c0, i0[:, 1] + c1,
                                                i0[:, 2] + c2]
            out[ok] = acc
        return out if out.size > 1 else out[0]

    def mass(self):
        return self.values.sum() * np.prod(self.spacing)

    def max_value(self):
        return self.values.max()


class ParticleConfig:
    """Immutable particle cloud with its geometric hypothesis parameters."""

    def __init__(self, centers, radius, theta, eps, support_lo, support_hi,
                 seed=None, c_d=0.3):
        self.centers = np.array(centers, dtype=float)
        self.centers.setflags(write=False)
        self.radius = float(radius)
        self.theta = float(theta)
        self.eps = float(eps)
        self.support_lo = np.asarray(support_lo, dtype=float)
        self.support_hi = np.asarray(support_hi, dtype=float)
        self.seed = seed
        self.c_d = float(c_d)

    @property
    def n(self):
        return self.centers.shape[0]

    def volume_fraction(self):
        return self.n * self.radius**3

    def d_min(self):
        c = self.centers
        best = np.inf
        for i in range(0, c.shape[0], 512):
            chunk = c[i:i + 512]
            d = np.linalg.norm(chunk[:, None, :] - c[None, :, :], axis=-1)
            rows = np.arange(i, min(i + 512, c.shape[0]))
            d[rows - i, rows] = np.inf
            best = min(best, d.min())
        return best


def validate(config):
    """Check the geometric hypotheses; returns a violation report."""
    report = {"ok": True, "violations": []}
    thr = config.theta * config.radius
    if not config.eps > thr:
        report["violations"].append(
            ("layer clearance", f"eps - theta*R = {config.eps - thr:.3e} <= 0"))
    dmin = config.d_min() if config.n >= 2 else np.inf
    required = max(config.c_d * config.n ** (-1.0 / 3.0), 2.0 * thr)
    report["d_min"] = dmin
    report["d_min_required"] = required
    if dmin < required:
        report["violations"].append(
            ("minimal distance", f"d_min = {dmin:.3e} < {required:.3e}"))
    inside = np.all((config.centers >= config.support_lo)
                    & (config.centers <= config.support_hi), axis=-1)
    if not inside.all():
        report["violations"].append(
            ("support box", f"{int((~inside).sum())} centers outside K"))
    if np.any(config.centers[:, 0] < config.eps):
        report["violations"].append(
            ("depletion layer", "center below the layer x1 >= eps"))
    report["ok"] = not report["violations"]
    return report


class InfeasibleSampling(RuntimeError):
    pass


def sample(rho, n, seed, d_min_target, radius=None, theta=2.0, eps=None,
           c_d=0.3):
    """Dart-throwing sample of n centers from rho with a minimal distance.

    Proposals are i.i.d. from rho by rejection under its bounding box; darts
    closer than d_min_target to an accepted center are discarded.  Fails
    after 200*n rejections.  Deterministic for a fixed seed.  c_d is stored
    on the returned configuration so validate() checks the same separation
    constant the caller sampled with.
    """
    volume = np.prod(np.asarray(rho.support_hi) - np.asarray(rho.support_lo))
    if n * (d_min_target / 2.0) ** 3 > 0.3 * volume:
        raise InfeasibleSampling(
            f"packing check failed: {n} darts at spacing {d_min_target} "
            f"in volume {volume:.3g}")
    if radius is None:
        radius = d_min_target / (4.0 * theta)
    if eps is None:
        eps = 1.05 * max(theta * radius * 1.5, 1e-6)
    rng = np.random.default_rng(seed)
    rho_max = rho.max_value()
    lo = np.asarray(rho.support_lo, dtype=float)
    hi = np.asarray(rho.support_hi, dtype=float)

    cell = d_min_target if d_min_target > 0 else np.inf
    grid = {}
    accepted = []
    rejections = 0
    budget = 200 * n
    while len(accepted) < n:
        x = rng.uniform(lo, hi)
        if rng.uniform() * rho_max > rho(x) or x[0] < eps:
            rejections += 1
        else:
            if d_min_target > 0:
                key = tuple((x // cell).astype(int))
                clash = False
                for dk0 in (-1, 0, 1):
                    for dk1 in (-1, 0, 1):
                        for dk2 in (-1, 0, 1):
                            for j in grid.get((key[0] + dk0, key[1] + dk1,
                                               key[2] + dk2), ()):
                                if np.linalg.norm(x - accepted[j]) < d_min_target:
                                    clash = True
                                    break
                            if clash:
                                break
                        if clash:
                            break
                    if clash:
                        break
                if clash:
                    rejections += 1
                else:
                    grid.setdefault(key, []).append(len(accepted))
                    accepted.append(x)
                    continue
            else:
                accepted.append(x)
                continue
        if rejections > budget:
            raise InfeasibleSampling(
                f"gave up after {rejections} rejections with "
                f"{len(accepted)}/{n} accepted")
    return ParticleConfig(np.array(accepted), radius, theta, eps, lo, hi,
                          seed=seed, c_d=c_d)


def iid_sample(rho, n, rng):
    """Plain i.i.d. rejection sample from rho, no distance constraint."""
    rho_max = rho.max_value()
    lo = np.asarray(rho.support_lo, dtype=float)
    hi = np.asarray(rho.support_hi, dtype=float)
    out = np.empty((n, 3))
    produced = 0
    while produced < n:
        batch = max(256, 2 * (n - produced))
        x = rng.uniform(lo, hi, (batch, 3))
        keep = x[rng.uniform(0, rho_max, batch) <= rho(x)]
        take = min(len(keep), n - produced)
        out[produced:produced + take] = keep[:take]
        produced += take
    return out


def _forces(config, e):
    return np.broadcast_to(-np.asarray(e, dtype=float) / config.n,
                           (config.n, 3))


def v_n(x, config, f_field=None, e=E_GRAV):
    """Exact point-Stokeslet superposition -1/N sum_i G(x, X_i) e."""
    x = np.asarray(x, dtype=float)
    out = kernels.greens_apply(x.reshape(-1, 3), config.centers,
                               _forces(config, e))
    if f_field is not None:
        out = out + np.asarray(f_field(x)).reshape(-1, 3)
    return out.reshape(x.shape)


def u_app(x, config, f_field=None, e=E_GRAV):
    """Finite-size superposition with the common force -e/N per particle."""
    x = np.asarray(x, dtype=float)
    flat = x.reshape(-1, 3)
    if kernels.min_separation(flat, config.centers) < config.radius:
        raise ValueError("evaluation point inside a particle")
    out = kernels.greens_apply_finite(flat, config.centers, _forces(config, e),
                                      np.full(config.n, config.radius))
    if f_field is not None:
        out = out + np.asarray(f_field(x)).reshape(-1, 3)
    return out.reshape(x.shape)


def single_sphere_source(config, i=0, e=E_GRAV):
    return SphereSource(config.centers[i], config.radius,
                        -np.asarray(e, dtype=float) / config.n,
                        safety=config.theta)


def interaction_sum(config, i):
    """(1/N) sum over j != i of |X_i - X_j|^-2."""
    if config.n < 2:
        raise ValueError("need at least two particles")
    d2 = np.sum((config.centers - config.centers[i]) ** 2, axis=-1)
    d2[i] = np.inf
    return float(np.sum(1.0 / d2)) / config.n


def interaction_max(config):
    return max(interaction_sum(config, i) for i in range(config.n))


def sliced_w1(points_a, points_b, n_slices, seed):
    """Sliced 1D Wasserstein distance between two point clouds."""
    rng = np.random.default_rng(seed)
    total = 0.0
    for _ in range(n_slices):
        d = rng.standard_normal(3)
        d /= np.linalg.norm(d)
        total += wasserstein_distance(points_a @ d, points_b @ d)
    return total / n_slices


def estimate_w1(config, rho, n_slices=32, seed=0, n_reference=10_000):
    """Monte Carlo sliced-W1 distance of the empirical measure to rho."""
    ref_rng = np.random.default_rng([seed, 10_007])
    reference = iid_sample(rho.normalized(), n_reference, ref_rng)
    return sliced_w1(config.centers, reference, n_slices, seed)


def save_config(config, path):
    with open(path, "w") as fh:
        fh.write("halfwall particle configuration v1\n")
        fh.write(f"n {config.n}\n")
        fh.write("radius %.17g\n" % config.radius)
        fh.write("theta %.17g\n" % config.theta)
        fh.write("eps %.17g\n" % config.eps)
        fh.write("c_d %.17g\n" % config.c_d)
        fh.write(f"seed {config.seed}\n")
        fh.write("support_lo %.17g %.17g %.17g\n" % tuple(config.support_lo))
        fh.write("support_hi %.17g %.17g %.17g\n" % tuple(config.support_hi))
        fh.write("centers\n")
        for c in config.centers:
            fh.write("%.17g %.17g %.17g\n" % tuple(c))


def load_config(path):
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "halfwall particle configuration v1":
            raise ValueError(f"unrecognized config header: {header}")
        meta = {}
        for _ in range(8):
            key, *vals = fh.readline().split()
            meta[key] = vals
        if fh.readline().strip() != "centers":
            raise ValueError("malformed config: missing centers block")
        centers = np.loadtxt(fh, ndmin=2)
    seed = None if meta["seed"][0] == "None" else int(meta["seed"][0])
    cfg = ParticleConfig(centers, float(meta["radius"][0]),
                         float(meta["theta"][0]), float(meta["eps"][0]),
                         [float(v) for v in meta["support_lo"]],
                         [float(v) for v in meta["support_hi"]],
                         seed=seed, c_d=float(meta["c_d"][0]))
    if cfg.n != int(meta["n"][0]):
        raise ValueError("center count does not match header")
    return cfg
