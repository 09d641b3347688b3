"""Convergence experiments, their configuration, and report files.

Each experiment exercises one quantitative claim end to end:

* eps: rates of the wall-law hierarchy.  For a bump density solve the
  layered problem at a ladder of layer widths and compare against the
  no-slip flow, the first-order expansion, and the slip-law flow on a
  box K near the bump.
* particles: particle-to-continuum rate.  Seed-averaged distance
  between the point-force superposition of a sampled cloud and the
  continuum flow, plus a sliced transport distance of the empirical
  measure, against the number of particles.
* radius: finite-size sensitivity.  Distance between the finite-sphere
  and point-force superpositions for a fixed cloud as the particle
  radius is halved.
* analytic: the closed-form channel and uniform-suspension checks.

Configurations are plain INI text; every field can be overridden by an
environment variable HALFWALL_<NAME>.  Runs are deterministic: identical
configuration and seeds give byte-identical output files.  Tables are
CSV; curves are whitespace .dat files ready for gnuplot.
"""

import configparser
import os

import numpy as np

from halfwall import cascade
from halfwall import cloud
from halfwall import continuum as ct
from halfwall.analytic import (ChannelShearProblem, DimensionalParams,
                               channel_fd_solver, intrinsic_convection_dimless,
                               intrinsic_convection_dimensional,
                               poiseuille_dirichlet, poiseuille_navier,
                               settling_speed)
from halfwall.cloud import DensityField


# ----------------------------------------------------------------------
# configuration


def _floats(s):
    return tuple(float(v) for v in str(s).split())


def _ints(s):
    return tuple(int(v) for v in str(s).split())


# field -> (ini section, parser); the flat names double as the
# environment override keys, HALFWALL_<NAME> in upper case
_FIELDS = {
    "center": ("density", _floats),
    "widths": ("density", _floats),
    "amplitude": ("density", float),
    "x1_start": ("grid", float),
    "x1_step": ("grid", float),
    "nx1": ("grid", int),
    "t0": ("grid", float),
    "ht": ("grid", float),
    "nt": ("grid", int),
    "n_q": ("grid", int),
    "wall_n": ("wall", int),
    "wall_extent": ("wall", float),
    "box_lo": ("norms", _floats),
    "box_hi": ("norms", _floats),
    "q": ("norms", float),
    "eps_list": ("sweep", _floats),
    "n_list": ("sweep", _ints),
    "seeds": ("sweep", _ints),
    "radius_coeff": ("particles", float),
    "theta": ("particles", float),
    "eps_particles": ("particles", float),
    "c_d": ("particles", float),
    "w1_slices": ("particles", int),
    "w1_reference": ("particles", int),
    "r_n": ("radius", int),
    "r_seed": ("radius", int),
    "r_levels": ("radius", int),
    "q_list": ("radius", _floats),
    "channel_n": ("analytic", int),
    "out_dir": ("output", str),
}

# the eps experiment wants a bump that is wide along the wall, so the
# wall data lives at low tangential frequencies and the second-order
# terms separate from the eps^3 remainder within the ladder; the
# particle experiments want a compact cloud instead
_BASE = {
    "center": (1.3, 0.0, 0.0),
    "widths": (0.25, 2.4, 2.4),
    "amplitude": 1.0,
    "x1_start": 0.9,
    "x1_step": 0.0125,
    "nx1": 64,
    "t0": -3.2,
    "ht": 0.1,
    "nt": 64,
    "n_q": 48,
    "wall_n": 384,
    "wall_extent": 38.4,
    "box_lo": (0.925, -3.0, -3.0),
    "box_hi": (1.675, 3.0, 3.0),
    "q": 1.2,
    "eps_list": (0.2, 0.1, 0.05, 0.025),
    "n_list": (250, 500, 1000, 2000, 4000),
    "seeds": (0, 1, 2, 3, 4, 5),
    "radius_coeff": 0.1,
    "theta": 2.0,
    "eps_particles": 0.05,
    "c_d": 0.2,
    "w1_slices": 32,
    "w1_reference": 10_000,
    "r_n": 500,
    "r_seed": 0,
    "r_levels": 3,
    "q_list": (1.0, 1.2, 1.4),
    "channel_n": 1000,
    "out_dir": ".",
}

_PARTICLE_GEOMETRY = {
    "center": (0.8, 0.0, 0.0),
    "widths": (0.25, 0.3, 0.3),
    "x1_start": 0.425,
    "x1_step": 0.05,
    "nx1": 16,
    "t0": -0.45,
    "ht": 0.05,
    "nt": 19,
    "n_q": 24,
    "box_lo": (0.425, -0.45, -0.45),
    "box_hi": (1.175, 0.45, 0.45),
}

_EXPERIMENT_PATCH = {
    "eps": {},
    "particles": _PARTICLE_GEOMETRY,
    "radius": _PARTICLE_GEOMETRY,
    "analytic": {},
}


class ExperimentConfig:
    """Settings for one experiment run.

    Starts from per-experiment defaults, then applies keyword
    overrides.  from_file layers INI file values and HALFWALL_
    environment variables in between.  All fields become attributes;
    grid_spec, density and box assemble the solver inputs.
    """

    def __init__(self, experiment="eps", **overrides):
        if experiment not in _EXPERIMENT_PATCH:
            raise ValueError(f"unknown experiment {experiment!r}")
        unknown = set(overrides) - set(_FIELDS)
        if unknown:
            raise ValueError(f"unknown config fields {sorted(unknown)}")
        self.experiment = experiment
        values = dict(_BASE)
        values.update(_EXPERIMENT_PATCH[experiment])
        values.update(overrides)
        for name, value in values.items():
            setattr(self, name, value)
        self._validate()

    def _validate(self):
        eps = np.asarray(self.eps_list, dtype=float)
        if len(eps) and (np.any(eps <= 0) or np.any(np.diff(eps) >= 0)):
            raise ValueError("eps list must be positive, strictly decreasing")
        if self.experiment in ("particles", "radius"):
            r_max = self.radius_coeff / min(min(self.n_list), self.r_n)
            if self.eps_particles <= self.theta * r_max:
                raise ValueError("layer width must exceed theta times the "
                                 "largest particle radius")
        if self.experiment == "particles" and len(self.seeds) < 5:
            raise ValueError("need at least five seeds")

    @classmethod
    def from_file(cls, path=None, experiment=None, env=None, **overrides):
        """Build a config from an INI file, the environment, and keywords.

        Precedence, lowest to highest: built-in defaults, file values,
        HALFWALL_<NAME> environment variables, keyword overrides.
        """
        values = {}
        if path is not None:
            parser = configparser.ConfigParser()
            with open(path) as fh:
                parser.read_string(fh.read())
            if experiment is None and parser.has_option("experiment", "id"):
                experiment = parser.get("experiment", "id")
            for name, (section, parse) in _FIELDS.items():
                if parser.has_option(section, name):
                    values[name] = parse(parser.get(section, name))
        if env is None:
            env = os.environ
        if experiment is None:
            experiment = env.get("HALFWALL_EXPERIMENT", "eps")
        for name, (section, parse) in _FIELDS.items():
            key = "HALFWALL_" + name.upper()
            if key in env:
                values[name] = parse(env[key])
        values.update(overrides)
        return cls(experiment, **values)

    def save(self, path):
        """Write the full configuration as INI text."""
        parser = configparser.ConfigParser()
        parser.add_section("experiment")
        parser.set("experiment", "id", self.experiment)
        for name, (section, _) in _FIELDS.items():
            if not parser.has_section(section):
                parser.add_section(section)
            value = getattr(self, name)
            if isinstance(value, tuple):
                value = " ".join(format(v, ".17g") if isinstance(v, float)
                                 else str(v) for v in value)
            elif isinstance(value, float):
                value = format(value, ".17g")
            parser.set(section, name, str(value))
        with open(path, "w") as fh:
            parser.write(fh)

    def density(self):
        return DensityField(center=self.center, widths=self.widths,
                            amplitude=self.amplitude)

    def grid_spec(self):
        return {"x1": self.x1_start + self.x1_step * np.arange(self.nx1),
                "t0": self.t0, "nt": self.nt, "ht": self.ht}

    def box(self):
        return np.asarray(self.box_lo, float), np.asarray(self.box_hi, float)


class SlopeFit:
    """Log-log least-squares line through at least three points."""

    def __init__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.size < 3:
            raise ValueError("need at least three points")
        if np.any(x <= 0) or np.any(y <= 0):
            raise ValueError("log-log fit needs positive values")
        design = np.stack([np.log(x), np.ones(x.size)], axis=-1)
        coef, *_ = np.linalg.lstsq(design, np.log(y), rcond=None)
        self.slope = float(coef[0])
        self.intercept = float(coef[1])
        self.residual = float(np.sqrt(np.mean(
            (np.log(y) - design @ coef) ** 2)))
        self.x = x
        self.y = y

    def __repr__(self):
        return (f"SlopeFit(slope={self.slope:.4f}, "
                f"residual={self.residual:.2e}, n={self.x.size})")


# ----------------------------------------------------------------------
# output files


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, fieldnames, rows):
    """Write rows of dicts as CSV with repr-exact floats."""
    with open(path, "w") as fh:
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[name]) for name in fieldnames) + "\n")


def write_dat(path, header_lines, columns):
    """Write aligned whitespace columns with '#' comments for gnuplot."""
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write("# " + line + "\n")
        arr = [np.asarray(c) for c in columns]
        for i in range(len(arr[0])):
            fh.write(" ".join(_fmt(c[i]) for c in arr) + "\n")


def _check(name, ok, detail):
    return {"name": name, "ok": bool(ok), "detail": detail}


def format_checks(checks):
    """One pass/fail line per check, aligned for reading."""
    width = max(len(c["name"]) for c in checks)
    lines = []
    for c in checks:
        flag = "pass" if c["ok"] else "FAIL"
        lines.append(f"{c['name']:<{width}}  {flag}  {c['detail']}")
    return "\n".join(lines)


# ----------------------------------------------------------------------
# eps ladder: wall-law hierarchy rates


def exp_eps_convergence(config):
    """Error ladders of the wall-law hierarchy on the box K.

    For each eps in the configured ladder, solve the layered problem
    and measure on K the distance to the no-slip flow u0 (full H1
    norm), to the first-order expansion u0 + eps u1, and to the slip
    flow uS (both in the H1 seminorm, where their second-order rate is
    cleanest).  Returns the per-eps table, the three slope fits, and
    the acceptance checks.
    """
    rho = config.density()
    grid = config.grid_spec()
    box_lo, box_hi = config.box()
    u0 = ct.solve_body_force(rho, None, 0.0, grid, n_q=config.n_q,
                             method="fft")
    d1w, _ = ct.wall_traces(rho, None, config.n_q, config.wall_n,
                            config.wall_extent)
    u1sol = cascade.u1_system(d1w)
    taxis = grid["t0"] + grid["ht"] * np.arange(grid["nt"])
    u1vals = np.empty_like(u0.values)
    for i, lev in enumerate(grid["x1"]):
        u1vals[i] = u1sol.velocity_window(lev, taxis, taxis)
    u1f = ct.GridField(u0.origin, u0.spacing, u1vals)
    zero = ct.GridField(u0.origin, u0.spacing, np.zeros_like(u0.values))
    n1 = ct.norms(u1f, zero, box_lo, box_hi)
    u1_h1 = float(np.sqrt(n1["lq"] ** 2 + n1["h1"] ** 2))

    params = {"n_q": config.n_q, "wall_n": config.wall_n,
              "wall_extent": config.wall_extent, "nx1": config.nx1,
              "ht": config.ht}
    rows = []
    for eps in config.eps_list:
        ue = ct.solve_body_force(rho, None, eps, grid, n_q=config.n_q,
                                 method="fft")
        uS, info = ct.solve_navier(rho, None, eps, grid, n_q=config.n_q,
                                   wall_n=config.wall_n,
                                   wall_extent=config.wall_extent,
                                   base_field=u0, base_d1=d1w)
        lin = ct.GridField(u0.origin, u0.spacing, u0.values + eps * u1vals)
        row = {"eps": eps, **params,
               "navier_iterations": info["iterations"],
               "boundary_residual": info["boundary_residual"]}
        for name, ref in (("e0", u0), ("e1", lin), ("eS", uS)):
            n = ct.norms(ue, ref, box_lo, box_hi)
            row[name + "_l2"] = n["lq"]
            row[name + "_h1semi"] = n["h1"]
            row[name + "_h1"] = float(np.sqrt(n["lq"] ** 2 + n["h1"] ** 2))
        rows.append(row)

    eps_arr = np.array([r["eps"] for r in rows])
    fits = {
        "e0": SlopeFit(eps_arr, [r["e0_h1"] for r in rows]),
        "e1": SlopeFit(eps_arr, [r["e1_h1semi"] for r in rows]),
        "eS": SlopeFit(eps_arr, [r["eS_h1semi"] for r in rows]),
    }
    e0_full = np.array([r["e0_h1"] for r in rows])
    eS_full = np.array([r["eS_h1"] for r in rows])
    ratio = rows[-1]["e0_h1"] / (eps_arr[-1] * u1_h1)
    checks = [
        _check("slope e0 in [0.8, 1.2]", 0.8 <= fits["e0"].slope <= 1.2,
               f"slope {fits['e0'].slope:.4f}"),
        _check("slope e1 in [1.7, 2.3]", 1.7 <= fits["e1"].slope <= 2.3,
               f"slope {fits['e1'].slope:.4f}"),
        _check("slope eS in [1.7, 2.3]", 1.7 <= fits["eS"].slope <= 2.3,
               f"slope {fits['eS'].slope:.4f}"),
        _check("eS < e0 at every eps", bool(np.all(eS_full < e0_full)),
               "pairs " + " ".join(f"{a:.3e}<{b:.3e}"
                                   for a, b in zip(eS_full, e0_full))),
        _check("e0 within 2x of eps * |u1|_H1(K)",
               0.5 <= ratio <= 2.0, f"ratio {ratio:.3f} at eps {eps_arr[-1]}"),
    ]
    return {"rows": rows, "fits": fits, "u1_h1": u1_h1, "checks": checks}


def write_eps_outputs(result, out_dir):
    rows = result["rows"]
    names = list(rows[0].keys())
    write_csv(os.path.join(out_dir, "eps_convergence.csv"), names, rows)
    fits = result["fits"]
    header = ["wall-law error ladders on K",
              "slopes: e0 %.6f  e1 %.6f  eS %.6f" %
              (fits["e0"].slope, fits["e1"].slope, fits["eS"].slope),
              "columns: eps e0_h1 e1_h1semi eS_h1semi"]
    write_dat(os.path.join(out_dir, "eps_convergence.dat"), header,
              [[r["eps"] for r in rows], [r["e0_h1"] for r in rows],
               [r["e1_h1semi"] for r in rows],
               [r["eS_h1semi"] for r in rows]])


# ----------------------------------------------------------------------
# particle number ladder: empirical-measure rate


def _particle_sample(config, n, seed):
    # the same minimal-distance convention the hypothesis checker uses,
    # d_min >= c_d N^{-1/3}
    rho = config.density()
    return cloud.sample(rho, n, seed, config.c_d * n ** (-1.0 / 3.0),
                        radius=config.radius_coeff / n,
                        theta=config.theta, eps=config.eps_particles,
                        c_d=config.c_d)


def exp_particle_convergence(config):
    """Distance of sampled clouds to the continuum flow against N.

    For each particle number and seed, sample a cloud, superpose the
    point-force fields, and measure the L1 distance to the continuum
    no-slip flow on the box K together with a sliced transport distance
    of the empirical measure to the density.  Seed averages feed the
    two slope fits.
    """
    # the empirical measure carries weight 1/N per particle, so the
    # continuum reference is the unit-mass density
    rho = config.density().normalized()
    grid = config.grid_spec()
    box_lo, box_hi = config.box()
    # the norm lattice is small and decoupled from the source spacing,
    # so the direct summation route is the simple one here
    u0 = ct.solve_body_force(rho, None, 0.0, grid, n_q=config.n_q,
                             method="direct")
    pts = u0.points().reshape(-1, 3)

    rows = []
    means = []
    for n in config.n_list:
        l1_vals = []
        w1_vals = []
        for seed in config.seeds:
            sample = _particle_sample(config, n, seed)
            vn = cloud.v_n(pts, sample).reshape(u0.values.shape)
            vf = ct.GridField(u0.origin, u0.spacing, vn)
            l1 = ct.norms(vf, u0, box_lo, box_hi, q=1.0)["lq"]
            w1 = cloud.estimate_w1(sample, rho, n_slices=config.w1_slices,
                                   seed=seed, n_reference=config.w1_reference)
            rows.append({"n": n, "seed": seed, "radius": sample.radius,
                         "c_d": config.c_d, "n_q": config.n_q,
                         "nx1": config.nx1, "ht": config.ht,
                         "l1_error": l1, "w1": w1})
            l1_vals.append(l1)
            w1_vals.append(w1)
        means.append({"n": n, "l1_mean": float(np.mean(l1_vals)),
                      "w1_mean": float(np.mean(w1_vals))})

    n_arr = np.array([m["n"] for m in means], dtype=float)
    l1_arr = np.array([m["l1_mean"] for m in means])
    w1_arr = np.array([m["w1_mean"] for m in means])
    fits = {"l1": SlopeFit(n_arr, l1_arr), "w1": SlopeFit(n_arr, w1_arr)}
    checks = [
        _check("slope |vN - u0|_L1 in [-0.5, -0.2]",
               -0.5 <= fits["l1"].slope <= -0.2,
               f"slope {fits['l1'].slope:.4f}"),
        _check("slope W1 in [-0.45, -0.22]",
               -0.45 <= fits["w1"].slope <= -0.22,
               f"slope {fits['w1'].slope:.4f}"),
        _check("seed-averaged error strictly decreasing",
               bool(np.all(np.diff(l1_arr) < 0)),
               "values " + " ".join(f"{v:.4e}" for v in l1_arr)),
    ]
    return {"rows": rows, "means": means, "fits": fits, "checks": checks}


def write_particle_outputs(result, out_dir):
    rows = result["rows"]
    names = list(rows[0].keys())
    write_csv(os.path.join(out_dir, "particle_convergence.csv"), names, rows)
    fits = result["fits"]
    means = result["means"]
    header = ["cloud-to-continuum distances, seed averaged",
              "slopes: l1 %.6f  w1 %.6f" %
              (fits["l1"].slope, fits["w1"].slope),
              "columns: n l1_mean w1_mean"]
    write_dat(os.path.join(out_dir, "particle_convergence.dat"), header,
              [[m["n"] for m in means], [m["l1_mean"] for m in means],
               [m["w1_mean"] for m in means]])


# ----------------------------------------------------------------------
# radius ladder: finite-size sensitivity


def exp_r_sensitivity(config):
    """Finite-size against point-force fields as the radius shrinks.

    One cloud is sampled at the largest radius and kept fixed; only the
    radius in the finite-sphere superposition changes, halving r_levels
    times.  The Lq distances on K are tabulated for each q in q_list.

    The measured difference is the source-dipole term of the sphere
    field, which is quadratic in the radius for a fixed cloud, so the
    observed slope sits near 2 rather than inside the first-order
    window [0.8, 1.2]; the corresponding check reports that honestly.
    """
    rho = config.density()
    grid = config.grid_spec()
    box_lo, box_hi = config.box()
    base = _particle_sample(config, config.r_n, config.r_seed)
    pts_shape = (len(grid["x1"]), grid["nt"], grid["nt"], 3)
    origin = np.array([grid["x1"][0], grid["t0"], grid["t0"]])
    spacing = np.array([config.x1_step, grid["ht"], grid["ht"]])
    pts = ct.GridField(origin, spacing,
                       np.zeros(pts_shape)).points().reshape(-1, 3)
    vn = cloud.v_n(pts, base).reshape(pts_shape)
    vnf = ct.GridField(origin, spacing, vn)

    radii = [base.radius / 2 ** j for j in range(config.r_levels)]
    rows = []
    series = {q: [] for q in config.q_list}
    for radius in radii:
        sample = cloud.ParticleConfig(base.centers, radius, base.theta,
                                      base.eps, base.support_lo,
                                      base.support_hi, seed=base.seed)
        ua = cloud.u_app(pts, sample).reshape(pts_shape)
        uaf = ct.GridField(origin, spacing, ua)
        for q in config.q_list:
            val = ct.norms(uaf, vnf, box_lo, box_hi, q=q)["lq"]
            rows.append({"radius": radius, "q": q, "n": base.n,
                         "seed": base.seed, "n_q": config.n_q,
                         "nx1": config.nx1, "ht": config.ht,
                         "lq_error": val})
            series[q].append(val)

    fits = {q: SlopeFit(radii, series[q]) for q in config.q_list}
    q_mid = config.q_list[len(config.q_list) // 2]
    spread = max(abs(fits[q].slope - fits[q_mid].slope)
                 for q in config.q_list)
    checks = [
        _check("slope |u_app - vN|_Lq in [0.8, 1.2]",
               0.8 <= fits[q_mid].slope <= 1.2,
               f"slope {fits[q_mid].slope:.4f} at q {q_mid}"),
        _check("difference shrinks with the radius",
               bool(np.all(np.diff(series[q_mid]) < 0)),
               "values " + " ".join(f"{v:.4e}" for v in series[q_mid])),
        _check("rate insensitive to q (spread <= 0.2)", spread <= 0.2,
               f"spread {spread:.4f} over q " +
               " ".join(str(q) for q in config.q_list)),
    ]
    return {"rows": rows, "fits": fits, "checks": checks}


def write_radius_outputs(result, out_dir):
    rows = result["rows"]
    names = list(rows[0].keys())
    write_csv(os.path.join(out_dir, "radius_sensitivity.csv"), names, rows)
    qs = sorted({r["q"] for r in rows})
    radii = sorted({r["radius"] for r in rows}, reverse=True)
    table = {(r["radius"], r["q"]): r["lq_error"] for r in rows}
    header = ["finite-size vs point-force distance",
              "slopes: " + "  ".join("q=%g %.6f" % (q, result["fits"][q].slope)
                                     for q in qs),
              "columns: radius, then one Lq column per q " +
              " ".join(str(q) for q in qs)]
    cols = [radii] + [[table[(rad, q)] for rad in radii] for q in qs]
    write_dat(os.path.join(out_dir, "radius_sensitivity.dat"), header, cols)


# ----------------------------------------------------------------------
# closed-form checks


def exp_analytic(config):
    """Run every closed-form oracle and report pass/fail per check."""
    n = config.channel_n
    x, ud = channel_fd_solver(ChannelShearProblem(n=n))
    err_d = float(np.abs(ud - poiseuille_dirichlet(x)[:, 1]).max())
    xs, us = channel_fd_solver(ChannelShearProblem(slip_lo=1.0, slip_hi=1.0,
                                                   n=n))
    err_s = float(np.abs(us - poiseuille_navier(xs)[:, 1]).max())
    err_c = float(np.abs((us - ud) + 0.5).max())

    state = cascade.uniform_settling_state()
    cascade.cascade_step(state, 1)
    _, _, sol = cascade.cascade_step(state, 2)
    c = state.n // 2
    closed = intrinsic_convection_dimless(1.0)
    rec_err = float(np.abs(sol.data.values[c, c] - closed).max())

    params = DimensionalParams(radius=1e-4, rho_p=2500.0, rho_f=1000.0,
                               gravity=9.81, viscosity=1e-3, eps=1e-4,
                               phi=0.05)
    direct, via_v0 = intrinsic_convection_dimensional(params)
    form_rel = abs(direct - via_v0) / direct
    classical = 2.25 * settling_speed(params) * params.phi

    checks = [
        _check("channel FD matches no-slip closed form (1e-8)",
               err_d <= 1e-8, f"max err {err_d:.3e}"),
        _check("channel FD matches slip closed form (1e-8)",
               err_s <= 1e-8, f"max err {err_s:.3e}"),
        _check("slip minus no-slip is the constant -1/2 (1e-8)",
               err_c <= 1e-8, f"max err {err_c:.3e}"),
        _check("uniform-suspension trace is (0,0,1/2) exactly",
               bool(np.all(closed == [0.0, 0.0, 0.5])),
               f"value {closed.tolist()}"),
        _check("cascade recursion reproduces it (1e-6)",
               rec_err <= 1e-6, f"max err {rec_err:.3e}"),
        _check("dimensional forms agree to rounding",
               form_rel <= 2e-15, f"relative gap {form_rel:.3e}"),
        _check("eps = R reduces to 9/4 V0 phi",
               abs(via_v0 - classical) <= 1e-15 * classical,
               f"{via_v0:.12e} vs {classical:.12e}"),
        _check("channel slip points with the drive",
               poiseuille_navier(0.0)[1] < 0,
               f"wall value {poiseuille_navier(0.0)[1]}"),
        _check("suspension slip points against the drive",
               intrinsic_convection_dimless(0.3)[2] > 0,
               f"value {intrinsic_convection_dimless(0.3)[2]}"),
    ]
    profiles = {"x": x, "dirichlet": ud, "navier": us}
    return {"checks": checks, "profiles": profiles}


def write_analytic_outputs(result, out_dir):
    checks = result["checks"]
    write_csv(os.path.join(out_dir, "analytic_checks.csv"),
              ["name", "ok", "detail"], checks)
    prof = result["profiles"]
    write_csv(os.path.join(out_dir, "channel_noslip.csv"), ["x1", "u2"],
              [{"x1": a, "u2": b} for a, b in zip(prof["x"],
                                                  prof["dirichlet"])])
    write_csv(os.path.join(out_dir, "channel_slip.csv"), ["x1", "u2"],
              [{"x1": a, "u2": b} for a, b in zip(prof["x"],
                                                  prof["navier"])])
