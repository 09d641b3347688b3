"""Command line front end.

Subcommands: `greens eval` for one-off Green's function evaluations,
`simulate` for a single layered forward solve, and `converge-eps`,
`converge-n`, `converge-r`, `analytic` for the convergence experiments.
Every command accepts --config (INI file), --out (output directory),
--seed and --threads; HALFWALL_<FIELD> environment variables override
file values.  Experiment commands print one pass/fail line per
acceptance check in scope and exit nonzero when any of them fails.
"""

import argparse
import os
import sys

import numpy as np


def _apply_threads(threads):
    if threads is None:
        return
    os.environ.setdefault("NUMBA_NUM_THREADS", str(threads))
    try:
        import numba
        numba.set_num_threads(threads)
    except Exception as exc:
        print(f"thread count not applied: {exc}", file=sys.stderr)


def _config(args, experiment, **overrides):
    from halfwall import experiments
    return experiments.ExperimentConfig.from_file(
        args.config, experiment=experiment, **overrides)


def cmd_greens_eval(args):
    from halfwall.greens import greens
    x = np.asarray(args.x, dtype=float)
    y = np.asarray(args.y, dtype=float)
    mat = greens(x, y)
    print(" ".join(format(v, ".17g") for v in mat.reshape(-1)))
    if args.out is not None:
        from halfwall import experiments
        os.makedirs(args.out, exist_ok=True)
        rows = [{"row": i, "col": j, "value": mat[i, j]}
                for i in range(3) for j in range(3)]
        experiments.write_csv(os.path.join(args.out, "greens_eval.csv"),
                              ["row", "col", "value"], rows)
    return 0


def cmd_simulate(args):
    from halfwall import continuum as ct
    from halfwall import experiments

    config = _config(args, "eps")
    eps = config.eps_list[0]
    rho = config.density()
    grid = config.grid_spec()
    box_lo, box_hi = config.box()
    u0 = ct.solve_body_force(rho, None, 0.0, grid, n_q=config.n_q,
                             method="fft")
    ue = ct.solve_body_force(rho, None, eps, grid, n_q=config.n_q,
                             method="fft")
    uS, info = ct.solve_navier(rho, None, eps, grid, n_q=config.n_q,
                               wall_n=config.wall_n,
                               wall_extent=config.wall_extent,
                               base_field=u0)
    n0 = ct.norms(ue, u0, box_lo, box_hi)
    nS = ct.norms(ue, uS, box_lo, box_hi)
    e0 = float(np.sqrt(n0["lq"] ** 2 + n0["h1"] ** 2))
    eS = float(np.sqrt(nS["lq"] ** 2 + nS["h1"] ** 2))

    os.makedirs(args.out, exist_ok=True)
    mid = grid["nt"] // 2
    x1 = grid["x1"]
    header = ["settling-velocity profile over the wall distance at the "
              "tangential center",
              f"eps {eps:.17g}  n_q {config.n_q}",
              "columns: x1 u_eps u_0 u_slip"]
    experiments.write_dat(
        os.path.join(args.out, "simulate_centerline.dat"), header,
        [x1, ue.values[:, mid, mid, 1], u0.values[:, mid, mid, 1],
         uS.values[:, mid, mid, 1]])
    row = {"eps": eps, "n_q": config.n_q, "nx1": config.nx1,
           "ht": config.ht, "navier_iterations": info["iterations"],
           "boundary_residual": info["boundary_residual"],
           "e0_h1": e0, "eS_h1": eS}
    experiments.write_csv(os.path.join(args.out, "simulate_summary.csv"),
                          list(row.keys()), [row])
    print(f"eps {eps:g}: navier iterations {info['iterations']}, "
          f"boundary residual {info['boundary_residual']:.3e}")
    print(f"|u_eps - u0|_H1(K)    {e0:.6e}")
    print(f"|u_eps - u_slip|_H1(K) {eS:.6e}")
    return 0


def _run_experiment(args, experiment, runner, writer, **overrides):
    from halfwall import experiments
    config = _config(args, experiment, **overrides)
    result = runner(config)
    os.makedirs(args.out, exist_ok=True)
    writer(result, args.out)
    print(experiments.format_checks(result["checks"]))
    return 0 if all(c["ok"] for c in result["checks"]) else 1


def cmd_converge_eps(args):
    from halfwall import experiments
    return _run_experiment(args, "eps", experiments.exp_eps_convergence,
                           experiments.write_eps_outputs)


def cmd_converge_n(args):
    from halfwall import experiments
    overrides = {}
    if args.seed is not None:
        overrides["seeds"] = tuple(args.seed + i for i in range(6))
    return _run_experiment(args, "particles",
                           experiments.exp_particle_convergence,
                           experiments.write_particle_outputs, **overrides)


def cmd_converge_r(args):
    from halfwall import experiments
    overrides = {}
    if args.seed is not None:
        overrides["r_seed"] = args.seed
    return _run_experiment(args, "radius", experiments.exp_r_sensitivity,
                           experiments.write_radius_outputs, **overrides)


def cmd_analytic(args):
    from halfwall import experiments
    return _run_experiment(args, "analytic", experiments.exp_analytic,
                           experiments.write_analytic_outputs)


def _common_flags(parser, out_default="."):
    parser.add_argument("--config", default=None,
                        help="INI file with experiment settings")
    parser.add_argument("--out", default=out_default,
                        help="directory for output tables")
    parser.add_argument("--seed", type=int, default=None,
                        help="base random seed where the command uses one")
    parser.add_argument("--threads", type=int, default=None,
                        help="numba thread count")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="halfwall",
        description="Stokes flow above a flat wall: forward solves and "
                    "convergence experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    greens_p = sub.add_parser("greens", help="Green's function utilities")
    gsub = greens_p.add_subparsers(dest="action", required=True)
    geval = gsub.add_parser("eval", help="print G(x, y) entries row-major")
    geval.add_argument("--x", nargs=3, type=float, required=True,
                       metavar=("X1", "X2", "X3"))
    geval.add_argument("--y", nargs=3, type=float, required=True,
                       metavar=("Y1", "Y2", "Y3"))
    _common_flags(geval, out_default=None)

    for name, text in (
            ("simulate", "one layered forward solve with profiles"),
            ("converge-eps", "wall-law error ladders over eps"),
            ("converge-n", "particle-to-continuum ladders over N"),
            ("converge-r", "finite-radius sensitivity at fixed centers"),
            ("analytic", "closed-form shear and convection checks")):
        _common_flags(sub.add_parser(name, help=text))

    args = parser.parse_args(argv)
    _apply_threads(args.threads)
    handlers = {
        "greens": cmd_greens_eval,
        "simulate": cmd_simulate,
        "converge-eps": cmd_converge_eps,
        "converge-n": cmd_converge_n,
        "converge-r": cmd_converge_r,
        "analytic": cmd_analytic,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
