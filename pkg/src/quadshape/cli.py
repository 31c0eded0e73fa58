"""Command line front end.

Usage: ``quadshape COMMAND CONFIG [--out DIR] [--dump-operators] [--quiet]``
with commands evaluate, gradient, hessian, flow, diagnose, spectrum.  Every
command reads one plain-text config (see quadshape.config), writes a
deterministic ``report.json`` plus command-specific CSV files into the
output directory, and prints a short summary.

Exit codes: 0 on success, 2 for configuration or geometry validation
errors, 3 for numerical failures (singular systems, collapsed line search,
curves degenerating mid-run).

Reports must be byte-identical across reruns of the same config, so BLAS
threading is pinned before numpy loads (multi-threaded reductions reorder
sums).  Set QUADSHAPE_THREADS to override the default of one thread.  This
module is imported by the package root before any numerical module so the
pin happens first; keep module-level imports here free of numpy.
"""

from __future__ import annotations

import argparse
import os
import sys


def _pin_threads():
    count = os.environ.get("QUADSHAPE_THREADS", "1")
    for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS"):
        os.environ.setdefault(var, count)


_pin_threads()

COMMANDS = ("evaluate", "gradient", "hessian", "flow", "diagnose", "spectrum")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="quadshape",
        description="free-boundary shape functional toolbox")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("config_path", nargs="?", default=None,
                        help="path to the run config")
    parser.add_argument("--config", dest="config_opt", default=None,
                        help="path to the run config (alternative to the "
                             "positional argument)")
    parser.add_argument("--out", default="out",
                        help="output directory (default: ./out)")
    parser.add_argument("--dump-operators", action="store_true",
                        help="also write the dense boundary operator "
                             "matrices as CSV")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress the summary printed to stdout")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    path = args.config_opt or args.config_path
    if path is None:
        print("error: no config file given (positional or --config)",
              file=sys.stderr)
        return 2

    from .bem import SolverError
    from .config import ConfigError, load_config
    from .geometry import GeometryError

    try:
        run = load_config(path)
        curve = run.build_curve()
    except (ConfigError, GeometryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    os.makedirs(args.out, exist_ok=True)
    try:
        report = _COMMANDS[args.command](run, curve, args)
    except (SolverError, GeometryError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3

    from .reports import write_json
    report_path = os.path.join(args.out, "report.json")
    write_json(report, report_path)
    if not args.quiet:
        print(f"report written to {report_path}")
    return 0


def _config_echo(run, curve):
    from dataclasses import asdict

    from .reports import curve_dict, metric_params_dict, source_dict
    geo = asdict(run.geometry)
    geo["cos"] = {str(k): v for k, v in sorted(geo["cos"].items())}
    geo["sin"] = {str(k): v for k, v in sorted(geo["sin"].items())}
    return {
        "geometry": geo,
        "source": source_dict(run.source),
        "params": metric_params_dict(run.params),
        "fd": {"t_step": run.fd.t_step},
        "directions": list(run.directions),
        "curve": curve_dict(curve),
    }


def _write_common(run, curve, state, args):
    from .geometry import curve_to_csv
    from .reports import write_matrix_csv, write_state_csv
    with open(os.path.join(args.out, "curve.csv"), "w", newline="\n") as fh:
        fh.write(curve_to_csv(curve))
    if state is not None:
        write_state_csv(state, os.path.join(args.out, "state.csv"))
    if args.dump_operators:
        from .bem import get_operators
        ops = get_operators(curve)
        write_matrix_csv(ops.single_layer,
                         os.path.join(args.out, "single_layer.csv"))
        write_matrix_csv(ops.dtn_matrix, os.path.join(args.out, "dtn.csv"))


def _solve(run, curve):
    from .shape import solve_state
    return solve_state(curve, run.source, run.params.k)


def cmd_evaluate(run, curve, args):
    import numpy as np

    from .potential import clearance_margin
    from .shape import evaluate_J
    state = _solve(run, curve)
    J = evaluate_J(state)
    report = {
        "command": "evaluate",
        "config": _config_echo(run, curve),
        "J": J,
        "u_nu": {
            "min": float(np.min(state.u_nu)),
            "max": float(np.max(state.u_nu)),
            "mean": float(np.mean(state.u_nu)),
        },
        "psi": {
            "min": float(np.min(state.psi)),
            "max": float(np.max(state.psi)),
            "max_abs": float(np.max(np.abs(state.psi))),
        },
        "clearance_margin": clearance_margin(run.source, curve),
        "solver": {"scale": state.ops.scale, "rcond": state.ops.rcond},
    }
    _write_common(run, curve, state, args)
    if not args.quiet:
        print(f"J = {J:.12g}")
    return report


def cmd_gradient(run, curve, args):
    import numpy as np

    from .geometry import NormalField, metric_norm
    from .riemannian import riemannian_gradient
    from .shape import evaluate_J, fd_first_derivative, hadamard_derivative
    state = _solve(run, curve)
    grad = riemannian_gradient(curve, run.params, state.psi)
    entries = []
    boundary = []
    fd = []
    for mode in run.directions:
        direction = NormalField.from_mode(mode, curve.n)
        b = hadamard_derivative(state, direction)
        f = fd_first_derivative(curve, run.source, run.params.k, direction,
                                t_step=run.fd.t_step)
        boundary.append(b)
        fd.append(f)
        entries.append({"direction": mode, "boundary_form": b,
                        "fd": f, "ratio": f / b if b != 0.0 else float("nan")})
    b_arr = np.array(boundary)
    denom = float(b_arr @ b_arr)
    fitted = float(np.array(fd) @ b_arr / denom) if denom > 0 else float("nan")
    report = {
        "command": "gradient",
        "config": _config_echo(run, curve),
        "J": evaluate_J(state),
        "gradient_norm": metric_norm(curve, run.params, grad.values),
        "directions": entries,
        "fitted_fd_over_boundary": fitted,
    }
    _write_common(run, curve, state, args)
    if not args.quiet:
        print(f"metric gradient norm = {report['gradient_norm']:.6g}; "
              f"fd/boundary ratio fit = {fitted:.6g}")
    return report


def cmd_hessian(run, curve, args):
    from .shape import evaluate_J, hessian_report
    state = _solve(run, curve)
    rep = hessian_report(state, list(run.directions), A=run.params.A,
                         t_step=run.fd.t_step)
    report = {
        "command": "hessian",
        "config": _config_echo(run, curve),
        "J": evaluate_J(state),
        "hessian": rep.to_dict(),
    }
    _write_common(run, curve, state, args)
    if not args.quiet:
        slopes = ", ".join(f"{k}={v:.4g}" for k, v in rep.fitted_slopes.items())
        print(f"hessian routes over {len(rep.pairs)} pairs; "
              f"fits vs fd: {slopes}")
    return report


def cmd_flow(run, curve, args):
    from .flow import convergence_report, descend, write_trace
    from .geometry import curve_to_csv
    from .reports import curve_dict, write_curves_svg

    snap_dir = os.path.join(args.out, "snapshots")
    os.makedirs(snap_dir, exist_ok=True)
    every = max(run.output.snapshot_every, 1)
    snapshots = []

    def callback(record, cv):
        if record.iteration % every == 0:
            name = os.path.join(snap_dir, f"iter{record.iteration:04d}.csv")
            with open(name, "w", newline="\n") as fh:
                fh.write(curve_to_csv(cv))
            snapshots.append((record.iteration, cv))

    result = descend(curve, run.source, run.params, run.flow, callback)
    if not snapshots or snapshots[-1][0] != result.iterations:
        name = os.path.join(snap_dir, f"iter{result.iterations:04d}.csv")
        with open(name, "w", newline="\n") as fh:
            fh.write(curve_to_csv(result.curve))
        snapshots.append((result.iterations, result.curve))

    write_trace(result, os.path.join(args.out, "trace.csv"))
    with open(os.path.join(args.out, "curve.csv"), "w", newline="\n") as fh:
        fh.write(curve_to_csv(result.curve))
    if run.output.svg:
        picks = snapshots
        if len(picks) > 6:
            idx = [round(i * (len(picks) - 1) / 5) for i in range(6)]
            picks = [picks[i] for i in idx]
        write_curves_svg([cv for _, cv in picks],
                         [f"iter {it}" for it, _ in picks],
                         os.path.join(args.out, "flow.svg"))

    conv = convergence_report(result)
    report = {
        "command": "flow",
        "config": _config_echo(run, curve),
        "flow": conv,
        "final_curve": curve_dict(result.curve),
    }
    if not args.quiet:
        print(f"{conv['reason']} after {conv['iterations']} iterations; "
              f"grad {conv['grad_norm_initial']:.3g} -> "
              f"{conv['grad_norm_final']:.3g}; J {conv['J_final']:.10g}")
    return report


def cmd_diagnose(run, curve, args):
    import numpy as np

    from .geometry import NormalField
    from .potential import clearance_margin
    from .riemannian import (check_metric_compatibility,
                             curvature_normal_derivative,
                             curvature_normal_derivative_fd, torsion)
    from .shape import psi_normal_derivative, stability_controls
    state = _solve(run, curve)
    stab = stability_controls(state)

    dpsi_closed = psi_normal_derivative(state, "interior")
    dpsi_sampled = psi_normal_derivative(state, "sampled")
    scale = float(np.max(np.abs(dpsi_closed))) or 1.0

    modes = list(run.directions)
    while len(modes) < 3:
        modes.append(modes[-1])
    h, m, l = (NormalField.from_mode(s, curve.n) for s in modes[:3])
    t = run.fd.t_step
    compat = check_metric_compatibility(curve, run.params, h, m, l, t_step=t)
    compat_half = check_metric_compatibility(curve, run.params, h, m, l,
                                             t_step=0.5 * t)
    tor = torsion(curve, run.params, h, m)

    kfd = curvature_normal_derivative_fd(curve)
    k_out = curvature_normal_derivative(curve, "outward")
    k_in = curvature_normal_derivative(curve, "inward")

    report = {
        "command": "diagnose",
        "config": _config_echo(run, curve),
        "clearance_margin": clearance_margin(run.source, curve),
        "solver": {"scale": state.ops.scale, "rcond": state.ops.rcond,
                   "capacity_estimate": state.ops.capacity_estimate},
        "stability": stab.to_dict(max_eigs=run.output.max_eigs),
        "psi_normal_derivative": {
            "max_abs_closed": scale,
            "max_diff_sampled": float(np.max(np.abs(dpsi_closed - dpsi_sampled))),
            "rel_diff_sampled": float(np.max(np.abs(dpsi_closed - dpsi_sampled)) / scale),
        },
        "connection": {
            "fields": modes[:3],
            "torsion_max": float(np.max(np.abs(tor))),
            "compatibility_residual": compat,
            "compatibility_residual_half_step": compat_half,
            "compatibility_order": (
                float(np.log2(compat / compat_half))
                if compat > 0 and compat_half > 0 else float("nan")),
        },
        "curvature_normal_derivative": {
            "max_diff_outward_vs_fd": float(np.max(np.abs(k_out - kfd))),
            "max_diff_inward_vs_fd": float(np.max(np.abs(k_in - kfd))),
        },
    }
    _write_common(run, curve, state, args)
    if not args.quiet:
        v = stab.verdicts
        print(f"lambda0(minus) = {stab.lambda0_minus:.6g}, "
              f"lambda0(plus) = {stab.lambda0_plus:.6g}, "
              f"min kappa = {stab.min_kappa:.6g}, "
              f"coercive_minus = {v['coercive_minus']}")
    return report


def cmd_spectrum(run, curve, args):
    import numpy as np

    from .bem import get_operators
    from .shape import stability_controls, symmetric_spectrum
    state = _solve(run, curve)
    ops = get_operators(curve)
    dtn_vals, _ = symmetric_spectrum(ops.dtn_matrix, curve.weights)
    stab = stability_controls(state)
    kmax = run.output.max_eigs
    report = {
        "command": "spectrum",
        "config": _config_echo(run, curve),
        "dtn_eigenvalues": [float(v) for v in dtn_vals[:kmax]],
        "stability_minus": [float(v) for v in stab.eigenvalues_minus[:kmax]],
        "stability_plus": [float(v) for v in stab.eigenvalues_plus[:kmax]],
        "lambda0_minus": stab.lambda0_minus,
        "lambda0_plus": stab.lambda0_plus,
    }
    _write_common(run, curve, state, args)
    if not args.quiet:
        head = ", ".join(f"{v:.6g}" for v in dtn_vals[:6])
        print(f"leading DtN eigenvalues: {head}")
    return report


_COMMANDS = {
    "evaluate": cmd_evaluate,
    "gradient": cmd_gradient,
    "hessian": cmd_hessian,
    "flow": cmd_flow,
    "diagnose": cmd_diagnose,
    "spectrum": cmd_spectrum,
}


if __name__ == "__main__":
    sys.exit(main(argv=None))
