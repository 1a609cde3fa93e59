"""Batch command line front-end.

Subcommands: analyze (feasibility numbers, excluded curves, partitionings),
synthesize (controller file + report), simulate (trajectory CSV), verify
(trajectory CSV + shape/admissibility/decay report).

Exit codes: 0 ok, 2 parse or compatibility error, 3 infeasible analysis,
4 transversal-feasibility failure, 5 eigenvector selection failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import design, files, numlin, simulate
from .rectify import Analyzer
from .sysmodel import validate

EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_RADO = 4
EXIT_SELECTION = 5


class CliError(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except files.ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


def build_parser():
    parser = argparse.ArgumentParser(
        prog="swtrack",
        description="Switched-system non-overshooting tracking controller toolbox")
    sub = parser.add_subparsers(required=True)

    pa = sub.add_parser("analyze", help="feasibility analysis of a plant file")
    pa.add_argument("plant")
    pa.add_argument("--out", help="report JSON path (default stdout)")
    pa.add_argument("--seed", type=int, default=42)
    pa.add_argument("--tol", type=float, default=numlin.DEFAULT_TOL)
    pa.add_argument("--sampled-only", action="store_true",
                    help="skip the exact pipeline, use the sampling estimator")
    pa.set_defaults(func=cmd_analyze)

    ps = sub.add_parser("synthesize", help="design a controller")
    ps.add_argument("plant")
    ps.add_argument("--mode", choices=("nonovershoot", "monotonic"),
                    default="nonovershoot")
    ps.add_argument("--partition", help="comma list d0,d1,...,dp")
    ps.add_argument("--eig", action="append", default=[],
                    metavar="q,k=v1,v2,...", help="eigenvalue set (repeatable)")
    ps.add_argument("--pair0", help="comma permutation pairing the k=0 sets")
    ps.add_argument("--seed", type=int, default=42)
    ps.add_argument("--tol", type=float, default=numlin.DEFAULT_TOL)
    ps.add_argument("--out", required=True, help="controller JSON path")
    ps.add_argument("--report", help="report JSON path")
    ps.set_defaults(func=cmd_synthesize)

    for name, with_verdicts in (("simulate", False), ("verify", True)):
        px = sub.add_parser(name, help=("simulate a controller file"
                                        if not with_verdicts else
                                        "simulate and check output shapes"))
        px.add_argument("controller")
        px.add_argument("--x0", help="comma list of initial state entries")
        px.add_argument("--switch", default="periodic:0.3,0.1",
                        metavar="periodic:dur1,dur2")
        px.add_argument("--horizon", type=float, default=3.0)
        px.add_argument("--samples", type=int, default=64,
                        help="samples per dwell interval")
        px.add_argument("--out", help="trajectory CSV path")
        px.add_argument("--report", help="report JSON path")
        px.add_argument("--tol", type=float, default=1e-6,
                        help="shape detector slack")
        px.set_defaults(func=cmd_verify, with_verdicts=with_verdicts)

    return parser


def _d_table(analyzer, exact):
    table = {}
    for k in range(analyzer.plant.p + 1):
        entry = {"sampled": analyzer.d_k_sampled(k)}
        if exact:
            entry["exact"] = analyzer.d_k_exact(k)
        table[str(k)] = entry
    return table


def cmd_analyze(args):
    plant, spec = files.load_plant_file(args.plant)
    analyzer = Analyzer(plant, tol=args.tol, seed=args.seed)
    report = validate(plant, args.tol, args.seed)
    use_exact = plant.has_exact and not args.sampled_only
    table = _d_table(analyzer, use_exact)
    key = "exact" if use_exact else "sampled"
    d_values = {k: table[str(k)][key] for k in range(plant.p + 1)}
    feasible = {
        mode: [list(pt.d) for pt in design.enumerate_partitionings(
            plant.n, plant.p, d_values, mode)]
        for mode in ("nonovershoot", "monotonic")
    }
    curves = {}
    if use_exact:
        curves = {str(k): analyzer.locus(k).curve_str()
                  for k in range(plant.p + 1)}
    out = {
        "validation": [{"name": c.name, "passed": c.passed, "warning": c.warning,
                        "detail": c.detail} for c in report.checks],
        "d_values": table,
        "excluded_curves": curves,
        "feasible_partitionings": feasible,
        "provenance": files.provenance(args.seed, args.tol),
    }
    text = files.dump_json(out, args.out)
    if args.out is None:
        print(text, end="")
    if not report.ok:
        raise CliError(EXIT_PARSE, "plant fails validation:\n" + str(report))
    if not feasible["nonovershoot"] and not feasible["monotonic"]:
        raise CliError(EXIT_INFEASIBLE,
                       "no feasible partitioning: the d_(k) caps cannot cover n modes")
    return 0


def _parse_eig_flags(flags):
    eigs = {}
    for item in flags:
        try:
            head, vals = item.split("=", 1)
            q, k = (int(x) for x in head.split(","))
            eigs[(q, k)] = tuple(float(v) for v in vals.split(","))
        except ValueError as e:
            raise CliError(EXIT_PARSE, f"bad --eig {item!r}: {e}")
    return eigs


def cmd_synthesize(args):
    plant, spec = files.load_plant_file(args.plant)
    analyzer = Analyzer(plant, tol=args.tol, seed=args.seed)

    plan_spec = spec["plan"] or {}
    partition = plan_spec.get("partition")
    if args.partition:
        partition = tuple(int(x) for x in args.partition.split(","))
    eigs = dict(plan_spec.get("eigenvalues", {}))
    eigs.update(_parse_eig_flags(args.eig))
    pair0 = plan_spec.get("pair0")
    if args.pair0:
        pair0 = tuple(int(x) for x in args.pair0.split(","))
    if partition is None:
        raise CliError(EXIT_PARSE, "no partitioning given (plan or --partition)")
    if not eigs:
        raise CliError(EXIT_PARSE, "no eigenvalue sets given (plan or --eig)")

    try:
        controller = design.synthesize(analyzer, spec["r"], partition, eigs,
                                       pair0=pair0, seed=args.seed)
    except design.CompatibilityError as e:
        raise CliError(EXIT_PARSE, str(e))
    except design.SynthesisError as e:
        if isinstance(e.cause, design.RadoFailed):
            raise CliError(EXIT_RADO,
                           f"{e} (violating output subset {e.cause.subset})")
        if isinstance(e.cause, design.SelectionFailed):
            raise CliError(EXIT_SELECTION, str(e))
        raise CliError(EXIT_PARSE, str(e))

    files.dump_json(files.controller_to_json(controller, args.seed, args.tol),
                    args.out)
    if args.report:
        report = {
            "partition": list(controller.plan.partitioning.d),
            "x0_domain": controller.x0_domain,
            "cond_V": files.fmt_float(controller.cond_V),
            "rect_residual": files.fmt_float(controller.rect_residual),
            "closed_loop_eigs": {
                str(q): [files.fmt_float(v) for v in
                         np.sort(controller.col_eigs[q])]
                for q in (1, 2)},
            "provenance": files.provenance(args.seed, args.tol),
        }
        files.dump_json(report, args.report)
    print(f"controller written to {args.out}")
    return 0


def _parse_switch(text, horizon):
    try:
        kind, rest = text.split(":", 1)
        if kind != "periodic":
            raise ValueError(f"unknown switching kind {kind!r}")
        dur1, dur2 = (float(x) for x in rest.split(","))
        return simulate.periodic_signal(dur1, dur2, horizon)
    except ValueError as e:
        raise CliError(EXIT_PARSE, f"bad --switch {text!r}: {e}")


def cmd_verify(args):
    controller = files.load_controller_file(args.controller)
    plant = controller.plant
    signal = _parse_switch(args.switch, args.horizon)
    if args.x0:
        x0 = np.array([float(x) for x in args.x0.split(",")])
    else:
        x0 = controller.ss.x_ss.copy()
    if x0.size != plant.n:
        raise CliError(EXIT_PARSE, f"x0 length {x0.size} != n={plant.n}")

    traj = simulate.simulate_modal(controller, plant, x0, signal, args.samples)
    csv_text = simulate.trajectory_to_csv(traj)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
    if not args.with_verdicts:
        if args.out is None:
            print(csv_text, end="")
        return 0

    overshoot = simulate.detect_overshoot(traj, args.tol)
    monotonic = simulate.detect_monotonic(traj, args.tol)
    verdicts = design.x0_admissible(controller, x0)
    xi0 = float(np.linalg.norm(x0 - controller.ss.x_ss))
    xiT = float(np.linalg.norm(traj.states[-1] - controller.ss.x_ss))
    report = {
        "x0": [files.fmt_float(v) for v in x0],
        "outputs": {
            str(k + 1): {
                "overshooting": overshoot[k],
                "monotonic": monotonic[k],
            } for k in range(plant.p)},
        "x0_admissible": {
            str(v.k): {"passed": v.passed, "boundary": v.boundary,
                       "modes": v.d_k}
            for v in verdicts},
        "x0_domain": controller.x0_domain,
        "decay": {"initial_offset": files.fmt_float(xi0),
                  "final_offset": files.fmt_float(xiT)},
        "provenance": files.provenance(0, args.tol),
    }
    text = files.dump_json(report, args.report)
    if args.report is None:
        print(text, end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
