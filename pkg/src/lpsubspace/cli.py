"""Command-line interface.

Subcommands: ``gen`` (sample a dataset to CSV), ``energy``, ``certify``,
``minimize``, ``bounds``, and ``experiment``.  Every subcommand accepts
``--seed``, ``--threads``, ``--out`` and ``--format``; all randomness flows
from the seed.  Exit codes: 0 on success, 1 on usage errors, 2 on numeric
errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bounds import InlierDistribution, constants_report
from .certificates import certify_l1, certify_p_less_1, check_necessary_p_gt_1
from .energy import Dataset, energy
from .exceptions import LpSubspaceError
from .experiments import (
    ExperimentSpec,
    run_experiment,
    summary_csv_lines,
    write_records_csv,
)
from .grassmann import Subspace
from .model import HlmModelConfig, sample
from .optimize import OptimizerConfig, minimize

USAGE_EXIT = 1
NUMERIC_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master random seed")
    common.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("HLM_THREADS", "1")),
        help="worker threads for experiment sweeps (default: HLM_THREADS or 1)",
    )
    common.add_argument("--out", type=str, default=None, help="output file path")
    common.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )

    parser = _Parser(prog="lpsubspace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", parents=[common], help="sample a dataset")
    p_gen.add_argument("--config", required=True, help="model config JSON")
    p_gen.add_argument("--n", type=int, required=True, help="number of points")

    p_energy = sub.add_parser("energy", parents=[common], help="evaluate the energy")
    p_energy.add_argument("--data", required=True, help="dataset CSV")
    p_energy.add_argument("--subspace", required=True, help="basis CSV")
    p_energy.add_argument("--p", type=float, required=True)

    p_cert = sub.add_parser(
        "certify", parents=[common], help="local-minimum certificate"
    )
    p_cert.add_argument("--data", required=True)
    p_cert.add_argument("--subspace", required=True)
    p_cert.add_argument("--p", type=float, default=1.0)
    p_cert.add_argument("--budget", type=int, default=2000)
    p_cert.add_argument("--tol", type=float, default=None)

    p_min = sub.add_parser("minimize", parents=[common], help="minimize the energy")
    p_min.add_argument("--data", required=True)
    p_min.add_argument("--d", type=int, required=True)
    p_min.add_argument("--p", type=float, required=True)
    p_min.add_argument("--restarts", type=int, default=20)
    p_min.add_argument("--max-iters", type=int, default=200)
    p_min.add_argument("--step-init", type=float, default=0.5)
    p_min.add_argument("--step-shrink", type=float, default=0.5)
    p_min.add_argument("--grad-tol", type=float, default=1e-10)
    p_min.add_argument(
        "--seeding",
        choices=("random-grassmannian", "data-span", "both"),
        default="both",
    )
    p_min.add_argument("--basis-out", type=str, default=None, help="basis CSV path")

    p_bounds = sub.add_parser(
        "bounds", parents=[common], help="theoretical constants report"
    )
    p_bounds.add_argument("--p", type=float, required=True)
    p_bounds.add_argument("--d", type=int, required=True)
    p_bounds.add_argument("--k", type=int, default=1, help="number of subspaces")
    p_bounds.add_argument("--alpha0", type=float, required=True)
    p_bounds.add_argument("--alpha1", type=float, required=True)
    p_bounds.add_argument("--eps", type=float, default=0.0)
    p_bounds.add_argument(
        "--mu1-kind", choices=("uniform-ball", "uniform-sphere"), default="uniform-ball"
    )
    p_bounds.add_argument("--mu1-radius", type=float, default=1.0)
    p_bounds.add_argument("--alpha2", type=float, default=None)
    p_bounds.add_argument("--theta", type=float, default=None)

    p_exp = sub.add_parser("experiment", parents=[common], help="Monte Carlo sweep")
    p_exp.add_argument("--spec", required=True, help="experiment spec JSON")

    return parser


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _cmd_gen(args) -> int:
    config = HlmModelConfig.from_json(args.config)
    data = sample(config, args.n, args.seed)
    if args.format == "json":
        payload = {
            "points": data.points.tolist(),
            "labels": data.labels.tolist() if data.labels is not None else None,
        }
        _emit(json.dumps(payload), args.out)
    elif args.out:
        data.to_csv(args.out)
    else:
        data.to_csv(sys.stdout)
    return 0


def _cmd_energy(args) -> int:
    data = Dataset.from_csv(args.data)
    sub = Subspace.from_csv(args.subspace)
    value = energy(data, sub, args.p)
    if args.format == "json":
        _emit(json.dumps({"energy": value}), args.out)
    else:
        _emit(format(value, ".17g"), args.out)
    return 0


def _cmd_certify(args) -> int:
    data = Dataset.from_csv(args.data)
    sub = Subspace.from_csv(args.subspace)
    if args.p == 1:
        result = certify_l1(
            data, sub, search_budget=args.budget, seed=args.seed, tol=args.tol
        )
    elif args.p < 1:
        result = certify_p_less_1(data, sub)
    else:
        result = check_necessary_p_gt_1(data, sub, args.p, tol=args.tol)
    _emit(json.dumps(result.to_dict()), args.out)
    return 0


def _cmd_minimize(args) -> int:
    data = Dataset.from_csv(args.data)
    config = OptimizerConfig(
        p=args.p,
        restarts=args.restarts,
        max_iters=args.max_iters,
        step_init=args.step_init,
        step_shrink=args.step_shrink,
        grad_tol=args.grad_tol,
        seed=args.seed,
        seeding=args.seeding,
    )
    result = minimize(data, args.d, config)
    payload = {
        "energy": result.energy,
        "basis": result.best.basis.tolist(),
        "trace": [
            {"energy": e, "step": s, "moved": m} for (e, s, m) in result.trace
        ],
        "starts": result.starts,
    }
    _emit(json.dumps(payload), args.out)
    if args.basis_out:
        result.best.to_csv(args.basis_out)
    return 0


def _cmd_bounds(args) -> int:
    mu1 = InlierDistribution(dim=args.d, radius=args.mu1_radius, kind=args.mu1_kind)
    report = constants_report(
        p=args.p,
        d=args.d,
        K=args.k,
        alpha0=args.alpha0,
        alpha1=args.alpha1,
        mu1=mu1,
        eps=args.eps,
        alpha2=args.alpha2,
        theta=args.theta,
    )
    _emit(json.dumps(report.to_dict()), args.out)
    return 0


def _cmd_experiment(args) -> int:
    spec = ExperimentSpec.from_json(args.spec)
    records, summary = run_experiment(spec, seed=args.seed, threads=args.threads)
    if args.out:
        write_records_csv(records, args.out)
        for line in summary_csv_lines(summary):
            print(line)
    else:
        from .experiments import RESULT_HEADER

        print(RESULT_HEADER)
        for rec in records:
            print(rec.csv_row())
        for line in summary_csv_lines(summary):
            print(line)
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "energy": _cmd_energy,
    "certify": _cmd_certify,
    "minimize": _cmd_minimize,
    "bounds": _cmd_bounds,
    "experiment": _cmd_experiment,
}


def cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except LpSubspaceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return NUMERIC_EXIT
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT


def main() -> None:
    raise SystemExit(cli())


if __name__ == "__main__":
    main()
