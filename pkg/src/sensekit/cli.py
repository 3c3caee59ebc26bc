"""Command-line harness: generate scenarios, run solvers, write reports.

Subcommands map one-to-one onto the experiment drivers; every run writes
a JSON :class:`~sensekit.reporting.RunReport`.  Exit codes: 0 success,
1 validation error (bad flags, missing or malformed input), 2 when
``--strict`` is set and a solver did not converge.
"""

import argparse
import json
import os
import sys
import time

from . import __version__, consensus, datagen, experiments, fileio, recovery
from .reporting import RunReport

__all__ = ["main"]

OBSERVED_FILE = "observed.csv"
MASK_FILE = "mask.csv"
TRUTH_X_FILE = "truth_x.csv"
TRUTH_A_FILE = "truth_a.csv"
SPEC_FILE = "spec.json"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the harness contract is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def build_parser():
    parser = _Parser(prog="sensekit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sensekit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a seeded synthetic traffic dataset")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--anomaly-frac", type=float, default=0.05)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--missing-frac", type=float, default=0.0)
    p.add_argument("--anomaly-scale", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, metavar="DIR")
    p.add_argument("--header", action="store_true", help="write CSV header rows")
    p.set_defaults(func=_cmd_generate)

    for name, helptext in (
        ("pca-denoise", "low-rank denoising by singular value thresholding"),
        ("rpca", "robust PCA on a fully observed dataset"),
        ("complete", "joint completion/recovery on a masked dataset"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("-i", "--input", required=True, metavar="DIR",
                       help="dataset directory written by 'generate'")
        p.add_argument("-o", "--output", required=True, metavar="REPORT.json")
        p.add_argument("--header", action="store_true",
                       help="dataset CSVs carry header rows")
        p.add_argument("--save-x", metavar="CSV", help="write the low-rank estimate")
        if name == "pca-denoise":
            p.add_argument("--tau", type=float, required=True,
                           help="singular value threshold")
        else:
            p.add_argument("--save-a", metavar="CSV", help="write the sparse estimate")
            p.add_argument("--lam", type=float, default=None,
                           help="sparsity weight (default 1/sqrt(max(M, N)))")
            p.add_argument("--tol", type=float, default=1e-7)
            p.add_argument("--max-iters", type=int, default=1000)
            p.add_argument("--mu0", type=float, default=None)
            p.add_argument("--rho", type=float, default=1.5)
            p.add_argument("--mu-max", type=float, default=None)
            p.add_argument("--strict", action="store_true",
                           help="exit 2 if the solver does not converge")
        p.set_defaults(func=_cmd_solve, solver=name)

    p = sub.add_parser("fuse", help="copula-vs-product fusion detection experiment")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--rho", type=float, default=0.8)
    p.add_argument("--train", type=int, default=3000)
    p.add_argument("--shift", default="1.0,0.0",
                   help="H1 mean shift per sensor, comma separated")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, metavar="REPORT.json")
    p.set_defaults(func=_cmd_fuse)

    p = sub.add_parser("kernel", help="disk-vs-annulus kernel classification demo")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--bandwidth", type=float, default=1.0)
    p.add_argument("--ridge", type=float, default=1e-3)
    p.add_argument("--directions", type=int, default=10000,
                   help="candidate lines in the linear sweep")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, metavar="REPORT.json")
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("consensus", help="consensus ADMM over an agent graph")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--topology", metavar="EDGES",
                       help="edge-list file ('i j' per line, # comments)")
    group.add_argument("--complete", type=int, metavar="N",
                       help="complete graph on N agents")
    group.add_argument("--ring", type=int, metavar="N", help="ring of N agents")
    p.add_argument("--agents", type=int, default=None,
                   help="agent count when the edge list leaves gaps")
    p.add_argument("--objective", choices=["quadratic"], default="quadratic")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--rounds", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--mode", choices=["central", "decentralized"],
                   default="decentralized")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strict", action="store_true",
                   help="exit 2 if the rounds budget runs out")
    p.add_argument("-o", "--output", required=True, metavar="REPORT.json")
    p.set_defaults(func=_cmd_consensus)

    return parser


def _cmd_generate(args):
    spec = datagen.ScenarioSpec(
        rows=args.rows, cols=args.cols, rank=args.rank,
        anomaly_frac=args.anomaly_frac, noise_sigma=args.noise_sigma,
        missing_frac=args.missing_frac, anomaly_scale=args.anomaly_scale,
        seed=args.seed,
    )
    dataset = datagen.generate_traffic(spec)
    os.makedirs(args.output, exist_ok=True)
    fileio.write_matrix_csv(
        os.path.join(args.output, OBSERVED_FILE), dataset.observed,
        mask=dataset.mask, header=args.header,
    )
    fileio.write_mask_csv(os.path.join(args.output, MASK_FILE), dataset.mask)
    fileio.write_matrix_csv(
        os.path.join(args.output, TRUTH_X_FILE), dataset.ground_truth_x,
        header=args.header,
    )
    fileio.write_matrix_csv(
        os.path.join(args.output, TRUTH_A_FILE), dataset.ground_truth_a,
        header=args.header,
    )
    with open(os.path.join(args.output, SPEC_FILE), "w", encoding="utf-8") as fh:
        json.dump(spec.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote dataset ({spec.rows}x{spec.cols}, rank {spec.rank}) to {args.output}")
    return 0


def _load_dataset(directory, header):
    observed_path = os.path.join(directory, OBSERVED_FILE)
    if not os.path.isfile(observed_path):
        raise ValueError(f"no {OBSERVED_FILE} in {directory!r}; run 'generate' first")
    observed, implied_mask = fileio.read_matrix_csv(observed_path, header=header)
    mask_path = os.path.join(directory, MASK_FILE)
    mask = fileio.read_mask_csv(mask_path) if os.path.isfile(mask_path) else implied_mask
    spec_path = os.path.join(directory, SPEC_FILE)
    spec = None
    if os.path.isfile(spec_path):
        with open(spec_path, "r", encoding="utf-8") as fh:
            spec = datagen.ScenarioSpec.from_dict(json.load(fh))
    truth_x = truth_a = None
    x_path = os.path.join(directory, TRUTH_X_FILE)
    a_path = os.path.join(directory, TRUTH_A_FILE)
    if os.path.isfile(x_path):
        truth_x, _ = fileio.read_matrix_csv(x_path, header=header)
    if os.path.isfile(a_path):
        truth_a, _ = fileio.read_matrix_csv(a_path, header=header)
    return observed, mask, truth_x, truth_a, spec


def _cmd_solve(args):
    observed, mask, truth_x, truth_a, spec = _load_dataset(args.input, args.header)
    seed = spec.seed if spec is not None else 0
    started = time.perf_counter()

    if args.solver == "pca-denoise":
        x_hat = recovery.pca_denoise(observed, args.tau)
        a_hat = None
        metrics = {"iterations": 1, "residual": None, "converged": True}
        parameters = {"input": args.input, "tau": args.tau}
    else:
        config = recovery.SolverConfig(
            mu0=args.mu0, rho=args.rho, mu_max=args.mu_max,
            tol=args.tol, max_iters=args.max_iters,
        )
        problem = recovery.RecoveryProblem(
            observed,
            mask=mask if args.solver == "complete" else None,
            lam=args.lam,
            config=config,
        )
        if args.solver == "rpca":
            if not mask.is_full():
                raise ValueError(
                    "dataset has missing entries; use 'complete' instead of 'rpca'"
                )
            result = recovery.rpca(problem)
        else:
            result = recovery.masked_rpca(problem)
        x_hat, a_hat = result.x, result.a
        metrics = {
            "iterations": result.iterations,
            "residual": result.final_residual,
            "rank_estimate": result.rank_estimate,
            "sparsity_estimate": result.sparsity_estimate,
            "converged": result.converged,
        }
        parameters = {
            "input": args.input, "lambda": problem.resolved_lambda(),
            "tol": args.tol, "max_iters": args.max_iters, "rho": args.rho,
            "mu0": args.mu0, "mu_max": args.mu_max,
        }

    metrics["wall_time_ms"] = (time.perf_counter() - started) * 1e3
    if truth_x is not None:
        metrics["relative_error"] = datagen.relative_error(x_hat, truth_x)
    if truth_a is not None and a_hat is not None:
        metrics["anomaly_f1"] = datagen.anomaly_f1(a_hat, truth_a)

    if args.save_x:
        fileio.write_matrix_csv(args.save_x, x_hat)
    if getattr(args, "save_a", None) and a_hat is not None:
        fileio.write_matrix_csv(args.save_a, a_hat)

    report = RunReport(args.solver, parameters, metrics, seed)
    report.save(args.output)
    print(f"wrote report to {args.output}")
    if getattr(args, "strict", False) and not metrics["converged"]:
        print("solver did not converge within the iteration budget", file=sys.stderr)
        return 2
    return 0


def _cmd_fuse(args):
    shift = tuple(float(s) for s in args.shift.split(","))
    if len(shift) != 2:
        raise ValueError(f"--shift needs two comma-separated values, got {args.shift!r}")
    started = time.perf_counter()
    metrics = experiments.fusion_benefit_experiment(
        n_trials=args.trials, rho=args.rho, shift=shift,
        n_train=args.train, seed=args.seed,
    )
    metrics["wall_time_ms"] = (time.perf_counter() - started) * 1e3
    parameters = {"trials": args.trials, "rho": args.rho, "train": args.train,
                  "shift": list(shift)}
    RunReport("fuse", parameters, metrics, args.seed).save(args.output)
    print(f"wrote report to {args.output}")
    return 0


def _cmd_kernel(args):
    started = time.perf_counter()
    metrics = experiments.kernel_separability_experiment(
        n_points=args.points, seed=args.seed, bandwidth=args.bandwidth,
        ridge=args.ridge, n_directions=args.directions,
    )
    metrics["wall_time_ms"] = (time.perf_counter() - started) * 1e3
    parameters = {"points": args.points, "bandwidth": args.bandwidth,
                  "ridge": args.ridge, "directions": args.directions}
    RunReport("kernel", parameters, metrics, args.seed).save(args.output)
    print(f"wrote report to {args.output}")
    return 0


def _build_topology(args):
    if args.topology is not None:
        edges = fileio.read_edge_list(args.topology)
        implied = max((max(i, j) for i, j in edges), default=-1) + 1
        count = args.agents if args.agents is not None else implied
        if count < 1:
            raise ValueError("edge list is empty; pass --agents explicitly")
        return consensus.Topology(count, edges)
    if args.complete is not None:
        return consensus.Topology.complete(args.complete)
    return consensus.Topology.ring(args.ring)


def _cmd_consensus(args):
    topology = _build_topology(args)
    started = time.perf_counter()
    metrics = experiments.consensus_quadratic_experiment(
        topology, dim=args.dim, mu=args.mu, max_rounds=args.rounds,
        tol=args.tol, seed=args.seed, mode=args.mode,
    )
    metrics["wall_time_ms"] = (time.perf_counter() - started) * 1e3
    parameters = {
        "topology": args.topology, "complete": args.complete, "ring": args.ring,
        "agents": topology.agent_count, "objective": args.objective,
        "dim": args.dim, "mu": args.mu, "rounds": args.rounds, "tol": args.tol,
        "mode": args.mode,
    }
    RunReport("consensus", parameters, metrics, args.seed).save(args.output)
    print(f"wrote report to {args.output}")
    if args.strict and not metrics["converged"]:
        print("consensus did not converge within the round budget", file=sys.stderr)
        return 2
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return 0 if exc.code in (0, None) else exc.code
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
