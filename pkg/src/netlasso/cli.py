"""Command-line interface.

Subcommands: generate, sample, certify, solve, experiment, verify-bound.
Exit codes: 0 success, 1 usage/config error, 2 infeasible or failed
certificate, 3 solver non-convergence. The default output directory is
taken from $NETLASSO_OUT_DIR when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import fileio
from .certify import (
    DEFAULT_MAX_BOUNDARY,
    NccQuery,
    check_support_condition,
    check_ncc,
    verify_error_bound,
)
from .errors import NetlassoError
from .experiments import ExperimentConfig, run_experiment, summarize, write_outputs
from .flow import DEFAULT_SCALE
from .generate import (
    PlantedPartitionConfig,
    generate_planted_partition,
    paper_like_config,
)
from .graphs import boundary, clustered_signal, tv
from .sampling import sample_boundary_aware, sample_uniform
from .solver import SolverConfig, solve_admm

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CERTIFICATE = 2
EXIT_NONCONVERGENCE = 3


def _default_out_dir() -> str:
    return os.environ.get("NETLASSO_OUT_DIR", ".")


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad cluster sizes {text!r}")
    if not sizes:
        raise argparse.ArgumentTypeError("empty cluster sizes")
    return sizes


def _parse_lam(text: str):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"lam must be a number or 'auto', got {text!r}")


def _generator_config(args, seed: int) -> PlantedPartitionConfig:
    if args.preset == "paper-like" and args.sizes is None:
        base = paper_like_config(seed=seed)
        return base
    if args.sizes is None:
        raise NetlassoError("custom generation requires --sizes")
    return PlantedPartitionConfig(
        sizes=args.sizes,
        p_in=args.p_in,
        p_out=args.p_out,
        weight=args.weight,
        seed=seed,
    )


def _add_generator_args(sub, with_seed=True):
    sub.add_argument("--preset", choices=["paper-like", "custom"], default="paper-like")
    sub.add_argument("--sizes", type=_parse_sizes, default=None, help="e.g. 7,7,8,8")
    sub.add_argument("--p-in", type=float, default=1.0)
    sub.add_argument("--p-out", type=float, default=0.2)
    sub.add_argument("--weight", type=float, default=1.0)
    if with_seed:
        sub.add_argument("--seed", type=int, default=0)


def _add_solver_args(sub):
    sub.add_argument("--rho", type=float, default=1.0)
    sub.add_argument("--eps-abs", type=float, default=1e-6)
    sub.add_argument("--eps-rel", type=float, default=1e-5)
    sub.add_argument("--max-iters", type=int, default=100_000)


def _solver_overrides(args) -> dict:
    return {
        "rho": args.rho,
        "eps_abs": args.eps_abs,
        "eps_rel": args.eps_rel,
        "max_iters": args.max_iters,
    }


def cmd_generate(args) -> int:
    cfg = _generator_config(args, args.seed)
    g, partition = generate_planted_partition(cfg)
    coeffs = tuple(float(c + 1) for c in range(partition.cluster_count))
    signal = clustered_signal(partition, coeffs)
    out = args.out_dir
    os.makedirs(out, exist_ok=True)
    fileio.write_graph(os.path.join(out, "graph.txt"), g)
    fileio.write_partition(os.path.join(out, "partition.txt"), partition)
    fileio.write_value_map(os.path.join(out, "signal.txt"), signal)
    sizes = [len(c) for c in partition.clusters]
    print(
        f"generated graph: N={g.node_count} edges={g.edge_count} "
        f"clusters={sizes} boundary={len(boundary(g, partition))} -> {out}"
    )
    return EXIT_OK


def cmd_sample(args) -> int:
    g = fileio.read_graph(args.graph)
    if args.strategy == "boundary":
        partition = fileio.read_partition(args.partition, g)
        nodes = sample_boundary_aware(g, partition, args.budget)
    else:
        nodes = sample_uniform(g, args.budget, seed=args.seed)
    fileio.write_node_set(args.out, nodes)
    print(f"sampled {len(nodes)} nodes ({args.strategy}) -> {args.out}")
    return EXIT_OK


def cmd_certify(args) -> int:
    g = fileio.read_graph(args.graph)
    partition = fileio.read_partition(args.partition, g)
    samples = fileio.read_node_set(args.samples)
    support = check_support_condition(g, partition, samples, args.L)
    print(
        f"sufficient condition at L={args.L}: "
        + ("satisfied" if support.satisfied else "violated")
        + (f" (K={support.K})" if support.satisfied else f" on {len(support.violations)} edges")
    )
    query = NccQuery(g, partition, samples, K=args.K, L=args.L)
    cert = check_ncc(query, max_boundary=args.max_boundary, scale=args.scale)
    print(
        f"compatibility condition at K={args.K}, L={args.L}: {cert.verdict}"
        + (f" ({cert.reason})" if cert.reason else "")
    )
    if args.report:
        payload = cert.to_json_dict()
        payload["support_condition"] = support.to_json_dict()
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
        print(f"report -> {args.report}")
    return EXIT_OK if cert.verdict == "holds" else EXIT_CERTIFICATE


def cmd_solve(args) -> int:
    g = fileio.read_graph(args.graph)
    x_true = fileio.read_signal(args.true_signal, g) if args.true_signal else None
    obs = fileio.read_observations(args.observations, x_true)
    cfg = SolverConfig(
        lam=args.lam, record_trace=args.trace is not None, **_solver_overrides(args)
    )
    result = solve_admm(g, obs, cfg)
    fileio.write_value_map(args.out, result.x_hat)
    report = result.to_json_dict()
    if x_true is not None:
        report["tv_error_vs_true"] = tv(g, result.x_hat - x_true)
        report["mad_vs_true"] = float(np.mean(np.abs(result.x_hat - x_true)))
    print(json.dumps(report, indent=2))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("iteration,primal_residual,dual_residual,eps_pri,eps_dual,objective\n")
            for row in result.trace:
                fh.write(
                    f"{row['iteration']},{row['primal_residual']!r},{row['dual_residual']!r},"
                    f"{row['eps_pri']!r},{row['eps_dual']!r},{row['objective']!r}\n"
                )
    print(f"recovered signal -> {args.out}")
    return EXIT_OK if result.converged else EXIT_NONCONVERGENCE


def cmd_experiment(args) -> int:
    generator = None
    if args.preset == "custom" or args.sizes is not None:
        generator = _generator_config(args, seed=0)
    cfg = ExperimentConfig(
        generator=generator,
        budget=args.budget,
        noise=args.noise,
        sigma=args.sigma,
        lam=args.lam,
        cert_l=args.cert_L,
        trials=args.trials,
        master_seed=args.master_seed,
        solver=_solver_overrides(args),
    )
    trials = run_experiment(cfg)
    paths = write_outputs(args.out_dir, trials, plot_trial=args.plot_trial)
    summary = summarize(trials)
    print(json.dumps(summary, indent=2))
    for name, path in paths.items():
        print(f"{name} -> {path}")
    return EXIT_OK if summary["all_converged"] else EXIT_NONCONVERGENCE


def cmd_verify_bound(args) -> int:
    g = fileio.read_graph(args.graph)
    x_true = fileio.read_signal(args.true_signal, g)
    x_hat = fileio.read_signal(args.recovered, g)
    obs = fileio.read_observations(args.observations, x_true)
    report = verify_error_bound(
        g, x_true, x_hat, obs, K=args.K, L=args.L, tolerance=args.tolerance
    )
    print(json.dumps(report.to_json_dict(), indent=2))
    return EXIT_OK if report.passed else EXIT_CERTIFICATE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netlasso",
        description=(
            "Learn clustered graph signals from few noisy samples by "
            "TV-regularized l1 regression, and certify recoverability of a "
            "(sampling set, partition) pair via flow feasibility."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a synthetic clustered graph")
    _add_generator_args(p_gen)
    p_gen.add_argument("--out-dir", default=_default_out_dir())
    p_gen.set_defaults(func=cmd_generate)

    p_sample = sub.add_parser("sample", help="construct a sampling set")
    p_sample.add_argument("--graph", required=True)
    p_sample.add_argument("--partition")
    p_sample.add_argument("--strategy", choices=["boundary", "uniform"], required=True)
    p_sample.add_argument("--budget", type=int, required=True)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--out", required=True)
    p_sample.set_defaults(func=cmd_sample)

    p_cert = sub.add_parser("certify", help="check the compatibility condition")
    p_cert.add_argument("--graph", required=True)
    p_cert.add_argument("--partition", required=True)
    p_cert.add_argument("--samples", required=True)
    p_cert.add_argument("--K", type=float, required=True)
    p_cert.add_argument("--L", type=float, required=True)
    p_cert.add_argument("--max-boundary", type=int, default=DEFAULT_MAX_BOUNDARY)
    p_cert.add_argument("--scale", type=int, default=DEFAULT_SCALE)
    p_cert.add_argument("--report")
    p_cert.set_defaults(func=cmd_certify)

    p_solve = sub.add_parser("solve", help="recover a signal from observations")
    p_solve.add_argument("--graph", required=True)
    p_solve.add_argument("--observations", required=True)
    p_solve.add_argument("--true-signal")
    p_solve.add_argument("--lam", type=float, required=True)
    _add_solver_args(p_solve)
    p_solve.add_argument("--out", required=True)
    p_solve.add_argument("--report")
    p_solve.add_argument("--trace")
    p_solve.set_defaults(func=cmd_solve)

    p_exp = sub.add_parser("experiment", help="boundary vs uniform sampling comparison")
    _add_generator_args(p_exp, with_seed=False)
    p_exp.add_argument("--budget", type=int, default=None, help="default: N // 2")
    p_exp.add_argument("--noise", choices=["none", "gaussian", "laplace"], default="none")
    p_exp.add_argument("--sigma", type=float, default=0.0)
    p_exp.add_argument("--lam", type=_parse_lam, default="auto")
    p_exp.add_argument("--cert-L", type=float, default=1.0)
    p_exp.add_argument("--trials", type=int, default=1)
    p_exp.add_argument("--master-seed", type=int, default=0)
    p_exp.add_argument("--plot-trial", type=int, default=0)
    _add_solver_args(p_exp)
    p_exp.add_argument("--out-dir", default=_default_out_dir())
    p_exp.set_defaults(func=cmd_experiment)

    p_vb = sub.add_parser("verify-bound", help="check a recovery against the error bound")
    p_vb.add_argument("--graph", required=True)
    p_vb.add_argument("--true-signal", required=True)
    p_vb.add_argument("--recovered", required=True)
    p_vb.add_argument("--observations", required=True)
    p_vb.add_argument("--K", type=float, required=True)
    p_vb.add_argument("--L", type=float, required=True)
    p_vb.add_argument("--tolerance", type=float, default=1e-6)
    p_vb.set_defaults(func=cmd_verify_bound)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; remap to the documented code
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NetlassoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
