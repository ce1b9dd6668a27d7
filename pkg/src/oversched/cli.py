"""Command-line entry point: ``oversched {solve,generate,analyze,oracle,compare}``.

Exit status is 0 on success, 2 on a configuration error and 3 on an I/O
error (including an unparsable instance file).
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .builder import Objective
from .harness import ALGORITHMS, ExperimentSpec, compare, read_stats_values, run_experiment, run_trials
from .model import GeneratorParams, InstanceFormatError, generate_instance, load_instance, random_permutation, save_instance
from .search import exhaustive_oracle

EXIT_CONFIG = 2
EXIT_IO = 3

PRESETS = {
    "a": GeneratorParams.a_shaped,
    "r": GeneratorParams.r_shaped,
    "desk-r": GeneratorParams.desk_r_shaped,
}


class ConfigError(Exception):
    pass


def _objective(text: str) -> Objective:
    try:
        return Objective.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_instance(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", required=True, type=Path, help="instance file")


def _add_objective(p: argparse.ArgumentParser, default: str = "conflicts") -> None:
    p.add_argument("--objective", type=_objective, default=Objective.parse(default), help="conflicts or overlaps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oversched", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="repeated seeded runs of one algorithm")
    _add_instance(p)
    p.add_argument("--alg", required=True, choices=ALGORITHMS)
    _add_objective(p)
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--evals", type=int, default=8000)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--variant", default="", help="inverted | k=<int> | k=half | random-start | one-move | top=<k>")
    p.add_argument("--builder", choices=("standard", "split"), default="standard")
    p.add_argument("--out", required=True, type=Path, help="output directory")

    p = sub.add_parser("generate", help="draw a synthetic instance")
    p.add_argument("--preset", choices=sorted(PRESETS), default="r")
    p.add_argument("--n-low", type=int)
    p.add_argument("--n-high", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--name")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("analyze", help="landscape experiments")
    asub = p.add_subparsers(dest="analysis", required=True)

    q = asub.add_parser("neighbors", help="classify every shift neighbour of sampled permutations")
    _add_instance(q)
    _add_objective(q)
    q.add_argument("--samples", type=int, default=30, help="random permutations to scan")
    q.add_argument("--solutions", type=Path, help="also scan these permutations (one per line)")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True, type=Path, help="neighbor_stats.csv path")

    q = asub.add_parser("walks", help="plateau walks from RLS snapshots")
    _add_instance(q)
    _add_objective(q, "overlaps")
    q.add_argument("--rls-evals", type=int, default=8000)
    q.add_argument("--every", type=int, default=500)
    q.add_argument("--walks", type=int, default=100)
    q.add_argument("--cap", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True, type=Path, help="walks.csv path")

    q = asub.add_parser("precedence", help="ordered pairs common to a set of solutions")
    _add_instance(q)
    q.add_argument("--solutions", type=Path, help="permutations, one per line")
    q.add_argument("--alg", choices=ALGORITHMS, default="genitor", help="used when --solutions is absent")
    _add_objective(q)
    q.add_argument("--runs", type=int, default=15)
    q.add_argument("--evals", type=int, default=8000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True, type=Path, help="precedence.csv path")

    p = sub.add_parser("oracle", help="exhaustive optimum for tiny instances (n <= 9)")
    _add_instance(p)
    _add_objective(p)
    p.add_argument("--builder", choices=("standard", "split"), default="standard")

    p = sub.add_parser("compare", help="one-sided tests that A is better (smaller) than B")
    p.add_argument("a", type=Path, help="runs.csv, stats.csv or solve output directory")
    p.add_argument("b", type=Path)
    p.add_argument("--alpha", type=float, default=0.005)
    return parser


def _values_path(path: Path) -> Path:
    if path.is_dir():
        return path / "runs.csv"
    if path.name == "stats.csv":
        return path.with_name("runs.csv")
    return path


def _read_permutations(path: Path, n: int) -> list[np.ndarray]:
    perms = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip() and not line.lstrip().startswith("#"):
                perm = np.array([int(t) for t in line.split()], dtype=np.int64)
                if len(perm) != n or not np.array_equal(np.sort(perm), np.arange(1, n + 1)):
                    raise ConfigError(f"{path}: line is not a permutation of 1..{n}")
                perms.append(perm)
    if not perms:
        raise ConfigError(f"{path}: no permutations")
    return perms


def _solve(args) -> int:
    spec = ExperimentSpec(
        instance=load_instance(args.instance),
        algorithm=args.alg,
        objective=args.objective,
        variant=args.variant,
        runs=args.runs,
        max_evaluations=args.evals,
        master_seed=args.seed,
        builder=args.builder,
        out_dir=args.out,
    )
    st = run_experiment(spec)
    print(f"{spec.instance.name} {spec.label} {spec.objective.value}: min {st.min:g} mean {st.mean:.3f} stdev {st.stdev:.3f}")
    return 0


def _generate(args) -> int:
    overrides = {k: v for k, v in (("n_low", args.n_low), ("n_high", args.n_high), ("horizon", args.horizon), ("name", args.name)) if v is not None}
    params = PRESETS[args.preset](**overrides)
    inst = generate_instance(params, args.seed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_instance(inst, args.out)
    print(f"{inst.name}: {inst.n} requests ({len(inst.low_ids)} low, {len(inst.high_ids)} high) -> {args.out}")
    return 0


def _analyze(args) -> int:
    inst = load_instance(args.instance)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    if args.analysis == "neighbors":
        rows = []
        seeds = np.random.SeedSequence(args.seed).spawn(args.samples)
        for i, s in enumerate(seeds):
            rows.append((f"random-{i}", analysis.neighbor_scan(inst, random_permutation(inst.n, s), args.objective)))
        if args.solutions:
            for i, perm in enumerate(_read_permutations(args.solutions, inst.n)):
                rows.append((f"solution-{i}", analysis.neighbor_scan(inst, perm, args.objective)))
        analysis.write_neighbor_stats(args.out, rows)
    elif args.analysis == "walks":
        rows = analysis.plateau_experiment(
            inst, args.objective, args.rls_evals, args.every, args.walks, args.cap, args.seed
        )
        analysis.write_walks(args.out, rows)
    else:
        if args.solutions:
            perms = _read_permutations(args.solutions, inst.n)
        else:
            spec = ExperimentSpec(inst, args.alg, args.objective, runs=args.runs, max_evaluations=args.evals, master_seed=args.seed)
            perms = [r.best_permutation.as_array() for _, r in run_trials(spec)]
        analysis.write_precedence(args.out, [(inst.name, analysis.precedence_pairs(perms, inst))])
    print(f"wrote {args.out}")
    return 0


def _oracle(args) -> int:
    inst = load_instance(args.instance)
    value, perm = exhaustive_oracle(inst, args.objective, args.builder)
    print(f"optimum {value}")
    print("permutation " + " ".join(map(str, perm)))
    return 0


def _compare(args) -> int:
    if not 0 < args.alpha < 1:
        raise ConfigError("alpha must lie in (0, 1)")
    a = read_stats_values(_values_path(args.a))
    b = read_stats_values(_values_path(args.b))
    c = compare(a, b, args.alpha)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["mean_a", "mean_b", "t", "t_pvalue", "ranksum_pvalue", "alpha", "significant"])
    w.writerow([f"{c.mean_a:.6g}", f"{c.mean_b:.6g}", f"{c.t_statistic:.6g}", f"{c.t_pvalue:.6g}", f"{c.ranksum_pvalue:.6g}", args.alpha, int(c.significant and c.ranksum_significant)])
    return 0


COMMANDS = {"solve": _solve, "generate": _generate, "analyze": _analyze, "oracle": _oracle, "compare": _compare}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except InstanceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
