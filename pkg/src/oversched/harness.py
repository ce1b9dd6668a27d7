"""Repeated seeded trials, summary statistics, significance tests and CSV output."""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
import os
import tempfile
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .builder import Objective, flexibility_order, gooley_schedule, greedy_activity_selector
from .model import RNG_ALGORITHM, GeneratorParams, Permutation, ProblemInstance, generate_instance, load_instance
from .search import SearchConfig, SearchResult, alls, alls_inverted, genitor, hbss, rls, swo
from .search.common import ProgressTrace

logger = logging.getLogger(__name__)

__all__ = [
    "ALGORITHMS",
    "ExperimentSpec",
    "TrialStats",
    "Comparison",
    "run_seed",
    "run_trials",
    "run_experiment",
    "trial_stats",
    "compare",
    "rank_sum_test",
    "read_stats_values",
]

ALGORITHMS = ("rls", "alls", "genitor", "swo", "hbss", "gooley")
SWO_RESTART_SWAPS = 20


@dataclass(frozen=True)
class ExperimentSpec:
    """One algorithm/variant on one instance, repeated ``runs`` times.

    ``instance`` may be a loaded instance, a path to an instance file, or
    generator parameters (drawn with ``instance_seed``). ``variant`` selects
    ablations: ``inverted`` for ALLS; ``k=<int>`` (or ``k=half``) for Genitor;
    ``random-start``, ``one-move`` or ``top=<k>`` for SWO. ``params`` passes
    extra keyword arguments to the algorithm.
    """

    instance: ProblemInstance | GeneratorParams | str | Path
    algorithm: str
    objective: Objective = Objective.CONFLICTS
    variant: str = ""
    runs: int = 30
    max_evaluations: int = 8000
    master_seed: int = 0
    builder: str = "standard"
    trace_stride: int = 100
    params: dict = field(default_factory=dict)
    out_dir: str | Path | None = None
    instance_seed: int = 0

    def __post_init__(self):
        if isinstance(self.instance, GeneratorParams):
            object.__setattr__(self, "instance", generate_instance(self.instance, self.instance_seed))
        elif isinstance(self.instance, (str, Path)):
            object.__setattr__(self, "instance", load_instance(self.instance))
        object.__setattr__(self, "objective", Objective.parse(self.objective))
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        _dispatch(self.algorithm, self.variant, self.instance.n)  # validates the variant

    @property
    def label(self) -> str:
        return f"{self.algorithm}:{self.variant}" if self.variant else self.algorithm


@dataclass(frozen=True)
class TrialStats:
    min: float
    mean: float
    stdev: float
    values: tuple[int, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("no values")


@dataclass(frozen=True)
class Comparison:
    """One-sided tests of "sample A is smaller than sample B"."""

    t_statistic: float
    t_pvalue: float
    ranksum_pvalue: float
    alpha: float
    mean_a: float
    mean_b: float

    @property
    def significant(self) -> bool:
        return self.t_pvalue <= self.alpha

    @property
    def ranksum_significant(self) -> bool:
        return self.ranksum_pvalue <= self.alpha


def trial_stats(values: Sequence[int]) -> TrialStats:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("no values")
    return TrialStats(float(arr.min()), float(arr.mean()), float(arr.std(ddof=0)), tuple(int(v) for v in values))


def run_seed(master_seed: int, label: str, run: int) -> int:
    """Per-run seed derived from (master seed, algorithm label, run index)."""
    ss = np.random.SeedSequence([int(master_seed), zlib.crc32(label.encode()), int(run)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _dispatch(algorithm: str, variant: str, n: int) -> Callable[..., SearchResult]:
    """Return ``f(instance, config, run_index, **params)`` for an algorithm/variant."""
    v = variant.strip().lower()
    if algorithm in ("rls", "hbss", "gooley") and v:
        raise ValueError(f"{algorithm} has no variants (got {variant!r})")
    if algorithm == "rls":
        return lambda inst, cfg, run, **kw: rls(inst, cfg, **kw)
    if algorithm == "hbss":
        return lambda inst, cfg, run, **kw: hbss(inst, cfg, **kw)
    if algorithm == "gooley":
        return lambda inst, cfg, run, **kw: _gooley(inst, cfg)
    if algorithm == "alls":
        if v in ("", "standard"):
            return lambda inst, cfg, run, **kw: alls(inst, cfg, **kw)
        if v == "inverted":
            return lambda inst, cfg, run, **kw: alls_inverted(inst, cfg, **kw)
        raise ValueError(f"unknown alls variant {variant!r}")
    if algorithm == "genitor":
        if v in ("", "third"):
            return lambda inst, cfg, run, **kw: genitor(inst, cfg, **kw)
        if v.startswith("k="):
            arg = v[2:]
            k = max(1, n // 2) if arg == "half" else int(arg)
            if not 0 <= k <= n:
                raise ValueError(f"cannot select {k} crossover positions from {n}")
            return lambda inst, cfg, run, **kw: genitor(inst, cfg, k_positions=k, **kw)
        raise ValueError(f"unknown genitor variant {variant!r}")
    if algorithm == "swo":
        if v in ("", "all"):
            start, moves = "greedy", "all"
        elif v == "random-start":
            start, moves = "random", "all"
        elif v == "one-move":
            start, moves = "greedy", "one"
        elif v.startswith("top="):
            start, moves = "greedy", int(v[4:])
            if moves < 1:
                raise ValueError("top-k needs k >= 1")
        else:
            raise ValueError(f"unknown swo variant {variant!r}")

        def run_swo(inst, cfg, run, **kw):
            swaps = SWO_RESTART_SWAPS if (run > 0 and start == "greedy") else 0
            kw.setdefault("perturb_swaps", swaps)
            return swo(inst, cfg, start=start, moves=moves, **kw)

        return run_swo
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _gooley(instance: ProblemInstance, config: SearchConfig) -> SearchResult:
    sched = gooley_schedule(instance, config.objective)
    stride, total = config.trace_stride, config.max_evaluations
    points = list(range(stride, total + 1, stride)) + ([total] if total % stride else [])
    # one deterministic construction; record lows kept by phase one, then the insertion order
    kept = sorted(p.request for p in greedy_activity_selector(instance).all_placements())
    kept_set = set(kept)
    order = kept + flexibility_order(instance, instance.high_ids, lb_tiebreak=True)
    order += [i for i in instance.low_ids if i not in kept_set]
    return SearchResult(
        sched.value, Permutation(tuple(order)), 1, ProgressTrace(tuple(points), (sched.value,) * len(points))
    )


def run_trials(spec: ExperimentSpec) -> list[tuple[int, SearchResult]]:
    """Run every trial of ``spec``; returns ``(seed, result)`` per run."""
    fn = _dispatch(spec.algorithm, spec.variant, spec.instance.n)
    out = []
    for run in range(spec.runs):
        seed = run_seed(spec.master_seed, spec.label, run)
        cfg = SearchConfig(
            objective=spec.objective,
            max_evaluations=spec.max_evaluations,
            seed=seed,
            builder=spec.builder,
            trace_stride=spec.trace_stride,
        )
        out.append((seed, fn(spec.instance, cfg, run, **spec.params)))
    return out


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def run_experiment(spec: ExperimentSpec) -> TrialStats:
    """Run the trials and, when ``out_dir`` is set, write the CSV outputs.

    Files (all deterministic for a fixed master seed): ``stats.csv`` with
    ``instance,algorithm,variant,objective,min,mean,stdev``; ``runs.csv``
    with one row per run and its seed; ``trace.csv`` with
    ``run,evaluation,best_value``; ``best_permutations.txt`` with each run's
    best permutation on one line. Wall time goes to the log only, since it
    would break byte-identical reruns.
    """
    t0 = time.perf_counter()
    trials = run_trials(spec)
    st = trial_stats([r.best_value for _, r in trials])
    logger.info("%s on %s: min %s mean %.3f (%.1fs)", spec.label, spec.instance.name, st.min, st.mean, time.perf_counter() - t0)
    if spec.out_dir is not None:
        out = Path(spec.out_dir)
        header = ["instance", "algorithm", "variant", "objective", "min", "mean", "stdev"]
        row = [spec.instance.name, spec.algorithm, spec.variant, spec.objective.value, _num(st.min), _num(st.mean), _num(st.stdev)]
        _atomic_write(out / "stats.csv", _csv([header, row]))
        runs = [["run", "seed", "rng", "best_value", "evaluations_used"]]
        runs += [[i, seed, RNG_ALGORITHM, r.best_value, r.evaluations_used] for i, (seed, r) in enumerate(trials)]
        _atomic_write(out / "runs.csv", _csv(runs))
        trace = [["run", "evaluation", "best_value"]]
        for i, (_, r) in enumerate(trials):
            trace.extend(r.trace.rows(i))
        _atomic_write(out / "trace.csv", _csv(trace))
        perms = "".join(" ".join(map(str, r.best_permutation)) + "\n" for _, r in trials)
        _atomic_write(out / "best_permutations.txt", perms)
    return st


def _num(x: float) -> str:
    return repr(float(x))


def read_stats_values(path) -> list[int]:
    """Per-run best values from a ``runs.csv`` (or a directory holding one)."""
    p = Path(path)
    if p.is_dir():
        p = p / "runs.csv"
    with open(p, newline="") as fh:
        return [int(row["best_value"]) for row in csv.DictReader(fh)]


# ---------------------------------------------------------------------------
# significance tests


def _exact_ranksum_p(a: np.ndarray, b: np.ndarray) -> float:
    pooled = np.concatenate((a, b))
    ranks = stats.rankdata(pooled)
    observed = ranks[: len(a)].sum()
    hits = total = 0
    for idx in itertools.combinations(range(len(pooled)), len(a)):
        total += 1
        hits += ranks[list(idx)].sum() <= observed + 1e-9
    return hits / total


def rank_sum_test(a: Sequence[float], b: Sequence[float]) -> float:
    """One-sided Wilcoxon rank-sum p-value for "a tends to be smaller than b".

    Exact enumeration over midranks when both samples are below 10,
    otherwise the tie-corrected normal approximation.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if len(a) < 10 and len(b) < 10:
        return _exact_ranksum_p(a, b)
    return float(stats.mannwhitneyu(a, b, alternative="less", method="asymptotic", use_continuity=False).pvalue)


def _t_test(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    va, vb = a.var(ddof=1) if len(a) > 1 else 0.0, b.var(ddof=1) if len(b) > 1 else 0.0
    df = len(a) + len(b) - 2
    diff = a.mean() - b.mean()
    pooled = ((len(a) - 1) * va + (len(b) - 1) * vb) / df if df > 0 else 0.0
    se = math.sqrt(pooled * (1.0 / len(a) + 1.0 / len(b)))
    if se == 0.0:
        if diff == 0.0:
            return 0.0, 0.5
        return (-math.inf, 0.0) if diff < 0 else (math.inf, 1.0)
    t = diff / se
    return t, float(stats.t.cdf(t, df)) if df > 0 else 0.5


def compare(a, b, alpha: float = 0.005) -> Comparison:
    """Test whether ``a`` has smaller values than ``b`` (minimisation: a is better).

    Uses the pooled-variance two-sample t-test and the rank-sum test, both
    one-sided. ``a`` and ``b`` may be ``TrialStats`` or plain sequences.
    """
    xa = np.asarray(a.values if isinstance(a, TrialStats) else a, dtype=float)
    xb = np.asarray(b.values if isinstance(b, TrialStats) else b, dtype=float)
    if xa.size == 0 or xb.size == 0:
        raise ValueError("both samples need at least one value")
    t, p = _t_test(xa, xb)
    return Comparison(t, p, rank_sum_test(xa, xb), alpha, float(xa.mean()), float(xb.mean()))
