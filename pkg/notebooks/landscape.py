"""
Looking at the search landscape
===============================

Neighbourhood scans, plateau walks and precedence agreement among good
solutions.
"""

import numpy as np

from oversched.analysis import neighbor_scan, plateau_experiment, precedence_pairs
from oversched.builder import Objective
from oversched.harness import ExperimentSpec, run_trials
from oversched.model import GeneratorParams, generate_instance

instance = generate_instance(GeneratorParams.desk_r_shaped(), seed=5)

# Every shift neighbour of a random ordering, classified against its value.
perm = np.random.default_rng(1).permutation(instance.n) + 1
for objective in Objective:
    s = neighbor_scan(instance, perm, objective)
    print(f"{objective.value}: {s.total_neighbors} neighbours, "
          f"{s.same_value / s.total_neighbors:.1%} same value, {s.improving} improving")

# Plateau walks from snapshots of one local-search run. Walks get longer as
# the run progresses, because plateaus near good solutions are wider.
rows = plateau_experiment(instance, Objective.CONFLICTS, rls_evaluations=4000, snapshot_every=1000, walks=10, cap=200, seed=2)
for r in rows:
    print(f"after {r.evaluation} evals: value {r.snapshot_value}, mean steps {r.mean_steps:.1f}, capped {r.capped_fraction:.0%}")

# Ordered pairs that every good solution agrees on.
spec = ExperimentSpec(instance, "alls", runs=6, max_evaluations=2000, master_seed=4)
best = [result.best_permutation for _, result in run_trials(spec)]
p = precedence_pairs(best, instance)
print(f"shared pairs: {p.low_high_pairs} low-before-high, {p.other_pairs} other, "
      f"about {p.expected_random:.1f} expected by chance")
