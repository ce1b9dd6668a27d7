"""
Building schedules from request orderings
=========================================

Generate a small instance, decode a few permutations and look at what the
greedy builder does with them.
"""

import numpy as np

from oversched.builder import Objective, build_schedule, dump_schedule, gooley_schedule
from oversched.model import GeneratorParams, generate_instance
from oversched.objectives import evaluate

# Half of a busy day: 112 low-altitude and 129 high-altitude requests in 12 hours.
instance = generate_instance(GeneratorParams.desk_r_shaped(), seed=7)
print(f"{instance.name}: {instance.n} requests on {len(instance.resources)} antennas")

# The identity ordering, decoded under both objectives.
identity = np.arange(1, instance.n + 1)
for objective in Objective:
    schedule = build_schedule(instance, identity, objective)
    print(objective.value, evaluate(schedule).value)

# A schedule is a per-antenna list of placements. Overlapped ones are flagged.
print("\n".join(dump_schedule(build_schedule(instance, identity, Objective.OVERLAPS)).splitlines()[:8]))

# Random orderings spread out quite a bit.
rng = np.random.default_rng(0)
values = [evaluate(build_schedule(instance, rng.permutation(instance.n) + 1)).value for _ in range(200)]
print("random orderings: min", min(values), "mean", np.mean(values))

# The two-phase constructive heuristic needs no search at all.
print("two-phase heuristic:", evaluate(gooley_schedule(instance)).value)
