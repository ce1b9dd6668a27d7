"""
Comparing search algorithms
===========================

Run several algorithms on one instance with the experiment harness and test
whether the differences are significant.
"""

from oversched.builder import Objective
from oversched.harness import ExperimentSpec, compare, run_trials, trial_stats
from oversched.model import GeneratorParams, generate_instance

instance = generate_instance(GeneratorParams.desk_r_shaped(), seed=3)

# Short budgets keep this quick. Raise runs and max_evaluations for real studies.
setups = [("rls", ""), ("alls", ""), ("genitor", "k=10"), ("swo", "all"), ("hbss", ""), ("gooley", "")]
values = {}
for algorithm, variant in setups:
    spec = ExperimentSpec(instance, algorithm, Objective.OVERLAPS, variant, runs=8, max_evaluations=1500, master_seed=11)
    values[spec.label] = [result.best_value for _, result in run_trials(spec)]
    stats = trial_stats(values[spec.label])
    print(f"{spec.label:12s} min {stats.min:5.0f} mean {stats.mean:8.1f} stdev {stats.stdev:6.1f}")

# One-sided tests: is the first sample's mean smaller than the second's?
c = compare(values["alls"], values["rls"], alpha=0.05)
print(f"alls < rls: t p={c.t_pvalue:.4f}, rank-sum p={c.ranksum_pvalue:.4f}, significant={c.significant}")

# Passing out_dir to ExperimentSpec and calling run_experiment writes
# stats.csv, runs.csv, trace.csv and best_permutations.txt. The command
#     oversched solve --instance day.txt --alg alls --objective overlaps --out results/alls
# does the same from a shell.
