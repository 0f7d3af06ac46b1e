"""Fraction of a fixed budget that Successive Rejects and Sequential Halving spend.

With many bandits each one gets floor(budget / M) pulls, which can be too few
for the schedules to use. The default is a 1085 x 29 environment with a budget
of 50,000 (46 pulls per bandit).

    python scripts/budget_utilization.py --bandits 1085 --arms 29 --budget 50000
"""

import argparse

from bestarm.harness import ExperimentConfig, run_experiment
from bestarm.policies import parse_policies, sequential_halving_usage, successive_rejects_usage
from bestarm.sources import SyntheticSpec


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--bandits", type=int, default=1085)
    p.add_argument("--arms", type=int, default=29)
    p.add_argument("--budget", type=int, default=50_000)
    p.add_argument("--env-seed", type=int, default=3)
    args = p.parse_args()

    per_bandit = args.budget // args.bandits
    print(f"{args.bandits} bandits x {args.arms} arms, {per_bandit} pulls per bandit")
    print(f"schedule: SR uses {successive_rejects_usage(args.arms, per_bandit)}, "
          f"SH uses {sequential_halving_usage(args.arms, per_bandit)} of {per_bandit}")

    config = ExperimentConfig(
        policies=parse_policies("sr") + parse_policies("sh"),
        synthetic=SyntheticSpec(args.bandits, args.arms, seed=args.env_seed),
        budget=args.budget,
        repeats=1,
        checkpoint_every=min(1_000, args.budget),
    )
    for result in run_experiment(config).policies:
        run = result.runs[0]
        print(f"{result.label:<20} issued {run.pulls_issued:>7}  unused {run.unused:>7}  ({result.utilization:.1%})")


if __name__ == "__main__":
    main()
