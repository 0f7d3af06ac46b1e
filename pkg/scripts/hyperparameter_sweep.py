"""Round-averaged regret for every point of each policy's hyperparameter grid.

Works on a synthetic environment or a recorded dataset, and prints one table
row per configuration, best first within each algorithm.

    python scripts/hyperparameter_sweep.py --synthetic skewed --bandits 20 --arms 8 --budget 10000 --repeats 5
    python scripts/hyperparameter_sweep.py --dataset data/gvgai_trials.csv --out results/sweep
"""

import argparse
from itertools import groupby
from pathlib import Path

from bestarm.harness import ExperimentConfig, run_experiment
from bestarm.policies import parse_policies
from bestarm.report import emit_outputs
from bestarm.sources import SYNTHETIC_FAMILIES, SyntheticSpec


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    src = p.add_mutually_exclusive_group()
    src.add_argument("--dataset", type=Path)
    src.add_argument("--synthetic", choices=SYNTHETIC_FAMILIES, default="skewed")
    p.add_argument("--format", default="trials-csv")
    p.add_argument("--bandits", type=int, default=20)
    p.add_argument("--arms", type=int, default=8)
    p.add_argument("--env-seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--checkpoint-every", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path)
    args = p.parse_args()

    source = (
        dict(dataset=args.dataset, dataset_format=args.format)
        if args.dataset
        else dict(synthetic=SyntheticSpec(args.bandits, args.arms, family=args.synthetic, seed=args.env_seed))
    )
    config = ExperimentConfig(
        policies=parse_policies("all"),
        budget=args.budget,
        repeats=args.repeats,
        checkpoint_every=args.checkpoint_every,
        master_seed=args.seed,
        workers=args.workers,
        **source,
    )
    result = run_experiment(config)
    rows = [(p.config.kind.display_name, p.label, p.aggregate().round_averaged_regret) for p in result.policies]
    for name, group in groupby(rows, key=lambda r: r[0]):
        for _, label, score in sorted(group, key=lambda r: r[2]):
            print(f"{label:<36} {score:.5f}")
        print()
    if args.out:
        emit_outputs(result, args.out)


if __name__ == "__main__":
    main()
