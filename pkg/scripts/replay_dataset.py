"""Replay a recorded trial dataset with every algorithm at its default setting.

Follows the standard protocol (one shared initial pull per arm, 50,000 rounds,
10 repeats, checkpoints every 1,000) and reports Optimistic-WS's round-averaged regret
relative to each other algorithm's (negative = lower).

    python scripts/replay_dataset.py data/gvgai_trials.csv --out results/gvgai
"""

import argparse
from pathlib import Path

from bestarm.harness import ExperimentConfig, run_experiment
from bestarm.policies import default_policies
from bestarm.report import emit_outputs
from bestarm.sources import FORMATS


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("dataset", type=Path)
    p.add_argument("--format", choices=FORMATS, default="trials-csv")
    p.add_argument("--budget", type=int, default=50_000)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("results/replay"))
    args = p.parse_args()

    config = ExperimentConfig(
        policies=default_policies(),
        dataset=args.dataset,
        dataset_format=args.format,
        budget=args.budget,
        repeats=args.repeats,
        master_seed=args.seed,
        workers=args.workers,
        out_dir=args.out,
    )
    result = run_experiment(config)
    scores = {p.label: p.aggregate().round_averaged_regret for p in result.policies}
    ows_label = next(label for label in scores if label.startswith("Optimistic-WS"))
    ows = scores[ows_label]
    print(result.source_description)
    for label, score in sorted(scores.items(), key=lambda kv: kv[1]):
        note = "" if label == ows_label or score == 0 else f"  Optimistic-WS relative to this: {ows / score - 1:+.1%}"
        print(f"{label:<36} {score:.5f}{note}")
    emit_outputs(result)
    print(f"outputs in {args.out}")


if __name__ == "__main__":
    main()
