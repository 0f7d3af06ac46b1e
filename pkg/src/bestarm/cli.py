"""Command line entry point: run a configured experiment and write its outputs.

Examples::

    bestarm --synthetic skewed --bandits 50 --arms 10 --budget 25000 --repeats 30 \\
        --policy optimistic-ws:c=16 --policy uniform --policy ucb-e:a=2 --out results/skewed
    bestarm --dataset gvgai.csv --policy defaults --out results/gvgai
    bestarm --config configs/ludii_shaped.cfg --policy sr --policy sh
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from .harness import config_from_mapping, read_config_file, run_experiment, summarize
from .report import emit_outputs
from .sources import FORMATS, SYNTHETIC_FAMILIES

log = logging.getLogger("bestarm")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bestarm",
        description="Multi-bandit best arm identification benchmark (regret-vs-rounds).",
    )
    p.add_argument("--config", help="flat 'key = value' config file; flags override it")
    src = p.add_argument_group("reward source")
    src.add_argument("--dataset", help="trial dataset CSV to replay")
    src.add_argument("--format", dest="format", choices=FORMATS, help="dataset layout (default trials-csv)")
    src.add_argument("--synthetic", choices=SYNTHETIC_FAMILIES, help="use a synthetic Bernoulli environment")
    src.add_argument("--bandits", type=int, help="number of synthetic bandits")
    src.add_argument("--arms", help="arms per synthetic bandit (one value, or comma list per bandit)")
    src.add_argument("--means", help="comma list of Bernoulli means shared by every synthetic bandit")
    src.add_argument("--concentration", type=float, help="Beta concentration of the skewed family")
    src.add_argument("--env-seed", type=int, help="seed of the synthetic environment")
    run = p.add_argument_group("protocol")
    run.add_argument("--budget", type=int, help="arm pulls per run (default 50000)")
    run.add_argument("--repeats", type=int, help="runs per policy (default 10)")
    run.add_argument("--checkpoint-every", type=int, help="rounds between regret checkpoints (default 1000)")
    run.add_argument("--seed", type=int, help="master seed (default 0)")
    run.add_argument(
        "--policy",
        action="append",
        help="policy as name[:param=v1,v2]; repeatable. 'defaults' = every algorithm at its default, 'all' = full grids",
    )
    run.add_argument("--workers", type=int, help="parallel worker processes (default 1)")
    p.add_argument("--out", help="output directory (default results)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        values = read_config_file(args.config) if args.config else {}
        for key in (
            "dataset", "format", "synthetic", "bandits", "arms", "means", "concentration",
            "env_seed", "budget", "repeats", "checkpoint_every", "seed", "workers", "out",
        ):
            flag = getattr(args, key)
            if flag is not None:
                values[key] = flag
        if args.policy:
            values["policy"] = args.policy
        if args.dataset is not None:
            values.pop("synthetic", None)
        elif args.synthetic is not None:
            values.pop("dataset", None)
        config = config_from_mapping(values)
        result = run_experiment(config)
        written = emit_outputs(result)
    except (OSError, ValueError) as exc:
        print(f"bestarm: error: {exc}", file=sys.stderr)
        return 2
    for line in summarize(result):
        print(line)
    print(f"wrote {len(written)} files to {config.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
