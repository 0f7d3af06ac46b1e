"""Write a small synthetic trial dataset in either CSV layout.

Handy for trying dataset replay without the recorded game data. Games have
uneven agent counts and win / draw / loss outcomes (1 / 0.5 / 0).

    python scripts/make_demo_dataset.py data/demo.csv --games 30 --agents 12 --trials 100
"""

import argparse
from pathlib import Path

import numpy as np

from bestarm.sources import FORMATS, TrialDataset, save_dataset


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("path", type=Path)
    p.add_argument("--games", type=int, default=30)
    p.add_argument("--agents", type=int, default=12)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--format", choices=FORMATS, default="trials-csv")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    games, agents, trials = [], [], []
    for g in range(args.games):
        # some agents cannot play some games, so arm counts differ
        playing = sorted(rng.choice(args.agents, size=rng.integers(2, args.agents + 1), replace=False))
        rows = []
        for _ in playing:
            win, draw = rng.beta(0.5, 0.5), rng.uniform(0, 0.2)
            probs = np.array([win, draw, 1.0]) / (1.0 + draw)
            probs[2] = 1.0 - probs[0] - probs[1]
            rows.append(rng.choice([1.0, 0.5, 0.0], size=args.trials, p=probs))
        games.append(f"game{g:03d}")
        agents.append([f"agent{a:02d}" for a in playing])
        trials.append(rows)
    args.path.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(TrialDataset(games, agents, trials), args.path, args.format)
    print(f"wrote {sum(len(a) for a in agents)} game-agent pairs to {args.path}")


if __name__ == "__main__":
    main()
