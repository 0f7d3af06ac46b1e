"""Reward sources: replay of recorded trial outcomes, and synthetic Bernoulli arms.

Two CSV layouts are understood:

* ``trials-csv``: header ``bandit,arm,reward``, one trial per row.
* ``histogram-csv``: header ``bandit,arm,outcome_value,count``, a tally of how
  often each outcome value occurred (e.g. 1 for a win, 0.5 for a draw).

Bandit and arm names become dense indices in order of first appearance. Agents
that never played a game are simply absent, giving bandits unequal arm counts.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import EnvironmentShape

FORMATS = ("trials-csv", "histogram-csv")
_HEADERS = {
    "trials-csv": ["bandit", "arm", "reward"],
    "histogram-csv": ["bandit", "arm", "outcome_value", "count"],
}


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class GroundTruth:
    true_means: tuple[tuple[float, ...], ...]
    padded: np.ndarray = field(init=False, repr=False, compare=False)
    best_mean: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        means = tuple(tuple(float(x) for x in row) for row in self.true_means)
        object.__setattr__(self, "true_means", means)
        width = max(len(row) for row in means)
        padded = np.full((len(means), width), -np.inf)
        for m, row in enumerate(means):
            padded[m, : len(row)] = row
        object.__setattr__(self, "padded", padded)
        object.__setattr__(self, "best_mean", padded.max(axis=1))

    @property
    def num_bandits(self) -> int:
        return len(self.true_means)

    @property
    def shape(self) -> EnvironmentShape:
        return EnvironmentShape(tuple(len(row) for row in self.true_means))

    def best_arms(self, bandit: int) -> list[int]:
        row = self.true_means[bandit]
        top = max(row)
        return [k for k, mu in enumerate(row) if mu == top]


@dataclass
class TrialDataset:
    bandit_names: list[str]
    arm_names: list[list[str]]
    trials: list[list[np.ndarray]]

    def __post_init__(self) -> None:
        if len(self.arm_names) != len(self.bandit_names) or len(self.trials) != len(self.bandit_names):
            raise DatasetError("bandit, arm and trial lists disagree in length")
        for m, (arms, rows) in enumerate(zip(self.arm_names, self.trials)):
            if not arms:
                raise DatasetError(f"bandit {self.bandit_names[m]!r} has no arms")
            if len(arms) != len(rows):
                raise DatasetError(f"bandit {self.bandit_names[m]!r}: arm names and trials disagree")
            for k, values in enumerate(rows):
                values = np.asarray(values, dtype=float)
                if values.size == 0:
                    raise DatasetError(f"pair ({self.bandit_names[m]!r}, {arms[k]!r}) has no trials")
                if values.min() < 0.0 or values.max() > 1.0:
                    raise DatasetError(f"pair ({self.bandit_names[m]!r}, {arms[k]!r}) has rewards outside [0, 1]")
                rows[k] = values

    @property
    def shape(self) -> EnvironmentShape:
        return EnvironmentShape(tuple(len(arms) for arms in self.arm_names))

    @property
    def num_trials(self) -> int:
        return sum(v.size for row in self.trials for v in row)

    def ground_truth(self) -> GroundTruth:
        return GroundTruth(tuple(tuple(float(v.mean()) for v in row) for row in self.trials))


def _check_format(fmt: str) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown dataset format {fmt!r}; expected one of {FORMATS}")
    return fmt


def _parse_unit(text: str, what: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DatasetError(f"line {line}: {what} {text!r} is not a number") from None
    if not 0.0 <= value <= 1.0:  # also rejects NaN
        raise DatasetError(f"line {line}: {what} {value!r} lies outside [0, 1]")
    return value


def load_dataset(path: str | Path, fmt: str = "trials-csv") -> TrialDataset:
    """Read a trial dataset; see the module docstring for the two layouts."""
    _check_format(fmt)
    bandit_index: dict[str, int] = {}
    arm_index: list[dict[str, int]] = []
    values: list[list[list[float]]] = []
    counts: list[list[list[int]]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader, [])]
        if header != _HEADERS[fmt]:
            raise DatasetError(f"{path}: expected header {','.join(_HEADERS[fmt])}, got {','.join(header)!r}")
        for line, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DatasetError(f"line {line}: expected {len(header)} fields, got {len(row)}")
            bandit, arm = row[0].strip(), row[1].strip()
            value = _parse_unit(row[2].strip(), "reward" if fmt == "trials-csv" else "outcome_value", line)
            count = 1
            if fmt == "histogram-csv":
                try:
                    count = int(row[3])
                except ValueError:
                    raise DatasetError(f"line {line}: count {row[3]!r} is not an integer") from None
                if count < 0:
                    raise DatasetError(f"line {line}: negative count {count}")
            m = bandit_index.setdefault(bandit, len(bandit_index))
            if m == len(arm_index):
                arm_index.append({})
                values.append([])
                counts.append([])
            k = arm_index[m].setdefault(arm, len(arm_index[m]))
            if k == len(values[m]):
                values[m].append([])
                counts[m].append([])
            values[m][k].append(value)
            counts[m][k].append(count)

    if not bandit_index:
        raise DatasetError(f"{path}: no trials found")
    bandit_names, arm_names, trials = [], [], []
    for bandit, m in bandit_index.items():
        names, rows = [], []
        for arm, k in arm_index[m].items():
            expanded = np.repeat(np.asarray(values[m][k]), counts[m][k])
            if expanded.size == 0:
                warnings.warn(f"{path}: pair ({bandit!r}, {arm!r}) has no trials and is dropped", stacklevel=2)
                continue
            names.append(arm)
            rows.append(expanded)
        if not names:
            raise DatasetError(f"{path}: bandit {bandit!r} has no arm with any trials")
        bandit_names.append(bandit)
        arm_names.append(names)
        trials.append(rows)
    return TrialDataset(bandit_names, arm_names, trials)


def save_dataset(dataset: TrialDataset, path: str | Path, fmt: str = "trials-csv") -> None:
    _check_format(fmt)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_HEADERS[fmt])
        for bandit, arms, rows in zip(dataset.bandit_names, dataset.arm_names, dataset.trials):
            for arm, trials in zip(arms, rows):
                if fmt == "trials-csv":
                    writer.writerows([bandit, arm, repr(float(x))] for x in trials)
                else:
                    outcomes, tallies = np.unique(trials, return_counts=True)
                    writer.writerows(
                        [bandit, arm, repr(float(v)), int(c)] for v, c in zip(outcomes, tallies)
                    )


class RewardSource:
    """Samples rewards for pulls and knows the true mean of every pair."""

    ground_truth: GroundTruth

    @property
    def shape(self) -> EnvironmentShape:
        return self.ground_truth.shape

    def _check_pair(self, bandit: int, arm: int) -> None:
        shape = self.shape.arms_per_bandit
        if not (0 <= bandit < len(shape) and 0 <= arm < shape[bandit]):
            raise IndexError(f"no pair ({bandit}, {arm}) in this source")

    def sample(self, bandit: int, arm: int, rng: np.random.Generator) -> float:
        raise NotImplementedError

    def initial_pull_value(self, bandit: int, arm: int, seed: int) -> float:
        """Reward used to seed a pair's estimate; a pure function of (seed, pair)."""
        self._check_pair(bandit, arm)
        return self.sample(bandit, arm, np.random.default_rng([seed, bandit, arm]))

    def initial_values(self, seed: int) -> list[list[float]]:
        return [
            [self.initial_pull_value(m, k, seed) for k in range(k_m)]
            for m, k_m in enumerate(self.shape.arms_per_bandit)
        ]


class DatasetSource(RewardSource):
    """Uniform draws with replacement from each pair's recorded trials."""

    def __init__(self, dataset: TrialDataset) -> None:
        self.dataset = dataset
        self.ground_truth = dataset.ground_truth()
        self._trials = dataset.trials

    def sample(self, bandit: int, arm: int, rng: np.random.Generator) -> float:
        try:
            trials = self._trials[bandit][arm]
        except IndexError:
            raise IndexError(f"no pair ({bandit}, {arm}) in this dataset") from None
        if bandit < 0 or arm < 0:
            raise IndexError(f"no pair ({bandit}, {arm}) in this dataset")
        return float(trials[int(rng.random() * trials.size)])


class BernoulliSource(RewardSource):
    def __init__(self, means: Sequence[Sequence[float]]) -> None:
        for row in means:
            for p in row:
                if not 0.0 <= p <= 1.0:
                    raise ValueError(f"Bernoulli mean {p!r} lies outside [0, 1]")
        self.ground_truth = GroundTruth(tuple(tuple(row) for row in means))
        self._means = [list(row) for row in self.ground_truth.true_means]

    def sample(self, bandit: int, arm: int, rng: np.random.Generator) -> float:
        if bandit < 0 or arm < 0:
            raise IndexError(f"no pair ({bandit}, {arm}) in this source")
        try:
            p = self._means[bandit][arm]
        except IndexError:
            raise IndexError(f"no pair ({bandit}, {arm}) in this source") from None
        return 1.0 if rng.random() < p else 0.0


SYNTHETIC_FAMILIES = ("bernoulli", "skewed")


@dataclass(frozen=True)
class SyntheticSpec:
    """Synthetic environment of Bernoulli arms.

    ``bernoulli`` uses ``means`` for every bandit when given, else draws each
    arm's mean uniformly from [0, 1]. ``skewed`` draws each mean from a
    Beta(concentration, concentration) law, which piles up near 0 and 1 when the
    concentration is below one.
    """

    num_bandits: int = 5
    arms: int | tuple[int, ...] = 4
    family: str = "bernoulli"
    means: tuple[float, ...] | None = None
    concentration: float = 0.3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.family not in SYNTHETIC_FAMILIES:
            raise ValueError(f"unknown synthetic family {self.family!r}; expected one of {SYNTHETIC_FAMILIES}")
        if self.num_bandits < 1:
            raise ValueError("num_bandits must be at least 1")
        if self.means is not None:
            if self.family != "bernoulli":
                raise ValueError("explicit means only apply to the bernoulli family")
            object.__setattr__(self, "means", tuple(float(p) for p in self.means))
            if not self.means or any(not 0.0 <= p <= 1.0 for p in self.means):
                raise ValueError(f"means must be non-empty and within [0, 1]: {self.means}")
            object.__setattr__(self, "arms", len(self.means))
        if isinstance(self.arms, int):
            arms = (self.arms,) * self.num_bandits
        else:
            arms = tuple(int(k) for k in self.arms)
        if len(arms) != self.num_bandits or any(k < 1 for k in arms):
            raise ValueError(f"arms must give a positive count for each of {self.num_bandits} bandits")
        if not (self.concentration > 0 and math.isfinite(self.concentration)):
            raise ValueError("concentration must be positive")

    @property
    def arms_per_bandit(self) -> tuple[int, ...]:
        return (self.arms,) * self.num_bandits if isinstance(self.arms, int) else tuple(self.arms)


def make_synthetic(spec: SyntheticSpec) -> tuple[BernoulliSource, GroundTruth]:
    rng = np.random.default_rng(spec.seed)
    rows = []
    for k_m in spec.arms_per_bandit:
        if spec.means is not None:
            rows.append(spec.means)
        elif spec.family == "bernoulli":
            rows.append(tuple(rng.random(k_m)))
        else:
            rows.append(tuple(rng.beta(spec.concentration, spec.concentration, size=k_m)))
    source = BernoulliSource(rows)
    return source, source.ground_truth
