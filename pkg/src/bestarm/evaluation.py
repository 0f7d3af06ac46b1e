"""Simple regret, error rate and checkpointed regret curves."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .policies import Prediction
from .sources import GroundTruth

CURVE_HEADER = ("round", "mean_regret", "std_regret", "mean_error", "std_error")


def _selected_means(prediction: Prediction, truth: GroundTruth) -> np.ndarray:
    arms = np.asarray(prediction.best_arm_per_bandit, dtype=np.int64)
    if arms.shape != (truth.num_bandits,):
        raise ValueError(f"prediction covers {arms.size} bandits, ground truth has {truth.num_bandits}")
    chosen = truth.padded[np.arange(truth.num_bandits), arms]
    if not np.isfinite(chosen).all():
        raise IndexError("prediction selects an arm the ground truth does not have")
    return chosen


def simple_regret(prediction: Prediction, truth: GroundTruth) -> float:
    """Mean over bandits of (best true mean - true mean of the recommended arm)."""
    return float(np.mean(truth.best_mean - _selected_means(prediction, truth)))


def error_rate(prediction: Prediction, truth: GroundTruth) -> float:
    """Fraction of bandits whose recommended arm is not a true best arm (ties count as correct)."""
    return float(np.mean(_selected_means(prediction, truth) != truth.best_mean))


@dataclass(frozen=True)
class Checkpoint:
    round: int
    simple_regret: float
    error_rate: float


@dataclass
class RegretCurve:
    checkpoints: list[Checkpoint]
    run_id: int = 0
    label: str = ""

    def __post_init__(self) -> None:
        rounds = [c.round for c in self.checkpoints]
        if any(b <= a for a, b in zip(rounds, rounds[1:])):
            raise ValueError("checkpoint rounds must be strictly increasing")

    @property
    def rounds(self) -> list[int]:
        return [c.round for c in self.checkpoints]

    @property
    def regrets(self) -> np.ndarray:
        return np.array([c.simple_regret for c in self.checkpoints])

    @property
    def errors(self) -> np.ndarray:
        return np.array([c.error_rate for c in self.checkpoints])


@dataclass(frozen=True)
class AggregateCurve:
    label: str
    rounds: tuple[int, ...]
    mean_regret: np.ndarray
    std_regret: np.ndarray
    mean_error: np.ndarray
    std_error: np.ndarray

    def rows(self) -> list[tuple[int, float, float, float, float]]:
        return [
            (r, float(a), float(b), float(c), float(d))
            for r, a, b, c, d in zip(self.rounds, self.mean_regret, self.std_regret, self.mean_error, self.std_error)
        ]

    @property
    def round_averaged_regret(self) -> float:
        return float(np.mean(self.mean_regret))


def aggregate(curves: Sequence[RegretCurve]) -> AggregateCurve:
    """Per-checkpoint mean and population standard deviation across runs."""
    if not curves:
        raise ValueError("cannot aggregate an empty list of curves")
    rounds = curves[0].rounds
    for curve in curves[1:]:
        if curve.rounds != rounds:
            raise ValueError("curves do not share the same checkpoint grid")
    regrets = np.array([c.regrets for c in curves]).reshape(len(curves), len(rounds))
    errors = np.array([c.errors for c in curves]).reshape(len(curves), len(rounds))
    mean_regret, std_regret = _mean_std(regrets)
    mean_error, std_error = _mean_std(errors)
    return AggregateCurve(curves[0].label, tuple(rounds), mean_regret, std_regret, mean_error, std_error)


def _mean_std(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # columns with no spread report their value and a std of exactly zero
    flat = np.ptp(values, axis=0) == 0
    mean = np.where(flat, values[0], values.mean(axis=0))
    std = np.where(flat, 0.0, values.std(axis=0))
    return mean, std
