"""Environment shape, per-arm running statistics and the randomized argmax.

Run statistics are stored as padded ``(num_bandits, max_arms)`` arrays so that the
policies can score every bandit-arm pair with a handful of numpy operations.
Cells beyond a bandit's own arm count are masked out by ``RunState.valid``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

REWARD_BOUND = 1.0


@dataclass(frozen=True)
class EnvironmentShape:
    arms_per_bandit: tuple[int, ...]
    reward_bound: float = REWARD_BOUND

    def __post_init__(self) -> None:
        object.__setattr__(self, "arms_per_bandit", tuple(int(k) for k in self.arms_per_bandit))
        if not self.arms_per_bandit:
            raise ValueError("an environment needs at least one bandit")
        if any(k < 1 for k in self.arms_per_bandit):
            raise ValueError(f"every bandit needs at least one arm: {self.arms_per_bandit}")
        if self.reward_bound != REWARD_BOUND:
            raise ValueError("rewards are bounded in [0, 1]; reward_bound must be 1.0")

    @classmethod
    def uniform(cls, num_bandits: int, num_arms: int) -> "EnvironmentShape":
        return cls((num_arms,) * num_bandits)

    @property
    def num_bandits(self) -> int:
        return len(self.arms_per_bandit)

    @property
    def max_arms(self) -> int:
        return max(self.arms_per_bandit)

    @property
    def num_pairs(self) -> int:
        return sum(self.arms_per_bandit)

    def pairs(self) -> Iterator[tuple[int, int]]:
        """All (bandit, arm) pairs in index order."""
        for m, k_m in enumerate(self.arms_per_bandit):
            for k in range(k_m):
                yield m, k


@dataclass(frozen=True)
class ArmState:
    pulls: int = 0
    mean_estimate: float = 0.0
    sum_sq: float = 0.0

    @property
    def variance(self) -> float:
        """Biased sample variance, floored at zero against round-off."""
        if self.pulls == 0:
            return 0.0
        return max(0.0, self.sum_sq / self.pulls - self.mean_estimate**2)


def random_argmax(values: Sequence[float] | np.ndarray, rng: np.random.Generator) -> int:
    """Index of a maximal entry, ties broken uniformly at random.

    Multi-dimensional input is flattened; the returned index is into the flat view.
    The generator is only consulted when there is more than one maximiser.
    """
    flat = np.asarray(values, dtype=float).ravel()
    if flat.size == 0:
        raise ValueError("random_argmax of an empty sequence")
    ties = np.flatnonzero(flat == flat.max())
    if ties.size == 1:
        return int(ties[0])
    if ties.size == 0:  # all NaN
        raise ValueError("random_argmax found no comparable maximum")
    return int(ties[rng.integers(ties.size)])


class RunState:
    """Mutable statistics of one run: pull counts, means, sums of squares, round clock.

    ``round`` counts completed budget rounds. Initialisation pulls update the
    statistics but leave it at zero, so the round being played is ``round + 1``.
    """

    def __init__(
        self,
        shape: EnvironmentShape,
        rng: np.random.Generator | int | None = None,
    ) -> None:
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self.round = 0
        self.version = 0  # bumped whenever bandits or arms are added
        self._set_shape(shape)
        m, kmax = self.num_bandits, shape.max_arms
        self.pulls = np.zeros((m, kmax), dtype=np.int64)
        self.means = np.zeros((m, kmax), dtype=float)
        self.sum_sq = np.zeros((m, kmax), dtype=float)
        self.unpulled = shape.num_pairs  # valid cells with zero pulls

    def _set_shape(self, shape: EnvironmentShape) -> None:
        self.shape = shape
        self._arms = list(shape.arms_per_bandit)
        self.arm_counts = np.asarray(self._arms, dtype=np.int64)
        self.valid = np.arange(shape.max_arms)[None, :] < self.arm_counts[:, None]
        # cells a policy may pull once every arm has been tried (single-arm bandits excluded)
        self.selectable = self.valid & (self.arm_counts >= 2)[:, None]
        self.dense = bool(self.selectable.all())
        self.distinct_arm_counts, self.arm_count_group = np.unique(self.arm_counts, return_inverse=True)

    @property
    def num_bandits(self) -> int:
        return len(self._arms)

    @property
    def current_round(self) -> int:
        return self.round + 1

    @property
    def total_pulls(self) -> int:
        return int(self.pulls.sum())

    def num_arms(self, bandit: int) -> int:
        return self._arms[bandit]

    def arm(self, bandit: int, arm: int) -> ArmState:
        self._check_pair(bandit, arm)
        return ArmState(
            int(self.pulls[bandit, arm]),
            float(self.means[bandit, arm]),
            float(self.sum_sq[bandit, arm]),
        )

    def _check_pair(self, bandit: int, arm: int) -> None:
        if not 0 <= bandit < len(self._arms):
            raise IndexError(f"bandit {bandit} out of range for {len(self._arms)} bandits")
        if not 0 <= arm < self._arms[bandit]:
            raise IndexError(f"arm {arm} out of range for bandit {bandit} with {self._arms[bandit]} arms")

    def record_reward(self, bandit: int, arm: int, reward: float) -> None:
        if not 0.0 <= reward <= REWARD_BOUND:
            raise ValueError(f"reward {reward!r} for ({bandit}, {arm}) lies outside [0, 1]")
        self._check_pair(bandit, arm)
        t = int(self.pulls[bandit, arm])
        mu = float(self.means[bandit, arm])
        self.means[bandit, arm] = mu + (reward - mu) / (t + 1)
        self.pulls[bandit, arm] = t + 1
        self.sum_sq[bandit, arm] += reward * reward
        if t == 0:
            self.unpulled -= 1

    def variances(self) -> np.ndarray:
        """Biased sample variance per cell (zero where unpulled)."""
        n = np.maximum(self.pulls, 1)
        return np.maximum(0.0, self.sum_sq / n - self.means**2) * (self.pulls > 0)

    def _grow(self, num_bandits: int, max_arms: int) -> None:
        m, kmax = self.pulls.shape
        if num_bandits == m and max_arms == kmax:
            return
        for name in ("pulls", "means", "sum_sq"):
            old = getattr(self, name)
            new = np.zeros((num_bandits, max_arms), dtype=old.dtype)
            new[:m, :kmax] = old
            setattr(self, name, new)

    def add_bandit(self, num_arms: int) -> int:
        """Append a bandit with ``num_arms`` fresh arms; returns its index."""
        if num_arms < 1:
            raise ValueError("a new bandit needs at least one arm")
        shape = EnvironmentShape((*self._arms, num_arms))
        self._grow(shape.num_bandits, shape.max_arms)
        self._set_shape(shape)
        self.unpulled += num_arms
        self.version += 1
        return shape.num_bandits - 1

    def add_arm(self, bandit: int) -> int:
        """Append a fresh arm to ``bandit``; returns the new arm's index."""
        if not 0 <= bandit < len(self._arms):
            raise IndexError(f"bandit {bandit} out of range for {len(self._arms)} bandits")
        arms = list(self._arms)
        arms[bandit] += 1
        shape = EnvironmentShape(tuple(arms))
        self._grow(shape.num_bandits, shape.max_arms)
        self._set_shape(shape)
        self.unpulled += 1
        self.version += 1
        return arms[bandit] - 1
