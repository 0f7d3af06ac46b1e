"""Arm-selection policies for multi-bandit best arm identification.

Every policy is bound to one ``RunState``: the harness asks ``select_next`` for a
(bandit, arm) pair, samples a reward, records it on the state and then calls
``observe``. Stop-anytime policies can be queried forever; the two fixed-budget
ones (Successive Rejects, Sequential Halving) raise ``BudgetExhausted`` once
their precomputed schedule is spent.

Single-arm bandits are only pulled while an arm is still unpulled: their
recommendation is forced, so further pulls cannot reduce regret.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .core import ArmState, RunState, random_argmax
from .intervals import wilson_bounds, z_value

ALPHA_MIN = 1e-12
ALPHA_MAX = 0.9999


class BudgetExhausted(Exception):
    """A fixed-budget policy has no scheduled pulls left."""


class PolicyKind(str, Enum):
    RANDOM = "random"
    UNIFORM = "uniform"
    GAPE = "gape"
    GAPEV = "gape-v"
    UCBE = "ucb-e"
    SUCCESSIVE_REJECTS = "successive-rejects"
    SEQUENTIAL_HALVING = "sequential-halving"
    ANYTIME_SH = "anytime-sh"
    OPTIMISTIC_WS = "optimistic-ws"

    @property
    def display_name(self) -> str:
        return _DISPLAY[self]

    @property
    def fixed_budget(self) -> bool:
        return self in (PolicyKind.SUCCESSIVE_REJECTS, PolicyKind.SEQUENTIAL_HALVING)


_DISPLAY = {
    PolicyKind.RANDOM: "Random",
    PolicyKind.UNIFORM: "Uniform",
    PolicyKind.GAPE: "GapE",
    PolicyKind.GAPEV: "GapE-V",
    PolicyKind.UCBE: "UCB-E",
    PolicyKind.SUCCESSIVE_REJECTS: "Successive Rejects",
    PolicyKind.SEQUENTIAL_HALVING: "Sequential Halving",
    PolicyKind.ANYTIME_SH: "Anytime Sequential Halving",
    PolicyKind.OPTIMISTIC_WS: "Optimistic-WS",
}

_ALIASES = {
    "random": PolicyKind.RANDOM,
    "uniform": PolicyKind.UNIFORM,
    "gape": PolicyKind.GAPE,
    "gap-e": PolicyKind.GAPE,
    "gape-v": PolicyKind.GAPEV,
    "gapev": PolicyKind.GAPEV,
    "ucb-e": PolicyKind.UCBE,
    "ucbe": PolicyKind.UCBE,
    "successive-rejects": PolicyKind.SUCCESSIVE_REJECTS,
    "sr": PolicyKind.SUCCESSIVE_REJECTS,
    "sequential-halving": PolicyKind.SEQUENTIAL_HALVING,
    "sh": PolicyKind.SEQUENTIAL_HALVING,
    "anytime-sh": PolicyKind.ANYTIME_SH,
    "anytime-sequential-halving": PolicyKind.ANYTIME_SH,
    "ash": PolicyKind.ANYTIME_SH,
    "optimistic-ws": PolicyKind.OPTIMISTIC_WS,
    "ows": PolicyKind.OPTIMISTIC_WS,
}

# hyperparameter grids; UCB-E's a is a multiple of log(round)
PARAMETER_GRIDS: dict[PolicyKind, tuple[float, ...]] = {
    PolicyKind.GAPE: (1, 2, 4, 8, 16),
    PolicyKind.GAPEV: (1, 2, 4, 8, 16),
    PolicyKind.UCBE: (2, 4, 8, 16),
    PolicyKind.OPTIMISTIC_WS: (1, 2, 4, 8, 16),
}
# best-performing values reported for the dataset experiments
DEFAULT_PARAMETERS: dict[PolicyKind, float] = {
    PolicyKind.GAPE: 2,
    PolicyKind.GAPEV: 1,
    PolicyKind.UCBE: 2,
    PolicyKind.OPTIMISTIC_WS: 16,
}


def _fmt(x: float) -> str:
    return f"{x:g}"


@dataclass(frozen=True)
class PolicyConfig:
    kind: PolicyKind
    exploration_a: float | None = None
    exploration_c: float | None = None
    total_budget: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        kind = self.kind
        needs_a = kind in (PolicyKind.GAPE, PolicyKind.GAPEV, PolicyKind.UCBE)
        needs_c = kind is PolicyKind.OPTIMISTIC_WS
        if needs_a and self.exploration_a is None:
            raise ValueError(f"{kind.display_name} needs an exploration value a")
        if needs_c and self.exploration_c is None:
            raise ValueError(f"{kind.display_name} needs an exploration value c")
        if not needs_a and self.exploration_a is not None:
            raise ValueError(f"{kind.display_name} takes no parameter a")
        if not needs_c and self.exploration_c is not None:
            raise ValueError(f"{kind.display_name} takes no parameter c")
        for name in ("exploration_a", "exploration_c"):
            value = getattr(self, name)
            if value is not None and not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if self.total_budget is not None:
            if not kind.fixed_budget:
                raise ValueError(f"{kind.display_name} is stop-anytime and takes no total budget")
            if self.total_budget < 1:
                raise ValueError(f"total_budget must be positive, got {self.total_budget}")

    @property
    def label(self) -> str:
        name = self.kind.display_name
        if self.kind is PolicyKind.UCBE:
            return f"{name} (a={_fmt(self.exploration_a)}*log(n))"
        if self.exploration_a is not None:
            return f"{name} (a={_fmt(self.exploration_a)})"
        if self.exploration_c is not None:
            return f"{name} (c={_fmt(self.exploration_c)})"
        return name

    @property
    def slug(self) -> str:
        text = self.kind.value
        if self.exploration_a is not None:
            text += f"_a{_fmt(self.exploration_a)}"
        if self.exploration_c is not None:
            text += f"_c{_fmt(self.exploration_c)}"
        return text

    @property
    def spec_string(self) -> str:
        """Inverse of ``parse_policies`` for a single config."""
        if self.exploration_a is not None:
            return f"{self.kind.value}:a={_fmt(self.exploration_a)}"
        if self.exploration_c is not None:
            return f"{self.kind.value}:c={_fmt(self.exploration_c)}"
        return self.kind.value

    def with_budget(self, budget: int) -> "PolicyConfig":
        """Attach the run budget if this kind needs it up front."""
        return replace(self, total_budget=budget) if self.kind.fixed_budget else self


def parse_policies(text: str) -> list[PolicyConfig]:
    """Parse ``name[:param=v1,v2,...]`` into one config per grid value.

    ``optimistic-ws:c=4,16`` gives two configs. A bare parametrised name uses the
    default value; ``name:grid`` expands the full grid. ``defaults`` yields one
    config per algorithm at its default value and ``all`` every grid point.
    """
    text = text.strip()
    lowered = text.lower()
    if lowered == "defaults":
        return default_policies()
    if lowered == "all":
        return [
            cfg
            for kind in PolicyKind
            for cfg in parse_policies(f"{kind.value}:grid" if kind in PARAMETER_GRIDS else kind.value)
        ]
    name, _, params = text.partition(":")
    key = re.sub(r"[\s_]+", "-", name.strip().lower())
    if key not in _ALIASES:
        raise ValueError(f"unknown policy {name!r}; choose from {sorted(set(_ALIASES))}")
    kind = _ALIASES[key]
    param_name = "c" if kind is PolicyKind.OPTIMISTIC_WS else "a" if kind in DEFAULT_PARAMETERS else None
    params = params.strip()
    if not params:
        values: Sequence[float | None] = [DEFAULT_PARAMETERS.get(kind)]
    elif param_name is None:
        raise ValueError(f"{kind.display_name} takes no parameters, got {params!r}")
    elif params.lower() == "grid":
        values = PARAMETER_GRIDS[kind]
    else:
        pname, eq, raw = params.partition("=")
        if not eq or pname.strip().lower() != param_name:
            raise ValueError(f"{kind.display_name} expects '{param_name}=value', got {params!r}")
        try:
            values = [float(v) for v in raw.split(",") if v.strip()]
        except ValueError as exc:
            raise ValueError(f"bad value in {params!r}: {exc}") from None
        if not values:
            raise ValueError(f"no values given in {params!r}")
    out = []
    for v in values:
        if param_name == "a":
            out.append(PolicyConfig(kind, exploration_a=v))
        elif param_name == "c":
            out.append(PolicyConfig(kind, exploration_c=v))
        else:
            out.append(PolicyConfig(kind))
    return out


def default_policies() -> list[PolicyConfig]:
    """One config per algorithm, using the best reported hyperparameter."""
    return [parse_policies(kind.value)[0] for kind in PolicyKind]


class DeltaScore(NamedTuple):
    bandit: int
    arm: int
    delta: float


@dataclass(frozen=True)
class Prediction:
    best_arm_per_bandit: tuple[int, ...]


def predict(state: RunState, rng: np.random.Generator) -> Prediction:
    """Recommend, per bandit, an arm with the highest mean estimate (random ties)."""
    means = np.where(state.valid, state.means, -np.inf)
    top = means.max(axis=1, keepdims=True)
    # uniform random key among tied maxima picks each tied arm with equal chance
    keys = np.where(means == top, rng.random(means.shape), -1.0)
    return Prediction(tuple(int(k) for k in keys.argmax(axis=1)))


def _eligible(state: RunState) -> np.ndarray | None:
    """Mask of pairs worth pulling (multi-arm bandits plus unpulled arms); None if all are."""
    if state.unpulled == 0:
        return None if state.dense else state.selectable
    return state.selectable | (state.valid & (state.pulls == 0))


def _pick_masked(scores: np.ndarray, state: RunState, mask: np.ndarray | None) -> tuple[int, int]:
    if mask is not None:
        if not mask.any():
            mask = state.valid
        scores = np.where(mask, scores, -np.inf)
    flat = random_argmax(scores, state.rng)
    return divmod(flat, scores.shape[1])


class Policy:
    """Base class; subclasses implement ``select_next``."""

    def __init__(self, config: PolicyConfig, state: RunState) -> None:
        self.config = config
        self.issued = 0

    @property
    def label(self) -> str:
        return self.config.label

    def select_next(self, state: RunState) -> tuple[int, int]:
        raise NotImplementedError

    def observe(self, state: RunState, bandit: int, arm: int, reward: float) -> None:
        self.issued += 1


class RandomPolicy(Policy):
    def select_next(self, state: RunState) -> tuple[int, int]:
        mask = _eligible(state)
        if mask is None or not mask.any():
            mask = state.valid
        flat = np.flatnonzero(mask)
        idx = int(flat[state.rng.integers(flat.size)])
        return divmod(idx, state.pulls.shape[1])


class UniformPolicy(Policy):
    """Round-robin over all pairs in (bandit, arm) order."""

    def __init__(self, config: PolicyConfig, state: RunState) -> None:
        super().__init__(config, state)
        self._version = -1
        self._cursor = 0

    def select_next(self, state: RunState) -> tuple[int, int]:
        if self._version != state.version:
            self._pairs = list(state.shape.pairs())
            self._version = state.version
        n = len(self._pairs)
        for step in range(n):
            m, k = self._pairs[(self._cursor + step) % n]
            if state.num_arms(m) >= 2 or state.pulls[m, k] == 0:
                self._cursor = (self._cursor + step + 1) % n
                return m, k
        m, k = self._pairs[self._cursor % n]
        self._cursor = (self._cursor + 1) % n
        return m, k


# ---------------------------------------------------------------- UCB-E


def ucbe_index(arm: ArmState, a: float) -> float:
    """UCB-E score: mean plus sqrt(a / pulls); unpulled arms score +inf."""
    if arm.pulls == 0:
        return math.inf
    return arm.mean_estimate + math.sqrt(a / arm.pulls)


def ucbe_indices(means: np.ndarray, pulls: np.ndarray, a: float) -> np.ndarray:
    n = np.maximum(pulls, 1)
    return np.where(pulls == 0, np.inf, means + np.sqrt(a / n))


def ucbe_exploration(coef: float, round_number: int) -> float:
    """Exploration value a = coef * log(round); coef = 2 reproduces UCB1."""
    return coef * math.log(max(round_number, 1))


class _BanditCycle:
    """Round-robin cursor over bandits that still merit pulls."""

    def __init__(self) -> None:
        self.cursor = 0

    def next(self, state: RunState) -> int:
        m_total = state.num_bandits
        for step in range(m_total):
            m = (self.cursor + step) % m_total
            if state.num_arms(m) >= 2 or state.pulls[m, 0] == 0:
                self.cursor = (m + 1) % m_total
                return m
        m = self.cursor % m_total
        self.cursor = (m + 1) % m_total
        return m


class UCBEPolicy(Policy):
    """UCB-E inside each bandit, bandits visited round-robin."""

    def __init__(self, config: PolicyConfig, state: RunState) -> None:
        super().__init__(config, state)
        self._cycle = _BanditCycle()

    def select_next(self, state: RunState) -> tuple[int, int]:
        m = self._cycle.next(state)
        k_m = state.num_arms(m)
        a = ucbe_exploration(self.config.exploration_a, state.current_round)
        scores = ucbe_indices(state.means[m, :k_m], state.pulls[m, :k_m], a)
        return m, random_argmax(scores, state.rng)


# ---------------------------------------------------------------- GapE


def gape_gaps(means: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Empirical gap of each arm to the best other arm in its bandit (row).

    Non-best arms: best mean minus own mean. Best arm: own mean minus the second
    highest (zero when the top is tied). Single-arm rows have gap 0.
    """
    means = np.atleast_2d(means)
    valid = np.atleast_2d(valid)
    masked = np.where(valid, means, -np.inf)
    if masked.shape[1] < 2:
        return np.zeros_like(means)
    top2 = -np.partition(-masked, 1, axis=1)[:, :2]
    first, second = top2[:, :1], top2[:, 1:2]
    other = np.where(means == first, second, first)
    gaps = np.abs(means - other)
    return np.where(valid & np.isfinite(other), gaps, 0.0)


def gape_indices(
    means: np.ndarray,
    pulls: np.ndarray,
    variances: np.ndarray | None,
    valid: np.ndarray,
    a: float,
    variant: PolicyKind = PolicyKind.GAPE,
) -> np.ndarray:
    """GapE / GapE-V scores for a matrix of bandits (rows) and arms (columns).

    GapE: -gap + sqrt(a/T). GapE-V: -gap + sqrt(2 a var / T) + 7 a b / (3 T), b = 1.
    Unpulled arms score +inf.
    """
    gaps = gape_gaps(means, valid)
    n = np.maximum(pulls, 1).astype(float)
    if variant is PolicyKind.GAPEV:
        if variances is None:
            raise ValueError("GapE-V needs per-arm variances")
        bonus = np.sqrt(2.0 * a * variances / n) + 7.0 * a / (3.0 * n)
    elif variant is PolicyKind.GAPE:
        bonus = np.sqrt(a / n)
    else:
        raise ValueError(f"not a GapE variant: {variant}")
    return np.where(pulls == 0, np.inf, bonus - gaps)


def gape_index(
    means: Sequence[float],
    pulls: Sequence[int],
    arm: int,
    a: float,
    variant: PolicyKind = PolicyKind.GAPE,
    variances: Sequence[float] | None = None,
) -> float:
    """Score of one arm of a single bandit given that bandit's statistics."""
    means = np.asarray(means, dtype=float)[None, :]
    pulls = np.asarray(pulls)[None, :]
    var = None if variances is None else np.asarray(variances, dtype=float)[None, :]
    valid = np.ones_like(means, dtype=bool)
    return float(gape_indices(means, pulls, var, valid, a, variant)[0, arm])


class GapEPolicy(Policy):
    """GapE / GapE-V with a global argmax over every bandit-arm pair."""

    def select_next(self, state: RunState) -> tuple[int, int]:
        kind = self.config.kind
        var = state.variances() if kind is PolicyKind.GAPEV else None
        scores = gape_indices(state.means, state.pulls, var, state.valid, self.config.exploration_a, kind)
        return _pick_masked(scores, state, _eligible(state))


# ---------------------------------------------------------------- Optimistic-WS


def ows_alpha(num_arms: int | np.ndarray, round_number: int, c: float) -> np.ndarray | float:
    """Adaptive confidence level K_m / (t c), clamped into (0, 1) for the interval."""
    alpha = np.asarray(num_arms, dtype=float) / (round_number * c)
    return np.clip(alpha, ALPHA_MIN, ALPHA_MAX)


class _ZCache:
    """Per-bandit critical values for one round; bandits with equal K_m share one."""

    def __init__(self) -> None:
        self._key: tuple | None = None
        self._z = np.empty(0)

    def get(self, state: RunState, round_number: int, c: float) -> np.ndarray | float:
        key = (state.version, round_number, c)
        if key != self._key:
            scale = round_number * c
            z = [z_value(min(max(k / scale, ALPHA_MIN), ALPHA_MAX)) for k in state.distinct_arm_counts.tolist()]
            self._z = z[0] if len(z) == 1 else np.asarray(z)[state.arm_count_group][:, None]
            self._key = key
        return self._z


def _ows_delta_matrix(state: RunState, c: float, round_number: int, zcache: _ZCache | None = None) -> np.ndarray:
    z = (zcache or _ZCache()).get(state, round_number, c)
    lower, upper = wilson_bounds(state.means, state.pulls, z, may_have_zeros=state.unpulled > 0 or not state.dense)
    means = state.means if state.dense else np.where(state.valid, state.means, -np.inf)
    best = means.max(axis=1, keepdims=True)
    # reuse the bound buffers: lower -> best - lower, upper -> upper - best
    np.subtract(best, lower, out=lower)
    upper -= best
    return np.where(state.means == best, lower, upper)


def ows_deltas(state: RunState, c: float, round_number: int | None = None) -> list[DeltaScore]:
    """Potential regret change of every bandit-arm pair.

    Arms tied with their bandit's best mean score ``best - lower`` (how far the
    leader could fall); the rest score ``upper - best`` (how far they could
    overtake). ``round_number`` defaults to the round being played.
    """
    t = state.current_round if round_number is None else round_number
    if t < 1:
        raise ValueError(f"round number must be >= 1, got {t}")
    deltas = _ows_delta_matrix(state, c, t)
    return [
        DeltaScore(m, k, float(deltas[m, k]))
        for m in range(state.num_bandits)
        for k in range(state.num_arms(m))
    ]


class OptimisticWSPolicy(Policy):
    """Pull the pair with the largest Wilson-score regret-change potential, globally."""

    def __init__(self, config: PolicyConfig, state: RunState) -> None:
        super().__init__(config, state)
        self._zcache = _ZCache()

    def select_next(self, state: RunState) -> tuple[int, int]:
        deltas = _ows_delta_matrix(state, self.config.exploration_c, state.current_round, self._zcache)
        mask = _eligible(state)
        if state.unpulled:
            # an untried arm always goes first, whatever its delta
            mask = state.valid & (state.pulls == 0)
        return _pick_masked(deltas, state, mask)


# ---------------------------------------------------------------- elimination schedules


def successive_rejects_schedule(num_arms: int, budget: int) -> list[int]:
    """Cumulative per-arm pull counts n_1..n_{K-1} of Successive Rejects.

    Phase j pulls every surviving arm ``n_j - n_{j-1}`` times, then drops the arm
    with the lowest mean.
    """
    if num_arms < 2:
        raise ValueError("Successive Rejects needs at least two arms")
    if budget < num_arms:
        raise ValueError(f"budget {budget} is smaller than the number of arms {num_arms}")
    log_bar = 0.5 + sum(1.0 / i for i in range(2, num_arms + 1))
    return [
        math.ceil((budget - num_arms) / (log_bar * (num_arms + 1 - j)))
        for j in range(1, num_arms)
    ]


def successive_rejects_usage(num_arms: int, budget: int) -> int:
    """Total pulls the Successive Rejects schedule issues."""
    total, prev = 0, 0
    for j, n_j in enumerate(successive_rejects_schedule(num_arms, budget), start=1):
        total += (num_arms + 1 - j) * (n_j - prev)
        prev = n_j
    return total


def sequential_halving_schedule(num_arms: int, budget: int) -> list[tuple[int, int]]:
    """(survivors, pulls per survivor) for each Sequential Halving round.

    Rounds whose share rounds down to zero pulls still halve the survivor set.
    """
    if num_arms < 2:
        raise ValueError("Sequential Halving needs at least two arms")
    if budget < 0:
        raise ValueError(f"budget must be non-negative, got {budget}")
    rounds = math.ceil(math.log2(num_arms))
    out, size = [], num_arms
    for _ in range(rounds):
        out.append((size, budget // (size * rounds)))
        size = math.ceil(size / 2)
    return out


def sequential_halving_usage(num_arms: int, budget: int) -> int:
    return sum(size * pulls for size, pulls in sequential_halving_schedule(num_arms, budget))


def anytime_sh_pass_cost(num_arms: int) -> int:
    """Pulls in one minimal Sequential Halving pass (each survivor once per round)."""
    if num_arms < 2:
        return 0
    return sum(size for size, _ in sequential_halving_schedule(num_arms, 0))


def _top_half(arms: list[int], means: np.ndarray, rng: np.random.Generator) -> list[int]:
    keep = math.ceil(len(arms) / 2)
    shuffled = [arms[i] for i in rng.permutation(len(arms))]
    shuffled.sort(key=lambda k: -means[k])  # stable: shuffle order breaks ties
    return sorted(shuffled[:keep])


class _EliminationPolicy(Policy):
    """Shared multi-bandit driver: per-bandit pull queues serviced round-robin."""

    def __init__(self, config: PolicyConfig, state: RunState) -> None:
        super().__init__(config, state)
        self._queues: list[deque[int]] = [deque() for _ in range(state.num_bandits)]
        self._cursor = 0

    def _refill(self, state: RunState, bandit: int) -> bool:
        """Advance ``bandit`` to its next block of pulls; False once it is finished."""
        raise NotImplementedError

    def _budget_left(self) -> bool:
        return True

    def select_next(self, state: RunState) -> tuple[int, int]:
        if not self._budget_left():
            raise BudgetExhausted(self.label)
        n = len(self._queues)
        for step in range(n):
            m = (self._cursor + step) % n
            queue = self._queues[m]
            if not queue and not self._refill(state, m):
                continue
            self._cursor = (m + 1) % n
            return m, queue.popleft()
        raise BudgetExhausted(self.label)


class _FixedBudgetPolicy(_EliminationPolicy):
    def __init__(self, config: PolicyConfig, state: RunState) -> None:
        if config.total_budget is None:
            raise ValueError(f"{config.kind.display_name} needs total_budget")
        super().__init__(config, state)
        self.per_bandit_budget = config.total_budget // state.num_bandits
        self.planned = 0
        self._survivors: list[list[int] | None] = []
        self._phase: list[int] = []
        for m in range(state.num_bandits):
            k_m = state.num_arms(m)
            if k_m >= 2:
                self._check_budget(k_m)
                self._survivors.append(list(range(k_m)))
                self.planned += self._usage(k_m)
            else:
                self._survivors.append(None)
            self._phase.append(0)

    def _check_budget(self, num_arms: int) -> None:
        pass

    def _usage(self, num_arms: int) -> int:
        raise NotImplementedError

    def _budget_left(self) -> bool:
        return self.issued < self.config.total_budget


class SuccessiveRejectsPolicy(_FixedBudgetPolicy):
    def _check_budget(self, num_arms: int) -> None:
        if self.per_bandit_budget < num_arms:
            raise ValueError(
                f"per-bandit budget {self.per_bandit_budget} is below the {num_arms} arms of a bandit; "
                "Successive Rejects cannot run"
            )

    def _usage(self, num_arms: int) -> int:
        return successive_rejects_usage(num_arms, self.per_bandit_budget)

    def _refill(self, state: RunState, bandit: int) -> bool:
        survivors = self._survivors[bandit]
        if survivors is None:
            return False
        n = successive_rejects_schedule(state.num_arms(bandit), self.per_bandit_budget)
        queue = self._queues[bandit]
        while not queue:
            j = self._phase[bandit]
            if j > 0:  # phase j is over: reject the worst survivor
                worst = random_argmax(-state.means[bandit, survivors], state.rng)
                survivors.pop(worst)
            if j >= len(n) or len(survivors) < 2:
                self._survivors[bandit] = None
                return False
            self._phase[bandit] = j + 1
            queue.extend(survivors * (n[j] - (n[j - 1] if j > 0 else 0)))
        return True


class SequentialHalvingPolicy(_FixedBudgetPolicy):
    def _usage(self, num_arms: int) -> int:
        return sequential_halving_usage(num_arms, self.per_bandit_budget)

    def _refill(self, state: RunState, bandit: int) -> bool:
        survivors = self._survivors[bandit]
        if survivors is None:
            return False
        k_m = state.num_arms(bandit)
        schedule = sequential_halving_schedule(k_m, self.per_bandit_budget)
        queue = self._queues[bandit]
        while not queue:
            r = self._phase[bandit]
            if r > 0:
                survivors[:] = _top_half(survivors, state.means[bandit], state.rng)
            if r >= len(schedule):
                self._survivors[bandit] = None
                return False
            self._phase[bandit] = r + 1
            queue.extend(survivors * schedule[r][1])
        return True


class AnytimeSHPolicy(_EliminationPolicy):
    """Repeated minimal Sequential Halving passes; statistics persist across passes."""

    def __init__(self, config: PolicyConfig, state: RunState) -> None:
        super().__init__(config, state)
        self._survivors: list[list[int]] = []
        self._version = state.version

    def _sync(self, state: RunState) -> None:
        while len(self._queues) < state.num_bandits:
            self._queues.append(deque())
        self._version = state.version

    def _refill(self, state: RunState, bandit: int) -> bool:
        while len(self._survivors) <= bandit:
            self._survivors.append([])
        k_m = state.num_arms(bandit)
        if k_m < 2:
            if state.pulls[bandit, 0] == 0:
                self._queues[bandit].append(0)
                return True
            return False
        survivors = self._survivors[bandit]
        if len(survivors) > 1:
            survivors = _top_half(survivors, state.means[bandit], state.rng)
        if len(survivors) <= 1:  # pass complete (or first visit): restart on every arm
            survivors = list(range(k_m))
        self._survivors[bandit] = survivors
        self._queues[bandit].extend(survivors)
        return True

    def select_next(self, state: RunState) -> tuple[int, int]:
        if self._version != state.version:
            self._sync(state)
        try:
            return super().select_next(state)
        except BudgetExhausted:
            # only pulled single-arm bandits remain; keep cycling them
            m = self._cursor % state.num_bandits
            self._cursor = (m + 1) % state.num_bandits
            return m, 0


_POLICY_CLASSES: dict[PolicyKind, type[Policy]] = {
    PolicyKind.RANDOM: RandomPolicy,
    PolicyKind.UNIFORM: UniformPolicy,
    PolicyKind.GAPE: GapEPolicy,
    PolicyKind.GAPEV: GapEPolicy,
    PolicyKind.UCBE: UCBEPolicy,
    PolicyKind.SUCCESSIVE_REJECTS: SuccessiveRejectsPolicy,
    PolicyKind.SEQUENTIAL_HALVING: SequentialHalvingPolicy,
    PolicyKind.ANYTIME_SH: AnytimeSHPolicy,
    PolicyKind.OPTIMISTIC_WS: OptimisticWSPolicy,
}


def make_policy(config: PolicyConfig, state: RunState) -> Policy:
    return _POLICY_CLASSES[config.kind](config, state)
