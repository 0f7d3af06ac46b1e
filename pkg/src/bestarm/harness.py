"""Seeded, repeated experiment runs over a reward source.

Protocol per (policy, repeat): fresh run state; every pair receives one initial
reward (shared by all policies and repeats of the experiment, not charged to the
budget); then ``budget`` rounds of select / sample / record, with regret and
error rate checkpointed every ``checkpoint_every`` rounds. A fixed-budget policy
that runs out of schedule stops pulling and its recommendation is frozen.

Seeds are derived from the master seed and the policy label, so adding or
removing a policy never changes another policy's random streams.
"""

from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .core import RunState
from .evaluation import AggregateCurve, Checkpoint, RegretCurve, aggregate, error_rate, simple_regret
from .policies import BudgetExhausted, PolicyConfig, default_policies, make_policy, parse_policies, predict
from .sources import DatasetSource, RewardSource, SyntheticSpec, load_dataset, make_synthetic

log = logging.getLogger(__name__)

_INIT_STREAM = 0x1A17
_POLICY_STREAM = 0
_EVAL_STREAM = 1


@dataclass
class ExperimentConfig:
    policies: list[PolicyConfig] = field(default_factory=default_policies)
    dataset: Path | None = None
    dataset_format: str = "trials-csv"
    synthetic: SyntheticSpec | None = None
    budget: int = 50_000
    repeats: int = 10
    checkpoint_every: int = 1_000
    master_seed: int = 0
    out_dir: Path = Path("results")
    workers: int = 1

    def __post_init__(self) -> None:
        if self.dataset is not None:
            self.dataset = Path(self.dataset)
        self.out_dir = Path(self.out_dir)
        if (self.dataset is None) == (self.synthetic is None):
            raise ValueError("configure exactly one reward source: a dataset path or a synthetic spec")
        if self.budget < 1:
            raise ValueError(f"budget must be at least 1, got {self.budget}")
        if self.repeats < 1:
            raise ValueError(f"repeats must be at least 1, got {self.repeats}")
        if not 1 <= self.checkpoint_every <= self.budget:
            raise ValueError(f"checkpoint_every must lie in [1, budget], got {self.checkpoint_every}")
        if self.master_seed < 0:
            raise ValueError("seed must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if not self.policies:
            raise ValueError("no policies configured")
        labels = [p.label for p in self.policies]
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        if dupes:
            raise ValueError(f"duplicate policies: {dupes}")

    @property
    def checkpoints(self) -> list[int]:
        every = self.checkpoint_every
        return list(range(every, self.budget + 1, every))

    def as_items(self) -> list[tuple[str, Any]]:
        """Flat key/value view, in the config-file vocabulary."""
        items: list[tuple[str, Any]] = []
        if self.dataset is not None:
            items += [("dataset", str(self.dataset)), ("format", self.dataset_format)]
        else:
            s = self.synthetic
            items += [("synthetic", s.family), ("bandits", s.num_bandits)]
            if s.means is not None:
                items.append(("means", ",".join(f"{p:g}" for p in s.means)))
            else:
                items.append(("arms", ",".join(str(k) for k in s.arms_per_bandit)
                              if not isinstance(s.arms, int) else s.arms))
            if s.family == "skewed":
                items.append(("concentration", s.concentration))
            items.append(("env_seed", s.seed))
        items += [
            ("budget", self.budget),
            ("repeats", self.repeats),
            ("checkpoint_every", self.checkpoint_every),
            ("seed", self.master_seed),
        ]
        items += [("policy", p.spec_string) for p in self.policies]
        return items


# ------------------------------------------------------------------ config files

_INT_KEYS = {"budget", "repeats", "checkpoint_every", "seed", "bandits", "env_seed", "workers"}
_KNOWN_KEYS = _INT_KEYS | {"dataset", "format", "synthetic", "arms", "means", "concentration", "out", "policy"}


def read_config_file(path: str | Path) -> dict[str, Any]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment, ``policy`` may repeat."""
    values: dict[str, Any] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            key = key.strip().lower().replace("-", "_")
            value = value.strip().strip('"').strip("'")
            if not eq or not key:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            if key not in _KNOWN_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key == "policy":
                values.setdefault("policy", []).append(value)
            else:
                values[key] = value
    return values


def config_from_mapping(values: Mapping[str, Any]) -> ExperimentConfig:
    """Build a config from config-file style keys (string or typed values)."""
    unknown = set(values) - _KNOWN_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")

    def get_int(key: str, default: int) -> int:
        raw = values.get(key)
        if raw is None:
            return default
        try:
            return int(raw)
        except (TypeError, ValueError):
            raise ValueError(f"{key} must be an integer, got {raw!r}") from None

    synthetic = None
    if values.get("synthetic") is not None:
        arms_raw = values.get("arms", 4)
        if isinstance(arms_raw, str):
            parts = [int(x) for x in arms_raw.split(",") if x.strip()]
            arms: int | tuple[int, ...] = parts[0] if len(parts) == 1 else tuple(parts)
        else:
            arms = arms_raw if isinstance(arms_raw, int) else tuple(arms_raw)
        means_raw = values.get("means")
        if isinstance(means_raw, str):
            means_raw = tuple(float(x) for x in means_raw.split(",") if x.strip())
        num_bandits = get_int("bandits", 5 if isinstance(arms, int) else len(arms))
        synthetic = SyntheticSpec(
            num_bandits=num_bandits,
            arms=arms,
            family=str(values["synthetic"]),
            means=means_raw,
            concentration=float(values.get("concentration", 0.3)),
            seed=get_int("env_seed", 0),
        )

    policy_specs = values.get("policy") or []
    if isinstance(policy_specs, str):
        policy_specs = [policy_specs]
    policies = [cfg for spec in policy_specs for cfg in parse_policies(spec)] or default_policies()

    return ExperimentConfig(
        policies=policies,
        dataset=values.get("dataset"),
        dataset_format=str(values.get("format", "trials-csv")),
        synthetic=synthetic,
        budget=get_int("budget", 50_000),
        repeats=get_int("repeats", 10),
        checkpoint_every=get_int("checkpoint_every", 1_000),
        master_seed=get_int("seed", 0),
        out_dir=Path(values.get("out", "results")),
        workers=get_int("workers", 1),
    )


# ------------------------------------------------------------------ seeds


def _label_key(label: str) -> int:
    return int.from_bytes(hashlib.sha256(label.encode("utf-8")).digest()[:4], "big")


def run_rngs(master_seed: int, label: str, repeat: int) -> tuple[np.random.Generator, np.random.Generator]:
    """(policy/sampling generator, evaluation generator) for one run."""
    key = _label_key(label)
    policy_seq = np.random.SeedSequence(master_seed, spawn_key=(key, repeat, _POLICY_STREAM))
    eval_seq = np.random.SeedSequence(master_seed, spawn_key=(key, repeat, _EVAL_STREAM))
    return np.random.default_rng(policy_seq), np.random.default_rng(eval_seq)


def initial_pull_seed(master_seed: int) -> int:
    return int(np.random.SeedSequence(master_seed, spawn_key=(_INIT_STREAM,)).generate_state(1)[0])


# ------------------------------------------------------------------ runs


@dataclass
class RunResult:
    curve: RegretCurve
    pulls_issued: int
    budget: int

    @property
    def unused(self) -> int:
        return self.budget - self.pulls_issued


@dataclass
class PolicyResult:
    config: PolicyConfig
    runs: list[RunResult]

    @property
    def label(self) -> str:
        return self.config.label

    @property
    def curves(self) -> list[RegretCurve]:
        return [r.curve for r in self.runs]

    def aggregate(self) -> AggregateCurve:
        return aggregate(self.curves)

    @property
    def mean_pulls_issued(self) -> float:
        return float(np.mean([r.pulls_issued for r in self.runs]))

    @property
    def utilization(self) -> float:
        return float(np.mean([r.pulls_issued / r.budget for r in self.runs]))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    policies: list[PolicyResult]
    source_description: str = ""

    def by_label(self, label: str) -> PolicyResult:
        for p in self.policies:
            if p.label == label:
                return p
        raise KeyError(label)


def run_single(
    source: RewardSource,
    policy_config: PolicyConfig,
    budget: int,
    checkpoint_every: int,
    initial_values: list[list[float]],
    rng: np.random.Generator,
    eval_rng: np.random.Generator,
    run_id: int = 0,
) -> RunResult:
    truth = source.ground_truth
    state = RunState(source.shape, rng)
    for m, row in enumerate(initial_values):
        for k, reward in enumerate(row):
            state.record_reward(m, k, reward)
    policy = make_policy(policy_config.with_budget(budget), state)

    checkpoints: list[Checkpoint] = []
    frozen = None
    issued = 0
    select, observe, record, sample = policy.select_next, policy.observe, state.record_reward, source.sample
    for t in range(1, budget + 1):
        if frozen is None:
            try:
                m, k = select(state)
            except BudgetExhausted:
                frozen = predict(state, eval_rng)
            else:
                reward = sample(m, k, rng)
                record(m, k, reward)
                observe(state, m, k, reward)
                issued += 1
        state.round = t
        if t % checkpoint_every == 0:
            pred = frozen if frozen is not None else predict(state, eval_rng)
            checkpoints.append(Checkpoint(t, simple_regret(pred, truth), error_rate(pred, truth)))
    return RunResult(RegretCurve(checkpoints, run_id, policy_config.label), issued, budget)


def make_source(config: ExperimentConfig) -> tuple[RewardSource, str]:
    if config.dataset is not None:
        dataset = load_dataset(config.dataset, config.dataset_format)
        desc = f"dataset {config.dataset} ({len(dataset.bandit_names)} bandits, {dataset.num_trials} trials)"
        return DatasetSource(dataset), desc
    source, _ = make_synthetic(config.synthetic)
    s = config.synthetic
    return source, f"synthetic {s.family} ({s.num_bandits} bandits, seed {s.seed})"


def _validate_policies(config: ExperimentConfig, source: RewardSource) -> None:
    # build each policy once on a scratch state so bad parameters fail before any run
    for policy in config.policies:
        make_policy(policy.with_budget(config.budget), RunState(source.shape, 0))


_WORKER_SOURCE: RewardSource | None = None


def _init_worker(source: RewardSource) -> None:
    global _WORKER_SOURCE
    _WORKER_SOURCE = source


def _run_job(args: tuple) -> RunResult:
    policy_config, repeat, budget, every, init, master_seed = args
    rng, eval_rng = run_rngs(master_seed, policy_config.label, repeat)
    return run_single(_WORKER_SOURCE, policy_config, budget, every, init, rng, eval_rng, run_id=repeat)


def run_experiment(config: ExperimentConfig, source: RewardSource | None = None) -> ExperimentResult:
    """Run every (policy, repeat) pair of the config; deterministic in the master seed."""
    if source is None:
        source, desc = make_source(config)
    else:
        desc = type(source).__name__
    _validate_policies(config, source)
    init = source.initial_values(initial_pull_seed(config.master_seed))
    jobs = [
        (policy, repeat, config.budget, config.checkpoint_every, init, config.master_seed)
        for policy in config.policies
        for repeat in range(config.repeats)
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers, initializer=_init_worker, initargs=(source,)) as pool:
            runs = list(pool.map(_run_job, jobs))
    else:
        _init_worker(source)
        runs = []
        for job in jobs:
            log.info("running %s, repeat %d", job[0].label, job[1])
            runs.append(_run_job(job))
    results = [
        PolicyResult(policy, runs[i * config.repeats : (i + 1) * config.repeats])
        for i, policy in enumerate(config.policies)
    ]
    return ExperimentResult(config, results, desc)


def summarize(result: ExperimentResult) -> Iterable[str]:
    for p in result.policies:
        agg = p.aggregate()
        yield (
            f"{p.label:<36} avg regret {agg.round_averaged_regret:.4f}  "
            f"final {agg.mean_regret[-1]:.4f}  pulls used {p.utilization:.1%}"
        )
