"""Acceptance criteria, each at its stated tolerance and runtime.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary ends with
one PASS / FAIL / WAIVED line per criterion. Criterion 4 needs the recorded
GVGAI trial dataset: point ``BESTARM_GVGAI_DATASET`` at the CSV (and set
``BESTARM_GVGAI_FORMAT=histogram-csv`` if it is a tally file).
"""

import os
import time
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from bestarm.cli import main as cli_main
from bestarm.core import random_argmax
from bestarm.harness import ExperimentConfig, run_experiment
from bestarm.intervals import wilson_interval
from bestarm.policies import (
    parse_policies,
    sequential_halving_schedule,
    sequential_halving_usage,
    successive_rejects_schedule,
    successive_rejects_usage,
)
from bestarm.report import emit_outputs, read_manifest
from bestarm.sources import SyntheticSpec

import oracles

pytestmark = pytest.mark.acceptance

OWS = "Optimistic-WS (c=16)"
UCBE = "UCB-E (a=2*log(n))"


def criterion(number, title):
    return pytest.mark.criterion(number, title)


# ---------------------------------------------------------------- 1


@criterion(1, "Wilson interval matches high-precision transcription within 1e-9")
def test_wilson_oracle_equivalence(record_property):
    start = time.perf_counter()
    rng = np.random.default_rng(20240601)
    p_hat = rng.random(10_000)
    p_hat[:200] = rng.choice([0.0, 1.0], 200)  # exercise the edges too
    n = rng.integers(1, 10_001, 10_000)
    # half uniform, half log-uniform so tiny confidence levels are covered
    alpha = np.where(np.arange(10_000) % 2 == 0, rng.uniform(1e-6, 1 - 1e-6, 10_000), 10 ** rng.uniform(-12, -1, 10_000))
    worst = 0.0
    for p, k, a in zip(p_hat.tolist(), n.tolist(), alpha.tolist()):
        lo, hi = wilson_interval(p, k, a)
        ref_lo, ref_hi = oracles.wilson(p, k, a)
        worst = max(worst, abs(lo - ref_lo), abs(hi - ref_hi))
    unpulled = [wilson_interval(p, 0, a) for p, a in zip(p_hat[:100].tolist(), alpha[:100].tolist())]
    elapsed = time.perf_counter() - start
    record_property("measured", f"max abs error {worst:.2e}, {elapsed:.1f}s")
    assert worst <= 1e-9
    assert all(iv == (0.0, 1.0) for iv in unpulled)
    assert elapsed < 5.0


# ---------------------------------------------------------------- 2


@criterion(2, "Optimistic-WS converges on 5x4 Bernoulli bandits")
def test_convergence_small_synthetic(record_property):
    start = time.perf_counter()
    means = (0.2, 0.4, 0.6, 0.8)
    config = ExperimentConfig(
        policies=parse_policies("optimistic-ws:c=16"),
        synthetic=SyntheticSpec(num_bandits=5, means=means),
        budget=20_000,
        repeats=100,
        checkpoint_every=1_000,
        master_seed=2,
    )
    agg = run_experiment(config).by_label(OWS).aggregate()
    elapsed = time.perf_counter() - start
    regret, error = float(agg.mean_regret[-1]), float(agg.mean_error[-1])

    # threshold sanity: uniform sampling at ten times the budget, drawn as binomial counts
    rng = np.random.default_rng(0)
    per_arm = 10 * config.budget // 20
    wins = rng.binomial(per_arm, np.tile(means, (100, 5, 1)))
    keys = np.where(wins == wins.max(axis=2, keepdims=True), rng.random(wins.shape), -1)
    baseline = float(np.mean(np.max(means) - np.take(means, keys.argmax(axis=2))))

    record_property("measured", f"regret {regret:.4f}, error {error:.4f}, baseline {baseline:.4f}, {elapsed:.0f}s")
    assert baseline == 0.0
    assert regret < 0.005
    assert error < 0.02
    assert elapsed < 120


# ---------------------------------------------------------------- 3


@criterion(3, "Optimistic-WS dominates Uniform and beats UCB-E by 15% on skewed bandits")
def test_dominance_skewed_synthetic(record_property):
    start = time.perf_counter()
    config = ExperimentConfig(
        policies=parse_policies("optimistic-ws:c=16") + parse_policies("uniform") + parse_policies("ucb-e:a=2"),
        synthetic=SyntheticSpec(num_bandits=50, arms=10, family="skewed", seed=2024),
        budget=25_000,
        repeats=30,
        checkpoint_every=1_000,
        master_seed=7,
    )
    result = run_experiment(config)
    elapsed = time.perf_counter() - start
    ows = result.by_label(OWS).aggregate()
    uni = result.by_label("Uniform").aggregate()
    ucb = result.by_label(UCBE).aggregate()
    late = np.asarray(ows.rounds) >= 5_000
    dominated = bool(np.all(ows.mean_regret[late] <= uni.mean_regret[late]))
    reduction = 1 - ows.round_averaged_regret / ucb.round_averaged_regret
    record_property(
        "measured",
        f"round-avg regret OWS {ows.round_averaged_regret:.5f}, Uniform {uni.round_averaged_regret:.5f}, "
        f"UCB-E {ucb.round_averaged_regret:.5f}; reduction {reduction:.1%}; {elapsed:.0f}s",
    )
    assert dominated
    assert reduction >= 0.15
    assert elapsed < 300


# ---------------------------------------------------------------- 4

GVGAI = os.environ.get("BESTARM_GVGAI_DATASET")


@criterion(4, "GVGAI dataset reproduction (desk-optional)")
@pytest.mark.skipif(not GVGAI, reason="BESTARM_GVGAI_DATASET not set; waived in favour of criteria 2 and 3")
def test_gvgai_reproduction(record_property):
    config = ExperimentConfig(
        policies=parse_policies("optimistic-ws:c=16") + parse_policies("ucb-e:a=2") + parse_policies("uniform"),
        dataset=Path(GVGAI),
        dataset_format=os.environ.get("BESTARM_GVGAI_FORMAT", "trials-csv"),
        budget=50_000,
        repeats=10,
        checkpoint_every=1_000,
        workers=os.cpu_count() or 1,
    )
    result = run_experiment(config)
    ows = result.by_label(OWS).aggregate().round_averaged_regret
    vs_ucb = 1 - ows / result.by_label(UCBE).aggregate().round_averaged_regret
    vs_uni = 1 - ows / result.by_label("Uniform").aggregate().round_averaged_regret
    record_property("measured", f"reduction vs UCB-E {vs_ucb:.1%}, vs Uniform {vs_uni:.1%}")
    assert vs_ucb >= 0.25
    assert vs_uni >= 0.55


# ---------------------------------------------------------------- 5


@criterion(5, "SR / SH budget utilization on a 1085 x 29 environment")
def test_budget_utilization(record_property):
    start = time.perf_counter()
    config = ExperimentConfig(
        policies=parse_policies("sr") + parse_policies("sh"),
        synthetic=SyntheticSpec(num_bandits=1085, arms=29, seed=3),
        budget=50_000,
        repeats=1,
        checkpoint_every=1_000,
    )
    result = run_experiment(config)
    elapsed = time.perf_counter() - start
    sr = result.by_label("Successive Rejects")
    sh = result.by_label("Sequential Halving")
    record_property(
        "measured", f"SR {sr.utilization:.1%} ({sr.runs[0].pulls_issued}), SH {sh.utilization:.1%} ({sh.runs[0].pulls_issued}), {elapsed:.0f}s"
    )
    # hard ceiling on every run
    assert all(run.pulls_issued <= 50_000 for p in (sr, sh) for run in p.runs)
    # hand computation: floor(50000 / 1085) = 46 pulls per bandit
    assert successive_rejects_usage(29, 46) * 1085 == sr.runs[0].pulls_issued
    assert sequential_halving_usage(29, 46) * 1085 == sh.runs[0].pulls_issued
    assert 0.68 <= sr.utilization <= 0.88
    assert 0.44 <= sh.utilization <= 0.64
    assert elapsed < 60


# ---------------------------------------------------------------- 6


@criterion(6, "Successive Rejects and Sequential Halving schedule oracles")
def test_schedule_oracles(record_property):
    # log-bar(4) = 1/2 + 1/2 + 1/3 + 1/4 = 19/12; (20 - 4) / (19/12) = 192/19
    # n_j = ceil(192 / (19 (5 - j))) = ceil(2.53), ceil(3.37), ceil(5.05) = 3, 4, 6
    assert successive_rejects_schedule(4, 20) == [3, 4, 6]
    # 4 arms x 3 + 3 arms x 1 + 2 arms x 2
    assert successive_rejects_usage(4, 20) == 4 * 3 + 3 * 1 + 2 * 2 == 19
    assert successive_rejects_schedule(4, 20) == oracles.sr_schedule(4, 20)
    # two rounds: floor(16 / (4 * 2)) = 2 pulls for 4 arms, floor(16 / (2 * 2)) = 4 pulls for 2 arms
    assert sequential_halving_schedule(4, 16) == [(4, 2), (2, 4)]
    assert sequential_halving_usage(4, 16) == 16
    record_property("measured", "SR(4,20) = (3,4,6) using 19; SH(4,16) using 16")


# ---------------------------------------------------------------- 7


@criterion(7, "Determinism and tie fairness")
def test_determinism_byte_identical(tmp_path, record_property):
    args = ["--synthetic", "skewed", "--bandits", "6", "--arms", "5", "--budget", "3000",
            "--checkpoint-every", "250", "--repeats", "3", "--seed", "11", "--policy", "defaults"]
    assert cli_main([*args, "--out", str(tmp_path / "a")]) == 0
    assert cli_main([*args, "--out", str(tmp_path / "b")]) == 0
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    csvs = [f for f in files if f.suffix == ".csv"]
    assert len(csvs) == 9 + 2
    for f in files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes(), f
    record_property("measured", f"{len(files)} output files byte-identical")


@criterion(7, "Determinism and tie fairness")
def test_random_argmax_chi_square(record_property):
    rng = np.random.default_rng(7)
    values = np.array([0.3, 0.9, 0.9, 0.1, 0.9, 0.9])
    counts = np.bincount([random_argmax(values, rng) for _ in range(10_000)], minlength=6)
    p = stats.chisquare(counts[[1, 2, 4, 5]]).pvalue
    record_property("measured", f"chi-square p = {p:.3f}")
    assert counts[[0, 3]].sum() == 0
    assert p > 0.001


# ---------------------------------------------------------------- 8


@criterion(8, "Protocol shape: 50 checkpoints, bounded values, well-formed SVG and manifest")
def test_protocol_shape(tmp_path, record_property):
    config = ExperimentConfig(
        policies=parse_policies("defaults"),
        synthetic=SyntheticSpec(num_bandits=4, arms=5, seed=1),
        budget=50_000,
        repeats=2,
        checkpoint_every=1_000,
        out_dir=tmp_path,
    )
    result = run_experiment(config)
    for p in result.policies:
        for curve in p.curves:
            assert curve.rounds == list(range(1_000, 50_001, 1_000))
            assert np.all((curve.regrets >= 0) & (curve.regrets <= 1))
            assert np.all((curve.errors >= 0) & (curve.errors <= 1))
    emit_outputs(result)
    for path in (tmp_path / "curves").glob("*.csv"):
        assert len(path.read_text().splitlines()) == 1 + 50
    root = ET.parse(tmp_path / "regret.svg").getroot()
    assert root.tag.endswith("svg")
    assert len(root.findall("{http://www.w3.org/2000/svg}polyline")) == len(result.policies)
    manifest = read_manifest(tmp_path / "manifest.txt")
    assert len(manifest) == 1 + len(result.policies)
    assert all(s["runs"] == "2" for name, s in manifest.items() if name.startswith("policy"))
    record_property("measured", f"{len(result.policies)} policies x 2 runs x 50 checkpoints")
