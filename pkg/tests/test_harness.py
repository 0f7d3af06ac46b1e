import xml.etree.ElementTree as ET

import pytest

from bestarm.core import RunState
from bestarm.harness import (
    ExperimentConfig,
    ExperimentResult,
    config_from_mapping,
    initial_pull_seed,
    read_config_file,
    run_experiment,
    run_rngs,
    run_single,
)
from bestarm.policies import PolicyConfig, PolicyKind, parse_policies
from bestarm.report import emit_outputs, read_manifest, render_svg
from bestarm.sources import BernoulliSource, SyntheticSpec

SMALL = SyntheticSpec(num_bandits=3, means=(0.2, 0.5, 0.9), seed=0)


def small_config(policies="uniform", **kw):
    kw.setdefault("budget", 600)
    kw.setdefault("repeats", 2)
    kw.setdefault("checkpoint_every", 100)
    return ExperimentConfig(policies=parse_policies(policies), synthetic=SMALL, **kw)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(synthetic=None)
    with pytest.raises(ValueError):
        ExperimentConfig(synthetic=SMALL, dataset="x.csv")
    with pytest.raises(ValueError):
        ExperimentConfig(synthetic=SMALL, budget=100, checkpoint_every=200)
    with pytest.raises(ValueError):
        ExperimentConfig(synthetic=SMALL, policies=parse_policies("ows") * 2)
    assert len(ExperimentConfig(synthetic=SMALL).checkpoints) == 50
    # a trailing partial checkpoint is dropped
    assert ExperimentConfig(synthetic=SMALL, budget=2500, checkpoint_every=1000).checkpoints == [1000, 2000]


def test_seed_streams_independent_of_other_policies():
    a, _ = run_rngs(0, "Uniform", 3)
    b, _ = run_rngs(0, "Uniform", 3)
    c, _ = run_rngs(0, "Random", 3)
    d, e = run_rngs(0, "Uniform", 4)
    assert a.random() == b.random()
    assert len({a.random(), c.random(), d.random(), e.random()}) == 4
    assert initial_pull_seed(0) != initial_pull_seed(1)


def test_run_single_budget_accounting():
    source = BernoulliSource([[0.3, 0.6]] * 2)
    init = source.initial_values(0)
    rng, eval_rng = run_rngs(0, "x", 0)
    run = run_single(source, PolicyConfig(PolicyKind.OPTIMISTIC_WS, exploration_c=16), 500, 100, init, rng, eval_rng)
    assert run.pulls_issued == 500 and run.unused == 0
    assert run.curve.rounds == [100, 200, 300, 400, 500]


def test_fixed_budget_run_freezes_prediction():
    # two K=4 bandits, 20 pulls each, 19 used each: rounds 39-45 have nothing to pull
    source = BernoulliSource([[0.3, 0.6, 0.5, 0.1], [0.5, 0.5, 0.2, 0.9]])
    init = source.initial_values(0)
    rng, eval_rng = run_rngs(0, "sr", 0)
    config = PolicyConfig(PolicyKind.SUCCESSIVE_REJECTS)
    run = run_single(source, config, 45, 1, init, rng, eval_rng)
    assert run.pulls_issued == 38 and run.unused == 7
    tail = run.curve.checkpoints[38:]
    assert len({(c.simple_regret, c.error_rate) for c in tail}) == 1


def test_experiment_shares_initial_pulls():
    seen = []
    original = RunState.record_reward

    def spy(self, m, k, r):
        if self.round == 0 and self.pulls[m, k] == 0:
            seen.append((m, k, r))
        return original(self, m, k, r)

    RunState.record_reward = spy
    try:
        run_experiment(small_config("uniform", repeats=3))
    finally:
        RunState.record_reward = original
    per_run = [tuple(seen[i : i + 9]) for i in range(0, len(seen), 9)]
    assert len(per_run) == 3 and len(set(per_run)) == 1


def test_experiment_outputs_and_budget_accounting(tmp_path):
    config = small_config("uniform", out_dir=tmp_path)
    config.policies += parse_policies("sh")
    result = run_experiment(config)
    assert result.by_label("Uniform").mean_pulls_issued == 600
    sh = result.by_label("Sequential Halving")
    assert all(run.pulls_issued <= 600 for run in sh.runs)
    paths = emit_outputs(result)
    assert {p.name for p in paths} >= {"aggregate.csv", "runs.csv", "regret.svg", "manifest.txt"}
    manifest = read_manifest(tmp_path / "manifest.txt")
    section = manifest["policy sequential-halving"]
    assert float(section["unused_pulls_mean"]) == pytest.approx(600 - sh.mean_pulls_issued)
    assert manifest["experiment"]["seed"] == "0"
    ET.parse(tmp_path / "regret.svg")
    lines = (tmp_path / "curves" / "uniform.csv").read_text().splitlines()
    assert lines[0] == "round,mean_regret,std_regret,mean_error,std_error"
    assert len(lines) == 1 + 6


def test_adding_a_policy_leaves_others_unchanged():
    alone = run_experiment(small_config("ows"))
    both = run_experiment(small_config("ows"))
    config = small_config("ows")
    config.policies += parse_policies("uniform")
    mixed = run_experiment(config)
    ref = alone.policies[0].aggregate().rows()
    assert both.policies[0].aggregate().rows() == ref
    assert mixed.by_label("Optimistic-WS (c=16)").aggregate().rows() == ref


def test_workers_give_identical_results():
    serial = run_experiment(small_config("ows", repeats=3))
    parallel = run_experiment(small_config("ows", repeats=3, workers=2))
    assert serial.policies[0].aggregate().rows() == parallel.policies[0].aggregate().rows()


def test_bad_policy_fails_before_running():
    config = ExperimentConfig(
        policies=parse_policies("sr"), synthetic=SyntheticSpec(num_bandits=10, arms=8), budget=50, checkpoint_every=10
    )
    with pytest.raises(ValueError, match="Successive Rejects"):
        run_experiment(config)


def test_empty_result_writes_nothing(tmp_path):
    result = ExperimentResult(small_config(), [], "none")
    with pytest.raises(ValueError):
        emit_outputs(result, tmp_path / "out")
    assert not (tmp_path / "out").exists()


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(
        "# comment\nsynthetic = skewed\nbandits = 4\narms = 3\nbudget = 300  # inline\n"
        "checkpoint_every = 100\npolicy = ows:c=4,16\npolicy = uniform\nenv_seed = 9\n"
    )
    config = config_from_mapping(read_config_file(path))
    assert [p.label for p in config.policies] == ["Optimistic-WS (c=4)", "Optimistic-WS (c=16)", "Uniform"]
    assert config.synthetic.arms_per_bandit == (3, 3, 3, 3) and config.synthetic.seed == 9
    again = config_from_mapping({k: v for k, v in _items_to_mapping(config.as_items()).items()})
    assert again.as_items() == config.as_items()


def _items_to_mapping(items):
    out = {}
    for k, v in items:
        if k == "policy":
            out.setdefault("policy", []).append(v)
        else:
            out[k] = str(v)
    return out


@pytest.mark.parametrize("text", ["budget 300\n", "colour = red\n", "= 3\n"])
def test_config_file_errors(tmp_path, text):
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    with pytest.raises(ValueError):
        read_config_file(path)


def test_svg_has_one_series_per_policy():
    result = run_experiment(small_config("defaults"))
    svg = render_svg([p.aggregate() for p in result.policies], 600)
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    assert len(root.findall(f"{ns}polyline")) == 9
    assert len(root.findall(f"{ns}polygon")) == 9
    labels = [t.text for t in root.findall(f"{ns}text")]
    assert "Optimistic-WS (c=16)" in labels


def test_regret_values_bounded():
    result = run_experiment(small_config("defaults"))
    for p in result.policies:
        for c in p.curves:
            assert ((c.regrets >= 0) & (c.regrets <= 1)).all()
            assert ((c.errors >= 0) & (c.errors <= 1)).all()
