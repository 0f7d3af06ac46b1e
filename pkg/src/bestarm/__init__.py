"""Multi-bandit best arm identification: Optimistic-WS and baseline policies."""

from .core import ArmState, EnvironmentShape, RunState, random_argmax
from .evaluation import AggregateCurve, Checkpoint, RegretCurve, aggregate, error_rate, simple_regret
from .harness import ExperimentConfig, ExperimentResult, run_experiment
from .intervals import WilsonInterval, normal_quantile, wilson_interval
from .policies import (
    BudgetExhausted,
    PolicyConfig,
    PolicyKind,
    Prediction,
    make_policy,
    ows_deltas,
    parse_policies,
    predict,
)
from .report import emit_outputs
from .sources import (
    BernoulliSource,
    DatasetSource,
    GroundTruth,
    SyntheticSpec,
    TrialDataset,
    load_dataset,
    make_synthetic,
    save_dataset,
)

__version__ = "0.1.0"
