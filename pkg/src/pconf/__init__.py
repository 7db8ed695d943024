"""Binary classification from positive data equipped with confidence."""

from pconf.data import (
    NoisySpec,
    TwoGaussianSpec,
    analytic_confidence,
    noisy_confidence_model,
    sample_labeled_dataset,
    sample_pconf_dataset,
)
from pconf.loss import LossKind, loss_constants, loss_grad, loss_value
from pconf.model import (
    AffineBasis,
    GaussianKernelBasis,
    LinearModel,
    PenaltyKind,
    Regularizer,
    featurize,
    load_model,
    predict_label,
    predict_margin,
    regularization_value_and_grad,
    save_model,
)
from pconf.optim import OptimizerConfig, TrainReport, minimize, ridge_regression_fit
from pconf.risk import (
    LabeledDataset,
    ObjectiveKind,
    PconfDataset,
    RiskObjective,
    accuracy,
    clamp_confidence,
    pconf_risk,
    pconf_risk_estimate,
    pconf_validation_score,
    supervised_risk,
    weighted_risk,
    weighted_validation_score,
)

__version__ = "0.1.0"
