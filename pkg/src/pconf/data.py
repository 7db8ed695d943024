"""Synthetic two-Gaussian tasks with exact or estimated positive confidence.

Random draws use numpy's PCG64 bit generator (``np.random.default_rng``)
and its ziggurat normal sampler, both of which are platform independent, so
a seed fixes a dataset on every machine.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy.special import expit

from pconf.loss import LossKind
from pconf.model import AffineBasis, PenaltyKind, Regularizer
from pconf.errors import DomainError
from pconf.optim import OptimizerConfig, minimize
from pconf.risk import LabeledDataset, ObjectiveKind, PconfDataset, RiskObjective


@dataclasses.dataclass(frozen=True)
class TwoGaussianSpec:
    """p(x | y=+1) = N(mu_plus, I), p(x | y=-1) = N(mu_minus, I)."""

    mu_plus: tuple = (0.0, 0.0)
    mu_minus: tuple = (2.0, 2.0)
    pi_plus: float = 0.5
    seed: int = 0

    def __post_init__(self):
        mp = tuple(float(v) for v in np.ravel(self.mu_plus))
        mm = tuple(float(v) for v in np.ravel(self.mu_minus))
        if len(mp) != len(mm):
            raise DomainError("class means must have the same dimension")
        if not 0.0 < self.pi_plus < 1.0:
            raise DomainError("pi_plus must lie in (0, 1)")
        object.__setattr__(self, "mu_plus", mp)
        object.__setattr__(self, "mu_minus", mm)

    @property
    def d(self):
        return len(self.mu_plus)

    def with_seed(self, seed):
        return dataclasses.replace(self, seed=seed)


@dataclasses.dataclass(frozen=True)
class NoisySpec:
    """Confidence estimated by logistic regression on m + m fresh samples."""

    m: int = 1000
    l2_coefficient: float = 1e-3
    seed: int = 0
    optimizer: OptimizerConfig = OptimizerConfig(step_size=0.05, max_epochs=20_000)

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("m must be >= 1")


def log_odds(spec, X):
    """log p(y=+1 | x) - log p(y=-1 | x) under the spec's densities."""
    X = np.asarray(X, dtype=np.float64)
    mp, mm = np.asarray(spec.mu_plus), np.asarray(spec.mu_minus)
    sq_p = np.sum((X - mp) ** 2, axis=-1)
    sq_m = np.sum((X - mm) ** 2, axis=-1)
    return np.log(spec.pi_plus) - np.log1p(-spec.pi_plus) + 0.5 * (sq_m - sq_p)


def analytic_confidence(spec, x):
    """Exact posterior p(y=+1 | x), computed as a logistic of the log-odds."""
    r = expit(log_odds(spec, x))
    return float(r) if np.ndim(r) == 0 else r


def _draw(rng, mean, n):
    return np.asarray(mean) + rng.standard_normal((n, len(mean)))


def sample_pconf_dataset(spec, n_pos, confidence=None):
    """Draw ``n_pos`` positives, each tagged with its confidence.

    ``confidence`` maps an (n, d) array to confidences; the exact posterior is
    used when it is None.
    """
    if n_pos < 1:
        raise DomainError("n_pos must be >= 1")
    rng = np.random.default_rng(spec.seed)
    X = _draw(rng, spec.mu_plus, n_pos)
    r = analytic_confidence(spec, X) if confidence is None else confidence(X)
    return PconfDataset(X, np.atleast_1d(r))


def sample_labeled_dataset(spec, n_pos, n_neg):
    """Positives first, then negatives, from one seeded stream."""
    if n_pos < 0 or n_neg < 0 or n_pos + n_neg < 1:
        raise DomainError("need a non-negative number of samples per class, at least one total")
    rng = np.random.default_rng(spec.seed)
    X = np.vstack([_draw(rng, spec.mu_plus, n_pos), _draw(rng, spec.mu_minus, n_neg)])
    y = np.concatenate([np.ones(n_pos, dtype=np.int64), -np.ones(n_neg, dtype=np.int64)])
    return LabeledDataset(X, y)


@dataclasses.dataclass(frozen=True, eq=False)
class NoisyConfidence:
    """x -> sigmoid(g(x)) for a logistic-regression model g."""

    model: object
    report: object

    def __call__(self, X):
        # expit saturates to exactly 0 or 1 in double precision; keep (0, 1) open
        r = expit(self.model.margins(X))
        return np.clip(r, np.finfo(np.float64).tiny, np.nextafter(1.0, 0.0))


def noisy_confidence_model(spec, noisy):
    """Fit l2-regularised logistic regression on m positives and m negatives.

    The 2m samples come from ``noisy.seed`` and are used for nothing else.
    """
    train = sample_labeled_dataset(spec.with_seed(noisy.seed), noisy.m, noisy.m)
    objective = RiskObjective(
        ObjectiveKind.SUPERVISED,
        LossKind.LOGISTIC,
        Regularizer(noisy.l2_coefficient, PenaltyKind.IDENTITY_EXCEPT_BIAS),
    )
    model, report = minimize(objective, train, AffineBasis(spec.d), noisy.optimizer)
    return NoisyConfidence(model, report)
