"""Empirical risks for Pconf, confidence-weighted and supervised training.

The Pconf objective is the importance-weighted positive-only rewrite of the
classification risk: each positive pattern contributes l(g(x)) for the
positive class plus (1 - r) / r * l(-g(x)) standing in for the missing
negatives. The naive weighted objective uses r and 1 - r directly and is kept
as a baseline.
"""

from __future__ import annotations

import dataclasses
import enum

import numpy as np

from pconf.errors import DomainError, ShapeError, UnsupportedOperationError
from pconf.loss import LossKind, _symmetric, _value_and_grad, loss_value
from pconf.model import Regularizer

DEFAULT_FLOOR = 0.01


@dataclasses.dataclass(frozen=True, eq=False)
class PconfDataset:
    """Positive patterns ``X`` (n x d) with confidences ``r`` = p(y=+1 | x)."""

    X: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, ndmin=2)
        r = np.array(self.r, dtype=np.float64).reshape(-1)
        if X.shape[0] != r.shape[0]:
            raise ShapeError(f"{X.shape[0]} patterns but {r.shape[0]} confidences")
        if X.shape[0] < 1:
            raise ShapeError("dataset is empty")
        if np.any(~np.isfinite(r)) or np.any(r < 0) or np.any(r > 1):
            raise DomainError("confidences must lie in [0, 1]")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "r", r)

    def __len__(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    @property
    def is_degenerate(self):
        """True when every confidence is 1, so the data carry no negative signal."""
        return bool(np.all(self.r == 1.0))

    def clamped(self, floor=DEFAULT_FLOOR):
        return PconfDataset(self.X, clamp_confidence(self.r, floor))


@dataclasses.dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Patterns ``X`` with hard labels ``y`` in {+1, -1}."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, ndmin=2)
        y = np.array(self.y).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise ShapeError(f"{X.shape[0]} patterns but {y.shape[0]} labels")
        if X.shape[0] < 1:
            raise ShapeError("dataset is empty")
        if not np.all((y == 1) | (y == -1)):
            raise DomainError("labels must be +1 or -1")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y.astype(np.int64))

    def __len__(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]


def clamp_confidence(r_raw, floor=DEFAULT_FLOOR):
    """Round confidences below ``floor`` up to ``floor``."""
    if not 0.0 < floor < 1.0:
        raise DomainError(f"confidence floor must lie in (0, 1), got {floor}")
    r = np.asarray(r_raw, dtype=np.float64)
    if np.any(~np.isfinite(r)) or np.any(r < 0) or np.any(r > 1):
        raise DomainError("raw confidence must lie in [0, 1]")
    out = np.maximum(r, floor)
    return float(out) if out.ndim == 0 else out


class ObjectiveKind(str, enum.Enum):
    PCONF = "pconf"
    WEIGHTED = "weighted"
    SUPERVISED = "supervised"


@dataclasses.dataclass(frozen=True)
class RiskObjective:
    """Which empirical risk to minimise, with its loss and regulariser.

    ``value_and_grad`` works on precomputed features so the optimizer does
    not re-expand the basis every epoch.
    """

    kind: ObjectiveKind
    loss: LossKind = LossKind.LOGISTIC
    reg: Regularizer = dataclasses.field(default_factory=Regularizer)

    def __post_init__(self):
        object.__setattr__(self, "kind", ObjectiveKind(self.kind))
        object.__setattr__(self, "loss", LossKind.parse(self.loss))
        if self.loss is LossKind.ZERO_ONE:
            raise UnsupportedOperationError("the zero-one loss cannot be a training objective")

    def value_and_grad(self, alpha, Phi, target, has_bias=True, offset=0.0):
        z = Phi @ alpha
        if offset:
            z = z - offset
        value, dz = _TERMS[self.kind](z, target, self.loss)
        reg_val, reg_grad = self.reg.value_and_grad(alpha, has_bias)
        return value + reg_val, Phi.T @ dz + reg_grad

    def target_of(self, data):
        if self.kind is ObjectiveKind.SUPERVISED:
            if not isinstance(data, LabeledDataset):
                raise DomainError("supervised objective needs a labeled dataset")
            return data.y.astype(np.float64)
        if not isinstance(data, PconfDataset):
            raise DomainError(f"{self.kind.value} objective needs a Pconf dataset")
        if self.kind is ObjectiveKind.PCONF:
            _require_positive_confidence(data.r)
        return data.r


def _require_positive_confidence(r):
    if np.any(r <= 0):
        raise DomainError(
            "Pconf risk needs strictly positive confidence; apply clamp_confidence first"
        )


# Hot-path terms: inputs are trusted arrays, so the public loss checks are skipped.
def _pconf_terms(z, r, loss):
    w = (1.0 - r) / r
    lp, ln, gp, gn = _symmetric(loss, z)
    return float(np.sum(lp + w * ln)), gp - w * gn


def _weighted_terms(z, r, loss):
    lp, ln, gp, gn = _symmetric(loss, z)
    return float(np.sum(r * lp + (1.0 - r) * ln)), r * gp - (1.0 - r) * gn


def _supervised_terms(z, y, loss):
    n = z.shape[0]
    yz = y * z
    lv, lg = _value_and_grad(loss, yz)
    return float(np.sum(lv)) / n, y * lg / n


_TERMS = {
    ObjectiveKind.PCONF: _pconf_terms,
    ObjectiveKind.WEIGHTED: _weighted_terms,
    ObjectiveKind.SUPERVISED: _supervised_terms,
}


def _evaluate(kind, data, model, loss, reg):
    objective = RiskObjective(kind, loss, reg if reg is not None else Regularizer())
    target = objective.target_of(data)
    Phi = model.basis.features(data.X)
    return objective.value_and_grad(
        model.alpha, Phi, target, model.basis.has_bias, model.threshold
    )


def pconf_risk(data, model, loss=LossKind.LOGISTIC, reg=None):
    """Sum-form Pconf objective and its gradient in ``model.alpha``."""
    return _evaluate(ObjectiveKind.PCONF, data, model, loss, reg)


def weighted_risk(data, model, loss=LossKind.LOGISTIC, reg=None):
    return _evaluate(ObjectiveKind.WEIGHTED, data, model, loss, reg)


def supervised_risk(data, model, loss=LossKind.LOGISTIC, reg=None):
    """Mean loss over labeled samples plus the regulariser."""
    return _evaluate(ObjectiveKind.SUPERVISED, data, model, loss, reg)


def pconf_risk_estimate(data, model, loss=LossKind.LOGISTIC, pi_plus=1.0):
    """pi_plus times the per-sample mean Pconf loss (no regulariser).

    With exact confidences this is an unbiased estimate of the
    classification risk E[l(y g(x))].
    """
    _require_positive_confidence(data.r)
    value, _ = _pconf_terms(model.margins(data.X), data.r, LossKind.parse(loss))
    return pi_plus * value / len(data)


def pconf_validation_score(data, model):
    """Zero-one version of the Pconf objective, averaged; lower is better."""
    _require_positive_confidence(data.r)
    z = model.margins(data.X)
    w = (1.0 - data.r) / data.r
    zo = LossKind.ZERO_ONE
    return float(np.sum(loss_value(zo, z) + w * loss_value(zo, -z))) / len(data)


def weighted_validation_score(data, model):
    z = model.margins(data.X)
    r = data.r
    zo = LossKind.ZERO_ONE
    return float(np.sum(r * loss_value(zo, z) + (1.0 - r) * loss_value(zo, -z))) / len(data)


def accuracy(data, model):
    """Fraction of labeled samples classified correctly (zero margin -> -1)."""
    pred = np.where(model.margins(data.X) > 0, 1, -1)
    return float(np.mean(pred == data.y))
