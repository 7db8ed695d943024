"""Central-difference gradient checks shared by unit and acceptance tests."""

import numpy as np

from pconf.loss import TRAINABLE_LOSSES, LossKind, loss_grad, loss_value
from pconf.model import AffineBasis, LinearModel, PenaltyKind, Regularizer
from pconf.risk import LabeledDataset, PconfDataset, pconf_risk, supervised_risk, weighted_risk

RISKS = {"pconf": pconf_risk, "weighted": weighted_risk, "supervised": supervised_risk}


def rel_err(a, b):
    a, b = np.atleast_1d(a), np.atleast_1d(b)
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    return 0.0 if scale == 0 else float(np.linalg.norm(a - b) / scale)


def central_diff(f, x, h):
    x = np.asarray(x, dtype=np.float64)
    return np.array([(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(x.size)])


def random_instance(seed, d=5, n=20):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    r = rng.uniform(0.05, 1.0, n)
    y = np.where(rng.random(n) < 0.5, 1, -1)
    alpha = 0.5 * rng.standard_normal(d + 1)
    reg = Regularizer(float(rng.uniform(0, 1)), PenaltyKind.IDENTITY_EXCEPT_BIAS)
    return PconfDataset(X, r), LabeledDataset(X, y), alpha, reg


def risk_grad_error(kind, loss, seed, h=1e-5):
    pdata, ldata, alpha, reg = random_instance(seed)
    data = ldata if kind == "supervised" else pdata
    basis = AffineBasis(data.d)
    risk = RISKS[kind]

    def f(a):
        return risk(data, LinearModel(basis, a), loss, reg)[0]

    _, g = risk(data, LinearModel(basis, alpha), loss, reg)
    return rel_err(g, central_diff(f, alpha, h))


def loss_grad_errors(seed, h=1e-5):
    rng = np.random.default_rng(seed)
    errs = []
    for kind in TRAINABLE_LOSSES:
        z = rng.uniform(-5, 5)
        while min(abs(z), abs(z - 1.0)) < 1e-2:
            z = rng.uniform(-5, 5)
        fd = (loss_value(kind, z + h) - loss_value(kind, z - h)) / (2 * h)
        errs.append(rel_err(loss_grad(kind, z), fd) if loss_grad(kind, z) or fd else 0.0)
    return errs


def regularizer_grad_error(seed, h=1e-5):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((6, 6))
    reg = Regularizer(float(rng.uniform(0.1, 2)), PenaltyKind.EXPLICIT, A @ A.T)
    alpha = rng.standard_normal(6)
    _, g = reg.value_and_grad(alpha)
    return rel_err(g, central_diff(lambda a: reg.value_and_grad(a)[0], alpha, h))


GRAD_LOSSES = (LossKind.LOGISTIC, LossKind.SQUARED)
