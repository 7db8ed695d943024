"""Margin losses l(z) and their derivatives.

All functions accept scalars or numpy arrays and are vectorised.
"""

import enum

import numpy as np
from scipy.special import expit

from pconf.errors import DomainError, UnsupportedOperationError


class LossKind(str, enum.Enum):
    LOGISTIC = "logistic"
    SQUARED = "squared"
    HINGE = "hinge"
    RAMP = "ramp"
    ZERO_ONE = "zero_one"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower().replace("-", "_"))
        except ValueError:
            raise DomainError(f"unknown loss {name!r}") from None


TRAINABLE_LOSSES = (LossKind.LOGISTIC, LossKind.SQUARED, LossKind.HINGE, LossKind.RAMP)


def _as_finite(z):
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise DomainError("margin must be finite")
    return z


def _value(kind, z):
    if kind is LossKind.LOGISTIC:
        # logaddexp(0, -z) == max(0, -z) + log1p(exp(-|z|)): the sign-split
        # softplus, which never overflows
        return np.logaddexp(0.0, -z)
    if kind is LossKind.SQUARED:
        return (z - 1.0) ** 2
    if kind is LossKind.HINGE:
        return np.maximum(0.0, 1.0 - z)
    if kind is LossKind.RAMP:
        return np.minimum(1.0, np.maximum(0.0, 1.0 - z))
    # tie at z == 0 counts as an error
    return (z <= 0).astype(np.float64)


def _grad(kind, z):
    if kind is LossKind.LOGISTIC:
        return -expit(-z)
    if kind is LossKind.SQUARED:
        return 2.0 * (z - 1.0)
    if kind is LossKind.HINGE:
        return np.where(z < 1.0, -1.0, 0.0)
    return np.where((z > 0.0) & (z < 1.0), -1.0, 0.0)


def _value_and_grad(kind, z):
    if kind is LossKind.LOGISTIC:
        e = np.exp(-np.abs(z))
        return np.maximum(0.0, -z) + np.log1p(e), -np.where(z >= 0, e, 1.0) / (1.0 + e)
    return _value(kind, z), _grad(kind, z)


def _symmetric(kind, z):
    """(l(z), l(-z), l'(z), l'(-z)) for trusted arrays, sharing work where possible."""
    if kind is LossKind.LOGISTIC:
        e = np.exp(-np.abs(z))
        lz = np.maximum(0.0, -z) + np.log1p(e)
        # sigmoid(-z) without overflow
        s_neg = np.where(z >= 0, e, 1.0) / (1.0 + e)
        return lz, lz + z, -s_neg, s_neg - 1.0
    return _value(kind, z), _value(kind, -z), _grad(kind, z), _grad(kind, -z)


def loss_value(kind, z):
    """Evaluate l(z) for the given loss kind."""
    z = _as_finite(z)
    out = _value(LossKind.parse(kind), z)
    return float(out) if z.ndim == 0 else out


def loss_grad(kind, z):
    """Derivative dl/dz; the zero subgradient is used at kinks."""
    kind = LossKind.parse(kind)
    if kind is LossKind.ZERO_ONE:
        raise UnsupportedOperationError("the zero-one loss has no usable gradient")
    z = _as_finite(z)
    out = _grad(kind, z)
    return float(out) if z.ndim == 0 else out


def loss_constants(kind, c_g):
    """Return ``(C_ell, L_ell)``: sup of l and a Lipschitz constant on [-c_g, c_g]."""
    kind = LossKind.parse(kind)
    if kind is LossKind.ZERO_ONE:
        raise UnsupportedOperationError("the zero-one loss is not Lipschitz")
    c_g = float(c_g)
    if not np.isfinite(c_g) or c_g <= 0:
        raise DomainError(f"C_g must be positive, got {c_g}")
    if kind is LossKind.LOGISTIC:
        return float(np.logaddexp(0.0, c_g)), 1.0
    if kind is LossKind.SQUARED:
        return (c_g + 1.0) ** 2, 2.0 * (c_g + 1.0)
    if kind is LossKind.HINGE:
        return 1.0 + c_g, 1.0
    return 1.0, 1.0
