"""Linear-in-parameter models g(x) = alpha . phi(x) and the l2 regulariser."""

from __future__ import annotations

import dataclasses
import enum
from pathlib import Path

import numpy as np

from pconf.errors import DomainError, InputFormatError, ShapeError


def _fmt(v):
    return format(float(v), ".17g")


@dataclasses.dataclass(frozen=True)
class AffineBasis:
    """phi(x) = [x; 1], so g(x) = w . x + b with the bias stored last."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise DomainError("input dimension must be >= 1")

    @property
    def dim(self):
        return self.d + 1

    @property
    def has_bias(self):
        return True

    def features(self, X):
        X = _check_patterns(X, self.d)
        return np.hstack([X, np.ones((X.shape[0], 1))])


@dataclasses.dataclass(frozen=True, eq=False)
class GaussianKernelBasis:
    """phi_j(x) = exp(-gamma * ||x - c_j||^2)."""

    centers: np.ndarray
    gamma: float

    def __post_init__(self):
        c = np.array(self.centers, dtype=np.float64, ndmin=2)
        if c.shape[0] < 1 or not np.all(np.isfinite(c)):
            raise DomainError("need at least one finite kernel center")
        if not self.gamma > 0:
            raise DomainError(f"bandwidth gamma must be positive, got {self.gamma}")
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "gamma", float(self.gamma))

    @classmethod
    def from_sample(cls, X, n_centers, gamma, seed=0):
        """Pick ``n_centers`` distinct training points as centers."""
        X = np.asarray(X, dtype=np.float64)
        rng = np.random.default_rng(seed)
        idx = rng.choice(X.shape[0], size=min(n_centers, X.shape[0]), replace=False)
        return cls(X[np.sort(idx)], gamma)

    @property
    def d(self):
        return self.centers.shape[1]

    @property
    def dim(self):
        return self.centers.shape[0]

    @property
    def has_bias(self):
        return False

    def features(self, X):
        X = _check_patterns(X, self.d)
        sq = (
            np.sum(X**2, axis=1)[:, None]
            - 2.0 * X @ self.centers.T
            + np.sum(self.centers**2, axis=1)[None, :]
        )
        return np.exp(-self.gamma * np.maximum(sq, 0.0))

    def __eq__(self, other):
        return (
            isinstance(other, GaussianKernelBasis)
            and self.gamma == other.gamma
            and np.array_equal(self.centers, other.centers)
        )

    __hash__ = None


def _check_patterns(X, d):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != d:
        raise ShapeError(f"expected patterns of dimension {d}, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DomainError("patterns must be finite")
    return X


def featurize(basis, x):
    """phi(x) for a single pattern (1-D result) or a batch (2-D result)."""
    single = np.ndim(x) == 1
    Phi = basis.features(x)
    return Phi[0] if single else Phi


@dataclasses.dataclass(frozen=True, eq=False)
class LinearModel:
    """A weight vector over a basis expansion.

    ``threshold`` shifts the decision rule: the margin is alpha . phi(x) - threshold.
    It is zero for every trained classifier except the regression baseline,
    which compares predicted confidence to 0.5.
    """

    basis: AffineBasis | GaussianKernelBasis
    alpha: np.ndarray
    threshold: float = 0.0

    def __post_init__(self):
        a = np.array(self.alpha, dtype=np.float64).reshape(-1)
        if a.shape[0] != self.basis.dim:
            raise ShapeError(f"alpha has length {a.shape[0]}, basis needs {self.basis.dim}")
        if not np.all(np.isfinite(a)):
            raise DomainError("model weights must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @classmethod
    def zeros(cls, basis):
        return cls(basis, np.zeros(basis.dim))

    def margins(self, X):
        return self.basis.features(X) @ self.alpha - self.threshold

    def weight_norm(self):
        return float(np.linalg.norm(self.alpha))


def predict_margin(model, x):
    m = model.margins(x)
    return float(m[0]) if np.ndim(x) == 1 else m


def predict_label(model, x):
    """+1 where g(x) > 0, else -1 (a zero margin is classified negative)."""
    m = np.asarray(predict_margin(model, x))
    labels = np.where(m > 0, 1, -1)
    return int(labels) if labels.ndim == 0 else labels


class PenaltyKind(str, enum.Enum):
    IDENTITY = "identity"
    IDENTITY_EXCEPT_BIAS = "identity_except_bias"
    EXPLICIT = "explicit"


@dataclasses.dataclass(frozen=True, eq=False)
class Regularizer:
    """(lam / 2) alpha^T R alpha."""

    lam: float = 0.0
    kind: PenaltyKind = PenaltyKind.IDENTITY_EXCEPT_BIAS
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise DomainError(f"lambda must be non-negative, got {self.lam}")
        kind = PenaltyKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is PenaltyKind.EXPLICIT:
            if self.matrix is None:
                raise DomainError("explicit penalty needs a matrix")
            R = np.array(self.matrix, dtype=np.float64)
            _validate_psd(R)
            R.setflags(write=False)
            object.__setattr__(self, "matrix", R)

    def penalty_matrix(self, dim, has_bias=True):
        if self.kind is PenaltyKind.EXPLICIT:
            if self.matrix.shape != (dim, dim):
                raise ShapeError(f"penalty matrix is {self.matrix.shape}, need {(dim, dim)}")
            return self.matrix
        R = np.eye(dim)
        if self.kind is PenaltyKind.IDENTITY_EXCEPT_BIAS and has_bias:
            R[-1, -1] = 0.0
        return R

    def value_and_grad(self, alpha, has_bias=True):
        alpha = np.asarray(alpha, dtype=np.float64)
        if self.lam == 0.0:
            return 0.0, np.zeros_like(alpha)
        Ra = self.penalty_matrix(alpha.shape[0], has_bias) @ alpha
        return 0.5 * self.lam * float(alpha @ Ra), self.lam * Ra


def _validate_psd(R, tol=1e-10):
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise DomainError("penalty matrix must be square")
    if not np.allclose(R, R.T, atol=tol, rtol=0):
        raise DomainError("penalty matrix must be symmetric")
    # shift by tol so semi-definite (singular) matrices still factor
    try:
        np.linalg.cholesky(R + tol * np.eye(R.shape[0]))
    except np.linalg.LinAlgError:
        raise DomainError("penalty matrix is not positive semi-definite") from None


def regularization_value_and_grad(reg, alpha, basis=None):
    """Return ``((lam/2) a^T R a, lam R a)``.

    Without a basis the last coordinate is treated as the bias.
    """
    return reg.value_and_grad(alpha, True if basis is None else basis.has_bias)


# -- persistence -------------------------------------------------------------

_MAGIC = "pconf-linear-model v1"


def dumps_model(model):
    b = model.basis
    lines = [_MAGIC]
    if isinstance(b, AffineBasis):
        lines += ["basis=affine", f"d={b.d}"]
    else:
        lines += ["basis=gaussian", f"d={b.d}", f"n_centers={b.dim}", f"gamma={_fmt(b.gamma)}"]
        lines += ["center=" + ",".join(_fmt(v) for v in c) for c in b.centers]
    lines.append(f"threshold={_fmt(model.threshold)}")
    lines.append("alpha=" + ",".join(_fmt(v) for v in model.alpha))
    return "\n".join(lines) + "\n"


def loads_model(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != _MAGIC:
        raise InputFormatError("not a pconf model file")
    fields, centers = {}, []
    for ln in lines[1:]:
        key, sep, val = ln.partition("=")
        if not sep:
            raise InputFormatError(f"malformed model line {ln!r}")
        if key == "center":
            centers.append([float(v) for v in val.split(",")])
        else:
            fields[key] = val
    try:
        if fields["basis"] == "affine":
            basis = AffineBasis(int(fields["d"]))
        elif fields["basis"] == "gaussian":
            basis = GaussianKernelBasis(np.array(centers), float(fields["gamma"]))
        else:
            raise InputFormatError(f"unknown basis {fields['basis']!r}")
        alpha = [float(v) for v in fields["alpha"].split(",")]
        return LinearModel(basis, alpha, float(fields.get("threshold", 0.0)))
    except KeyError as exc:
        raise InputFormatError(f"model file is missing field {exc.args[0]!r}") from None


def save_model(model, path):
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def load_model(path):
    return loads_model(Path(path).read_text(encoding="utf-8"))
