"""Full-batch Adam / gradient descent, and the closed-form ridge baseline."""

from __future__ import annotations

import dataclasses
import enum

import numpy as np

from pconf.errors import DivergenceError, DomainError, NumericalError
from pconf.model import LinearModel


class Algorithm(str, enum.Enum):
    ADAM = "adam"
    GRADIENT_DESCENT = "gd"


@dataclasses.dataclass(frozen=True)
class OptimizerConfig:
    algorithm: Algorithm = Algorithm.ADAM
    step_size: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    max_epochs: int = 10_000
    grad_tolerance: float = 1e-8
    seed: int = 0
    trace_every: int = 0

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if not self.step_size > 0:
            raise DomainError("step_size must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise DomainError("beta1 and beta2 must lie in [0, 1)")
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")
        if int(self.max_epochs) < 1:
            raise DomainError("max_epochs must be >= 1")
        if self.grad_tolerance < 0:
            raise DomainError("grad_tolerance must be non-negative")


@dataclasses.dataclass
class TrainReport:
    final_alpha: np.ndarray
    epochs_run: int
    final_objective: float
    final_grad_norm: float
    initial_objective: float
    objective_trace: list = dataclasses.field(default_factory=list)


def minimize_function(fun, x0, config=None):
    """Minimise ``fun(x) -> (value, grad)`` from ``x0``.

    Returns the best iterate seen (lowest objective), not necessarily the
    last one, together with a :class:`TrainReport`.
    """
    config = config or OptimizerConfig()
    x = np.array(x0, dtype=np.float64)
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    b1, b2, lr, eps = config.beta1, config.beta2, config.step_size, config.epsilon
    adam = config.algorithm is Algorithm.ADAM

    best_x, best_f, best_g = None, np.inf, np.inf
    initial_f = None
    trace = []
    epochs = 0
    while True:
        f, g = fun(x)
        gnorm = float(np.linalg.norm(g))
        if not (np.isfinite(f) and np.isfinite(gnorm)):
            raise DivergenceError(epochs)
        if initial_f is None:
            initial_f = f
        if f < best_f:
            best_x, best_f, best_g = x.copy(), f, gnorm
        if config.trace_every and epochs % config.trace_every == 0:
            trace.append((epochs, f))
        if epochs >= config.max_epochs or gnorm <= config.grad_tolerance:
            break
        epochs += 1
        if adam:
            m = b1 * m + (1.0 - b1) * g
            v = b2 * v + (1.0 - b2) * (g * g)
            m_hat = m / (1.0 - b1**epochs)
            v_hat = v / (1.0 - b2**epochs)
            x = x - lr * m_hat / (np.sqrt(v_hat) + eps)
        else:
            x = x - lr * g

    return best_x, TrainReport(
        final_alpha=best_x,
        epochs_run=epochs,
        final_objective=float(best_f),
        final_grad_norm=best_g,
        initial_objective=float(initial_f),
        objective_trace=trace,
    )


def minimize(objective, data, basis, config=None):
    """Train a linear model on ``data`` under a :class:`RiskObjective`.

    Weights start at zero.
    """
    Phi = basis.features(data.X)
    target = objective.target_of(data)
    has_bias = basis.has_bias

    def fun(alpha):
        return objective.value_and_grad(alpha, Phi, target, has_bias)

    alpha, report = minimize_function(fun, np.zeros(basis.dim), config)
    return LinearModel(basis, alpha), report


def ridge_regression_fit(data, basis, lam=0.0):
    """Least-squares fit of the confidences, thresholded at 0.5.

    Solves min ||Phi a - r||^2 + lam ||a||^2 directly. The returned model's
    margin is a . phi(x) - 0.5, so it predicts +1 where the fitted
    confidence exceeds one half.
    """
    if lam < 0:
        raise DomainError("lambda must be non-negative")
    Phi = basis.features(data.X)
    A = Phi.T @ Phi + lam * np.eye(basis.dim)
    b = Phi.T @ data.r
    if lam == 0.0 and np.linalg.matrix_rank(A) < basis.dim:
        raise NumericalError("normal matrix is singular at lambda=0; use lambda > 0")
    try:
        alpha = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"ridge solve failed ({exc}); use lambda > 0") from None
    return LinearModel(basis, alpha, threshold=0.5)
