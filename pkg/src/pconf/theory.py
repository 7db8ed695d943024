"""Uniform-deviation and estimation-error bounds for the Pconf risk."""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from pconf.errors import DomainError
from pconf.loss import loss_constants
from pconf.risk import DEFAULT_FLOOR


def _positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive and finite, got {value}")


@dataclasses.dataclass(frozen=True)
class BoundInputs:
    n: int
    pi_plus: float
    c_r: float
    c_ell: float
    l_ell: float
    rademacher: float
    delta: float = 0.05

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if not 0.0 < self.pi_plus < 1.0:
            raise DomainError("pi_plus must lie in (0, 1)")
        if not 0.0 < self.c_r <= 1.0:
            raise DomainError("C_r must lie in (0, 1]")
        if not 0.0 < self.delta < 1.0:
            raise DomainError("delta must lie in (0, 1)")
        _positive("C_ell", self.c_ell)
        _positive("L_ell", self.l_ell)
        if not (math.isfinite(self.rademacher) and self.rademacher >= 0):
            raise DomainError("Rademacher complexity must be non-negative")


def rademacher_linear(c_w, c_phi, n):
    """Upper bound C_w * C_phi / sqrt(n) for norm-bounded linear classes."""
    _positive("C_w", c_w)
    _positive("C_phi", c_phi)
    if n < 1:
        raise DomainError("n must be >= 1")
    return c_w * c_phi / math.sqrt(n)


def uniform_deviation_bound(b):
    """sup_g |R_hat(g) - R(g)| holds below this with probability 1 - delta."""
    complexity = 2.0 * b.pi_plus * (b.l_ell + b.l_ell / b.c_r) * b.rademacher
    concentration = b.pi_plus * (b.c_ell + b.c_ell / b.c_r) * math.sqrt(
        math.log(2.0 / b.delta) / (2.0 * b.n)
    )
    return complexity + concentration


def estimation_error_bound(b):
    """Bound on R(g_hat) - R(g*): twice the uniform deviation bound."""
    return 2.0 * uniform_deviation_bound(b)


@dataclasses.dataclass(frozen=True)
class EmpiricalConstants:
    c_w: float
    c_phi: float
    c_g: float
    c_ell: float
    l_ell: float
    c_r: float

    def bound_inputs(self, n, pi_plus=0.5, delta=0.05):
        return BoundInputs(
            n=n,
            pi_plus=pi_plus,
            c_r=self.c_r,
            c_ell=self.c_ell,
            l_ell=self.l_ell,
            rademacher=rademacher_linear(self.c_w, self.c_phi, n),
            delta=delta,
        )


def empirical_constants(basis, c_w, data, loss, floor=DEFAULT_FLOOR):
    """Measure C_phi, C_g, C_ell, L_ell and C_r on a Pconf dataset.

    C_r is the smallest confidence, but never below the clamp floor.
    """
    _positive("C_w", c_w)
    Phi = basis.features(data.X)
    c_phi = float(np.max(np.linalg.norm(Phi, axis=1)))
    c_g = c_w * c_phi
    c_ell, l_ell = loss_constants(loss, c_g)
    c_r = max(float(np.min(data.r)), floor)
    return EmpiricalConstants(c_w, c_phi, c_g, c_ell, l_ell, c_r)
