"""Welch's unequal-variance t-test for comparing per-trial accuracies."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy import stats


class WelchResult(NamedTuple):
    t: float
    dof: float
    p_value: float
    significant: bool


def welch_t_test(a, b, alpha=0.05):
    """Two-sided Welch test of equal means.

    When both samples have zero variance the statistic is undefined; the
    p-value is then 1 for equal means and 0 otherwise, and dof is NaN.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least two values")
    ma, mb = float(np.mean(a)), float(np.mean(b))
    va = float(np.var(a, ddof=1)) / a.size
    vb = float(np.var(b, ddof=1)) / b.size
    se2 = va + vb
    if se2 == 0.0:
        if ma == mb:
            return WelchResult(0.0, math.nan, 1.0, False)
        return WelchResult(math.copysign(math.inf, ma - mb), math.nan, 0.0, True)
    t = (ma - mb) / math.sqrt(se2)
    fa, fb = va / se2, vb / se2
    dof = 1.0 / (fa**2 / (a.size - 1) + fb**2 / (b.size - 1))
    p = float(2.0 * stats.t.sf(abs(t), dof))
    return WelchResult(t, dof, p, p < alpha)
