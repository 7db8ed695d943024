import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pconf.errors import DomainError, UnsupportedOperationError
from pconf.loss import TRAINABLE_LOSSES, LossKind, loss_constants, loss_grad, loss_value

L = LossKind


@pytest.mark.parametrize(
    "kind, z, expected",
    [
        (L.LOGISTIC, 0.0, math.log(2.0)),
        (L.SQUARED, 1.0, 0.0),
        (L.RAMP, -5.0, 1.0),
        (L.RAMP, 0.5, 0.5),
        (L.HINGE, 2.0, 0.0),
        (L.HINGE, -1.0, 2.0),
        (L.ZERO_ONE, 0.0, 1.0),
        (L.ZERO_ONE, 1e-12, 0.0),
        (L.ZERO_ONE, -3.0, 1.0),
    ],
)
def test_loss_value_points(kind, z, expected):
    assert loss_value(kind, z) == pytest.approx(expected, abs=1e-15)


def test_logistic_at_ten_matches_extended_precision():
    # mpmath, 50 digits: log(1 + e^-10)
    assert loss_value(L.LOGISTIC, 10.0) == pytest.approx(4.5398899216864646769e-5, rel=1e-14)


@pytest.mark.parametrize("kind, z, expected", [(L.LOGISTIC, 0.0, -0.5), (L.SQUARED, 0.0, -2.0), (L.HINGE, 1.0, 0.0)])
def test_loss_grad_points(kind, z, expected):
    assert loss_grad(kind, z) == expected


def test_ramp_kinks_use_zero_subgradient():
    assert loss_grad(L.RAMP, 0.0) == 0.0
    assert loss_grad(L.RAMP, 1.0) == 0.0
    assert loss_grad(L.RAMP, 0.5) == -1.0


def test_zero_one_has_no_gradient():
    with pytest.raises(UnsupportedOperationError):
        loss_grad(L.ZERO_ONE, 0.3)


@pytest.mark.parametrize("z", [math.nan, math.inf, -math.inf])
def test_non_finite_margin_rejected(z):
    with pytest.raises(DomainError):
        loss_value(L.LOGISTIC, z)


def test_vectorised_matches_scalar():
    z = np.linspace(-3, 3, 13)
    for kind in L:
        vec = loss_value(kind, z)
        assert vec.shape == z.shape
        np.testing.assert_array_equal(vec, [loss_value(kind, float(v)) for v in z])


finite_z = st.floats(-50, 50, allow_nan=False)
# keep clear of the kinks so central differences are meaningful
smooth_z = finite_z.filter(lambda z: min(abs(z), abs(z - 1.0)) > 1e-3)


@given(z=smooth_z, kind=st.sampled_from(TRAINABLE_LOSSES))
def test_grad_matches_central_differences(z, kind):
    h = 1e-4
    fd = (loss_value(kind, z + h) - loss_value(kind, z - h)) / (2 * h)
    assert abs(loss_grad(kind, z) - fd) <= 1e-5 * max(1.0, abs(z))


@given(z=st.floats(-700, 700, allow_nan=False), kind=st.sampled_from(list(L)))
def test_loss_non_negative(z, kind):
    assert loss_value(kind, z) >= 0.0


@given(z=finite_z)
def test_logistic_matches_stable_softplus(z):
    if z >= 0:
        ref = math.log1p(math.exp(-z))
    else:
        ref = -z + math.log1p(math.exp(z))
    assert loss_value(L.LOGISTIC, z) == pytest.approx(ref, rel=1e-12, abs=0)


def test_logistic_no_overflow_at_extremes():
    with np.errstate(over="raise"):
        assert loss_value(L.LOGISTIC, -700.0) == pytest.approx(700.0)
        assert 0.0 <= loss_value(L.LOGISTIC, 700.0) < 1e-300
        assert loss_grad(L.LOGISTIC, -700.0) == pytest.approx(-1.0)


def test_loss_constants_examples():
    assert loss_constants(L.RAMP, 0.3) == (1.0, 1.0)
    c, lip = loss_constants(L.LOGISTIC, 1.0)
    # mpmath: log(1 + e)
    assert c == pytest.approx(1.3132616875182228, rel=1e-14)
    assert lip == 1.0
    assert loss_constants(L.SQUARED, 2.0) == (9.0, 6.0)
    assert loss_constants(L.HINGE, 2.0) == (3.0, 1.0)


@pytest.mark.parametrize("c_g", [0.0, -1.0])
def test_loss_constants_domain(c_g):
    with pytest.raises(DomainError):
        loss_constants(L.LOGISTIC, c_g)


@settings(max_examples=30)
@given(c_g=st.floats(0.01, 20), kind=st.sampled_from(TRAINABLE_LOSSES))
def test_loss_constants_bound_grid_scan(c_g, kind):
    c_ell, l_ell = loss_constants(kind, c_g)
    z = np.arange(-c_g, c_g, 1e-3)
    v = loss_value(kind, z)
    assert v.max() <= c_ell + 1e-12
    slopes = np.abs(np.diff(v) / np.diff(z))
    assert slopes.max() <= l_ell + 1e-9
