"""Tests for the truncated bivariate power-series arithmetic."""

import numpy as np
import pytest
from scipy.special import binom

from twinbeam.errors import EvaluationError
from twinbeam.series import BivariateSeries


def _random_positive_series(rng, order1, order2, batch=()):
    """A random series with constant term bounded away from zero."""
    coeffs = rng.normal(size=(order1 + 1, order2 + 1) + batch)
    coeffs[0, 0] = rng.uniform(0.5, 2.0, size=batch)
    return BivariateSeries(coeffs)


def test_eval_matches_direct_polynomial():
    rng = np.random.default_rng(11)
    coeffs = rng.normal(size=(4, 3))
    s = BivariateSeries(coeffs)
    for x, y in rng.normal(scale=0.7, size=(5, 2)):
        direct = sum(
            coeffs[i, j] * x**i * y**j
            for i in range(4)
            for j in range(3)
        )
        assert s.eval(x, y) == pytest.approx(direct, rel=1e-13)


@pytest.mark.parametrize("alpha,beta", [(0.3, -0.4), (-0.8, 0.25), (1.5, 0.9)])
def test_rsqrt_matches_binomial_series(alpha, beta):
    """1/sqrt((1+ax)(1+by)) separates into two binomial series."""
    order = 9
    q = BivariateSeries(
        np.array([[1.0, beta], [alpha, alpha * beta]])
    )
    s = q.rsqrt(order, order)
    k = np.arange(order + 1)
    expected = np.outer(binom(-0.5, k) * alpha**k, binom(-0.5, k) * beta**k)
    np.testing.assert_allclose(s.coeffs, expected, rtol=0, atol=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_rsqrt_squared_times_input_is_one(seed):
    """The defining identity S^2 * Q = 1 holds to the truncation order.

    The draws keep the non-constant part contractive, mirroring how the
    engine always rebases its generating polynomial to the evaluation
    point; outside the convergence region the coefficients would grow
    geometrically and rounding would swamp any absolute comparison.
    """
    order = 12
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(scale=0.15, size=(3, 3))
    coeffs[0, 0] = rng.uniform(0.75, 1.5)
    q = BivariateSeries(coeffs)
    s = q.rsqrt(order, order)
    prod = s * s * q.padded(order, order)
    identity = np.zeros((order + 1, order + 1))
    identity[0, 0] = 1.0
    np.testing.assert_allclose(prod.coeffs, identity, rtol=0, atol=1e-12)


def test_rsqrt_default_orders_follow_input():
    q = BivariateSeries(np.ones((3, 5)))
    assert (q.rsqrt().order1, q.rsqrt().order2) == (2, 4)


def test_rebased_series_evaluates_identically():
    rng = np.random.default_rng(5)
    s = BivariateSeries(rng.normal(size=(4, 4)))
    moved = s.rebased(0.37, -0.61)
    assert moved.point == (0.37, -0.61)
    for x, y in rng.normal(size=(6, 2)):
        assert moved.eval(x, y) == pytest.approx(s.eval(x, y), rel=1e-12, abs=1e-12)


def test_rebase_then_rsqrt_matches_direct_value():
    """Expanding about a new point keeps the reciprocal square root exact."""
    rng = np.random.default_rng(17)
    coeffs = rng.uniform(0.1, 0.5, size=(3, 3))
    coeffs[0, 0] = 4.0
    q = BivariateSeries(coeffs)
    x0, y0 = 0.2, 0.3
    s = q.rebased(x0, y0).rsqrt(10, 10)
    assert s.eval(x0, y0) == pytest.approx(q.eval(x0, y0) ** -0.5, rel=1e-13)
    # nearby points still agree with the pointwise value
    assert s.eval(x0 + 0.05, y0 - 0.04) == pytest.approx(
        q.eval(x0 + 0.05, y0 - 0.04) ** -0.5, rel=1e-9
    )


def test_multiplication_truncates_to_operand_orders():
    a = BivariateSeries(np.array([[1.0, 1.0], [1.0, 0.0]]))
    prod = a * a
    assert (prod.order1, prod.order2) == (1, 1)
    np.testing.assert_allclose(
        prod.coeffs, np.array([[1.0, 2.0], [2.0, 2.0]])
    )


def test_padded_preserves_values():
    rng = np.random.default_rng(23)
    s = BivariateSeries(rng.normal(size=(3, 2)))
    p = s.padded(6, 5)
    assert p.coeffs.shape == (7, 6)
    np.testing.assert_array_equal(p.coeffs[:3, :2], s.coeffs)
    assert p.eval(0.4, -0.3) == pytest.approx(s.eval(0.4, -0.3), rel=1e-14)


def test_batched_rsqrt_matches_scalar_slices():
    rng = np.random.default_rng(31)
    batch = _random_positive_series(rng, 2, 2, batch=(6,))
    result = batch.rsqrt(7, 7)
    assert batch.batch_shape == (6,)
    for i in range(6):
        single = BivariateSeries(batch.coeffs[..., i]).rsqrt(7, 7)
        np.testing.assert_allclose(
            result.coeffs[..., i], single.coeffs, rtol=0, atol=1e-12
        )


@pytest.mark.parametrize("c00", [0.0, -1.0])
def test_rsqrt_requires_positive_constant_term(c00):
    coeffs = np.array([[c00, 1.0], [1.0, 0.0]])
    with pytest.raises(EvaluationError):
        BivariateSeries(coeffs).rsqrt()
