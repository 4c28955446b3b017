"""Tests for triangle and interval quadrature."""

import numpy as np
import pytest

from apps.elements.quadrature import (
    MAX_EXACTNESS,
    make_interval_quadrature,
    make_quadrature,
    reference_monomial_integral,
)
from mafem.exceptions import InvalidArgumentError, UnsupportedDegreeError


@pytest.mark.parametrize("degree", range(1, MAX_EXACTNESS + 1))
def test_rule_properties(degree):
    rule = make_quadrature(degree)
    assert rule.exactness_degree >= degree
    assert rule.weights.sum() == pytest.approx(0.5, abs=1e-14)
    assert np.all(rule.weights > 0)
    assert np.all(rule.points > 0)
    np.testing.assert_allclose(rule.points.sum(axis=1), 1.0, atol=1e-14)


@pytest.mark.parametrize("degree", range(1, MAX_EXACTNESS + 1))
def test_monomial_exactness(degree):
    rule = make_quadrature(degree)
    for total in range(rule.exactness_degree + 1):
        for a in range(total + 1):
            b = total - a
            exact = reference_monomial_integral(a, b)
            approx = rule.integrate(lambda x, y: x**a * y**b)
            assert approx == pytest.approx(exact, rel=1e-12)


def test_centroid_rule():
    rule = make_quadrature(1)
    assert rule.num_points == 1
    np.testing.assert_allclose(rule.points[0], [1 / 3, 1 / 3, 1 / 3])
    assert rule.weights[0] == pytest.approx(0.5)


@pytest.mark.parametrize("degree", [2, 4, 6, 9])
def test_xy_integral(degree):
    assert make_quadrature(degree).integrate(lambda x, y: x * y) == pytest.approx(1 / 24, rel=1e-12)


def test_rules_are_cached():
    assert make_quadrature(6) is make_quadrature(6)


def test_unsupported_degree():
    with pytest.raises(UnsupportedDegreeError):
        make_quadrature(MAX_EXACTNESS + 1)
    with pytest.raises(InvalidArgumentError):
        make_quadrature(0)


@pytest.mark.parametrize("degree", [1, 3, 4, 7])
def test_interval_rule(degree):
    points, weights = make_interval_quadrature(degree)
    for p in range(degree + 1):
        assert weights @ points**p == pytest.approx(1 / (p + 1), rel=1e-13)
