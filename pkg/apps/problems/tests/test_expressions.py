"""Tests for symbolic expressions and problem files."""

import numpy as np
import pytest

from apps.problems.expressions import Expression, load_problem_file, parse_problem
from mafem.exceptions import InvalidArgumentError

PARABOLOID = """
# paraboloid with unit data
label  = paraboloid
domain = 0 0, 2 0, 2 1, 0 1
f      = 1
g      = (x^2 + y^2) / 2
u      = (x^2 + y^2) / 2
"""


@pytest.mark.parametrize(
    "source, expected",
    [
        ("1 + 2 * 3", 7.0),
        ("2^3", 8.0),
        ("2**3", 8.0),
        ("-x + y", 1.0),
        ("max(x, y) - min(x, y)", 1.0),
        ("abs(x - y)", 1.0),
        ("sqrt(4) * exp(0)", 2.0),
        ("pi - pi + e - e", 0.0),
    ],
)
def test_evaluation(source, expected):
    assert Expression(source)(np.array(1.0), np.array(2.0)) == pytest.approx(expected)


def test_broadcasts_constants():
    value = Expression("3")(np.zeros((2, 4)), np.zeros((2, 4)))
    assert value.shape == (2, 4)


def test_min_against_a_constant():
    x = np.array([0.5, 2.0, 3.0])
    np.testing.assert_allclose(Expression("min(x^2, 4)")(x, np.zeros(3)), [0.25, 4.0, 4.0])


@pytest.mark.parametrize(
    "source",
    ["", "x +", "z", "__import__('os')", "x.is_real", "sin(x)", "exp", "'a'", "[x]"],
)
def test_rejected(source):
    with pytest.raises(InvalidArgumentError):
        Expression(source)


def test_parse_problem():
    spec = parse_problem(PARABOLOID)
    assert spec.label == "paraboloid"
    assert spec.rectangle == (0.0, 0.0, 2.0, 1.0)
    x, y = np.array([0.5, 1.5]), np.array([0.25, 0.75])
    np.testing.assert_allclose(spec.exact_u(x, y), 0.5 * (x**2 + y**2))
    ux, uy = spec.exact_gradient(x, y)
    np.testing.assert_allclose(ux, x)
    np.testing.assert_allclose(uy, y)
    (hxx, hxy), (_, hyy) = spec.exact_hessian(x, y)
    np.testing.assert_allclose([hxx, hxy, hyy], [[1, 1], [0, 0], [1, 1]])


def test_derivatives_are_symbolic():
    spec = parse_problem("domain = 0 0, 1 0, 0 1\nf = 1\ng = 0\nu = x^3 + x*y + exp(y)\n")
    x, y = np.array([0.5, 0.1]), np.array([0.25, 0.6])
    ux, uy = spec.exact_gradient(x, y)
    np.testing.assert_allclose(ux, 3 * x**2 + y, rtol=1e-14)
    np.testing.assert_allclose(uy, x + np.exp(y), rtol=1e-14)
    (hxx, hxy), (hyx, hyy) = spec.exact_hessian(x, y)
    np.testing.assert_allclose(hxx, 6 * x, rtol=1e-14)
    np.testing.assert_allclose(hxy, 1.0)
    np.testing.assert_allclose(hyx, 1.0)
    np.testing.assert_allclose(hyy, np.exp(y), rtol=1e-14)


def test_derivative_keys_are_not_accepted():
    with pytest.raises(InvalidArgumentError, match="Line 5"):
        parse_problem("domain = 0 0, 1 0, 0 1\nf = 1\ng = 0\nu = x^2\nux = 2*x\n")


def test_no_exact_solution_means_no_derivatives():
    spec = parse_problem("domain = 0 0, 1 0, 0 1\nf = 1\ng = x + y\n")
    assert spec.exact_u is None
    assert spec.exact_gradient is None
    assert spec.exact_hessian is None


def test_missing_and_unknown_keys():
    with pytest.raises(InvalidArgumentError, match="domain"):
        parse_problem("f = 1\ng = 0\n")
    with pytest.raises(InvalidArgumentError):
        parse_problem("domain = 0 0, 1 0, 0 1\nf = 1\ng = 0\nh = 2\n")
    with pytest.raises(InvalidArgumentError):
        parse_problem("domain = 0 0, 1 0\nf = 1\ng = 0\n")


def test_load_problem_file(tmp_path):
    path = tmp_path / "bowl.txt"
    path.write_text("domain = 0 0, 1 0, 1 1, 0 1\nf = 4\ng = x^2 + y^2\n")
    spec = load_problem_file(path)
    assert spec.label == "bowl"
    assert not spec.has_exact_solution
    with pytest.raises(InvalidArgumentError):
        load_problem_file(tmp_path / "missing.txt")
