"""
Quadrature on the reference triangle and on the unit interval.

Low orders use the symmetric Dunavant tables; higher orders use the
collapsed (conical product) Gauss rule, which keeps all weights
positive and all points strictly inside the triangle.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from mafem.exceptions import InvalidArgumentError, UnsupportedDegreeError

MAX_EXACTNESS = 24

# (x, y) reference points and weights normalized to sum 1
_CENTROID = ([(1 / 3, 1 / 3)], [1.0])
_DUNAVANT2 = ([(2 / 3, 1 / 6), (1 / 6, 2 / 3), (1 / 6, 1 / 6)], [1 / 3, 1 / 3, 1 / 3])
_DUNAVANT4 = (
    [
        (0.108103018168070, 0.445948490915965),
        (0.445948490915965, 0.108103018168070),
        (0.445948490915965, 0.445948490915965),
        (0.091576213509771, 0.816847572980459),
        (0.816847572980459, 0.091576213509771),
        (0.091576213509771, 0.091576213509771),
    ],
    [0.223381589678011] * 3 + [0.109951743655322] * 3,
)
_DUNAVANT5 = (
    [
        (1 / 3, 1 / 3),
        (0.059715871789770, 0.470142064105115),
        (0.470142064105115, 0.059715871789770),
        (0.470142064105115, 0.470142064105115),
        (0.101286507323456, 0.797426985353087),
        (0.797426985353087, 0.101286507323456),
        (0.101286507323456, 0.101286507323456),
    ],
    [0.225] + [0.132394152788506] * 3 + [0.125939180544827] * 3,
)

_TABLES = {1: _CENTROID, 2: _DUNAVANT2, 4: _DUNAVANT4, 5: _DUNAVANT5}


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """
    Quadrature on the reference triangle; weights sum to its area 1/2.

    Rules compare and hash by identity so spaces can cache tabulations.
    """

    points: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    @property
    def num_points(self) -> int:
        return self.weights.shape[0]

    def integrate(self, func) -> float:
        """Integrate func(x, y) over the reference triangle."""
        x, y = self.points[:, 1], self.points[:, 2]
        return float(np.dot(self.weights, func(x, y)))


def _from_reference(xy, weights, exactness: int) -> QuadratureRule:
    xy = np.asarray(xy, dtype=float)
    bary = np.column_stack((1.0 - xy[:, 0] - xy[:, 1], xy[:, 0], xy[:, 1]))
    bary.setflags(write=False)
    w = 0.5 * np.asarray(weights, dtype=float)
    w.setflags(write=False)
    return QuadratureRule(points=bary, weights=w, exactness_degree=exactness)


def _collapsed_gauss(n: int) -> QuadratureRule:
    s, ws = leggauss(n)
    s, ws = 0.5 * (s + 1.0), 0.5 * ws
    # Gauss-Jacobi absorbs the (1 - t) Jacobian of the collapse
    t, wt = roots_jacobi(n, 1.0, 0.0)
    t, wt = 0.5 * (t + 1.0), 0.25 * wt
    ss, tt = np.meshgrid(s, t, indexing="ij")
    xy = np.column_stack(((ss * (1.0 - tt)).ravel(), tt.ravel()))
    weights = 2.0 * np.outer(ws, wt).ravel()
    return _from_reference(xy, weights, 2 * n - 1)


@lru_cache(maxsize=None)
def make_quadrature(min_exactness: int) -> QuadratureRule:
    """
    Return a triangle rule integrating all polynomials of the given degree.

    Raises:
        InvalidArgumentError: If min_exactness < 1.
        UnsupportedDegreeError: If min_exactness exceeds MAX_EXACTNESS.
    """
    if min_exactness < 1:
        raise InvalidArgumentError(f"Exactness must be >= 1, got {min_exactness}")
    if min_exactness > MAX_EXACTNESS:
        raise UnsupportedDegreeError(
            f"No triangle rule of exactness {min_exactness} (maximum {MAX_EXACTNESS})"
        )
    for degree in sorted(_TABLES):
        if degree >= min_exactness:
            xy, weights = _TABLES[degree]
            return _from_reference(xy, weights, degree)
    return _collapsed_gauss(math.ceil((min_exactness + 1) / 2))


@lru_cache(maxsize=None)
def make_interval_quadrature(min_exactness: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre points and weights on [0, 1] (weights sum to 1)."""
    n = max(1, math.ceil((min_exactness + 1) / 2))
    s, w = leggauss(n)
    return 0.5 * (s + 1.0), 0.5 * w


def reference_monomial_integral(a: int, b: int) -> float:
    """Exact integral of x^a y^b over the reference triangle."""
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)
