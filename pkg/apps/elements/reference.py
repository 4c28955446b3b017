"""
Lagrange elements of degree k on the reference triangle.

The reference triangle has vertices (0, 0), (1, 0), (0, 1); points are
passed around in barycentric coordinates (l0, l1, l2) with reference
coordinates x = l1, y = l2. Nodes sit on the uniform lattice and are
ordered vertices first, then the k - 1 points of each local edge (from
its first to its second vertex), then interior points.
"""

from functools import lru_cache

import numpy as np

from apps.meshes.mesh import LOCAL_EDGES
from mafem.exceptions import InvalidArgumentError

BARYCENTRIC_TOL = 1e-10


def _lattice_nodes(k: int) -> tuple[np.ndarray, tuple[tuple[int, ...], ...], tuple[int, ...]]:
    nodes = [np.eye(3)[i] for i in range(3)]
    edge_nodes = []
    for a, b in LOCAL_EDGES:
        indices = []
        for m in range(1, k):
            point = np.zeros(3)
            point[a] = (k - m) / k
            point[b] = m / k
            indices.append(len(nodes))
            nodes.append(point)
        edge_nodes.append(tuple(indices))

    interior = []
    for i in range(1, k):
        for j in range(1, k - i):
            interior.append(len(nodes))
            nodes.append(np.array([(k - i - j) / k, i / k, j / k]))
    return np.array(nodes), tuple(edge_nodes), tuple(interior)


class ReferenceElement:
    """
    Nodal Lagrange basis of total degree k.

    The basis is expressed in the monomials x^p y^q (p + q <= k) through
    the inverse of the Vandermonde matrix at the lattice nodes.
    """

    def __init__(self, degree: int) -> None:
        if degree < 1:
            raise InvalidArgumentError(f"Element degree must be >= 1, got {degree}")
        self.degree = degree
        self.nodes, self.edge_nodes, self.interior_nodes = _lattice_nodes(degree)
        self.exponents = np.array(
            [(p, total - p) for total in range(degree + 1) for p in range(total, -1, -1)]
        )
        vandermonde = self._monomials(self.nodes[:, 1:])
        self._coefficients = np.linalg.solve(vandermonde, np.eye(self.num_nodes))

    def __repr__(self) -> str:
        return f"ReferenceElement(degree={self.degree})"

    @property
    def num_nodes(self) -> int:
        return (self.degree + 1) * (self.degree + 2) // 2

    def _monomials(self, xy: np.ndarray) -> np.ndarray:
        p, q = self.exponents[:, 0], self.exponents[:, 1]
        return xy[:, :1] ** p * xy[:, 1:] ** q

    def _monomial_gradients(self, xy: np.ndarray) -> np.ndarray:
        p, q = self.exponents[:, 0], self.exponents[:, 1]
        x, y = xy[:, :1], xy[:, 1:]
        dx = p * x ** np.maximum(p - 1, 0) * y**q
        dy = q * x**p * y ** np.maximum(q - 1, 0)
        return np.stack((dx, dy), axis=-1)

    def tabulate(self, points) -> tuple[np.ndarray, np.ndarray]:
        """
        Evaluate all basis functions at many barycentric points.

        Returns:
            values (npts, nnodes) and reference gradients (npts, nnodes, 2).
        """
        xy = np.asarray(points, dtype=float).reshape(-1, 3)[:, 1:]
        values = self._monomials(xy) @ self._coefficients
        grads = np.einsum("qmd,mn->qnd", self._monomial_gradients(xy), self._coefficients)
        return values, grads

    def edge_closure(self, local_edge: int) -> list[int]:
        """Local node indices along an edge, first vertex to second vertex."""
        a, b = LOCAL_EDGES[local_edge]
        return [a, *self.edge_nodes[local_edge], b]


@lru_cache(maxsize=None)
def get_reference_element(degree: int) -> ReferenceElement:
    return ReferenceElement(degree)


def eval_basis(elem: ReferenceElement, point) -> tuple[np.ndarray, np.ndarray]:
    """
    Evaluate the nodal basis at one barycentric point.

    Args:
        elem: The reference element.
        point: Barycentric coordinates (l0, l1, l2).

    Returns:
        Tuple of values (nnodes,) and reference gradients (nnodes, 2).

    Raises:
        InvalidArgumentError: If the point lies outside the triangle.
    """
    bary = np.asarray(point, dtype=float).reshape(3)
    if np.any(bary < -BARYCENTRIC_TOL) or abs(bary.sum() - 1.0) > BARYCENTRIC_TOL:
        raise InvalidArgumentError(f"Point {bary.tolist()} is not in the reference triangle")
    values, grads = elem.tabulate(bary[None, :])
    return values[0], grads[0]
