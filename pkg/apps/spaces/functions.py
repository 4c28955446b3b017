"""
Evaluation of user-supplied functions at many points.

Functions take coordinate arrays (x, y) and return values broadcastable
to their shape; matrix functions return a nested 2 x 2 sequence of such
values. Any non-finite value is reported with the point that caused it.
"""

import numpy as np

from mafem.exceptions import EvaluationError


def _first_bad_point(bad: np.ndarray, x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    idx = np.unravel_index(np.flatnonzero(bad)[0], bad.shape)
    return float(x[idx]), float(y[idx])


def evaluate_scalar(func, x, y, name: str = "function") -> np.ndarray:
    """Evaluate func(x, y) and check that every value is finite."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(all="ignore"):
        values = np.broadcast_to(np.asarray(func(x, y), dtype=float), x.shape).copy()
    bad = ~np.isfinite(values)
    if bad.any():
        point = _first_bad_point(bad, x, y)
        raise EvaluationError(f"{name} is not finite at {point}", point=point)
    return values


def evaluate_matrix(func, x, y, name: str = "matrix function") -> np.ndarray:
    """
    Evaluate a symmetric matrix function.

    Returns:
        Array of shape x.shape + (3,) holding the (xx, xy, yy) components.
        The off-diagonal is the mean of the two returned entries.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(all="ignore"):
        raw = func(x, y)
        entries = [
            [np.broadcast_to(np.asarray(raw[i][j], dtype=float), x.shape) for j in range(2)]
            for i in range(2)
        ]
    components = np.stack(
        (entries[0][0], 0.5 * (entries[0][1] + entries[1][0]), entries[1][1]), axis=-1
    )
    bad = ~np.all(np.isfinite(components), axis=-1)
    if bad.any():
        point = _first_bad_point(bad, x, y)
        raise EvaluationError(f"{name} is not finite at {point}", point=point)
    return components


def evaluate_vector(func, x, y, name: str = "vector function") -> np.ndarray:
    """Evaluate a function returning a pair; result has shape x.shape + (2,)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(all="ignore"):
        pair = [np.broadcast_to(np.asarray(c, dtype=float), x.shape) for c in func(x, y)]
    components = np.stack(pair, axis=-1)
    bad = ~np.all(np.isfinite(components), axis=-1)
    if bad.any():
        point = _first_bad_point(bad, x, y)
        raise EvaluationError(f"{name} is not finite at {point}", point=point)
    return components
