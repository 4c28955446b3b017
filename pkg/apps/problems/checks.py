"""Sampling bounds of the right-hand side."""

import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from scipy.stats import qmc

from .catalog import ProblemSpec

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 4096


@dataclass(frozen=True)
class BoundsReport:
    """Observed bounds of f and the flags raised by them."""

    inf_f: float
    sup_f: float
    nonpositive: bool
    degenerate: bool
    unbounded: bool

    @property
    def flagged(self) -> bool:
        return self.nonpositive or self.degenerate or self.unbounded


def _inside_convex(polygon: np.ndarray, points: np.ndarray) -> np.ndarray:
    edges = np.roll(polygon, -1, axis=0) - polygon
    rel = points[:, None, :] - polygon[None, :, :]
    cross = edges[None, :, 0] * rel[..., 1] - edges[None, :, 1] * rel[..., 0]
    return np.all(cross >= 0.0, axis=1)


def sample_points(spec: ProblemSpec, count: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Polygon vertices plus unscrambled Halton points inside the domain."""
    lower = spec.domain.min(axis=0)
    upper = spec.domain.max(axis=0)
    unit = qmc.Halton(d=2, scramble=False).random(count)
    points = qmc.scale(unit, lower, upper) if np.all(upper > lower) else unit
    points = points[_inside_convex(spec.domain, points)]
    return np.vstack((spec.domain, points))


def bounds_check(spec: ProblemSpec, samples: int = DEFAULT_SAMPLES, ratio: float | None = None) -> BoundsReport:
    """
    Deterministic estimate of inf f and sup f over the domain.

    Args:
        spec: The problem.
        samples: Number of quasi-random candidates drawn in the bounding box.
        ratio: inf f <= ratio * sup f counts as degenerate; defaults to
            settings.MA_DEGENERACY_RATIO.

    Returns:
        BoundsReport. NaN samples are ignored.
    """
    if ratio is None:
        ratio = getattr(settings, "MA_DEGENERACY_RATIO", 1e-2)
    points = sample_points(spec, samples)
    with np.errstate(all="ignore"):
        values = np.broadcast_to(
            np.asarray(spec.f(points[:, 0], points[:, 1]), dtype=float), points.shape[:1]
        )
    if np.isnan(values).any():
        logger.warning("f of %s is NaN at %d sample points", spec.label, int(np.isnan(values).sum()))

    inf_f = float(np.nanmin(values))
    sup_f = float(np.nanmax(values))
    unbounded = bool(np.isposinf(sup_f))
    report = BoundsReport(
        inf_f=inf_f,
        sup_f=sup_f,
        nonpositive=inf_f <= 0.0,
        degenerate=not unbounded and inf_f <= ratio * sup_f,
        unbounded=unbounded,
    )
    if report.flagged:
        logger.warning(
            "Data of %s violates 0 < c0 <= f <= c1: inf f = %.3g, sup f = %.3g",
            spec.label,
            inf_f,
            sup_f,
        )
    return report
