"""
Newton's method for the coupled mixed system.

Unknowns are all Sigma_h dofs and the interior V_h dofs. Each step
solves the saddle system

    [ M      B_int ] [ d_sigma ]     [ M sigma + B u            ]
    [ C(sigma)  0  ] [ d_u     ] = - [ (det sigma - f, v)_v     ]

with C(sigma) the cofactor linearization of the determinant.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from django.conf import settings

from apps.assembly.nonlinear import (
    assemble_determinant,
    assemble_jacobian_block,
    check_convexity,
)
from apps.assembly.operators import MixedOperator, load_from_samples, sample_at_quadrature
from apps.assembly.sparse import SparseMatrix
from apps.spaces.spaces import FieldVector
from mafem.exceptions import DivergenceError, FactorizationError, InvalidArgumentError

from .initial import initial_guess
from .linear import FactorizedMatrix

logger = logging.getLogger(__name__)

DAMPING_STRATEGIES = ("linesearch", "full")
DIVERGENCE_STREAK = 4
CSV_HEADER = ("iter", "residual", "min_lambda1", "damping_halvings")


@dataclass(frozen=True)
class NewtonConfig:
    """
    Newton iteration controls.

    Attributes:
        tolerance: Absolute bound on the Euclidean norm of the combined
            residual; None means 1e-10 times the square root of the
            number of unknowns.
        max_iterations: Iteration cap.
        damping: "linesearch" (halve until the residual decreases) or "full".
        max_halvings: Cap on halvings per step.
        initialization: Strategy passed to initial_guess.
    """

    tolerance: float | None = None
    max_iterations: int = 50
    damping: str = "linesearch"
    max_halvings: int = 8
    initialization: str = "poisson"

    def __post_init__(self) -> None:
        if self.tolerance is not None and not self.tolerance > 0:
            raise InvalidArgumentError(f"Newton tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise InvalidArgumentError(f"Need at least one Newton iteration, got {self.max_iterations}")
        if self.damping not in DAMPING_STRATEGIES:
            raise InvalidArgumentError(f"Unknown damping {self.damping!r}")
        if self.max_halvings < 0:
            raise InvalidArgumentError("Halving cap must be nonnegative")

    @classmethod
    def from_settings(cls, **overrides) -> "NewtonConfig":
        """Defaults from django settings; None overrides are ignored."""
        config = cls(
            tolerance=getattr(settings, "MA_NEWTON_TOL", None),
            max_iterations=getattr(settings, "MA_NEWTON_MAX_ITER", 50),
            damping=getattr(settings, "MA_NEWTON_DAMPING", "linesearch"),
            max_halvings=getattr(settings, "MA_NEWTON_MAX_HALVINGS", 8),
            initialization=getattr(settings, "MA_INITIALIZATION", "poisson"),
        )
        return replace(config, **{k: v for k, v in overrides.items() if v is not None})

    def tolerance_for(self, unknowns: int) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return 1e-10 * math.sqrt(unknowns)


@dataclass
class NewtonReport:
    """History of one Newton solve; entry i of each list describes iterate i."""

    residuals: list[float] = field(default_factory=list)
    min_lambda1: list[float] = field(default_factory=list)
    halvings: list[int] = field(default_factory=list)
    converged: bool = False
    u: FieldVector | None = None
    sigma: FieldVector | None = None
    tolerance: float = 0.0

    @property
    def iterations(self) -> int:
        return max(len(self.residuals) - 1, 0)

    @property
    def final_residual(self) -> float:
        return self.residuals[-1] if self.residuals else math.nan

    def record(self, u: FieldVector, sigma: FieldVector, residual: float, min_lambda1: float, halvings: int) -> None:
        self.u, self.sigma = u, sigma
        self.residuals.append(residual)
        self.min_lambda1.append(min_lambda1)
        self.halvings.append(halvings)

    def rows(self) -> list[tuple[int, float, float, int]]:
        return list(zip(range(len(self.residuals)), self.residuals, self.min_lambda1, self.halvings))

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for it, residual, lam, halvings in self.rows():
            writer.writerow((it, repr(residual), repr(lam), halvings))
        return buffer.getvalue()


class _MixedSystem:
    """Residual and Jacobian of the coupled system on one operator."""

    def __init__(self, op: MixedOperator, f) -> None:
        self.op = op
        self.interior = op.vspace.interior_dofs
        self.nsigma = op.mspace.ndof
        self.load = load_from_samples(op.vspace, sample_at_quadrature(op.vspace, f, op.quad), op.quad)[
            self.interior
        ]

    @property
    def unknowns(self) -> int:
        return self.nsigma + self.interior.size

    def residual(self, u: FieldVector, sigma: FieldVector) -> np.ndarray:
        op = self.op
        r1 = op.hessian_defect(u, sigma)
        r2 = assemble_determinant(op.vspace, sigma, op.quad)[self.interior] - self.load
        return np.concatenate((r1, r2))

    def jacobian(self, sigma: FieldVector) -> SparseMatrix:
        op = self.op
        cof = assemble_jacobian_block(op.vspace, op.mspace, sigma, op.quad)
        block = sp.bmat([[op.mass.matrix, op.b_int.matrix], [cof.matrix, None]], format="csr")
        return SparseMatrix(block)

    def update(self, u: FieldVector, sigma: FieldVector, step: np.ndarray, alpha: float):
        new_sigma = FieldVector(sigma.space, sigma.values + alpha * step[: self.nsigma])
        new_u = u.copy()
        new_u.values[self.interior] += alpha * step[self.nsigma :]
        return new_u, new_sigma


def newton_solve(
    op: MixedOperator,
    problem,
    config: NewtonConfig | None = None,
    u0: FieldVector | None = None,
    sigma0: FieldVector | None = None,
) -> NewtonReport:
    """
    Solve the mixed system starting from (u0, sigma0).

    Without a starting pair the config's initialization strategy builds
    one. u0 must already carry the boundary values. The returned report has
    converged set exactly when the final residual is within tolerance.

    Raises:
        FactorizationError: If a Jacobian is singular; err.report holds
            the history up to the last iterate.
        DivergenceError: If the residual grows on four consecutive steps
            or stops being finite.
    """
    config = config or NewtonConfig.from_settings()
    if u0 is None or sigma0 is None:
        u0, sigma0 = initial_guess(problem, op, config.initialization)
    system = _MixedSystem(op, problem.f)
    tol = config.tolerance_for(system.unknowns)
    report = NewtonReport(tolerance=tol)

    def monitor(sigma):
        return check_convexity(op.mspace, sigma, op.quad).min_lambda1

    u, sigma = u0, sigma0
    residual = system.residual(u, sigma)
    norm = float(np.linalg.norm(residual))
    report.record(u, sigma, norm, monitor(sigma), 0)
    logger.info("Newton %s: start residual %.3e (tol %.1e)", problem.label, norm, tol)

    growth = 0
    while norm > tol and report.iterations < config.max_iterations:
        try:
            step = FactorizedMatrix(system.jacobian(sigma)).solve(-residual)
        except FactorizationError as e:
            e.report = report
            raise

        alpha, halvings = 1.0, 0
        while True:
            trial_u, trial_sigma = system.update(u, sigma, step, alpha)
            trial_residual = system.residual(trial_u, trial_sigma)
            trial_norm = float(np.linalg.norm(trial_residual))
            if config.damping == "full" or trial_norm < norm or halvings >= config.max_halvings:
                break
            alpha *= 0.5
            halvings += 1

        if not math.isfinite(trial_norm):
            raise DivergenceError(f"Newton residual became {trial_norm} at iteration {report.iterations + 1}", report=report)

        growth = growth + 1 if trial_norm > norm else 0
        u, sigma, residual, norm = trial_u, trial_sigma, trial_residual, trial_norm
        report.record(u, sigma, norm, monitor(sigma), halvings)
        logger.info(
            "Newton %s: iteration %d residual %.3e min lambda1 %.3g halvings %d",
            problem.label,
            report.iterations,
            norm,
            report.min_lambda1[-1],
            halvings,
        )
        if growth >= DIVERGENCE_STREAK:
            raise DivergenceError(
                f"Newton residual grew on {growth} consecutive steps (now {norm:.3e})", report=report
            )

    report.converged = norm <= tol
    if report.converged:
        logger.info("Newton %s converged in %d iterations", problem.label, report.iterations)
    else:
        logger.warning("Newton %s stopped after %d iterations at residual %.3e", problem.label, report.iterations, norm)
    return report
