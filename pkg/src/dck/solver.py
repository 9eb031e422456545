"""Curvature functional and Newton solver for prescribed curvature.

In the transformed coordinates u the curvature map is the gradient of

    F(u) = 2*pi*sum(u) - sum over faces of the line integral of
           (gamma_0 du_0 + gamma_1 du_1 + gamma_2 du_2)

from a fixed base point.  The integrand form is closed, so F is well
defined; dF/du_i = K_i.  Prescribed-curvature solving runs Newton on
K(u) = K* with the analytic Jacobian dK/du, a backtracking line search on
the residual norm, and step halving whenever a trial point leaves the
valid conformal domain.  The Euclidean Jacobian annihilates constants
(scale invariance), so Euclidean steps are solved in the sum-zero gauge.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import conformal as cf
from . import variation
from .errors import (
    DckError,
    InfeasibleTarget,
    IterationLimit,
    LineSearchFailed,
    PathLeavesDomain,
    SingularHessian,
)
from .geometry import Background
from .mesh import euler_characteristic

GAUSS_BONNET_TOL = 1e-8


@dataclass(frozen=True)
class SolverConfig:
    """Newton solver settings for a prescribed-curvature run."""

    target_K: np.ndarray | None = None  # per vertex index; None means zero
    max_iterations: int = 50
    grad_tolerance: float = 1e-10       # on max |K - K*|
    line_search_shrink: float = 0.5
    line_search_decrease: float = 1e-4  # sufficient-decrease coefficient
    domain_backtrack_limit: int = 60
    gauge: str = "sum"                  # Euclidean scale fixing: project onto sum(u) = const
    quadrature_points: int = 64         # Gauss-Legendre nodes for F reporting
    record_functional: bool = True
    trust_radius: float = 1.0           # spherical max-norm step clip


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    residual_norm: float
    step_length: float
    functional: float | None
    domain_backtracks: int


@dataclass(frozen=True)
class SolveTrace:
    """Per-iteration diagnostics of a Newton run."""

    status: str = "pending"
    iterations: tuple = field(default_factory=tuple)
    warnings: tuple = field(default_factory=tuple)

    @property
    def num_iterations(self):
        # The 0th record is the initial residual, before any step.
        return max(0, len(self.iterations) - 1)


def feasible_target_sum(background: Background, chi: int, total: float,
                        tolerance: float = GAUSS_BONNET_TOL):
    """Check sum(K*) against the total-curvature identity; raise if violated.

    Euclidean surfaces need sum(K*) = 2*pi*chi exactly; curved backgrounds
    shift that by the (positive) total area, so hyperbolic targets must sum
    above 2*pi*chi and spherical ones below.
    """
    bound = 2.0 * math.pi * chi
    if background is Background.EUCLIDEAN:
        if abs(total - bound) > tolerance:
            raise InfeasibleTarget(
                f"sum(target K) = {total!r} must equal 2*pi*chi = {bound!r}"
            )
    elif background is Background.HYPERBOLIC:
        if not total > bound:
            raise InfeasibleTarget(
                f"sum(target K) = {total!r} must exceed 2*pi*chi = {bound!r}"
            )
    else:
        if not total < bound:
            raise InfeasibleTarget(
                f"sum(target K) = {total!r} must be below 2*pi*chi = {bound!r}"
            )


def _gauss_legendre(n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    # shift from [-1, 1] to [0, 1]
    return 0.5 * (nodes + 1.0), 0.5 * weights


def evaluate_functional(c: cf.ConformalData, u_base, u=None,
                        quadrature_points: int = 64) -> float:
    """F at ``u`` (default: the structure's current point) from base ``u_base``.

    The integral runs along the straight segment in u-space; each
    quadrature node must yield a valid structure, otherwise
    :class:`~dck.errors.PathLeavesDomain` reports the first bad parameter.
    Closedness of the integrand makes the value path independent; tests
    verify this rather than the runtime assuming it.
    """
    u_base = np.asarray(u_base, dtype=float)
    if u is None:
        u = cf.u_from_f(c)
    u = np.asarray(u, dtype=float)
    delta = u - u_base

    nodes, weights = _gauss_legendre(quadrature_points)
    integral = 0.0
    for s, w in zip(nodes, weights):
        us = u_base + s * delta
        try:
            fs = cf.f_from_u(c.background, c.alpha, us)
            cs = c.with_f(fs)
            bad = cf.validate_conformal(cs)
            if bad:
                raise PathLeavesDomain(
                    f"invalid face {bad[0][0]} at path parameter {s!r}: {bad[0][1]}",
                    parameter=float(s),
                )
            K = variation.vertex_curvatures(cs)
        except PathLeavesDomain:
            raise
        except DckError as exc:
            raise PathLeavesDomain(
                f"invalid structure at path parameter {s!r}: {exc}",
                parameter=float(s),
            ) from exc
        # sum over faces of sum(gamma_m * delta_u_m) == sum over vertices
        # of delta_u_v * (2*pi - K_v)
        integral += w * float(np.dot(delta, 2.0 * np.pi - K))
    return float(2.0 * np.pi * np.sum(u) - integral)


def _solve_step(background: Background, J: np.ndarray, residual: np.ndarray,
                gauge: str):
    n = J.shape[0]
    if background is Background.EUCLIDEAN and gauge == "sum":
        # Constants span the kernel; bordering with the all-ones row picks
        # the unique sum-zero solution.
        bordered = np.zeros((n + 1, n + 1))
        bordered[:n, :n] = J
        bordered[:n, n] = 1.0
        bordered[n, :n] = 1.0
        rhs = np.concatenate([-residual, [0.0]])
        try:
            sol = np.linalg.solve(bordered, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularHessian(f"gauge-fixed Newton system singular: {exc}") from exc
        return sol[:n]
    if background is Background.HYPERBOLIC:
        try:
            L = np.linalg.cholesky(J)
        except np.linalg.LinAlgError:
            shift = 1e-12 * max(1.0, float(np.abs(np.diag(J)).max()))
            try:
                L = np.linalg.cholesky(J + shift * np.eye(n))
            except np.linalg.LinAlgError as exc:
                raise SingularHessian(
                    "curvature Jacobian not positive definite within a 1e-12 shift"
                ) from exc
        y = np.linalg.solve(L, -residual)
        return np.linalg.solve(L.T, y)
    try:
        return np.linalg.solve(J, -residual)
    except np.linalg.LinAlgError as exc:
        raise SingularHessian(f"curvature Jacobian singular: {exc}") from exc


def _valid_point(c: cf.ConformalData, u):
    """Structure at u, or None when u leaves the admissible domain."""
    try:
        f = cf.f_from_u(c.background, c.alpha, u)
        cand = c.with_f(f)
        if cf.validate_conformal(cand):
            return None
        cf.premetric(cand)  # partial lengths must exist as well
    except DckError:
        return None
    return cand


def newton_prescribed_curvature(c: cf.ConformalData, cfg: SolverConfig):
    """Solve K(u) = K*; returns the solved structure and a trace.

    Raises :class:`InfeasibleTarget` before iterating when the target sum
    violates the total-curvature identity, :class:`SingularHessian` when a
    Newton system cannot be solved, and :class:`IterationLimit` /
    :class:`LineSearchFailed` when the budget runs out.
    """
    t = c.triangulation
    n = t.num_vertices
    target = (
        np.zeros(n) if cfg.target_K is None else np.asarray(cfg.target_K, dtype=float)
    )
    if target.shape != (n,):
        raise ValueError(f"target_K must have shape ({n},)")
    feasible_target_sum(c.background, euler_characteristic(t), float(target.sum()))

    notes = []
    if c.background is Background.SPHERICAL:
        message = (
            "no convexity guarantee for spherical backgrounds; "
            "Newton runs best-effort with a trust region"
        )
        warnings.warn(message, stacklevel=2)
        notes.append("NoConvexityGuarantee: " + message)

    u = cf.u_from_f(c)
    u_base = u.copy()
    current = c
    records = []

    def functional_at(point, u_now):
        if not cfg.record_functional:
            return None
        try:
            return evaluate_functional(
                point, u_base, u_now, quadrature_points=cfg.quadrature_points
            )
        except DckError:
            return None

    residual = variation.vertex_curvatures(current) - target
    res_norm = float(np.abs(residual).max())
    records.append(
        IterationRecord(0, res_norm, 0.0, functional_at(current, u), 0)
    )

    for it in range(1, cfg.max_iterations + 1):
        if res_norm <= cfg.grad_tolerance:
            break
        J = variation.curvature_jacobian_u(current).toarray()
        delta = _solve_step(c.background, J, residual, cfg.gauge)
        if c.background is Background.SPHERICAL:
            clip = float(np.abs(delta).max())
            if clip > cfg.trust_radius:
                delta = delta * (cfg.trust_radius / clip)

        step = 1.0
        backtracks = 0
        accepted = None
        while True:
            trial_u = u + step * delta
            cand = _valid_point(current, trial_u)
            if cand is None:
                backtracks += 1
                if backtracks > cfg.domain_backtrack_limit:
                    trace = SolveTrace("line_search_failed", tuple(records), tuple(notes))
                    raise LineSearchFailed(
                        f"no admissible step after {backtracks} halvings at iteration {it}",
                        trace=trace,
                    )
                step *= cfg.line_search_shrink
                continue
            trial_residual = variation.vertex_curvatures(cand) - target
            trial_norm = float(np.abs(trial_residual).max())
            if trial_norm <= (1.0 - cfg.line_search_decrease * step) * res_norm:
                accepted = (trial_u, cand, trial_residual, trial_norm)
                break
            backtracks += 1
            if backtracks > cfg.domain_backtrack_limit:
                trace = SolveTrace("line_search_failed", tuple(records), tuple(notes))
                raise LineSearchFailed(
                    f"no sufficient decrease after {backtracks} halvings at iteration {it}",
                    trace=trace,
                )
            step *= cfg.line_search_shrink

        u, current, residual, res_norm = accepted
        records.append(
            IterationRecord(it, res_norm, step, functional_at(current, u), backtracks)
        )

    if res_norm > cfg.grad_tolerance:
        trace = SolveTrace("iteration_limit", tuple(records), tuple(notes))
        raise IterationLimit(
            f"residual {res_norm!r} above tolerance {cfg.grad_tolerance!r} "
            f"after {cfg.max_iterations} iterations",
            trace=trace,
        )
    trace = SolveTrace("converged", tuple(records), tuple(notes))
    return current, trace


def gauge_fixed(u):
    """Remove the scale gauge: shift to mean zero (Euclidean reporting)."""
    u = np.asarray(u, dtype=float)
    return u - u.mean()
