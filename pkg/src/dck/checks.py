"""Derivative verification battery.

Compares every analytic derivative the package produces (lengths, angles,
areas, curvature Jacobian, functional gradient) against the
finite-difference oracle, per surface, at the stored point and at seeded
random perturbations.  The battery is what ``dck check-derivatives`` runs
and what the acceptance tests build on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import conformal as cf
from . import metric as mt
from . import variation
from .errors import DckError
from .fd import FDConfig, fd_derivative
from .geometry import Background, triangle_angles
from .mesh import build_triangulation
from .solver import evaluate_functional
from .surface_io import Surface

LENGTH_TOLERANCE = 1e-8
ANGLE_TOLERANCE_ABS = 1e-7
ANGLE_TOLERANCE_REL = 1e-5
FUNCTIONAL_TOLERANCE = 1e-7

_FD_PLAIN = FDConfig(step=1e-5, richardson_levels=0)


@dataclass
class CategoryResult:
    """Worst-case errors of one derivative category."""

    name: str
    max_error: float = 0.0
    max_scaled_error: float = 0.0  # error / per-entry tolerance
    samples: int = 0

    @property
    def passed(self) -> bool:
        return self.samples > 0 and self.max_scaled_error <= 1.0

    def record(self, error: float, tolerance: float):
        self.samples += 1
        self.max_error = max(self.max_error, float(error))
        self.max_scaled_error = max(self.max_scaled_error, float(error) / tolerance)

    def as_dict(self) -> dict:
        return {
            "max_error": self.max_error,
            "max_scaled_error": self.max_scaled_error,
            "samples": self.samples,
            "pass": self.passed,
        }


def _entry_tolerance(value: float) -> float:
    return max(ANGLE_TOLERANCE_ABS, ANGLE_TOLERANCE_REL * abs(value))


def _g_of_partial(background: Background, d: float) -> float:
    if background is Background.EUCLIDEAN:
        return d
    if background is Background.HYPERBOLIC:
        return math.tanh(d)
    return math.tan(d)


def check_lengths(c: cf.ConformalData, result: CategoryResult):
    """FD of each edge length against the defining derivative law."""
    t = c.triangulation
    for i, j in t.oriented_edges:
        idx = t.vertex_index[i]

        def length_of(fvec, i=i, j=j):
            return cf.edge_length(c.with_f(fvec), (i, j))

        fd = fd_derivative(length_of, c.f, idx, _FD_PLAIN)
        expected = _g_of_partial(c.background, cf.partial_length(c, (i, j)))
        result.record(abs(fd - expected), LENGTH_TOLERANCE)


def check_angles(c: cf.ConformalData, result: CategoryResult,
                 dual: mt.DualityStructure | None = None):
    """FD of every corner angle against the height formulas."""
    t = c.triangulation
    if dual is None:
        dual = mt.duality_structure(cf.premetric(c))
    for fid, face in enumerate(t.faces):
        J = variation.angle_jacobian_f(c, face, dual.faces[fid])
        for mi in range(3):
            for mj, vj in enumerate(face):

                def angle_of(fvec, face=face, mi=mi):
                    return variation.face_angles(c.with_f(fvec), face)[mi]

                fd = fd_derivative(angle_of, c.f, t.vertex_index[vj], _FD_PLAIN)
                result.record(abs(fd - J[mi, mj]), _entry_tolerance(J[mi, mj]))


def check_areas(c: cf.ConformalData, result: CategoryResult,
                dual: mt.DualityStructure | None = None):
    """FD of face areas against the excess-based gradient (curved only)."""
    if c.background is Background.EUCLIDEAN:
        return
    t = c.triangulation
    if dual is None:
        dual = mt.duality_structure(cf.premetric(c))
    for fid, face in enumerate(t.faces):
        J = variation.angle_jacobian_f(c, face, dual.faces[fid])
        excess_based, _ = variation.area_gradient_f(c, face, J)
        for mk, vk in enumerate(face):

            def area_of(fvec, face=face):
                return variation.face_area(c.with_f(fvec), face)

            fd = fd_derivative(area_of, c.f, t.vertex_index[vk], _FD_PLAIN)
            result.record(abs(fd - excess_based[mk]), _entry_tolerance(excess_based[mk]))


def check_curvature_jacobian(c: cf.ConformalData, result: CategoryResult):
    """FD of K in u-coordinates against the assembled sparse Jacobian."""
    t = c.triangulation
    J = variation.curvature_jacobian_u(c).toarray()
    u0 = cf.u_from_f(c)
    for jj in range(t.num_vertices):
        for ii in range(t.num_vertices):

            def K_of(u, ii=ii):
                f = cf.f_from_u(c.background, c.alpha, u)
                return variation.vertex_curvatures(c.with_f(f))[ii]

            fd = fd_derivative(K_of, u0, jj, _FD_PLAIN)
            result.record(abs(fd - J[ii, jj]), _entry_tolerance(J[ii, jj]))


def check_functional_gradient(c: cf.ConformalData, result: CategoryResult,
                              quadrature_points: int = 64):
    """FD of the curvature functional against K itself."""
    K = variation.vertex_curvatures(c)
    u0 = cf.u_from_f(c)
    base = u0 - 0.05  # fixed nearby base point

    def F_of(u):
        return evaluate_functional(c, base, u, quadrature_points)

    for n in range(u0.size):
        fd = fd_derivative(F_of, u0, n, _FD_PLAIN)
        result.record(abs(fd - K[n]), FUNCTIONAL_TOLERANCE)


def perturbed_points(c: cf.ConformalData, rng, count: int, scale: float = 0.05):
    """Up to ``count`` random valid perturbations of the stored f."""
    points = []
    attempts = 0
    while len(points) < count and attempts < 40 * max(count, 1):
        attempts += 1
        trial = c.with_f(c.f + rng.uniform(-scale, scale, c.f.size))
        try:
            if cf.validate_conformal(trial):
                continue
            cf.premetric(trial)
        except DckError:
            continue
        points.append(trial)
    return points


def run_battery(surface: Surface, seed: int = 0, perturbations: int = 2) -> dict:
    """All categories on one surface; returns a result dict with a verdict.

    Domain errors (degenerate faces, out-of-range parameters) propagate to
    the caller: a surface that cannot be differentiated reports loudly
    rather than passing silently.
    """
    t = surface.triangulation()
    c = surface.conformal(t)
    rng = np.random.default_rng(seed)
    points = [c] + perturbed_points(c, rng, perturbations)

    categories = {
        name: CategoryResult(name)
        for name in (
            "lengths",
            "angles",
            "areas",
            "curvature_jacobian",
            "functional_gradient",
        )
    }
    for point in points:
        dual = mt.duality_structure(cf.premetric(point))
        check_lengths(point, categories["lengths"])
        check_angles(point, categories["angles"], dual)
        check_areas(point, categories["areas"], dual)
        check_curvature_jacobian(point, categories["curvature_jacobian"])
    check_functional_gradient(c, categories["functional_gradient"])

    relevant = {
        name: r for name, r in categories.items()
        if not (name == "areas" and surface.background is Background.EUCLIDEAN)
    }
    return {
        "background": surface.background.value,
        "points_checked": len(points),
        "categories": {name: r.as_dict() for name, r in relevant.items()},
        "pass": all(r.passed for r in relevant.values()),
    }


_PILLOW_FACES = ((0, 1, 2), (0, 2, 1))


def sample_conformal_faces(background: Background, count: int, seed: int = 0,
                           eta_low: float = 0.3, eta_high: float = 2.0,
                           thin: bool = False):
    """Random valid single-face structures (on the two-face pillow surface).

    ``thin`` skews one eta upward, which in the hyperbolic background tends
    to push the dual face center outside the model (spacelike, beta = -1).
    """
    t = build_triangulation(_PILLOW_FACES)
    rng = np.random.default_rng(seed)
    out = []
    attempts = 0
    while len(out) < count and attempts < 400 * max(count, 1):
        attempts += 1
        alpha = rng.uniform(-0.5, 1.5, 3)
        if thin:
            base = rng.uniform(eta_low, 0.6)
            eta = np.array(
                [rng.uniform(1.2, eta_high), base, base * rng.uniform(0.9, 1.1)]
            )
        else:
            eta = rng.uniform(eta_low, eta_high, 3)
        f = rng.uniform(-0.5, 0.5, 3)
        c = cf.ConformalData(background, t, alpha, eta, f)
        try:
            if cf.validate_conformal(c):
                continue
            cf.premetric(c)
        except DckError:
            continue
        out.append(c)
    return out
