"""Partial edge lengths and the dual structure they induce.

A pre-metric assigns a signed partial length ``d[i,j]`` to every oriented
edge, splitting each edge length as ``l[i,j] = d[i,j] + d[j,i]``.  A
pre-metric is a *metric* when every face satisfies the background's
compatibility identity; exactly then the three perpendiculars through the
edge centers of each face meet in one point, producing a face center,
a timelike/spacelike flag and signed edge heights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import (
    DegenerateFace,
    IllConditioned,
    LightlikeCenter,
    SphericalCenterUndefined,
)
from .geometry import Background, TriangleEmbedding
from .mesh import Triangulation

METRIC_TOLERANCE = 1e-10
CONCURRENCY_TOLERANCE = 1e-9
_SPHERICAL_COS_TOL = 1e-12
_EUCLIDEAN_COND_LIMIT = 1e12


@dataclass(frozen=True)
class PreMetric:
    """Signed partial lengths on the oriented edges of a triangulation."""

    triangulation: Triangulation
    background: Background
    d: np.ndarray  # indexed by oriented-edge id

    def partial(self, i, j) -> float:
        return float(self.d[self.triangulation.oriented_id(i, j)])

    def length(self, i, j) -> float:
        return self.partial(i, j) + self.partial(j, i)

    def face_lengths(self, face):
        return tuple(self.length(a, b) for a, b in
                     self.triangulation.face_corner_pairs(face))


def premetric_from_map(t: Triangulation, background: Background, dmap) -> PreMetric:
    """Build a PreMetric from a ``{(i, j): value}`` mapping over E+."""
    d = np.empty(len(t.oriented_edges))
    for n, o in enumerate(t.oriented_edges):
        d[n] = dmap[o]
    return PreMetric(t, background, d)


def edge_lengths(pm: PreMetric) -> np.ndarray:
    """Per-edge sums ``d[i,j] + d[j,i]``; raises if any face degenerates."""
    t = pm.triangulation
    ls = np.array([pm.length(i, j) for i, j in t.edges])
    bad = validity_report(pm)
    if bad:
        raise DegenerateFace(
            "invalid faces: " + "; ".join(f"{f}: {r}" for f, r in bad),
            faces=[f for f, _ in bad],
        )
    return ls


def validity_report(pm: PreMetric):
    """List of (face, reason) for faces failing the triangle checks."""
    bad = []
    for face in pm.triangulation.faces:
        check = geometry.validate_triangle(pm.face_lengths(face), pm.background)
        if not check:
            bad.append((face, check.reason))
    return bad


def compatibility_residual(pm: PreMetric, face) -> float:
    """Deviation of one face from the metric compatibility identity.

    Euclidean: difference of the two sums of squared partials around the
    face.  Hyperbolic/spherical: difference of the logs of the two cosh/cos
    products (scale-free, zero exactly when the dual perpendiculars are
    concurrent).
    """
    t = pm.triangulation
    fwd = [pm.partial(a, b) for a, b in t.face_corner_pairs(face)]
    rev = [pm.partial(b, a) for a, b in t.face_corner_pairs(face)]
    if pm.background is Background.EUCLIDEAN:
        return float(sum(x * x for x in fwd) - sum(x * x for x in rev))
    if pm.background is Background.HYPERBOLIC:
        return float(
            sum(math.log(math.cosh(x)) for x in fwd)
            - sum(math.log(math.cosh(x)) for x in rev)
        )
    cos_fwd = [math.cos(x) for x in fwd]
    cos_rev = [math.cos(x) for x in rev]
    for x, c in zip(fwd + rev, cos_fwd + cos_rev):
        if abs(c) < _SPHERICAL_COS_TOL:
            raise SphericalCenterUndefined(
                f"partial length {x!r} on face {face} has cos(d) = 0"
            )
    lhs = math.prod(cos_fwd)
    rhs = math.prod(cos_rev)
    if lhs * rhs <= 0.0:
        return math.inf  # sign mismatch can never satisfy the identity
    return float(math.log(abs(lhs)) - math.log(abs(rhs)))


@dataclass(frozen=True)
class MetricCertificate:
    """Per-face compatibility residuals and the metric verdict."""

    residuals: dict
    tolerance: float = METRIC_TOLERANCE

    @property
    def max_residual(self) -> float:
        return max((abs(r) for r in self.residuals.values()), default=0.0)

    @property
    def is_metric(self) -> bool:
        return self.max_residual <= self.tolerance


def certify_metric(pm: PreMetric, tolerance: float = METRIC_TOLERANCE) -> MetricCertificate:
    residuals = {
        face: compatibility_residual(pm, face) for face in pm.triangulation.faces
    }
    return MetricCertificate(residuals=residuals, tolerance=tolerance)


def edge_center(emb: TriangleEmbedding, corner: int, other: int, d_from_corner: float):
    """Center of an edge of an embedded face, at signed distance from ``corner``."""
    p = emb.points[corner]
    direction = geometry.tangent_toward(p, emb.points[other], emb.background)
    return geometry.geodesic_point(p, direction, d_from_corner, emb.background)


def face_edge_centers(pm: PreMetric, face, emb: TriangleEmbedding):
    """Edge centers (one per side, in cyclic order) of one embedded face."""
    centers = []
    for m, (a, b) in enumerate(pm.triangulation.face_corner_pairs(face)):
        centers.append(edge_center(emb, m, (m + 1) % 3, pm.partial(a, b)))
    return centers


def _euclidean_face_center(emb, centers):
    # Intersect the perpendiculars through two edge centers; the third
    # perpendicular's miss distance is the concurrency residual.
    pts = emb.points
    tangents = [pts[(m + 1) % 3] - pts[m] for m in range(3)]
    tangents = [v / np.linalg.norm(v) for v in tangents]
    a = np.array([tangents[0], tangents[1]])
    rhs = np.array(
        [np.dot(tangents[0], centers[0]), np.dot(tangents[1], centers[1])]
    )
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > _EUCLIDEAN_COND_LIMIT:
        raise IllConditioned(
            f"perpendicular intersection condition number {cond!r}"
        )
    center = np.linalg.solve(a, rhs)
    residual = abs(float(np.dot(tangents[2], center - centers[2])))
    return center, 1, residual


def _perpendicular_normal(c, p, q, background):
    # The plane orthogonal to edge span(p, q) through its center c.
    return geometry.inner(c, p, background) * np.asarray(q, dtype=float) - \
        geometry.inner(c, q, background) * np.asarray(p, dtype=float)


def _canonical_spacelike(u):
    # Fix the representative of a hyperideal center deterministically: the
    # one whose Klein-model point (x/z, y/z) the linear side tests see.
    for coord in (2, 0, 1):
        if abs(u[coord]) > 1e-14:
            return u if u[coord] > 0 else -u
    return u


def face_center(pm: PreMetric, face, emb: TriangleEmbedding | None = None,
                centers=None):
    """Common point of the three edge perpendiculars of a face.

    Returns ``(point, beta, residual)`` where ``beta`` is +1 for a center in
    the model (timelike in the hyperbolic case) and -1 for a hyperideal
    (spacelike) hyperbolic center, and ``residual`` measures how far the
    third perpendicular misses the intersection of the first two.
    """
    if emb is None:
        emb = geometry.embed_triangle(pm.face_lengths(face), pm.background, face=face)
    if centers is None:
        centers = face_edge_centers(pm, face, emb)
    if pm.background is Background.EUCLIDEAN:
        return _euclidean_face_center(emb, centers)

    pts = emb.points
    normals = [
        _perpendicular_normal(centers[m], pts[m], pts[(m + 1) % 3], pm.background)
        for m in range(3)
    ]
    direction = geometry.model_cross(normals[0], normals[1], pm.background)
    norm = np.linalg.norm(direction)
    if norm == 0.0:
        raise IllConditioned(f"parallel perpendiculars on face {face}")
    direction = direction / norm

    if pm.background is Background.SPHERICAL:
        # Pick the representative of the antipodal pair on the same side of
        # the plane of the face as the face's own cap.
        if np.dot(direction, pts.sum(axis=0)) < 0.0:
            direction = -direction
        residual = abs(float(np.dot(normals[2] / np.linalg.norm(normals[2]),
                                    direction)))
        return direction, 1, residual

    q = geometry.lorentz_inner(direction, direction)
    if abs(q) < geometry.LIGHTLIKE_TOL:
        raise LightlikeCenter(f"face {face} center is lightlike (<c,c> = {q!r})")
    if q < 0.0:
        center = direction / math.sqrt(-q)
        if center[2] < 0:
            center = -center
        beta = 1
    else:
        center = _canonical_spacelike(direction / math.sqrt(q))
        beta = -1
    n2 = normals[2] / np.linalg.norm(normals[2])
    residual = abs(geometry.lorentz_inner(n2, center))
    return center, beta, float(residual)


def _side_sign(pts, m, point, background):
    # Same-side test against the span of side m, relative to the far corner.
    i, j, k = m, (m + 1) % 3, (m + 2) % 3
    if background is Background.EUCLIDEAN:
        t = pts[j] - pts[i]
        ref = t[0] * (pts[k][1] - pts[i][1]) - t[1] * (pts[k][0] - pts[i][0])
        val = t[0] * (point[1] - pts[i][1]) - t[1] * (point[0] - pts[i][0])
    else:
        n = geometry.model_cross(pts[i], pts[j], background)
        ref = geometry.inner(n, pts[k], background)
        val = geometry.inner(n, point, background)
    if val == 0.0:
        return 0.0
    return 1.0 if (val > 0.0) == (ref > 0.0) else -1.0


def edge_heights(pm: PreMetric, face, emb: TriangleEmbedding | None = None,
                 centers=None, center_info=None):
    """Signed distances from each edge center to the face center.

    Positive when the face center lies on the same side of the edge span as
    the opposite corner.  For a spacelike hyperbolic center the distance is
    taken to its polar geodesic instead of the (hyperideal) point itself.
    """
    if emb is None:
        emb = geometry.embed_triangle(pm.face_lengths(face), pm.background, face=face)
    if centers is None:
        centers = face_edge_centers(pm, face, emb)
    if center_info is None:
        center_info = face_center(pm, face, emb, centers)
    center, beta, _ = center_info

    heights = []
    for m in range(3):
        if pm.background is Background.EUCLIDEAN:
            mag = float(np.linalg.norm(center - centers[m]))
        elif pm.background is Background.SPHERICAL:
            mag = geometry._clamped_arccos(float(np.dot(centers[m], center)))
        elif beta == 1:
            mag = float(np.arccosh(max(1.0, -geometry.lorentz_inner(centers[m], center))))
        else:
            mag = float(np.arcsinh(abs(geometry.lorentz_inner(centers[m], center))))
        heights.append(mag * _side_sign(emb.points, m, center, pm.background))
    return tuple(heights)


@dataclass(frozen=True)
class FaceDuality:
    """Everything the dual structure knows about one face."""

    face: tuple
    embedding: TriangleEmbedding
    edge_centers: tuple
    center: np.ndarray
    beta: int
    concurrency_residual: float
    heights: tuple  # aligned with face_corner_pairs(face)


@dataclass(frozen=True)
class DualityStructure:
    """Dual centers and heights for every face of a metrized surface."""

    premetric: PreMetric
    faces: tuple = field(repr=False)  # FaceDuality per face id

    def by_face(self, face) -> FaceDuality:
        return self.faces[self.premetric.triangulation.faces.index(face)]

    @property
    def max_concurrency_residual(self) -> float:
        return max(f.concurrency_residual for f in self.faces)


def face_duality(pm: PreMetric, face) -> FaceDuality:
    emb = geometry.embed_triangle(pm.face_lengths(face), pm.background, face=face)
    centers = face_edge_centers(pm, face, emb)
    center, beta, residual = face_center(pm, face, emb, centers)
    heights = edge_heights(pm, face, emb, centers, (center, beta, residual))
    return FaceDuality(
        face=face,
        embedding=emb,
        edge_centers=tuple(centers),
        center=center,
        beta=beta,
        concurrency_residual=residual,
        heights=heights,
    )


def duality_structure(pm: PreMetric) -> DualityStructure:
    return DualityStructure(
        premetric=pm,
        faces=tuple(face_duality(pm, face) for face in pm.triangulation.faces),
    )
