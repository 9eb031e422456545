"""Constant-curvature triangle primitives.

Every face of a surface is treated through an isometric embedding into one
of the three model geometries: the Euclidean plane, the hyperboloid model
of the hyperbolic plane, or the unit sphere.  This module provides the
bilinear products of those models, triangle trigonometry (law of cosines,
areas, validity), and canonical per-face embeddings.  All functions are
pure; points are plain numpy arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTriangle

# Roundoff slack for inverse-trig arguments that should lie in [-1, 1].
COS_CLAMP_TOL = 1e-9

# |<u,u>| below this, on a vector of unit Euclidean norm, counts as lightlike.
LIGHTLIKE_TOL = 1e-10

_J = np.array([1.0, 1.0, -1.0])


class Background(enum.Enum):
    """Which constant-curvature model the triangles embed into."""

    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"
    SPHERICAL = "spherical"

    @classmethod
    def from_name(cls, name: str) -> "Background":
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown background {name!r}; expected one of "
                "'euclidean', 'hyperbolic', 'spherical'"
            ) from None

    @property
    def is_curved(self) -> bool:
        return self is not Background.EUCLIDEAN


def lorentz_inner(u, v):
    """Bilinear product of signature (+,+,-) on R^3."""
    return u[0] * v[0] + u[1] * v[1] - u[2] * v[2]


def inner(u, v, background: Background):
    """Model inner product: Lorentzian for hyperbolic, dot otherwise."""
    if background is Background.HYPERBOLIC:
        return lorentz_inner(u, v)
    return float(np.dot(u, v))


def lorentz_cross(u, v):
    """Lorentzian cross product J(u x v); <u x v, u> = 0 in the (+,+,-) form."""
    return _J * np.cross(u, v)


def model_cross(u, v, background: Background):
    if background is Background.HYPERBOLIC:
        return lorentz_cross(u, v)
    return np.cross(u, v)


def classify_vector(u, tol: float = LIGHTLIKE_TOL) -> int:
    """Sign class of the Lorentzian norm: -1 timelike, 0 lightlike, +1 spacelike.

    The tolerance is applied after scaling ``u`` to unit Euclidean norm, so
    the classification does not depend on the magnitude of ``u``.
    """
    n = np.linalg.norm(u)
    if n == 0.0:
        return 0
    q = lorentz_inner(u, u) / (n * n)
    if abs(q) < tol:
        return 0
    return -1 if q < 0.0 else 1


def _clamped_arccos(x: float) -> float:
    if x > 1.0:
        if x > 1.0 + COS_CLAMP_TOL:
            raise DegenerateTriangle(f"cosine {x!r} exceeds 1 beyond roundoff")
        x = 1.0
    elif x < -1.0:
        if x < -1.0 - COS_CLAMP_TOL:
            raise DegenerateTriangle(f"cosine {x!r} below -1 beyond roundoff")
        x = -1.0
    return float(np.arccos(x))


def triangle_angle(l_opp: float, l_a: float, l_b: float, background: Background) -> float:
    """Angle opposite ``l_opp`` in a triangle with adjacent sides ``l_a, l_b``."""
    if background is Background.EUCLIDEAN:
        c = (l_a * l_a + l_b * l_b - l_opp * l_opp) / (2.0 * l_a * l_b)
    elif background is Background.HYPERBOLIC:
        c = (np.cosh(l_a) * np.cosh(l_b) - np.cosh(l_opp)) / (
            np.sinh(l_a) * np.sinh(l_b)
        )
    else:
        c = (np.cos(l_opp) - np.cos(l_a) * np.cos(l_b)) / (
            np.sin(l_a) * np.sin(l_b)
        )
    return _clamped_arccos(float(c))


def triangle_angles(lengths, background: Background):
    """Angles (at corners 0, 1, 2) for sides ``lengths = (l01, l12, l20)``.

    The angle at corner ``m`` is opposite the side not touching ``m``.
    """
    l01, l12, l20 = lengths
    a0 = triangle_angle(l12, l01, l20, background)
    a1 = triangle_angle(l20, l01, l12, background)
    a2 = triangle_angle(l01, l12, l20, background)
    return a0, a1, a2


def triangle_area(angles, lengths, background: Background) -> float:
    """Triangle area: Heron (Euclidean) or angle excess/defect (curved)."""
    if background is Background.EUCLIDEAN:
        a, b, c = lengths
        s = 0.5 * (a + b + c)
        arg = s * (s - a) * (s - b) * (s - c)
        if arg <= 0.0:
            raise DegenerateTriangle(f"Heron argument nonpositive for sides {lengths}")
        return float(np.sqrt(arg))
    excess = float(sum(angles)) - np.pi
    if background is Background.HYPERBOLIC:
        excess = -excess
    if excess <= 0.0:
        raise DegenerateTriangle(
            f"angle sum {sum(angles)!r} inconsistent with {background.value} triangle"
        )
    return excess


@dataclass(frozen=True)
class TriangleCheck:
    """Outcome of the validity test for one triple of edge lengths."""

    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok


def validate_triangle(lengths, background: Background) -> TriangleCheck:
    """Check that three lengths bound a nondegenerate model triangle.

    Euclidean and hyperbolic triangles need positive lengths satisfying the
    strict triangle inequalities.  Spherical ones must additionally fit in
    an open hemisphere: each length below pi and perimeter below 2*pi.
    Reports instead of raising so callers can collect all offenders.
    """
    ls = [float(x) for x in lengths]
    if len(ls) != 3:
        return TriangleCheck(False, "expected exactly three lengths")
    for x in ls:
        if not np.isfinite(x) or x <= 0.0:
            return TriangleCheck(False, f"nonpositive length {x!r}")
    a, b, c = ls
    if background is Background.SPHERICAL:
        if max(ls) >= np.pi:
            return TriangleCheck(False, f"length {max(ls)!r} >= pi")
        if a + b + c >= 2.0 * np.pi:
            return TriangleCheck(False, f"perimeter {a + b + c!r} >= 2*pi")
    for opp, s1, s2 in ((a, b, c), (b, c, a), (c, a, b)):
        if opp >= s1 + s2:
            return TriangleCheck(
                False, f"triangle inequality violated: {opp!r} >= {s1!r} + {s2!r}"
            )
    return TriangleCheck(True)


@dataclass(frozen=True)
class TriangleEmbedding:
    """An isometric placement of one face in its model geometry.

    ``points`` has one row per corner: 2D Cartesian coordinates for the
    Euclidean plane, hyperboloid points (z > 0, <p,p> = -1) for the
    hyperbolic plane, unit vectors for the sphere.  Corners are placed
    counterclockwise.  ``face`` records where the triangle came from.
    """

    background: Background
    points: np.ndarray
    face: tuple | None = field(default=None)

    def distance(self, a: int, b: int) -> float:
        return model_distance(self.points[a], self.points[b], self.background)

    def side_lengths(self):
        """Measured lengths (l01, l12, l20); inverse of embed_triangle."""
        return (self.distance(0, 1), self.distance(1, 2), self.distance(2, 0))


def model_distance(p, q, background: Background) -> float:
    """Geodesic distance between two model points."""
    if background is Background.EUCLIDEAN:
        return float(np.linalg.norm(np.asarray(p) - np.asarray(q)))
    if background is Background.HYPERBOLIC:
        c = -lorentz_inner(p, q)
        return float(np.arccosh(max(c, 1.0)))
    return _clamped_arccos(float(np.dot(p, q)))


def embed_triangle(lengths, background: Background, face=None) -> TriangleEmbedding:
    """Embed a triangle with sides ``(l01, l12, l20)`` in a canonical frame.

    Corner 0 sits at the model's base point, corner 1 along the first
    coordinate direction, corner 2 in the upper half (counterclockwise).
    The frame is fixed so downstream centers and heights are reproducible
    bit for bit.
    """
    check = validate_triangle(lengths, background)
    if not check:
        raise DegenerateTriangle(check.reason)
    l01, l12, l20 = (float(x) for x in lengths)
    gamma0 = triangle_angle(l12, l01, l20, background)
    if background is Background.EUCLIDEAN:
        pts = np.array(
            [
                [0.0, 0.0],
                [l01, 0.0],
                [l20 * np.cos(gamma0), l20 * np.sin(gamma0)],
            ]
        )
    elif background is Background.HYPERBOLIC:
        # Geodesics from the base point (0,0,1): cosh(t) p + sinh(t) v.
        pts = np.array(
            [
                [0.0, 0.0, 1.0],
                [np.sinh(l01), 0.0, np.cosh(l01)],
                [
                    np.sinh(l20) * np.cos(gamma0),
                    np.sinh(l20) * np.sin(gamma0),
                    np.cosh(l20),
                ],
            ]
        )
    else:
        pts = np.array(
            [
                [0.0, 0.0, 1.0],
                [np.sin(l01), 0.0, np.cos(l01)],
                [
                    np.sin(l20) * np.cos(gamma0),
                    np.sin(l20) * np.sin(gamma0),
                    np.cos(l20),
                ],
            ]
        )
    emb = TriangleEmbedding(background=background, points=pts, face=face)
    return emb


def tangent_toward(p, q, background: Background):
    """Unit tangent at model point ``p`` pointing along the geodesic to ``q``.

    Gram-Schmidt against ``p`` in the model's bilinear form; the hyperbolic
    case is the arclength parametrization cosh(t) p + sinh(t) v.
    """
    if background is Background.EUCLIDEAN:
        v = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
        n = np.linalg.norm(v)
        if n == 0.0:
            raise DegenerateTriangle("coincident points have no tangent direction")
        return v / n
    if background is Background.HYPERBOLIC:
        w = np.asarray(q, dtype=float) + lorentz_inner(p, q) * np.asarray(p, dtype=float)
        norm2 = lorentz_inner(w, w)
    else:
        w = np.asarray(q, dtype=float) - np.dot(p, q) * np.asarray(p, dtype=float)
        norm2 = float(np.dot(w, w))
    if norm2 <= 0.0:
        raise DegenerateTriangle("degenerate direction in tangent construction")
    return w / np.sqrt(norm2)


def geodesic_point(p, direction, t: float, background: Background):
    """Point at signed arclength ``t`` from ``p`` along a unit ``direction``."""
    if background is Background.EUCLIDEAN:
        return np.asarray(p, dtype=float) + t * np.asarray(direction, dtype=float)
    if background is Background.HYPERBOLIC:
        return np.cosh(t) * np.asarray(p, dtype=float) + np.sinh(t) * np.asarray(
            direction, dtype=float
        )
    return np.cos(t) * np.asarray(p, dtype=float) + np.sin(t) * np.asarray(
        direction, dtype=float
    )
