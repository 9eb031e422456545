"""Angles, curvatures, and their analytic derivatives.

The derivative of a corner angle with respect to the conformal factor at a
vertex of the same face is expressed through the dual edge heights.  With
T(h) = h (Euclidean), tanh h or coth h for timelike/spacelike hyperbolic
centers, and tan h (spherical):

* d gamma_i / d f_j = T(h_ij) / (cosh d_ji * sinh l_ij)   (1/l, 1/sin for E/S)
* d gamma_i / d f_i = -sum over edges {i,x} of T(h_ix) / (cosh d_ix * tanh l_ix)

The partial length inside each term always belongs to the *varying*
vertex.  Every entry here is validated against central differences by the
test suite; the diagonal is equivalent to subtracting the area gradient
from the negated off-diagonal column sums.

Chain rule through df/du turns the face blocks into the symmetric
curvature Jacobian dK/du.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse

from . import conformal as cf
from . import metric as mt
from .errors import ZeroHeight
from .geometry import Background, triangle_angles, triangle_area
from .mesh import Triangulation

_ZERO_HEIGHT_TOL = 1e-12


def face_lengths(c: cf.ConformalData, face):
    return tuple(
        cf.edge_length(c, (a, b)) for a, b in c.triangulation.face_corner_pairs(face)
    )


def face_angles(c: cf.ConformalData, face):
    """Corner angles of a face, aligned with its vertex order."""
    return triangle_angles(face_lengths(c, face), c.background)


def face_area(c: cf.ConformalData, face) -> float:
    ls = face_lengths(c, face)
    return triangle_area(triangle_angles(ls, c.background), ls, c.background)


def vertex_curvatures(c: cf.ConformalData) -> np.ndarray:
    """K_i = 2*pi minus the angle sum around each vertex."""
    t = c.triangulation
    K = np.full(t.num_vertices, 2.0 * np.pi)
    for face in t.faces:
        angles = face_angles(c, face)
        for v, gamma in zip(face, angles):
            K[t.vertex_index[v]] -= gamma
    return K


def _t_of_height(h: float, beta: int, background: Background) -> float:
    if background is Background.EUCLIDEAN:
        return h
    if background is Background.SPHERICAL:
        return math.tan(h)
    if beta == 1:
        return math.tanh(h)
    if abs(h) < _ZERO_HEIGHT_TOL:
        raise ZeroHeight(f"spacelike center with height {h!r}; coth is singular")
    return 1.0 / math.tanh(h)


def angle_jacobian_f(c: cf.ConformalData, face,
                     dual: mt.FaceDuality | None = None) -> np.ndarray:
    """3x3 matrix [d gamma_(corner m) / d f_(vertex n)] for one face.

    Entries for vertices outside the face are zero and not represented.
    """
    if dual is None:
        dual = mt.face_duality(cf.premetric(c), face)
    bg = c.background
    heights = {}
    for m, (a, b) in enumerate(c.triangulation.face_corner_pairs(face)):
        heights[frozenset((a, b))] = dual.heights[m]

    lengths = {}
    partials = {}
    for a, b in c.triangulation.face_corner_pairs(face):
        lengths[frozenset((a, b))] = cf.edge_length(c, (a, b))
        partials[(a, b)] = cf.partial_length(c, (a, b))
        partials[(b, a)] = cf.partial_length(c, (b, a))

    def off_diag(vi, vj):
        l = lengths[frozenset((vi, vj))]
        t = _t_of_height(heights[frozenset((vi, vj))], dual.beta, bg)
        if bg is Background.EUCLIDEAN:
            return t / l
        if bg is Background.HYPERBOLIC:
            return t / (math.cosh(partials[(vj, vi)]) * math.sinh(l))
        return t / (math.cos(partials[(vj, vi)]) * math.sin(l))

    def diag_term(vi, vx):
        l = lengths[frozenset((vi, vx))]
        t = _t_of_height(heights[frozenset((vi, vx))], dual.beta, bg)
        if bg is Background.EUCLIDEAN:
            return t / l
        if bg is Background.HYPERBOLIC:
            return t / (math.cosh(partials[(vi, vx)]) * math.tanh(l))
        return t / (math.cos(partials[(vi, vx)]) * math.tan(l))

    J = np.zeros((3, 3))
    for mi, vi in enumerate(face):
        for mj, vj in enumerate(face):
            if mi == mj:
                J[mi, mj] = -sum(
                    diag_term(vi, vx) for vx in face if vx != vi
                )
            else:
                J[mi, mj] = off_diag(vi, vj)
    return J


def area_gradient_f(c: cf.ConformalData, face, jac: np.ndarray):
    """Area derivatives (dA/df at each face vertex) for curved backgrounds.

    Primary value: negated (hyperbolic) or plain (spherical) column sums of
    the angle Jacobian, i.e. the derivative of the angle defect/excess.
    Also returns the height-formula value sum of dgamma_x/df_k * (cosh l - 1)
    (resp. 1 - cos l) for cross-checking; the two agree without any extra
    factor on the mixed term.
    """
    bg = c.background
    if bg is Background.EUCLIDEAN:
        raise ValueError("area gradients only apply to curved backgrounds")
    sign = -1.0 if bg is Background.HYPERBOLIC else 1.0
    excess_based = sign * jac.sum(axis=0)

    lengths = {}
    for a, b in c.triangulation.face_corner_pairs(face):
        lengths[frozenset((a, b))] = cf.edge_length(c, (a, b))

    height_formula = np.zeros(3)
    for mk, vk in enumerate(face):
        total = 0.0
        for mx, vx in enumerate(face):
            if mx == mk:
                continue
            l = lengths[frozenset((vk, vx))]
            factor = (
                math.cosh(l) - 1.0 if bg is Background.HYPERBOLIC else 1.0 - math.cos(l)
            )
            total += jac[mx, mk] * factor
        height_formula[mk] = total
    return excess_based, height_formula


@dataclass(frozen=True)
class CurvatureSystem:
    """Angles, curvatures, areas and assembled derivative matrices."""

    triangulation: Triangulation
    background: Background
    angles: dict            # (face, vertex) -> gamma
    K: np.ndarray           # per vertex index
    areas: np.ndarray       # per face id
    jac_f: scipy.sparse.csr_matrix    # (3*num_faces) x num_vertices, corner rows
    jacK_u: scipy.sparse.csr_matrix  # num_vertices x num_vertices, symmetric


def curvature_jacobian_u(c: cf.ConformalData,
                         dual: mt.DualityStructure | None = None) -> scipy.sparse.csr_matrix:
    """Sparse symmetric dK/du over vertex pairs (adjacency plus diagonal)."""
    t = c.triangulation
    if dual is None:
        dual = mt.duality_structure(cf.premetric(c))
    scale = cf.u_scale(c)
    rows, cols, vals = [], [], []
    for fid, face in enumerate(t.faces):
        J = angle_jacobian_f(c, face, dual.faces[fid])
        for mi, vi in enumerate(face):
            for mj, vj in enumerate(face):
                ii, jj = t.vertex_index[vi], t.vertex_index[vj]
                rows.append(ii)
                cols.append(jj)
                vals.append(-J[mi, mj] * scale[jj])
    n = t.num_vertices
    return scipy.sparse.coo_matrix(
        (vals, (rows, cols)), shape=(n, n)
    ).tocsr()


def curvature_system(c: cf.ConformalData) -> CurvatureSystem:
    """Assemble angles, K, areas and both Jacobians in one pass."""
    t = c.triangulation
    dual = mt.duality_structure(cf.premetric(c))
    angles = {}
    K = np.full(t.num_vertices, 2.0 * np.pi)
    areas = np.zeros(t.num_faces)
    jf_rows, jf_cols, jf_vals = [], [], []
    rows, cols, vals = [], [], []
    scale = cf.u_scale(c)
    for fid, face in enumerate(t.faces):
        ls = face_lengths(c, face)
        gammas = triangle_angles(ls, c.background)
        areas[fid] = triangle_area(gammas, ls, c.background)
        J = angle_jacobian_f(c, face, dual.faces[fid])
        for mi, vi in enumerate(face):
            angles[(face, vi)] = gammas[mi]
            K[t.vertex_index[vi]] -= gammas[mi]
            for mj, vj in enumerate(face):
                jj = t.vertex_index[vj]
                jf_rows.append(3 * fid + mi)
                jf_cols.append(jj)
                jf_vals.append(J[mi, mj])
                rows.append(t.vertex_index[vi])
                cols.append(jj)
                vals.append(-J[mi, mj] * scale[jj])
    n = t.num_vertices
    jac_f = scipy.sparse.coo_matrix(
        (jf_vals, (jf_rows, jf_cols)), shape=(3 * t.num_faces, n)
    ).tocsr()
    jacK_u = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    return CurvatureSystem(
        triangulation=t,
        background=c.background,
        angles=angles,
        K=K,
        areas=areas,
        jac_f=jac_f,
        jacK_u=jacK_u,
    )


def total_curvature_identity(c: cf.ConformalData):
    """(sum K, expected sum) from the combinatorial area identity.

    Expected: 2*pi*chi, plus total area for hyperbolic, minus for spherical.
    """
    from .mesh import euler_characteristic

    t = c.triangulation
    K = vertex_curvatures(c)
    chi = euler_characteristic(t)
    expected = 2.0 * np.pi * chi
    if c.background is Background.HYPERBOLIC:
        expected += sum(face_area(c, face) for face in t.faces)
    elif c.background is Background.SPHERICAL:
        expected -= sum(face_area(c, face) for face in t.faces)
    return float(K.sum()), float(expected)
