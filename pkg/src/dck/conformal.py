"""The two-weight family of discrete conformal structures.

Lengths and signed partial lengths are generated from a per-vertex factor
``f`` through per-vertex weights ``alpha`` and per-edge weights ``eta``:

* Euclidean:   l^2 = a_i + a_j + 2 E,      d_ij = (a_i + E) / l
* hyperbolic:  cosh l = sqrt(Q_i Q_j) + E, tanh d_ij = (a_i sqrt(Q_j/Q_i) + E) / sinh l
* spherical:   cos l  = sqrt(S_i S_j) - E, tan d_ij  = (a_i sqrt(S_j/S_i) + E) / sin l

with a_i = alpha_i e^{2 f_i}, E = eta_ij e^{f_i + f_j}, Q_i = 1 + a_i,
S_i = 1 - a_i.  Circle packings are alpha = 1 with eta = cos(overlap);
multiplicative (Yamabe-type) structures are alpha = 0.

The companion change of variables u(f) (identity for Euclidean,
df/du = sqrt(Q) or sqrt(S) otherwise) turns the curvature map into a
symmetric gradient; both directions are provided here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import OutOfDomain
from .geometry import Background, validate_triangle
from .mesh import Triangulation
from .metric import PreMetric

_PARTIAL_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ConformalData:
    """A conformal structure plus a point f in its parameter domain.

    ``alpha`` and ``f`` are indexed like ``triangulation.vertices``;
    ``eta`` like ``triangulation.edges``.  Instances are immutable; use
    :meth:`with_f` to move in the domain.
    """

    background: Background
    triangulation: Triangulation
    alpha: np.ndarray
    eta: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        t = self.triangulation
        for name, arr, n in (
            ("alpha", self.alpha, t.num_vertices),
            ("eta", self.eta, t.num_edges),
            ("f", self.f, t.num_vertices),
        ):
            arr = np.asarray(arr, dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have shape ({n},), got {arr.shape}")
            object.__setattr__(self, name, arr)

    def with_f(self, f) -> "ConformalData":
        return replace(self, f=np.asarray(f, dtype=float))

    def vertex_weight(self, vid) -> float:
        return float(self.alpha[self.triangulation.vertex_index[vid]])

    def factor(self, vid) -> float:
        return float(self.f[self.triangulation.vertex_index[vid]])


def _vertex_terms(c: ConformalData):
    # a_i = alpha_i * exp(2 f_i) per vertex index.
    return c.alpha * np.exp(2.0 * c.f)


def _radical(c: ConformalData, a=None):
    """Q_i = 1 + a_i (hyperbolic) or S_i = 1 - a_i (spherical), validated."""
    if a is None:
        a = _vertex_terms(c)
    sign = 1.0 if c.background is Background.HYPERBOLIC else -1.0
    q = 1.0 + sign * a
    if np.any(q <= 0.0):
        vid = c.triangulation.vertices[int(np.argmin(q))]
        word = "1 + a" if sign > 0 else "1 - a"
        raise OutOfDomain(
            f"vertex {vid}: {word} = {float(q.min())!r} <= 0 "
            f"(alpha, f outside the {c.background.value} domain)"
        )
    return q


def edge_length(c: ConformalData, edge) -> float:
    """Length induced on one edge {i, j}."""
    i, j = edge
    t = c.triangulation
    eid = t.edge_id(i, j)
    ii, jj = t.vertex_index[i], t.vertex_index[j]
    a = _vertex_terms(c)
    e = float(c.eta[eid] * math.exp(c.f[ii] + c.f[jj]))
    if c.background is Background.EUCLIDEAN:
        l2 = a[ii] + a[jj] + 2.0 * e
        if l2 <= 0.0:
            raise OutOfDomain(f"edge {edge}: squared length {l2!r} <= 0")
        return math.sqrt(l2)
    q = _radical(c, a)
    if c.background is Background.HYPERBOLIC:
        ch = math.sqrt(q[ii] * q[jj]) + e
        if ch <= 1.0:
            raise OutOfDomain(f"edge {edge}: cosh(length) = {ch!r} <= 1")
        return math.acosh(ch)
    cs = math.sqrt(q[ii] * q[jj]) - e
    if not -1.0 < cs < 1.0:
        raise OutOfDomain(f"edge {edge}: cos(length) = {cs!r} outside (-1, 1)")
    return math.acos(cs)


def edge_length_array(c: ConformalData) -> np.ndarray:
    return np.array([edge_length(c, e) for e in c.triangulation.edges])


def partial_length(c: ConformalData, oriented) -> float:
    """Signed partial length d_ij of the oriented edge (i, j)."""
    i, j = oriented
    t = c.triangulation
    ii, jj = t.vertex_index[i], t.vertex_index[j]
    a = _vertex_terms(c)
    e = float(c.eta[t.edge_id(i, j)] * math.exp(c.f[ii] + c.f[jj]))
    length = edge_length(c, (i, j))
    if c.background is Background.EUCLIDEAN:
        return (a[ii] + e) / length
    q = _radical(c, a)
    if c.background is Background.HYPERBOLIC:
        tanh_d = (a[ii] * math.sqrt(q[jj] / q[ii]) + e) / math.sinh(length)
        if abs(tanh_d) >= 1.0:
            raise OutOfDomain(f"oriented edge {oriented}: |tanh d| = {abs(tanh_d)!r} >= 1")
        return math.atanh(tanh_d)
    tan_d = (a[ii] * math.sqrt(q[jj] / q[ii]) + e) / math.sin(length)
    d = math.atan(tan_d)
    return d


def partial_length_array(c: ConformalData) -> np.ndarray:
    t = c.triangulation
    d = np.array([partial_length(c, o) for o in t.oriented_edges])
    if c.background is Background.SPHERICAL:
        # Partials are produced on the principal branch |d| < pi/2; they
        # must still recombine into the edge lengths.
        for eid, (i, j) in enumerate(t.edges):
            total = d[2 * eid] + d[2 * eid + 1]
            length = edge_length(c, (i, j))
            if abs(total - length) > _PARTIAL_SUM_TOL:
                raise OutOfDomain(
                    f"edge {(i, j)}: partials {total!r} do not sum to length {length!r}"
                )
    return d


def premetric(c: ConformalData) -> PreMetric:
    """The pre-metric induced by the structure at its current f."""
    return PreMetric(c.triangulation, c.background, partial_length_array(c))


def validate_conformal(c: ConformalData):
    """(face, reason) list for faces whose induced lengths are degenerate.

    Raises :class:`~dck.errors.OutOfDomain` if a length or radicand leaves
    the admissible range before faces can even be measured.
    """
    bad = []
    lengths = {e: edge_length(c, e) for e in c.triangulation.edges}
    for face in c.triangulation.faces:
        fl = [
            lengths[(a, b) if a < b else (b, a)]
            for a, b in c.triangulation.face_corner_pairs(face)
        ]
        check = validate_triangle(fl, c.background)
        if not check:
            bad.append((face, check.reason))
    return bad


def u_scale(c: ConformalData) -> np.ndarray:
    """df/du per vertex: 1, sqrt(1 + a) or sqrt(1 - a) by background."""
    if c.background is Background.EUCLIDEAN:
        return np.ones_like(c.f)
    return np.sqrt(_radical(c))


def u_from_f(c: ConformalData) -> np.ndarray:
    """Change of variables making the curvature map a symmetric gradient.

    Euclidean structures use u = f outright.  In the curved backgrounds,
    vertices with alpha = 0 also keep u = f; otherwise
    u = f + log|alpha|/2 - log(1 + sqrt(1 +/- alpha e^{2f})), which is the
    closed form of integrating du = df / sqrt(1 +/- alpha e^{2f}); it is
    strictly increasing in f and always negative.
    """
    u = np.array(c.f, dtype=float)
    if c.background is Background.EUCLIDEAN:
        return u
    s = u_scale(c)
    for n in range(u.size):
        alpha = c.alpha[n]
        if alpha != 0.0:
            u[n] = c.f[n] + 0.5 * math.log(abs(alpha)) - math.log1p(s[n])
    return u


def f_from_u(background: Background, alpha, u) -> np.ndarray:
    """Inverse of :func:`u_from_f` for a fixed background and alpha."""
    alpha = np.asarray(alpha, dtype=float)
    u = np.asarray(u, dtype=float)
    f = np.array(u, dtype=float)
    if background is Background.EUCLIDEAN:
        return f
    for n in range(f.size):
        a = alpha[n]
        if a == 0.0:
            continue
        if u[n] >= 0.0:
            raise OutOfDomain(
                f"u = {u[n]!r} at a vertex with alpha = {a!r}; "
                "the transformed coordinate must be negative"
            )
        # tanh branch: radicand in (0, 1); coth branch: radicand > 1.
        tanh_branch = (a < 0.0) if background is Background.HYPERBOLIC else (a > 0.0)
        if tanh_branch:
            f[n] = -math.log(math.cosh(u[n])) - 0.5 * math.log(abs(a))
        else:
            f[n] = -math.log(abs(math.sinh(u[n]))) - 0.5 * math.log(abs(a))
    return f


def conformal_jacobian_check(c: ConformalData, oriented, cfg=None) -> float:
    """|FD(dl/df_i) - g(d_ij)| with g = id / tanh / tan by background.

    Self-test that the generated lengths satisfy the defining derivative
    law of a conformal structure.
    """
    from .fd import FDConfig, fd_derivative

    if cfg is None:
        cfg = FDConfig()
    i, j = oriented
    idx = c.triangulation.vertex_index[i]

    def length_of(fvec):
        return edge_length(c.with_f(fvec), (i, j))

    fd = fd_derivative(length_of, c.f, idx, cfg)
    d = partial_length(c, oriented)
    if c.background is Background.EUCLIDEAN:
        g = d
    elif c.background is Background.HYPERBOLIC:
        g = math.tanh(d)
    else:
        g = math.tan(d)
    return abs(fd - g)
