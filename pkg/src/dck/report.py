"""Geometry reports and canonical JSON output.

All CLI output flows through :func:`canonical_dumps`, which renders floats
with 17 significant digits and preserves construction order, so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import math

import numpy as np

from . import conformal as cf
from . import metric as mt
from . import variation
from .mesh import euler_characteristic
from .surface_io import Surface


def _format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, ".17g")
    if not any(ch in text for ch in ".eE"):
        text += ".0"
    return text


def _encode(obj, pieces):
    if obj is None:
        pieces.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        pieces.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        pieces.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        pieces.append(_format_float(float(obj)))
    elif isinstance(obj, str):
        import json

        pieces.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, dict):
        pieces.append("{")
        for n, (key, value) in enumerate(obj.items()):
            if n:
                pieces.append(",")
            _encode(str(key), pieces)
            pieces.append(":")
            _encode(value, pieces)
        pieces.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        pieces.append("[")
        for n, value in enumerate(obj):
            if n:
                pieces.append(",")
            _encode(value, pieces)
        pieces.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}: {obj!r}")


def canonical_dumps(obj) -> str:
    """Deterministic JSON: 17-significant-digit floats, insertion order."""
    pieces = []
    _encode(obj, pieces)
    pieces.append("\n")
    return "".join(pieces)


def validation_report(surface: Surface) -> dict:
    """Manifold, conformal-domain, and compatibility checks for a surface."""
    t = surface.triangulation()
    c = surface.conformal(t)
    bad_faces = cf.validate_conformal(c)
    report = {
        "background": surface.background.value,
        "counts": {
            "vertices": t.num_vertices,
            "edges": t.num_edges,
            "faces": t.num_faces,
        },
        "euler_characteristic": euler_characteristic(t),
        "invalid_faces": [
            {"face": list(face), "reason": reason} for face, reason in bad_faces
        ],
    }
    is_metric = False
    if not bad_faces:
        cert = mt.certify_metric(cf.premetric(c))
        report["compatibility"] = {
            "max_residual": cert.max_residual,
            "tolerance": cert.tolerance,
            "is_metric": cert.is_metric,
        }
        is_metric = cert.is_metric
    report["ok"] = not bad_faces and is_metric
    return report


def geometry_report(surface: Surface, jacobian: bool = False) -> dict:
    """Lengths, partials, angles, curvatures, areas, centers and heights."""
    t = surface.triangulation()
    c = surface.conformal(t)
    pm = cf.premetric(c)
    dual = mt.duality_structure(pm)
    system = variation.curvature_system(c)
    u = cf.u_from_f(c)

    vertices = []
    for n, v in enumerate(t.vertices):
        vertices.append(
            {
                "id": v,
                "alpha": float(c.alpha[n]),
                "f": float(c.f[n]),
                "u": float(u[n]),
                "K": float(system.K[n]),
            }
        )

    edges = []
    for i, j in t.edges:
        edges.append(
            {
                "i": i,
                "j": j,
                "eta": float(c.eta[t.edge_id(i, j)]),
                "length": cf.edge_length(c, (i, j)),
                "d_ij": pm.partial(i, j),
                "d_ji": pm.partial(j, i),
            }
        )

    faces = []
    for fid, face in enumerate(t.faces):
        fd = dual.faces[fid]
        angles = [system.angles[(face, v)] for v in face]
        faces.append(
            {
                "vertices": list(face),
                "angles": angles,
                "area": float(system.areas[fid]),
                "center": [float(x) for x in fd.center],
                "beta": fd.beta,
                "concurrency_residual": fd.concurrency_residual,
                "heights": list(fd.heights),
                "compatibility_residual": mt.compatibility_residual(pm, face),
            }
        )

    report = {
        "background": surface.background.value,
        "counts": {
            "vertices": t.num_vertices,
            "edges": t.num_edges,
            "faces": t.num_faces,
        },
        "euler_characteristic": euler_characteristic(t),
        "total_curvature": float(system.K.sum()),
        "total_area": float(system.areas.sum()),
        "vertices": vertices,
        "edges": edges,
        "faces": faces,
    }
    if jacobian:
        J = system.jacK_u.tocoo()
        order = np.lexsort((J.col, J.row))
        report["jacobian"] = {
            "rows": int(J.shape[0]),
            "cols": int(J.shape[1]),
            "vertex_order": list(t.vertices),
            "entries": [
                [int(J.row[k]), int(J.col[k]), float(J.data[k])] for k in order
            ],
        }
    return report


def trace_report(trace) -> dict:
    return {
        "status": trace.status,
        "iterations": [
            {
                "iteration": r.iteration,
                "residual_norm": r.residual_norm,
                "step_length": r.step_length,
                "functional": r.functional,
                "domain_backtracks": r.domain_backtracks,
            }
            for r in trace.iterations
        ],
        "warnings": list(trace.warnings),
    }
