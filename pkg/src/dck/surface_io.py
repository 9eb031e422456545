"""Surface files: the JSON input/output schema and an OBJ importer.

A surface file carries the triangulation plus the conformal data:

.. code-block:: json

    {
      "schema_version": 1,
      "background": "hyperbolic",
      "vertices": [{"id": 0, "alpha": 0.0, "f": 0.0}, ...],
      "edges":    [{"i": 0, "j": 1, "eta": 1.0}, ...],
      "faces":    [[0, 1, 2], ...],
      "solver":   {"max_iterations": 50, "grad_tolerance": 1e-10},
      "target_K": [{"id": 0, "K": 0.0}, ...]
    }

``solver`` and ``target_K`` are optional.  Structural problems (bad JSON,
missing references, unknown solver keys) raise
:class:`~dck.errors.SchemaError`; geometric problems surface later when
the triangulation or conformal data is built.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .conformal import ConformalData
from .errors import SchemaError
from .geometry import Background
from .mesh import Triangulation, build_triangulation

SCHEMA_VERSION = 1

_SOLVER_KEYS = {
    "max_iterations": int,
    "grad_tolerance": float,
    "line_search_shrink": float,
    "line_search_decrease": float,
    "domain_backtrack_limit": int,
    "quadrature_points": int,
    "trust_radius": float,
    "gauge": str,
}


@dataclass(frozen=True)
class Surface:
    """Parsed surface file, still independent of any derived geometry."""

    background: Background
    vertex_ids: tuple
    alpha_by_id: dict
    f_by_id: dict
    eta_by_pair: dict
    faces: tuple
    solver_options: dict = field(default_factory=dict)
    target_by_id: dict | None = None

    def triangulation(self) -> Triangulation:
        return build_triangulation(self.faces)

    def conformal(self, t: Triangulation | None = None) -> ConformalData:
        if t is None:
            t = self.triangulation()
        alpha = np.array([self.alpha_by_id[v] for v in t.vertices])
        f = np.array([self.f_by_id[v] for v in t.vertices])
        eta = np.array([self.eta_by_pair[e] for e in t.edges])
        return ConformalData(self.background, t, alpha, eta, f)

    def target_array(self, t: Triangulation):
        if self.target_by_id is None:
            return None
        return np.array([self.target_by_id[v] for v in t.vertices])

    def with_f_array(self, t: Triangulation, f) -> "Surface":
        f_by_id = {v: float(f[n]) for n, v in enumerate(t.vertices)}
        return Surface(
            background=self.background,
            vertex_ids=self.vertex_ids,
            alpha_by_id=self.alpha_by_id,
            f_by_id=f_by_id,
            eta_by_pair=self.eta_by_pair,
            faces=self.faces,
            solver_options=self.solver_options,
            target_by_id=self.target_by_id,
        )


def _require(cond, message):
    if not cond:
        raise SchemaError(message)


def _number(x, what):
    _require(isinstance(x, (int, float)) and not isinstance(x, bool),
             f"{what} must be a number, got {x!r}")
    return float(x)


def surface_from_dict(data) -> Surface:
    _require(isinstance(data, dict), "surface file must be a JSON object")
    _require("schema_version" in data, "missing schema_version field")
    _require(data["schema_version"] == SCHEMA_VERSION,
             f"unsupported schema_version {data['schema_version']!r}")
    try:
        background = Background.from_name(data.get("background"))
    except ValueError as exc:
        raise SchemaError(str(exc)) from None

    _require(isinstance(data.get("vertices"), list) and data["vertices"],
             "vertices must be a nonempty list")
    alpha_by_id, f_by_id = {}, {}
    for entry in data["vertices"]:
        _require(isinstance(entry, dict), f"vertex entry {entry!r} must be an object")
        _require("id" in entry, f"vertex entry {entry!r} missing id")
        vid = entry["id"]
        _require(isinstance(vid, int) and vid >= 0,
                 f"vertex id {vid!r} must be a nonnegative integer")
        _require(vid not in alpha_by_id, f"duplicate vertex id {vid}")
        alpha_by_id[vid] = _number(entry.get("alpha", 0.0), f"vertex {vid} alpha")
        f_by_id[vid] = _number(entry.get("f", 0.0), f"vertex {vid} f")

    _require(isinstance(data.get("edges"), list) and data["edges"],
             "edges must be a nonempty list")
    eta_by_pair = {}
    for entry in data["edges"]:
        _require(isinstance(entry, dict), f"edge entry {entry!r} must be an object")
        _require("i" in entry and "j" in entry, f"edge entry {entry!r} missing i/j")
        i, j = entry["i"], entry["j"]
        _require(isinstance(i, int) and isinstance(j, int) and i != j,
                 f"edge ({i!r}, {j!r}) must join two distinct integer ids")
        for v in (i, j):
            _require(v in alpha_by_id, f"edge ({i}, {j}) references missing vertex {v}")
        pair = (i, j) if i < j else (j, i)
        _require(pair not in eta_by_pair, f"duplicate edge {pair}")
        eta_by_pair[pair] = _number(entry.get("eta", 1.0), f"edge {pair} eta")

    _require(isinstance(data.get("faces"), list) and data["faces"],
             "faces must be a nonempty list")
    faces = []
    for raw in data["faces"]:
        _require(isinstance(raw, (list, tuple)) and len(raw) == 3,
                 f"face {raw!r} must be a triple")
        face = tuple(raw)
        for v in face:
            _require(isinstance(v, int) and v in alpha_by_id,
                     f"face {face!r} references missing vertex {v!r}")
        for m in range(3):
            a, b = face[m], face[(m + 1) % 3]
            pair = (a, b) if a < b else (b, a)
            _require(pair in eta_by_pair,
                     f"face {face!r} uses edge {pair} that is not listed")
        faces.append(face)

    solver_options = {}
    if "solver" in data:
        _require(isinstance(data["solver"], dict), "solver must be an object")
        for key, value in data["solver"].items():
            _require(key in _SOLVER_KEYS, f"unknown solver option {key!r}")
            kind = _SOLVER_KEYS[key]
            if kind is float:
                solver_options[key] = _number(value, f"solver option {key}")
            elif kind is int:
                _require(isinstance(value, int), f"solver option {key} must be an integer")
                solver_options[key] = value
            else:
                _require(isinstance(value, str), f"solver option {key} must be a string")
                solver_options[key] = value

    target_by_id = None
    if "target_K" in data:
        _require(isinstance(data["target_K"], list), "target_K must be a list")
        target_by_id = {}
        for entry in data["target_K"]:
            _require(isinstance(entry, dict) and "id" in entry and "K" in entry,
                     f"target entry {entry!r} must carry id and K")
            vid = entry["id"]
            _require(vid in alpha_by_id, f"target references missing vertex {vid!r}")
            _require(vid not in target_by_id, f"duplicate target id {vid}")
            target_by_id[vid] = _number(entry["K"], f"target K at {vid}")
        _require(set(target_by_id) == set(alpha_by_id),
                 "target_K must cover every vertex exactly once")

    return Surface(
        background=background,
        vertex_ids=tuple(sorted(alpha_by_id)),
        alpha_by_id=alpha_by_id,
        f_by_id=f_by_id,
        eta_by_pair=eta_by_pair,
        faces=tuple(faces),
        solver_options=solver_options,
        target_by_id=target_by_id,
    )


def load_surface(path) -> Surface:
    """Parse a surface file (JSON, or OBJ connectivity as a convenience)."""
    if str(path).lower().endswith(".obj"):
        return surface_from_obj(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {path}: {exc}") from exc
    return surface_from_dict(data)


def surface_to_dict(surface: Surface) -> dict:
    """Serializable form, deterministically ordered by ids."""
    return {
        "schema_version": SCHEMA_VERSION,
        "background": surface.background.value,
        "vertices": [
            {"id": v, "alpha": surface.alpha_by_id[v], "f": surface.f_by_id[v]}
            for v in sorted(surface.alpha_by_id)
        ],
        "edges": [
            {"i": i, "j": j, "eta": surface.eta_by_pair[(i, j)]}
            for i, j in sorted(surface.eta_by_pair)
        ],
        "faces": [list(f) for f in sorted(tuple(f) for f in surface.faces)],
        **(
            {"solver": dict(sorted(surface.solver_options.items()))}
            if surface.solver_options
            else {}
        ),
        **(
            {
                "target_K": [
                    {"id": v, "K": surface.target_by_id[v]}
                    for v in sorted(surface.target_by_id)
                ]
            }
            if surface.target_by_id is not None
            else {}
        ),
    }


def surface_from_obj(path) -> Surface:
    """Connectivity-only OBJ import: geometry ignored, conformal defaults.

    Vertices become ids 0..n-1 with alpha = 0, f = 0; every edge gets
    eta = 1; the background defaults to Euclidean.  Useful for feeding
    meshes from other tools into validate/report.
    """
    n_vertices = 0
    faces = []
    try:
        with open(path, "r", encoding="utf-8", errors="replace") as handle:
            for line_no, line in enumerate(handle, 1):
                parts = line.split()
                if not parts or parts[0].startswith("#"):
                    continue
                if parts[0] == "v":
                    n_vertices += 1
                elif parts[0] == "f":
                    if len(parts) != 4:
                        raise SchemaError(
                            f"{path}:{line_no}: only triangular faces supported"
                        )
                    idx = []
                    for token in parts[1:]:
                        head = token.split("/")[0]
                        try:
                            k = int(head)
                        except ValueError:
                            raise SchemaError(
                                f"{path}:{line_no}: bad vertex reference {token!r}"
                            ) from None
                        idx.append(k - 1 if k > 0 else n_vertices + k)
                    faces.append(tuple(idx))
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if not faces:
        raise SchemaError(f"{path}: no faces found")
    used = sorted({v for f in faces for v in f})
    if used and (used[0] < 0 or used[-1] >= n_vertices):
        raise SchemaError(f"{path}: face references vertex outside 1..{n_vertices}")
    pairs = set()
    for f in faces:
        for m in range(3):
            a, b = f[m], f[(m + 1) % 3]
            pairs.add((a, b) if a < b else (b, a))
    return Surface(
        background=Background.EUCLIDEAN,
        vertex_ids=tuple(used),
        alpha_by_id={v: 0.0 for v in used},
        f_by_id={v: 0.0 for v in used},
        eta_by_pair={p: 1.0 for p in pairs},
        faces=tuple(faces),
    )
