"""Discrete conformal structures on piecewise constant-curvature surfaces.

The package implements:

* model trigonometry and per-face embeddings (:mod:`dck.geometry`),
* closed-surface combinatorics (:mod:`dck.mesh`),
* partial edge lengths, dual centers and heights (:mod:`dck.metric`),
* the (alpha, eta) family of conformal structures (:mod:`dck.conformal`),
* analytic angle/curvature derivatives (:mod:`dck.variation`),
* a curvature functional and Newton uniformization (:mod:`dck.solver`),
* a finite-difference oracle (:mod:`dck.fd`),
* a JSON-based CLI (:mod:`dck.cli`).
"""

from .geometry import Background
from .mesh import Triangulation, build_triangulation, euler_characteristic

__all__ = [
    "Background",
    "Triangulation",
    "build_triangulation",
    "euler_characteristic",
]

__version__ = "0.1.0"
