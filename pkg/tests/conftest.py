import numpy as np
import pytest

from dck.conformal import ConformalData
from dck.geometry import Background
from dck.mesh import (
    build_triangulation,
    genus2_faces,
    tetrahedron_faces,
    torus7_faces,
)

PILLOW_FACES = ((0, 1, 2), (0, 2, 1))


@pytest.fixture(scope="session")
def tetra():
    return build_triangulation(tetrahedron_faces())


@pytest.fixture(scope="session")
def torus():
    return build_triangulation(torus7_faces())


@pytest.fixture(scope="session")
def genus2():
    return build_triangulation(genus2_faces())


@pytest.fixture(scope="session")
def pillow():
    return build_triangulation(PILLOW_FACES)


def constant_data(t, background, alpha, eta, f=0.0):
    """ConformalData with constant alpha/eta/f over a triangulation."""
    fvec = np.full(t.num_vertices, float(f)) if np.isscalar(f) else np.asarray(f, float)
    return ConformalData(
        background,
        t,
        np.full(t.num_vertices, float(alpha)),
        np.full(t.num_edges, float(eta)),
        fvec,
    )


def pillow_data(t, background, alpha, eta, f):
    return ConformalData(
        background,
        t,
        np.asarray(alpha, float),
        np.asarray(eta, float),
        np.asarray(f, float),
    )
