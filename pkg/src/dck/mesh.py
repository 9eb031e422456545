"""Combinatorics of closed triangulated surfaces.

A :class:`Triangulation` indexes the vertices, undirected edges, oriented
edges and faces of a closed 2-manifold given as a face list.  Ids are
assigned deterministically (lexicographic), so rebuilding from an emitted
face list reproduces the same ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DuplicateFace, NonManifold


def _canonical_face(face):
    """Rotate a vertex triple so the smallest vertex comes first.

    Cyclic order is preserved; (2, 0, 1) and (0, 1, 2) are the same face,
    while (0, 2, 1) is the oppositely oriented one and stays distinct.
    """
    v = tuple(int(x) for x in face)
    if len(v) != 3:
        raise NonManifold(f"face {face!r} does not have three vertices")
    if len(set(v)) != 3:
        raise NonManifold(f"face {face!r} repeats a vertex")
    if min(v) < 0:
        raise NonManifold(f"face {face!r} has a negative vertex id")
    k = v.index(min(v))
    return v[k:] + v[:k]


@dataclass(frozen=True)
class Triangulation:
    """Immutable index of a closed triangulated surface."""

    vertices: tuple
    edges: tuple
    oriented_edges: tuple
    faces: tuple
    vertex_index: dict = field(repr=False)
    edge_index: dict = field(repr=False)
    oriented_index: dict = field(repr=False)
    faces_of_edge: tuple = field(repr=False)
    edges_of_vertex: dict = field(repr=False)

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def num_faces(self):
        return len(self.faces)

    def edge_id(self, i, j):
        return self.edge_index[(i, j) if i < j else (j, i)]

    def oriented_id(self, i, j):
        return self.oriented_index[(i, j)]

    def face_corner_pairs(self, face):
        """Directed edge pairs ((i,j), (j,k), (k,i)) in the face's cyclic order."""
        i, j, k = face
        return ((i, j), (j, k), (k, i))

    def face_edge_ids(self, face):
        return tuple(self.edge_id(a, b) for a, b in self.face_corner_pairs(face))


def _check_vertex_links(face_list):
    """Every vertex's link must be one cycle (closed-surface condition)."""
    link_edges = {}
    for f in face_list:
        for m in range(3):
            v = f[m]
            link_edges.setdefault(v, []).append((f[(m + 1) % 3], f[(m + 2) % 3]))
    for v, pairs in link_edges.items():
        degree = {}
        adjacency = {}
        for a, b in pairs:
            degree[a] = degree.get(a, 0) + 1
            degree[b] = degree.get(b, 0) + 1
            adjacency.setdefault(a, []).append(b)
            adjacency.setdefault(b, []).append(a)
        if any(d != 2 for d in degree.values()):
            raise NonManifold(f"link of vertex {v} is not a single cycle")
        # Connectivity: a 2-regular multigraph is a disjoint union of cycles.
        start = pairs[0][0]
        seen = {start}
        stack = [start]
        while stack:
            for nxt in adjacency[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if len(seen) != len(degree):
            raise NonManifold(f"link of vertex {v} splits into several cycles")


def build_triangulation(faces) -> Triangulation:
    """Index a face list as a closed triangulated surface.

    Faces are vertex triples with a cyclic order; ids for vertices, edges
    and faces are assigned lexicographically.  Raises
    :class:`~dck.errors.DuplicateFace` for a repeated face and
    :class:`~dck.errors.NonManifold` when an edge does not lie in exactly
    two faces or a vertex link is not a single cycle.
    """
    canonical = [_canonical_face(f) for f in faces]
    seen = set()
    for f in canonical:
        if f in seen:
            raise DuplicateFace(f"face {f!r} appears more than once")
        seen.add(f)
    face_list = tuple(sorted(canonical))

    edge_faces = {}
    for fid, f in enumerate(face_list):
        for m in range(3):
            a, b = f[m], f[(m + 1) % 3]
            key = (a, b) if a < b else (b, a)
            edge_faces.setdefault(key, []).append(fid)
    for key, fs in edge_faces.items():
        if len(fs) != 2:
            raise NonManifold(f"edge {key!r} lies in {len(fs)} faces, expected 2")

    _check_vertex_links(face_list)

    vertices = tuple(sorted({v for f in face_list for v in f}))
    vertex_index = {v: n for n, v in enumerate(vertices)}
    edges = tuple(sorted(edge_faces))
    edge_index = {e: n for n, e in enumerate(edges)}
    oriented_edges = tuple(
        o for e in edges for o in (e, (e[1], e[0]))
    )
    oriented_index = {o: n for n, o in enumerate(oriented_edges)}
    faces_of_edge = tuple(tuple(edge_faces[e]) for e in edges)
    edges_of_vertex = {}
    for eid, (a, b) in enumerate(edges):
        edges_of_vertex.setdefault(a, []).append(eid)
        edges_of_vertex.setdefault(b, []).append(eid)
    edges_of_vertex = {v: tuple(es) for v, es in edges_of_vertex.items()}

    return Triangulation(
        vertices=vertices,
        edges=edges,
        oriented_edges=oriented_edges,
        faces=face_list,
        vertex_index=vertex_index,
        edge_index=edge_index,
        oriented_index=oriented_index,
        faces_of_edge=faces_of_edge,
        edges_of_vertex=edges_of_vertex,
    )


def euler_characteristic(t: Triangulation) -> int:
    return t.num_vertices - t.num_edges + t.num_faces


def tetrahedron_faces():
    return ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))


def torus7_faces():
    """Minimal 7-vertex triangulation of the torus (14 faces, chi = 0)."""
    faces = []
    for i in range(7):
        faces.append((i, (i + 1) % 7, (i + 3) % 7))
        faces.append((i, (i + 2) % 7, (i + 3) % 7))
    return tuple(faces)


def genus2_faces():
    """A 10-vertex, 36-edge, 24-face triangulation of the genus-2 surface.

    Obtained by gluing two copies of the 7-vertex torus along a face and
    reducing to 10 vertices with bistellar flips; chi = -2.
    """
    return (
        (0, 4, 6), (0, 4, 9), (0, 6, 7), (0, 7, 3), (0, 8, 3), (0, 8, 9),
        (1, 2, 4), (1, 2, 6), (1, 3, 7), (1, 3, 9), (1, 5, 6), (1, 5, 9),
        (1, 7, 4), (2, 3, 5), (2, 3, 9), (2, 4, 5), (2, 6, 7), (2, 7, 9),
        (3, 5, 6), (3, 6, 8), (4, 6, 8), (4, 8, 7), (4, 9, 5), (7, 8, 9),
    )
