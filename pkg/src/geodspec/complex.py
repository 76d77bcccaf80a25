"""Abstract simplicial complexes, face enumeration and combinatorial checks.

A complex is pure: it is given by its top-dimensional simplices, each a
strictly increasing tuple of 0-based vertex indices. Lower faces and stars
are derived once at construction and cached.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateVertexInSimplex, OutOfRangeVertex, WrongArity, ComplexError

Face = tuple[int, ...]


@dataclass(frozen=True)
class FaceIndex:
    """Faces of every dimension and the top-simplex star of each face.

    ``faces_by_dim[p]`` is an integer array of shape ``(num_p_faces, p + 1)``
    sorted lexicographically. ``star_n[face]`` lists the row indices (into
    ``SimplicialComplex.top_simplices``) of the top simplices containing it.
    """

    faces_by_dim: tuple[np.ndarray, ...]
    star_n: dict[Face, tuple[int, ...]]

    @property
    def edges(self) -> np.ndarray:
        return self.faces_by_dim[1]

    def counts(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.faces_by_dim)

    def euler_characteristic(self) -> int:
        return int(sum((-1) ** p * len(f) for p, f in enumerate(self.faces_by_dim)))


@dataclass(frozen=True)
class SimplicialComplex:
    dimension: int
    num_vertices: int
    top_simplices: np.ndarray
    faces: FaceIndex = field(init=False, repr=False, compare=False)
    edge_index: dict[tuple[int, int], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "faces", enumerate_faces(self))
        edges = self.faces.edges
        object.__setattr__(
            self, "edge_index", {(int(a), int(b)): e for e, (a, b) in enumerate(edges)}
        )

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return (self.dimension == other.dimension
                and self.num_vertices == other.num_vertices
                and np.array_equal(self.top_simplices, other.top_simplices))

    __hash__ = None

    @property
    def num_simplices(self) -> int:
        return len(self.top_simplices)

    @property
    def edges(self) -> np.ndarray:
        return self.faces.edges

    def relabel(self, perm: Sequence[int]) -> "SimplicialComplex":
        """Complex with vertex ``v`` renamed ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return build_complex(self.dimension, self.num_vertices, perm[self.top_simplices])


def build_complex(dimension: int, num_vertices: int,
                  top_simplices: Iterable[Sequence[int]]) -> SimplicialComplex:
    """Validate and canonicalize a pure simplicial complex.

    Each simplex is sorted, duplicates are removed and the rows are ordered
    lexicographically, so the result does not depend on input ordering.

    Raises
    ------
    WrongArity
        A simplex does not have ``dimension + 1`` entries.
    DuplicateVertexInSimplex
        A simplex repeats a vertex.
    OutOfRangeVertex
        An index falls outside ``[0, num_vertices)``.
    ComplexError
        A vertex belongs to no top simplex, or the sizes are inconsistent.
    """
    dimension = int(dimension)
    num_vertices = int(num_vertices)
    if dimension < 1:
        raise ComplexError(f"dimension must be >= 1, got {dimension}")
    if num_vertices < dimension + 1:
        raise ComplexError(f"need at least {dimension + 1} vertices, got {num_vertices}")

    rows = []
    for s in top_simplices:
        s = [int(v) for v in s]
        if len(s) != dimension + 1:
            raise WrongArity(f"simplex {s} has {len(s)} vertices, expected {dimension + 1}")
        if len(set(s)) != len(s):
            raise DuplicateVertexInSimplex(f"simplex {s} repeats a vertex")
        for v in s:
            if not 0 <= v < num_vertices:
                raise OutOfRangeVertex(f"vertex {v} of simplex {s} outside [0, {num_vertices})")
        rows.append(sorted(s))
    if not rows:
        raise ComplexError("complex has no top simplices")

    arr = np.unique(np.asarray(rows, dtype=np.int64), axis=0)
    used = np.zeros(num_vertices, dtype=bool)
    used[arr.ravel()] = True
    if not used.all():
        missing = np.flatnonzero(~used)[:10].tolist()
        raise ComplexError(f"vertices not contained in any top simplex: {missing}")
    arr.setflags(write=False)
    return SimplicialComplex(dimension, num_vertices, arr)


def enumerate_faces(complex: SimplicialComplex) -> FaceIndex:
    """All p-faces for ``0 <= p <= n`` together with their top-simplex stars."""
    top = complex.top_simplices
    n = complex.dimension
    faces_by_dim = []
    star: dict[Face, list[int]] = {}
    for p in range(n + 1):
        cols = list(combinations(range(n + 1), p + 1))
        sub = np.concatenate([top[:, c] for c in cols], axis=0)
        uniq = np.unique(sub, axis=0)
        uniq.setflags(write=False)
        faces_by_dim.append(uniq)
        for c in cols:
            for s_idx, f in enumerate(map(tuple, top[:, c].tolist())):
                star.setdefault(f, []).append(s_idx)
    star_n = {f: tuple(sorted(v)) for f, v in star.items()}
    return FaceIndex(tuple(faces_by_dim), star_n)


@dataclass
class ClosednessReport:
    """Outcome of :func:`check_closed_pseudomanifold`.

    ``bad_ridges`` holds ``(face, star_size)`` for every (n-1)-face not shared
    by exactly two top simplices. ``bad_vertex_links`` (n = 2 only) holds the
    vertices whose link is not a single cycle.
    """

    bad_ridges: list[tuple[Face, int]]
    bad_vertex_links: list[int]

    @property
    def ok(self) -> bool:
        return not self.bad_ridges and not self.bad_vertex_links

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "bad_ridges": [{"face": list(f), "star_size": s} for f, s in self.bad_ridges],
            "bad_vertex_links": list(self.bad_vertex_links),
        }


def _link_is_cycle(link_edges: list[tuple[int, int]]) -> bool:
    adj: dict[int, list[int]] = {}
    for a, b in link_edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    if any(len(nb) != 2 for nb in adj.values()):
        return False
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(adj)


def check_closed_pseudomanifold(complex: SimplicialComplex) -> ClosednessReport:
    """Check that every ridge has exactly two cofaces and, for surfaces,
    that every vertex link is one cycle."""
    n = complex.dimension
    star = complex.faces.star_n
    bad_ridges = []
    for f in map(tuple, complex.faces.faces_by_dim[n - 1].tolist()):
        size = len(star[f])
        if size != 2:
            bad_ridges.append((f, size))

    bad_links = []
    if n == 2:
        top = complex.top_simplices
        for v in range(complex.num_vertices):
            link = []
            for s in star[(v,)]:
                a, b = (int(w) for w in top[s] if w != v)
                link.append((a, b))
            if not _link_is_cycle(link):
                bad_links.append(v)
    return ClosednessReport(bad_ridges, bad_links)
