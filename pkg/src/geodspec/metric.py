"""Edge lengths on a simplicial complex and the geometry they determine.

Every simplex is treated through the Gram matrix of its edge vectors at a
base vertex, reconstructed from distances only by the polarization identity

    G[l, m] = (d(k, l)**2 + d(k, m)**2 - d(l, m)**2) / 2.

Its determinant is the squared volume factor ``(n! * vol)**2`` of the
Euclidean simplex with the same edge lengths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .complex import SimplicialComplex
from .errors import (AsymmetricEdgeLength, ExtraEdgeLength, MissingEdgeLength,
                     NonRealizableSimplex)

DEGENERACY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MetricComplex:
    """A simplicial complex with one length per edge.

    ``edge_lengths[e]`` is the length of ``complex.edges[e]``; missing
    lengths are stored as NaN so that :func:`validate_metric` can report them.
    """

    complex: SimplicialComplex
    edge_lengths: np.ndarray
    _simplex_edges: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        lengths = np.asarray(self.edge_lengths, dtype=float).copy()
        if lengths.shape != (len(self.complex.edges),):
            raise ValueError(
                f"expected {len(self.complex.edges)} edge lengths, got shape {lengths.shape}")
        lengths.setflags(write=False)
        object.__setattr__(self, "edge_lengths", lengths)
        object.__setattr__(self, "_simplex_edges", _simplex_edge_table(self.complex))

    @classmethod
    def from_mapping(cls, complex: SimplicialComplex,
                     lengths: Mapping[tuple[int, int], float]) -> "MetricComplex":
        """Build from ``{(i, j): length}``.

        Either orientation of a pair may be given; if both are, they must
        agree exactly. Pairs that are not edges of the complex are rejected.
        """
        out = np.full(len(complex.edges), np.nan)
        for (i, j), value in lengths.items():
            i, j = int(i), int(j)
            key = (min(i, j), max(i, j))
            e = complex.edge_index.get(key)
            if e is None:
                raise ExtraEdgeLength(f"pair {key} is not an edge of the complex")
            value = float(value)
            if not np.isnan(out[e]) and out[e] != value:
                raise AsymmetricEdgeLength(
                    f"edge {key} given lengths {out[e]!r} and {value!r}")
            out[e] = value
        return cls(complex, out)

    @property
    def dimension(self) -> int:
        return self.complex.dimension

    def length(self, i: int, j: int) -> float:
        e = self.complex.edge_index.get((min(i, j), max(i, j)))
        if e is None or np.isnan(self.edge_lengths[e]):
            raise MissingEdgeLength(f"no length for pair ({i}, {j})")
        return float(self.edge_lengths[e])

    def as_mapping(self) -> dict[tuple[int, int], float]:
        return {(int(a), int(b)): float(l)
                for (a, b), l in zip(self.complex.edges, self.edge_lengths)}

    def scaled(self, c: float) -> "MetricComplex":
        return MetricComplex(self.complex, self.edge_lengths * c)

    def relabel(self, perm: Sequence[int]) -> "MetricComplex":
        perm = np.asarray(perm, dtype=np.int64)
        new = self.complex.relabel(perm)
        return MetricComplex.from_mapping(
            new, {(int(perm[a]), int(perm[b])): l for (a, b), l in self.as_mapping().items()})

    def squared_distances(self) -> np.ndarray:
        """Per-simplex squared distance matrices, shape ``(S, n+1, n+1)``."""
        n = self.dimension
        sq = self.edge_lengths[self._simplex_edges] ** 2
        out = np.zeros((len(sq), n + 1, n + 1))
        iu = np.triu_indices(n + 1, 1)
        out[:, iu[0], iu[1]] = sq
        out[:, iu[1], iu[0]] = sq
        return out


def _simplex_edge_table(complex: SimplicialComplex) -> np.ndarray:
    """Edge index of each local vertex pair (upper-triangle order) of each top simplex."""
    n = complex.dimension
    top = complex.top_simplices
    N = complex.num_vertices
    edges = complex.edges
    keys = edges[:, 0] * N + edges[:, 1]
    iu = np.triu_indices(n + 1, 1)
    query = top[:, iu[0]] * N + top[:, iu[1]]
    return np.searchsorted(keys, query)


def gram_from_squared_distances(D: np.ndarray, base: int) -> np.ndarray:
    """Gram matrices at local vertex ``base`` from a stack of squared distance matrices."""
    others = [i for i in range(D.shape[-1]) if i != base]
    dk = D[..., base, others]
    return 0.5 * (dk[..., :, None] + dk[..., None, :] - D[..., others, :][..., others])


def gram_matrix(mc: MetricComplex, simplex: Sequence[int], base_vertex: int) -> np.ndarray:
    """Distance-reconstructed Gram matrix of ``simplex`` at ``base_vertex``.

    Rows and columns follow the non-base vertices in increasing order; the
    diagonal entry for vertex ``l`` is ``d(base, l)**2``.
    """
    verts = sorted(int(v) for v in simplex)
    if base_vertex not in verts:
        raise ValueError(f"base vertex {base_vertex} not in simplex {verts}")
    k = len(verts)
    D = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            D[a, b] = D[b, a] = mc.length(verts[a], verts[b]) ** 2
    return gram_from_squared_distances(D, verts.index(base_vertex))


def gram_determinants(mc: MetricComplex) -> np.ndarray:
    """``det`` of the Gram matrix for every top simplex and every base, shape ``(S, n+1)``."""
    D = mc.squared_distances()
    n = mc.dimension
    return np.stack([np.linalg.det(gram_from_squared_distances(D, k)) for k in range(n + 1)],
                    axis=1)


def _det_tolerance(mc: MetricComplex, tolerance: float = DEGENERACY_TOL) -> float:
    return tolerance * float(np.nanmax(mc.edge_lengths)) ** (2 * mc.dimension)


def _check_realizable(dets: np.ndarray, tol: float):
    bad = np.flatnonzero(dets < -tol)
    if bad.size:
        raise NonRealizableSimplex(
            f"{bad.size} simplices have negative Gram determinant "
            f"(first: simplex {int(bad[0])}, det {dets[bad[0]]:.3e})")


def volume_factors(mc: MetricComplex) -> np.ndarray:
    """``sqrt(det G)`` at base vertex ``i_sigma(0)`` for every top simplex.

    Dividing by ``n!`` gives the Euclidean volume. Determinants in
    ``[-tol, 0]`` are clamped to zero.
    """
    D = mc.squared_distances()
    dets = np.linalg.det(gram_from_squared_distances(D, 0))
    _check_realizable(dets, _det_tolerance(mc))
    return np.sqrt(np.clip(dets, 0.0, None))


def simplex_volume_factor(mc: MetricComplex, simplex: Sequence[int]) -> float:
    verts = sorted(int(v) for v in simplex)
    det = float(np.linalg.det(gram_matrix(mc, verts, verts[0])))
    tol = _det_tolerance(mc)
    if det < -tol:
        raise NonRealizableSimplex(f"simplex {verts} has Gram determinant {det:.3e}")
    return math.sqrt(max(det, 0.0))


@dataclass(frozen=True)
class MeshStats:
    mesh: float
    min_edge: float
    thinness: float
    min_gram_det: float
    edge_ratio: float
    shape_term: float

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in self.__dict__.items()}


def mesh_stats(mc: MetricComplex) -> MeshStats:
    """Mesh size, shortest edge and thinness.

    Thinness is the larger of ``m_T * det(G_k)**(-1/2n)`` maximized over all
    top simplices and all base vertices ``k``, and the ratio of the longest
    to the shortest edge. It is infinite for a degenerate simplex.
    """
    n = mc.dimension
    lengths = mc.edge_lengths
    mesh = float(lengths.max())
    min_edge = float(lengths.min())
    dets = gram_determinants(mc)
    _check_realizable(dets.ravel(), _det_tolerance(mc))
    min_det = float(dets.min())
    if min_det <= 0:
        shape = math.inf
    else:
        shape = mesh * min_det ** (-1.0 / (2 * n))
    ratio = mesh / min_edge
    return MeshStats(mesh, min_edge, max(shape, ratio), min_det, ratio, shape)


@dataclass
class MetricReport:
    nonpositive_lengths: list[tuple[int, int, float]]
    missing_edges: list[tuple[int, int]]
    degenerate: list[tuple[int, int, float]]  # (simplex index, local base, det)

    @property
    def ok(self) -> bool:
        return not (self.nonpositive_lengths or self.missing_edges or self.degenerate)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "nonpositive_lengths": [list(t) for t in self.nonpositive_lengths],
            "missing_edges": [list(t) for t in self.missing_edges],
            "degenerate": [{"simplex": s, "base": k, "det": d} for s, k, d in self.degenerate],
        }


def validate_metric(mc: MetricComplex, tolerance: float = DEGENERACY_TOL) -> MetricReport:
    """Report missing or nonpositive lengths and simplices whose Gram
    determinant at some base is below ``tolerance * m_T**(2n)``."""
    edges = mc.complex.edges
    lengths = mc.edge_lengths
    missing = [(int(a), int(b)) for (a, b), l in zip(edges, lengths) if np.isnan(l)]
    nonpos = [(int(a), int(b), float(l)) for (a, b), l in zip(edges, lengths)
              if not np.isnan(l) and l <= 0]
    degenerate = []
    if not missing and not nonpos:
        dets = gram_determinants(mc)
        cutoff = tolerance * float(lengths.max()) ** (2 * mc.dimension)
        for s, k in zip(*np.nonzero(dets < cutoff)):
            degenerate.append((int(s), int(k), float(dets[s, k])))
    return MetricReport(nonpos, missing, degenerate)
