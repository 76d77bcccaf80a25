"""Sparse assembly of the discrete L2 (mass) and Dirichlet (stiffness) forms.

For a top simplex with vertices ``i_0 < ... < i_n``, volume factor
``w = sqrt(det G)`` (``G`` the Gram matrix at ``i_0``) contributes

* mass:       ``w / (n+2)!`` times ``(1 + delta_ab)`` to entry ``(i_a, i_b)``;
* stiffness:  ``w / n!`` times ``B G^{-1} B^T`` where ``B`` maps vertex values
  to the differences ``y_{i_k} - y_{i_0}``.

Both are the P1 finite element matrices when the lengths come from a flat
simplex, but they only ever look at edge lengths.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import SingularGram
from .metric import (MeshStats, MetricComplex, _check_realizable, _det_tolerance,
                     gram_from_squared_distances, mesh_stats)


@dataclass(frozen=True)
class FormPair:
    mass: sp.csr_matrix
    stiffness: sp.csr_matrix
    stats: MeshStats | None = None

    @property
    def size(self) -> int:
        return self.mass.shape[0]


def _scatter(top: np.ndarray, local: np.ndarray, N: int) -> sp.csr_matrix:
    k = top.shape[1]
    rows = np.repeat(top, k, axis=1).ravel()
    cols = np.tile(top, (1, k)).ravel()
    mat = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(N, N)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def _base_grams(mc: MetricComplex) -> tuple[np.ndarray, np.ndarray]:
    G = gram_from_squared_distances(mc.squared_distances(), 0)
    dets = np.linalg.det(G)
    _check_realizable(dets, _det_tolerance(mc))
    return G, dets


def local_mass(mc: MetricComplex) -> np.ndarray:
    n = mc.dimension
    _, dets = _base_grams(mc)
    w = np.sqrt(np.clip(dets, 0.0, None)) / math.factorial(n + 2)
    pattern = np.ones((n + 1, n + 1)) + np.eye(n + 1)
    return w[:, None, None] * pattern


def local_stiffness(mc: MetricComplex) -> np.ndarray:
    n = mc.dimension
    G, dets = _base_grams(mc)
    bad = np.flatnonzero(dets <= _det_tolerance(mc))
    if bad.size:
        raise SingularGram(f"{bad.size} simplices are degenerate (first: {int(bad[0])})")
    Ginv = np.linalg.inv(G)
    Ginv = 0.5 * (Ginv + np.swapaxes(Ginv, 1, 2))
    B = np.vstack([-np.ones((1, n)), np.eye(n)])
    w = np.sqrt(dets) / math.factorial(n)
    K = w[:, None, None] * (B @ Ginv @ B.T)
    # B.T @ ones == 0, so K annihilates constants up to roundoff
    return K


def assemble_mass(mc: MetricComplex) -> sp.csr_matrix:
    """Mass matrix ``M`` with ``y @ M @ y`` equal to the discrete squared L2 norm."""
    return _scatter(mc.complex.top_simplices, local_mass(mc), mc.complex.num_vertices)


def assemble_stiffness(mc: MetricComplex) -> sp.csr_matrix:
    """Stiffness matrix ``Q`` with ``y @ Q @ y`` equal to the discrete Dirichlet energy."""
    return _scatter(mc.complex.top_simplices, local_stiffness(mc), mc.complex.num_vertices)


def assemble(mc: MetricComplex) -> FormPair:
    return FormPair(assemble_mass(mc), assemble_stiffness(mc), mesh_stats(mc))


def to_triplets(matrix: sp.spmatrix) -> list[tuple[int, int, float]]:
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    return [(int(coo.row[i]), int(coo.col[i]), float(coo.data[i])) for i in order]


def write_triplets_json(matrix: sp.spmatrix, path: str | Path) -> None:
    payload = {"shape": list(matrix.shape),
               "entries": [list(t) for t in to_triplets(matrix)]}
    Path(path).write_text(json.dumps(payload, sort_keys=True))


def read_triplets_json(path: str | Path) -> sp.csr_matrix:
    payload = json.loads(Path(path).read_text())
    entries = np.asarray(payload["entries"], dtype=float).reshape(-1, 3)
    return sp.coo_matrix((entries[:, 2], (entries[:, 0].astype(int), entries[:, 1].astype(int))),
                         shape=tuple(payload["shape"])).tocsr()


def write_matrix_market(matrix: sp.spmatrix, path: str | Path) -> None:
    scipy.io.mmwrite(str(path), sp.coo_matrix(matrix), symmetry="symmetric", precision=17)
