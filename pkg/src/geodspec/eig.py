"""Generalized symmetric eigenproblem ``Q v = lam M v`` for assembled form pairs."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import FormPair
from .errors import ConvergenceFailure, MassNotPositiveDefinite

DENSE_THRESHOLD = 3000
DEFAULT_REL_GAP = 0.05
DEFAULT_RTOL = 1e-8


@dataclass
class SpectralResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    clusters: list[list[int]]
    solver_info: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def to_dict(self, include_eigenvectors: bool = False) -> dict:
        out = {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "clusters": [list(map(int, c)) for c in self.clusters],
            "solver_info": self.solver_info,
        }
        if include_eigenvectors and self.eigenvectors is not None:
            out["eigenvectors"] = [[float(x) for x in col] for col in self.eigenvectors.T]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SpectralResult":
        vecs = data.get("eigenvectors")
        return cls(
            eigenvalues=np.asarray(data["eigenvalues"], dtype=float),
            eigenvectors=None if vecs is None else np.asarray(vecs, dtype=float).T,
            clusters=[list(c) for c in data["clusters"]],
            solver_info=dict(data.get("solver_info", {})),
        )


def cluster_eigenvalues(eigenvalues, rel_gap: float = DEFAULT_REL_GAP,
                        floor: float | None = None) -> list[list[int]]:
    """Split an ascending sequence into maximal runs of near-equal values.

    Neighbours ``a <= b`` share a cluster iff ``b - a <= rel_gap * max(b, floor)``.
    The default ``floor`` is ``|eigenvalues[1]| / 100``, which keeps a zero
    eigenvalue from absorbing tiny neighbours through a vanishing threshold.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0:
        return []
    if floor is None:
        floor = abs(lam[1]) / 100 if lam.size > 1 else 0.0
    clusters = [[0]]
    for i in range(1, lam.size):
        if lam[i] - lam[i - 1] <= rel_gap * max(lam[i], floor):
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def _fix_signs(V: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def residual_norms(form_pair: FormPair, eigenvalues, eigenvectors) -> np.ndarray:
    """Relative residuals ``|Qv - lam Mv| / ((|Q| + |lam| |M|) |v|)``, using 1-norms for the matrices."""
    Q, M = form_pair.stiffness, form_pair.mass
    nQ = spla.norm(Q, 1)
    nM = spla.norm(M, 1)
    lam = np.asarray(eigenvalues)
    V = np.asarray(eigenvectors)
    R = Q @ V - (M @ V) * lam
    return np.linalg.norm(R, axis=0) / ((nQ + np.abs(lam) * nM) * np.linalg.norm(V, axis=0))


def _finish(form_pair, lam, V, info, rel_gap):
    V = _fix_signs(V)
    res = residual_norms(form_pair, lam, V)
    info["max_residual"] = float(res.max()) if res.size else 0.0
    info["residuals"] = [float(r) for r in res]
    return SpectralResult(lam, V, cluster_eigenvalues(lam, rel_gap), info)


def solve_dense(form_pair: FormPair, num_eigs: int | None = None,
                rel_gap: float = DEFAULT_REL_GAP,
                dense_threshold: int = DENSE_THRESHOLD) -> SpectralResult:
    """Lowest ``num_eigs`` eigenpairs (all if None) by Cholesky reduction.

    With ``M = L L^T`` the problem becomes the standard symmetric problem
    for ``L^{-1} Q L^{-T}``; eigenvectors are mapped back by ``L^{-T}`` and
    are therefore M-orthonormal.
    """
    N = form_pair.size
    if N > dense_threshold:
        raise ValueError(f"N = {N} exceeds the dense threshold {dense_threshold}")
    k = N if num_eigs is None else int(num_eigs)
    if not 1 <= k <= N:
        raise ValueError(f"num_eigs must be in [1, {N}], got {num_eigs}")
    M = form_pair.mass.toarray()
    Q = form_pair.stiffness.toarray()
    try:
        L = la.cholesky(M, lower=True)
    except la.LinAlgError as exc:
        raise MassNotPositiveDefinite(str(exc)) from None
    X = la.solve_triangular(L, Q, lower=True)
    C = la.solve_triangular(L, X.T, lower=True)
    C = 0.5 * (C + C.T)
    lam, W = la.eigh(C, subset_by_index=(0, k - 1))
    V = la.solve_triangular(L.T, W, lower=False)
    info = {"method": "dense-cholesky", "iterations": 0, "n": N, "num_eigs": k}
    return _finish(form_pair, lam, V, info, rel_gap)


def _check_mass_pd(M: sp.csc_matrix) -> None:
    try:
        lu = spla.splu(M, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                       options={"SymmetricMode": True})
    except RuntimeError as exc:
        raise MassNotPositiveDefinite(str(exc)) from None
    d = lu.U.diagonal()
    if np.any(d <= 0) or not np.array_equal(lu.perm_r, lu.perm_c):
        raise MassNotPositiveDefinite("mass matrix has a nonpositive pivot")


def solve_iterative(form_pair: FormPair, num_eigs: int, shift: float = 0.0,
                    rel_gap: float = DEFAULT_REL_GAP, rtol: float = DEFAULT_RTOL,
                    max_iterations: int | None = None,
                    dense_threshold: int = DENSE_THRESHOLD) -> SpectralResult:
    """Lowest ``num_eigs`` eigenpairs near ``shift`` by shift-invert Lanczos.

    The factorized operator is ``Q - s M`` with
    ``s = shift - 1e-8 * trace(Q) / N`` so that the singular ``Q`` of a closed
    complex is never factored at ``shift = 0``. The Ritz vectors are refined by
    a final Rayleigh-Ritz step, which restores M-orthonormality inside
    clusters.

    Raises
    ------
    ConvergenceFailure
        ARPACK did not converge or a residual exceeds ``rtol``.
    """
    N = form_pair.size
    k = int(num_eigs)
    if k >= N - 1:
        if N <= dense_threshold:
            res = solve_dense(form_pair, min(k, N), rel_gap, dense_threshold)
            res.solver_info["fallback"] = "num_eigs too large for Lanczos"
            return res
        raise ValueError(f"num_eigs = {k} requires a dense solve but N = {N} is too large")
    Q = form_pair.stiffness.tocsc()
    M = form_pair.mass.tocsc()
    _check_mass_pd(M)

    sigma = shift - 1e-8 * Q.diagonal().sum() / N
    lu = spla.splu((Q - sigma * M).tocsc())
    counter = {"solves": 0}

    def _solve(x):
        counter["solves"] += 1
        return lu.solve(np.asarray(x, dtype=float))

    opinv = spla.LinearOperator((N, N), matvec=_solve, dtype=float)
    maxiter = max_iterations if max_iterations is not None else max(1000, 20 * N)
    ncv = min(N - 1, max(2 * k + 1, 20))
    v0 = np.ones(N) + np.linspace(0.0, 1.0, N)
    try:
        lam, V = spla.eigsh(Q, k=k, M=M, sigma=sigma, which="LM", OPinv=opinv,
                            ncv=ncv, maxiter=maxiter, tol=0.0, v0=v0)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(str(exc), max_iterations=maxiter) from None

    # Rayleigh-Ritz refinement on the converged subspace
    G = V.T @ (M @ V)
    H = V.T @ (Q @ V)
    lam, W = la.eigh(0.5 * (H + H.T), 0.5 * (G + G.T))
    V = V @ W

    info = {"method": "shift-invert-lanczos", "iterations": counter["solves"],
            "n": N, "num_eigs": k, "shift": float(sigma)}
    result = _finish(form_pair, lam, V, info, rel_gap)
    worst = result.solver_info["max_residual"]
    if worst > rtol:
        raise ConvergenceFailure(f"worst residual {worst:.3e} exceeds {rtol:.1e}",
                                 max_iterations=maxiter, worst_residual=worst)
    return result


def solve(form_pair: FormPair, num_eigs: int, method: str = "auto", **kwargs) -> SpectralResult:
    if method == "auto":
        method = "dense" if form_pair.size <= DENSE_THRESHOLD else "iterative"
    if method == "dense":
        return solve_dense(form_pair, num_eigs, **kwargs)
    if method == "iterative":
        return solve_iterative(form_pair, num_eigs, **kwargs)
    raise ValueError(f"unknown solver {method!r}")
