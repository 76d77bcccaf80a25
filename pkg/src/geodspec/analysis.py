"""Comparison of discrete and continuous spectral data.

Bounds that involve the unspecified dimensional constant ``C(n)`` take it as
an explicit argument (default 1), so their outputs hold only up to that
constant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from typing import Sequence

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .assembly import FormPair, _scatter
from .complex import SimplicialComplex
from .eig import SpectralResult, cluster_eigenvalues, DEFAULT_REL_GAP
from .errors import DegenerateMap, DegenerateSimplex, EmptyCluster, InsufficientEigenvalues


# -- restriction ---------------------------------------------------------------

def restrict(manifold, mesh, f) -> np.ndarray:
    """Sample a function at the mesh vertices.

    ``f`` is either a callable on an array of points or a
    ``(cluster_index, member_index)`` pair naming a model eigenfunction.
    """
    if callable(f):
        return np.asarray(f(mesh.positions), dtype=float)
    cluster_index, member_index = f
    return np.asarray(manifold.eigenfunction(cluster_index, member_index, mesh.positions))


def restrict_clusters(manifold, mesh, clusters: Sequence[int]) -> tuple[np.ndarray, list]:
    """Restrictions of every eigenfunction in the given analytic clusters.

    Returns the ``(N, F)`` matrix of samples and the ``(cluster, member)`` ids.
    """
    spec = manifold.spectrum(max(clusters) + 1)
    cols, ids = [], []
    for c in clusters:
        for m in range(spec[c][1]):
            cols.append(restrict(manifold, mesh, (c, m)))
            ids.append((c, m))
    return np.column_stack(cols), ids


# -- eigenvalue comparison -----------------------------------------------------

@dataclass
class ComparisonReport:
    pairs: list[tuple[int, float, float, float]]
    cluster_match: list[dict]
    mesh: dict = field(default_factory=dict)

    @property
    def max_relative_error(self) -> float:
        errs = [e for p, _, lm, e in self.pairs if lm > 0]
        return max(errs) if errs else 0.0

    @property
    def multiplicities_match(self) -> bool:
        return all(c["multiplicity_ok"] for c in self.cluster_match)

    def to_dict(self) -> dict:
        return {
            "pairs": [{"index": p, "lambda_T": lt, "lambda_M": lm, "rel_err": e}
                      for p, lt, lm, e in self.pairs],
            "cluster_match": self.cluster_match,
            "mesh": self.mesh,
            "max_relative_error": self.max_relative_error,
            "multiplicities_match": self.multiplicities_match,
        }

    def csv_rows(self) -> list[str]:
        rows = ["index,lambda_T,lambda_M,rel_err"]
        rows += [f"{p},{lt!r},{lm!r},{e!r}" for p, lt, lm, e in self.pairs]
        return rows


def compare_spectra(spectral_result: SpectralResult | Sequence[float],
                    analytic_spectrum: Sequence[tuple[float, int]],
                    rel_gap: float = DEFAULT_REL_GAP,
                    mesh: dict | None = None) -> ComparisonReport:
    """Match discrete eigenvalues to analytic ones index by index.

    The analytic clusters are expanded by multiplicity; analytic cluster
    ``c`` then covers a contiguous index range, and its multiplicity is
    deemed reproduced iff the discrete clustering has exactly one cluster on
    that range. Index 0 (eigenvalue 0) is compared in absolute terms.
    """
    lam_T = np.asarray(getattr(spectral_result, "eigenvalues", spectral_result), dtype=float)
    needed = sum(m for _, m in analytic_spectrum)
    if lam_T.size < needed:
        raise InsufficientEigenvalues(
            f"{needed} eigenvalues needed to cover {len(analytic_spectrum)} clusters, "
            f"got {lam_T.size}")
    discrete = cluster_eigenvalues(lam_T[:needed], rel_gap) if needed > 1 else [[0]]
    owner = {}
    for ci, c in enumerate(discrete):
        for i in c:
            owner[i] = ci

    pairs = []
    matches = []
    start = 0
    for ac, (lam_M, mult) in enumerate(analytic_spectrum):
        idx = list(range(start, start + mult))
        for p in idx:
            lt = float(lam_T[p])
            err = abs(lt - lam_M) / lam_M if lam_M > 0 else abs(lt - lam_M)
            pairs.append((p, lt, float(lam_M), float(err)))
        hit = sorted({owner[p] for p in idx})
        ok = len(hit) == 1 and discrete[hit[0]] == idx
        matches.append({
            "analytic_cluster": ac,
            "lambda_M": float(lam_M),
            "multiplicity": mult,
            "indices": idx,
            "discrete_clusters": [discrete[h] for h in hit],
            "multiplicity_ok": ok,
        })
        start += mult
    return ComparisonReport(pairs, matches, dict(mesh or {}))


# -- eigenfunction residuals ---------------------------------------------------

@dataclass
class ResidualReport:
    per_function: list[tuple[object, float]]
    eta: float
    cluster: tuple[int, int]

    @property
    def max_residual(self) -> float:
        return max(r for _, r in self.per_function)

    def to_dict(self) -> dict:
        return {
            "per_function": [{"id": list(i) if isinstance(i, tuple) else i, "residual": r}
                             for i, r in self.per_function],
            "eta": self.eta,
            "cluster": list(self.cluster),
            "max_residual": self.max_residual,
        }


def projection_residual(form_pair: FormPair, spectral_result: SpectralResult,
                        restricted_vectors, cluster: tuple[int, int],
                        ids: Sequence | None = None) -> ResidualReport:
    """Relative squared distance, in the discrete L2 norm, from each vector
    to the span of the discrete eigenvectors with indices ``start <= i < stop``.

    The ratio is ``|v - P v|_M**2 / |v|_M**2`` with ``P`` the M-orthogonal
    projection; the difference is formed explicitly rather than by
    subtracting squared norms, which keeps tiny residuals accurate.
    """
    start, stop = cluster
    if stop <= start:
        raise EmptyCluster(f"cluster range [{start}, {stop}) is empty")
    V = spectral_result.eigenvectors
    if V is None or stop > V.shape[1]:
        raise EmptyCluster(f"eigenvectors {start}..{stop - 1} not available")
    M = form_pair.mass
    F = V[:, start:stop]
    Y = np.asarray(restricted_vectors, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    coeff = F.T @ (M @ Y)
    R = Y - F @ coeff
    num = np.einsum("ij,ij->j", R, M @ R)
    den = np.einsum("ij,ij->j", Y, M @ Y)
    ratios = num / den
    if ids is None:
        ids = list(range(Y.shape[1]))

    lam = spectral_result.eigenvalues
    gaps = []
    if start > 0:
        gaps.append(lam[start] - lam[start - 1])
    if stop < lam.size:
        gaps.append(lam[stop] - lam[stop - 1])
    eta = float(min(gaps)) if gaps else math.inf
    return ResidualReport([(i, float(r)) for i, r in zip(ids, ratios)], eta, (start, stop))


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


# -- a priori bounds -----------------------------------------------------------

# The admissible-mesh formula raises its base to the power 3 n**3, which
# multiplies any rounding in the base by up to 81. Both bounds are evaluated in
# decimal arithmetic and rounded once, so the returned float is correctly rounded.
_BOUND_DIGITS = 40


def theorem1_admissible_mesh(n: int, epsilon: float, Lambda: float, diameter: float,
                             injectivity: float, thinness: float, p: int,
                             C_n: float = 1.0) -> float:
    """Largest mesh size for which the eigenvalue sandwich
    ``(1 - eps) lam_p(T) <= lam_p(M) <= (1 + eps) lam_p(T)`` is certified:

        diameter * C_n * (i / (diameter * thinness * e**(e**Lambda) * p))**(3 n**3) * eps
    """
    with localcontext() as ctx:
        ctx.prec = _BOUND_DIGITS
        base = Decimal(injectivity) / (Decimal(diameter) * Decimal(thinness)
                                       * Decimal(Lambda).exp().exp() * p)
        value = Decimal(diameter) * Decimal(C_n) * base ** (3 * n ** 3) * Decimal(epsilon)
    return float(value)


def theorem1_mesh_ok(mesh: float, *args, **kwargs) -> bool:
    return mesh <= theorem1_admissible_mesh(*args, **kwargs)


def cheng_bound(n: int, k: int, Lambda: float, diameter: float, injectivity: float,
                C_n: float = 1.0) -> float:
    """Upper bound ``C_n (d/i)**2 e**(n e**Lambda / 2) k**2 / d**2`` on ``lam_k``."""
    with localcontext() as ctx:
        ctx.prec = _BOUND_DIGITS
        d = Decimal(diameter)
        value = (Decimal(C_n) * (d / Decimal(injectivity)) ** 2
                 * (n * Decimal(Lambda).exp() / 2).exp() * k ** 2 / d ** 2)
    return float(value)


# -- min-max comparison --------------------------------------------------------

@dataclass
class MinMaxReport:
    alpha: float
    beta: float
    lambda_1: np.ndarray
    lambda_2: np.ndarray
    violations: list[int]

    @property
    def ratio(self) -> float:
        return self.beta / self.alpha


def _dense(a):
    return a.toarray() if sp.issparse(a) else np.asarray(a, dtype=float)


def minmax_compare(form_pair_1: FormPair, form_pair_2: FormPair, Phi,
                   rtol: float = 1e-9) -> MinMaxReport:
    """Best constants ``alpha``, ``beta`` for the map ``Phi`` and a check of
    ``lam_k(2) <= (beta / alpha) lam_k(1)`` for every ``k < dim E_1``.

    ``alpha`` is the smallest eigenvalue of ``Phi^T M2 Phi`` relative to
    ``M1``. ``beta`` is the largest eigenvalue of ``Phi^T Q2 Phi`` relative to
    ``Q1`` on the complement of ``ker Q1``; it is infinite if ``Phi`` does not
    send ``ker Q1`` into ``ker Q2``. A reported violation can only come from
    numerical error.
    """
    M1, Q1 = _dense(form_pair_1.mass), _dense(form_pair_1.stiffness)
    M2, Q2 = _dense(form_pair_2.mass), _dense(form_pair_2.stiffness)
    P = _dense(Phi)
    A_m = P.T @ M2 @ P
    A_q = P.T @ Q2 @ P
    A_m, A_q = 0.5 * (A_m + A_m.T), 0.5 * (A_q + A_q.T)

    mu = la.eigvalsh(A_m, M1)
    if mu[0] <= 1e-12 * mu[-1]:
        raise DegenerateMap("Phi^T M2 Phi is singular")
    alpha = float(mu[0])

    w, U = la.eigh(Q1)
    kernel = w <= 1e-10 * w[-1]
    K, Z = U[:, kernel], U[:, ~kernel]
    leak = np.abs(K.T @ A_q @ K).max() if K.shape[1] else 0.0
    if leak > 1e-10 * np.abs(A_q).max():
        beta = math.inf
    else:
        beta = float(la.eigvalsh(Z.T @ A_q @ Z, Z.T @ Q1 @ Z)[-1])

    lam1 = la.eigvalsh(Q1, M1)
    lam2 = la.eigvalsh(Q2, M2)
    ratio = beta / alpha
    scale = abs(lam2).max()
    violations = [k for k in range(min(lam1.size, lam2.size))
                  if lam2[k] > ratio * lam1[k] * (1 + rtol) + rtol * scale]
    return MinMaxReport(alpha, beta, lam1, lam2, violations)


# -- Euclidean P1 oracle -------------------------------------------------------

def p1_oracle(coordinates, complex: SimplicialComplex) -> FormPair:
    """P1 finite element mass and stiffness matrices from vertex coordinates.

    ``coordinates`` is either ``(N, d)`` per-vertex or ``(S, n+1, d)``
    per-simplex (for periodic domains), with ``d >= n``. Each simplex is
    expressed in an orthonormal frame of its affine hull; barycentric
    gradients are the rows of the inverse of ``[[1, ..., 1], [x_0, ..., x_n]]``.
    """
    n = complex.dimension
    top = complex.top_simplices
    X = np.asarray(coordinates, dtype=float)
    if X.ndim == 2:
        X = X[top]
    S = X.shape[0]
    E = X[:, 1:, :] - X[:, :1, :]
    if X.shape[2] > n:
        # orthonormal frame of each simplex's affine hull
        Qf, _ = np.linalg.qr(np.swapaxes(E, 1, 2))
        local = np.concatenate([np.zeros((S, 1, n)), E @ Qf], axis=1)
    else:
        local = X - X[:, :1, :]
    H = np.concatenate([np.ones((S, 1, n + 1)), np.swapaxes(local, 1, 2)], axis=1)
    detH = np.linalg.det(H)
    if np.any(np.abs(detH) <= 1e-14 * np.abs(E).max() ** n):
        raise DegenerateSimplex("a simplex has zero volume in the given coordinates")
    vol = np.abs(detH) / math.factorial(n)
    grads = np.linalg.inv(H)[:, :, 1:]            # (S, n+1, n): row a = grad of lambda_a
    K = vol[:, None, None] * (grads @ np.swapaxes(grads, 1, 2))
    pattern = (np.ones((n + 1, n + 1)) + np.eye(n + 1)) / ((n + 1) * (n + 2))
    Mloc = vol[:, None, None] * pattern
    N = complex.num_vertices
    return FormPair(_scatter(top, Mloc, N), _scatter(top, K, N))
