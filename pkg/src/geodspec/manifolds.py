"""Closed model surfaces with known spectra: the round sphere and the flat torus.

Each model supplies geodesic distances, a refinable family of geodesic
triangulations, its Laplace spectrum with multiplicities, and an
L2-orthonormal real eigenbasis that can be sampled at mesh vertices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.special import factorial, lpmv

from .complex import build_complex
from .errors import GridTooCoarse, IndexOutOfRange
from .metric import MetricComplex


@dataclass(frozen=True)
class Sphere:
    radius: float = 1.0

    kind = "sphere"
    dimension = 2

    @property
    def diameter(self) -> float:
        return math.pi * self.radius

    @property
    def injectivity_radius(self) -> float:
        return math.pi * self.radius

    @property
    def curvature_bound(self) -> float:
        return 1.0 / self.radius ** 2

    @property
    def Lambda(self) -> float:
        """Scale-free curvature bound ``diameter * sqrt(|K|)``."""
        return self.diameter * math.sqrt(self.curvature_bound)

    def tag(self) -> dict:
        return {"kind": self.kind, "parameters": {"radius": self.radius}}

    def distance(self, p, q) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        cross = np.linalg.norm(np.cross(p, q), axis=-1)
        dot = np.sum(p * q, axis=-1)
        # atan2 form: same angle as arccos(dot / r^2) but accurate for short edges
        return self.radius * np.arctan2(cross, dot)

    def spectrum(self, count: int) -> list[tuple[float, int]]:
        r2 = self.radius ** 2
        return [(l * (l + 1) / r2, 2 * l + 1) for l in range(count)]

    def eigenfunction(self, cluster_index: int, member_index: int, points) -> np.ndarray:
        """Real spherical harmonic of degree ``cluster_index``.

        ``member_index`` runs over ``0 .. 2l``; member ``l`` is the zonal
        harmonic, members ``l + m`` (``m > 0``) use ``cos(m phi)`` and members
        ``l - m`` use ``sin(m phi)``.
        """
        l = int(cluster_index)
        if l < 0 or not 0 <= member_index <= 2 * l:
            raise IndexOutOfRange(f"no member {member_index} in degree {l}")
        m = member_index - l
        pts = np.asarray(points, dtype=float)
        rho = np.linalg.norm(pts, axis=-1)
        cos_t = np.clip(pts[..., 2] / rho, -1.0, 1.0)
        phi = np.arctan2(pts[..., 1], pts[..., 0])
        am = abs(m)
        norm = math.sqrt((2 * l + 1) / (4 * math.pi) * factorial(l - am, exact=True)
                         / factorial(l + am, exact=True)) / self.radius
        P = lpmv(am, l, cos_t)
        if m == 0:
            return norm * P
        if m > 0:
            return math.sqrt(2) * norm * P * np.cos(am * phi)
        return math.sqrt(2) * norm * P * np.sin(am * phi)


@dataclass(frozen=True)
class FlatTorus:
    periods: tuple[float, float] = (2 * math.pi, 2 * math.pi)

    kind = "flat_torus"
    dimension = 2

    def __post_init__(self):
        object.__setattr__(self, "periods", (float(self.periods[0]), float(self.periods[1])))

    @property
    def diameter(self) -> float:
        a, b = self.periods
        return 0.5 * math.hypot(a, b)

    @property
    def injectivity_radius(self) -> float:
        return 0.5 * min(self.periods)

    @property
    def curvature_bound(self) -> float:
        return 0.0

    @property
    def Lambda(self) -> float:
        return 0.0

    def tag(self) -> dict:
        return {"kind": self.kind, "parameters": {"periods": list(self.periods)}}

    def nearest_image(self, p, q) -> np.ndarray:
        """Translate of ``q`` by a period vector closest to ``p``."""
        per = np.asarray(self.periods)
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        best = None
        best_d = None
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                cand = q + per * (i, j)
                d = np.linalg.norm(cand - p, axis=-1)
                if best is None:
                    best, best_d = cand, d
                else:
                    take = d < best_d
                    best = np.where(take[..., None], cand, best)
                    best_d = np.minimum(d, best_d)
        return best

    def distance(self, p, q) -> np.ndarray:
        return np.linalg.norm(self.nearest_image(p, q) - np.asarray(p, dtype=float), axis=-1)

    def spectrum(self, count: int) -> list[tuple[float, int]]:
        return [(lam, len(reps) * 2 if lam > 0 else 1)
                for lam, reps in _torus_clusters(self.periods, count)]

    def eigenfunction(self, cluster_index: int, member_index: int, points) -> np.ndarray:
        """Normalized ``cos`` / ``sin`` of ``2 pi (j x / a + k y / b)``.

        Frequencies ``(j, k)`` of a cluster are taken up to sign, in
        increasing order; each contributes a cosine member then a sine member.
        """
        clusters = _torus_clusters(self.periods, int(cluster_index) + 1)
        if cluster_index < 0 or cluster_index >= len(clusters):
            raise IndexOutOfRange(f"no cluster {cluster_index}")
        lam, reps = clusters[cluster_index]
        a, b = self.periods
        pts = np.asarray(points, dtype=float)
        if lam == 0:
            if member_index != 0:
                raise IndexOutOfRange(f"cluster 0 has one member, asked for {member_index}")
            return np.full(pts.shape[:-1], 1.0 / math.sqrt(a * b))
        if not 0 <= member_index < 2 * len(reps):
            raise IndexOutOfRange(f"cluster {cluster_index} has {2 * len(reps)} members")
        j, k = reps[member_index // 2]
        phase = 2 * math.pi * (j * pts[..., 0] / a + k * pts[..., 1] / b)
        trig = np.cos if member_index % 2 == 0 else np.sin
        return math.sqrt(2.0 / (a * b)) * trig(phase)


@lru_cache(maxsize=64)
def _torus_clusters(periods: tuple[float, float], count: int):
    """First ``count`` distinct torus eigenvalues with their half-lattice frequencies."""
    a, b = periods
    J = K = 2
    while True:
        js, ks = np.meshgrid(np.arange(-J, J + 1), np.arange(-K, K + 1), indexing="ij")
        lam = (2 * math.pi * js / a) ** 2 + (2 * math.pi * ks / b) ** 2
        complete = min((2 * math.pi * (J + 1) / a) ** 2, (2 * math.pi * (K + 1) / b) ** 2)
        flat = sorted(zip(lam.ravel().tolist(), js.ravel().tolist(), ks.ravel().tolist()))
        flat = [t for t in flat if t[0] < complete]
        groups: list[tuple[float, list]] = []
        for value, j, k in flat:
            if groups and abs(value - groups[-1][0]) <= 1e-12 * max(value, 1.0):
                groups[-1][1].append((j, k))
            else:
                groups.append((value, [(j, k)]))
        if len(groups) >= count:
            out = []
            for value, members in groups[:count]:
                reps = sorted((j, k) for j, k in members if j > 0 or (j == 0 and k > 0))
                out.append((0.0 if not reps else value, tuple(reps)))
            return tuple(out)
        J, K = 2 * J, 2 * K


def geodesic_distance(manifold, p, q):
    return manifold.distance(p, q)


def analytic_spectrum(manifold, count: int) -> list[tuple[float, int]]:
    """First ``count`` distinct eigenvalues of the manifold with multiplicities."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return manifold.spectrum(count)


def eigenfunction(manifold, cluster_index: int, member_index: int, point):
    return manifold.eigenfunction(cluster_index, member_index, point)


def manifold_from_tag(tag: dict):
    kind = tag["kind"]
    params = tag.get("parameters", {})
    if kind == "sphere":
        return Sphere(float(params.get("radius", 1.0)))
    if kind == "flat_torus":
        return FlatTorus(tuple(params.get("periods", (2 * math.pi, 2 * math.pi))))
    raise ValueError(f"unknown manifold kind {kind!r}")


@dataclass(frozen=True, eq=False)
class VertexedMesh:
    metric_complex: MetricComplex
    positions: np.ndarray
    manifold: Sphere | FlatTorus

    @property
    def complex(self):
        return self.metric_complex.complex

    @property
    def num_vertices(self) -> int:
        return self.complex.num_vertices

    def edge_length_mismatch(self) -> float:
        """Largest relative gap between stored lengths and geodesic distances."""
        e = self.complex.edges
        d = self.manifold.distance(self.positions[e[:, 0]], self.positions[e[:, 1]])
        return float(np.max(np.abs(d - self.metric_complex.edge_lengths) / d))

    def simplex_coordinates(self) -> np.ndarray:
        """Flat coordinates of every top simplex, shape ``(S, 3, 2)``; torus only.

        Vertices after the first are moved to the periodic image nearest the
        first, so each simplex is realized without wraparound.
        """
        if not isinstance(self.manifold, FlatTorus):
            raise TypeError("flat simplex coordinates exist only for the flat torus")
        top = self.complex.top_simplices
        P = self.positions[top]
        base = P[:, :1, :]
        return np.concatenate(
            [base, self.manifold.nearest_image(np.broadcast_to(base, P[:, 1:].shape), P[:, 1:])],
            axis=1)


def _mesh_from_positions(manifold, positions, triangles) -> VertexedMesh:
    cx = build_complex(2, len(positions), triangles)
    e = cx.edges
    lengths = manifold.distance(positions[e[:, 0]], positions[e[:, 1]])
    return VertexedMesh(MetricComplex(cx, lengths), positions, manifold)


_PHI = (1 + math.sqrt(5)) / 2
ICOSAHEDRON_VERTICES = np.array([
    (-1, _PHI, 0), (1, _PHI, 0), (-1, -_PHI, 0), (1, -_PHI, 0),
    (0, -1, _PHI), (0, 1, _PHI), (0, -1, -_PHI), (0, 1, -_PHI),
    (_PHI, 0, -1), (_PHI, 0, 1), (-_PHI, 0, -1), (-_PHI, 0, 1),
])
ICOSAHEDRON_FACES = [
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
]


def generate_sphere_mesh(radius: float = 1.0, subdivision_level: int = 0) -> VertexedMesh:
    """Icosahedron split ``subdivision_level`` times, midpoints pushed radially onto the sphere.

    Has ``10 * 4**level + 2`` vertices and ``20 * 4**level`` triangles.
    """
    if subdivision_level < 0:
        raise ValueError("subdivision level must be >= 0")
    verts = [v / np.linalg.norm(v) for v in ICOSAHEDRON_VERTICES]
    faces = list(ICOSAHEDRON_FACES)
    for _ in range(subdivision_level):
        cache: dict[tuple[int, int], int] = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    positions = radius * np.array(verts)
    return _mesh_from_positions(Sphere(radius), positions, faces)


def _grid_id(i, j, m, k):
    return (i % m) * k + (j % k)


def generate_torus_mesh(periods=(2 * math.pi, 2 * math.pi), grid_m: int = 8,
                        grid_k: int = 8) -> VertexedMesh:
    """Regular ``grid_m x grid_k`` grid on the torus, each cell cut along the
    diagonal from ``(i, j)`` to ``(i+1, j+1)``.

    Vertex ``(i, j)`` has index ``i * grid_k + j`` and sits at
    ``(a i / grid_m, b j / grid_k)``.
    """
    if grid_m < 3 or grid_k < 3:
        raise GridTooCoarse(f"grid {grid_m}x{grid_k} is not simplicial; need both >= 3")
    torus = FlatTorus(tuple(periods))
    a, b = torus.periods
    ii, jj = np.meshgrid(np.arange(grid_m), np.arange(grid_k), indexing="ij")
    positions = np.stack([a * ii.ravel() / grid_m, b * jj.ravel() / grid_k], axis=1)
    tris = []
    for i in range(grid_m):
        for j in range(grid_k):
            v00 = _grid_id(i, j, grid_m, grid_k)
            v10 = _grid_id(i + 1, j, grid_m, grid_k)
            v01 = _grid_id(i, j + 1, grid_m, grid_k)
            v11 = _grid_id(i + 1, j + 1, grid_m, grid_k)
            tris += [(v00, v10, v11), (v00, v11, v01)]
    return _mesh_from_positions(torus, positions, tris)


def torus_prolongation(grid_m: int, grid_k: int) -> sp.csr_matrix:
    """Interpolation from the ``m x k`` torus grid to the ``2m x 2k`` refinement.

    Both grids use the same diagonal orientation, so the coarse piecewise
    linear space is a subspace of the fine one and this matrix is exact.
    """
    fm, fk = 2 * grid_m, 2 * grid_k
    rows, cols, vals = [], [], []
    for I in range(fm):
        for J in range(fk):
            r = I * fk + J
            i, j = I // 2, J // 2
            if I % 2 == 0 and J % 2 == 0:
                parents = [(i, j)]
            elif I % 2 == 1 and J % 2 == 0:
                parents = [(i, j), (i + 1, j)]
            elif I % 2 == 0:
                parents = [(i, j), (i, j + 1)]
            else:
                parents = [(i, j), (i + 1, j + 1)]
            for pi, pj in parents:
                rows.append(r)
                cols.append(_grid_id(pi, pj, grid_m, grid_k))
                vals.append(1.0 / len(parents))
    return sp.csr_matrix((vals, (rows, cols)), shape=(fm * fk, grid_m * grid_k))
