import math

import numpy as np
import pytest
import scipy.linalg as la
import scipy.sparse as sp

from geodspec import (MetricComplex, assemble, build_complex, cluster_eigenvalues,
                      generate_sphere_mesh, generate_torus_mesh, solve_dense, solve_iterative)
from geodspec.assembly import FormPair
from geodspec.eig import SpectralResult, residual_norms
from geodspec.errors import MassNotPositiveDefinite


def test_cluster_examples():
    assert cluster_eigenvalues([0, 1.99, 2.00, 2.01, 5.9], 0.05) == [[0], [1, 2, 3], [4]]
    assert cluster_eigenvalues([3.0] * 5) == [[0, 1, 2, 3, 4]]
    geo = 2.0 ** np.arange(8)
    assert cluster_eigenvalues(geo, 0.05) == [[i] for i in range(8)]
    assert cluster_eigenvalues([]) == []


def test_tetrahedron_spectrum(tetrahedron_boundary):
    fp = assemble(tetrahedron_boundary)
    res = solve_dense(fp)
    lam = res.eigenvalues
    assert abs(lam[0]) < 1e-10 * lam[1]
    assert lam[1] == pytest.approx(lam[3], rel=1e-12)
    assert res.clusters == [[0], [1, 2, 3]]
    # independent generalized solver
    ref = la.eigh(fp.stiffness.toarray(), fp.mass.toarray(), eigvals_only=True)
    np.testing.assert_allclose(lam, ref, rtol=1e-12, atol=1e-12)


def test_constant_is_ground_state():
    fp = assemble(generate_sphere_mesh(1.0, 1).metric_complex)
    res = solve_dense(fp, 5)
    assert abs(res.eigenvalues[0]) < 1e-10 * res.eigenvalues[1]
    v0 = res.eigenvectors[:, 0]
    np.testing.assert_allclose(v0, v0[0], rtol=1e-8)
    assert v0[0] > 0


def test_circle_closed_form():
    # circulant 4-cycle: lam_j = 6 (1 - cos t) / (h^2 (2 + cos t)), t = 2 pi j / 4
    h = math.pi / 2
    cx = build_complex(1, 4, [[0, 1], [1, 2], [2, 3], [0, 3]])
    fp = assemble(MetricComplex(cx, np.full(4, h)))
    lam = solve_dense(fp).eigenvalues
    t = 2 * np.pi * np.arange(4) / 4
    exact = np.sort(6 * (1 - np.cos(t)) / (h ** 2 * (2 + np.cos(t))))
    np.testing.assert_allclose(lam, exact, atol=1e-12)
    np.testing.assert_allclose(exact, [0, 12 / math.pi ** 2, 12 / math.pi ** 2,
                                       48 / math.pi ** 2], atol=1e-14)


def test_m_orthonormal_and_residuals():
    fp = assemble(generate_sphere_mesh(1.0, 2).metric_complex)
    res = solve_dense(fp, 20)
    V = res.eigenvectors
    G = V.T @ (fp.mass @ V)
    assert np.abs(G - np.eye(20)).max() < 1e-8
    assert res.solver_info["max_residual"] < 1e-8


def test_iterative_matches_dense():
    for mesh in (generate_sphere_mesh(1.0, 2), generate_torus_mesh((2.0, 3.0), 10, 12)):
        fp = assemble(mesh.metric_complex)
        d = solve_dense(fp, 12)
        it = solve_iterative(fp, 12)
        scale = d.eigenvalues[1:]
        np.testing.assert_allclose(it.eigenvalues[1:], d.eigenvalues[1:], rtol=1e-8)
        assert abs(it.eigenvalues[0]) < 1e-8 * scale[0]
        V = it.eigenvectors
        assert np.abs(V.T @ (fp.mass @ V) - np.eye(12)).max() < 1e-8
        assert it.solver_info["iterations"] > 0


def test_iterative_level4_residuals():
    fp = assemble(generate_sphere_mesh(1.0, 4).metric_complex)
    assert fp.size == 2562
    res = solve_iterative(fp, 30)
    assert res.solver_info["max_residual"] <= 1e-8
    assert max(residual_norms(fp, res.eigenvalues, res.eigenvectors)) <= 1e-8


def test_iterative_full_request_falls_back():
    fp = assemble(generate_torus_mesh((1.0, 1.0), 4, 4).metric_complex)
    res = solve_iterative(fp, fp.size)
    assert res.solver_info["method"] == "dense-cholesky"
    assert len(res) == fp.size


def test_indefinite_mass_rejected():
    M = sp.csr_matrix(np.diag([1.0, -1.0, 1.0]))
    Q = sp.csr_matrix(np.eye(3))
    with pytest.raises(MassNotPositiveDefinite):
        solve_dense(FormPair(M, Q))


def test_permutation_invariance(rng):
    mesh = generate_sphere_mesh(1.0, 1)
    perm = rng.permutation(mesh.num_vertices)
    a = solve_dense(assemble(mesh.metric_complex)).eigenvalues
    b = solve_dense(assemble(mesh.metric_complex.relabel(perm))).eigenvalues
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-10)


def test_scale_law():
    mc = generate_torus_mesh((1.0, 1.5), 6, 7).metric_complex
    a = solve_dense(assemble(mc), 10).eigenvalues
    b = solve_dense(assemble(mc.scaled(3.0)), 10).eigenvalues
    np.testing.assert_allclose(b[1:], a[1:] / 9.0, rtol=1e-10)


def test_serialization_roundtrip(tetrahedron_boundary):
    res = solve_dense(assemble(tetrahedron_boundary))
    back = SpectralResult.from_dict(res.to_dict(include_eigenvectors=True))
    np.testing.assert_array_equal(back.eigenvalues, res.eigenvalues)
    np.testing.assert_array_equal(back.eigenvectors, res.eigenvectors)
    assert back.clusters == res.clusters
    assert "eigenvectors" not in res.to_dict()
