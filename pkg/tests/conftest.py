import numpy as np
import pytest

from geodspec import MetricComplex, build_complex

_ACCEPTANCE = []


def random_planar_complex(rng, embed_3d=False):
    """Jittered grid with random diagonals; coordinates and the complex.

    Jitter is at most a quarter cell, so thinness stays bounded.
    """
    m, k = rng.integers(2, 12, 2)
    ii, jj = np.meshgrid(np.arange(m + 1), np.arange(k + 1), indexing="ij")
    P = np.stack([ii.ravel(), jj.ravel()], 1).astype(float)
    P += rng.uniform(-0.25, 0.25, P.shape)
    P *= rng.uniform(0.01, 100)

    def vid(i, j):
        return i * (k + 1) + j

    tris = []
    for i in range(m):
        for j in range(k):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)
            tris += [(a, b, d), (a, d, c)] if rng.random() < 0.5 else [(a, b, c), (b, d, c)]
    cx = build_complex(2, len(P), tris)
    if embed_3d:
        R, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        P = np.c_[P, np.zeros(len(P))] @ R.T
    return P, cx


def euclidean_metric(P, cx):
    e = cx.edges
    return MetricComplex(cx, np.linalg.norm(P[e[:, 0]] - P[e[:, 1]], axis=1))


def max_rel_diff(A, B):
    A = A.toarray() if hasattr(A, "toarray") else np.asarray(A)
    B = B.toarray() if hasattr(B, "toarray") else np.asarray(B)
    return float(np.abs(A - B).max() / np.abs(B).max())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def equilateral():
    cx = build_complex(2, 3, [[0, 1, 2]])
    return MetricComplex(cx, np.ones(3))


@pytest.fixture
def tetrahedron_boundary():
    cx = build_complex(2, 4, [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
    return MetricComplex(cx, np.ones(6))


@pytest.fixture
def criterion():
    """Record a named acceptance check; printed in the terminal summary."""
    def check(name, passed, detail=""):
        _ACCEPTANCE.append((name, bool(passed), detail))
        assert passed, f"{name}: {detail}"
    return check


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}  {detail}")
