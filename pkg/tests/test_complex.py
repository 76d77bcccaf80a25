import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geodspec import build_complex, check_closed_pseudomanifold, enumerate_faces
from geodspec.errors import (ComplexError, DuplicateVertexInSimplex, OutOfRangeVertex,
                             WrongArity)
from geodspec.manifolds import ICOSAHEDRON_FACES

TETRA = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]


def test_single_triangle():
    cx = build_complex(2, 3, [[0, 1, 2]])
    assert cx.faces.counts() == (3, 3, 1)
    for e in cx.edges.tolist():
        assert len(cx.faces.star_n[tuple(e)]) == 1


def test_tetrahedron_boundary():
    cx = build_complex(2, 4, TETRA)
    assert cx.faces.counts() == (4, 6, 4)
    assert all(len(cx.faces.star_n[tuple(e)]) == 2 for e in cx.edges.tolist())
    assert cx.faces.euler_characteristic() == 2


@pytest.mark.parametrize("simplices, exc", [
    ([[0, 1, 1]], DuplicateVertexInSimplex),
    ([[0, 1, 3]], OutOfRangeVertex),
    ([[0, 1]], WrongArity),
    ([[0, -1, 2]], OutOfRangeVertex),
])
def test_malformed(simplices, exc):
    with pytest.raises(exc):
        build_complex(2, 3, simplices)


def test_unused_vertex_rejected():
    with pytest.raises(ComplexError):
        build_complex(2, 4, [[0, 1, 2]])


def test_canonical_ordering():
    cx = build_complex(2, 4, [[3, 2, 1], [0, 2, 1], [1, 0, 2]])
    assert cx.top_simplices.tolist() == [[0, 1, 2], [1, 2, 3]]


def test_icosahedron_counts():
    cx = build_complex(2, 12, ICOSAHEDRON_FACES)
    V, E, F = cx.faces.counts()
    assert (V, E, F) == (12, 30, 20)
    assert V - E + F == 2
    assert all(len(cx.faces.star_n[tuple(e)]) == 2 for e in cx.edges.tolist())


def test_closedness_report():
    assert check_closed_pseudomanifold(build_complex(2, 4, TETRA)).ok
    rep = check_closed_pseudomanifold(build_complex(2, 3, [[0, 1, 2]]))
    assert not rep.ok
    assert len(rep.bad_ridges) == 3


def test_bowtie_vertex_link():
    # two triangles sharing edge (1, 2), plus a third touching them only at vertex 2
    cx = build_complex(2, 6, [[0, 1, 2], [1, 2, 3], [2, 4, 5]])
    rep = check_closed_pseudomanifold(cx)
    assert not rep.ok
    assert 2 in rep.bad_vertex_links


def test_two_spheres_joined_at_a_vertex():
    # every edge has two cofaces, but vertex 0's link is two disjoint cycles
    second = [[0, 4, 5], [0, 4, 6], [0, 5, 6], [4, 5, 6]]
    rep = check_closed_pseudomanifold(build_complex(2, 7, TETRA + second))
    assert not rep.bad_ridges
    assert rep.bad_vertex_links == [0]


@settings(max_examples=30, deadline=None)
@given(st.permutations(range(20)))
def test_face_index_independent_of_input_order(order):
    base = build_complex(2, 12, ICOSAHEDRON_FACES)
    shuffled = build_complex(2, 12, [ICOSAHEDRON_FACES[i][::-1] for i in order])
    a, b = base.faces, shuffled.faces
    for p in range(3):
        assert np.array_equal(a.faces_by_dim[p], b.faces_by_dim[p])
    assert a.star_n == b.star_n
    again = enumerate_faces(shuffled)
    assert again.star_n == b.star_n


def test_every_face_in_a_top_simplex():
    cx = build_complex(2, 12, ICOSAHEDRON_FACES)
    tops = [set(s) for s in cx.top_simplices.tolist()]
    for p in range(2):
        for f in cx.faces.faces_by_dim[p].tolist():
            assert any(set(f) <= t for t in tops)


def test_tetrahedral_3d_complex():
    cx = build_complex(3, 5, [[0, 1, 2, 3], [0, 1, 2, 4], [0, 1, 3, 4], [0, 2, 3, 4],
                              [1, 2, 3, 4]])
    assert cx.faces.counts() == (5, 10, 10, 5)
    assert check_closed_pseudomanifold(cx).ok
