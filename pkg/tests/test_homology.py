from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import sympy_h1
from systolic.complex import FlagComplex
from systolic.errors import InputError
from systolic.fixtures import cycle, filled_triangle, octahedron, triangular_patch, wheel
from systolic.group import abelianization
from systolic.homology import (
    Move,
    apply_move,
    boundary_of_triangles,
    bounded_nullhomotopy,
    chain_of_loop,
    homology_h1,
    homology_h1_rank,
    move_triangles,
    pi1_presentation,
    replay,
    smith_diagonal,
)


def test_h1_examples():
    assert homology_h1_rank(filled_triangle()) == 0
    assert homology_h1_rank(cycle(6)) == 1
    assert homology_h1_rank(octahedron()) == 0


def test_smith_diagonal_known():
    # a 2x2 matrix with invariant factors 1 and 6 (determinant 6)
    assert smith_diagonal([[2, 0], [0, 3]], 2) == [1, 6]
    assert smith_diagonal([[2, 4], [6, 8]], 2) == [2, 4]
    assert smith_diagonal([], 3) == []


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=4))
def test_smith_diagonal_matches_sympy(rows):
    import sympy
    from sympy.matrices.normalforms import smith_normal_form

    snf = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
    theirs = sorted(abs(int(snf[i, i])) for i in range(min(snf.shape)) if snf[i, i] != 0)
    assert smith_diagonal(rows, 3) == theirs


def random_complexes():
    return st.integers(3, 8).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] < e[1])),
        )
    )


@settings(max_examples=80, deadline=None)
@given(random_complexes())
def test_h1_matches_sympy(g):
    n, edges = g
    c = FlagComplex.from_edges(range(n), edges)
    h = homology_h1(c)
    assert (h.rank, sorted(h.torsion)) == sympy_h1(range(n), edges, c.triangles())


def test_pi1_presentations():
    tri = pi1_presentation(filled_triangle(), 0)
    assert abelianization(tri.presentation) == (0, ())
    hexagon = pi1_presentation(cycle(6), 0)
    assert len(hexagon.presentation.base_generators) == 1
    assert hexagon.presentation.relators == ()
    octa = pi1_presentation(octahedron(), 0)
    assert abelianization(octa.presentation) == (0, ())


def test_generator_loops_are_closed_paths():
    pi = pi1_presentation(octahedron(), 0)
    c = octahedron()
    for name in pi.generator_edges:
        loop = pi.generator_loop(name)
        assert loop[0] == 0
        for a, b in zip(loop, loop[1:] + loop[:1]):
            assert a == b or c.has_edge(a, b)


def test_contract_triangle():
    res = bounded_nullhomotopy(filled_triangle(), (0, 1, 2))
    assert res.contractible
    assert len(res.moves) == 1


def test_hollow_hexagon_is_unknown():
    res = bounded_nullhomotopy(cycle(6), tuple(range(6)), budget=1000)
    assert res.verdict == "unknown"


def test_wheel_ring_contracts():
    res = bounded_nullhomotopy(wheel(6), (1, 2, 3, 4, 5, 6))
    assert res.contractible
    assert len(res.moves) <= 6
    assert len(replay(wheel(6), (1, 2, 3, 4, 5, 6), res.moves)) <= 1


def test_bad_move_rejected():
    with pytest.raises(InputError):
        apply_move(cycle(6), (0, 1, 2, 3, 4, 5), Move("collapse", 0))


def certificate_matches(c, loop):
    """The triangles used by a contraction add up to the loop as a 1-chain."""
    res = bounded_nullhomotopy(c, loop)
    assert res.contractible
    tris = []
    cur = tuple(loop)
    for mv in res.moves:
        tris.extend(move_triangles(cur, mv))
        cur = apply_move(c, cur, mv)
    lhs = Counter({k: v for k, v in chain_of_loop(loop).items() if v})
    rhs = Counter({k: v for k, v in boundary_of_triangles(tris).items() if v})
    return dict(lhs) == dict(rhs)


def test_certificate_chain_is_triangle_boundary():
    patch = triangular_patch(3)
    for ring in patch.rings[1:3]:
        assert certificate_matches(patch.complex, tuple(ring))
    assert certificate_matches(wheel(6), (1, 2, 3, 4, 5, 6))
    assert certificate_matches(octahedron(), (0, 2, 1, 3))
