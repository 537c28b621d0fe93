import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from systolic.complex import Cycle, FlagComplex, is_m_large
from systolic.errors import BudgetExceeded, XNotSixLarge
from systolic.fixtures import cycle, wheel
from systolic.homology import homology_h1
from systolic.saturation import (
    BIJECTIVE,
    CONSECUTIVE,
    NON_CONSECUTIVE,
    DiagonalMove,
    FExtension,
    find_bad_loop,
    replay_moves,
    resolve_bad_loop,
    saturate,
    verify_homotopy_preservation,
    verify_systolic,
)

# X = square a b c d = 0 1 2 3 with the diagonal a-c
SQUARE_X = FlagComplex.from_edges(range(4), [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
# X = pentagon 0..4 fanned from 0
PENTAGON_X = FlagComplex.from_edges(range(5), [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (0, 3)])
PATH_X = FlagComplex.from_edges(range(3), [(0, 1), (0, 2)])
TRIANGLE_X = FlagComplex.from_edges(range(3), [(0, 1), (1, 2), (0, 2)])


def hollow(n, f, x):
    return FExtension.standalone(cycle(n), f, x)


def test_find_bad_loop_examples():
    assert find_bad_loop(FExtension.standalone(wheel(6), range(7), wheel(6))) is None
    assert find_bad_loop(hollow(4, range(4), SQUARE_X)).vertices == (0, 1, 2, 3)
    assert find_bad_loop(hollow(5, range(5), PENTAGON_X)).vertices == (0, 1, 2, 3, 4)


def test_bijective_case():
    W = hollow(4, range(4), SQUARE_X)
    mv = resolve_bad_loop(W, Cycle((0, 1, 2, 3)))
    assert mv.case == BIJECTIVE
    assert mv.edges == [(0, 2)]
    assert mv.x_diagonal == (0, 2)
    assert mv.orbit[0][2] == ("edge", (0, 2))


def test_non_consecutive_case():
    W = hollow(4, [0, 1, 0, 2], PATH_X)
    mv = resolve_bad_loop(W, Cycle((0, 1, 2, 3)))
    assert mv.case == NON_CONSECUTIVE
    assert mv.edges == [(0, 2)]
    assert mv.orbit[0][2] == ("vertex", 0)


def test_consecutive_case():
    # f(y1) = f(y2) in one-based names; w = y3 is the other neighbour of y2
    W = hollow(4, [0, 0, 1, 2], TRIANGLE_X)
    mv = resolve_bad_loop(W, Cycle((0, 1, 2, 3)))
    assert mv.case == CONSECUTIVE
    assert mv.edges == [(0, 2)]


def test_saturate_counts():
    W = FExtension.standalone(wheel(6), range(7), wheel(6))
    assert saturate(W)[1] == []
    sq, moves = saturate(hollow(4, range(4), SQUARE_X))
    assert len(moves) == 1 and find_bad_loop(sq) is None
    pent, moves = saturate(hollow(5, range(5), PENTAGON_X))
    assert [m.edges for m in moves] == [[(0, 2)], [(0, 3)]]
    assert find_bad_loop(pent) is None


def test_homotopy_preservation_examples():
    for n, x in ((4, SQUARE_X), (5, PENTAGON_X)):
        W = hollow(n, range(n), x)
        out, moves = saturate(W)
        rep = verify_homotopy_preservation(W, out, moves)
        assert rep.passed
        assert rep.details["certificates"] == n - 3
        assert rep.details["H1_rank_after"] == 0
    W = FExtension.standalone(wheel(6), range(7), wheel(6))
    assert verify_homotopy_preservation(W, W, []).passed


def two_squares():
    y = FlagComplex.from_edges(range(8), [(i, (i + 1) % 4) for i in range(4)] + [(4 + i, 4 + (i + 1) % 4) for i in range(4)])
    return FExtension.standalone(y, [v % 4 for v in range(8)], SQUARE_X)


def test_forged_move_fails_certificate():
    W = two_squares()
    # an edge joining the two squares closes no triangle
    mv = DiagonalMove(BIJECTIVE, (0, 1, 2, 3), (0, 2), (("1", (0, 6), ("edge", (0, 2))),))
    rep = verify_homotopy_preservation(W, replay_moves(W, [mv]), [mv])
    assert "no-triangle" in rep.codes()
    # a diagonal whose image is not a simplex of X breaks the map contract
    mv = DiagonalMove(BIJECTIVE, (0, 1, 2, 3), (1, 3), (("1", (1, 3), ("edge", (1, 3))),))
    rep = verify_homotopy_preservation(W, replay_moves(W, [mv]), [mv])
    assert "map" in rep.codes()


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded) as err:
        saturate(hollow(5, range(5), PENTAGON_X), max_moves=1)
    assert err.value.residual.length == 4


def test_x_not_six_large():
    x = cycle(4)
    with pytest.raises(XNotSixLarge):
        saturate(hollow(4, range(4), x))


def test_verify_systolic_empty_square_fails():
    W = hollow(4, range(4), SQUARE_X)
    rep = verify_systolic(W)
    assert rep.verdict == "fail"
    assert rep.details["witness"] == [0, 1, 2, 3]


def test_equivariant_orbit():
    # two hollow squares swapped by an involution h, both over the square X
    W = two_squares()
    W.group = ("1", "h")
    W.translate = lambda h, v: v if h == 0 else (v + 4) % 8
    out, moves = saturate(W)
    assert len(moves) == 1
    assert moves[0].edges == [(0, 2), (4, 6)]
    for label, (a, b), img in moves[0].orbit:
        assert img == ("edge", (0, 2))
    assert verify_systolic(out).details["six_large"]


def test_move_log_round_trip():
    W = hollow(5, range(5), PENTAGON_X)
    out, moves = saturate(W)
    again = [DiagonalMove.from_json(m.to_json()) for m in moves]
    assert again == moves
    assert replay_moves(W, again).edges() == out.edges()


def closed_maps(n):
    """Simplicial maps from the n-cycle into the wheel: consecutive images equal or adjacent."""
    c = wheel(6)
    return st.lists(st.integers(0, 6), min_size=n, max_size=n).filter(
        lambda f: all(f[i] == f[(i + 1) % n] or c.has_edge(f[i], f[(i + 1) % n]) for i in range(n))
    )


def expected_case(images):
    n = len(images)
    if len(set(images)) == n:
        return BIJECTIVE
    if any(images[i] == images[j] for i in range(n) for j in range(i + 2, n) if j - i != n - 1):
        return NON_CONSECUTIVE
    return CONSECUTIVE


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([4, 5]).flatmap(closed_maps))
def test_saturation_properties(f):
    n = len(f)
    W = hollow(n, f, wheel(6))
    before = set(W.edges())
    first = resolve_bad_loop(W, find_bad_loop(W))
    assert first.case == expected_case(f)
    out, moves = saturate(W)
    # vertices fixed, edges only grow
    assert sorted(out.adj) == sorted(W.adj)
    assert before <= set(out.edges())
    # every edge maps to an edge or a vertex of X
    for u, v in out.edges():
        a, b = out.f[u], out.f[v]
        assert a == b or wheel(6).has_edge(a, b)
    assert is_m_large(out.complex, 6).passed
    assert verify_homotopy_preservation(W, out, moves).passed
    assert homology_h1(out.complex).trivial
