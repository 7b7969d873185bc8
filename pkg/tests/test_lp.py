import itertools
import random
from fractions import Fraction

import pytest

from sharpmpec.errors import NotPointed
from sharpmpec.linalg import dot, rank, solve_affine
from sharpmpec.lp import HPolyhedron, Infeasible, Optimal, Unbounded, lp_solve, vertices

from randgen import ivec

F = Fraction


def test_max_first_multiplier_over_example1_segment():
    P = HPolyhedron(2, eq=(((1, 1), 1),), ineq=(((-1, 0), 0), ((0, -1), 0)))
    out = lp_solve((1, 0), P)
    assert isinstance(out, Optimal)
    assert out.value == 1 and out.point == (1, 0)
    assert out.tight == frozenset({1})


def test_max_over_halfline():
    out = lp_solve((1,), HPolyhedron(1, ineq=(((1,), 0),)))
    assert out == Optimal(F(0), (F(0),), frozenset({0}))


def test_infeasible_has_farkas_certificate():
    out = lp_solve((0,), HPolyhedron(1, ineq=(((1,), -1), ((-1,), 0))))
    assert isinstance(out, Infeasible)
    assert out.farkas_ineq == (1, 1)


def test_unbounded_returns_improving_ray():
    P = HPolyhedron(2, ineq=(((-1, 0), 0),))
    out = lp_solve((1, 1), P)
    assert isinstance(out, Unbounded)
    assert dot((1, 1), out.ray) > 0
    assert dot((-1, 0), out.ray) <= 0


def test_example1_multiplier_vertices():
    P = HPolyhedron(2, eq=(((1, 1), 1),), ineq=(((-1, 0), 0), ((0, -1), 0)))
    assert vertices(P) == ((0, 1), (1, 0))


def test_example2_multiplier_vertices():
    P = HPolyhedron(
        3,
        eq=(((1, 0, 1), 0), ((0, -1, 1), 0)),
        ineq=tuple((tuple(-1 if j == i else 0 for j in range(3)), 0) for i in range(3)),
    )
    assert vertices(P) == ((0, 0, 0),)


def test_unit_box_has_four_corners():
    P = HPolyhedron(2, ineq=(((1, 0), 1), ((-1, 0), 0), ((0, 1), 1), ((0, -1), 0)))
    assert set(vertices(P)) == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_line_is_not_pointed():
    with pytest.raises(NotPointed):
        vertices(HPolyhedron(2, ineq=(((1, 0), 1),)))


def test_empty_polyhedron_has_no_vertices():
    assert vertices(HPolyhedron(1, ineq=(((1,), -1), ((-1,), 0)))) == ()


def _brute_vertices(P: HPolyhedron):
    """Basic feasible solutions: every full-rank choice of active rows."""
    d = P.dim
    eq = [(a, b) for a, b in P.eq]
    out = set()
    for S in itertools.combinations(range(len(P.ineq)), max(0, d - len(eq))):
        rows = eq + [P.ineq[i] for i in S]
        A = [a for a, _ in rows]
        if not A or rank(A, d) < d:
            continue
        sol = solve_affine(A, [b for _, b in rows], d)
        if sol is not None and P.contains(sol[0]):
            out.add(sol[0])
    return out


def _random_bounded(rng):
    d = rng.randint(1, 3)
    rows = [(ivec(rng, d), F(rng.randint(0, 4))) for _ in range(rng.randint(1, 6 - d))]
    box = []
    for k in range(d):
        e = tuple(F(1 if j == k else 0) for j in range(d))
        box += [(e, F(3)), (tuple(-x for x in e), F(3))]
    return HPolyhedron(d, (), tuple(rows + box))


def test_optimal_value_matches_best_vertex_and_duals_certify_it():
    rng = random.Random(11)
    for _ in range(120):
        P = _random_bounded(rng)
        c = ivec(rng, P.dim)
        out = lp_solve(c, P)
        assert isinstance(out, Optimal)
        assert P.contains(out.point)
        brute = _brute_vertices(P)
        assert out.value == max(dot(c, v) for v in brute)
        # dual feasibility and zero gap: Aᵀy = c, y >= 0, bᵀy = value
        y = out.dual_ineq
        assert all(v >= 0 for v in y)
        combo = [sum((yi * a[k] for yi, (a, _) in zip(y, P.ineq)), F(0)) for k in range(P.dim)]
        assert tuple(combo) == c
        assert sum((yi * b for yi, (_, b) in zip(y, P.ineq)), F(0)) == out.value


def test_min_sense_matches_negated_max():
    rng = random.Random(12)
    for _ in range(60):
        P = _random_bounded(rng)
        c = ivec(rng, P.dim)
        lo = lp_solve(c, P, "min")
        hi = lp_solve(tuple(-x for x in c), P, "max")
        assert lo.value == -hi.value


def test_vertices_match_basic_feasible_solutions():
    rng = random.Random(13)
    checked = 0
    for _ in range(150):
        d = rng.randint(1, 3)
        rows = tuple((ivec(rng, d), F(rng.randint(-2, 4))) for _ in range(rng.randint(d, 6)))
        P = HPolyhedron(d, (), rows)
        try:
            got = set(vertices(P))
        except NotPointed:
            assert rank([a for a, _ in rows], d) < d
            continue
        assert got == _brute_vertices(P)
        checked += 1
    assert checked > 50


def test_farkas_certificates_are_sound():
    rng = random.Random(14)
    seen = 0
    for _ in range(200):
        d = rng.randint(1, 3)
        rows = tuple((ivec(rng, d), F(rng.randint(-3, 1))) for _ in range(rng.randint(2, 6)))
        eq = ((ivec(rng, d), F(rng.randint(-2, 2))),) if rng.random() < 0.3 else ()
        P = HPolyhedron(d, eq, rows)
        out = lp_solve((0,) * d, P)
        if not isinstance(out, Infeasible):
            assert P.contains(out.point)
            continue
        seen += 1
        ye, yi = out.farkas_eq, out.farkas_ineq
        assert all(v >= 0 for v in yi)
        all_rows = list(P.eq) + list(P.ineq)
        mult = list(ye) + list(yi)
        combo = [sum((m * a[k] for m, (a, _) in zip(mult, all_rows)), F(0)) for k in range(d)]
        assert all(x == 0 for x in combo)
        assert sum((m * b for m, (_, b) in zip(mult, all_rows)), F(0)) == -1
    assert seen > 10


def test_canonical_form_normalizes_rows():
    P = HPolyhedron(2, eq=(((-2, -4), -2),), ineq=(((2, 0), 4), ((1, 0), 2), ((0, 0), 1)))
    Q = P.canonical()
    assert Q.eq == (((1, 2), 1),)
    assert Q.ineq == (((1, 0), 2),)
