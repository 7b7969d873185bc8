import random
from dataclasses import replace
from fractions import Fraction

import pytest

from sharpmpec import cone as C
from sharpmpec import geometry as G
from sharpmpec.errors import InfeasiblePoint, NotCritical, NotNondegenerate, NotTangent
from sharpmpec.linalg import dot
from sharpmpec.lp import Unbounded, lp_solve
from sharpmpec.problem import ProblemData

from randgen import cone_point, ivec, mpec_instance

F = Fraction
VBAR = (1, 1, 0)
VBAR_STAR = (F(1, 2), F(1, 2), 0)


# -- point analysis ------------------------------------------------------------------------

def test_example1_point(ex1):
    g = ex1.geom
    assert g.active == (0, 1)
    assert C.canonical(g.K) == C.canonical(C.HCone(3, ((0, 0, 1),)))
    assert g.Lam.canonical() == G.HPolyhedron(2, (((1, 1), 1),), (((-1, 0), 0), ((0, -1), 0))).canonical()
    assert g.extreme == ((0, 1), (1, 0))
    assert g.jplus_all == frozenset({0, 1})


def test_example2_point(ex2):
    g = ex2.geom
    assert g.active == (0, 1, 2)
    assert C.canonical(g.K) == C.canonical(C.HCone(2, (), ((1, 0), (0, -1), (1, 1))))
    assert g.extreme == ((0, 0, 0),)
    assert g.jplus_all == frozenset()


def test_inactive_lower_level():
    data = ProblemData(1, 2, 0, 1, grad_F=(0, 0, 0), phi=(0, 0), jac_phi=((0, 0, 0),) * 2,
                       g=(-1,), jac_g=((1, 0),), hess_g=(((0, 0), (0, 0)),))
    g = G.analyze_point(data)
    assert g.active == ()
    assert C.cone_equal(g.K, C.HCone(2))
    assert g.extreme == ((0,),)


def test_infeasible_point_rejected(ex2):
    bad = replace(ex2.data, g=(1, 0, 0))
    with pytest.raises(InfeasiblePoint):
        G.analyze_point(bad)


# -- directional multipliers -----------------------------------------------------------------

@pytest.mark.parametrize("v,expected", [
    ((1, 0, 0), ((1, 0),)),
    ((0, 1, 0), ((0, 1),)),
    ((1, 1, 0), ((0, 1), (1, 0))),
    ((0, 0, 0), ((0, 1), (1, 0))),
])
def test_example1_directional(ex1, v, expected):
    dd = G.directional(ex1.data, ex1.geom, v)
    assert dd.vertices == expected


def test_zero_direction_keeps_active_set(ex1):
    assert G.directional(ex1.data, ex1.geom, (0, 0, 0)).active == frozenset({0, 1})


def test_noncritical_direction(ex1):
    with pytest.raises(NotCritical):
        G.directional(ex1.data, ex1.geom, (0, 0, 1))


@pytest.mark.parametrize("v", [(1, 1, 0), (1, -1, 0), (1, 0, 0), (0, 1, 0), (2, 1, 0)])
def test_example1_nondegenerate(ex1, v):
    assert G.check_2_nondegenerate(ex1.data, ex1.geom, v).holds


def test_example1_degenerate_at_zero(ex1):
    out = G.check_2_nondegenerate(ex1.data, ex1.geom, (0, 0, 0))
    assert not out.holds and out.witness == (1, -1)


def test_2_regularity():
    ex = G.ProblemData(0, 3, 0, 2, grad_F=(0, 0, 0), phi=(0, 0, -1), jac_phi=((0, 0, 0),) * 3,
                       g=(0, 0), jac_g=((0, 0, 1), (0, 0, 1)),
                       hess_g=(((1, 0, 0), (0, 0, 0), (0, 0, 0)), ((0, 0, 0), (0, 1, 0), (0, 0, 0))))
    assert G.check_2_regular(ex, {0, 1}, (1, 1, 0))
    assert G.check_2_regular(ex, set(), (1, 1, 0))
    twin = G.ProblemData(0, 2, 0, 2, grad_F=(0, 0), phi=(0, 0), jac_phi=((0, 0),) * 2,
                         g=(0, 0), jac_g=((1, 0), (1, 0)), hess_g=(((0, 0), (0, 0)),) * 2)
    assert not G.check_2_regular(twin, {0, 1}, (0, 1))


# -- tangent cone to the normal-cone graph -----------------------------------------------------

def test_tangent_membership_examples(ex1):
    d, g = ex1.data, ex1.geom
    yes = G.tangent_gph_member(d, g, VBAR, VBAR_STAR)
    assert yes.member and yes.lam == (F(1, 2), F(1, 2)) and yes.zstar == (0, 0, 0)
    zero = G.tangent_gph_member(d, g, (0, 0, 0), (0, 0, 5))
    assert zero.member and zero.zstar == (0, 0, 5)
    assert not G.tangent_gph_member(d, g, (1, 0, 0), (0, 1, 0)).member


def test_decomposition_examples(ex1):
    d, g = ex1.data, ex1.geom
    assert G.decompose_tangent_pair(d, g, VBAR, VBAR_STAR) == ((F(1, 2), F(1, 2)), (0, 0, 0))
    assert G.decompose_tangent_pair(d, g, VBAR, (F(1, 2), F(1, 2), 7)) == ((F(1, 2), F(1, 2)), (0, 0, 7))
    assert G.decompose_tangent_pair(d, g, (1, 0, 0), (1, 0, 0)) == ((1, 0), (0, 0, 0))
    with pytest.raises(NotNondegenerate):
        G.decompose_tangent_pair(d, g, (0, 0, 0), (0, 0, 1))
    with pytest.raises(NotTangent):
        G.decompose_tangent_pair(d, g, (1, 0, 0), (0, 1, 0))


def test_ktilde_example1(ex1):
    kt = G.ktilde(ex1.data, ex1.geom, VBAR, (F(1, 2), F(1, 2)), (0, 0, 0))
    assert C.cone_equal(kt.first, ex1.geom.K)
    assert C.cone_equal(kt.second, C.HCone(2, ((1, 1),)))
    assert kt.cone.dim == 5


def test_ktilde_singleton_second_factor(ex2):
    kt = G.ktilde(ex2.data, ex2.geom, (-1, 0), (0, 0, 0), (0, 0))
    assert C.cone_equal(kt.second, C.HCone(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1))))


def test_normal_to_tangent_examples(ex1):
    d, g = ex1.data, ex1.geom
    out = G.normal_to_tangent_member(d, g, VBAR, VBAR_STAR, (F(1, 2), F(1, 2), 0), (-1, -1, 0))
    assert out.member and out.eta == (0, 0)
    assert G.normal_to_tangent_member(d, g, VBAR, VBAR_STAR, (0, 0, 1), (0, 0, 0)).member
    assert not G.normal_to_tangent_member(d, g, VBAR, VBAR_STAR, (0, 0, 0), (1, 0, 0)).member


def test_tangent2_examples(ex1):
    d, g = ex1.data, ex1.geom
    zero = G.tangent2_member(d, g, VBAR, VBAR_STAR, (0, 0, 0), (0, 0, 0))
    assert zero.member and zero.mu == (0, 0) and zero.zeta == (0, 0, 0)
    yes = G.tangent2_member(d, g, VBAR, VBAR_STAR, (1, 1, 0), (F(3, 2), F(-1, 2), 4))
    assert yes.member and yes.mu == (1, -1) and yes.zeta == (0, 0, 4)
    # the curvature component 2v̄ᵀ∇²g u = (2, -2) is not normal to the multiplier tangent space
    assert not G.tangent2_member(d, g, VBAR, VBAR_STAR, (1, -1, 0), (F(1, 2), F(-1, 2), 0)).member
    assert not G.tangent2_member(d, g, VBAR, VBAR_STAR, (0, 0, 0), (1, 0, 0)).member


def test_level_two_examples(ex1):
    d, g = ex1.data, ex1.geom
    dv, dvs = (1, 1, 0), (F(3, 2), F(-1, 2), 4)
    assert G.tangent3_member(d, g, VBAR, VBAR_STAR, dv, dvs, dv, dvs).member
    assert not G.tangent3_member(d, g, VBAR, VBAR_STAR, dv, dvs, (0, 0, 0), (1, 0, 0)).member
    assert G.normal_to_tangent2_member(d, g, VBAR, VBAR_STAR, dv, dvs, (0, 0, 1), (0, 0, 0)).member


def test_level_two_reduces_to_level_one_at_zero(ex1):
    d, g = ex1.data, ex1.geom
    rng = random.Random(31)
    for _ in range(20):
        u, us = ivec(rng, 3, -1, 1), ivec(rng, 3, -2, 2)
        a = G.tangent2_member(d, g, VBAR, VBAR_STAR, u, us).member
        b = G.tangent3_member(d, g, VBAR, VBAR_STAR, (0, 0, 0), (0, 0, 0), u, us).member
        assert a == b
        ws, w = ivec(rng, 3, -1, 1), ivec(rng, 3, -1, 1)
        a = G.normal_to_tangent_member(d, g, VBAR, VBAR_STAR, ws, w).member
        b = G.normal_to_tangent2_member(d, g, VBAR, VBAR_STAR, (0, 0, 0), (0, 0, 0), ws, w).member
        assert a == b


# -- zero-direction filter and polyhedrality probe ---------------------------------------------

def test_zero_direction_filter(ex1, ex2):
    d, g = ex1.data, ex1.geom
    assert G.zero_dir_filter(d, g, (0, 0, 1), (0, 0, 0), (0, 0, 0)).passes
    out = G.zero_dir_filter(d, g, (0, 0, 1), (0, 0, 0), (0, 0, 1))
    assert not out.passes and out.refuted_at == g.lineality[0]
    assert G.zero_dir_filter(ex2.data, ex2.geom, (0, 0), (1, 0), (-1, 1)).passes
    out = G.zero_dir_filter(ex2.data, ex2.geom, (0, 0), (-1, 0), (-1, 1))
    assert not out.passes and out.refuted_at == (0, 0)


def test_polyhedrality_probe(ex1):
    d, g = ex1.data, ex1.geom
    out = G.polyhedrality_probe(d, g, VBAR, VBAR_STAR)
    assert out.kind == "NotLocallyPolyhedral"
    assert G.directional(d, g, out.witness).vertices != G.directional(d, g, VBAR).vertices
    assert G.polyhedrality_probe(d, g, (1, 0, 0), (1, 0, 0)).kind == "LocallyPolyhedral"
    flat = replace(d, hess_g=(((0,) * 3,) * 3,) * 2)
    assert G.polyhedrality_probe(flat, G.analyze_point(flat), VBAR, (0, 0, 0)).kind == "Unknown"


# -- properties on random instances ----------------------------------------------------------------

def _instances(seed, count):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        data = mpec_instance(rng, 1, rng.randint(2, 3), rng.randint(1, 3))
        out.append((rng, data, G.analyze_point(data)))
    return out


def test_directional_multipliers_form_argmax_face():
    for rng, data, geom in _instances(32, 40):
        assert G.directional(data, geom, (0,) * data.m).vertices == geom.extreme
        v = cone_point(rng, geom.K)
        dd = G.directional(data, geom, v)
        if isinstance(lp_solve(dd.quad, geom.Lam), Unbounded):
            assert dd.vertices == () and not dd.Lam_v.contains(geom.extreme[0])
            continue
        best = max(dot(dd.quad, e) for e in geom.extreme)
        assert set(dd.vertices) == {e for e in geom.extreme if dot(dd.quad, e) == best}
        for lam in geom.extreme + (G.barycenter(geom.extreme),):
            N = C.v_to_h(C.normal_of_polyhedron(geom.Lam, lam))
            assert dd.Lam_v.contains(lam) == N.contains(dd.quad)


def test_2_regular_implies_2_nondegenerate():
    hits = 0
    for rng, data, geom in _instances(33, 60):
        v = cone_point(rng, geom.K)
        if G.check_2_regular(data, G.hat_j(data, geom, v), v):
            hits += 1
            assert G.check_2_nondegenerate(data, geom, v).holds
    assert hits > 10


def test_zero_direction_tangent_iff_polar():
    for rng, data, geom in _instances(34, 40):
        for _ in range(3):
            vstar = ivec(rng, data.m, -2, 2)
            member = G.tangent_gph_member(data, geom, (0,) * data.m, vstar).member
            assert member == C.in_polar(vstar, geom.K_v)


def test_decomposition_is_deterministic():
    for rng, data, geom in _instances(35, 30):
        v = cone_point(rng, geom.K)
        if not G.check_2_nondegenerate(data, geom, v).holds:
            continue
        lam = G.directional(data, geom, v).vertices[0]
        vstar = tuple(sum((lam[i] * h for i, h in enumerate(col)), F(0))
                      for col in zip(*data.hess_dirs(v)))
        first = G.decompose_tangent_pair(data, geom, v, vstar)
        assert first == G.decompose_tangent_pair(data, geom, v, vstar)
        assert first[0] == lam
