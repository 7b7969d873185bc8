"""Brute-force oracles that avoid the face-pair machinery they are compared against."""
from __future__ import annotations

import random
from fractions import Fraction

from sharpmpec import cone as C
from sharpmpec.linalg import ZERO, unit
from sharpmpec.lp import HPolyhedron, Infeasible, lp_solve
from sharpmpec.stationarity import _stationarity_residuals

from randgen import r_minus, subsets


def vcone_point(rng: random.Random, V: C.VCone) -> tuple:
    pt = [Fraction(0)] * V.dim
    for r in V.rays:
        c = rng.randint(0, 2)
        pt = [x + c * y for x, y in zip(pt, r)]
    for l in V.lineality:
        c = rng.randint(-2, 2)
        pt = [x + c * y for x, y in zip(pt, l)]
    return tuple(pt)


def contained(A, B) -> bool:
    """A ⊆ B, by checking the generators of A against B's inequalities."""
    V = C.V_of(A)
    Bh = B if isinstance(B, C.HCone) else C.v_to_h(B)
    gens = V.rays + V.lineality + tuple(tuple(-x for x in l) for l in V.lineality)
    return all(Bh.contains(g) for g in gens)


def maximal(cones) -> set:
    cones = list({C.canonical(K) for K in cones})
    return {K for K in cones if not any(L != K and contained(K, L) for L in cones)}


def _pad(A: C.VCone, B: C.VCone) -> C.VCone:
    za, zb = (ZERO,) * A.dim, (ZERO,) * B.dim
    lin = tuple(a + zb for a in A.lineality) + tuple(za + b for b in B.lineality)
    rays = tuple(a + zb for a in A.rays) + tuple(za + b for b in B.rays)
    return C.VCone(A.dim + B.dim, lin, rays)


def regular_normal_gph(P: HPolyhedron, x, y) -> C.HCone:
    """Regular normal cone to gph N_P at (x, y).

    The graph is the finite union over row subsets S of X_S × Y_S, with X_S
    the points of P where the rows in S are tight and Y_S the cone spanned by
    those rows plus the equality rows. The regular normal cone of such a union
    is the intersection of the normal cones of the pieces through the point.
    """
    d = P.dim
    eq_rows = tuple(a for a, _ in P.eq)
    out = None
    for S in subsets(sorted(P.tight(x))):
        Yh = C.v_to_h(C.VCone(d, eq_rows, tuple(P.ineq[i][0] for i in S)))
        if not Yh.contains(y):
            continue
        X = HPolyhedron(d, P.eq + tuple(P.ineq[i] for i in S),
                        tuple(r for i, r in enumerate(P.ineq) if i not in S))
        piece = C.v_to_h(_pad(C.normal_of_polyhedron(X, x), C.normal_of_polyhedron(Yh, y)))
        out = piece if out is None else C.intersect(out, piece)
    return C.canonical(out)


def _settle(base, direction, ok):
    t = Fraction(1)
    for _ in range(60):
        pt = tuple(b + t * c for b, c in zip(base, direction))
        if ok(pt):
            return pt
        t /= 2
    raise AssertionError("no stable nearby point")


def nearby_graph_points(P: HPolyhedron, z, zstar) -> list:
    """One graph point of gph N_P per local stratum around (z, z*)."""
    T = C.tangent_of_polyhedron(P, z)
    tight_z = sorted(P.tight(z))
    out = []
    for F in C.faces(T):
        a = C.ri_representative(C.face_cone(T, F))
        expect = frozenset(i for k, i in enumerate(tight_z) if k in set(F.tight))
        x = _settle(z, a, lambda p: P.contains(p) and P.tight(p) == expect)
        Nh = C.v_to_h(C.normal_of_polyhedron(P, x))
        if not Nh.contains(zstar):
            continue
        T2 = C.tangent_cone(Nh, zstar)
        tight_n = sorted(C.membership(Nh, zstar))
        for F2 in C.faces(T2):
            b = C.ri_representative(C.face_cone(T2, F2))
            expect2 = frozenset(i for k, i in enumerate(tight_n) if k in set(F2.tight))
            y = _settle(zstar, b, lambda p: C.membership(Nh, p) == expect2)
            out.append((x, y))
    return out


def limiting_normal_by_sampling(P: HPolyhedron, z, zstar) -> set:
    return maximal(regular_normal_gph(P, x, y) for x, y in nearby_graph_points(P, z, zstar))


def mstat_feasible_by_branches(data, lam) -> bool:
    """Some (w, ξ, σ) with (ξ, ∇g w) limiting normal to gph N at (g, λ), the
    normal cone coming from sampling rather than from face pairs."""
    m, q, p = data.m, data.q, data.p
    N = m + q + p
    zero_w, zero_xi, zero_s = (0,) * m, (0,) * q, (0,) * p
    ax0, by0 = _stationarity_residuals(data, lam, zero_w, zero_xi, zero_s)
    r0 = ax0 + by0
    cols = []
    for j in range(N):
        e = unit(N, j)
        ax, by = _stationarity_residuals(data, lam, e[:m], e[m:m + q], e[m + q:])
        cols.append(tuple(u - v for u, v in zip(ax + by, r0)))
    eq = [(tuple(col[k] for col in cols), -r0[k]) for k in range(len(r0))]
    ineq = []
    for i in range(p):
        ineq.append((tuple(-1 if j == m + q + i else 0 for j in range(N)), 0))
        if data.G_val[i] != 0:
            eq.append((unit(N, m + q + i), 0))

    def lift(r):
        xi_part, gw_part = r[:q], r[q:]
        gw = tuple(sum(gw_part[i] * data.jac_g[i][k] for i in range(q)) for k in range(m))
        return gw + tuple(xi_part) + (0,) * p

    for K in limiting_normal_by_sampling(r_minus(q), data.g, lam):
        E = eq + [(lift(r), 0) for r in K.eq]
        I = ineq + [(lift(r), 0) for r in K.ineq]
        if not isinstance(lp_solve((0,) * N, HPolyhedron(N, tuple(E), tuple(I))), Infeasible):
            return True
    return False
