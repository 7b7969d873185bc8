"""Variational geometry of the lower-level normal-cone graph at a candidate point."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import cone as C
from .errors import (
    DecompositionNotUnique,
    InfeasiblePoint,
    NotCritical,
    NotNondegenerate,
    NotPolarMember,
    NotTangent,
)
from .linalg import (
    ZERO,
    add,
    dot,
    is_zero,
    kernel_basis,
    lincomb,
    neg,
    rank,
    row_basis,
    scale,
    sign_normalize,
    sub,
    unit,
    vec,
)
from .linsys import LinearSystem, edot, esum
from .lp import HPolyhedron, Unbounded, lp_solve, vertices
from .problem import ProblemData


@dataclass(frozen=True)
class PointGeometry:
    active: tuple  # Ī, sorted 0-based indices
    K: C.HCone  # K̄: ineq row k belongs to constraint active[k]
    K_v: C.VCone
    Lam: HPolyhedron  # Λ̄ in R^q: ineq row k is -λ_{active[k]} <= 0
    extreme: tuple  # ℰ
    jplus_all: frozenset  # J̄⁺(Λ̄)
    lineality: tuple  # basis of ℒ(K̄)
    bounded: bool = True  # Λ̄ has no recession direction

    @property
    def nonempty(self) -> bool:
        return bool(self.extreme)

    @property
    def singleton(self) -> bool:
        return len(self.extreme) == 1 and self.bounded


@dataclass(frozen=True)
class DirectionalData:
    v: tuple
    active: frozenset  # Ī(v)
    Lam_v: HPolyhedron  # Λ̄(v)
    vertices: tuple
    jplus: frozenset  # J̄⁺(Λ̄(v))
    quad: tuple  # (vᵀ∇²g_i v)_i


@dataclass(frozen=True)
class Nondegeneracy:
    holds: bool
    witness: tuple | None = None


@dataclass(frozen=True)
class GphMembership:
    member: bool
    lam: tuple | None = None
    zstar: tuple | None = None
    farkas: object = None


@dataclass(frozen=True)
class NormalMembership:
    member: bool
    eta: tuple | None = None


@dataclass(frozen=True)
class TangentMembership:
    member: bool
    mu: tuple | None = None
    zeta: tuple | None = None


@dataclass(frozen=True)
class ZeroDirVerdict:
    passes: bool
    refuted_at: tuple | None = None


@dataclass(frozen=True)
class ProbeVerdict:
    kind: str  # "LocallyPolyhedral" | "NotLocallyPolyhedral" | "Unknown"
    witness: tuple | None = None


def support(x: Sequence) -> frozenset:
    return frozenset(i for i, a in enumerate(x) if a != 0)


def analyze_point(data: ProblemData) -> PointGeometry:
    if any(x > 0 for x in data.g) or any(x > 0 for x in data.G_val):
        raise InfeasiblePoint("constraint violated at the candidate point")
    q, m = data.q, data.m
    active = tuple(i for i in range(q) if data.g[i] == 0)
    ystar = data.ystar
    K = C.HCone(m, (ystar,) if not is_zero(ystar) else (), tuple(data.jac_g[i] for i in active))
    K_v = C.h_to_v(K)

    eq = [(unit(q, i), 0) for i in range(q) if i not in active]
    eq += [(tuple(data.jac_g[i][k] for i in range(q)), ystar[k]) for k in range(m)]
    ineq = [(neg(unit(q, i)), 0) for i in active]
    Lam = HPolyhedron(q, tuple(eq), tuple(ineq))
    ext = vertices(Lam)
    jplus = frozenset().union(*(support(e) for e in ext)) if ext else frozenset()
    rec = C.h_to_v(C.HCone(q, tuple(a for a, _ in Lam.eq), tuple(a for a, _ in Lam.ineq)))
    bounded = not rec.rays and not rec.lineality
    return PointGeometry(active, K, K_v, Lam, ext, jplus, C.lineality(K), bounded)


def active_at(data: ProblemData, geom: PointGeometry, v: Sequence) -> frozenset:
    return frozenset(i for i in geom.active if dot(data.jac_g[i], v) == 0)


def directional(data: ProblemData, geom: PointGeometry, v: Sequence) -> DirectionalData:
    v = vec(v)
    if not geom.K.contains(v):
        raise NotCritical("direction is not in the critical cone")
    quad = data.curvature(v)
    Lam_v = geom.Lam
    if not is_zero(quad) and geom.nonempty:
        out = lp_solve(quad, geom.Lam, "max")
        if isinstance(out, Unbounded):
            # no maximizer over an unbounded multiplier set: Λ̄(v) is empty
            Lam_v = geom.Lam.with_eq([((ZERO,) * data.q, 1)])
        else:
            Lam_v = geom.Lam.with_eq([(quad, out.value)])
    verts = vertices(Lam_v) if geom.nonempty else ()
    jplus = frozenset().union(*(support(x) for x in verts)) if verts else frozenset()
    return DirectionalData(v, active_at(data, geom, v), Lam_v, verts, jplus, quad)


def lam_span(dd: DirectionalData, q: int) -> tuple:
    """Basis of (Λ̄(v))⁺, the span of differences of its points."""
    if len(dd.vertices) <= 1:
        return ()
    base = dd.vertices[0]
    return row_basis([sub(x, base) for x in dd.vertices[1:]], q)


def normal_span(geom: PointGeometry, v: Sequence, m: int) -> tuple:
    """Basis of (N_K̄(v))⁺."""
    tight = C.membership(geom.K, v)
    rows = list(geom.K.eq) + [geom.K.ineq[k] for k in sorted(tight)]
    return row_basis(rows, m) if rows else ()


def check_2_nondegenerate(data: ProblemData, geom: PointGeometry, v: Sequence) -> Nondegeneracy:
    dd = directional(data, geom, v)
    B = lam_span(dd, data.q)
    if not B:
        return Nondegeneracy(True)
    N = normal_span(geom, dd.v, data.m)
    cols = [lincomb(b, data.hess_dirs(dd.v), data.m) for b in B] + [neg(n) for n in N]
    matrix = [tuple(col[r] for col in cols) for r in range(data.m)]
    ker = kernel_basis(matrix, len(cols))
    if not ker:
        return Nondegeneracy(True)
    mu = lincomb(ker[0][: len(B)], B, data.q)
    return Nondegeneracy(False, sign_normalize(mu))


def check_2_regular(data: ProblemData, J: Sequence, v: Sequence) -> bool:
    J = sorted(J)
    if not J:
        return True
    hv = data.hess_dirs(v)
    k = len(J)
    rows = []
    for r in range(data.m):
        rows.append(tuple(data.jac_g[i][r] for i in J) + tuple(hv[i][r] for i in J))
    for r in range(data.m):
        rows.append((ZERO,) * k + tuple(data.jac_g[i][r] for i in J))
    return all(is_zero(x[k:]) for x in kernel_basis(rows, 2 * k))


def hat_j(data: ProblemData, geom: PointGeometry, v: Sequence) -> tuple:
    dd = directional(data, geom, v)
    J = sorted(dd.jplus)
    current = rank([data.jac_g[i] for i in J], data.m) if J else 0
    for i in sorted(dd.active):
        if i in J:
            continue
        r = rank([data.jac_g[j] for j in J + [i]], data.m)
        if r > current:
            J.append(i)
            current = r
    return tuple(sorted(J))


def nondegenerate_index_form(data: ProblemData, geom: PointGeometry, v: Sequence) -> bool:
    """Index-set formulation, using Ĵ; reported alongside the subspace form."""
    dd = directional(data, geom, v)
    Jh = hat_j(data, geom, v)
    Jp = sorted(dd.jplus)
    hv = data.hess_dirs(dd.v)
    nj, np_ = len(Jh), len(Jp)
    rows = []
    for r in range(data.m):
        rows.append(tuple(data.jac_g[i][r] for i in Jh) + tuple(hv[i][r] for i in Jp))
    for r in range(data.m):
        rows.append((ZERO,) * nj + tuple(data.jac_g[i][r] for i in Jp))
    if nj + np_ == 0:
        return True
    return all(is_zero(x[nj:]) for x in kernel_basis(rows, nj + np_))


# -- LP helpers ---------------------------------------------------------------

def _in_poly(sys: LinearSystem, x, P: HPolyhedron, label=""):
    for a, b in P.eq:
        sys.eq(edot(a, x) - b, label)
    for a, b in P.ineq:
        sys.le(edot(a, x) - b, label)


def _in_cone(sys: LinearSystem, x, K: C.HCone, label=""):
    for e in K.eq:
        sys.eq(edot(e, x), label)
    for a in K.ineq:
        sys.le(edot(a, x), label)


def _normal_expr(sys: LinearSystem, K: C.HCone, rows: Sequence[int] | None = None, name="nu"):
    """Generic element of the cone generated by the equality rows (free) and
    the selected inequality rows (nonnegative); ``rows=None`` selects all."""
    rows = range(len(K.ineq)) if rows is None else rows
    rho = sys.block(name + "_eq", len(K.eq))
    nu = sys.block(name, len(rows))
    for x in nu:
        sys.ge(x)
    gens = list(K.eq) + [K.ineq[i] for i in rows]
    coeffs = list(rho) + list(nu)
    return [esum(c * g[k] for c, g in zip(coeffs, gens) if g[k]) for k in range(K.dim)]


def _hess_times(data: ProblemData, coeffs, v) -> list:
    """``∇²(cᵀg)(ȳ) v`` for symbolic coefficients ``c``."""
    hv = data.hess_dirs(v)
    return [edot([h[k] for h in hv], coeffs) for k in range(data.m)]


def tangent_gph_member(data: ProblemData, geom: PointGeometry, v: Sequence, vstar: Sequence) -> GphMembership:
    v, vstar = vec(v), vec(vstar)
    if not geom.K.contains(v) or not geom.nonempty:
        return GphMembership(False)
    dd = directional(data, geom, v)
    tight = C.membership(geom.K, v)
    sys = LinearSystem()
    lam = sys.block("lam", data.q)
    _in_poly(sys, lam, dd.Lam_v)
    z = _normal_expr(sys, geom.K, sorted(tight))
    hl = _hess_times(data, lam, v)
    for k in range(data.m):
        sys.eq(hl[k] + z[k] - vstar[k])
    sol = sys.solve()
    if sol is None:
        return GphMembership(False, farkas=sys.last_farkas)
    lam_val = sol[lam]
    zval = sub(vstar, tuple(sol.eval(e) for e in hl))
    return GphMembership(True, lam_val, zval)


def decompose_tangent_pair(data: ProblemData, geom: PointGeometry, v: Sequence, vstar: Sequence):
    v, vstar = vec(v), vec(vstar)
    if not geom.K.contains(v):
        raise NotTangent("direction is not critical")
    if not check_2_nondegenerate(data, geom, v).holds:
        raise NotNondegenerate("not 2-nondegenerate in this direction")
    base = tangent_gph_member(data, geom, v, vstar)
    if not base.member:
        raise NotTangent("pair is not in the tangent cone")
    dd = directional(data, geom, v)
    tight = C.membership(geom.K, v)
    weights = [Fraction(i + 1) for i in range(data.q)]
    found = []
    for sense in ("max", "min"):
        sys = LinearSystem()
        lam = sys.block("lam", data.q)
        _in_poly(sys, lam, dd.Lam_v)
        z = _normal_expr(sys, geom.K, sorted(tight))
        hl = _hess_times(data, lam, v)
        for k in range(data.m):
            sys.eq(hl[k] + z[k] - vstar[k])
        sol = sys.solve(edot(weights, lam), sense)
        found.append(sol[lam])
    if found[0] != found[1] or found[0] != base.lam:
        raise DecompositionNotUnique("multiplier part of the decomposition is not unique")
    lam = found[0]
    return lam, sub(vstar, lincomb(lam, data.hess_dirs(v), data.m))


@dataclass(frozen=True)
class KTilde:
    first: C.HCone  # 𝒦_K̄(v̄, z̄*)
    second: C.HCone  # T_{Λ̄(v̄)}(λ̄)
    cone: C.HCone  # product on R^m × R^q
    lam: tuple
    zstar: tuple


def ktilde(data: ProblemData, geom: PointGeometry, v, lam, zstar) -> KTilde:
    v, lam, zstar = vec(v), vec(lam), vec(zstar)
    first = C.critical_cone(geom.K, v, zstar)
    second = C.critical_cone(geom.Lam, lam, data.curvature(v))
    return KTilde(first, second, C.product(first, second), lam, zstar)


def _ktilde_for_pair(data, geom, vbar, vbar_star) -> KTilde:
    lam, zstar = decompose_tangent_pair(data, geom, vbar, vbar_star)
    return ktilde(data, geom, vbar, lam, zstar)


def _normal_lp(data: ProblemData, vbar, lam, KT: C.HCone, wstar, w) -> NormalMembership:
    """∃η: (w* + ∇²(λ̄ᵀg)w − 2∇²(ηᵀg)v̄, v̄ᵀ∇²g w) ∈ K̃°, (w, η) ∈ K̃."""
    m, q = data.m, data.q
    sys = LinearSystem()
    eta = sys.block("eta", q)
    _in_cone(sys, list(w) + list(eta), KT)
    y = _normal_expr(sys, KT)
    base = add(wstar, lincomb(lam, data.hess_dirs(w), m))
    he = _hess_times(data, eta, vbar)
    cw = data.curvature(vbar, w)
    for k in range(m):
        sys.eq(base[k] - 2 * he[k] - y[k])
    for i in range(q):
        sys.eq(cw[i] - y[m + i])
    sol = sys.solve()
    if sol is None:
        return NormalMembership(False)
    return NormalMembership(True, sol[eta])


def _tangent_lp(data: ProblemData, vbar, lam, KT: C.HCone, u, ustar) -> TangentMembership:
    """∃(μ, ζ*): u* = ∇²(λ̄ᵀg)u + ∇²(μᵀg)v̄ + ζ*, (u, μ, ζ*, 2v̄ᵀ∇²g u) ∈ gph N_K̃.

    The graph of the normal cone is the union over faces F of K̃ of
    F × (normal cone on F); one LP per face, in face order.
    """
    m, q = data.m, data.q
    rhs = sub(ustar, lincomb(lam, data.hess_dirs(u), m))
    cu = scale(2, data.curvature(vbar, u))
    for F in C.faces(KT):
        sys = LinearSystem()
        mu = sys.block("mu", q)
        x = list(u) + list(mu)
        _in_cone(sys, x, C.face_cone(KT, F))
        y = _normal_expr(sys, KT, F.tight)
        hm = _hess_times(data, mu, vbar)
        for k in range(m):
            sys.eq(hm[k] + y[k] - rhs[k])
        for i in range(q):
            sys.eq(y[m + i] - cu[i])
        sol = sys.solve()
        if sol is not None:
            mu_val = sol[mu]
            zeta = sub(rhs, lincomb(mu_val, data.hess_dirs(vbar), m))
            return TangentMembership(True, mu_val, zeta)
    return TangentMembership(False)


def normal_to_tangent_member(data, geom, vbar, vbar_star, wstar, w) -> NormalMembership:
    vbar = vec(vbar)
    kt = _ktilde_for_pair(data, geom, vbar, vbar_star)
    return _normal_lp(data, vbar, kt.lam, kt.cone, vec(wstar), vec(w))


def tangent2_member(data, geom, vbar, vbar_star, u, ustar) -> TangentMembership:
    vbar = vec(vbar)
    kt = _ktilde_for_pair(data, geom, vbar, vbar_star)
    return _tangent_lp(data, vbar, kt.lam, kt.cone, vec(u), vec(ustar))


def ktilde2(data, geom, vbar, vbar_star, dv, dv_star) -> tuple:
    """Second-level cone 𝒦_{K̃}((δv̄, μ̄), (ζ̄*, 2v̄ᵀ∇²g δv̄)) and λ̄."""
    vbar, dv = vec(vbar), vec(dv)
    kt = _ktilde_for_pair(data, geom, vbar, vbar_star)
    lvl1 = _tangent_lp(data, vbar, kt.lam, kt.cone, dv, vec(dv_star))
    if not lvl1.member:
        raise NotTangent("second-level pair is not tangent at the first level")
    point = tuple(dv) + tuple(lvl1.mu)
    normal = tuple(lvl1.zeta) + scale(2, data.curvature(vbar, dv))
    return C.critical_cone(kt.cone, point, normal), kt.lam


def tangent3_member(data, geom, vbar, vbar_star, dv, dv_star, u, ustar) -> TangentMembership:
    K2, lam = ktilde2(data, geom, vbar, vbar_star, dv, dv_star)
    return _tangent_lp(data, vec(vbar), lam, K2, vec(u), vec(ustar))


def normal_to_tangent2_member(data, geom, vbar, vbar_star, dv, dv_star, wstar, w) -> NormalMembership:
    K2, lam = ktilde2(data, geom, vbar, vbar_star, dv, dv_star)
    return _normal_lp(data, vec(vbar), lam, K2, vec(wstar), vec(w))


def lineality_catalog(geom: PointGeometry, m: int) -> tuple:
    """Basis vectors of ℒ(K̄), their negatives, then 0."""
    basis = tuple(geom.lineality)
    return basis + tuple(neg(b) for b in basis) + ((ZERO,) * m,)


def zero_dir_filter(data, geom, vstar, wstar, w, sigma=None) -> ZeroDirVerdict:
    """Necessary conditions for (w*, w) to be a regular normal at (0, v*)."""
    vstar, wstar, w = vec(vstar), vec(wstar), vec(w)
    if not C.in_polar(vstar, geom.K_v):
        raise NotPolarMember("v* is not in the polar of the critical cone")
    crit0 = C.critical_cone(geom.K, (ZERO,) * data.m, vstar)
    w_ok = crit0.contains(w)
    for vbar in lineality_catalog(geom, data.m):
        dd = directional(data, geom, vbar)
        Sig = tuple(s for s in sigma if dd.Lam_v.contains(s)) if sigma else dd.vertices
        if not w_ok or not Sig:
            return ZeroDirVerdict(False, vbar)
        sys = LinearSystem()
        theta = sys.block("theta", len(Sig))
        for t in theta:
            sys.ge(t)
        sys.eq(esum(theta) - 1)
        lam = [edot([s[i] for s in Sig], theta) for i in range(data.q)]
        hw = data.hess_dirs(w)
        y = _normal_expr(sys, crit0)
        for k in range(data.m):
            sys.eq(wstar[k] + edot([h[k] for h in hw], lam) - y[k])
        if sys.solve() is None:
            return ZeroDirVerdict(False, vbar)
        if not is_zero(vbar) and check_2_nondegenerate(data, geom, vbar).holds:
            reps = list(dd.vertices)
            if len(reps) > 1:
                reps.append(barycenter(reps))
            for lam_bar in reps:
                vs = add(lincomb(lam_bar, data.hess_dirs(vbar), data.m), vstar)
                if not normal_to_tangent_member(data, geom, vbar, vs, wstar, w).member:
                    return ZeroDirVerdict(False, vbar)
    return ZeroDirVerdict(True)


def barycenter(points: Sequence) -> tuple:
    k = len(points)
    return tuple(sum(col, ZERO) / k for col in zip(*points))


def probe_directions(geom: PointGeometry, v: Sequence) -> tuple:
    T = C.tangent_cone(geom.K, v)
    V = C.h_to_v(T)
    return V.rays + V.lineality + tuple(neg(l) for l in V.lineality)


PROBE_SCALES = (Fraction(1, 8), Fraction(1, 64))


def polyhedrality_probe(data, geom, vbar, vbar_star) -> ProbeVerdict:
    vbar = vec(vbar)
    dd = directional(data, geom, vbar)
    if len(dd.vertices) <= 1:
        return ProbeVerdict("LocallyPolyhedral")
    for d in probe_directions(geom, vbar):
        outcomes = []
        for eps in PROBE_SCALES:
            v = add(vbar, scale(eps, d))
            if not geom.K.contains(v):
                break
            outcomes.append((v, directional(data, geom, v).vertices))
        if len(outcomes) != len(PROBE_SCALES):
            continue
        faces_seen = {o[1] for o in outcomes}
        if len(faces_seen) == 1 and outcomes[0][1] != dd.vertices:
            return ProbeVerdict("NotLocallyPolyhedral", outcomes[0][0])
    return ProbeVerdict("Unknown")


def validate_sigma(data, geom, vbar, vbar_star, sigma) -> bool:
    """Check a proposed Σ(v̄, v̄*) on generators of 𝒦_K̄(v̄, z̄*) at both probe scales."""
    vbar = vec(vbar)
    dd = directional(data, geom, vbar)
    if not sigma or any(tuple(s) not in dd.vertices for s in sigma):
        return False
    lam, zstar = decompose_tangent_pair(data, geom, vbar, vbar_star) if not is_zero(vbar) else (None, vec(vbar_star))
    crit = C.critical_cone(geom.K, vbar, zstar)
    V = C.h_to_v(crit)
    gens = V.rays + V.lineality + tuple(neg(l) for l in V.lineality)
    for u in gens:
        for beta in PROBE_SCALES:
            probe = directional(data, geom, add(vbar, scale(beta, u)))
            if not any(probe.Lam_v.contains(s) for s in sigma):
                return False
    return True
