"""Certificates, verifiers and bounded searches for the stationarity conditions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import cone as C
from .errors import (
    AssumptionNotAsserted,
    DimensionMismatch,
    InfeasibleMultiplier,
    InfeasiblePoint,
    NotApplicable,
    SharpMpecError,
)
from .geometry import (
    PointGeometry,
    _hess_times,
    _in_poly,
    barycenter,
    check_2_nondegenerate,
    directional,
    lineality_catalog,
    polyhedrality_probe,
    support,
    validate_sigma,
)
from .linalg import (
    ZERO,
    add,
    dot,
    is_zero,
    lincomb,
    matvec,
    null_direction_on_kernel,
    NotPSD,
    psd_on_kernel,
    solve_affine,
    sub,
    transpose,
    unit,
    vec,
    zeros,
)
from .linsys import Expr, LinearSystem, edot, esum
from .problem import ProblemData

PASS, FAIL, CONDITIONAL = "pass", "fail", "conditional"


# -- certificates and reports ---------------------------------------------------

@dataclass(frozen=True)
class SharpCertificate:
    """Index-form certificate. Index sets are 0-based frozensets."""

    vbar: tuple
    lambdabar: tuple
    I: frozenset
    Iplus: frozenset
    J: frozenset
    Jplus: frozenset
    w: tuple
    eta: tuple
    xi: tuple
    sigma: tuple
    deltav: tuple
    s_deltav: tuple
    mubar: tuple
    s_w: tuple
    zbar: tuple | None = None
    deltax: tuple | None = None
    alphas: tuple | None = None  # length q, zero outside I

    def __post_init__(self):
        for name in ("vbar", "lambdabar", "w", "eta", "xi", "sigma", "deltav", "s_deltav", "mubar", "s_w"):
            object.__setattr__(self, name, vec(getattr(self, name)))
        for name in ("zbar", "deltax", "alphas"):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, vec(getattr(self, name)))
        for name in ("I", "Iplus", "J", "Jplus"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))


STRICT, XI_ZERO, GRAD_ZERO = "StrictBranch", "XiZero", "GradWZero"


@dataclass(frozen=True)
class MStatCertificate:
    lam: tuple
    w: tuple
    xi: tuple
    sigma: tuple
    branches: tuple = ()  # ((index, tag), ...) over biactive indices

    def __post_init__(self):
        for name in ("lam", "w", "xi", "sigma"):
            object.__setattr__(self, name, vec(getattr(self, name)))
        object.__setattr__(self, "branches", tuple((int(i), t) for i, t in self.branches))


@dataclass(frozen=True)
class Condition:
    id: str
    verdict: str
    detail: str = ""


@dataclass
class AuditReport:
    conditions: list = field(default_factory=list)
    face_view: dict | None = None
    notes: list = field(default_factory=list)

    def add(self, cid: str, ok, detail: str = ""):
        if ok is True:
            verdict = PASS
        elif ok is False:
            verdict = FAIL
        else:
            verdict = ok
        self.conditions.append(Condition(cid, verdict, detail))
        return verdict == PASS

    @property
    def verdict(self) -> str:
        kinds = {c.verdict for c in self.conditions}
        if FAIL in kinds:
            return "fail"
        if CONDITIONAL in kinds:
            return "conditionally-pass"
        return "pass"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def failed(self) -> list:
        return [c.id for c in self.conditions if c.verdict == FAIL]


@dataclass(frozen=True)
class Found:
    cert: object
    report: AuditReport = field(compare=False, default=None)


@dataclass(frozen=True)
class NotFoundWithinCatalog:
    catalog: str


@dataclass(frozen=True)
class Satisfied:
    pass


@dataclass(frozen=True)
class Violated:
    witness: dict


@dataclass(frozen=True)
class Inconclusive:
    reason: str


# -- shared pieces -------------------------------------------------------------

def _fmt(x) -> str:
    return "(" + ", ".join(str(a) for a in x) + ")"


def _labels(S) -> str:
    return "{" + ", ".join(str(i + 1) for i in sorted(S)) + "}"


def _stationarity_residuals(data: ProblemData, lam, w, xi, sigma, eta=None, vbar=None):
    """Left-hand sides of the x- and y-stationarity equations."""
    ax = sub(data.grad_F_x, matvec(transpose(data.jac_phi_x, data.n), w)) if data.m else data.grad_F_x
    if data.p:
        ax = add(ax, matvec(transpose(data.jac_G_x, data.n), sigma))
    by = sub(data.grad_F_y, matvec(transpose(data.jac_phi_y, data.m), w))
    if data.p:
        by = add(by, matvec(transpose(data.jac_G_y, data.m), sigma))
    by = sub(by, lincomb(lam, data.hess_dirs(w), data.m))
    by = add(by, data.grad_g_combo(xi))
    if eta is not None and vbar is not None:
        by = add(by, lincomb([2 * e for e in eta], data.hess_dirs(vbar), data.m))
    return ax, by


def _stationarity_rows(sys: LinearSystem, data: ProblemData, lam, w, xi, sigma, eta=None, vbar=None):
    """Symbolic version of ``_stationarity_residuals`` added as equalities."""
    n, m = data.n, data.m
    for k in range(n):
        e = Expr.lift(data.grad_F_x[k]) - edot([r[k] for r in data.jac_phi_x], w)
        if data.p:
            e = e + edot([r[k] for r in data.jac_G_x], sigma)
        sys.eq(e, "a")
    hw = [edot([data.hess_g[i][k][j] for j in range(m)], w) for i in range(data.q) for k in range(m)]
    for k in range(m):
        e = Expr.lift(data.grad_F_y[k]) - edot([r[n + k] for r in data.jac_phi], w)
        if data.p:
            e = e + edot([r[n + k] for r in data.jac_G], sigma)
        e = e - esum(hw[i * m + k] * lam[i] for i in range(data.q) if lam[i])
        e = e + edot([data.jac_g[i][k] for i in range(data.q)], xi)
        if eta is not None:
            e = e + 2 * _hess_times(data, eta, vbar)[k]
        sys.eq(e, "b")


def _sigma_rows(sys, data, sigma):
    for i in range(data.p):
        sys.ge(sigma[i], "g")
        if data.G_val[i] != 0:
            sys.eq(sigma[i], "g")


def _check_dims(data: ProblemData, cert: SharpCertificate):
    m, q, p = data.m, data.q, data.p
    sizes = {
        "vbar": m, "lambdabar": q, "w": m, "eta": q, "xi": q, "sigma": p,
        "deltav": m, "s_deltav": m, "mubar": q, "s_w": m,
    }
    for name, size in sizes.items():
        if len(getattr(cert, name)) != size:
            raise DimensionMismatch(f"{name} has length {len(getattr(cert, name))}, expected {size}")
    for name, size in (("zbar", m), ("deltax", data.n), ("alphas", q)):
        val = getattr(cert, name)
        if val is not None and len(val) != size:
            raise DimensionMismatch(f"{name} has length {len(val)}, expected {size}")
    for S in (cert.I, cert.Iplus, cert.J, cert.Jplus):
        if any(i < 0 or i >= q for i in S):
            raise DimensionMismatch("index outside the lower-level constraint range")


def _require_assumption(data: ProblemData):
    if not data.assumption1:
        raise AssumptionNotAsserted("the constraint qualification flag is not asserted")


def _eta_cone(data: ProblemData, J, Jplus) -> C.HCone:
    """{μ : ∇gᵀμ = 0, μ_i = 0 off J, μ_i ≥ 0 on J∖J⁺}."""
    q = data.q
    eq = [tuple(data.jac_g[i][k] for i in range(q)) for k in range(data.m)]
    eq += [unit(q, i) for i in range(q) if i not in J]
    ineq = [tuple(-x for x in unit(q, i)) for i in sorted(set(J) - set(Jplus))]
    return C.HCone(q, tuple(eq), tuple(ineq))


# -- verification ---------------------------------------------------------------

def verify_sharp(data: ProblemData, geom: PointGeometry, cert: SharpCertificate) -> AuditReport:
    _check_dims(data, cert)
    _require_assumption(data)
    rep = AuditReport()
    q = data.q
    v, lam = cert.vbar, cert.lambdabar

    if not rep.add("pre:vbar", geom.K.contains(v), "v̄ in the critical cone"):
        return rep
    dd = directional(data, geom, v)
    if not rep.add("pre:lambdabar", dd.Lam_v.contains(lam), "λ̄ in the directional multiplier set"):
        return rep
    Jl, JLv, JL, Ibar = support(lam), dd.jplus, geom.jplus_all, dd.active
    chain = Jl <= cert.Jplus <= cert.J <= JLv <= JL <= cert.Iplus <= cert.I <= Ibar
    rep.add("pre:chain", chain, f"J⁺(λ̄)={_labels(Jl)} J̄⁺(Λ̄(v̄))={_labels(JLv)} "
            f"J̄⁺(Λ̄)={_labels(JL)} Ī(v̄)={_labels(Ibar)}")
    rep.add("pre:sigma", all(s >= 0 for s in cert.sigma), "σ ≥ 0")
    if cert.zbar is not None:
        rep.add("pre:zbar", C.in_polar(cert.zbar, C.h_to_v(C.tangent_cone(geom.K, v))),
                "z̄* normal to the critical cone at v̄")

    w, xi, eta = cert.w, cert.xi, cert.eta
    ax, by = _stationarity_residuals(data, lam, w, xi, cert.sigma, eta, v)
    rep.add("a", is_zero(ax), f"residual {_fmt(ax)}")
    rep.add("b", is_zero(by), f"residual {_fmt(by)}")
    rep.add("c", all(xi[i] == 0 for i in range(q) if i not in cert.I), "ξ vanishes off I")
    gw = [dot(data.jac_g[i], w) for i in range(q)]
    rep.add("d", all(xi[i] >= 0 and gw[i] <= 0 for i in cert.I - cert.Iplus), "sign conditions on I∖I⁺")
    rep.add("e", all(gw[i] == 0 for i in cert.Iplus), "∇g_i w = 0 on I⁺")
    f_ok = (
        is_zero(data.grad_g_combo(eta))
        and all(eta[i] == 0 for i in range(q) if i not in cert.J)
        and all(eta[i] >= 0 for i in cert.J - cert.Jplus)
    )
    rep.add("f", f_ok, "η conditions")
    rep.add("g", all(s * G == 0 for s, G in zip(cert.sigma, data.G_val)), "complementarity for σ")

    dv = cert.deltav
    gdv = [dot(data.jac_g[i], dv) for i in range(q)]
    rep.add("h", all(gdv[i] == 0 for i in JL) and all(gdv[i] <= 0 for i in Ibar - JL), "δv tangent at v̄")
    rep.add("i", cert.I == frozenset(i for i in Ibar if gdv[i] == 0), "I recovered from δv")
    cdv = data.curvature(v, dv)
    e = [dot(data.jac_g[i], cert.s_deltav) + cdv[i] for i in range(q)]
    rep.add("j", all(e[i] == 0 for i in Jl) and all(e[i] <= 0 for i in JLv - Jl), "s_δv system")
    rep.add("k", cert.J == frozenset(i for i in JLv if e[i] == 0), "J recovered from s_δv")
    mu = cert.mubar
    l_ok = (
        is_zero(data.grad_g_combo(mu))
        and all(mu[i] == 0 for i in range(q) if i not in cert.J)
        and all(mu[i] >= 0 for i in cert.J - Jl)
    )
    rep.add("l", l_ok, "μ̄ conditions")
    rep.add("m", cert.Jplus == Jl | frozenset(i for i in cert.J - Jl if mu[i] > 0), "J⁺ recovered from μ̄")
    cw = data.curvature(v, w)
    nres = [dot(data.jac_g[i], cert.s_w) + cw[i] for i in range(q)]
    rep.add("n", all(nres[i] == 0 for i in cert.Jplus) and all(nres[i] <= 0 for i in cert.J - cert.Jplus),
            "s_w system")

    if not is_zero(v):
        nd = check_2_nondegenerate(data, geom, v)
        if not nd.holds:
            rep.notes.append(f"not 2-nondegenerate at v̄, witness {_fmt(nd.witness)}")

    zbar = _furthermore(data, geom, dd, cert, rep)
    rep.face_view = _face_view(data, geom, dd, cert, zbar)
    return rep


def _full(cert: SharpCertificate, dd, lam) -> bool:
    return cert.I == dd.active and cert.Jplus == support(lam) and cert.J == dd.jplus


def _sigma_at_zero(data, geom, lam, zbar) -> bool:
    if data.sigma_choice is None:
        return tuple(lam) in geom.extreme
    return tuple(lam) in data.sigma_choice and validate_sigma(data, geom, zeros(data.m), zbar, data.sigma_choice)


def _alpha_lp(data, geom, v, I, Iplus, fixed=None):
    """Coefficients α on I with α > 0 on I⁺∖J̄⁺(Λ̄) and Σα_i∇g_i normal at v."""
    sys = LinearSystem()
    Is = sorted(I)
    a = sys.block("alpha", len(Is))
    z = [edot([data.jac_g[i][k] for i in Is], a) for k in range(data.m)]
    T = C.h_to_v(C.tangent_cone(geom.K, v))
    for l in T.lineality:
        sys.eq(edot(l, z))
    for r in T.rays:
        sys.le(edot(r, z))
    strict = [a[Is.index(i)] for i in sorted(Iplus - geom.jplus_all)]
    sol = sys.strict_solve(strict)
    if sol is None:
        return None
    out = [ZERO] * data.q
    for i, val in zip(Is, sol[a]):
        out[i] = val
    return tuple(out)


def _furthermore(data, geom, dd, cert: SharpCertificate, rep: AuditReport):
    """Adds the case-split condition; returns the z̄* it settled on (or None)."""
    v, lam, q = cert.vbar, cert.lambdabar, data.q
    strict_set = cert.Iplus - geom.jplus_all

    def alpha_ok(alpha):
        return (
            all(alpha[i] == 0 for i in range(q) if i not in cert.I)
            and all(alpha[i] > 0 for i in strict_set)
        )

    def is_normal(z):
        return C.in_polar(z, C.h_to_v(C.tangent_cone(geom.K, v)))

    if _full(cert, dd, lam):
        if not is_zero(v):
            rep.add("furthermore", True, "case (a): v̄ ≠ 0")
            return cert.zbar
        if geom.lineality:
            rep.add("furthermore", False, "case (b) needs a pointed critical cone")
            return cert.zbar
        alpha = cert.alphas
        if alpha is None:
            alpha = _alpha_lp(data, geom, v, cert.I, cert.Iplus)
            if alpha is None:
                rep.add("furthermore", False, "case (b): no admissible α")
                return cert.zbar
        zbar = data.grad_g_combo(alpha)
        ok = alpha_ok(alpha) and is_normal(zbar) and _sigma_at_zero(data, geom, lam, zbar)
        if cert.zbar is not None:
            ok = ok and tuple(cert.zbar) == zbar
        rep.add("furthermore", ok, f"case (b) with z̄*={_fmt(zbar)}, α={_fmt(alpha)}")
        return zbar

    if is_zero(v):
        rep.add("furthermore", False, "reduced index sets require v̄ ≠ 0")
        return cert.zbar
    if cert.deltax is None or cert.alphas is None:
        rep.add("furthermore", False, "reduced index sets require δx and α")
        return cert.zbar
    alpha, dx = cert.alphas, cert.deltax
    zbar = data.grad_g_combo(alpha)
    rep.add("II:alpha", alpha_ok(alpha), f"α={_fmt(alpha)}")
    rep.add("II:zbar", is_normal(zbar) and (cert.zbar is None or tuple(cert.zbar) == zbar),
            f"z̄*={_fmt(zbar)} normal at v̄")
    dxv = tuple(dx) + tuple(v)
    rep.add("IIa", dot(data.grad_F, dxv) == 0, "∇F vanishes on (δx, v̄)")
    rhs = add(add(matvec(data.jac_phi, dxv), lincomb(lam, data.hess_dirs(v), data.m)), zbar)
    rep.add("IIb", is_zero(rhs), f"residual {_fmt(rhs)}")
    c_ok = True
    for i in range(data.p):
        if data.G_val[i] == 0:
            s = dot(data.jac_G[i], dxv)
            c_ok = c_ok and s <= 0 and cert.sigma[i] * s == 0
    rep.add("IIc", c_ok, "active upper-level constraints")
    vstar = add(lincomb(lam, data.hess_dirs(v), data.m), zbar)
    probe = polyhedrality_probe(data, geom, v, vstar)
    verdict = {"NotLocallyPolyhedral": PASS, "Unknown": CONDITIONAL}.get(probe.kind, FAIL)
    detail = probe.kind + (f" at {_fmt(probe.witness)}" if probe.witness else "")
    rep.add("II:nonpolyhedral", verdict, detail)
    return zbar


def _face_view(data, geom, dd, cert: SharpCertificate, zbar):
    """Nested faces reproducing the index data, with the face-form memberships."""
    v, q, m = cert.vbar, data.q, data.m
    try:
        D_v_target = C.canonical(C.HCone(
            m,
            tuple(data.jac_g[i] for i in sorted(cert.Iplus)),
            tuple(data.jac_g[i] for i in sorted(cert.I - cert.Iplus)),
        ))
        T = C.tangent_cone(geom.K, v)
        N = C.canonical_v(C.VCone(m, T.eq, T.ineq))
        candidates = []
        if zbar is not None:
            candidates.append(tuple(zbar))
        candidates.append(lincomb([1] * len(cert.Iplus), [data.jac_g[i] for i in sorted(cert.Iplus)], m))
        candidates.append(zeros(m))
        gens = list(N.rays) + list(N.lineality) + [tuple(-x for x in l) for l in N.lineality]
        candidates += gens
        if gens:
            candidates.append(lincomb([1] * len(gens), gens, m))
        v_side = None
        for z in candidates:
            if not C.in_polar(z, C.h_to_v(T)):
                continue
            crit = C.critical_cone(geom.K, v, z)
            if not crit.contains(cert.deltav):
                continue
            F2 = C.face_of_point(crit, cert.deltav)
            for F1 in C.faces(crit):
                if set(F1.tight) <= set(F2.tight) and C.canonical(C.face_difference(crit, F1, F2)) == D_v_target:
                    v_side = (z, crit, F1, F2)
                    break
            if v_side:
                break
        if v_side is None:
            return None

        Tl = C.tangent_of_polyhedron(dd.Lam_v, cert.lambdabar)
        D_l_target = C.canonical(_eta_cone(data, cert.J, cert.Jplus))
        curv_dv = data.curvature(v, cert.deltav)
        if not Tl.contains(cert.mubar):
            return None
        G2 = C.face_of_point(Tl, cert.mubar)
        l_side = None
        for G1 in C.faces(Tl):
            if set(G1.tight) <= set(G2.tight) and C.canonical(C.face_difference(Tl, G1, G2)) == D_l_target:
                l_side = (G1, G2)
                break
        if l_side is None:
            return None
        z, crit, F1, F2 = v_side
        G1, G2 = l_side
        Dv = C.face_difference(crit, F1, F2)
        Dl = C.face_difference(Tl, G1, G2)
        ax, by = _stationarity_residuals(data, cert.lambdabar, cert.w, zeros(q), cert.sigma, cert.eta, v)
        F1l_expected = C.intersect(Tl, C.HCone(q, (curv_dv,) if not is_zero(curv_dv) else ()))
        checks = {
            "a": is_zero(ax),
            "b": C.in_polar(tuple(-x for x in by), C.h_to_v(Dv)),
            "c": C.in_polar(data.curvature(v, cert.w), C.h_to_v(Dl)),
            "d": C.in_polar(curv_dv, C.h_to_v(Tl)) and C.cone_equal(C.face_cone(Tl, G1), F1l_expected),
            "e": all(s * G == 0 for s, G in zip(cert.sigma, data.G_val)) and all(s >= 0 for s in cert.sigma),
            "w": Dv.contains(cert.w),
            "eta": Dl.contains(cert.eta),
        }
        return {
            "zstar": z,
            "critical_cone": C.canonical(crit),
            "F1v": C.canonical(C.face_cone(crit, F1)),
            "F2v": C.canonical(C.face_cone(crit, F2)),
            "tangent_lambda": C.canonical(Tl),
            "F1l": C.canonical(C.face_cone(Tl, G1)),
            "F2l": C.canonical(C.face_cone(Tl, G2)),
            "checks": checks,
        }
    except SharpMpecError:
        return None


# -- search for index-form certificates -------------------------------------------

def _subsets_between(low: frozenset, high: frozenset):
    """All S with low ⊆ S ⊆ high, larger sets first, then lexicographic."""
    free = sorted(high - low)
    out = []
    for r in range(len(free), -1, -1):
        for extra in itertools.combinations(free, r):
            out.append(low | frozenset(extra))
    return out


def _chains(Ibar, JL, JLv, Jl):
    """Index chains, the full choice first."""
    out = []
    for I in _subsets_between(JL, Ibar):
        for Ip in _subsets_between(JL, I):
            for J in _subsets_between(Jl, JLv):
                for Jp in reversed(_subsets_between(Jl, J)):
                    out.append((I, Ip, J, Jp))
    full = [c for c in out if c[0] == Ibar and c[2] == JLv and c[3] == Jl]
    return full + [c for c in out if c not in full]


def _direction_catalog(data: ProblemData, geom: PointGeometry, extra=()) -> list:
    m = data.m
    cands = [zeros(m)]
    for F in C.faces(geom.K):
        cands.append(C.ri_representative(C.face_cone(geom.K, F)))
    cands += list(lineality_catalog(geom, m))
    cands += [vec(d) for d in tuple(data.directions) + tuple(extra)]
    out = []
    for c in cands:
        if c not in out and geom.K.contains(c):
            out.append(c)
    return out


def _lambda_catalog(dd) -> list:
    reps = list(dd.vertices)
    if len(reps) > 1:
        reps.append(barycenter(reps))
    return reps


def _deltav_lp(data, dd, v, I, J, Jl):
    """δv and s_δv recovering I and J exactly."""
    m = data.m
    sys = LinearSystem()
    dv = sys.block("dv", m)
    s = sys.block("s", m)
    strict = []
    for i in sorted(dd.active):
        gi = edot(data.jac_g[i], dv)
        if i in I:
            sys.eq(gi, "i")
        else:
            sys.le(gi, "h")
            strict.append(-gi)
    hv = data.hess_dirs(v)  # vᵀH_i δv = (H_i v)·δv
    for i in sorted(dd.jplus):
        e = edot(data.jac_g[i], s) + edot(hv[i], dv)
        if i in J:
            sys.eq(e, "k")
        else:
            sys.le(e, "j")
            strict.append(-e)
    sol = sys.strict_solve(strict)
    if sol is None:
        return None
    return sol[dv], sol[s]


def _mubar_lp(data, J, Jp, Jl):
    q = data.q
    sys = LinearSystem()
    mu = sys.block("mu", q)
    for k in range(data.m):
        sys.eq(edot([data.jac_g[i][k] for i in range(q)], mu), "l")
    strict = []
    for i in range(q):
        if i not in J:
            sys.eq(mu[i], "l")
        elif i not in Jl:
            if i in Jp:
                sys.ge(mu[i], "l")
                strict.append(mu[i])
            else:
                sys.eq(mu[i], "m")
    sol = sys.strict_solve(strict)
    return None if sol is None else sol[mu]


def _main_system(data, v, lam, I, Ip, J, Jp):
    """Conditions a–g and n as a linear system; returns (system, blocks)."""
    m, q, p = data.m, data.q, data.p
    sys = LinearSystem()
    w = sys.block("w", m)
    xi = sys.block("xi", q)
    eta = sys.block("eta", q)
    sigma = sys.block("sigma", p)
    s_w = sys.block("s_w", m)
    _stationarity_rows(sys, data, lam, w, xi, sigma, eta, v)
    for i in range(q):
        gw = edot(data.jac_g[i], w)
        if i not in I:
            sys.eq(xi[i], "c")
        elif i in Ip:
            sys.eq(gw, "e")
        else:
            sys.ge(xi[i], "d")
            sys.le(gw, "d")
    for k in range(m):
        sys.eq(edot([data.jac_g[i][k] for i in range(q)], eta), "f")
    for i in range(q):
        if i not in J:
            sys.eq(eta[i], "f")
        elif i not in Jp:
            sys.ge(eta[i], "f")
    _sigma_rows(sys, data, sigma)
    hv = data.hess_dirs(v)
    for i in sorted(J):
        e = edot(data.jac_g[i], s_w) + edot(hv[i], w)
        if i in Jp:
            sys.eq(e, "n")
        else:
            sys.le(e, "n")
    return sys, dict(w=w, xi=xi, eta=eta, sigma=sigma, s_w=s_w)


def _case2_solve(data, geom, v, lam, I, Ip, J, Jp):
    """Joint system with δx and α; branches over active upper-level rows."""
    n, m, q = data.n, data.m, data.q
    active_G = [i for i in range(data.p) if data.G_val[i] == 0]
    Is = sorted(I)
    T = C.h_to_v(C.tangent_cone(geom.K, v))
    for pattern in itertools.product((0, 1), repeat=len(active_G)):
        sys, B = _main_system(data, v, lam, I, Ip, J, Jp)
        dx = sys.block("dx", n)
        alpha = sys.block("alpha", len(Is))
        dxv = list(dx) + [Expr.lift(c) for c in v]
        sys.eq(edot(data.grad_F, dxv), "IIa")
        z = [edot([data.jac_g[i][k] for i in Is], alpha) for k in range(m)]
        hv = lincomb(lam, data.hess_dirs(v), m)
        for k in range(m):
            sys.eq(edot(data.jac_phi[k], dxv) + hv[k] + z[k], "IIb")
        for l in T.lineality:
            sys.eq(edot(l, z), "zbar")
        for r in T.rays:
            sys.le(edot(r, z), "zbar")
        for i, on in zip(active_G, pattern):
            s = edot(data.jac_G[i], dxv)
            sys.le(s, "IIc")
            if on:
                sys.eq(s, "IIc")
            else:
                sys.eq(B["sigma"][i], "IIc")
        strict = [alpha[Is.index(i)] for i in sorted(Ip - geom.jplus_all)]
        sol = sys.strict_solve(strict)
        if sol is not None:
            a = [ZERO] * q
            for i, val in zip(Is, sol[alpha]):
                a[i] = val
            return sol, B, sol[dx], tuple(a)
    return None


def search_sharp(data: ProblemData, geom: PointGeometry, extra_directions=()):
    """First certificate in a fixed catalog order; falls back to a
    conditionally passing one when nothing passes outright."""
    _require_assumption(data)
    catalog = _direction_catalog(data, geom, extra_directions)
    fallback = None
    if not geom.nonempty:
        return NotFoundWithinCatalog("empty multiplier set")
    for v in catalog:
        if is_zero(v) and geom.lineality:
            continue
        dd = directional(data, geom, v)
        probe_kind = None
        dcache, mcache = {}, {}
        for lam in _lambda_catalog(dd):
            Jl = support(lam)
            for I, Ip, J, Jp in _chains(dd.active, geom.jplus_all, dd.jplus, Jl):
                full = I == dd.active and J == dd.jplus and Jp == Jl
                if not full:
                    if is_zero(v):
                        continue
                    if probe_kind is None:
                        probe_kind = polyhedrality_probe(data, geom, v, None).kind
                    if probe_kind == "LocallyPolyhedral":
                        continue
                elif is_zero(v) and not _sigma_at_zero_default(data, geom, lam):
                    continue
                if (I, J) not in dcache:
                    dcache[(I, J)] = _deltav_lp(data, dd, v, I, J, Jl)
                dvs = dcache[(I, J)]
                if dvs is None:
                    continue
                if (J, Jp, Jl) not in mcache:
                    mcache[(J, Jp, Jl)] = _mubar_lp(data, J, Jp, Jl)
                mu = mcache[(J, Jp, Jl)]
                if mu is None:
                    continue
                dx = alphas = None
                if full:
                    sys, B = _main_system(data, v, lam, I, Ip, J, Jp)
                    sol = sys.solve()
                    if sol is None:
                        continue
                    if is_zero(v):
                        alphas = _alpha_lp(data, geom, v, I, Ip)
                        if alphas is None:
                            continue
                else:
                    out = _case2_solve(data, geom, v, lam, I, Ip, J, Jp)
                    if out is None:
                        continue
                    sol, B, dx, alphas = out
                zbar = data.grad_g_combo(alphas) if alphas is not None else None
                cert = SharpCertificate(
                    v, lam, I, Ip, J, Jp,
                    sol[B["w"]], sol[B["eta"]], sol[B["xi"]], sol[B["sigma"]],
                    dvs[0], dvs[1], mu, sol[B["s_w"]],
                    zbar, dx, alphas,
                )
                rep = verify_sharp(data, geom, cert)
                if rep.passed:
                    return Found(cert, rep)
                if rep.verdict == "conditionally-pass" and fallback is None:
                    fallback = Found(cert, rep)
    if fallback is not None:
        return fallback
    return NotFoundWithinCatalog(
        f"{len(catalog)} directions (zero, face representatives of the critical cone, "
        "lineality directions, supplied directions); multipliers at vertices and barycenter"
    )


def _sigma_at_zero_default(data, geom, lam) -> bool:
    if data.sigma_choice is None:
        return tuple(lam) in geom.extreme
    return tuple(lam) in data.sigma_choice


# -- singleton multiplier corollary ---------------------------------------------

def verify_corollary(data: ProblemData, geom: PointGeometry, cert: SharpCertificate) -> AuditReport:
    """Conditions a–e and g with I = Ī(v̄) for a singleton multiplier set."""
    _check_dims(data, cert)
    rep = AuditReport()
    if not geom.singleton:
        raise NotApplicable("multiplier set is not a singleton")
    lam = geom.extreme[0]
    v = cert.vbar
    if not rep.add("pre:vbar", geom.K.contains(v), "v̄ in the critical cone"):
        return rep
    rep.add("pre:lambdabar", tuple(cert.lambdabar) == lam, "λ̄ is the unique multiplier")
    Ibar = directional(data, geom, v).active
    rep.add("pre:chain", support(lam) <= cert.Iplus <= Ibar, "J̄⁺(λ̄) ⊆ I⁺ ⊆ Ī(v̄)")
    rep.add("pre:sigma", all(s >= 0 for s in cert.sigma), "σ ≥ 0")
    ax, by = _stationarity_residuals(data, lam, cert.w, cert.xi, cert.sigma)
    rep.add("a", is_zero(ax), f"residual {_fmt(ax)}")
    rep.add("b", is_zero(by), f"residual {_fmt(by)}")
    xi = cert.xi
    gw = [dot(data.jac_g[i], cert.w) for i in range(data.q)]
    rep.add("c", all(xi[i] == 0 for i in range(data.q) if i not in Ibar), "ξ vanishes off Ī(v̄)")
    rep.add("d", all(xi[i] >= 0 and gw[i] <= 0 for i in Ibar - cert.Iplus), "sign conditions")
    rep.add("e", all(gw[i] == 0 for i in cert.Iplus), "∇g_i w = 0 on I⁺")
    rep.add("g", all(s * G == 0 for s, G in zip(cert.sigma, data.G_val)), "complementarity for σ")
    return rep


def corollary_unique_check(data: ProblemData, geom: PointGeometry, extra_directions=()):
    """Found(cert), None, or NotApplicable (returned, not raised)."""
    if not geom.singleton:
        return NotApplicable("multiplier set is not a singleton")
    lam = geom.extreme[0]
    m, q, p = data.m, data.q, data.p
    Jl = support(lam)
    for v in _direction_catalog(data, geom, extra_directions):
        Ibar = directional(data, geom, v).active
        for Ip in _subsets_between(Jl, Ibar):
            sys = LinearSystem()
            w = sys.block("w", m)
            xi = sys.block("xi", q)
            sigma = sys.block("sigma", p)
            _stationarity_rows(sys, data, lam, w, xi, sigma)
            for i in range(q):
                gw = edot(data.jac_g[i], w)
                if i not in Ibar:
                    sys.eq(xi[i], "c")
                elif i in Ip:
                    sys.eq(gw, "e")
                else:
                    sys.ge(xi[i], "d")
                    sys.le(gw, "d")
            _sigma_rows(sys, data, sigma)
            sol = sys.solve()
            if sol is None:
                continue
            wv = sol[w]
            Js = sorted(Jl)
            cw = data.curvature(v, wv)
            s_w = zeros(m)
            if Js:
                out = solve_affine([data.jac_g[i] for i in Js], [-cw[i] for i in Js], m)
                if out is None:
                    continue
                s_w = out[0]
            cert = SharpCertificate(
                v, lam, Ibar, Ip, Jl, Jl, wv, zeros(q), sol[xi], sol[sigma],
                zeros(m), zeros(m), zeros(q), s_w,
            )
            return Found(cert, verify_corollary(data, geom, cert))
    return None


# -- M-stationarity -------------------------------------------------------------

def _check_multiplier(data: ProblemData, lam):
    if any(x > 0 for x in data.g) or any(x > 0 for x in data.G_val):
        raise InfeasiblePoint("constraint violated at the candidate point")
    ok = (
        len(lam) == data.q
        and all(l >= 0 for l in lam)
        and all(lam[i] == 0 for i in range(data.q) if data.g[i] < 0)
        and data.grad_g_combo(lam) == data.ystar
    )
    if not ok:
        raise InfeasibleMultiplier("λ is not a lower-level multiplier")


def biactive(data: ProblemData, lam) -> tuple:
    return tuple(i for i in range(data.q) if data.g[i] == 0 and lam[i] == 0)


def _tag(xi_i, gw_i) -> str:
    if xi_i > 0 and gw_i < 0:
        return STRICT
    if gw_i == 0 and xi_i != 0:
        return GRAD_ZERO
    return XI_ZERO


def verify_mstat(data: ProblemData, cert: MStatCertificate) -> AuditReport:
    lam = cert.lam
    _check_multiplier(data, lam)
    if len(cert.w) != data.m or len(cert.xi) != data.q or len(cert.sigma) != data.p:
        raise DimensionMismatch("certificate dimensions do not match the problem")
    rep = AuditReport()
    ax, by = _stationarity_residuals(data, lam, cert.w, cert.xi, cert.sigma)
    rep.add("a", is_zero(ax), f"residual {_fmt(ax)}")
    rep.add("b", is_zero(by), f"residual {_fmt(by)}")
    xi, q = cert.xi, data.q
    gw = [dot(data.jac_g[i], cert.w) for i in range(q)]
    rep.add("c", all(xi[i] == 0 for i in range(q) if data.g[i] < 0), "ξ vanishes on inactive constraints")
    rep.add("d", all(gw[i] == 0 for i in range(q) if lam[i] > 0), "∇g_i w = 0 where λ_i > 0")
    bi = biactive(data, lam)
    f_ok = all((xi[i] > 0 and gw[i] < 0) or xi[i] * gw[i] == 0 for i in bi)
    rep.add("f", f_ok, "biactive disjunction")
    tags = dict(cert.branches)
    consistent = True
    for i, t in tags.items():
        if i not in bi:
            consistent = False
        elif t == STRICT:
            consistent = consistent and xi[i] > 0 and gw[i] < 0
        elif t == XI_ZERO:
            consistent = consistent and xi[i] == 0
        elif t == GRAD_ZERO:
            consistent = consistent and gw[i] == 0
        else:
            consistent = False
    rep.add("f:tags", consistent, "branch tags match values")
    rep.add("e", all(s >= 0 for s in cert.sigma) and all(s * G == 0 for s, G in zip(cert.sigma, data.G_val)),
            "σ ≥ 0 and complementary")
    return rep


def mstat_branch_solve(data: ProblemData, lam, assignment: dict):
    """Solve for (w, ξ, σ) under a fixed tag per biactive index."""
    m, q, p = data.m, data.q, data.p
    sys = LinearSystem()
    w = sys.block("w", m)
    xi = sys.block("xi", q)
    sigma = sys.block("sigma", p)
    _stationarity_rows(sys, data, lam, w, xi, sigma)
    strict = []
    for i in range(q):
        gw = edot(data.jac_g[i], w)
        if data.g[i] < 0:
            sys.eq(xi[i], "c")
        elif lam[i] > 0:
            sys.eq(gw, "d")
        else:
            tag = assignment[i]
            if tag == STRICT:
                sys.ge(xi[i], "f")
                sys.le(gw, "f")
                strict += [xi[i], -gw]
            elif tag == XI_ZERO:
                sys.eq(xi[i], "f")
            else:
                sys.eq(gw, "f")
    _sigma_rows(sys, data, sigma)
    sol = sys.strict_solve(strict)
    if sol is None:
        return None
    return sol[w], sol[xi], sol[sigma]


def _mstat_cert(data, lam, w, xi, sigma) -> MStatCertificate:
    tags = tuple((i, _tag(xi[i], dot(data.jac_g[i], w))) for i in biactive(data, lam))
    return MStatCertificate(lam, w, xi, sigma, tags)


def search_mstat(data: ProblemData, lam=None) -> list:
    if lam is None:
        from .geometry import analyze_point

        geom = analyze_point(data)
        lams = list(geom.extreme)
        if len(lams) > 1:
            lams.append(barycenter(lams))
    else:
        lams = [vec(lam)]
    out = []
    for l in lams:
        _check_multiplier(data, l)
        bi = biactive(data, l)
        for tags in itertools.product((STRICT, XI_ZERO, GRAD_ZERO), repeat=len(bi)):
            res = mstat_branch_solve(data, l, dict(zip(bi, tags)))
            if res is None:
                continue
            cert = _mstat_cert(data, l, *res)
            if all(cert != c for c in out):
                out.append(cert)
    return out


def sharp_vs_mstat_audit(data: ProblemData, geom: PointGeometry, cert: SharpCertificate) -> AuditReport:
    if not geom.singleton:
        raise NotApplicable("multiplier set is not a singleton")
    pre = verify_corollary(data, geom, cert)
    if not pre.passed:
        raise NotApplicable("certificate fails the singleton-multiplier conditions: " + ", ".join(pre.failed()))
    lam = geom.extreme[0]
    induced = _mstat_cert(data, lam, cert.w, cert.xi, cert.sigma)
    rep = verify_mstat(data, induced)
    Ibar = directional(data, geom, cert.vbar).active
    for i in range(data.q):
        if i not in Ibar:
            why = "outside Ī(v̄), so ξ_i = 0"
        elif i in cert.Iplus:
            why = "in I⁺, so ∇g_i w = 0"
        else:
            why = "in Ī(v̄)∖I⁺, so ξ_i ≥ 0 and ∇g_i w ≤ 0"
        rep.notes.append(f"index {i + 1}: {why}")
    rep.face_view = {"induced": induced}
    return rep


# -- MSCQ sufficient condition ---------------------------------------------------

def _upper_implication(data: ProblemData) -> bool:
    """∇_xGᵀη = 0 with η ∈ N(G) forces ∇_yGᵀη = 0 (checked on generators)."""
    p = data.p
    if p == 0:
        return True
    eq = [tuple(data.jac_G_x[i][k] for i in range(p)) for k in range(data.n)]
    eq += [unit(p, i) for i in range(p) if data.G_val[i] != 0]
    ineq = [tuple(-x for x in unit(p, i)) for i in range(p) if data.G_val[i] == 0]
    V = C.h_to_v(C.HCone(p, tuple(eq), tuple(ineq)))
    gy = transpose(data.jac_G_y, data.m)
    return all(is_zero(matvec(gy, g)) for g in V.lineality + V.rays)


def _uv_witness(data: ProblemData, geom: PointGeometry, lam, extra=()):
    """(u, v) ≠ 0 with λ ∈ Λ̄(v), tangent-graph membership and upper tangency."""
    from .geometry import _normal_expr

    n, m, q = data.n, data.m, data.q
    active_G = [i for i in range(data.p) if data.G_val[i] == 0]
    for v in _direction_catalog(data, geom, extra):
        dd = directional(data, geom, v)
        if not dd.Lam_v.contains(lam):
            continue
        tight = C.membership(geom.K, v)
        pins = [None] if not is_zero(v) else [(k, s) for k in range(n) for s in (1, -1)]
        for pin in pins:
            sys = LinearSystem()
            u = sys.block("u", n)
            lam2 = sys.block("lam", q)
            _in_poly(sys, lam2, dd.Lam_v)
            z = _normal_expr(sys, geom.K, sorted(tight))
            hl = _hess_times(data, lam2, v)
            for k in range(m):
                rhs = -edot(data.jac_phi_x[k], u) - dot(data.jac_phi_y[k], v)
                sys.eq(hl[k] + z[k] - rhs)
            for i in active_G:
                sys.le(edot(data.jac_G_x[i], u) + dot(data.jac_G_y[i], v))
            if pin is not None:
                sys.eq(u[pin[0]] - pin[1])
            sol = sys.solve()
            if sol is not None:
                return sol[u], v
    return None


def mscq_sufficient_check(data: ProblemData, geom: PointGeometry, extra_directions=()):
    if not (data.lower_mscq and data.upper_mscq):
        return Inconclusive("constraint qualifications for g and G not asserted")
    if not _upper_implication(data):
        return Inconclusive("upper-level implication fails")
    if not geom.nonempty:
        return Inconclusive("empty multiplier set")
    m = data.m
    active_G = [i for i in range(data.p) if data.G_val[i] == 0]
    coupled = any(not is_zero(data.jac_G_y[i]) for i in active_G)
    if coupled:
        return Inconclusive("coupled-branch")
    for lam in geom.extreme:
        Q = tuple(
            tuple(data.jac_phi_y[a][b] for b in range(m)) for a in range(m)
        )
        H = data.hess_comb(lam)
        Q = tuple(tuple(Q[a][b] + H[a][b] for b in range(m)) for a in range(m))
        rows = [data.jac_g[i] for i in range(data.q) if lam[i] > 0]
        exact = not active_G
        if exact:
            rows += [tuple(data.jac_phi_x[k][j] for k in range(m)) for j in range(data.n)]
        verdict = psd_on_kernel(Q, rows, m)
        w = verdict.witness if isinstance(verdict, NotPSD) else null_direction_on_kernel(Q, rows, m)
        if w is None:
            continue
        if not exact:
            return Inconclusive("upper-level constraints active")
        uv = _uv_witness(data, geom, lam, extra_directions)
        if uv is None:
            return Inconclusive(f"no (u, v) found for multiplier {_fmt(lam)}")
        u, v = uv
        return Violated({"u": u, "v": v, "lam": lam, "eta": zeros(data.p), "w": w})
    return Satisfied()
