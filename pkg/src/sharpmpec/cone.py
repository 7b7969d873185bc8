"""Polyhedral cones: conversions, polars, faces, tangent/normal/critical cones."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .dd import double_description
from .errors import DimensionMismatch, NotMember, NotNested, NotNormal, TooManyRows
from .linalg import (
    ZERO,
    dot,
    identity,
    integerize,
    is_zero,
    kernel_basis,
    lincomb,
    neg,
    row_basis,
    sign_normalize,
    vec,
)
from .lp import HPolyhedron

FACE_ROW_CAP = 12


@dataclass(frozen=True)
class HCone:
    """``{v : e·v = 0 for e in eq, a·v <= 0 for a in ineq}``.

    Rows are scaled to coprime integers but keep their order, so index
    sets such as tight sets refer to positions in ``ineq``.
    """

    dim: int
    eq: tuple = ()
    ineq: tuple = ()

    def __post_init__(self):
        eq = tuple(integerize(vec(r)) for r in self.eq)
        ineq = tuple(integerize(vec(r)) for r in self.ineq)
        for r in eq + ineq:
            if len(r) != self.dim:
                raise DimensionMismatch(f"row of length {len(r)} in dimension {self.dim}")
        object.__setattr__(self, "eq", eq)
        object.__setattr__(self, "ineq", ineq)

    def contains(self, v: Sequence) -> bool:
        return membership(self, v) is not None

    def normalized(self) -> "HCone":
        """Sign-fixed equalities, sorted and deduplicated rows (no redundancy removal)."""
        eq = sorted({sign_normalize(r) for r in self.eq if not is_zero(r)})
        ineq = sorted({r for r in self.ineq if not is_zero(r)})
        return HCone(self.dim, tuple(eq), tuple(ineq))


@dataclass(frozen=True)
class VCone:
    """``span(lineality) + cone(rays)``."""

    dim: int
    lineality: tuple = ()
    rays: tuple = ()

    def __post_init__(self):
        lin = tuple(vec(r) for r in self.lineality)
        rays = tuple(vec(r) for r in self.rays)
        for r in lin + rays:
            if len(r) != self.dim:
                raise DimensionMismatch(f"generator of length {len(r)} in dimension {self.dim}")
        object.__setattr__(self, "lineality", lin)
        object.__setattr__(self, "rays", rays)


@dataclass(frozen=True, order=True)
class Face:
    """A face of an ``HCone`` given by its closed tight set of ``ineq`` rows."""

    tight: tuple


Cone = Union[HCone, VCone]


def h_to_v(K: HCone) -> VCone:
    lin, rays = double_description(K.dim, K.eq, K.ineq)
    return VCone(K.dim, lin, rays)


def v_to_h(V: VCone) -> HCone:
    # the polar of span(L) + cone(R) is {y : L y = 0, R y <= 0}; polar twice
    lin, rays = double_description(V.dim, V.lineality, V.rays)
    return HCone(V.dim, lin, rays)


def canonical(K: Cone) -> HCone:
    """Minimal H-form: unique for each point set."""
    return v_to_h(h_to_v(K) if isinstance(K, HCone) else K)


def canonical_v(V: Cone) -> VCone:
    return h_to_v(V if isinstance(V, HCone) else v_to_h(V))


def cone_equal(a: Cone, b: Cone) -> bool:
    return canonical(a) == canonical(b)


def polar(K: Cone) -> HCone:
    V = h_to_v(K) if isinstance(K, HCone) else V_of(K)
    return canonical(HCone(K.dim, V.lineality, V.rays))


def V_of(K: Cone) -> VCone:
    return K if isinstance(K, VCone) else h_to_v(K)


def intersect(a: HCone, b: HCone) -> HCone:
    return HCone(a.dim, a.eq + b.eq, a.ineq + b.ineq)


def minkowski_sum(a: Cone, b: Cone) -> VCone:
    va, vb = V_of(a), V_of(b)
    return canonical_v(VCone(a.dim, va.lineality + vb.lineality, va.rays + vb.rays))


def lineality(K: HCone) -> tuple:
    rows = K.eq + K.ineq
    if not rows:
        return identity(K.dim)
    return row_basis(kernel_basis(rows, K.dim), K.dim)


def span_plus(K: Cone) -> tuple:
    V = V_of(K)
    gens = V.lineality + V.rays
    return row_basis(gens, K.dim) if gens else ()


def membership(K: HCone, v: Sequence):
    """Tight set ``I(v)`` as a frozenset, or None when ``v`` is outside ``K``."""
    if len(v) != K.dim:
        raise DimensionMismatch("point dimension differs from cone")
    if any(dot(e, v) != 0 for e in K.eq):
        return None
    tight = set()
    for i, a in enumerate(K.ineq):
        s = dot(a, v)
        if s > 0:
            return None
        if s == 0:
            tight.add(i)
    return frozenset(tight)


def implicit_equalities(K: HCone) -> frozenset:
    V = h_to_v(K)
    return frozenset(
        i for i, a in enumerate(K.ineq) if all(dot(a, r) == 0 for r in V.rays)
    )


def ri_member(K: Union[HCone, HPolyhedron], v: Sequence) -> bool:
    if isinstance(K, HPolyhedron):
        from .lp import Optimal, lp_solve

        if not K.contains(v):
            return False
        for i in K.tight(v):
            a, b = K.ineq[i]
            out = lp_solve(a, K, "min")
            if not (isinstance(out, Optimal) and out.value == b):
                return False
        return True
    tight = membership(K, v)
    return tight is not None and tight == implicit_equalities(K)


def tangent_cone(K: HCone, v: Sequence) -> HCone:
    tight = membership(K, v)
    if tight is None:
        raise NotMember("point is not in the cone")
    return HCone(K.dim, K.eq, tuple(K.ineq[i] for i in sorted(tight)))


def tangent_of_polyhedron(P: HPolyhedron, z: Sequence) -> HCone:
    if not P.contains(z):
        raise NotMember("point is not in the polyhedron")
    tight = P.tight(z)
    return HCone(P.dim, tuple(a for a, _ in P.eq), tuple(P.ineq[i][0] for i in sorted(tight)))


def normal_of_polyhedron(P: Union[HPolyhedron, HCone], z: Sequence) -> VCone:
    """Generators of the normal cone: tight rows plus the span of equality rows."""
    if isinstance(P, HCone):
        tight = membership(P, z)
        if tight is None:
            raise NotMember("point is not in the cone")
        eq_rows, tight_rows = P.eq, [P.ineq[i] for i in sorted(tight)]
    else:
        if not P.contains(z):
            raise NotMember("point is not in the polyhedron")
        eq_rows = tuple(a for a, _ in P.eq)
        tight_rows = [P.ineq[i][0] for i in sorted(P.tight(z))]
    return canonical_v(VCone(P.dim, eq_rows, tuple(tight_rows)))


def _tangent_any(K: Union[HCone, HPolyhedron], v: Sequence) -> HCone:
    return tangent_of_polyhedron(K, v) if isinstance(K, HPolyhedron) else tangent_cone(K, v)


def in_polar(x: Sequence, V: VCone) -> bool:
    return all(dot(x, l) == 0 for l in V.lineality) and all(dot(x, r) <= 0 for r in V.rays)


def critical_cone(K: Union[HCone, HPolyhedron], v: Sequence, zstar: Sequence) -> HCone:
    T = _tangent_any(K, v)
    if not in_polar(zstar, h_to_v(T)):
        raise NotNormal("zstar is not a normal vector at v")
    return HCone(T.dim, T.eq + ((vec(zstar),) if not is_zero(zstar) else ()), T.ineq)


def _zero_patterns(K: HCone, rays) -> list:
    return [frozenset(i for i, a in enumerate(K.ineq) if dot(a, r) == 0) for r in rays]


def _closure(K: HCone, pats, S: frozenset) -> frozenset:
    all_rows = frozenset(range(len(K.ineq)))
    gens = [p for p in pats if S <= p]
    out = all_rows
    for p in gens:
        out &= p
    return out


def faces(K: HCone) -> list:
    """All faces, each exactly once, ordered from ``K`` itself downwards."""
    if len(K.ineq) > FACE_ROW_CAP:
        raise TooManyRows(f"face enumeration is capped at {FACE_ROW_CAP} inequality rows")
    V = h_to_v(K)
    pats = _zero_patterns(K, V.rays)
    start = _closure(K, pats, frozenset())
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for S in frontier:
            for i in range(len(K.ineq)):
                if i in S:
                    continue
                T = _closure(K, pats, S | {i})
                if T not in seen:
                    seen.add(T)
                    nxt.append(T)
        frontier = nxt
    return sorted((Face(tuple(sorted(S))) for S in seen), key=lambda f: (len(f.tight), f.tight))


def face_cone(K: HCone, F: Face) -> HCone:
    tight = set(F.tight)
    eq = K.eq + tuple(K.ineq[i] for i in F.tight)
    ineq = tuple(a for i, a in enumerate(K.ineq) if i not in tight)
    return HCone(K.dim, eq, ineq)


def face_of_point(K: HCone, v: Sequence) -> Face:
    """The face having ``v`` in its relative interior."""
    tight = membership(K, v)
    if tight is None:
        raise NotMember("point is not in the cone")
    return Face(tuple(sorted(tight)))


def ri_representative(K: Cone) -> tuple:
    V = V_of(K)
    return lincomb([1] * len(V.rays + V.lineality), V.rays + V.lineality, K.dim) if (
        V.rays or V.lineality
    ) else (ZERO,) * K.dim


def face_difference(K: HCone, F1: Face, F2: Face) -> HCone:
    """``F1 - F2`` for nested faces ``F2 ⊆ F1``.

    Equalities on the tight set of ``F1``, inequalities on the extra rows
    that are tight on ``F2``.
    """
    t1, t2 = set(F1.tight), set(F2.tight)
    if not t1 <= t2:
        raise NotNested("second face is not contained in the first")
    eq = K.eq + tuple(K.ineq[i] for i in sorted(t1))
    ineq = tuple(K.ineq[i] for i in sorted(t2 - t1))
    return HCone(K.dim, eq, ineq)


def face_pairs(K: HCone):
    fs = faces(K)
    for F1 in fs:
        for F2 in fs:
            if set(F1.tight) <= set(F2.tight):
                yield F1, F2


def limiting_normal_gph(C: Union[HCone, HPolyhedron], z: Sequence, zstar: Sequence) -> list:
    """Branches ``(D°, D)`` whose union is the limiting normal cone to gph N_C."""
    crit = critical_cone(C, z, zstar)
    out, seen = [], set()
    for F1, F2 in face_pairs(crit):
        D = canonical(face_difference(crit, F1, F2))
        if D in seen:
            continue
        seen.add(D)
        out.append((polar(D), D))
    return out


def product(a: HCone, b: HCone) -> HCone:
    pad_a = (ZERO,) * b.dim
    pad_b = (ZERO,) * a.dim
    eq = tuple(r + pad_a for r in a.eq) + tuple(pad_b + r for r in b.eq)
    ineq = tuple(r + pad_a for r in a.ineq) + tuple(pad_b + r for r in b.ineq)
    return HCone(a.dim + b.dim, eq, ineq)


def gph_normal_contains(K: HCone, x: Sequence, y: Sequence) -> bool:
    """``y ∈ N_K(x)``: x in K, y in the polar, complementary."""
    return K.contains(x) and in_polar(y, h_to_v(K)) and dot(x, y) == 0


def negate_cone(V: VCone) -> VCone:
    return VCone(V.dim, V.lineality, tuple(neg(r) for r in V.rays))
