"""Exact simplex (Bland's rule) over rational H-polyhedra, and vertex enumeration."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .dd import double_description
from .errors import DimensionMismatch, NotPointed
from .linalg import ONE, ZERO, dot, integerize, is_zero, kernel_basis, vec


@dataclass(frozen=True)
class HPolyhedron:
    """``{x : a·x = b for (a, b) in eq, a·x <= b for (a, b) in ineq}``.

    Row order is kept as given so that tight sets refer to caller indices;
    ``canonical()`` produces the normalized, sorted, deduplicated form.
    """

    dim: int
    eq: tuple = ()
    ineq: tuple = ()

    def __post_init__(self):
        eq = tuple((vec(a), Fraction(b)) for a, b in self.eq)
        ineq = tuple((vec(a), Fraction(b)) for a, b in self.ineq)
        for a, _ in eq + ineq:
            if len(a) != self.dim:
                raise DimensionMismatch(f"row of length {len(a)} in dimension {self.dim}")
        object.__setattr__(self, "eq", eq)
        object.__setattr__(self, "ineq", ineq)

    def canonical(self) -> "HPolyhedron":
        def norm(a, b, flip):
            row = integerize(tuple(a) + (b,))
            if flip:
                lead = next((x for x in row if x != 0), ZERO)
                if lead < 0:
                    row = tuple(-x for x in row)
            return row[:-1], row[-1]

        eq = sorted({norm(a, b, True) for a, b in self.eq if not (is_zero(a) and b == 0)})
        ineq = sorted({norm(a, b, False) for a, b in self.ineq if not (is_zero(a) and b >= 0)})
        return HPolyhedron(self.dim, tuple(eq), tuple(ineq))

    def contains(self, x: Sequence) -> bool:
        return all(dot(a, x) == b for a, b in self.eq) and all(
            dot(a, x) <= b for a, b in self.ineq
        )

    def tight(self, x: Sequence) -> frozenset:
        return frozenset(i for i, (a, b) in enumerate(self.ineq) if dot(a, x) == b)

    def with_eq(self, rows) -> "HPolyhedron":
        return HPolyhedron(self.dim, self.eq + tuple(rows), self.ineq)


@dataclass(frozen=True)
class Optimal:
    value: Fraction
    point: tuple
    tight: frozenset
    dual_eq: tuple = field(default=(), compare=False)
    dual_ineq: tuple = field(default=(), compare=False)


@dataclass(frozen=True)
class Unbounded:
    ray: tuple


@dataclass(frozen=True)
class Infeasible:
    """Multipliers ``(y_eq, y_ineq)`` with ``y_ineq >= 0`` that combine the
    rows into ``0·x <= -1``."""

    farkas_eq: tuple
    farkas_ineq: tuple

    @property
    def farkas(self) -> tuple:
        return self.farkas_eq + self.farkas_ineq


class _Tableau:
    def __init__(self, rows, rhs, ncols, art_start):
        self.t = [list(r) + [b] for r, b in zip(rows, rhs)]
        self.ncols = ncols
        self.art_start = art_start
        self.basis = [art_start + i for i in range(len(rows))]

    def reduced(self, cost):
        d = list(cost)
        for i, bi in enumerate(self.basis):
            cb = cost[bi]
            if cb:
                row = self.t[i]
                for j in range(self.ncols):
                    if row[j]:
                        d[j] -= cb * row[j]
        return d

    def pivot(self, r, c):
        t = self.t
        pv = t[r][c]
        if pv != 1:
            t[r] = [x / pv for x in t[r]]
        prow = t[r]
        for i in range(len(t)):
            if i != r and t[i][c] != 0:
                f = t[i][c]
                t[i] = [x - f * y for x, y in zip(t[i], prow)]
        self.basis[r] = c

    def run(self, cost, allowed):
        """Maximize; returns None when optimal, else the unbounded column."""
        while True:
            d = self.reduced(cost)
            enter = next((j for j in range(self.ncols) if allowed[j] and d[j] > 0), None)
            if enter is None:
                return None
            best = None
            for i, row in enumerate(self.t):
                if row[enter] > 0:
                    ratio = row[-1] / row[enter]
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return enter
            self.pivot(best[1], enter)

    def duals(self, cost, nrows):
        y = [ZERO] * nrows
        for i, bi in enumerate(self.basis):
            cb = cost[bi]
            if cb:
                row = self.t[i]
                for r in range(nrows):
                    y[r] += cb * row[self.art_start + r]
        return y


def lp_solve(objective: Sequence, P: HPolyhedron, sense: str = "max"):
    """Exact LP over free variables. Returns Optimal, Unbounded or Infeasible."""
    d = P.dim
    c = vec(objective)
    if len(c) != d:
        raise DimensionMismatch("objective length differs from polyhedron dimension")
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    if sense == "min":
        c = tuple(-x for x in c)

    rows_src = [(a, b, False) for a, b in P.eq] + [(a, b, True) for a, b in P.ineq]
    nrows = len(rows_src)
    nslack = len(P.ineq)
    slack_start = 2 * d
    art_start = slack_start + nslack
    ncols = art_start + nrows
    rows, rhs, signs = [], [], []
    slack_k = 0
    for a, b, is_ub in rows_src:
        row = [ZERO] * ncols
        for k in range(d):
            row[k] = a[k]
            row[d + k] = -a[k]
        if is_ub:
            row[slack_start + slack_k] = ONE
            slack_k += 1
        s = -1 if b < 0 else 1
        if s < 0:
            row = [-x for x in row]
        row[art_start + len(rows)] = ONE
        rows.append(row)
        rhs.append(b * s)
        signs.append(s)

    tab = _Tableau(rows, rhs, ncols, art_start)
    cost1 = [ZERO] * art_start + [-ONE] * nrows
    tab.run(cost1, [True] * ncols)
    phase1 = sum((-tab.t[i][-1] for i, bi in enumerate(tab.basis) if bi >= art_start), ZERO)
    n_eq = len(P.eq)
    if phase1 < 0:
        y = tab.duals(cost1, nrows)
        u = [s * yi for s, yi in zip(signs, y)]
        total = sum((ui * b for ui, (_, b, _) in zip(u, rows_src)), ZERO)
        u = [ui / -total for ui in u]
        return Infeasible(tuple(u[:n_eq]), tuple(u[n_eq:]))

    # drive zero-level artificials out where possible
    for i in range(nrows):
        if tab.basis[i] >= art_start:
            j = next((j for j in range(art_start) if tab.t[i][j] != 0), None)
            if j is not None:
                tab.pivot(i, j)

    cost2 = [ZERO] * ncols
    for k in range(d):
        cost2[k] = c[k]
        cost2[d + k] = -c[k]
    allowed = [j < art_start for j in range(ncols)]
    enter = tab.run(cost2, allowed)

    def primal():
        z = [ZERO] * ncols
        for i, bi in enumerate(tab.basis):
            z[bi] = tab.t[i][-1]
        return tuple(z[k] - z[d + k] for k in range(d))

    if enter is not None:
        z = [ZERO] * ncols
        z[enter] = ONE
        for i, bi in enumerate(tab.basis):
            z[bi] -= tab.t[i][enter]
        ray = tuple(z[k] - z[d + k] for k in range(d))
        return Unbounded(ray)

    x = primal()
    y = tab.duals(cost2, nrows)
    u = [s * yi for s, yi in zip(signs, y)]
    value = dot(c, x)
    if sense == "min":
        value = -value
    return Optimal(value, x, P.tight(x), tuple(u[:n_eq]), tuple(u[n_eq:]))


def feasible_point(P: HPolyhedron):
    out = lp_solve(zeros_like(P.dim), P)
    return out.point if isinstance(out, Optimal) else None


def zeros_like(n: int) -> tuple:
    return (ZERO,) * n


def vertices(P: HPolyhedron) -> tuple:
    """Extreme points of a pointed polyhedron, lexicographically sorted."""
    d = P.dim
    all_rows = [a for a, _ in P.eq] + [a for a, _ in P.ineq]
    if d and (not all_rows or kernel_basis(all_rows, d)):
        if feasible_point(P) is None:
            return ()
        raise NotPointed("polyhedron contains a line")
    # homogenize: (x, t) with A x - b t <= 0, E x - e t = 0, t >= 0
    eq = [tuple(a) + (-b,) for a, b in P.eq]
    ineq = [tuple(a) + (-b,) for a, b in P.ineq]
    ineq.append((ZERO,) * d + (-ONE,))
    lin, rays = double_description(d + 1, eq, ineq)
    pts = set()
    for r in rays:
        t = r[-1]
        if t > 0:
            pts.add(tuple(x / t for x in r[:-1]))
    return tuple(sorted(pts))
