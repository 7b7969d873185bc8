"""Affine expressions over named variable blocks, solved with the exact LP."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .linalg import ZERO
from .lp import HPolyhedron, Infeasible, Unbounded, lp_solve


class Expr:
    __slots__ = ("coef", "const")

    def __init__(self, coef=None, const=ZERO):
        self.coef = coef or {}
        self.const = Fraction(const)

    @staticmethod
    def lift(x) -> "Expr":
        return x if isinstance(x, Expr) else Expr(None, x)

    def __add__(self, other):
        other = Expr.lift(other)
        coef = dict(self.coef)
        for k, c in other.coef.items():
            s = coef.get(k, ZERO) + c
            if s:
                coef[k] = s
            else:
                coef.pop(k, None)
        return Expr(coef, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return Expr({k: -c for k, c in self.coef.items()}, -self.const)

    def __sub__(self, other):
        return self + (-Expr.lift(other))

    def __rsub__(self, other):
        return Expr.lift(other) - self

    def __mul__(self, c):
        c = Fraction(c)
        if not c:
            return Expr()
        return Expr({k: c * v for k, v in self.coef.items()}, c * self.const)

    __rmul__ = __mul__


def esum(items: Iterable) -> Expr:
    out = Expr()
    for x in items:
        out = out + x
    return out


def edot(coeffs: Sequence, exprs: Sequence) -> Expr:
    out = Expr()
    for c, e in zip(coeffs, exprs):
        if c:
            out = out + Expr.lift(e) * c
    return out


def ematvec(m: Sequence[Sequence], exprs: Sequence) -> list:
    return [edot(row, exprs) for row in m]


def evadd(*vs) -> list:
    return [esum(parts) for parts in zip(*vs)]


def evscale(c, v) -> list:
    return [Expr.lift(x) * c for x in v]


class Block(list):
    """A list of single-variable expressions with a name and offset."""

    def __init__(self, name, start, size):
        super().__init__(Expr({start + i: Fraction(1)}) for i in range(size))
        self.name = name
        self.start = start
        self.size = size


class Solution:
    def __init__(self, x, value=None):
        self.x = x
        self.value = value

    def __getitem__(self, block: Block) -> tuple:
        return tuple(self.x[block.start : block.start + block.size])

    def eval(self, e) -> Fraction:
        e = Expr.lift(e)
        return e.const + sum((c * self.x[k] for k, c in e.coef.items()), ZERO)


class LinearSystem:
    def __init__(self):
        self.n = 0
        self.blocks: list[Block] = []
        self.eqs: list[Expr] = []
        self.les: list[Expr] = []
        self.labels_eq: list[str] = []
        self.labels_le: list[str] = []

    def block(self, name: str, size: int) -> Block:
        b = Block(name, self.n, size)
        self.n += size
        self.blocks.append(b)
        return b

    def eq(self, e, label: str = ""):
        self.eqs.append(Expr.lift(e))
        self.labels_eq.append(label)

    def le(self, e, label: str = ""):
        self.les.append(Expr.lift(e))
        self.labels_le.append(label)

    def ge(self, e, label: str = ""):
        self.le(-Expr.lift(e), label)

    def eq_vec(self, v, label=""):
        for e in v:
            self.eq(e, label)

    def le_vec(self, v, label=""):
        for e in v:
            self.le(e, label)

    def _row(self, e: Expr):
        row = [ZERO] * self.n
        for k, c in e.coef.items():
            row[k] = c
        return row, -e.const

    def polyhedron(self) -> HPolyhedron:
        return HPolyhedron(
            self.n,
            tuple(self._row(e) for e in self.eqs),
            tuple(self._row(e) for e in self.les),
        )

    def solve(self, objective=None, sense="max"):
        """Returns a Solution, None if infeasible; unbounded objectives give
        a feasible Solution with ``value=None``."""
        P = self.polyhedron()
        obj = [ZERO] * self.n
        if objective is not None:
            for k, c in Expr.lift(objective).coef.items():
                obj[k] = c
        out = lp_solve(obj, P, sense)
        if isinstance(out, Infeasible):
            self.last_farkas = out
            return None
        if isinstance(out, Unbounded):
            fallback = lp_solve([ZERO] * self.n, P)
            return Solution(fallback.point, None)
        const = Expr.lift(objective).const if objective is not None else ZERO
        return Solution(out.point, out.value + const)

    def feasible(self):
        return self.solve()

    def strict_solve(self, strict: Sequence):
        """Feasible point making every expression in ``strict`` positive.

        Maximizes a bound ``t <= 1`` with ``e >= t``; strict feasibility holds
        exactly when the optimum is positive.
        """
        if not strict:
            return self.solve()
        t = self.block("_t", 1)[0]
        for e in strict:
            self.ge(Expr.lift(e) - t)
        self.le(t - 1)
        sol = self.solve(t)
        if sol is None or sol.value is None or sol.value <= 0:
            return None
        return sol
