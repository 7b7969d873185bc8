"""Exact rational vectors and matrices.

Vectors are tuples of ``Fraction``; matrices are tuples of row tuples.
Nothing in here ever touches a float.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import DimensionMismatch

Vector = tuple
Matrix = tuple

ZERO = Fraction(0)
ONE = Fraction(1)


def vec(values: Iterable) -> Vector:
    out = []
    for x in values:
        if isinstance(x, float):
            raise TypeError("float entries are not allowed in exact vectors")
        out.append(Fraction(x))
    return tuple(out)


def mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(vec(r) for r in rows)


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def unit(n: int, i: int) -> Vector:
    return tuple(ONE if k == i else ZERO for k in range(n))


def identity(n: int) -> Matrix:
    return tuple(unit(n, i) for i in range(n))


def dot(a: Sequence, b: Sequence) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"length mismatch {len(a)} vs {len(b)}")
    s = ZERO
    for x, y in zip(a, b):
        if x and y:
            s += x * y
    return s


def add(a: Sequence, b: Sequence) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> Vector:
    c = Fraction(c)
    return tuple(c * x for x in a)


def neg(a: Sequence) -> Vector:
    return tuple(-x for x in a)


def lincomb(coeffs: Sequence, vectors: Sequence[Sequence], dim: int) -> Vector:
    out = [ZERO] * dim
    for c, v in zip(coeffs, vectors):
        if c:
            for k, x in enumerate(v):
                if x:
                    out[k] += c * x
    return tuple(out)


def is_zero(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def transpose(m: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    if not m:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*m))


def matvec(m: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(dot(row, v) for row in m)


def vecmat(v: Sequence, m: Sequence[Sequence], ncols: int) -> Vector:
    """Row vector times matrix, i.e. ``mᵀ v``."""
    return lincomb(v, m, ncols)


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], ncols: int) -> Matrix:
    return tuple(vecmat(row, b, ncols) for row in a)


def quad(q: Sequence[Sequence], x: Sequence) -> Fraction:
    return dot(x, matvec(q, x))


def symmetrize(q: Sequence[Sequence]) -> Matrix:
    n = len(q)
    return tuple(tuple(Fraction(q[i][j] + q[j][i], 2) for j in range(n)) for i in range(n))


def integerize(a: Sequence) -> Vector:
    """Scale a nonzero vector to coprime integers, keeping its direction."""
    if is_zero(a):
        return tuple(ZERO for _ in a)
    den = 1
    for x in a:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in a]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(Fraction(x // g) for x in ints)


def sign_normalize(a: Sequence) -> Vector:
    """Coprime integer scaling with a positive leading nonzero entry."""
    v = integerize(a)
    for x in v:
        if x != 0:
            return v if x > 0 else neg(v)
    return v


def rref(m: Sequence[Sequence], ncols: int) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    rows = [[Fraction(x) for x in r] for r in m]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        if pv != 1:
            rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in rows[:r]), tuple(pivots)


def rank(m: Sequence[Sequence], ncols: int) -> int:
    return len(rref(m, ncols)[1])


def row_basis(m: Sequence[Sequence], ncols: int) -> Matrix:
    """Canonical basis of the row space: integerized RREF rows."""
    r, _ = rref(m, ncols)
    return tuple(sign_normalize(row) for row in r)


def kernel_basis(m: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis of ``{x : m x = 0}``, one vector per free column."""
    r, pivots = rref(m, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for row, pc in zip(r, pivots):
            x[pc] = -row[f]
        basis.append(tuple(x))
    return tuple(basis)


def solve_affine(m: Sequence[Sequence], b: Sequence, ncols: int):
    """Particular solution and kernel basis of ``m x = b``, or None."""
    aug = [tuple(row) + (bi,) for row, bi in zip(m, b)]
    r, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for row, pc in zip(r, pivots):
        x[pc] = row[ncols]
    return tuple(x), kernel_basis(m, ncols)


def in_span(v: Sequence, basis: Sequence[Sequence], dim: int) -> bool:
    if not basis:
        return is_zero(v)
    return rank(list(basis) + [v], dim) == rank(basis, dim)


def orth_project(v: Sequence, basis: Sequence[Sequence], dim: int) -> Vector:
    """Orthogonal projection of ``v`` onto the complement of span(basis)."""
    if not basis:
        return tuple(v)
    gram = [[dot(a, b) for b in basis] for a in basis]
    rhs = [dot(a, v) for a in basis]
    sol = solve_affine(gram, rhs, len(basis))
    coeffs = sol[0]
    return sub(v, lincomb(coeffs, basis, dim))


@dataclass(frozen=True)
class PSD:
    pass


@dataclass(frozen=True)
class NotPSD:
    witness: Vector


def _psd_witness(s: list[list[Fraction]]):
    """Coefficient vector ``x`` with ``xᵀ s x < 0`` or None if ``s`` is PSD.

    Symmetric pivoting LDLᵀ: a negative diagonal is an immediate witness,
    a zero diagonal with a nonzero off-diagonal gives a two-term witness,
    otherwise eliminate a positive pivot and lift the Schur witness.
    """
    k = len(s)
    if k == 0:
        return None
    for i in range(k):
        if s[i][i] < 0:
            return [ONE if t == i else ZERO for t in range(k)]
    for i in range(k):
        if s[i][i] == 0:
            for j in range(k):
                if j != i and s[i][j] != 0:
                    x = [ZERO] * k
                    x[i] = -(s[j][j] + 1) / (2 * s[i][j])
                    x[j] = ONE
                    return x
    p = next((i for i in range(k) if s[i][i] > 0), None)
    if p is None:
        return None  # zero matrix
    rest = [i for i in range(k) if i != p]
    schur = [[s[a][b] - s[a][p] * s[p][b] / s[p][p] for b in rest] for a in rest]
    sub_w = _psd_witness(schur)
    if sub_w is None:
        return None
    x = [ZERO] * k
    for idx, a in enumerate(rest):
        x[a] = sub_w[idx]
    x[p] = -sum((s[p][a] * x[a] for a in rest), ZERO) / s[p][p]
    return x


def restricted_form(q: Sequence[Sequence], a: Sequence[Sequence], n: int):
    """Kernel basis ``B`` of ``a`` and the form ``Bᵀ sym(q) B``."""
    if len(q) != n or any(len(r) != n for r in q):
        raise DimensionMismatch(f"form must be {n}x{n}")
    if any(len(r) != n for r in a):
        raise DimensionMismatch(f"constraint rows must have length {n}")
    basis = kernel_basis(a, n) if a else identity(n)
    qs = symmetrize(q)
    qb = [matvec(qs, b) for b in basis]
    s = [[dot(bi, qbj) for qbj in qb] for bi in basis]
    return basis, s


def psd_on_kernel(q: Sequence[Sequence], a: Sequence[Sequence], n: int):
    """Decide ``xᵀ q x >= 0`` for every ``x`` with ``a x = 0``."""
    basis, s = restricted_form(q, a, n)
    w = _psd_witness([list(r) for r in s])
    if w is None:
        return PSD()
    return NotPSD(lincomb(w, basis, n))


def null_direction_on_kernel(q: Sequence[Sequence], a: Sequence[Sequence], n: int):
    """For a form PSD on ker a: a nonzero kernel vector with zero value, or None."""
    basis, s = restricted_form(q, a, n)
    if not basis:
        return None
    ker = kernel_basis(s, len(basis))
    if not ker:
        return None
    return lincomb(ker[0], basis, n)
