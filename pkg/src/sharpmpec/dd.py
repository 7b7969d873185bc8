"""Double description: generators of ``{x : E x = 0, A x <= 0}``."""
from __future__ import annotations

from typing import Sequence

from .linalg import (
    dot,
    identity,
    integerize,
    is_zero,
    kernel_basis,
    orth_project,
    row_basis,
    sub,
    scale,
)


def _combine(a, p, n):
    # (a·p) n - (a·n) p lies on the hyperplane a·x = 0
    ap, an = dot(a, p), dot(a, n)
    return integerize(sub(scale(ap, n), scale(an, p)))


def double_description(dim: int, eq_rows: Sequence, ineq_rows: Sequence):
    """Return ``(lineality_basis, rays)`` in canonical form.

    Rows are added one at a time. While the running cone still has a
    lineality direction that the new row does not annihilate, that direction
    is used to cut the lineality space down; afterwards the classic pairwise
    update with the combinatorial adjacency test takes over.
    """
    eq_rows = [r for r in eq_rows if not is_zero(r)]
    lin = list(kernel_basis(eq_rows, dim)) if eq_rows else list(identity(dim))
    rays: list[tuple] = []
    zsets: list[frozenset] = []
    done: list[int] = []

    for k, a in enumerate(ineq_rows):
        if is_zero(a):
            continue
        vals = [dot(a, l) for l in lin]
        pick = next((i for i, x in enumerate(vals) if x != 0), None)
        if pick is not None:
            l0, a0 = lin[pick], vals[pick]
            if a0 > 0:
                l0, a0 = tuple(-x for x in l0), -a0
            new_lin = []
            for i, l in enumerate(lin):
                if i == pick:
                    continue
                new_lin.append(sub(l, scale(vals[i] / a0, l0)))
            new_rays, new_z = [], []
            for r, z in zip(rays, zsets):
                ar = dot(a, r)
                new_rays.append(integerize(sub(r, scale(ar / a0, l0))))
                new_z.append(z | {k})
            new_rays.append(integerize(l0))
            new_z.append(frozenset(done))
            lin, rays, zsets = new_lin, new_rays, new_z
            done.append(k)
            continue

        vals = [dot(a, r) for r in rays]
        pos = [i for i, x in enumerate(vals) if x > 0]
        neg = [i for i, x in enumerate(vals) if x < 0]
        new_rays, new_z = [], []
        for i, x in enumerate(vals):
            if x < 0:
                new_rays.append(rays[i])
                new_z.append(zsets[i])
            elif x == 0:
                new_rays.append(rays[i])
                new_z.append(zsets[i] | {k})
        for p in pos:
            for n in neg:
                common = zsets[p] & zsets[n]
                if any(
                    common <= zsets[r] for r in range(len(rays)) if r != p and r != n
                ):
                    continue
                new_rays.append(_combine(a, rays[p], rays[n]))
                new_z.append(common | {k})
        rays, zsets = new_rays, new_z
        done.append(k)

    lin_basis = row_basis(lin, dim) if lin else ()
    canon = set()
    for r in rays:
        pr = integerize(orth_project(r, lin_basis, dim))
        if not is_zero(pr):
            canon.add(pr)
    return lin_basis, tuple(sorted(canon))
