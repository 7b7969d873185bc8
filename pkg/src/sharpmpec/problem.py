"""Point-evaluated MPEC derivative data."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import ShapeError
from .linalg import ZERO, lincomb, mat, matvec, vec


@dataclass(frozen=True)
class ProblemData:
    """Data at a candidate point ``(x̄, ȳ)``.

    ``jac_phi`` and ``jac_G`` have ``n + m`` columns, x-block first.
    Indices everywhere are 0-based; files and reports use 1-based labels.
    """

    n: int
    m: int
    p: int
    q: int
    grad_F: tuple
    phi: tuple
    jac_phi: tuple
    g: tuple
    jac_g: tuple
    hess_g: tuple
    G_val: tuple = ()
    jac_G: tuple = ()
    assumption1: bool = False
    lower_mscq: bool = False
    upper_mscq: bool = False
    directions: tuple = ()
    sigma_choice: tuple | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        conv = {
            "grad_F": vec(self.grad_F),
            "phi": vec(self.phi),
            "jac_phi": mat(self.jac_phi),
            "g": vec(self.g),
            "jac_g": mat(self.jac_g),
            "hess_g": tuple(mat(h) for h in self.hess_g),
            "G_val": vec(self.G_val),
            "jac_G": mat(self.jac_G),
            "directions": tuple(vec(d) for d in self.directions),
        }
        if self.sigma_choice is not None:
            conv["sigma_choice"] = tuple(vec(s) for s in self.sigma_choice)
        for k, v in conv.items():
            object.__setattr__(self, k, v)
        self._check_shapes()

    def _check_shapes(self):
        n, m, p, q = self.n, self.m, self.p, self.q

        def need(cond, where):
            if not cond:
                raise ShapeError(f"bad shape at {where}")

        need(len(self.grad_F) == n + m, "grad_F")
        need(len(self.phi) == m, "phi")
        need(len(self.jac_phi) == m and all(len(r) == n + m for r in self.jac_phi), "jac_phi")
        need(len(self.g) == q, "g")
        need(len(self.jac_g) == q and all(len(r) == m for r in self.jac_g), "jac_g")
        need(len(self.hess_g) == q, "hess_g")
        for i, h in enumerate(self.hess_g):
            need(len(h) == m and all(len(r) == m for r in h), f"hess_g[{i}]")
            need(all(h[a][b] == h[b][a] for a in range(m) for b in range(m)), f"hess_g[{i}] symmetry")
        need(len(self.G_val) == p, "G_val")
        need(len(self.jac_G) == p and all(len(r) == n + m for r in self.jac_G), "jac_G")
        for i, d in enumerate(self.directions):
            need(len(d) == m, f"directions[{i}]")
        if self.sigma_choice is not None:
            for i, s in enumerate(self.sigma_choice):
                need(len(s) == q, f"sigma_choice[{i}]")

    # derived blocks -----------------------------------------------------
    @property
    def ystar(self) -> tuple:
        return tuple(-x for x in self.phi)

    @property
    def grad_F_x(self):
        return self.grad_F[: self.n]

    @property
    def grad_F_y(self):
        return self.grad_F[self.n :]

    @property
    def jac_phi_x(self):
        return tuple(r[: self.n] for r in self.jac_phi)

    @property
    def jac_phi_y(self):
        return tuple(r[self.n :] for r in self.jac_phi)

    @property
    def jac_G_x(self):
        return tuple(r[: self.n] for r in self.jac_G)

    @property
    def jac_G_y(self):
        return tuple(r[self.n :] for r in self.jac_G)

    def hess_comb(self, lam: Sequence) -> tuple:
        """``∇²(λᵀg)(ȳ)`` as an m×m matrix."""
        m = self.m
        return tuple(
            tuple(sum((lam[i] * self.hess_g[i][a][b] for i in range(self.q)), ZERO) for b in range(m))
            for a in range(m)
        )

    def hess_dirs(self, v: Sequence) -> tuple:
        """The vectors ``∇²g_i(ȳ) v``, one per lower-level constraint."""
        return tuple(matvec(h, v) for h in self.hess_g)

    def curvature(self, v: Sequence, w: Sequence | None = None) -> tuple:
        """``(vᵀ∇²g_i(ȳ) w)_i``; ``w`` defaults to ``v``."""
        w = v if w is None else w
        return tuple(sum((a * b for a, b in zip(v, hw)), ZERO) for hw in self.hess_dirs(w))

    def grad_g_combo(self, coeffs: Sequence) -> tuple:
        """``∇g(ȳ)ᵀ c``."""
        return lincomb(coeffs, self.jac_g, self.m)
