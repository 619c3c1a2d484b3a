"""Lagrangian states (y, U, H, V), relabellings and the normalization onto y + H = id."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eulerian import AlphaFn, ValidationReport, alpha_sup_diff
from .piecewise import (
    SLOPE_FLOOR,
    TOL_V,
    NotMonotone,
    PwLinear,
    common_refinement,
    compose,
    invert,
    sup_norm_diff,
)


@dataclass(frozen=True, eq=False)
class LagrangianX:
    """One Lagrangian state.  The four components are stored on one grid."""

    y: PwLinear
    U: PwLinear
    H: PwLinear
    V: PwLinear
    alpha: AlphaFn

    def __post_init__(self):
        if self.y.idc != 1:
            raise ValueError("y must have identity coefficient 1")
        if self.U.idc or self.H.idc or self.V.idc:
            raise ValueError("U, H, V must be bounded")
        parts = (self.y, self.U, self.H, self.V)
        grid = parts[0].knots
        if not all(p.knots.size == grid.size and np.array_equal(p.knots, grid) for p in parts):
            grid = common_refinement(*(p.knots for p in parts))
            for name, p in zip("yUHV", parts):
                object.__setattr__(self, name, p.on_grid(grid))

    @classmethod
    def from_arrays(cls, grid, y, U, H, V, alpha: AlphaFn) -> "LagrangianX":
        """Build from full values at the grid points (``y`` includes the identity)."""
        grid = np.asarray(grid, dtype=float)
        return cls(
            PwLinear(grid, np.asarray(y, dtype=float) - grid, 1),
            PwLinear(grid, U),
            PwLinear(grid, H),
            PwLinear(grid, V),
            alpha,
        )

    @property
    def grid(self) -> np.ndarray:
        return self.y.knots

    def slopes(self):
        """Interior cell slopes ``(y_xi, U_xi, H_xi, V_xi)``."""
        return tuple(p.cell_slopes() for p in (self.y, self.U, self.H, self.V))

    @property
    def V_inf(self) -> float:
        return float(self.V.values[-1])

    def with_alpha(self, alpha: AlphaFn) -> "LagrangianX":
        return LagrangianX(self.y, self.U, self.H, self.V, alpha)

    def on_grid(self, grid) -> "LagrangianX":
        g = common_refinement(self.grid, grid)
        return LagrangianX(*(p.on_grid(g) for p in (self.y, self.U, self.H, self.V)), self.alpha)

    def __repr__(self):
        return f"LagrangianX(n={self.grid.size}, V_inf={self.V_inf:.6g}, alpha={self.alpha!r})"


@dataclass(frozen=True, eq=False)
class Relabelling:
    f: PwLinear

    def __post_init__(self):
        if self.f.idc != 1:
            raise NotMonotone("a relabelling has identity coefficient 1")
        if np.any(self.f.cell_slopes() <= 0):
            raise NotMonotone("a relabelling must be strictly increasing")

    @classmethod
    def identity(cls) -> "Relabelling":
        return cls(PwLinear.identity())

    @classmethod
    def from_points(cls, knots, fvals) -> "Relabelling":
        return cls(PwLinear.from_points(knots, fvals, 1))

    def __call__(self, x):
        return self.f(x)

    def then(self, other: "Relabelling") -> "Relabelling":
        """``self o other`` (apply ``other`` first)."""
        return Relabelling(compose(self.f, other.f))

    def inverse(self) -> "Relabelling":
        return Relabelling(invert(self.f))


def _f(r) -> PwLinear:
    return r.f if isinstance(r, Relabelling) else r


def validate_lagrangian(X: LagrangianX, tol: float = TOL_V, check_alpha: bool = True) -> ValidationReport:
    rep = X.alpha.problems() if check_alpha else ValidationReport()
    g = X.grid
    yx, Ux, Hx, Vx = X.slopes()

    def where(i):
        return f"cell ({g[i]:g}, {g[i + 1]:g})"

    def scale(*a):
        return tol * np.maximum(1.0, np.max(np.abs(np.vstack(a)), axis=0)) if a[0].size else 0.0

    for i in np.flatnonzero(yx < -tol):
        rep.add("y_xi >= 0", where(i), -yx[i])
    for i in np.flatnonzero(Hx < -tol):
        rep.add("H_xi >= 0", where(i), -Hx[i])
    c = float(np.min(yx + Hx)) if yx.size else 1.0
    c = min(c, 1.0)  # tails have y_xi + H_xi = 1
    if c <= SLOPE_FLOOR:
        rep.add("y_xi + H_xi >= c > 0", "min over cells", c)
    s = scale(yx * Vx, Ux**2)
    for i in np.flatnonzero(np.abs(yx * Vx - Ux**2) > s):
        rep.add("y_xi V_xi = U_xi^2", where(i), abs(yx[i] * Vx[i] - Ux[i] ** 2))
    for i in np.flatnonzero(Vx < -tol):
        rep.add("0 <= V_xi <= H_xi", where(i), -Vx[i])
    for i in np.flatnonzero(Vx > Hx + scale(Vx, Hx)):
        rep.add("0 <= V_xi <= H_xi", where(i), Vx[i] - Hx[i])
    for name, p in (("H", X.H), ("V", X.V)):
        if abs(p.values[0]) > tol:
            rep.add(f"{name} vanishes at -inf", "left tail", abs(p.values[0]))

    if X.alpha.is_one:
        flat = yx <= SLOPE_FLOOR
        for i in np.flatnonzero(flat & (np.abs(Vx) > tol)):
            rep.add("y_xi = 0 => V_xi = 0", where(i), abs(Vx[i]))
        for i in np.flatnonzero(~flat & (np.abs(Vx - Hx) > scale(Vx, Hx))):
            rep.add("y_xi > 0 => V_xi = H_xi", where(i), abs(Vx[i] - Hx[i]))
    else:
        pos = Hx > tol
        with np.errstate(divide="ignore", invalid="ignore"):
            kappa = np.where(pos, Vx / np.where(pos, Hx, 1.0), 1.0)
        for i in np.flatnonzero(pos & (kappa > 1 + tol)):
            rep.add("kappa in (0,1]", where(i), kappa[i] - 1)
        for i in np.flatnonzero(pos & (kappa <= tol)):
            rep.warn("kappa in (0,1]", where(i), kappa[i])
        for i in np.flatnonzero(pos & (Ux < -tol) & (np.abs(kappa - 1) > tol)):
            rep.add("kappa = 1 where U_xi < 0", where(i), abs(kappa[i] - 1))
    return rep


def in_F0(X: LagrangianX, tol: float = TOL_V) -> bool:
    """Whether ``y + H = id`` holds within ``tol``."""
    return bool(np.max(np.abs(X.y.values + X.H.values)) <= tol)


def relabel(X: LagrangianX, f, check: bool = False) -> LagrangianX:
    """``X o f`` component-wise; ``alpha`` is untouched."""
    r = _f(f)
    if r.idc != 1 or np.any(r.cell_slopes() <= 0):
        raise NotMonotone("relabelling must be strictly increasing with identity coefficient 1")
    out = LagrangianX(compose(X.y, r), compose(X.U, r), compose(X.H, r), compose(X.V, r), X.alpha)
    if check:
        rep = validate_lagrangian(out, check_alpha=False)
        assert rep.ok, rep.lines()
    return out


def pi_normalize(X: LagrangianX) -> tuple[LagrangianX, Relabelling]:
    """Return ``(X o (y+H)^-1, (y+H)^-1)``; the result satisfies ``y + H = id``."""
    r = invert(X.y + X.H)
    Z = relabel(X, r)
    # y o r + H o r equals the identity exactly in exact arithmetic; remove rounding
    H = PwLinear(Z.grid, -Z.y.values)
    return LagrangianX(Z.y, Z.U, H, Z.V, X.alpha), Relabelling(r)


def lag_comparison_norm(XA: LagrangianX, XB: LagrangianX) -> float:
    return (
        sup_norm_diff(XA.y, XB.y)
        + sup_norm_diff(XA.U, XB.U)
        + sup_norm_diff(XA.H, XB.H)
        + 0.25 * sup_norm_diff(XA.V, XB.V)
        + alpha_sup_diff(XA.alpha, XB.alpha)
    )
