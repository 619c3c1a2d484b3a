"""Eulerian states (u, mu, nu) with a dissipation coefficient alpha."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .piecewise import (
    TOL_V,
    TOL_X,
    Measure,
    PiecewiseError,
    PwConstant,
    PwLinear,
    common_refinement,
)

EPS_ALPHA = 1e-9


class DominanceViolation(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    name: str
    location: str
    magnitude: float

    def __str__(self):
        return f"{self.name} at {self.location} (magnitude {self.magnitude:.3g})"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    warnings: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, name, location, magnitude):
        self.violations.append(Violation(name, str(location), float(magnitude)))

    def warn(self, name, location, magnitude):
        self.warnings.append(Violation(name, str(location), float(magnitude)))

    def extend(self, other: "ValidationReport"):
        self.violations += other.violations
        self.warnings += other.warnings

    def names(self) -> set[str]:
        return {v.name for v in self.violations}

    def lines(self) -> list[str]:
        if self.ok and not self.warnings:
            return ["valid"]
        out = [f"violation: {v}" for v in self.violations]
        out += [f"warning: {w}" for w in self.warnings]
        return out


@dataclass(frozen=True, eq=False)
class AlphaFn:
    """Fraction of concentrated energy removed at a breaking point.

    ``kind`` is ``"one"``, ``"constant"`` or ``"pw"``.  Constructors do not
    reject functions outside the admissible class; :meth:`problems` reports
    them so that callers can decide (the CLI refuses, some tests do not).
    """

    kind: str
    value: float = 1.0
    f: PwLinear | None = None
    lipschitz: float = 0.0

    @classmethod
    def one(cls) -> "AlphaFn":
        return cls("one", 1.0)

    @classmethod
    def constant(cls, a: float) -> "AlphaFn":
        return cls("constant", float(a))

    @classmethod
    def pw(cls, knots, values, lipschitz: float | None = None) -> "AlphaFn":
        f = PwLinear(knots, values, 0)
        slope = float(np.max(np.abs(f.cell_slopes()))) if f.knots.size > 1 else 0.0
        return cls("pw", float("nan"), f, slope if lipschitz is None else float(lipschitz))

    @property
    def is_one(self) -> bool:
        return self.kind == "one" or (self.kind == "constant" and self.value == 1.0)

    @property
    def is_constant(self) -> bool:
        return self.kind in ("one", "constant")

    @property
    def const_value(self) -> float:
        if not self.is_constant:
            raise ValueError("not a constant alpha")
        return 1.0 if self.kind == "one" else self.value

    def __call__(self, x):
        if self.kind == "pw":
            return self.f(x)
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.const_value)
        return float(out) if out.ndim == 0 else out

    def as_pw(self) -> PwLinear:
        return self.f if self.kind == "pw" else PwLinear.constant(self.const_value)

    @property
    def knots(self) -> np.ndarray:
        return self.f.knots if self.kind == "pw" else np.zeros(0)

    def slope_sup(self) -> float:
        if self.kind != "pw" or self.f.knots.size < 2:
            return 0.0
        return float(np.max(np.abs(self.f.cell_slopes())))

    def problems(self) -> ValidationReport:
        rep = ValidationReport()
        if self.kind == "constant":
            if not (0.0 <= self.value <= 1.0):
                rep.add("alpha in [0,1]", "constant", self.value)
        elif self.kind == "pw":
            v = self.f.values
            lo, hi = float(v.min()), float(v.max())
            if lo < 0:
                rep.add("alpha values in [0,1)", f"x={self.f.knots[v.argmin()]:g}", -lo)
            if hi > 1.0 - EPS_ALPHA:
                rep.add("alpha values in [0,1)", f"x={self.f.knots[v.argmax()]:g}", hi)
            if self.lipschitz + TOL_V < self.slope_sup():
                rep.add("alpha lipschitz bound", "reported", self.slope_sup() - self.lipschitz)
        elif self.kind != "one":
            rep.add("alpha kind", self.kind, 1.0)
        return rep

    def __repr__(self):
        if self.kind == "pw":
            return f"AlphaFn(pw, n={self.f.knots.size}, lip={self.lipschitz:g})"
        return f"AlphaFn({self.kind}, {self.const_value:g})"


def alpha_sup_diff(a: AlphaFn, b: AlphaFn) -> float:
    """``sup |alpha_A - alpha_B|`` over the union grid and both tails."""
    if a.is_constant and b.is_constant:
        return abs(a.const_value - b.const_value)
    grid = common_refinement(a.knots, b.knots)
    return float(np.max(np.abs(a(grid) - b(grid))))


def alpha_slope_sup(a: AlphaFn, b: AlphaFn) -> float:
    """Sup over cells of the larger of the two slope magnitudes."""
    return max(a.slope_sup(), b.slope_sup())


@dataclass(frozen=True, eq=False)
class EulerianY:
    u: PwLinear
    mu: Measure
    nu: Measure
    alpha: AlphaFn

    def __post_init__(self):
        if self.u.idc != 0:
            raise PiecewiseError("u must be bounded (identity coefficient 0)")

    def breakpoints(self) -> np.ndarray:
        return common_refinement(self.u.knots, self.mu.breakpoints(), self.nu.breakpoints())

    @property
    def z(self) -> "EulerianZ":
        return EulerianZ(self.u, self.mu, self.alpha)


@dataclass(frozen=True, eq=False)
class EulerianZ:
    u: PwLinear
    mu: Measure
    alpha: AlphaFn

    def with_nu(self, nu: Measure | None = None) -> EulerianY:
        return EulerianY(self.u, self.mu, self.mu if nu is None else nu, self.alpha)


def energy_density(u: PwLinear) -> PwConstant:
    """The step function ``u_x**2`` with zero tails."""
    d = u.derivative()
    return PwConstant.from_interior(d.knots, d.interior**2) if d.knots.size > 1 else PwConstant.zero()


def _cells(Y: EulerianY):
    grid = Y.breakpoints()
    if grid.size < 2:
        return grid, np.zeros(0), np.zeros(0), np.zeros(0)
    mid = 0.5 * (grid[:-1] + grid[1:])
    ux = Y.u.derivative()(mid)
    return grid, ux, Y.mu.density(mid), Y.nu.density(mid)


def _rel(a, b):
    return np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))


def validate_eulerian(Y: EulerianY, tol: float = TOL_V) -> ValidationReport:
    rep = Y.alpha.problems()
    grid, ux, rmu, rnu = _cells(Y)

    def where(i):
        return f"cell ({grid[i]:g}, {grid[i + 1]:g})"

    for i in np.flatnonzero(rmu > rnu + tol * _rel(rmu, rnu)):
        rep.add("mu <= nu", where(i), rmu[i] - rnu[i])
        rep.add("mu_ac <= nu_ac", where(i), rmu[i] - rnu[i])
    for x, m in Y.mu.atoms:
        mn = Y.nu.atom_at(x)
        if m > mn + tol * max(1.0, m):
            rep.add("mu <= nu", f"atom x={x:g}", m - mn)
    for i in np.flatnonzero(np.abs(rmu - ux**2) > tol * _rel(rmu, ux**2)):
        rep.add("mu_ac = u_x^2", where(i), abs(rmu[i] - ux[i] ** 2))
    for name, m in (("mu", Y.mu), ("nu", Y.nu)):
        if not m.density.compact:
            rep.add("finite mass", name, abs(m.density.values[[0, -1]]).max())

    if Y.alpha.is_one:
        for x, m in Y.mu.atoms:
            rep.add("nu_ac = mu = u_x^2 dx", f"mu atom x={x:g}", m)
        for i in np.flatnonzero(np.abs(rnu - rmu) > tol * _rel(rnu, rmu)):
            rep.add("nu_ac = mu = u_x^2 dx", where(i), abs(rnu[i] - rmu[i]))
    else:
        for i in np.flatnonzero((rnu > tol) & (rmu <= tol * _rel(rnu, 0))):
            rep.add("dmu/dnu > 0", where(i), rnu[i])
        for x, m in Y.nu.atoms:
            if Y.mu.atom_at(x) <= 0:
                rep.add("dmu/dnu > 0", f"nu atom x={x:g}", m)
        neg = ux < 0
        for i in np.flatnonzero(neg & (np.abs(rmu - rnu) > tol * _rel(rmu, rnu))):
            rep.add("dmu_ac/dnu_ac = 1 where u_x < 0", where(i), abs(rmu[i] - rnu[i]))
    return rep


def radon_nikodym(mu: Measure, nu: Measure, grid=None, tol: float = TOL_V):
    """Cell-wise density ratio and atom ratios of ``mu`` against ``nu``.

    Returns ``(ratio, atoms)`` where ``ratio`` is a PwConstant on the common
    refinement (extended by ``grid``) and ``atoms`` a list of ``(x, ratio)``
    for every atom of ``nu``.
    """
    g = common_refinement(mu.density.knots, nu.density.knots, [] if grid is None else grid)
    mid = 0.5 * (g[:-1] + g[1:])
    a, b = mu.density(mid), nu.density(mid)
    if np.any(a > b + tol * _rel(a, b)):
        raise DominanceViolation("mu density exceeds nu density")
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(b > 0, a / b, 0.0)
    ratio = PwConstant.from_interior(g, r) if g.size > 1 else PwConstant.zero()
    out = []
    for x, m in nu.atoms:
        mm = mu.atom_at(x)
        if mm > m + tol * max(1.0, m):
            raise DominanceViolation(f"mu atom at {x:g} exceeds nu atom")
        out.append((x, mm / m))
    for x, m in mu.atoms:
        if nu.atom_at(x) == 0.0:
            raise DominanceViolation(f"mu atom at {x:g} without nu atom")
    return ratio, out


__all__ = [
    "EPS_ALPHA",
    "TOL_X",
    "AlphaFn",
    "DominanceViolation",
    "EulerianY",
    "EulerianZ",
    "ValidationReport",
    "Violation",
    "alpha_slope_sup",
    "alpha_sup_diff",
    "energy_density",
    "radon_nikodym",
    "validate_eulerian",
]
