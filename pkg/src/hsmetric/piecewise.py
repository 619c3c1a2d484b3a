"""Piecewise-linear functions, piecewise-constant functions and finite measures.

Everything on the real line in this package is carried by three small types:

* ``PwLinear``: ``f(x) = idc * x + b(x)`` where ``b`` is continuous, affine on
  every cell and constant on both unbounded tails.
* ``PwConstant``: one value per cell, both tails included.
* ``SignedMeasure`` / ``Measure``: a compactly supported piecewise-constant
  density plus a finite list of atoms.

All objects are immutable.  Operations return new objects and never touch
their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TOL_X = 1e-12
TOL_V = 1e-10
SLOPE_FLOOR = 1e-12


class PiecewiseError(ValueError):
    pass


class NotMonotone(PiecewiseError):
    pass


class NotInvertible(PiecewiseError):
    pass


class Unbounded(PiecewiseError):
    pass


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


def as_grid(points: Iterable[float], tol: float = TOL_X) -> np.ndarray:
    """Sort ``points`` and merge neighbours closer than ``tol``."""
    pts = np.sort(np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=float).reshape(-1))
    if pts.size == 0:
        return pts
    if not np.all(np.isfinite(pts)):
        raise PiecewiseError("grid points must be finite")
    keep = np.ones(pts.size, dtype=bool)
    keep[1:] = np.diff(pts) > tol
    # a chain of tiny gaps could drift; anchor every merged run at its first point
    return pts[keep]


def common_refinement(*grids: Sequence[float], tol: float = TOL_X) -> np.ndarray:
    """Sorted union of the given grids, duplicates within ``tol`` merged."""
    parts = [np.asarray(g, dtype=float).reshape(-1) for g in grids]
    if not parts:
        return np.zeros(0)
    return as_grid(np.concatenate(parts), tol)


# ---------------------------------------------------------------------------
# piecewise constant
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PwConstant:
    """Step function with ``len(knots) + 1`` cells (both tails included)."""

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        k = _frozen(self.knots)
        v = _frozen(self.values)
        if v.size != k.size + 1:
            raise PiecewiseError(f"need {k.size + 1} cell values, got {v.size}")
        if k.size > 1 and np.any(np.diff(k) <= 0):
            raise PiecewiseError("knots must be strictly increasing")
        if not (np.all(np.isfinite(k)) and np.all(np.isfinite(v))):
            raise PiecewiseError("non-finite piecewise data")
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "values", v)

    @classmethod
    def zero(cls) -> "PwConstant":
        return cls([0.0], [0.0, 0.0])

    @classmethod
    def from_interior(cls, knots, interior) -> "PwConstant":
        """Compactly supported step function: zero tails, given interior cells."""
        knots = np.asarray(knots, dtype=float)
        interior = np.asarray(interior, dtype=float)
        if knots.size == 0:
            return cls.zero()
        return cls(knots, np.concatenate([[0.0], interior, [0.0]]))

    @property
    def interior(self) -> np.ndarray:
        return self.values[1:-1]

    @property
    def compact(self) -> bool:
        return self.values[0] == 0.0 and self.values[-1] == 0.0

    def __call__(self, x):
        idx = np.searchsorted(self.knots, x, side="right")
        return self.values[idx]

    def refine(self, grid) -> "PwConstant":
        grid = common_refinement(self.knots, grid)
        if grid.size == 0:
            return self
        mids = np.concatenate([[grid[0] - 1.0], 0.5 * (grid[:-1] + grid[1:]), [grid[-1] + 1.0]])
        return PwConstant(grid, self(mids))

    def __add__(self, other: "PwConstant") -> "PwConstant":
        a, b = self.refine(other.knots), other.refine(self.knots)
        return PwConstant(a.knots, a.values + b.values)

    def __sub__(self, other: "PwConstant") -> "PwConstant":
        return self + other.scale(-1.0)

    def scale(self, c: float) -> "PwConstant":
        return PwConstant(self.knots, c * self.values)

    def abs(self) -> "PwConstant":
        return PwConstant(self.knots, np.abs(self.values))

    def integral(self) -> float:
        if not self.compact:
            raise Unbounded("integral of a step function with nonzero tails")
        return float(np.sum(self.interior * np.diff(self.knots)))


# ---------------------------------------------------------------------------
# piecewise linear
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PwLinear:
    """``idc * x + b(x)`` with ``b`` stored by its values at ``knots``."""

    knots: np.ndarray
    values: np.ndarray
    idc: int = 0

    def __post_init__(self):
        k = _frozen(self.knots)
        v = _frozen(self.values)
        if k.size == 0:
            raise PiecewiseError("a PwLinear needs at least one knot")
        if v.size != k.size:
            raise PiecewiseError("one value per knot required")
        if k.size > 1 and np.any(np.diff(k) <= 0):
            raise PiecewiseError("knots must be strictly increasing")
        if not (np.all(np.isfinite(k)) and np.all(np.isfinite(v))):
            raise PiecewiseError("non-finite piecewise data")
        if int(self.idc) != self.idc:
            raise PiecewiseError("identity coefficient must be an integer")
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "idc", int(self.idc))

    # construction helpers
    @classmethod
    def constant(cls, c: float, at: float = 0.0) -> "PwLinear":
        return cls([at], [c], 0)

    @classmethod
    def identity(cls, at: float = 0.0) -> "PwLinear":
        return cls([at], [0.0], 1)

    @classmethod
    def from_points(cls, knots, fvals, idc: int = 0) -> "PwLinear":
        """Build from full function values ``f(knots)``."""
        knots = np.asarray(knots, dtype=float)
        return cls(knots, np.asarray(fvals, dtype=float) - idc * knots, idc)

    # evaluation
    def bounded(self, x):
        return np.interp(x, self.knots, self.values)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.bounded(x) + self.idc * x
        return float(out) if out.ndim == 0 else out

    @property
    def full_values(self) -> np.ndarray:
        return self.values + self.idc * self.knots

    def cell_slopes(self) -> np.ndarray:
        """Slopes of the full function on the interior cells."""
        if self.knots.size < 2:
            return np.zeros(0)
        return np.diff(self.values) / np.diff(self.knots) + self.idc

    def derivative(self) -> PwConstant:
        return PwConstant(self.knots, np.concatenate([[self.idc], self.cell_slopes(), [self.idc]]))

    def refine(self, grid) -> "PwLinear":
        g = common_refinement(self.knots, grid)
        return PwLinear(g, self.bounded(g), self.idc)

    def on_grid(self, grid) -> "PwLinear":
        """Same function re-expressed on exactly ``grid`` (which must contain no gaps in meaning)."""
        grid = np.asarray(grid, dtype=float)
        return PwLinear(grid, self.bounded(grid), self.idc)

    # arithmetic
    def _binary(self, other, op) -> "PwLinear":
        if isinstance(other, PwLinear):
            g = common_refinement(self.knots, other.knots)
            return PwLinear(g, op(self.bounded(g), other.bounded(g)), op(self.idc, other.idc))
        return PwLinear(self.knots, op(self.values, float(other)), self.idc)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __neg__(self):
        return PwLinear(self.knots, -self.values, -self.idc)

    def scale(self, c: float) -> "PwLinear":
        if self.idc and c != 1.0:
            raise PiecewiseError("scaling would give a non-integer identity coefficient")
        return PwLinear(self.knots, c * self.values, self.idc)

    def __repr__(self):  # short, arrays can be long
        return f"PwLinear(n={self.knots.size}, idc={self.idc}, span=[{self.knots[0]:g}, {self.knots[-1]:g}])"


IDENTITY = PwLinear.identity()


def pw_eval(f: PwLinear, x):
    return f(x)


def sup_norm_diff(f: PwLinear, g: PwLinear) -> float:
    """``sup |f - g|``; attained at a knot of the common refinement."""
    if f.idc != g.idc:
        raise Unbounded("difference has a nonzero identity coefficient")
    grid = common_refinement(f.knots, g.knots)
    return float(np.max(np.abs(f.bounded(grid) - g.bounded(grid))))


def sup_norm(f: PwLinear) -> float:
    if f.idc:
        raise Unbounded("unbounded function")
    return float(np.max(np.abs(f.values)))


def _linear_pieces(h: PwLinear):
    if h.idc != 0:
        raise Unbounded("integrand has a nonzero identity coefficient")
    if h.values[0] != 0.0 or h.values[-1] != 0.0:
        if abs(h.values[0]) > TOL_V or abs(h.values[-1]) > TOL_V:
            raise Unbounded("integrand does not vanish on the tails")
    return np.diff(h.knots), h.values[:-1], h.values[1:]


def l1_norm(h) -> float:
    """Exact L1 norm of a compactly supported step or piecewise-linear function."""
    if isinstance(h, PwConstant):
        if not h.compact:
            raise Unbounded("step function with nonzero tails")
        return float(np.sum(np.abs(h.interior) * np.diff(h.knots)))
    dx, a, b = _linear_pieces(h)
    same = a * b >= 0
    out = np.where(same, 0.5 * dx * np.abs(a + b), 0.0)
    # sign change inside the cell: two triangles
    with np.errstate(divide="ignore", invalid="ignore"):
        cross = 0.5 * dx * (a * a + b * b) / (np.abs(a) + np.abs(b))
    out = np.where(same, out, cross)
    return float(np.sum(out))


def l2_norm(h) -> float:
    if isinstance(h, PwConstant):
        if not h.compact:
            raise Unbounded("step function with nonzero tails")
        return float(np.sqrt(np.sum(h.interior**2 * np.diff(h.knots))))
    dx, a, b = _linear_pieces(h)
    return float(np.sqrt(np.sum(dx * (a * a + a * b + b * b) / 3.0)))


def _inverse_points(r: PwLinear, pts: np.ndarray) -> np.ndarray:
    """Preimages of ``pts`` under a strictly increasing ``r`` with idc 1."""
    R = r.full_values
    out = np.interp(pts, R, r.knots)
    left = pts < R[0]
    right = pts > R[-1]
    out = np.where(left, pts - r.values[0], out)
    out = np.where(right, pts - r.values[-1], out)
    return out


def compose(f: PwLinear, r: PwLinear) -> PwLinear:
    """``f o r`` for a strictly increasing, surjective inner map ``r``."""
    if r.idc != 1:
        raise NotMonotone("inner map must have identity coefficient 1")
    if np.any(r.cell_slopes() <= 0):
        raise NotMonotone("inner map has a non-increasing cell")
    grid = common_refinement(r.knots, _inverse_points(r, f.knots))
    fr = f(r(grid))
    return PwLinear(grid, np.asarray(fr) - f.idc * grid, f.idc)


def invert(f: PwLinear) -> PwLinear:
    if f.idc != 1:
        raise NotInvertible("only maps with identity coefficient 1 are invertible here")
    if np.any(f.cell_slopes() <= SLOPE_FLOOR):
        raise NotInvertible("slope below the invertibility floor")
    R = f.full_values
    return PwLinear(R, f.knots - R, 1)


def is_strictly_increasing(f: PwLinear, floor: float = 0.0) -> bool:
    return f.idc == 1 and bool(np.all(f.cell_slopes() > floor))


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------


def _merge_atoms(pos, mass, tol=TOL_X):
    pos = np.asarray(pos, dtype=float).reshape(-1)
    mass = np.asarray(mass, dtype=float).reshape(-1)
    if pos.size != mass.size:
        raise PiecewiseError("atom positions and masses differ in length")
    if pos.size == 0:
        return pos, mass
    order = np.argsort(pos, kind="stable")
    pos, mass = pos[order], mass[order]
    start = np.ones(pos.size, dtype=bool)
    start[1:] = np.diff(pos) > tol
    idx = np.flatnonzero(start)
    return pos[idx], np.add.reduceat(mass, idx)


@dataclass(frozen=True, eq=False)
class SignedMeasure:
    density: PwConstant
    atom_x: np.ndarray
    atom_m: np.ndarray

    def __post_init__(self):
        if not isinstance(self.density, PwConstant):
            raise PiecewiseError("density must be a PwConstant")
        if not self.density.compact:
            raise PiecewiseError("density must vanish on both tails")
        x, m = _merge_atoms(self.atom_x, self.atom_m)
        keep = m != 0.0
        object.__setattr__(self, "atom_x", _frozen(x[keep]))
        object.__setattr__(self, "atom_m", _frozen(m[keep]))

    @classmethod
    def build(cls, knots=(), interior=(), atoms=()):
        atoms = list(atoms)
        ax = [a[0] for a in atoms]
        am = [a[1] for a in atoms]
        dens = PwConstant.from_interior(knots, interior) if len(knots) else PwConstant.zero()
        return cls(dens, ax, am)

    @classmethod
    def zero(cls):
        return cls(PwConstant.zero(), [], [])

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.atom_x.tolist(), self.atom_m.tolist()))

    def total_mass(self) -> float:
        return self.density.integral() + float(np.sum(self.atom_m))

    def _density_cumulative(self, x):
        k = self.density.knots
        cum = np.concatenate([[0.0], np.cumsum(self.density.interior * np.diff(k))])
        x = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(k, x, side="right") - 1, 0, max(k.size - 1, 0))
        cell = np.clip(i, 0, max(k.size - 2, 0))
        rho = self.density.interior[cell] if k.size > 1 else np.zeros_like(x)
        val = cum[i] + np.where((x > k[0]) & (i < k.size - 1), rho * (x - k[i]), 0.0)
        return np.where(x <= k[0], 0.0, val)

    def cumulative(self, x, closed: bool = False):
        """``mu((-inf, x))``, or ``mu((-inf, x])`` when ``closed``."""
        x = np.asarray(x, dtype=float)
        base = self._density_cumulative(x)
        if self.atom_x.size:
            side = "right" if closed else "left"
            csum = np.concatenate([[0.0], np.cumsum(self.atom_m)])
            base = base + csum[np.searchsorted(self.atom_x, x, side=side)]
        return float(base) if base.ndim == 0 else base

    def atom_at(self, x: float, tol: float = TOL_X) -> float:
        if self.atom_x.size == 0:
            return 0.0
        hit = np.abs(self.atom_x - x) <= tol
        return float(np.sum(self.atom_m[hit]))

    def breakpoints(self) -> np.ndarray:
        parts = [self.atom_x]
        if self.density.knots.size > 1 or np.any(self.density.values != 0):
            parts.append(self.density.knots)
        return common_refinement(*parts)

    def support_hull(self):
        pts = []
        k = self.density.knots
        nz = np.flatnonzero(self.density.interior != 0)
        if nz.size:
            pts += [k[nz[0]], k[nz[-1] + 1]]
        if self.atom_x.size:
            pts += [self.atom_x[0], self.atom_x[-1]]
        if not pts:
            return None
        return min(pts), max(pts)

    def scale(self, c: float) -> "SignedMeasure":
        return SignedMeasure(self.density.scale(c), self.atom_x, c * self.atom_m)

    def __add__(self, other: "SignedMeasure") -> "SignedMeasure":
        return SignedMeasure(
            self.density + other.density,
            np.concatenate([self.atom_x, other.atom_x]),
            np.concatenate([self.atom_m, other.atom_m]),
        )

    def __sub__(self, other: "SignedMeasure") -> "SignedMeasure":
        return self + other.scale(-1.0)

    def __repr__(self):
        return f"{type(self).__name__}(mass={self.total_mass():.6g}, atoms={len(self.atom_x)})"


class Measure(SignedMeasure):
    """Nonnegative finite measure."""

    def __post_init__(self):
        super().__post_init__()
        if np.any(self.density.values < 0):
            raise PiecewiseError("measure density must be nonnegative")
        if np.any(self.atom_m < 0):
            raise PiecewiseError("atom masses must be positive")

    @classmethod
    def from_signed(cls, s: SignedMeasure, clip: float = 0.0) -> "Measure":
        dens = s.density
        if clip:
            dens = PwConstant(dens.knots, np.where(np.abs(dens.values) <= clip, 0.0, dens.values))
        m = np.where(np.abs(s.atom_m) <= clip, 0.0, s.atom_m)
        return cls(dens, s.atom_x, m)

    def __add__(self, other):
        out = super().__add__(other)
        if isinstance(other, Measure):
            return Measure(out.density, out.atom_x, out.atom_m)
        return out

    def scale(self, c: float):
        out = super().scale(c)
        return Measure(out.density, out.atom_x, out.atom_m) if c >= 0 else out


def cumulative_sup_diff(a: SignedMeasure, b: SignedMeasure, tol: float = TOL_X) -> float:
    """Sup distance between the cumulative functions.

    Breakpoints closer than ``tol`` are identified and the two one-sided
    limits are taken just outside the merged point, so atoms whose positions
    agree up to rounding compare equal.
    """
    pts = common_refinement(a.breakpoints(), b.breakpoints(), tol=tol)
    if pts.size == 0:
        return 0.0
    delta = 4.0 * tol * np.maximum(1.0, np.abs(pts))
    lo, hi = pts - delta, pts + delta
    d1 = np.abs(a.cumulative(lo, closed=True) - b.cumulative(lo, closed=True))
    d2 = np.abs(a.cumulative(hi, closed=True) - b.cumulative(hi, closed=True))
    return float(max(d1.max(), d2.max()))


def pushforward(y: PwLinear, weight: PwConstant) -> Measure:
    """Image of ``weight(xi) dxi`` under the nondecreasing map ``y``.

    Cells on which ``y`` is flat become atoms at the common position; all
    other cells become density cells with density ``weight / y_xi``.
    """
    if y.idc != 1:
        raise PiecewiseError("pushforward needs a map with identity coefficient 1")
    if not weight.compact:
        raise PiecewiseError("weight must be compactly supported")
    grid = common_refinement(y.knots, weight.knots)
    if grid.size < 2:
        return Measure.zero()
    P = y(grid)
    dxi = np.diff(grid)
    w = weight(0.5 * (grid[:-1] + grid[1:]))
    w = np.where((w < 0) & (w > -TOL_V), 0.0, w)  # rounding residue of a zero slope
    mass = w * dxi
    flat = np.diff(P) <= SLOPE_FLOOR * dxi
    n = grid.size
    is_start = np.ones(n, dtype=bool)
    is_start[1:] = ~flat
    src = np.maximum.accumulate(np.where(is_start, np.arange(n), 0))
    Pa = P[src]
    ex = Pa[is_start]
    sloped = ~flat
    width = Pa[1:][sloped] - Pa[:-1][sloped]
    dens = mass[sloped] / width
    density = PwConstant.from_interior(ex, dens) if ex.size > 1 else PwConstant.zero()
    ax = Pa[:-1][flat]
    am = mass[flat]
    keep = am > 0
    return Measure(density, ax[keep], am[keep])
