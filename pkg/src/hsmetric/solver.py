"""Exact evolution of Lagrangian states through wave breaking.

Between two breaking events the system ``y_t = U``, ``U_t = V/2 - V_inf/4``,
``H_t = V_t = 0`` has constant right-hand side in ``U``, so every knot value
follows a quadratic in time and piecewise linearity in the label is kept.
At a breaking event the energy slope ``V_xi`` of the collapsing cells is
multiplied by ``1 - alpha(x)`` where ``x`` is the collapse position.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eulerian import AlphaFn, EulerianY
from .lagrangian import LagrangianX
from .piecewise import SLOPE_FLOOR, TOL_V
from .transform import to_eulerian, to_lagrangian

TOL_T = 1e-12


class OutOfHorizon(ValueError):
    pass


class NonFiniteInput(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BreakingSchedule:
    """Breaking time per interior cell of ``grid`` (``inf`` = never, ``0`` = degenerate)."""

    grid: np.ndarray
    tau: np.ndarray

    def cell_of(self, xi) -> np.ndarray:
        """Index of the interior cell containing each label (``-1`` on the tails)."""
        i = np.searchsorted(self.grid, xi, side="right") - 1
        return np.where((i < 0) | (i >= self.grid.size - 1), -1, i)

    def at(self, xi) -> np.ndarray:
        i = self.cell_of(xi)
        tau = np.concatenate([self.tau, [np.inf]])
        return tau[np.where(i < 0, -1, i)]


def cell_breaking_times(yx: np.ndarray, Ux: np.ndarray) -> np.ndarray:
    tau = np.full(yx.shape, np.inf)
    neg = Ux < -SLOPE_FLOOR
    tau[neg] = -2.0 * yx[neg] / Ux[neg]
    degenerate = (np.abs(Ux) <= SLOPE_FLOOR) & (np.abs(yx) <= SLOPE_FLOOR)
    tau[degenerate] = 0.0
    return tau


def breaking_times(X: LagrangianX) -> BreakingSchedule:
    yx, Ux, _, _ = X.slopes()
    return BreakingSchedule(X.grid, cell_breaking_times(yx, Ux))


@dataclass(frozen=True)
class Collapse:
    """One maximal run of cells collapsing together at an event."""

    time: float
    cells: tuple[int, int]  # first and last interior cell index
    x: float
    alpha: float
    spread: float  # disagreement of the knot positions before snapping


@dataclass(frozen=True, eq=False)
class Trajectory:
    alpha: AlphaFn
    schedule: BreakingSchedule
    times: np.ndarray  # start of each segment; times[0] == 0
    states: tuple  # state just after each segment start (post-dissipation)
    horizon: float
    collapses: tuple = field(default_factory=tuple)

    @property
    def initial(self) -> LagrangianX:
        return self.states[0]

    @property
    def grid(self) -> np.ndarray:
        return self.schedule.grid

    @property
    def event_times(self) -> np.ndarray:
        return self.times[1:]

    def V_inf(self, t: float) -> float:
        return self.states[self._segment(t)].V_inf

    def _segment(self, t: float, left: bool = False) -> int:
        if not np.isfinite(t) or t < -TOL_T or t > self.horizon + TOL_T:
            raise OutOfHorizon(f"t={t} outside [0, {self.horizon}]")
        side = "left" if left else "right"
        return max(int(np.searchsorted(self.times, t, side=side)) - 1, 0)

    def state_at(self, t: float) -> LagrangianX:
        return state_at(self, t)

    def state_before(self, t: float) -> LagrangianX:
        """Left limit at ``t`` (before any dissipation happening exactly at ``t``)."""
        k = self._segment(t, left=True)
        return _advance(self.states[k], t - self.times[k])


def _advance(X: LagrangianX, s: float) -> LagrangianX:
    if s == 0.0:
        return X
    g = X.grid
    y0 = X.y.full_values
    U0, V = X.U.values, X.V.values
    a = 0.5 * V - 0.25 * V[-1]
    y = y0 + U0 * s + 0.5 * a * s * s
    U = U0 + a * s
    return LagrangianX.from_arrays(g, y, U, X.H.values, V, X.alpha)


def state_at(traj: Trajectory, t: float) -> LagrangianX:
    k = traj._segment(t)
    return _advance(traj.states[k], t - traj.times[k])


def _runs(cells: np.ndarray):
    """Split sorted cell indices into maximal runs of consecutive cells."""
    if cells.size == 0:
        return []
    cut = np.flatnonzero(np.diff(cells) > 1) + 1
    return [(int(r[0]), int(r[-1])) for r in np.split(cells, cut)]


def evolve(X0: LagrangianX, T: float) -> Trajectory:
    """Exact solution on ``[0, T]``; all events up to ``T`` are resolved."""
    if not np.isfinite(T) or T < 0:
        raise NonFiniteInput("horizon must be finite and nonnegative")
    for p in (X0.y, X0.U, X0.H, X0.V):
        if not np.all(np.isfinite(p.values)):
            raise NonFiniteInput("non-finite initial data")
    sched = breaking_times(X0)
    tau = sched.tau
    finite = np.flatnonzero(np.isfinite(tau) & (tau > 0) & (tau <= T + TOL_T))
    order = finite[np.argsort(tau[finite], kind="stable")]

    groups: list[np.ndarray] = []
    for c in order:
        if groups and tau[c] - tau[groups[-1][0]] <= TOL_T * max(1.0, tau[c]):
            groups[-1] = np.append(groups[-1], c)
        else:
            groups.append(np.array([c]))

    alpha = X0.alpha
    g = X0.grid
    times, states, collapses = [0.0], [X0], []
    X = X0
    for grp in groups:
        t_ev = float(np.mean(tau[grp]))
        Xm = _advance(X, t_ev - times[-1])
        y = Xm.y.full_values.copy()
        U = Xm.U.values.copy()
        V = Xm.V.values
        dV = np.diff(V)
        factor = np.ones(dV.size)
        for i0, i1 in _runs(np.sort(grp)):
            knots = slice(i0, i1 + 2)
            xc = float(np.mean(y[knots]))
            spread = float(np.ptp(y[knots]))
            y[knots] = xc
            U[knots] = float(np.mean(U[knots]))
            a = float(alpha(xc))
            factor[i0 : i1 + 1] = 1.0 - a
            collapses.append(Collapse(t_ev, (i0, i1), xc, a, spread))
        Vn = np.concatenate([[V[0]], V[0] + np.cumsum(dV * factor)])
        untouched = np.concatenate([[True], np.cumsum(factor != 1.0) == 0])
        Vn[untouched] = V[untouched]
        X = LagrangianX.from_arrays(g, y, U, Xm.H.values, Vn, alpha)
        times.append(t_ev)
        states.append(X)
    return Trajectory(alpha, sched, np.array(times), tuple(states), float(T), tuple(collapses))


def evolve_eulerian(Y0: EulerianY, times, validate: bool = True) -> list[EulerianY]:
    """``T_t Y0`` for each requested time."""
    times = [float(t) for t in times]
    X0 = to_lagrangian(Y0, validate=validate)
    traj = evolve(X0, max(times) if times else 0.0)
    return [to_eulerian(traj.state_at(t)) for t in times]


def max_collapse_spread(traj: Trajectory) -> float:
    return max((c.spread for c in traj.collapses), default=0.0)


__all__ = [
    "TOL_T",
    "TOL_V",
    "BreakingSchedule",
    "Collapse",
    "NonFiniteInput",
    "OutOfHorizon",
    "Trajectory",
    "breaking_times",
    "evolve",
    "evolve_eulerian",
    "max_collapse_spread",
    "state_at",
]
