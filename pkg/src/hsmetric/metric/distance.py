"""Segment classification, the G-function and the semi-metric D."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..eulerian import alpha_slope_sup, alpha_sup_diff
from ..lagrangian import LagrangianX
from ..piecewise import as_grid, common_refinement
from ..solver import TOL_T, BreakingSchedule, cell_breaking_times

CONSTANT_ALPHA_RATE = 1.5
TERM_NAMES = ("y", "U", "y_xi", "U_xi", "H", "G_l1", "G_l2", "alpha")


def lipschitz_constants(M: float, L: float) -> tuple[float, float]:
    """Growth rates ``(C, R)`` for energy bound ``M`` and alpha-Lipschitz bound ``L``."""
    if M < 0 or L < 0:
        raise ValueError("M and L must be nonnegative")
    extra = 0.25 * L * (M + 2.0 * math.sqrt(M))
    return 2.0 + extra, 4.0 * max(M, 1.0) + 2.5 + extra


@dataclass(frozen=True, eq=False)
class SegmentClassification:
    grid: np.ndarray  # cells are (grid[i], grid[i+1])
    tau_A: np.ndarray
    tau_B: np.ndarray
    A_A: np.ndarray
    A_B: np.ndarray
    A_AB: np.ndarray
    B_AB: np.ndarray
    Omega: np.ndarray
    Omega_c: np.ndarray

    def is_partition(self) -> bool:
        total = self.A_AB.astype(int) + self.B_AB.astype(int) + self.Omega_c.astype(int)
        return bool(np.all(total == 1))


def _future(tau: np.ndarray, t: float, left: bool) -> np.ndarray:
    """Cells that are still going to break after time ``t``."""
    tol = TOL_T * np.maximum(1.0, np.abs(t))
    fin = np.isfinite(tau) & (tau > 0)
    if left:
        return fin & (tau > t - tol)
    return fin & (tau > t + tol)


def _tau_on(X: LagrangianX, sched, t: float, mids: np.ndarray) -> np.ndarray:
    if sched is None:
        # remaining breaking time read off the current state, shifted to absolute time
        yx, Ux, _, _ = X.slopes()
        rem = cell_breaking_times(yx, Ux)
        tau = np.where(rem > 0, rem + t, rem)
        return BreakingSchedule(X.grid, tau).at(mids)
    return sched.at(mids)


def classify_segments(
    XA: LagrangianX,
    XB: LagrangianX,
    t: float = 0.0,
    sched_A: BreakingSchedule | None = None,
    sched_B: BreakingSchedule | None = None,
    left: bool = False,
    grid=None,
) -> SegmentClassification:
    """Flags per cell of the common refinement.

    Without schedules the breaking times are read from the states themselves,
    which is exact for states produced by the solver.  Schedules (absolute
    times from the initial data) are needed for left limits at an event.
    """
    g = common_refinement(XA.grid, XB.grid) if grid is None else np.asarray(grid, dtype=float)
    mids = 0.5 * (g[:-1] + g[1:])
    tA = _tau_on(XA, sched_A, t, mids)
    tB = _tau_on(XB, sched_B, t, mids)
    fA, fB = _future(tA, t, left), _future(tB, t, left)
    same = np.zeros(mids.shape, dtype=bool)
    both = fA & fB
    same[both] = np.abs(tA[both] - tB[both]) <= TOL_T * np.maximum(1.0, np.abs(tA[both]))
    A_A, A_B = ~fA, ~fB
    A_AB = A_A & A_B
    B = both & same
    Om = A_AB | B
    return SegmentClassification(g, tA, tB, A_A, A_B, A_AB, B, Om, ~Om)


@dataclass(frozen=True, eq=False)
class GResult:
    grid: np.ndarray
    left: np.ndarray  # value at the left end of each cell
    right: np.ndarray  # value at the right end of each cell
    l1: float
    l2: float
    dV_l1: float
    dV_l2: float
    classes: SegmentClassification

    def __call__(self, xi):
        """Value inside the cells (labels on a knot take the right-hand cell)."""
        xi = np.asarray(xi, dtype=float)
        i = np.searchsorted(self.grid, xi, side="right") - 1
        inside = (i >= 0) & (i < self.grid.size - 1)
        j = np.clip(i, 0, max(self.grid.size - 2, 0))
        h = self.grid[j + 1] - self.grid[j] if self.grid.size > 1 else np.ones_like(xi)
        w = np.where(inside, (xi - self.grid[j]) / h, 0.0)
        val = (1 - w) * self.left[j] + w * self.right[j] if self.left.size else np.zeros_like(xi)
        return np.where(inside, val, 0.0)


def _sign_change_points(grid, *funcs):
    pts = []
    for f in funcs:
        a, b = f[:-1], f[1:]
        m = a * b < 0
        if np.any(m):
            pts.append(grid[:-1][m] + (grid[1:] - grid[:-1])[m] * a[m] / (a[m] - b[m]))
    return np.concatenate(pts) if pts else np.zeros(0)


def _cell_norms(grid, left, right):
    h = np.diff(grid)
    l1 = float(np.sum(0.5 * h * (np.abs(left) + np.abs(right))))
    l2 = float(np.sqrt(np.sum(h * (left * left + left * right + right * right) / 3.0)))
    return l1, l2


def compute_G(
    XA: LagrangianX,
    XB: LagrangianX,
    t: float = 0.0,
    sched_A: BreakingSchedule | None = None,
    sched_B: BreakingSchedule | None = None,
    left: bool = False,
    variant: str = "general",
) -> GResult:
    aA, aB = XA.alpha, XB.alpha
    K0 = common_refinement(XA.grid, XB.grid, aA.knots, aB.knots)
    if variant == "constant_alpha":
        K = K0
    else:
        yA0, yB0 = XA.y.bounded(K0), XB.y.bounded(K0)
        UA0, UB0 = XA.U.bounded(K0), XB.U.bounded(K0)
        extra = _sign_change_points(K0, yA0 - yB0, UA0 - UB0, yA0, yB0, UA0, UB0)
        K = as_grid(np.concatenate([K0, extra])) if extra.size else K0
    cls = classify_segments(XA, XB, t, sched_A, sched_B, left, grid=K)
    if K.size < 2:
        z = np.zeros(0)
        return GResult(K, z, z, 0.0, 0.0, 0.0, 0.0, cls)
    mids = 0.5 * (K[:-1] + K[1:])
    VAx = XA.V.derivative()(mids)
    VBx = XB.V.derivative()(mids)
    dVx = np.abs(VAx - VBx)
    m = np.minimum(VAx, VBx)
    nA = (~cls.A_A).astype(float)
    nB = (~cls.A_B).astype(float)
    inAB, inB, inOc = (c.astype(float) for c in (cls.A_AB, cls.B_AB, cls.Omega_c))

    if variant == "constant_alpha":
        if not (aA.is_constant and aB.is_constant):
            raise ValueError("the constant-alpha variant needs constant alphas")
        VdA = aA.const_value * VAx * nA
        VdB = aB.const_value * VBx * nB
        VcA, VcB = VAx - VdA, VBx - VdB
        G = dVx * inAB + (np.abs(VcA - VcB) + np.abs(VdA - VdB)) * inB + (np.abs(VcA - VcB) + np.maximum(VdA, VdB)) * inOc
        lo = hi = G
    elif variant == "general":
        L = alpha_slope_sup(aA, aB)
        da = alpha_sup_diff(aA, aB)
        nVA = float(np.sum(np.abs(XA.V.derivative().interior) * np.diff(XA.grid))) if XA.grid.size > 1 else 0.0
        nVB = float(np.sum(np.abs(XB.V.derivative().interior) * np.diff(XB.grid))) if XB.grid.size > 1 else 0.0
        yA, yB = XA.y.bounded(K), XB.y.bounded(K)
        UA, UB = XA.U.bounded(K), XB.U.bounded(K)
        alA, alB = aA(K), aB(K)
        term4 = 0.25 * L * m * (nVA + nVB + 1.0) * (nA + nB) * (1.0 - inB)

        def at(s):  # s selects the left (slice(None,-1)) or right end of each cell
            dy = np.abs(yA[s] - yB[s])
            dU = np.abs(UA[s] - UB[s])
            ghat = dVx + da * m + L * m * (dy + dU)
            gbar = (
                dVx
                + m * (alA[s] * nA + alB[s] * nB)
                + L * m * (np.abs(yA[s]) * nA + np.abs(yB[s]) * nB + (np.abs(UA[s]) + np.abs(UB[s])) * (nA + nB))
            )
            return dVx * inAB + ghat * inB + gbar * inOc + term4

        lo, hi = at(slice(None, -1)), at(slice(1, None))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    l1, l2 = _cell_norms(K, lo, hi)
    h = np.diff(K)
    dV1 = float(np.sum(dVx * h))
    dV2 = float(np.sqrt(np.sum(dVx * dVx * h)))
    return GResult(K, lo, hi, l1, l2, dV1, dV2, cls)


@dataclass
class MetricReport:
    total: float
    terms: dict
    M_AB: float
    L_AB: float
    C_AB: float
    R_ML: float
    variant: str = "general"
    G: GResult | None = field(default=None, repr=False)

    def rate(self) -> float:
        return CONSTANT_ALPHA_RATE if self.variant == "constant_alpha" else self.C_AB


def _slope_l2(fA, fB) -> float:
    g = common_refinement(fA.knots, fB.knots)
    if g.size < 2:
        return 0.0
    d = np.diff(fA.bounded(g) - fB.bounded(g)) / np.diff(g)
    return float(np.sqrt(np.sum(d * d * np.diff(g))))


def _sup(fA, fB) -> float:
    g = common_refinement(fA.knots, fB.knots)
    return float(np.max(np.abs(fA.bounded(g) - fB.bounded(g))))


def semi_metric_D(
    XA: LagrangianX,
    XB: LagrangianX,
    t: float = 0.0,
    variant: str = "general",
    alpha_term: bool = True,
    sched_A: BreakingSchedule | None = None,
    sched_B: BreakingSchedule | None = None,
    left: bool = False,
    M: float | None = None,
) -> MetricReport:
    """The eight-term distance between two states at a common time.

    ``M`` overrides the energy bound used for the reported constants (by
    default the larger sup of ``V`` of the two given states).
    """
    Gr = compute_G(XA, XB, t, sched_A, sched_B, left, variant)
    terms = {
        "y": _sup(XA.y, XB.y),
        "U": _sup(XA.U, XB.U),
        "y_xi": _slope_l2(XA.y, XB.y),
        "U_xi": _slope_l2(XA.U, XB.U),
        "H": _sup(XA.H, XB.H),
        "G_l1": 0.25 * Gr.l1,
        "G_l2": 0.5 * Gr.l2,
        "alpha": alpha_sup_diff(XA.alpha, XB.alpha) if alpha_term else 0.0,
    }
    if M is None:
        M = max(float(np.max(np.abs(XA.V.values))), float(np.max(np.abs(XB.V.values))))
    L = alpha_slope_sup(XA.alpha, XB.alpha)
    C, R = lipschitz_constants(M, L)
    return MetricReport(float(sum(terms.values())), terms, M, L, C, R, variant, Gr)


def D_value(XA, XB, **kw) -> float:
    return semi_metric_D(XA, XB, **kw).total
