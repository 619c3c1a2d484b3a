"""Bracketed distances: relabelling infimum J, chained d-hat and the Eulerian distances.

None of these infima has a closed form.  Each is reported as an interval
``[lower, upper]``: the upper end is the best value found over a family of
relabellings, the lower end a certified bound.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ..eulerian import EulerianY, EulerianZ, alpha_sup_diff, validate_eulerian
from ..lagrangian import LagrangianX, in_F0, lag_comparison_norm, pi_normalize, relabel
from ..piecewise import PiecewiseError, PwLinear, common_refinement, sup_norm_diff
from ..transform import relabelling_candidate, to_lagrangian
from .blnorm import bounded_lipschitz
from .distance import D_value

log = logging.getLogger(__name__)

TOL_METRIC = 1e-7
_BAD = 1e300


class InvalidNuCandidate(ValueError):
    pass


@dataclass(frozen=True)
class Budget:
    knots: int = 8
    maxfev: int = 200
    seed: int = 0


@dataclass
class DistanceBracket:
    lower: float
    upper: float
    witness: str = ""
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.lower <= self.upper + TOL_METRIC and math.isfinite(self.upper)


def _abscissae(grid: np.ndarray, k: int) -> np.ndarray:
    if grid.size <= k:
        return grid
    return np.unique(np.quantile(grid, np.linspace(0.0, 1.0, k)))


def _family(q: np.ndarray, p: np.ndarray) -> PwLinear:
    """Increasing map with ``f(q0) = q0 + p0`` and gaps scaled by ``exp(p[1:])``."""
    gaps = np.diff(q) * np.exp(np.clip(p[1:], -30, 30))
    vals = q[0] + p[0] + np.concatenate([[0.0], np.cumsum(gaps)])
    return PwLinear.from_points(q, vals, 1)


def _project(q: np.ndarray, f: PwLinear) -> np.ndarray:
    fv = np.asarray(f(q), dtype=float)
    ratio = np.diff(fv) / np.diff(q) if q.size > 1 else np.zeros(0)
    return np.concatenate([[fv[0] - q[0]], np.log(np.clip(ratio, 1e-12, None))])


def _best_relabelling(obj, grid, candidate, budget: Budget):
    """Minimize ``obj(f)`` over relabellings; returns ``(value, description)``."""
    best_val, best_desc = obj(None), "id"
    cand_f = None
    try:
        cand_f = candidate()
        v = obj(cand_f)
        if v < best_val:
            best_val, best_desc = v, "canonical"
    except (PiecewiseError, ValueError) as exc:
        log.debug("canonical candidate unavailable: %s", exc)
    if best_val <= TOL_METRIC or budget.maxfev <= 0 or grid.size == 0:
        return best_val, best_desc
    q = _abscissae(grid, budget.knots)

    def safe(p):
        try:
            return obj(_family(q, p))
        except (PiecewiseError, ValueError):
            return _BAD

    seeds = [np.zeros(q.size)]
    if cand_f is not None:
        seeds.append(_project(q, cand_f))
    rng = np.random.default_rng(budget.seed)
    for p0 in seeds:
        simplex = np.vstack([p0, p0 + np.diag(0.05 + 0.05 * rng.random(q.size))])
        res = minimize(
            safe,
            p0,
            method="Nelder-Mead",
            options={"maxfev": budget.maxfev, "initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-13},
        )
        if res.fun < best_val:
            best_val = float(res.fun)
            best_desc = "pw-linear through " + ", ".join(
                f"({a:.4g}->{b:.4g})" for a, b in zip(q, np.atleast_1d(_family(q, res.x)(q)))
            )
    return best_val, best_desc


def _lower_norm(XA: LagrangianX, XB: LagrangianX, alpha_term: bool) -> float:
    v = lag_comparison_norm(XA, XB)
    return v if alpha_term else v - alpha_sup_diff(XA.alpha, XB.alpha)


def J_bracket(
    XA: LagrangianX,
    XB: LagrangianX,
    t: float = 0.0,
    budget: Budget | None = None,
    variant: str = "general",
    alpha_term: bool = True,
) -> DistanceBracket:
    budget = budget or Budget()
    kw = dict(t=t, variant=variant, alpha_term=alpha_term)
    grid = common_refinement(XA.grid, XB.grid)

    def term1(f):
        return D_value(XA, XB if f is None else relabel(XB, f), **kw)

    def term2(g):
        return D_value(XA if g is None else relabel(XA, g), XB, **kw)

    v1, w1 = _best_relabelling(term1, grid, lambda: relabelling_candidate(XB, XA), budget)
    v2, w2 = _best_relabelling(term2, grid, lambda: relabelling_candidate(XA, XB), budget)
    upper = v1 + v2
    lower = 0.4 * _lower_norm(XA, XB, alpha_term) if in_F0(XA) and in_F0(XB) else 0.0
    return DistanceBracket(lower, upper, f"f: {w1}; g: {w2}", {"D(XA,XB o f)": v1, "D(XA o g,XB)": v2})


def dhat_bracket(
    XA: LagrangianX,
    XB: LagrangianX,
    t: float = 0.0,
    budget: Budget | None = None,
    variant: str = "general",
    alpha_term: bool = True,
) -> DistanceBracket:
    """Single-link chain between the normalized representatives."""
    PA, _ = pi_normalize(XA)
    PB, _ = pi_normalize(XB)
    jb = J_bracket(PA, PB, t, budget, variant, alpha_term)
    lower = 0.4 * _lower_norm(PA, PB, alpha_term)
    return DistanceBracket(lower, jb.upper, jb.witness, dict(jb.details))


def euler_distance(YA: EulerianY, YB: EulerianY, budget: Budget | None = None, alpha_term: bool = True) -> DistanceBracket:
    return dhat_bracket(to_lagrangian(YA), to_lagrangian(YB), 0.0, budget, "general", alpha_term)


def quotient_lower_bound(n: float, M: float) -> float:
    """Largest ``d`` compatible with ``(5 + 2 max(M,1)) d + sqrt(5M/2) sqrt(d) >= n``."""
    if n <= 0:
        return 0.0
    a = 5.0 + 2.0 * max(M, 1.0)
    b = math.sqrt(2.5 * M)
    s = (-b + math.sqrt(b * b + 4 * a * n)) / (2 * a)
    return s * s


def eulerian_norm(ZA: EulerianZ, ZB: EulerianZ, mode: str = "max") -> float:
    """``||u_A-u_B||_inf + ||mu_A-mu_B||_BL + ||alpha_A-alpha_B||_inf``."""
    return sup_norm_diff(ZA.u, ZB.u) + bounded_lipschitz(ZA.mu - ZB.mu, mode) + alpha_sup_diff(ZA.alpha, ZB.alpha)


def _candidates(Z: EulerianZ, extra) -> list:
    out = []
    for k, nu in enumerate([Z.mu, *extra]):
        Y = Z.with_nu(nu)
        rep = validate_eulerian(Y)
        if not rep.ok:
            raise InvalidNuCandidate(f"candidate {k}: " + "; ".join(rep.lines()))
        out.append(Y)
    return out


def euler_quotient_bracket(
    ZA: EulerianZ,
    ZB: EulerianZ,
    nu_A=(),
    nu_B=(),
    budget: Budget | None = None,
    mode: str = "max",
    alpha_term: bool = True,
    M: float | None = None,
) -> DistanceBracket:
    """Bracket for the quotient distance between energy-only states.

    Candidate 0 on each side is the canonical choice ``nu = mu``.  ``M``
    defaults to the larger total energy of the two states.
    """
    YA, YB = _candidates(ZA, nu_A), _candidates(ZB, nu_B)
    best, arg = math.inf, (0, 0)
    table = {}
    for i, A in enumerate(YA):
        for j, B in enumerate(YB):
            b = euler_distance(A, B, budget, alpha_term)
            table[(i, j)] = b.upper
            if b.upper < best:
                best, arg = b.upper, (i, j)
    if M is None:
        M = max(ZA.mu.total_mass(), ZB.mu.total_mass())
    n = eulerian_norm(ZA, ZB, mode)
    lower = quotient_lower_bound(n, M)
    return DistanceBracket(lower, best, f"nu candidates A[{arg[0]}], B[{arg[1]}]", {"pairs": table, "norm": n, "M": M})
