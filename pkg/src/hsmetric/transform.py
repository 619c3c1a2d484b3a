"""Maps between Eulerian and Lagrangian coordinates."""

from __future__ import annotations

import logging

import numpy as np

from .eulerian import EulerianY, alpha_sup_diff, radon_nikodym, validate_eulerian
from .lagrangian import LagrangianX, Relabelling
from .piecewise import (
    SLOPE_FLOOR,
    TOL_V,
    NotInvertible,
    NotMonotone,
    PwLinear,
    compose,
    cumulative_sup_diff,
    invert,
    pushforward,
    sup_norm_diff,
)

log = logging.getLogger(__name__)


class InconsistentU(ValueError):
    pass


class InvalidState(ValueError):
    def __init__(self, report):
        super().__init__("; ".join(report.lines()))
        self.report = report


def to_lagrangian(Y: EulerianY, validate: bool = True) -> LagrangianX:
    """Generalized inverse of ``x + nu((-inf, x))`` and the induced U, H, V."""
    if validate:
        rep = validate_eulerian(Y)
        if not rep.ok:
            raise InvalidState(rep)
    xs = Y.breakpoints()
    nu, mu = Y.nu, Y.mu
    Fnu = nu.cumulative(xs)
    a_nu = np.array([nu.atom_at(x) for x in xs])

    left = xs + Fnu
    right = left + a_nu
    has_atom = a_nu > 0
    n = xs.size
    # interleave (left_j, right_j) and keep right_j only where there is an atom
    xi = np.empty(2 * n)
    xi[0::2], xi[1::2] = left, right
    x = np.repeat(xs, 2)
    keep = np.ones(2 * n, dtype=bool)
    keep[1::2] = has_atom
    xi, x = xi[keep], x[keep]

    # V by integrating H_xi * (dmu/dnu o y): ratio per Eulerian cell or per atom
    ratio, atom_ratio = radon_nikodym(mu, nu, xs)
    atom_r = {float(p): r for p, r in atom_ratio}
    dH = np.diff(xi - x)
    incr = np.zeros(dH.size)
    kinds = np.repeat(np.arange(n), 2)[keep]
    for c in range(dH.size):
        j0, j1 = kinds[c], kinds[c + 1]
        if j0 == j1:  # flat cell from an atom at xs[j0]
            incr[c] = atom_r.get(float(xs[j0]), 0.0) * dH[c]
        else:
            incr[c] = ratio(0.5 * (xs[j0] + xs[j1])) * dH[c]
    V = np.concatenate([[0.0], np.cumsum(incr)])
    U = Y.u(x)
    return LagrangianX.from_arrays(xi, x, U, xi - x, V, Y.alpha)


def _flat_runs(X: LagrangianX):
    P = X.y(X.grid)
    dxi = np.diff(X.grid)
    flat = np.diff(P) <= SLOPE_FLOOR * dxi
    n = P.size
    is_start = np.ones(n, dtype=bool)
    is_start[1:] = ~flat
    src = np.maximum.accumulate(np.where(is_start, np.arange(n), 0))
    return P, flat, is_start, src


def to_eulerian(X: LagrangianX, validate: bool = False, tol: float = TOL_V) -> EulerianY:
    """Push the Lagrangian state forward: ``u(y) = U``, ``mu = y#(V_xi)``, ``nu = y#(H_xi)``."""
    P, flat, is_start, src = _flat_runs(X)
    Uv = X.U.values
    spread = np.abs(Uv - Uv[src])
    if spread.size and spread.max() > tol * max(1.0, np.abs(Uv).max()):
        raise InconsistentU(f"U varies by {spread.max():.3g} on a flat y-cell")
    ex = P[src][is_start]
    u = PwLinear(ex, Uv[is_start])
    mu = pushforward(X.y, X.V.derivative())
    nu = pushforward(X.y, X.H.derivative())
    Y = EulerianY(u, mu, nu, X.alpha)
    if validate:
        rep = validate_eulerian(Y)
        if not rep.ok:
            raise InvalidState(rep)
    return Y


def relabelling_candidate(XA: LagrangianX, XB: LagrangianX) -> PwLinear:
    """The only map that can intertwine ``y + H``: ``(y_A+H_A)^-1 o (y_B+H_B)``."""
    return compose(invert(XA.y + XA.H), XB.y + XB.H)


def relabelling_report(XA: LagrangianX, XB: LagrangianX, tol: float = TOL_V):
    """Return ``(relabelling or None, message, mismatches)``.

    ``mismatches`` maps component names to the sup error of ``X_A o f``
    against ``X_B`` for the canonical candidate ``f``.
    """
    try:
        f = relabelling_candidate(XA, XB)
    except (NotInvertible, NotMonotone) as exc:
        return None, f"y_A + H_A is not invertible: {exc}", {}
    if np.any(f.cell_slopes() <= SLOPE_FLOOR):
        return None, "candidate is not strictly increasing, so it is not a relabelling", {}
    mism = {}
    for name in ("y", "U", "H", "V"):
        mism[name] = sup_norm_diff(compose(getattr(XA, name), f), getattr(XB, name))
    mism["alpha"] = alpha_sup_diff(XA.alpha, XB.alpha)
    bad = [k for k, v in mism.items() if v > tol]
    if bad:
        msg = "candidate fails on " + ", ".join(bad)
        extra = _yv_diagnostic(XA, XB, tol)
        return None, msg + ("; " + extra if extra else ""), mism
    return Relabelling(f), "ok", mism


def _yv_diagnostic(XA: LagrangianX, XB: LagrangianX, tol: float, n: int = 2001) -> str:
    """Explain a failure through the map that matches ``y + V`` instead of ``y + H``."""
    try:
        r = invert(XA.y + XA.V)
    except (NotInvertible, NotMonotone):
        return ""
    g = XB.grid
    xi = np.union1d(g, np.linspace(g[0] - 1.0, g[-1] + 1.0, n))
    fx = np.asarray(r((XB.y + XB.V)(xi)), dtype=float)
    errs = {name: float(np.max(np.abs(getattr(XA, name)(fx) - getattr(XB, name)(xi)))) for name in ("y", "U", "H", "V")}
    flat = np.diff(fx) <= SLOPE_FLOOR * np.diff(xi)
    parts = []
    if np.any(flat):
        i = np.flatnonzero(flat)
        parts.append(f"the map matching y, U, V is flat on ({xi[i[0]]:.6g}, {xi[i[-1] + 1]:.6g}), so it is not a relabelling")
    if errs["H"] > tol and max(errs["y"], errs["U"], errs["V"]) <= tol:
        parts.append(f"with that map H_A o f != H_B (error {errs['H']:.3g})")
    return "; ".join(parts)


def is_relabelling_of(XA: LagrangianX, XB: LagrangianX, tol: float = TOL_V):
    """A relabelling ``f`` with ``X_B = X_A o f`` if one exists, else ``None``."""
    f, msg, _ = relabelling_report(XA, XB, tol)
    if f is None:
        log.debug("no relabelling: %s", msg)
    return f


def eulerian_sup_diff(A: EulerianY, B: EulerianY) -> dict:
    """Sup differences of u and of the cumulative measures (both one-sided limits)."""
    return {
        "u": sup_norm_diff(A.u, B.u),
        "mu": cumulative_sup_diff(A.mu, B.mu),
        "nu": cumulative_sup_diff(A.nu, B.nu),
    }


__all__ = [
    "InconsistentU",
    "InvalidState",
    "eulerian_sup_diff",
    "is_relabelling_of",
    "relabelling_candidate",
    "relabelling_report",
    "to_eulerian",
    "to_lagrangian",
]
