"""Worked examples with exact solutions.

Four small problems whose solutions are known in closed form.  They are used
by ``hs example`` and by the test-suite as regression data.

* ``exmp1``: a tent profile that breaks once at (t, x) = (2, 2).
* ``adiss``: two symmetric ramps breaking at t = 2 at x = -1 and x = 1.
* ``alphfn1``: two breaking events, the first with full dissipation.  Its
  dissipation coefficient takes the value 1 somewhere, so it lies outside the
  admissible class on purpose.
* ``nu_invariance``: one (u, mu) with two different dominating measures nu.

Closed forms are written piecewise on the intervals
``(-inf, b0], (b0, b1], ..., (b_{n-1}, inf)``.
"""

from __future__ import annotations

import numpy as np

from .eulerian import AlphaFn, EulerianY, energy_density
from .lagrangian import LagrangianX
from .piecewise import Measure, PwLinear

# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def pieces(x, breaks, fns):
    """Evaluate a function given by one callable per interval."""
    x = np.asarray(x, dtype=float)
    idx = np.searchsorted(np.asarray(breaks, dtype=float), x, side="left")
    out = np.empty_like(x)
    for k, fn in enumerate(fns):
        m = idx == k
        if np.any(m):
            out[m] = fn(x[m]) * np.ones(int(m.sum()))
    return out


def _state(u_knots, u_vals, alpha, atoms_mu=(), extra_nu=None):
    u = PwLinear(u_knots, u_vals)
    dens = energy_density(u)
    mu = Measure(dens, [a[0] for a in atoms_mu], [a[1] for a in atoms_mu])
    nu = mu if extra_nu is None else extra_nu(mu)
    return EulerianY(u, mu, nu, alpha)


def _lag(breaks, y, U, H, V, alpha):
    """LagrangianX from closed-form callables; knots at ``breaks``."""
    g = np.asarray(breaks, dtype=float)
    return LagrangianX.from_arrays(g, y(g), U(g), H(g), V(g), alpha)


# ---------------------------------------------------------------------------
# exmp1: tent
# ---------------------------------------------------------------------------

EXMP1_ALPHA = AlphaFn.constant(0.5)


def exmp1_state(alpha: AlphaFn | None = None, shift: float = 0.0) -> EulerianY:
    k = np.array([-1.0, 0.0, 1.0]) + shift
    return _state(k, [0.0, 1.0, 0.0], EXMP1_ALPHA if alpha is None else alpha)


def exmp1_u(x, t: float):
    x = np.asarray(x, dtype=float)
    if t <= 2.0:
        b = [-(t**2) / 4 - 1, t, t**2 / 4 + 1]
        fns = [
            lambda x: -t / 2 + 0 * x,
            lambda x: (2 - t + 2 * x) / (t + 2),
            lambda x: (-2 - t + 2 * x) / (t - 2) if t != 2 else np.ones_like(x),
            lambda x: t / 2 + 0 * x,
        ]
    else:
        b = [-3 * t**2 / 16 - t / 4 - 0.75, t**2 / 16 + 0.75 * t + 0.25, 3 * t**2 / 16 + t / 4 + 0.75]
        fns = [
            lambda x: -0.25 - 3 * t / 8 + 0 * x,
            lambda x: (2 - t + 4 * x) / (2 * (t + 2)),
            lambda x: (-2 - t + 2 * x) / (t - 2),
            lambda x: 0.25 + 3 * t / 8 + 0 * x,
        ]
    return pieces(x, b, fns)


# ---------------------------------------------------------------------------
# adiss: two ramps, alpha only matters at x = -1 and x = 1
# ---------------------------------------------------------------------------

ADISS_ALPHA_A = AlphaFn.constant(1.0 / 3.0)
# equal to 1/3 at both breaking points, different elsewhere
ADISS_ALPHA_B = AlphaFn.pw([-3.0, -1.0, 0.0, 1.0, 3.0], [0.6, 1.0 / 3.0, 0.1, 1.0 / 3.0, 0.6])


def adiss_state(alpha: AlphaFn | None = None) -> EulerianY:
    return _state([-2.0, -1.0, 1.0, 2.0], [1.0, 0.0, 0.0, -1.0], ADISS_ALPHA_A if alpha is None else alpha)


ADISS_BREAKS = [-2.0, 0.0, 2.0, 4.0]


def adiss_y(xi, t):
    if t < 2:
        fns = [
            lambda s: t - t * t / 4 + s,
            lambda s: -1 + (t - 2) ** 2 * s / 8,
            lambda s: -1 + s,
            lambda s: t - t * t / 4 + (t - 2) ** 2 * s / 8,
            lambda s: -2 - t + t * t / 4 + s,
        ]
    else:
        fns = [
            lambda s: 1 / 3 + 2 * t / 3 - t * t / 6 + s,
            lambda s: -1 + (t - 2) ** 2 * s / 12,
            lambda s: -1 + s,
            lambda s: 1 / 3 + 2 * t / 3 - t * t / 6 + (t - 2) ** 2 * s / 12,
            lambda s: -7 / 3 - 2 * t / 3 + t * t / 6 + s,
        ]
    return pieces(xi, ADISS_BREAKS, fns)


def adiss_U(xi, t):
    if t < 2:
        fns = [
            lambda s: 1 - t / 2 + 0 * s,
            lambda s: (t - 2) * s / 4,
            lambda s: 0 * s,
            lambda s: 1 - t / 2 + (t - 2) * s / 4,
            lambda s: -1 + t / 2 + 0 * s,
        ]
    else:
        fns = [
            lambda s: 2 / 3 - t / 3 + 0 * s,
            lambda s: (t - 2) * s / 6,
            lambda s: 0 * s,
            lambda s: 2 / 3 - t / 3 + (t - 2) * s / 6,
            lambda s: -2 / 3 + t / 3 + 0 * s,
        ]
    return pieces(xi, ADISS_BREAKS, fns)


def adiss_H(xi):
    return pieces(xi, ADISS_BREAKS, [lambda s: 0 * s, lambda s: 1 + s / 2, lambda s: 1 + 0 * s, lambda s: s / 2, lambda s: 2 + 0 * s])


def adiss_V(xi, t):
    if t < 2:
        return adiss_H(xi)
    return pieces(
        xi,
        ADISS_BREAKS,
        [lambda s: 0 * s, lambda s: 2 / 3 + s / 3, lambda s: 2 / 3 + 0 * s, lambda s: s / 3, lambda s: 4 / 3 + 0 * s],
    )


def adiss_lagrangian(t: float = 0.0, alpha: AlphaFn | None = None) -> LagrangianX:
    a = ADISS_ALPHA_A if alpha is None else alpha
    return _lag(ADISS_BREAKS, lambda s: adiss_y(s, t), lambda s: adiss_U(s, t), adiss_H, lambda s: adiss_V(s, t), a)


# ---------------------------------------------------------------------------
# alphfn1: two events, full then half dissipation
# ---------------------------------------------------------------------------

# takes the value 1 at x = 13/16, hence not admissible; used only to show
# what goes wrong in that case
ALPHFN1_ALPHA = AlphaFn.pw([13.0 / 16.0, 1.0], [1.0, 0.5])
ALPHFN1_BREAKS = [0.0, 1.0, 3.5]


def alphfn1_state() -> EulerianY:
    return _state([0.0, 0.5, 1.0], [1.0, 0.5, -0.5], ALPHFN1_ALPHA)


def alphfn1_y(xi, t):
    if t < 1:
        fns = [
            lambda s: -5 * t * t / 16 + t + s,
            lambda s: -5 * t * t / 16 + t + (t - 2) ** 2 * s / 8,
            lambda s: 0.3 + 0.9 * t - 31 * t * t / 80 + (t - 1) ** 2 * s / 5,
            lambda s: -2.5 - t / 2 + 5 * t * t / 16 + s,
        ]
    elif t < 2:
        fns = [
            lambda s: 0.25 + t / 2 - t * t / 16 + s,
            lambda s: 0.25 + t / 2 - t * t / 16 + (t - 2) ** 2 * s / 8,
            lambda s: 0.75 + t * t / 16 + 0 * s,
            lambda s: -11 / 4 + t * t / 16 + s,
        ]
    else:
        fns = [
            lambda s: 3 / 8 + 3 * t / 8 - t * t / 32 + s,
            lambda s: 3 / 8 + 3 * t / 8 - t * t / 32 + (t - 2) ** 2 * s / 16,
            lambda s: 5 / 8 + t / 8 + t * t / 32 + 0 * s,
            lambda s: -23 / 8 + t / 8 + t * t / 32 + s,
        ]
    return pieces(xi, ALPHFN1_BREAKS, fns)


def alphfn1_U(xi, t):
    if t < 1:
        fns = [
            lambda s: 1 - 5 * t / 8 + 0 * s,
            lambda s: 1 - 5 * t / 8 + (t - 2) * s / 4,
            lambda s: 0.4 * (t - 1) * s + 0.9 - 31 * t / 40,
            lambda s: -0.5 + 5 * t / 8 + 0 * s,
        ]
    elif t < 2:
        fns = [
            lambda s: 0.5 - t / 8 + 0 * s,
            lambda s: 0.5 - t / 8 + (t - 2) * s / 4,
            lambda s: t / 8 + 0 * s,
            lambda s: t / 8 + 0 * s,
        ]
    else:
        fns = [
            lambda s: 3 / 8 - t / 16 + 0 * s,
            lambda s: 3 / 8 - t / 16 + (t - 2) * s / 8,
            lambda s: 1 / 8 + t / 16 + 0 * s,
            lambda s: 1 / 8 + t / 16 + 0 * s,
        ]
    return pieces(xi, ALPHFN1_BREAKS, fns)


def alphfn1_H(xi):
    return pieces(xi, ALPHFN1_BREAKS, [lambda s: 0 * s, lambda s: s / 2, lambda s: -0.3 + 0.8 * s, lambda s: 2.5 + 0 * s])


def alphfn1_V(xi, t):
    if t < 1:
        return alphfn1_H(xi)
    c = 0.5 if t < 2 else 0.25
    return pieces(xi, ALPHFN1_BREAKS, [lambda s: 0 * s, lambda s: c * s, lambda s: c + 0 * s, lambda s: c + 0 * s])


def alphfn1_xbar() -> LagrangianX:
    """The state obtained at t = 2 after mapping to Eulerian variables and back."""
    b = [1.0, 3.5]
    return _lag(
        b,
        lambda s: pieces(s, b, [lambda z: z, lambda z: 1 + 0 * z, lambda z: z - 2.5]),
        lambda s: 0.25 + 0 * s,
        lambda s: pieces(s, b, [lambda z: 0 * z, lambda z: z - 1, lambda z: 2.5 + 0 * z]),
        lambda s: pieces(s, b, [lambda z: 0 * z, lambda z: (z - 1) / 10, lambda z: 0.25 + 0 * z]),
        ALPHFN1_ALPHA,
    )


def alphfn1_matching_f() -> PwLinear:
    """Map matching y and V of the two states at t = 2; it is flat on (1, 7/2)."""
    return PwLinear.from_points([0.0, 1.0, 3.5], [1.0, 3.5, 3.5], 1)


# ---------------------------------------------------------------------------
# nu_invariance: same (u, mu), two nu
# ---------------------------------------------------------------------------

NU_ALPHA = AlphaFn.constant(0.5)


def nu_invariance_states() -> tuple[EulerianY, EulerianY]:
    atoms = [(-0.5, 1.0), (0.5, 1.0)]
    A = _state([-1.0, 0.0, 1.0], [1.0, 0.0, 1.0], NU_ALPHA, atoms)

    def bump(mu):
        extra = Measure.build([0.0, 1.0], [3.0], [(0.5, 1.0)])
        return mu + extra

    B = _state([-1.0, 0.0, 1.0], [1.0, 0.0, 1.0], NU_ALPHA, atoms, bump)
    return A, B


NU_BREAKS_A = [-1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0]
NU_BREAKS_B = [-1.0, 0.0, 1.0, 2.0, 4.5, 6.5, 9.0]


def nu_lagrangian0() -> tuple[LagrangianX, LagrangianX]:
    """Initial Lagrangian data of both variants."""
    bA = [-1.0, 0.0, 1.0, 3.0, 4.0, 5.0]
    bB = [-1.0, 0.0, 1.0, 2.0, 4.5, 6.5, 9.0]
    yA = lambda s: pieces(s, bA, [lambda z: z, lambda z: -0.5 + z / 2, lambda z: -0.5 + 0 * z, lambda z: -1 + z / 2, lambda z: 0.5 + 0 * z, lambda z: -1.5 + z / 2, lambda z: z - 4])
    UA = lambda s: pieces(s, [-1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0], [lambda z: 1 + 0 * z, lambda z: 0.5 - z / 2, lambda z: 0.5 + 0 * z, lambda z: 1 - z / 2, lambda z: -1 + z / 2, lambda z: 0.5 + 0 * z, lambda z: -1.5 + z / 2, lambda z: 1 + 0 * z])
    HA = lambda s: pieces(s, bA, [lambda z: 0 * z, lambda z: 0.5 + z / 2, lambda z: 0.5 + z, lambda z: 1 + z / 2, lambda z: -0.5 + z, lambda z: 1.5 + z / 2, lambda z: 4 + 0 * z])
    yB = lambda s: pieces(s, bB, [lambda z: z, lambda z: -0.5 + z / 2, lambda z: -0.5 + 0 * z, lambda z: -1 + z / 2, lambda z: -0.4 + z / 5, lambda z: 0.5 + 0 * z, lambda z: -0.8 + z / 5, lambda z: z - 8])
    UB = lambda s: pieces(s, bB, [lambda z: 1 + 0 * z, lambda z: 0.5 - z / 2, lambda z: 0.5 + 0 * z, lambda z: 1 - z / 2, lambda z: -0.4 + z / 5, lambda z: 0.5 + 0 * z, lambda z: -0.8 + z / 5, lambda z: 1 + 0 * z])
    HB = lambda s: pieces(s, bB, [lambda z: 0 * z, lambda z: 0.5 + z / 2, lambda z: 0.5 + z, lambda z: 1 + z / 2, lambda z: 0.4 + 0.8 * z, lambda z: -0.5 + z, lambda z: 0.8 + 0.8 * z, lambda z: 8 + 0 * z])
    VB = lambda s: pieces(s, bB, [lambda z: 0 * z, lambda z: 0.5 + z / 2, lambda z: 0.5 + z, lambda z: 1 + z / 2, lambda z: 1.6 + z / 5, lambda z: 0.25 + z / 2, lambda z: 2.2 + z / 5, lambda z: 4 + 0 * z])
    gA = sorted(set(bA) | {2.0})
    XA = _lag(gA, yA, UA, HA, HA, NU_ALPHA)
    XB = _lag(bB, yB, UB, HB, VB, NU_ALPHA)
    return XA, XB


def nu_V_A(xi, t):
    """V of the first variant for t >= 2."""
    assert t >= 2
    return pieces(
        xi,
        NU_BREAKS_A,
        [
            lambda z: 0 * z,
            lambda z: 0.25 + z / 4,
            lambda z: 0.25 + z,
            lambda z: 1 + z / 4,
            lambda z: 0.5 + z / 2,
            lambda z: -1 + z,
            lambda z: 1 + z / 2,
            lambda z: 3.5 + 0 * z,
        ],
    )


def nu_V_B(xi, t):
    """V of the second variant for t >= 2."""
    assert t >= 2
    return pieces(
        xi,
        NU_BREAKS_B,
        [
            lambda z: 0 * z,
            lambda z: 0.25 + z / 4,
            lambda z: 0.25 + z,
            lambda z: 1 + z / 4,
            lambda z: 1.1 + z / 5,
            lambda z: -0.25 + z / 2,
            lambda z: 1.7 + z / 5,
            lambda z: 3.5 + 0 * z,
        ],
    )


def nu_u(x, t):
    """Common velocity of both variants (t > 0)."""
    if t < 2:
        b = [
            -1 + t - t * t / 2,
            -0.5 + t / 2 - 3 * t * t / 8,
            -0.5 + t / 2 - t * t / 8,
            0.0,
            0.5 + t / 2 + t * t / 8,
            0.5 + t / 2 + 3 * t * t / 8,
            1 + t + t * t / 2,
        ]
        fns = [
            lambda x: 1 - t + 0 * x,
            lambda x: (t + 2 * x) / (t - 2),
            lambda x: (2 - t + 4 * x) / (2 * t),
            lambda x: 2 * x / (t - 2),
            lambda x: 2 * x / (t + 2),
            lambda x: (-2 - t + 4 * x) / (2 * t),
            lambda x: (t + 2 * x) / (t + 2),
            lambda x: 1 + t + 0 * x,
        ]
    else:
        b = [
            -0.75 + 0.75 * t - 7 * t * t / 16,
            -0.5 + t / 2 - 3 * t * t / 8,
            -0.5 + t / 2 - t * t / 8,
            -0.25 + t / 4 - t * t / 16,
            0.25 + 0.75 * t + t * t / 16,
            0.25 + 0.75 * t + 5 * t * t / 16,
            0.75 + 1.25 * t + 7 * t * t / 16,
        ]
        fns = [
            lambda x: 0.75 - 7 * t / 8 + 0 * x,
            lambda x: (t + 2 * x) / (t - 2),
            lambda x: (2 - t + 4 * x) / (2 * t),
            lambda x: 2 * x / (t - 2),
            lambda x: (2 - t + 4 * x) / (2 * (t + 2)),
            lambda x: (-2 - 3 * t + 8 * x) / (4 * t),
            lambda x: (2 + t + 4 * x) / (2 * (t + 2)),
            lambda x: 1.25 + 7 * t / 8 + 0 * x,
        ]
    return pieces(x, b, fns)


EXAMPLES = ("exmp1", "adiss", "alphfn1", "nu-invariance")
