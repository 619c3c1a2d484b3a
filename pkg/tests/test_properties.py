"""Invariants checked along random trajectories and pairs."""

import math

import numpy as np
import pytest

from hsmetric.lagrangian import Relabelling, pi_normalize, relabel
from hsmetric.metric import bounded_lipschitz, compute_G, semi_metric_D
from hsmetric.piecewise import compose, invert, sup_norm_diff
from hsmetric.solver import evolve
from hsmetric.transform import to_eulerian, to_lagrangian

from helpers import perturb_eulerian, random_eulerian, random_relabelling, random_signed_measure

HORIZON = 5.0


def pair(seed):
    rng = np.random.default_rng(seed)
    YA = random_eulerian(rng)
    YB = perturb_eulerian(rng, YA) if seed % 2 else random_eulerian(rng)
    XA, XB = to_lagrangian(YA), to_lagrangian(YB)
    return rng, XA, XB, evolve(XA, HORIZON), evolve(XB, HORIZON)


@pytest.mark.parametrize("seed", range(8))
def test_conservation_along_trajectory(seed):
    rng = np.random.default_rng(seed)
    Y0 = random_eulerian(rng)
    X0 = to_lagrangian(Y0)
    traj = evolve(X0, HORIZON)
    nu0 = Y0.nu.total_mass()
    times = np.union1d(np.linspace(0.0, HORIZON, 21), traj.event_times)
    for t in times:
        X = traj.state_at(t)
        yx, Ux, _, Vx = X.slopes()
        scale = 1.0 + np.abs(Ux) ** 2 + np.abs(yx * Vx)
        assert np.all(np.abs(yx * Vx - Ux**2) <= 1e-10 * scale)
        assert sup_norm_diff(X.H, X0.H) == 0.0
        assert to_eulerian(X).nu.total_mass() == pytest.approx(nu0, abs=1e-10)
    V = [traj.V_inf(t) for t in times]
    assert np.all(np.diff(V) <= 1e-12)


@pytest.mark.parametrize("seed", range(8))
def test_breaking_cells_flatten_at_the_event(seed):
    rng = np.random.default_rng(seed)
    traj = evolve(to_lagrangian(random_eulerian(rng)), HORIZON)
    for te in traj.event_times:
        X = traj.state_before(te)
        mids = 0.5 * (X.grid[:-1] + X.grid[1:])
        hit = np.abs(traj.schedule.at(mids) - te) <= 1e-12 * max(1.0, te)
        yx, Ux, _, _ = X.slopes()
        assert np.all(np.abs(yx[hit]) <= 1e-10)
        assert np.all(np.abs(Ux[hit]) <= 1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_integral_estimates(seed):
    """The y, U, y_xi, U_xi terms are controlled by integrals of the next ones."""
    _, XA, XB, tA, tB = pair(seed)
    ts = np.linspace(0.0, HORIZON, 1001)
    rows = []
    for t in ts:
        A, B = tA.state_at(t), tB.state_at(t)
        G = compute_G(A, B, t)
        r = semi_metric_D(A, B, t)
        rows.append((r.terms["y"], r.terms["U"], r.terms["y_xi"], r.terms["U_xi"], G.dV_l1, G.dV_l2))
    r = np.array(rows)

    def cum(f):
        return np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(ts))])

    assert np.all(r[:, 0] <= r[0, 0] + cum(r[:, 1]) + 1e-8)
    assert np.all(r[:, 1] <= r[0, 1] + 0.25 * cum(r[:, 4]) + 1e-8)
    assert np.all(r[:, 2] <= r[0, 2] + cum(r[:, 3]) + 1e-8)
    assert np.all(r[:, 3] <= r[0, 3] + 0.5 * cum(r[:, 5]) + 1e-8)


@pytest.mark.parametrize("seed", range(10))
def test_normalized_comparison(seed):
    rng, XA, XB, tA, tB = pair(seed)
    Mbar = max(XA.V_inf, XB.V_inf, 1.0)
    for t in (0.5, 1.0, 2.0, 3.0, 5.0):
        A, B = tA.state_at(t), tB.state_at(t)
        PA, f = pi_normalize(A)
        h = random_relabelling(rng)
        w = Relabelling(compose(h.f, invert(f.f)))
        lhs = semi_metric_D(PA, relabel(B, h), t).total
        rhs = math.exp((2 * Mbar + 0.25) * t) * semi_metric_D(A, relabel(B, w), t).total
        assert lhs <= rhs + 1e-10


@pytest.mark.parametrize("seed", range(6))
def test_bounded_lipschitz_triangle(seed):
    rng = np.random.default_rng(seed)
    a, b = random_signed_measure(rng), random_signed_measure(rng)
    assert bounded_lipschitz(a + b) <= bounded_lipschitz(a) + bounded_lipschitz(b) + 1e-6
