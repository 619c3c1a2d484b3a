"""Random admissible data shared by the test modules."""

from __future__ import annotations

import numpy as np

from hsmetric.eulerian import AlphaFn, EulerianY, energy_density
from hsmetric.lagrangian import Relabelling
from hsmetric.piecewise import Measure, PwConstant, PwLinear, SignedMeasure


def random_knots(rng, n, lo=-3.0, hi=3.0, min_gap=0.1):
    while True:
        k = np.sort(rng.uniform(lo, hi, n))
        if n < 2 or np.min(np.diff(k)) >= min_gap:
            return k


def random_alpha(rng, kind=None, max_lip=2.0) -> AlphaFn:
    kind = kind or rng.choice(["constant", "pw", "pw", "one"], p=[0.35, 0.25, 0.25, 0.15])
    if kind == "one":
        return AlphaFn.one()
    if kind == "constant":
        return AlphaFn.constant(float(rng.uniform(0.0, 0.95)))
    n = int(rng.integers(2, 5))
    k = random_knots(rng, n, -4.0, 4.0, 0.5)
    v = rng.uniform(0.0, 0.95, n)
    # keep the Lipschitz bound: clip the slopes by walking from the left
    for i in range(1, n):
        h = k[i] - k[i - 1]
        v[i] = np.clip(v[i], v[i - 1] - max_lip * h, v[i - 1] + max_lip * h)
    return AlphaFn.pw(k, np.clip(v, 0.0, 0.95))


def random_eulerian(rng, alpha: AlphaFn | None = None, n_max=10, mass_max=4.0, atom_max=1.0, extra_nu=True) -> EulerianY:
    """A valid Eulerian state: u piecewise linear, mu = u_x^2 dx + atoms, nu >= mu."""
    alpha = alpha if alpha is not None else random_alpha(rng)
    n = int(rng.integers(2, n_max + 1))
    k = random_knots(rng, n)
    s = rng.uniform(-1.5, 1.5, n - 1)
    s[rng.random(n - 1) < 0.15] = 0.0
    h = np.diff(k)
    mass = float(np.sum(s * s * h))
    if mass > mass_max:
        s *= np.sqrt(mass_max / mass)
    u0 = rng.uniform(-1.0, 1.0)
    u = PwLinear(k, u0 + np.concatenate([[0.0], np.cumsum(s * h)]))
    dens = energy_density(u)

    atoms = []
    if not alpha.is_one and rng.random() < 0.6:
        na = int(rng.integers(1, 3))
        w = rng.dirichlet(np.ones(na)) * rng.uniform(0.1, atom_max)
        atoms = [(float(x), float(m)) for x, m in zip(rng.uniform(k[0], k[-1], na), w)]
    mu = Measure(dens, [a[0] for a in atoms], [a[1] for a in atoms])
    if not extra_nu or rng.random() < 0.3:
        return EulerianY(u, mu, mu, alpha)

    if alpha.is_one:
        # nu_ac = mu; the singular part of nu is free
        xs = rng.uniform(k[0] - 0.5, k[-1] + 0.5, int(rng.integers(1, 3)))
        extra = Measure(PwConstant.zero(), xs, rng.uniform(0.05, 0.5, xs.size))
    else:
        pos = (s > 0).astype(float)
        add = pos * rng.uniform(0.0, 1.0, s.size) * (rng.random(s.size) < 0.5)
        ex_atoms = [(x, float(rng.uniform(0.0, 0.5))) for x, _ in atoms if rng.random() < 0.5]
        extra = Measure(
            PwConstant.from_interior(k, add) if np.any(add) else PwConstant.zero(),
            [a[0] for a in ex_atoms],
            [a[1] for a in ex_atoms],
        )
    return EulerianY(u, mu, mu + extra, alpha)


def perturb_eulerian(rng, Y: EulerianY, scale=0.1, alpha: AlphaFn | None = None) -> EulerianY:
    """A nearby valid state: slopes and offset of u nudged, atoms moved."""
    k = Y.u.knots
    h = np.diff(k)
    s = Y.u.cell_slopes() * (1.0 + scale * rng.uniform(-1, 1, h.size)) + scale * rng.uniform(-1, 1, h.size)
    u = PwLinear(k, Y.u.values[0] + scale * rng.uniform(-1, 1) + np.concatenate([[0.0], np.cumsum(s * h)]))
    alpha = Y.alpha if alpha is None else alpha
    atoms = [(x + scale * rng.uniform(-1, 1), m * (1 + scale * rng.uniform(-1, 1))) for x, m in Y.mu.atoms]
    if alpha.is_one:
        atoms = []
    mu = Measure(energy_density(u), [a[0] for a in atoms], [a[1] for a in atoms])
    return EulerianY(u, mu, mu, alpha)


def random_relabelling(rng, lo=-6.0, hi=12.0, n_max=4) -> Relabelling:
    n = int(rng.integers(1, n_max + 1))
    k = random_knots(rng, n, lo, hi, 0.3)
    slopes = np.exp(rng.uniform(-1.0, 1.0, max(n - 1, 0)))
    vals = k[0] + rng.uniform(-0.5, 0.5) + np.concatenate([[0.0], np.cumsum(slopes * np.diff(k))])
    return Relabelling.from_points(k, vals)


def random_signed_measure(rng, n_cells=6, n_atoms=3, lattice=1e-3, span=(-2.0, 2.0)) -> SignedMeasure:
    """Density breakpoints and atoms on a lattice (so brute force can resolve them)."""
    q = lambda a: np.round(np.asarray(a) / lattice) * lattice  # noqa: E731
    nc = int(rng.integers(0, n_cells + 1))
    na = int(rng.integers(0 if nc else 1, n_atoms + 1))
    dens_k, dens_v = [], []
    if nc:
        k = np.unique(q(rng.uniform(*span, nc + 1)))
        if k.size >= 2:
            dens_k = k
            dens_v = rng.uniform(-2.0, 2.0, k.size - 1)
    ax = q(rng.uniform(*span, na))
    am = rng.uniform(-1.5, 1.5, na)
    return SignedMeasure.build(dens_k, dens_v, list(zip(ax, am)))


def brute_force_bl(d: SignedMeasure, lattice=1e-3, pad=1.0) -> float:
    """Max of int phi dd over lattice functions with |phi| <= 1 and slopes in {-1, 0, 1}.

    Dynamic programming over the lattice nodes; phi takes values in multiples of
    ``lattice`` so each step moves the value by at most one unit.
    """
    hull = d.support_hull()
    if hull is None:
        return 0.0
    lo, hi = hull[0] - pad, hull[1] + pad
    n = int(round((hi - lo) / lattice)) + 1
    x = lo + lattice * np.arange(n)
    gain = np.zeros(n)
    rho = d.density(0.5 * (x[:-1] + x[1:]))
    gain[:-1] += 0.5 * rho * lattice
    gain[1:] += 0.5 * rho * lattice
    for ax, am in d.atoms:
        gain[int(round((ax - lo) / lattice))] += am
    K = int(round(1.0 / lattice))
    vals = lattice * np.arange(-K, K + 1)
    best = gain[0] * vals
    for i in range(1, n):
        step = best.copy()
        step[1:] = np.maximum(step[1:], best[:-1])
        step[:-1] = np.maximum(step[:-1], best[1:])
        best = step + gain[i] * vals
    return float(best.max())


_PERMS: dict = {}


def chain_enumeration(T: np.ndarray) -> np.ndarray:
    """Minimum of F summed along every simple chain i -> ... -> j.

    Revisiting a point never shortens a chain when F >= 0, so simple chains
    cover all cases.
    """
    from itertools import permutations

    n = T.shape[0]
    out = T.copy()
    for i in range(n):
        for j in range(i + 1, n):
            mid = [k for k in range(n) if k not in (i, j)]
            best = T[i, j]
            for k in range(1, len(mid) + 1):
                key = (len(mid), k)
                if key not in _PERMS:
                    _PERMS[key] = np.array(list(permutations(range(len(mid)), k)), dtype=int)
                p = np.asarray(mid)[_PERMS[key]]
                cost = T[i, p[:, 0]] + T[p[:, -1], j]
                for a in range(k - 1):
                    cost = cost + T[p[:, a], p[:, a + 1]]
                best = min(best, float(cost.min()))
            out[i, j] = out[j, i] = best
    return out


def random_dyadic_table(rng, n, metric=False):
    """Symmetric nonnegative table with dyadic entries (sums are exact in floating point)."""
    if metric:
        pts = rng.integers(-64, 64, size=(n, 2)) / 8.0
        return np.abs(pts[:, None, :] - pts[None, :, :]).sum(axis=2)
    T = rng.integers(0, 256, size=(n, n)) / 16.0
    T = np.triu(T, 1)
    return T + T.T
