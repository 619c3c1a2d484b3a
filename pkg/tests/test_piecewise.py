import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hsmetric import golden
from hsmetric.piecewise import (
    IDENTITY,
    Measure,
    NotInvertible,
    NotMonotone,
    PiecewiseError,
    PwConstant,
    PwLinear,
    SignedMeasure,
    Unbounded,
    common_refinement,
    compose,
    cumulative_sup_diff,
    invert,
    l1_norm,
    l2_norm,
    pushforward,
    pw_eval,
    sup_norm,
    sup_norm_diff,
)
from hsmetric.transform import to_lagrangian


def increasing(draw_knots, draw_slopes, x0=0.0):
    k = np.cumsum(np.concatenate([[x0], draw_knots]))
    v = k[0] + np.concatenate([[0.0], np.cumsum(np.asarray(draw_slopes) * np.diff(k))])
    return PwLinear.from_points(k, v, 1)


gaps = st.lists(st.floats(0.1, 2.0), min_size=1, max_size=6)
slopes = st.floats(0.2, 5.0)


# --- evaluation -------------------------------------------------------------


def test_eval_adiss_u0():
    u0 = golden.adiss_state().u
    assert pw_eval(u0, -1.5) == pytest.approx(0.5, abs=1e-15)
    assert pw_eval(u0, 5.0) == -1.0
    assert pw_eval(u0, -7.0) == 1.0


def test_eval_constant():
    c = PwLinear.constant(2.5)
    assert np.all(c(np.array([-100.0, 0.0, 3.0])) == 2.5)


def test_eval_adiss_y0_at_minus_one():
    # on (-2, 0] the initial characteristic is -1 + xi/2
    X = to_lagrangian(golden.adiss_state())
    assert X.y(-1.0) == pytest.approx(-1.5, abs=1e-14)
    assert X.y(-2.0) == pytest.approx(-2.0, abs=1e-14)


def test_identity_part_is_kept_outside_knots():
    f = PwLinear([0.0, 1.0], [0.0, 2.0], 1)
    assert f(-3.0) == -3.0
    assert f(5.0) == 7.0


def test_bad_construction():
    with pytest.raises(PiecewiseError):
        PwLinear([0.0, 0.0], [1.0, 2.0])
    with pytest.raises(PiecewiseError):
        PwLinear([0.0, 1.0], [1.0])
    with pytest.raises(PiecewiseError):
        PwLinear([0.0, 1.0], [1.0, np.nan])
    with pytest.raises(PiecewiseError):
        PwConstant([0.0, 1.0], [0.0, 1.0])


# --- grids ------------------------------------------------------------------


def test_common_refinement():
    assert common_refinement([0, 1], [1, 2]).tolist() == [0.0, 1.0, 2.0]
    assert common_refinement([0], []).tolist() == [0.0]
    assert common_refinement([0, 1e-15], [0]).tolist() == [0.0]
    assert common_refinement().size == 0


# --- composition and inversion -------------------------------------------------


def test_compose_identity():
    f = PwLinear([0.0, 1.0, 2.0], [1.0, -1.0, 0.5])
    assert sup_norm_diff(compose(f, IDENTITY), f) == 0.0


def test_invert_identity():
    g = invert(IDENTITY)
    assert g.idc == 1 and sup_norm(PwLinear(g.knots, g.values)) == 0.0


def test_invert_y_plus_H_of_normalized_state():
    X = to_lagrangian(golden.adiss_state())
    r = invert(X.y + X.H)
    assert np.max(np.abs(r.values)) <= 1e-14


def test_invert_rejects_flat():
    with pytest.raises(NotInvertible):
        invert(PwLinear.from_points([0.0, 1.0], [0.0, 0.0], 1))


def test_compose_rejects_decreasing_inner():
    f = PwLinear([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(NotMonotone):
        compose(f, PwLinear.from_points([0.0, 1.0], [1.0, 0.0], 1))


@settings(max_examples=60, deadline=None)
@given(gaps, st.lists(slopes, min_size=6, max_size=6), st.floats(-3, 3))
def test_invert_round_trip(g, s, x0):
    f = increasing(g, s[: len(g)], x0)
    finv = invert(f)
    xs = np.linspace(x0 - 5, x0 + sum(g) + 5, 97)
    assert np.max(np.abs(finv(f(xs)) - xs)) <= 1e-10
    assert np.max(np.abs(f(finv(xs)) - xs)) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(gaps, st.lists(slopes, min_size=6, max_size=6), st.lists(st.floats(-2, 2), min_size=4, max_size=4))
def test_compose_pointwise(g, s, vals):
    r = increasing(g, s[: len(g)], -1.0)
    f = PwLinear([-1.0, 0.0, 0.5, 2.0], vals)
    h = compose(f, r)
    xs = np.linspace(-4, sum(g) + 3, 131)
    assert np.max(np.abs(h(xs) - f(r(xs)))) <= 1e-12


# --- norms ----------------------------------------------------------------------


def test_sup_norms():
    f = PwLinear([0.0, 1.0], [1.0, -3.0])
    assert sup_norm_diff(f, f) == 0.0
    assert sup_norm(f) == 3.0
    with pytest.raises(Unbounded):
        sup_norm(IDENTITY)
    with pytest.raises(Unbounded):
        sup_norm_diff(f, IDENTITY)


def test_l2_of_step():
    h = PwConstant.from_interior([0.0, 0.5], [2.0])
    assert l2_norm(h) == pytest.approx(np.sqrt(2.0), abs=1e-15)


def test_norms_need_compact_support():
    with pytest.raises(Unbounded):
        l1_norm(PwConstant([0.0], [1.0, 0.0]))
    with pytest.raises(Unbounded):
        l2_norm(PwLinear([0.0, 1.0], [1.0, 1.0]))


@pytest.mark.parametrize("seed", range(10))
def test_linear_norms_against_quadrature(seed):
    rng = np.random.default_rng(seed)
    k = np.sort(rng.uniform(-3, 3, 7))
    v = rng.uniform(-2, 2, 7)
    v[0] = v[-1] = 0.0
    h = PwLinear(k, v)
    l1 = sum(quad(lambda x: abs(h(x)), a, b)[0] for a, b in zip(k[:-1], k[1:]))
    l2 = np.sqrt(sum(quad(lambda x: h(x) ** 2, a, b)[0] for a, b in zip(k[:-1], k[1:])))
    assert l1_norm(h) == pytest.approx(l1, rel=1e-9)
    assert l2_norm(h) == pytest.approx(l2, rel=1e-9)


# --- measures and pushforward ---------------------------------------------------


def test_measure_cumulative():
    m = Measure.build([0.0, 2.0], [0.5], [(1.0, 3.0)])
    assert m.cumulative(1.0) == pytest.approx(0.5)
    assert m.cumulative(1.0, closed=True) == pytest.approx(3.5)
    assert m.cumulative(10.0) == pytest.approx(4.0)
    assert m.total_mass() == pytest.approx(4.0)


def test_measure_rejects_negative():
    with pytest.raises(PiecewiseError):
        Measure.build([0.0, 1.0], [-1.0])
    with pytest.raises(PiecewiseError):
        Measure.build(atoms=[(0.0, -1.0)])


def test_atoms_merge_within_tol():
    m = SignedMeasure.build(atoms=[(1.0, 1.0), (1.0 + 1e-15, 2.0)])
    assert m.atoms == [(1.0, 3.0)]


def test_cumulative_diff_ignores_rounding_of_atom_positions():
    a = Measure.build(atoms=[(2.0, 0.5)])
    b = Measure.build(atoms=[(2.0 + 4e-16, 0.5)])
    assert cumulative_sup_diff(a, b) == 0.0
    c = Measure.build(atoms=[(2.1, 0.5)])
    assert cumulative_sup_diff(a, c) == pytest.approx(0.5)


def test_pushforward_identity():
    w = PwConstant.from_interior([0.0, 1.0, 3.0], [2.0, 0.5])
    m = pushforward(IDENTITY, w)
    assert not m.atoms
    assert m.density(np.array([0.5, 2.0])).tolist() == [2.0, 0.5]


def test_pushforward_flat_cell_gives_atom():
    y = PwLinear.from_points([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 1.0, 2.0], 1)
    w = PwConstant.from_interior([0.0, 1.0, 2.0, 3.0], [1.0, 0.75, 1.0])
    m = pushforward(y, w)
    assert len(m.atoms) == 1
    assert m.atoms[0][0] == pytest.approx(1.0)
    assert m.atoms[0][1] == pytest.approx(0.75)


@settings(max_examples=60, deadline=None)
@given(gaps, st.lists(st.floats(0.0, 4.0), min_size=6, max_size=6), st.lists(st.floats(0.0, 3.0), min_size=6, max_size=6))
def test_pushforward_conserves_mass(g, s, w):
    k = np.cumsum(np.concatenate([[0.0], g]))
    n = k.size - 1
    y = PwLinear.from_points(k, np.concatenate([[0.0], np.cumsum(np.asarray(s[:n]) * np.diff(k))]), 1)
    weight = PwConstant.from_interior(k, w[:n])
    assert pushforward(y, weight).total_mass() == pytest.approx(weight.integral(), abs=1e-12)
