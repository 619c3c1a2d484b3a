import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsmetric import golden
from hsmetric.eulerian import AlphaFn
from hsmetric.lagrangian import (
    LagrangianX,
    Relabelling,
    in_F0,
    lag_comparison_norm,
    pi_normalize,
    relabel,
    validate_lagrangian,
)
from hsmetric.piecewise import NotMonotone, PwLinear, sup_norm_diff
from hsmetric.transform import to_lagrangian

from helpers import random_eulerian, random_relabelling


def same(XA, XB, tol=1e-10):
    return max(sup_norm_diff(getattr(XA, n), getattr(XB, n)) for n in "yUHV") <= tol


def test_adiss_initial_tuple_valid_and_normalized():
    X = golden.adiss_lagrangian(0.0)
    rep = validate_lagrangian(X)
    assert rep.ok, rep.lines()
    assert in_F0(X)


def test_V_above_H_is_a_violation():
    xi = [0.0, 1.0]
    X = LagrangianX.from_arrays(xi, [0.0, 0.5], [0.0, 0.5], [0.0, 0.5], [0.0, 1.0], AlphaFn.constant(0.5))
    assert "0 <= V_xi <= H_xi" in validate_lagrangian(X).names()


def test_alphfn1_roundtrip_state_is_normalized():
    Xbar = golden.alphfn1_xbar()
    rep = validate_lagrangian(Xbar, check_alpha=False)
    assert rep.ok, rep.lines()
    assert in_F0(Xbar)


def test_decreasing_y_is_a_violation():
    X = LagrangianX.from_arrays([0.0, 1.0], [0.0, -0.5], [0.0, 0.0], [0.0, 1.5], [0.0, 0.0], AlphaFn.constant(0.5))
    assert "y_xi >= 0" in validate_lagrangian(X).names()


def test_pi_normalize_on_F0_is_identity():
    X = golden.adiss_lagrangian(0.0)
    P, f = pi_normalize(X)
    assert same(P, X, 1e-14)
    xs = np.linspace(-5, 5, 11)
    assert np.max(np.abs(f(xs) - xs)) <= 1e-14


@pytest.mark.parametrize("seed", range(10))
def test_pi_normalize_idempotent_and_class_invariant(seed):
    rng = np.random.default_rng(seed)
    X = to_lagrangian(random_eulerian(rng))
    Xf = relabel(X, random_relabelling(rng))
    P1, _ = pi_normalize(Xf)
    assert in_F0(P1)
    P2, r = pi_normalize(P1)
    assert same(P1, P2)
    P0, _ = pi_normalize(X)
    assert same(P0, P1, 1e-9)


def test_relabel_group_action():
    rng = np.random.default_rng(3)
    X = to_lagrangian(random_eulerian(rng))
    f, g = random_relabelling(rng), random_relabelling(rng)
    lhs = relabel(relabel(X, f), g)
    rhs = relabel(X, f.then(g))
    assert same(lhs, rhs)
    assert same(relabel(X, Relabelling.identity()), X, 0.0)
    assert same(relabel(relabel(X, f), f.inverse()), X)


def test_relabel_rejects_non_increasing():
    X = golden.adiss_lagrangian(0.0)
    with pytest.raises(NotMonotone):
        relabel(X, PwLinear.from_points([0.0, 1.0], [1.0, 0.5], 1))


def test_comparison_norm_of_two_nu_pair():
    XA, XB = golden.nu_lagrangian0()
    xi = np.linspace(-3.0, 12.0, 30001)
    xi = np.union1d(xi, [-1.0, 0.0, 1.0, 2.0, 3.0, 4.0, 4.5, 5.0, 6.5, 9.0])
    oracle = sum(c * np.max(np.abs(getattr(XA, n)(xi) - getattr(XB, n)(xi))) for n, c in zip("yUHV", (1, 1, 1, 0.25)))
    assert sup_norm_diff(XA.H, XB.H) == pytest.approx(4.0)
    assert lag_comparison_norm(XA, XB) == pytest.approx(oracle, abs=1e-12)


def test_comparison_norm_zero_on_equal():
    X = golden.adiss_lagrangian(1.0)
    assert lag_comparison_norm(X, X) == 0.0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_relabelled_states_stay_valid(seed):
    rng = np.random.default_rng(seed)
    X = to_lagrangian(random_eulerian(rng))
    Y = relabel(X, random_relabelling(rng))
    rep = validate_lagrangian(Y)
    assert rep.ok, rep.lines()
