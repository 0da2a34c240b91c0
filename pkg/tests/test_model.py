import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from artifact.model import (
    Bistable,
    Custom,
    Grid,
    ModelParams,
    Monostable,
    ParameterError,
    SimState,
    evaluate_E,
    evaluate_E_prime,
    evaluate_E_tilde,
    validate_params,
    xlogx,
)


def test_grid_geometry():
    g = Grid(401)
    assert g.x[0] == -1.0 and g.x[-1] == 1.0
    assert np.all(np.diff(g.x) > 0)
    np.testing.assert_allclose(np.diff(g.x), g.h, rtol=1e-12)
    assert g.h * (g.n - 1) == pytest.approx(2.0, abs=1e-15)
    assert g.integrate(np.ones(g.n)) == pytest.approx(2.0, abs=1e-14)


def test_grid_rejects_small():
    with pytest.raises(ParameterError):
        Grid(2)


def test_grid_check_rejects_bad_fields():
    g = Grid(5)
    with pytest.raises(ParameterError):
        g.check(np.zeros(4))
    with pytest.raises(ParameterError):
        g.check(np.array([0, 1, np.nan, 0, 0]))


@pytest.mark.parametrize("law,u,expected", [
    (Monostable(), 1.0, 0.0),
    (Bistable(0.3), 0.3, 0.0),
    (Bistable(0.3), 0.5, 0.1),
])
def test_evaluate_E(law, u, expected):
    np.testing.assert_allclose(evaluate_E(law, np.full(7, u)), expected, atol=1e-15)


@pytest.mark.parametrize("law,u,expected", [
    (Monostable(), 0.37, -1.0),
    (Bistable(0.3), 0.65, 0.0),
    (Bistable(0.3), 0.0, 1.3),
])
def test_evaluate_E_prime(law, u, expected):
    out = evaluate_E_prime(law, np.full(7, u))
    assert out.shape == (7,)
    np.testing.assert_allclose(out, expected, atol=1e-15)


def test_E_tilde():
    u = np.linspace(0, 2, 9)
    np.testing.assert_allclose(evaluate_E_tilde(Monostable(), u), u * (1 - u))


@pytest.mark.parametrize("law", [
    Monostable(),
    Bistable(0.3),
    Bistable(0.8),
    Custom(np.sin, np.cos, lambda u: -np.sin(u)),
])
def test_derivative_matches_central_difference(law):
    rng = np.random.default_rng(3)
    u = rng.uniform(0, 2, 100)
    step = 1e-6
    fd = (evaluate_E(law, u + step) - evaluate_E(law, u - step)) / (2 * step)
    exact = evaluate_E_prime(law, u)
    err = np.abs(fd - exact) / np.maximum(np.abs(exact), 1.0)
    assert err.max() <= 1e-5


@given(st.floats(0.01, 0.99), st.floats(0.0, 3.0))
def test_bistable_sign(a, u):
    e = Bistable(a).E(u)
    if a < u < 1:
        assert e > 0
    else:
        assert e <= 0


@given(st.floats(0.0, 50.0))
def test_monostable_logistic_bound(u):
    assert u * Monostable().E(u) <= 1.0


def test_validate_params_ok():
    validate_params(ModelParams(0.1, 0.01, 0.0, Monostable()))


@pytest.mark.parametrize("kwargs,msg", [
    (dict(delta=-1.0), "delta must be positive"),
    (dict(delta=0.0), "delta must be positive"),
    (dict(epsilon=0.0), "epsilon must be positive"),
    (dict(r=-0.1), "r must be nonnegative"),
    (dict(law=Bistable(1.5)), "a must lie in (0,1)"),
    (dict(law=Bistable(0.0)), "a must lie in (0,1)"),
])
def test_validate_params_rejects(kwargs, msg):
    base = dict(delta=0.1, epsilon=0.01, r=0.0, law=Monostable())
    base.update(kwargs)
    with pytest.raises(ParameterError, match=msg.replace("(", r"\(").replace(")", r"\)")):
        ModelParams(**base)


def test_simstate_validates():
    g = Grid(5)
    with pytest.raises(ParameterError):
        SimState(-1.0, np.zeros(5), g)
    with pytest.raises(ParameterError):
        SimState(0.0, np.zeros(3), g)


def test_xlogx_limit():
    out = xlogx(np.array([0.0, 1e-320, -1e-13, 1.0, np.e]))
    np.testing.assert_allclose(out, [0, 0, 0, 0, np.e])
