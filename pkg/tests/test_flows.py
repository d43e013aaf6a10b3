import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from weakapprox.errors import ConfigurationError, ContractError, FlowDivergence
from weakapprox.flows import FlowMap, make_flow, richardson_flow, rk4_flow
from weakapprox.model import VectorField, constant_field, linear_field

identity_field = linear_field([[1.0]], "y")


def pendulum():
    # smooth and nonlinear, with a globally defined flow
    return VectorField(2, lambda x: np.stack([x[1], -np.sin(x[0]) + 0.3 * np.cos(x[1])]), name="pendulum")


def reference_flow(s, x):
    sol = solve_ivp(lambda t, y: pendulum()(y), (0.0, s), x, method="DOP853", rtol=1e-13, atol=1e-15)
    return sol.y[:, -1]


def test_rk4_zero_field_is_identity():
    np.testing.assert_array_equal(rk4_flow(constant_field([0.0, 0.0]), 3.7, [1.0, 2.0]), [1.0, 2.0])


def test_rk4_single_step_truncation():
    # 1 + 1 + 1/2 + 1/6 + 1/24 for y' = y
    assert rk4_flow(identity_field, 1.0, [1.0])[0] == pytest.approx(65.0 / 24.0, abs=1e-15)


def test_rk4_substeps_converge_to_e():
    assert rk4_flow(identity_field, 1.0, [1.0], substeps=100)[0] == pytest.approx(math.e, abs=1e-9)


def test_rk4_rejects_bad_substeps():
    with pytest.raises(ContractError):
        rk4_flow(identity_field, 1.0, [1.0], substeps=0)


def test_rk4_divergence_reports_sub_time():
    blowup = VectorField(1, lambda x: np.where(x > 3.0, np.nan, x * x), name="blowup")
    with pytest.raises(FlowDivergence) as info:
        rk4_flow(blowup, 1.0, [1.0], substeps=10)
    assert 0.0 < info.value.sub_time <= 1.0


def test_richardson_levels_zero_is_base():
    base = make_flow(identity_field)
    assert richardson_flow(base, 0.5, np.array([1.0]), 0)[0] == base.apply(0.5, [1.0])[0]


def test_richardson_one_level_improves_rk4():
    base = make_flow(identity_field)
    exact = math.exp(0.5)
    err0 = abs(base.apply(0.5, [1.0])[0] - exact)
    err1 = abs(richardson_flow(base, 0.5, np.array([1.0]), 1)[0] - exact)
    # frozen from the exp oracle: 2.84e-4 without and 4.34e-6 with one level
    assert err0 == pytest.approx(2.8377e-4, rel=1e-3)
    assert err1 < 5e-6
    assert err1 < err0 / 50


def test_richardson_zero_field():
    base = make_flow(constant_field([0.0, 0.0]))
    for levels in range(4):
        np.testing.assert_array_equal(richardson_flow(base, 1.3, np.array([1.0, -2.0]), levels), [1.0, -2.0])


def test_richardson_needs_finite_exponent():
    exact = make_flow(identity_field, exact=lambda s, x: np.asarray(x) * np.exp(s))
    with pytest.raises(ContractError):
        richardson_flow(exact, 0.1, np.array([1.0]), 1)


def test_make_flow_exact_closed_form():
    flow = make_flow(identity_field, exact=lambda s, x: np.asarray(x) * np.exp(s), probe=[1.0], debug=True)
    assert flow.exact and math.isinf(flow.error_exponent)
    assert flow.apply(math.log(2.0), [1.0])[0] == pytest.approx(2.0, rel=1e-15)


def test_make_flow_exponent_metadata():
    assert make_flow(identity_field, substeps=1, levels=0).error_exponent == 5
    assert make_flow(identity_field, substeps=3, levels=1).error_exponent == 6
    assert make_flow(identity_field, levels=2).error_exponent == 7


def test_make_flow_rejects_bad_closed_form():
    with pytest.raises(ConfigurationError):
        make_flow(identity_field, exact=lambda s, x: np.asarray(x) + 1.0, probe=[1.0])
    with pytest.raises(ConfigurationError):
        # identity at zero but no semigroup
        make_flow(identity_field, exact=lambda s, x: np.asarray(x) * (1 + s * s), probe=[1.0], debug=True)
    with pytest.raises(ConfigurationError):
        make_flow(identity_field, substeps=0)


finite = st.floats(-5.0, 5.0, allow_nan=False)


@given(finite, finite)
def test_identity_at_zero_is_bit_exact(a, b):
    x = np.array([a, b])
    flows = [
        make_flow(pendulum()),
        make_flow(pendulum(), substeps=3, levels=2),
        FlowMap(pendulum(), lambda s, y: np.asarray(y) * (1.0 + 2.0**-40) + 0.0 * s, math.inf),
    ]
    for f in flows:
        out = f.apply(0.0, x)
        assert out.tobytes() == x.tobytes()
    batch = np.stack([np.full(3, a), np.full(3, b)])
    s = np.array([0.0, 0.3, 0.0])
    out = flows[1].apply(s, batch)
    assert out[:, 0].tobytes() == batch[:, 0].tobytes()
    assert out[:, 2].tobytes() == batch[:, 2].tobytes()


def _order_ratio(flow, s, x):
    e1 = np.abs(flow.apply(s, x) - reference_flow(s, x)).max()
    e2 = np.abs(flow.apply(s / 2, x) - reference_flow(s / 2, x)).max()
    return e1 / e2


@pytest.mark.parametrize("levels, expected", [(0, 2**5), (1, 2**6), (2, 2**7)])
def test_empirical_local_order(levels, expected):
    flow = make_flow(pendulum(), levels=levels)
    s = {0: 0.2, 1: 0.4, 2: 0.8}[levels]
    ratio = _order_ratio(flow, s, np.array([0.7, 0.2]))
    assert 0.8 * expected <= ratio <= 1.2 * expected


def test_batched_flow_times_match_columns(rng):
    flow = make_flow(pendulum(), levels=1)
    x = rng.normal(size=(2, 6))
    s = rng.uniform(-0.5, 0.5, 6)
    out = flow.apply(s, x)
    for j in range(6):
        np.testing.assert_allclose(out[:, j], flow.apply(s[j], x[:, j]), rtol=1e-13, atol=1e-15)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 3.0))
def test_exact_flow_semigroup_and_reversibility(s, t, x):
    a = linear_field([[0.3]])
    flow = make_flow(a, exact=lambda r, y: np.asarray(y) * np.exp(0.3 * np.asarray(r)))
    y = np.array([x])
    np.testing.assert_allclose(flow.apply(s, flow.apply(t, y)), flow.apply(s + t, y), rtol=1e-12)
    np.testing.assert_allclose(flow.apply(-s, flow.apply(s, y)), y, rtol=1e-10)
