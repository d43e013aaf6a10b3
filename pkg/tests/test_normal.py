import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weakapprox.errors import DomainError
from weakapprox.normal import inv_norm_cdf

from oracles import bisect_norm_quantile, quantile_grid


def test_median():
    assert inv_norm_cdf(0.5) == 0.0


def test_known_quantiles():
    assert inv_norm_cdf(0.975) == pytest.approx(1.959963985, abs=1e-9)
    assert inv_norm_cdf(0.841344746) == pytest.approx(1.0, abs=1e-6)


def test_grid_against_bisection_including_far_tails():
    u = np.concatenate([quantile_grid(20_000, tail=1e-15), [1e-15, 1 - 1e-15]])
    err = np.abs(inv_norm_cdf(u) - bisect_norm_quantile(u))
    assert err.max() <= 1e-8


@pytest.mark.parametrize("u", [1e-15, 1e-12, 1e-6, 0.01, 0.3, 0.7, 0.999, 1 - 1e-9])
def test_against_mpmath(u):
    mpmath.mp.dps = 40
    p = mpmath.mpf(u)
    exact = mpmath.findroot(lambda z: mpmath.ncdf(z) - p, float(np.clip(inv_norm_cdf(u), -9, 9)))
    assert abs(inv_norm_cdf(u) - float(exact)) <= 1e-8


@given(st.integers(1, 2**40))
def test_antisymmetry_on_dyadic_points(k):
    # 1 - u is exact for these u, so the quantiles must mirror exactly
    u = k * 2.0**-41
    assert inv_norm_cdf(u) == -inv_norm_cdf(1.0 - u)


@given(st.floats(1e-12, 1 - 1e-12), st.floats(1e-12, 1 - 1e-12))
def test_monotone(a, b):
    if a < b:
        assert inv_norm_cdf(a) <= inv_norm_cdf(b)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5, np.nan])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        inv_norm_cdf(bad)


def test_array_shapes_preserved():
    u = np.full((3, 4), 0.5)
    assert inv_norm_cdf(u).shape == (3, 4)
    assert isinstance(inv_norm_cdf(0.3), float)
