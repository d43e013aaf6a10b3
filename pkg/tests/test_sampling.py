import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from weakapprox.errors import ContractError, EstimationError, StepFailure
from weakapprox.normal import inv_norm_cdf
from weakapprox.sampling import PrngSource, SobolSource, estimate, make_source, merge_stats


def test_prng_points_are_indexable():
    src = PrngSource(7, seed=42)
    block = src.block(100, 20)
    for i in (0, 5, 19):
        np.testing.assert_array_equal(block[i], src.point(100 + i))
    np.testing.assert_array_equal(src.point(3), PrngSource(7, seed=42).point(3))
    assert not np.array_equal(src.point(3), PrngSource(7, seed=43).point(3))
    assert not np.array_equal(src.point(3), PrngSource(7, seed=42, stream=1).point(3))


def test_prng_range():
    u = PrngSource(5, seed=1).block(0, 50_000)
    assert u.min() > 0.0 and u.max() < 1.0


def test_prng_uniformity_ks():
    u = PrngSource(1, seed=7).block(0, 100_000)[:, 0]
    res = stats.kstest(u, "uniform")
    # critical value of the KS statistic at the 1% level
    assert res.statistic < 1.628 / np.sqrt(u.size)


def test_sobol_source_skip_and_shift():
    src = SobolSource(3)
    np.testing.assert_array_equal(src.point(0), [0.5, 0.5, 0.5])
    assert SobolSource(3, skip=0).point(0).sum() == 0.0
    shifted = SobolSource(3, shift_seed=5).block(0, 1000)
    assert shifted.min() >= 0.0 and shifted.max() < 1.0
    assert not np.array_equal(shifted, src.block(0, 1000))


def test_constant_payoff():
    res = estimate(lambda u: np.full(u.shape[0], 2.5), 1000, PrngSource(2, 0), block=128)
    assert res.mean == 2.5 and res.variance == 0.0 and res.m == 1000


def test_standard_normal_mean_mc():
    res = estimate(lambda u: inv_norm_cdf(u[:, 0]), 10**6, PrngSource(1, seed=11))
    assert abs(res.mean) <= 4 * res.stderr
    assert res.stderr == pytest.approx(1e-3, rel=0.02)
    assert res.stderr**2 * res.m == pytest.approx(res.variance, rel=1e-12)


def test_uniform_mean_qmc():
    res = estimate(lambda u: u[:, 0], 2**16, SobolSource(1))
    assert abs(res.mean - 0.5) <= 1e-4


def test_thread_count_does_not_change_result():
    f = lambda u: np.exp(u[:, 0]) * u[:, 1]
    a = estimate(f, 50_001, PrngSource(2, 3), block=4096, threads=1)
    b = estimate(f, 50_001, PrngSource(2, 3), block=4096, threads=4)
    assert a == b


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=60), st.integers(1, 59))
def test_merge_stats_matches_direct(values, cut):
    values = np.array(values)
    cut = min(cut, values.size - 1)
    parts = []
    for chunk in (values[:cut], values[cut:]):
        mean = chunk.mean()
        parts.append((chunk.size, mean, ((chunk - mean) ** 2).sum()))
    n, mean, m2 = merge_stats(*parts)
    assert n == values.size
    assert mean == pytest.approx(values.mean(), abs=1e-9)
    assert m2 == pytest.approx(((values - values.mean()) ** 2).sum(), rel=1e-9, abs=1e-6)


def test_non_finite_sample_reports_index():
    def f(u):
        out = np.ones(u.shape[0])
        out[u.shape[0] - 1] = np.nan
        return out

    with pytest.raises(EstimationError) as info:
        estimate(f, 300, PrngSource(1, 0), block=100)
    assert info.value.point_index == 99


def test_step_failure_gets_global_index():
    def f(u):
        raise StepFailure("boom", sample=7)

    with pytest.raises(StepFailure) as info:
        estimate(f, 300, PrngSource(1, 0), block=100)
    assert info.value.point_index == 7


def test_estimate_preconditions():
    with pytest.raises(ContractError):
        estimate(lambda u: u[:, 0], 1, PrngSource(1, 0))
    with pytest.raises(ContractError):
        estimate(lambda u: u, 10, PrngSource(2, 0))
    with pytest.raises(ContractError):
        make_source("lattice", 3)
