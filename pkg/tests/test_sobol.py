import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import qmc

from weakapprox.errors import ConfigurationError, ContractError
from weakapprox.sobol import (
    default_table,
    load_direction_table,
    parse_direction_table,
    sobol_block,
    sobol_point,
)


@pytest.fixture(scope="module")
def table():
    return default_table()


def test_index_zero_is_origin(table):
    np.testing.assert_array_equal(sobol_point(table, 0, 10), np.zeros(10))


def test_first_coordinate_by_hand(table):
    assert [sobol_point(table, i, 1)[0] for i in (1, 2, 3)] == [0.5, 0.75, 0.25]


def test_second_coordinate_by_hand(table):
    # m_1 = 1 for dimension 2: v_1 = 1/2, v_2 = 3/4 from the recurrence
    assert [sobol_point(table, i, 2)[1] for i in (1, 2, 3)] == [0.5, 0.25, 0.75]


@given(st.integers(1, 9), st.integers(1, 60))
def test_dyadic_stratification(k, dim):
    pts = sobol_block(default_table(), 0, 2**k, dim)
    for j in range(dim):
        cells = np.floor(pts[:, j] * 2**k).astype(int)
        assert sorted(cells) == list(range(2**k))


def test_agrees_with_scipy_unscrambled(table):
    ours = sobol_block(table, 0, 4096, 300)
    ref = qmc.Sobol(300, scramble=False, bits=32).random(4096)
    np.testing.assert_array_equal(ours, ref)


@given(st.integers(0, 10**6), st.integers(1, 50), st.integers(1, 40))
def test_block_rows_equal_points(start, count, dim):
    table = default_table()
    block = sobol_block(table, start, count, dim)
    for i in (0, count // 2, count - 1):
        np.testing.assert_array_equal(block[i], sobol_point(table, start + i, dim))


def test_dimension_beyond_table(table):
    with pytest.raises(ConfigurationError):
        sobol_point(table, 1, table.capacity + 1)
    small = load_direction_table(max_dim=5)
    assert small.capacity == 5
    with pytest.raises(ConfigurationError):
        sobol_block(small, 0, 4, 6)


def test_negative_index(table):
    with pytest.raises(ContractError):
        sobol_point(table, -1, 2)


GOOD = "d s a m_i\n2 1 0 1\n3 2 1 1 3\n4 3 1 1 3 1\n"


def test_parse_matches_bundled_prefix(table):
    small = parse_direction_table(io.StringIO(GOOD))
    np.testing.assert_array_equal(small.v, table.v[:4])


@pytest.mark.parametrize(
    "text",
    [
        "",
        "d s a m_i\n3 1 0 1\n",           # dimensions must start at 2
        "d s a m_i\n2 1 0 1\n4 2 1 1 3\n",  # and increase by one
        "d s a m_i\n2 2 1 1\n",           # too few initial numbers
        "d s a m_i\n2 2 1 1 2\n",         # m_k must be odd
        "d s a m_i\n2 2 1 1 5\n",         # m_k < 2^k
        "d s a m_i\n2 2 x 1 3\n",
    ],
)
def test_loader_validation(text):
    with pytest.raises(ConfigurationError):
        parse_direction_table(io.StringIO(text))
