import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phonsim.triangle import (
    col_of,
    cols_of_array,
    index_of,
    nodes_for_edge_budget,
    num_edges,
    plan_block_width,
    prefix_count,
    row_of,
    rows_of_array,
)


def test_num_edges_known_values():
    assert num_edges(600000) == 179_999_700_000
    assert num_edges(100000) == 4_999_950_000
    assert num_edges(2) == 1
    assert num_edges(1) == 0


def test_num_edges_rejects_nonpositive():
    with pytest.raises(ValueError):
        num_edges(0)


def test_prefix_count_small_grid():
    # n=4 layout: rows of 3, 2, 1 entries
    assert [prefix_count(r, 4) for r in range(3)] == [3, 5, 6]
    assert prefix_count(0, 2) == 1
    assert prefix_count(0, 600000) == 599999


def test_prefix_count_equals_row_sum():
    n = 37
    for r in range(n - 1):
        assert prefix_count(r, n) == sum(n - k - 1 for k in range(r + 1))


def test_prefix_count_last_row_is_total():
    for n in (2, 3, 10, 1000):
        assert prefix_count(n - 2, n) == num_edges(n)


def test_prefix_count_range_check():
    with pytest.raises(ValueError):
        prefix_count(-1, 4)
    with pytest.raises(ValueError):
        prefix_count(3, 4)


def test_row_col_small_grid():
    assert [row_of(i, 4) for i in range(6)] == [0, 0, 0, 1, 1, 2]
    assert col_of(4, 4, 1) == 3
    assert col_of(5, 4, 2) == 3
    assert col_of(0, 4, 0) == 1


def test_row_of_first_and_last():
    for n in (2, 5, 100, 600000):
        assert row_of(0, n) == 0
    # last edge of the 100k graph is (n-2, n-1)
    idx = num_edges(100000) - 1
    assert idx == 4_999_949_999
    r = row_of(idx, 100000)
    assert r == 99998
    assert col_of(idx, 100000, r) == 99999


def test_row_of_range_check():
    with pytest.raises(ValueError):
        row_of(-1, 4)
    with pytest.raises(ValueError):
        row_of(6, 4)


def test_col_of_inconsistent_row():
    with pytest.raises(ValueError):
        col_of(0, 4, 1)


def test_index_of_small_grid():
    assert index_of(0, 1, 4) == 0
    assert index_of(1, 2, 4) == 3
    assert index_of(2, 3, 4) == 5


def test_index_of_ordering_check():
    for r, c in ((1, 1), (2, 1), (-1, 2), (0, 4)):
        with pytest.raises(ValueError):
            index_of(r, c, 4)


def test_bijection_exhaustive_scalar():
    for n in range(2, 61):
        seen = []
        for idx in range(num_edges(n)):
            r = row_of(idx, n)
            c = col_of(idx, n, r)
            assert 0 <= r < c <= n - 1
            assert index_of(r, c, n) == idx
            seen.append((r, c))
        # row-major monotonicity: indices enumerate pairs in lex order
        assert seen == sorted(seen)
        assert len(set(seen)) == num_edges(n)


def test_vectorized_matches_scalar():
    for n in (2, 3, 17, 301, 100_000):
        rng = np.random.default_rng(n)
        idx = rng.integers(0, num_edges(n), size=500, dtype=np.int64)
        rows = rows_of_array(idx, n)
        cols = cols_of_array(idx, n, rows)
        for i, r, c in zip(idx.tolist(), rows.tolist(), cols.tolist()):
            assert r == row_of(i, n)
            assert c == col_of(i, n, r)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=2, max_value=10**7), st.data())
def test_roundtrip_random(n, data):
    idx = data.draw(st.integers(min_value=0, max_value=num_edges(n) - 1))
    r = row_of(idx, n)
    c = col_of(idx, n, r)
    assert 0 <= r < c <= n - 1
    assert index_of(r, c, n) == idx


def test_nodes_for_edge_budget_examples():
    assert nodes_for_edge_budget(1) == 2
    assert nodes_for_edge_budget(4_999_950_000) == 100_000
    # largest n whose edges fit 6 GB at 1 byte/edge:
    # num_edges(109545) = 5,999,998,740 <= 6e9 < num_edges(109546)
    n = nodes_for_edge_budget(6_000_000_000)
    assert n == 109_545
    assert num_edges(n) <= 6_000_000_000 < num_edges(n + 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=10**14), st.integers(min_value=1, max_value=8))
def test_nodes_for_edge_budget_is_tight(budget, bytes_per_edge):
    n = nodes_for_edge_budget(budget, bytes_per_edge)
    cap = budget // bytes_per_edge
    assert num_edges(n) <= cap
    assert num_edges(n + 1) > cap or cap == 0


def test_nodes_for_edge_budget_rejects_bad_input():
    with pytest.raises(ValueError):
        nodes_for_edge_budget(0)
    with pytest.raises(ValueError):
        nodes_for_edge_budget(10, 0)


def test_plan_block_width():
    assert plan_block_width(25, 49152) == 72
    assert plan_block_width(5, 49152) == 1024
    # exact fit leaves room for exactly one unit
    assert plan_block_width(25, 676) == 1


def test_plan_block_width_word_too_long():
    with pytest.raises(ValueError, match="word too long"):
        plan_block_width(300, 49152)


def test_plan_block_width_rejects_bad_q():
    with pytest.raises(ValueError):
        plan_block_width(0, 49152)


def test_boundary_indices_at_ten_million_nodes():
    n = 10**7
    last = num_edges(n) - 1
    assert (row_of(0, n), col_of(0, n, 0)) == (0, 1)
    r = row_of(last, n)
    assert (r, col_of(last, n, r)) == (n - 2, n - 1)
    idx = np.array([0, 1, n - 2, n - 1, num_edges(n) // 2, last - 1, last], dtype=np.int64)
    rows = rows_of_array(idx, n)
    cols = cols_of_array(idx, n, rows)
    for i, rv, cv in zip(idx.tolist(), rows.tolist(), cols.tolist()):
        assert rv == row_of(i, n)
        assert cv == col_of(i, n, rv)
