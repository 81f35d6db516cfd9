import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from twoprobe.analysis import (
    BOUNDS_COLUMNS,
    PreconditionError,
    all_index1_good,
    compare_bounds,
    general_bound,
    goodness_size_check,
    nested_peer_sum,
    random_good_scheme,
    ratio_rows,
    restricted_exponent,
    rows_to_csv,
    restricted_bound,
    universe_sum_identity_check,
    universe_sum_ratio,
    universe_total,
)
from twoprobe.model import Element, Table, build_scheme, peers
from twoprobe.universe import i_universe


def transversal_scheme(b=4):
    """Nine blocks; B holds the rows and C the columns of a 3x3 grid at every index."""
    blocks = list("abcdefghi")
    rows = ["abc", "def", "ghi"]
    cols = ["adg", "beh", "cfi"]
    return build_scheme(blocks, b, [(k, r) for k in range(1, b + 1) for r in rows],
                        [(k, c) for k in range(1, b + 1) for c in cols])


def test_restricted_bound_examples():
    assert restricted_bound(5, 5) == 1.0
    assert restricted_bound(10**6, 8) == pytest.approx(125000 ** 0.75, rel=1e-12)
    assert restricted_bound(10**6, 8) == pytest.approx(6.65e3, rel=1e-3)
    assert Fraction(restricted_exponent(4)).limit_denominator(100) == Fraction(2, 3)
    with pytest.raises(ValueError):
        restricted_bound(3, 4)
    with pytest.raises(ValueError):
        restricted_bound(3, 0)


def test_compare_bounds_examples():
    small = compare_bounds([2 ** 20], [1, 2, 3])
    assert all(r.general_bound is None and r.crossover_flag for r in small)
    (row,) = compare_bounds([2 ** 64], [4])
    assert row.general_bound == 1.0 and row.crossover_flag
    assert row.restricted_bound == pytest.approx((2 ** 62) ** (2 / 3), rel=1e-12)
    flags = [r.crossover_flag for r in compare_bounds([2 ** 20], range(1, 201))]
    assert flags[0] and not flags[-1]


def test_bounds_csv():
    text = rows_to_csv(compare_bounds([1000], [2, 4]), BOUNDS_COLUMNS)
    lines = text.splitlines()
    assert lines[0] == ",".join(BOUNDS_COLUMNS)
    assert lines[1].split(",")[3] == ""  # no general bound below n = 4


@settings(max_examples=100)
@given(st.integers(1, 60), st.integers(1, 10**12), st.integers(1, 10**6))
def test_bound_monotonicity(n, m, dm):
    m = max(m, n)
    assert restricted_bound(m + dm, n) >= restricted_bound(m, n)
    assert restricted_exponent(n + 1) >= restricted_exponent(n)


@settings(max_examples=50)
@given(st.integers(20, 200))
def test_flag_monotone_in_n(log_m):
    flags = [r.crossover_flag for r in compare_bounds([2 ** log_m], range(1, 120))]
    assert all(a >= b for a, b in zip(flags, flags[1:]))


def test_general_bound():
    assert general_bound(100, 3) is None
    assert general_bound(2 ** 20, 8) == pytest.approx(2 ** 10)


def test_transversal_scheme_closed_form():
    scheme = transversal_scheme()
    assert all_index1_good(scheme, 1)
    # every set has three members: each universe holds two elements, and 2s/3 sets sit at index 1
    assert universe_total(scheme, 1) == 9 * 2
    assert universe_sum_ratio(scheme, 1) == pytest.approx(2 * (3 - 1) / 3)
    check = goodness_size_check(scheme, 1)
    assert check.holds and check.per_element_holds
    assert (check.universe_total, check.bound) == (18, 27)


def test_identity_unit_weights(fig):
    ones = {e: 1 for e in fig.universe}
    assert universe_sum_identity_check(fig, 1, ones)
    for blk in fig.blocks:
        e = Element(blk, 1)
        assert nested_peer_sum(fig, e, 1, ones) == len(peers(fig, e, Table.B))


def test_preconditions(toy, fig):
    with pytest.raises(PreconditionError):
        universe_sum_identity_check(toy, 1, {e: 1 for e in toy.universe})
    with pytest.raises(PreconditionError):
        goodness_size_check(fig, 2)
    with pytest.raises(ValueError):
        universe_sum_ratio(fig, 4)


def test_random_good_scheme_gives_up():
    with pytest.raises(RuntimeError):
        random_good_scheme(random.Random(0), 3, 4, 1, sizes=(3,), weights=None, max_tries=5)


def route_sum(scheme, e, t, weights):
    """Sum over every alternating route of length t, written as an explicit product of choices."""
    routes = [[e]]
    for level in range(1, t + 1):
        table = Table.B if level % 2 else Table.C
        routes = [r + [Element(h.block, h.index % scheme.b + 1)] for r in routes for h in peers(scheme, r[-1], table)]
    return sum(weights[r[-1]] for r in routes), len(routes)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([1, 2, 3]))
def test_identity_and_distinct_sets(seed, t):
    rng = random.Random(seed)
    # five blocks always put a triple at index 1 that no 2+3 split of index 2 can separate
    scheme = random_good_scheme(rng, rng.choice((4, 6, 8)), 8, t)
    weights = {e: rng.randint(-50, 50) for e in scheme.universe}
    assert universe_sum_identity_check(scheme, t, weights)
    for blk in scheme.blocks:
        e = Element(blk, 1)
        total, count = route_sum(scheme, e, t, weights)
        assert total == nested_peer_sum(scheme, e, t, weights)
        # goodness makes routes land on distinct elements
        assert count == len(i_universe(scheme, e, Table.B, t))
    check = goodness_size_check(scheme, t)
    assert check.holds and check.per_element_holds
    assert universe_sum_ratio(scheme, t) > 0


def test_ratio_rows_skip_bad_cases(fig):
    rows = ratio_rows([fig], [1, 2, 3])
    assert [r["t"] for r in rows] == [1]
    assert rows[0]["scheme_id"] == 0 and math.isfinite(rows[0]["ratio"])
