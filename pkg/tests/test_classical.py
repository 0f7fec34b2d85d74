import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conclab.classical import (
    prefix_sum,
    reindex_plan,
    route_bounded_classical,
    route_classical,
    route_full_classical,
    route_regular_classical,
)
from conclab.oracle import router_equivalence
from conclab.routing import Request, RoutingError, complete_request, validate_assignment
from conclab.topology import build_bounded_fat_slim, build_full_fat_slim, build_regular_fat_slim


def test_prefix_sum_examples():
    assert prefix_sum([0, 0, 1, 1, 0]) == [0, 0, 1, 2, 2]
    assert prefix_sum([1, 1, 0, 0, 1]) == [1, 2, 2, 2, 3]
    assert prefix_sum([0, 0, 0]) == [0, 0, 0]


def test_reindex_worked_example():
    plan = reindex_plan([3, 4, 6, 5, 2], m=20, p=5)
    assert plan.a == (0, 0, 1, 1, 0)
    assert plan.r == (0, 0, 1, 2, 2)
    assert plan.s == (1, 2, 2, 2, 3)
    assert plan.d == (3, 4, 1, 2, 5)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 30), min_size=3, max_size=12))
def test_reindex_is_permutation_with_heavy_first(sizes):
    p = len(sizes)
    m = 6 * p
    plan = reindex_plan(sizes, m, p)
    assert sorted(plan.d) == list(range(1, p + 1))
    heavy = [plan.d[j] for j in range(p) if plan.a[j]]
    assert heavy == list(range(1, len(heavy) + 1))


def test_full_trace():
    conc = build_full_fat_slim(11, 5)
    req = Request.from_indices(11, [1, 2, 7, 8, 10])
    asg, ledger = route_full_classical(conc, req)
    assert sorted(asg.pairs) == [(1, 3), (2, 5), (7, 1), (8, 2), (10, 4)]
    assert ledger.total > 0


def test_full_slim_only_identity():
    conc = build_full_fat_slim(11, 5)
    asg, _ = route_full_classical(conc, Request.from_indices(11, range(7, 12)))
    assert sorted(asg.pairs) == [(6 + i, i) for i in range(1, 6)]


def test_full_rejects_incomplete():
    conc = build_full_fat_slim(11, 5)
    with pytest.raises(RoutingError):
        route_full_classical(conc, Request.from_indices(11, [1]))


def test_wrong_kind_rejected():
    with pytest.raises(RoutingError):
        route_regular_classical(build_full_fat_slim(6, 3), Request.from_indices(6, [1, 2, 3]))


@pytest.mark.parametrize(
    "active,expected",
    [([3, 8], [(3, 3), (8, 1)]), ([1, 8], [(1, 1), (8, 3)]), ([], [])],
)
def test_bounded_traces(active, expected):
    conc = build_bounded_fat_slim(9, 7, 2)
    asg, _ = route_bounded_classical(conc, Request.from_indices(9, active))
    assert sorted(asg.pairs) == sorted(expected)


def test_bounded_overload_reports_unrouted():
    conc = build_bounded_fat_slim(9, 7, 2)
    asg, _ = route_bounded_classical(conc, Request.from_indices(9, [1, 3, 5, 8]))
    assert asg.unrouted == (8,)
    assert validate_assignment(conc, Request.from_indices(9, [1, 3, 5]), asg).valid


def test_regular_case_a_example():
    conc = build_regular_fat_slim(3, 12)
    R = {1: [1, 2, 3, 5, 6, 7, 8, 9, 10], 2: [3, 8], 3: [1]}
    req = Request.from_indices(36, [conc.flat_index(j, k) for j, ks in R.items() for k in ks])
    asg, _ = route_regular_classical(conc, req)
    assert asg.case == "a"
    got = asg.as_dict()
    x = conc.flat_index
    assert [got[x(1, k)] for k in (1, 2, 3)] == [1, 2, 3]
    assert got[x(2, 3)] == 4
    assert got[x(3, 1)] == 5
    # the worked example names this input x_{2,7}; R_2 = {3, 8} makes it x_{2,8}
    assert got[x(2, 8)] == 9
    assert {got[x(1, k)] for k in range(5, 11)} <= set(conc.sections[0].V)
    assert validate_assignment(conc, req, asg).valid


def test_regular_all_in_first_section():
    conc = build_regular_fat_slim(3, 6)
    req = Request.from_indices(18, range(1, 7))
    asg, _ = route_regular_classical(conc, req)
    assert asg.case == "a"
    assert validate_assignment(conc, req, asg).valid


def test_regular_case_b_plan_matches_counts():
    conc = build_regular_fat_slim(5, 20)
    counts = [3, 4, 6, 5, 2]
    active = [conc.flat_index(j + 1, k) for j, c in enumerate(counts) for k in range(1, c + 1)]
    req = Request.from_indices(100, active)
    asg, _ = route_regular_classical(conc, req)
    assert asg.case == "b"
    assert asg.plan.d == (3, 4, 1, 2, 5)
    assert validate_assignment(conc, req, asg).valid


def _all_requests(n, sizes):
    for k in sizes:
        for subset in itertools.combinations(range(1, n + 1), k):
            yield Request.from_indices(n, subset)


@pytest.mark.parametrize(
    "conc,sizes",
    [
        (build_full_fat_slim(7, 3), range(4)),
        (build_full_fat_slim(9, 4), range(5)),
        (build_bounded_fat_slim(9, 7, 2), range(4)),
        (build_bounded_fat_slim(12, 9, 3), range(4)),
        (build_regular_fat_slim(3, 3), range(4)),
        (build_regular_fat_slim(3, 6), [6]),
        (build_regular_fat_slim(4, 4), [4]),
    ],
    ids=repr,
)
def test_exhaustive_equivalence(conc, sizes):
    for req in _all_requests(conc.n, sizes):
        rep = router_equivalence(conc, req, route_classical)
        assert rep.ok, (req.active, rep)


@pytest.mark.parametrize("p,m", [(3, 12), (4, 8), (6, 12), (8, 16)])
def test_regular_random_skewed(p, m):
    conc = build_regular_fat_slim(p, m)
    rng = np.random.default_rng(p * 100 + m)
    for _ in range(400):
        # concentrate actives in a few sections to reach both cases
        w = rng.dirichlet(np.full(p, 0.3))
        probs = np.repeat(w / m, m)
        active = rng.choice(conc.n, size=m, replace=False, p=probs / probs.sum()) + 1
        req = Request.from_indices(conc.n, active.tolist())
        asg, ledger = route_regular_classical(conc, req)
        assert validate_assignment(conc, req, asg).valid
        assert ledger.guard_swaps == 0


def test_case_exclusivity():
    # two sections above m - m/p would need more than m actives
    for p, m in [(3, 6), (3, 12), (5, 20)]:
        conc = build_regular_fat_slim(p, m)
        rng = np.random.default_rng(m)
        for _ in range(300):
            active = rng.choice(conc.n, size=m, replace=False) + 1
            sizes = np.bincount((active - 1) // m, minlength=p)
            assert (sizes > m - m // p).sum() <= 1


@pytest.mark.parametrize("kind", ["full", "regular"])
def test_steps_bounded_linearly(kind):
    rng = np.random.default_rng(1)
    for s in (8, 16, 32, 64):
        conc = build_full_fat_slim(s * s, s) if kind == "full" else build_regular_fat_slim(s, s)
        for _ in range(5):
            active = rng.choice(conc.n, size=conc.m, replace=False) + 1
            req = complete_request(conc, Request.from_indices(conc.n, active.tolist()))
            _, ledger = route_classical(conc, req)
            assert ledger.total <= 2 * conc.n + 12 * conc.m
