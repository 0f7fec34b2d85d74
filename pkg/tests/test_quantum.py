import numpy as np
import pytest

from conclab.classical import route_classical
from conclab.grover import CostModelEngine, StatevectorEngine
from conclab.quantum import route_quantum
from conclab.routing import Request, RoutingError, complete_request, validate_assignment
from conclab.topology import build_bounded_fat_slim, build_full_fat_slim, build_regular_fat_slim


def _slim_pairs(conc, pairs):
    if conc.kind.value == "full":
        return sorted(p for p in pairs if p[0] > conc.n - conc.m)
    if conc.kind.value == "bounded":
        return sorted(p for p in pairs if p[0] <= conc.n - conc.q)
    return []


def test_full_cross_check():
    conc = build_full_fat_slim(11, 5)
    req = Request.from_indices(11, [2, 4, 7, 9, 11])
    res = route_quantum(conc, req, np.random.default_rng(0))
    classical, _ = route_classical(conc, req)
    assert not res.failed
    assert validate_assignment(conc, req, res.assignment).valid
    assert _slim_pairs(conc, res.assignment.pairs) == _slim_pairs(conc, classical.pairs)
    assert {z for _, z in res.assignment.pairs} == {1, 2, 3, 4, 5}
    assert res.quantum_queries > 0 and res.cost == res.quantum_queries + res.classical_steps.total


def test_full_no_fat_actives():
    conc = build_full_fat_slim(11, 5)
    req = Request.from_indices(11, range(7, 12))
    res = route_quantum(conc, req, np.random.default_rng(1))
    assert sorted(res.assignment.pairs) == sorted(route_classical(conc, req)[0].pairs)


def test_bounded_cross_check():
    conc = build_bounded_fat_slim(9, 7, 2)
    req = Request.from_indices(9, [1, 8])
    res = route_quantum(conc, req, np.random.default_rng(2))
    assert sorted(res.assignment.pairs) == [(1, 1), (8, 3)]


def test_bounded_empty_request():
    conc = build_bounded_fat_slim(9, 7, 2)
    res = route_quantum(conc, Request.empty(9), np.random.default_rng(3))
    assert res.assignment.pairs == () and not res.failed and res.quantum_queries > 0


def test_regular_rejects_incomplete():
    conc = build_regular_fat_slim(3, 6)
    with pytest.raises(RoutingError):
        route_quantum(conc, Request.from_indices(18, [1]), np.random.default_rng(0))


def test_regular_all_in_first_section():
    conc = build_regular_fat_slim(3, 6)
    req = Request.from_indices(18, range(1, 7))
    res = route_quantum(conc, req, np.random.default_rng(4))
    assert res.assignment.case == "a" and not res.failed


@pytest.mark.parametrize(
    "conc",
    [build_full_fat_slim(64, 8), build_bounded_fat_slim(64, 49, 15), build_regular_fat_slim(3, 12)],
    ids=repr,
)
@pytest.mark.parametrize("engine", [StatevectorEngine(), CostModelEngine()], ids=lambda e: e.name)
def test_random_requests_agree_with_classical(conc, engine):
    rng = np.random.default_rng(21)
    failures = 0
    for _ in range(40):
        active = rng.choice(conc.n, size=conc.capacity, replace=False) + 1
        req = complete_request(conc, Request.from_indices(conc.n, active.tolist()))
        res = route_quantum(conc, req, rng, 0.01, engine=engine)
        if res.failed:
            failures += 1
            continue
        classical, _ = route_classical(conc, req)
        assert validate_assignment(conc, req, res.assignment).valid
        assert len(res.assignment) == len(classical)
        assert _slim_pairs(conc, res.assignment.pairs) == _slim_pairs(conc, classical.pairs)
    assert failures <= 3


def test_failed_flag_when_search_misses():
    # a budget of one query per search cannot find anything reliably
    conc = build_full_fat_slim(200, 10)
    req = Request.from_indices(200, [1, 2, 3] + list(range(194, 201)))
    res = route_quantum(conc, req, np.random.default_rng(0), delta=0.5, budget=1)
    assert res.failed
    assert not validate_assignment(conc, req, res.assignment).valid
    # whatever was found is still paired correctly
    assert all(conc.has_crosspoint(i, z) for i, z in res.assignment.pairs)
