"""Grover-assisted routers.

Each router locates active inputs with :func:`~conclab.grover.find_all_marked`
over a window of the request array and then pairs them exactly like its
classical counterpart.  Oracle queries are tallied separately from the
classical ``StepLedger``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .classical import (
    StepLedger,
    bounded_fat_pass,
    full_slim_pass,
    route_regular_sections,
)
from .grover import Oracle, SearchEngine, find_all_marked
from .routing import Assignment, Request, RoutingError, validate_assignment
from .topology import Concentrator, Kind

__all__ = [
    "QuantumRoutingResult",
    "route_full_quantum",
    "route_bounded_quantum",
    "route_regular_quantum",
    "route_quantum",
]


@dataclass(frozen=True)
class QuantumRoutingResult:
    assignment: Assignment
    quantum_queries: int
    classical_steps: StepLedger
    failed: bool

    @property
    def cost(self) -> int:
        """Quantum queries plus classical steps, both unit cost."""
        return self.quantum_queries + self.classical_steps.total


def _window_search(bits, lo: int, hi: int, rng, delta, engine, budget) -> tuple[list[int], int]:
    """Find active inputs among ``lo..hi`` (1-based, inclusive); discovery order."""
    if hi < lo:
        return [], 0
    oracle = Oracle(np.asarray(bits[lo - 1 : hi], dtype=bool))
    found, queries = find_all_marked(oracle, rng, delta, engine=engine, budget=budget)
    return [lo + f for f in found], queries


def _finish(conc: Concentrator, req: Request, pairs, unrouted, queries, ledger, **extra) -> QuantumRoutingResult:
    asg = Assignment(tuple(pairs), unrouted=tuple(unrouted), **extra)
    failed = not validate_assignment(conc, req, asg).valid
    return QuantumRoutingResult(asg, queries, ledger, failed)


def _require(conc: Concentrator, req: Request, kind: Kind, completed: bool) -> None:
    if conc.kind is not kind:
        raise RoutingError(f"router expects a {kind.value} concentrator, got {conc.kind.value}")
    if req.n != conc.n:
        raise RoutingError(f"request has {req.n} bits, concentrator has n={conc.n}")
    if completed and req.k != conc.m:
        raise RoutingError(f"request must be completed to m={conc.m} active inputs, has {req.k}")


def route_full_quantum(
    conc: Concentrator,
    req: Request,
    rng: np.random.Generator,
    delta: float = 0.01,
    engine: Optional[SearchEngine] = None,
    budget: Optional[float] = None,
) -> QuantumRoutingResult:
    _require(conc, req, Kind.FULL, completed=True)
    ledger = StepLedger()
    pairs, idle = full_slim_pass(conc, req.bits, ledger)
    fat, queries = _window_search(req.bits, 1, conc.n - conc.m, rng, delta, engine, budget)
    for i in fat:
        pairs.append((i, idle.popleft()))
        ledger.list_ops += 1
        ledger.pairings += 1
        ledger.array_writes += 1
    return _finish(conc, req, pairs, (), queries, ledger)


def route_bounded_quantum(
    conc: Concentrator,
    req: Request,
    rng: np.random.Generator,
    delta: float = 0.01,
    engine: Optional[SearchEngine] = None,
    budget: Optional[float] = None,
) -> QuantumRoutingResult:
    _require(conc, req, Kind.BOUNDED, completed=False)
    ledger = StepLedger()
    out = [1] * (conc.m + 1)
    pairs = []
    base = conc.n - conc.q
    slim, q1 = _window_search(req.bits, 1, base, rng, delta, engine, budget)
    for i in slim:
        pairs.append((i, i))
        out[i] = 0
        ledger.pairings += 1
        ledger.array_writes += 2
    fat_inputs, q2 = _window_search(req.bits, base + 1, conc.n, rng, delta, engine, budget)
    fat = deque(i - base for i in fat_inputs)
    ledger.list_ops += len(fat)
    ledger.array_writes += len(fat)
    fat_pairs, unrouted = bounded_fat_pass(conc, fat, out, ledger)
    pairs.extend(fat_pairs)
    return _finish(conc, req, pairs, unrouted, q1 + q2, ledger)


def route_regular_quantum(
    conc: Concentrator,
    req: Request,
    rng: np.random.Generator,
    delta: float = 0.01,
    engine: Optional[SearchEngine] = None,
    budget: Optional[float] = None,
) -> QuantumRoutingResult:
    _require(conc, req, Kind.REGULAR, completed=True)
    ledger = StepLedger()
    found, queries = _window_search(req.bits, 1, conc.n, rng, delta, engine, budget)
    R: list[list[int]] = [[] for _ in range(conc.p)]
    for f in found:
        j, k = conc.section_of(f)
        R[j - 1].append(k)
        ledger.list_ops += 1
    if len(found) != conc.m:
        # amplification missed an active input; the pairing phase needs all m
        return _finish(conc, req, (), (), queries, ledger)
    pairs, case, plan = route_regular_sections(conc, R, ledger)
    return _finish(conc, req, pairs, (), queries, ledger, case=case, plan=plan)


_ROUTERS = {
    Kind.FULL: route_full_quantum,
    Kind.BOUNDED: route_bounded_quantum,
    Kind.REGULAR: route_regular_quantum,
}


def route_quantum(conc: Concentrator, req: Request, rng: np.random.Generator, delta: float = 0.01, engine=None, budget=None):
    """Dispatch on concentrator kind."""
    return _ROUTERS[conc.kind](conc, req, rng, delta, engine=engine, budget=budget)
