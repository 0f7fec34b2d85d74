"""Simulated Grover search with an unknown number of marked items.

Two interchangeable engines answer the same question, "find a marked
index, and how many oracle queries did it cost":

``StatevectorEngine``
    Exact amplitude simulation.  The state is a real vector over exactly
    ``N`` basis states; one Grover iteration is a phase flip on marked
    indices followed by inversion about the mean.

``CostModelEngine``
    Draws the query cost from a per-(N, k) distribution calibrated against
    the statevector engine and returns a uniformly random marked index.
    Usable at sizes where statevectors are out of reach.

Both follow the same search schedule: start with cutoff ``1``; each attempt
draws ``j`` uniformly from ``0..ceil(cutoff)-1``, runs ``j`` iterations from
the uniform state, measures, and verifies the outcome with one extra query;
on failure the cutoff grows by ``6/5`` up to ``sqrt(N)``.  A search gives up
once its query budget is spent.

Oracle indices are 0-based positions in the searched window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

__all__ = [
    "GROWTH",
    "Oracle",
    "GroverOutcome",
    "SearchEngine",
    "StatevectorEngine",
    "CostModelEngine",
    "ConfigurationError",
    "uniform_state",
    "grover_iterate",
    "success_probability",
    "default_budget",
    "amplification_count",
    "bbht_search",
    "cost_model_search",
    "find_all_marked",
]

GROWTH = 6 / 5


class ConfigurationError(RuntimeError):
    pass


class Oracle:
    """Mutable marked set over ``0..N-1`` with a query counter.

    Every phase flip and every classical verification of a measured index
    counts as one query.
    """

    def __init__(self, marked):
        marked = np.asarray(marked, dtype=bool)
        if marked.ndim != 1 or marked.size < 1:
            raise ValueError("oracle needs a non-empty 1-d marked array")
        self.marked = marked.copy()
        self.N = int(marked.size)
        self.query_count = 0
        self._members: Optional[list[int]] = None
        self._where: dict[int, int] = {}
        self._k = int(self.marked.sum())

    @classmethod
    def from_indices(cls, N: int, indices) -> "Oracle":
        marked = np.zeros(N, dtype=bool)
        marked[list(indices)] = True
        return cls(marked)

    @property
    def k(self) -> int:
        return self._k

    def phase_flip(self, amps: np.ndarray) -> np.ndarray:
        self.query_count += 1
        return np.where(self.marked, -amps, amps)

    def check(self, i: int) -> bool:
        self.query_count += 1
        return bool(self.marked[i])

    def charge(self, queries: int) -> None:
        """Account for queries spent by a non-simulating engine."""
        self.query_count += int(queries)

    def unmark(self, i: int) -> None:
        if not self.marked[i]:
            return
        self.marked[i] = False
        self._k -= 1
        if self._members is not None:
            pos = self._where.pop(i)
            last = self._members.pop()
            if last != i:
                self._members[pos] = last
                self._where[last] = pos

    def random_marked(self, rng: np.random.Generator) -> Optional[int]:
        if self._k == 0:
            return None
        if self._members is None:
            self._members = [int(i) for i in np.flatnonzero(self.marked)]
            self._where = {i: pos for pos, i in enumerate(self._members)}
        return self._members[int(rng.integers(len(self._members)))]


@dataclass(frozen=True)
class GroverOutcome:
    found: Optional[int]
    queries_used: int
    attempts: int


def uniform_state(N: int) -> np.ndarray:
    return np.full(N, 1.0 / math.sqrt(N))


def grover_iterate(amps: np.ndarray, oracle: Oracle) -> np.ndarray:
    flipped = oracle.phase_flip(amps)
    return 2.0 * flipped.mean() - flipped


def success_probability(N: int, k: int, j: int) -> float:
    """Closed-form probability of measuring a marked item after ``j`` iterations."""
    theta = math.asin(math.sqrt(k / N))
    return math.sin((2 * j + 1) * theta) ** 2


def default_budget(N: int) -> int:
    return math.ceil(3 * math.sqrt(N))


def amplification_count(k_found: int, delta: float) -> int:
    """Consecutive empty searches required before declaring the set exhausted."""
    return math.ceil(math.log(max(k_found, 2) / delta))


class SearchEngine(Protocol):
    name: str

    def search(self, oracle: Oracle, rng: np.random.Generator, budget: Optional[float] = None) -> GroverOutcome: ...


def _schedule_draw(rng: np.random.Generator, cutoff: float) -> int:
    return int(rng.integers(math.ceil(cutoff)))


class StatevectorEngine:
    name = "statevector"

    def search(self, oracle: Oracle, rng: np.random.Generator, budget: Optional[float] = None) -> GroverOutcome:
        N = oracle.N
        budget = default_budget(N) if budget is None else budget
        start = oracle.query_count
        cap = math.sqrt(N)
        cutoff = 1.0
        attempts = 0
        while oracle.query_count - start < budget:
            j = _schedule_draw(rng, cutoff)
            amps = uniform_state(N)
            for _ in range(j):
                amps = grover_iterate(amps, oracle)
            probs = amps * amps
            idx = int(rng.choice(N, p=probs / probs.sum()))
            attempts += 1
            if oracle.check(idx):
                return GroverOutcome(idx, oracle.query_count - start, attempts)
            cutoff = min(GROWTH * cutoff, cap)
        return GroverOutcome(None, oracle.query_count - start, attempts)


def bbht_search(oracle: Oracle, rng: np.random.Generator, iteration_budget: Optional[float] = None) -> GroverOutcome:
    """Statevector search; ``iteration_budget`` bounds total oracle queries
    (default ``ceil(3 sqrt(N))``, ``math.inf`` for no bound)."""
    return StatevectorEngine().search(oracle, rng, iteration_budget)


class CostModelEngine:
    """Sampled query costs from a :class:`~conclab.calibration.CalibrationTable`.

    The table describes the unbounded cost distribution; a draw above the
    budget is reported as an exhausted search charged the budget, which is
    how the statevector engine behaves too.  With nothing marked the
    schedule's own query consumption is replayed, since it does not depend
    on amplitudes.
    """

    name = "cost-model"

    def __init__(self, table=None):
        if table is None:
            from .calibration import load_default_table

            table = load_default_table()
        self.table = table

    def search(self, oracle: Oracle, rng: np.random.Generator, budget: Optional[float] = None) -> GroverOutcome:
        N, k = oracle.N, oracle.k
        budget = default_budget(N) if budget is None else budget
        if k == 0:
            spent, attempts = _empty_schedule_cost(N, rng, budget)
            oracle.charge(spent)
            return GroverOutcome(None, spent, attempts)
        mean, std = self.table.lookup(N, k)
        cost = _draw_cost(rng, mean, std)
        if cost > budget:
            spent = math.ceil(budget)
            oracle.charge(spent)
            return GroverOutcome(None, spent, 1)
        oracle.charge(cost)
        return GroverOutcome(oracle.random_marked(rng), cost, 1)


def _draw_cost(rng: np.random.Generator, mean: float, std: float) -> int:
    if std <= 0:
        return max(1, round(mean))
    shape = (mean / std) ** 2
    return max(1, int(round(rng.gamma(shape, std * std / mean))))


def _empty_schedule_cost(N: int, rng: np.random.Generator, budget: float) -> tuple[int, int]:
    cap = math.sqrt(N)
    cutoff = 1.0
    spent = attempts = 0
    while spent < budget:
        spent += _schedule_draw(rng, cutoff) + 1
        attempts += 1
        cutoff = min(GROWTH * cutoff, cap)
    return spent, attempts


def cost_model_search(oracle: Oracle, rng: np.random.Generator, table=None, budget: Optional[float] = None) -> GroverOutcome:
    return CostModelEngine(table).search(oracle, rng, budget)


def find_all_marked(
    oracle: Oracle,
    rng: np.random.Generator,
    delta: float = 0.01,
    engine: Optional[SearchEngine] = None,
    budget: Optional[float] = None,
) -> tuple[list[int], int]:
    """Enumerate marked indices by search-and-unmark.

    Stops after ``amplification_count(found, delta)`` consecutive searches
    come back empty.  Every returned index was verified marked, so the
    result is always a subset of the initial marked set; it is the whole
    set with probability at least ``1 - delta``.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    engine = engine if engine is not None else StatevectorEngine()
    start = oracle.query_count
    found: list[int] = []
    empties = 0
    while empties < amplification_count(len(found), delta):
        outcome = engine.search(oracle, rng, budget)
        if outcome.found is None:
            empties += 1
        else:
            found.append(outcome.found)
            oracle.unmark(outcome.found)
            empties = 0
    return found, oracle.query_count - start
