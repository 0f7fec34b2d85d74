"""Brute-force ground truth for topologies and routers.

Everything here reads only ``Concentrator.adjacency``; no construction
formula is consulted.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .routing import Request, complete_request, validate_assignment
from .topology import Concentrator, Kind, crosspoint_count

__all__ = [
    "MatchingResult",
    "CertMode",
    "CapacityCertificate",
    "CapacityBudgetError",
    "CrosspointReport",
    "EquivalenceReport",
    "max_matching",
    "certify_capacity",
    "find_capacity",
    "check_crosspoint_bounds",
    "router_equivalence",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 10**6


@dataclass(frozen=True)
class MatchingResult:
    size: int
    pairs: tuple[tuple[int, int], ...]


def max_matching(conc: Concentrator, active: Iterable[int]) -> MatchingResult:
    """Maximum matching from ``active`` into the outputs (Kuhn's augmenting paths)."""
    active = list(active)
    match_out: dict[int, int] = {}

    def augment(i: int, seen: set) -> bool:
        for z in conc.adjacency[i - 1]:
            if z in seen:
                continue
            seen.add(z)
            if z not in match_out or augment(match_out[z], seen):
                match_out[z] = i
                return True
        return False

    for i in active:
        augment(i, set())
    pairs = tuple(sorted((i, z) for z, i in match_out.items()))
    return MatchingResult(len(pairs), pairs)


class CertMode(str, enum.Enum):
    EXHAUSTIVE = "exhaustive"
    SAMPLED = "sampled"


class CapacityBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class CapacityCertificate:
    c_claim: int
    holds: bool
    mode: CertMode
    checked: int
    witness_failure: Optional[tuple[int, ...]] = None

    @property
    def certified_c(self) -> Optional[int]:
        return self.c_claim if self.holds else None

    def describe(self) -> str:
        if self.holds:
            return f"certified c={self.c_claim} ({self.mode.value}, {self.checked} subsets)"
        return f"c={self.c_claim} refuted by inputs {list(self.witness_failure)} ({self.mode.value}, {self.checked} subsets)"


def certify_capacity(
    conc: Concentrator,
    c_claim: int,
    mode: str = "auto",
    budget: int = DEFAULT_BUDGET,
    rng: Optional[np.random.Generator] = None,
) -> CapacityCertificate:
    """Check that every ``c_claim``-subset of inputs is fully matchable.

    ``mode="exhaustive"`` refuses when ``C(n, c_claim) > budget``;
    ``"sampled"`` draws ``budget`` uniform subsets; ``"auto"`` picks
    exhaustive when it fits the budget.  Smaller subsets are implied by
    monotonicity of matchings under removal.
    """
    if c_claim > conc.m:
        raise ValueError(f"c_claim={c_claim} exceeds m={conc.m}: no {c_claim} inputs fit into {conc.m} outputs")
    if c_claim < 0:
        raise ValueError("c_claim must be non-negative")
    total = math.comb(conc.n, c_claim)
    if mode == "auto":
        mode = "exhaustive" if total <= budget else "sampled"
    mode = CertMode(mode)
    if mode is CertMode.EXHAUSTIVE:
        if total > budget:
            raise CapacityBudgetError(f"C({conc.n},{c_claim})={total} subsets exceeds budget {budget}")
        subsets: Iterable[tuple[int, ...]] = itertools.combinations(range(1, conc.n + 1), c_claim)
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        subsets = (
            tuple(sorted(int(x) + 1 for x in rng.choice(conc.n, size=c_claim, replace=False))) for _ in range(budget)
        )
    checked = 0
    for subset in subsets:
        checked += 1
        if max_matching(conc, subset).size < c_claim:
            return CapacityCertificate(c_claim, False, mode, checked, subset)
    return CapacityCertificate(c_claim, True, mode, checked)


def find_capacity(conc: Concentrator, budget: int = DEFAULT_BUDGET) -> CapacityCertificate:
    """Largest exhaustively certified ``c``; the witness refutes ``c + 1``."""
    best = CapacityCertificate(0, True, CertMode.EXHAUSTIVE, 1)
    for c in range(1, conc.m + 1):
        cert = certify_capacity(conc, c, mode="exhaustive", budget=budget)
        if not cert.holds:
            return CapacityCertificate(best.c_claim, True, CertMode.EXHAUSTIVE, best.checked, cert.witness_failure)
        best = cert
    return best


@dataclass(frozen=True)
class CrosspointReport:
    kind: Kind
    count: int
    expected: Optional[int]
    bound: Optional[int]
    asserted: bool
    passed: bool
    note: str = ""


def check_crosspoint_bounds(conc: Concentrator) -> CrosspointReport:
    """Compare the stored crosspoint count with the closed-form figures.

    Full and regular instances must equal ``(n-m+1)m``.  For bounded
    instances the count is compared with twice
    ``floor((n-c+1)m / (m-c+1))``; the comparison is asserted only in the
    original ``q*q <= m`` regime and reported as informational otherwise.
    """
    count = crosspoint_count(conc)
    n, m = conc.n, conc.m
    if conc.kind in (Kind.FULL, Kind.REGULAR):
        expected = (n - m + 1) * m
        return CrosspointReport(conc.kind, count, expected, None, True, count == expected)
    c = conc.c
    bound = 2 * ((n - c + 1) * m // (m - c + 1))
    asserted = conc.q * conc.q <= m
    ok = count <= bound
    note = "" if asserted else "outside q*q <= m; informational only"
    return CrosspointReport(conc.kind, count, None, bound, asserted, ok or not asserted, note)


@dataclass(frozen=True)
class EquivalenceReport:
    ok: bool
    router_size: int
    oracle_size: int
    valid: bool
    violations: tuple = field(default=())


def router_equivalence(conc: Concentrator, req: Request, router: Callable) -> EquivalenceReport:
    """Run ``router`` on ``req`` and compare with the oracle's maximum matching.

    Full and regular requests are completed first, as the routers require.
    ``router`` returns either an ``Assignment`` or a tuple whose first item
    is one.
    """
    req = complete_request(conc, req)
    result = router(conc, req)
    asg = result[0] if isinstance(result, tuple) else getattr(result, "assignment", result)
    report = validate_assignment(conc, req, asg)
    best = max_matching(conc, req.active).size
    ok = report.valid and len(asg) == best
    return EquivalenceReport(ok, len(asg), best, report.valid, report.violations)
