"""Deterministic O(n) routers for the three fat-and-slim concentrators.

Every counted operation (array read, array write, pairing, list operation)
is one unit step, so ``StepLedger.total`` is the routing time in the
unit-cost RAM model.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .routing import Assignment, Request, RoutingError
from .topology import Concentrator, Kind

__all__ = [
    "StepLedger",
    "ReindexPlan",
    "prefix_sum",
    "reindex_plan",
    "route_full_classical",
    "route_bounded_classical",
    "route_regular_classical",
    "route_classical",
]


@dataclass
class StepLedger:
    array_reads: int = 0
    array_writes: int = 0
    pairings: int = 0
    list_ops: int = 0
    # Times the regular tail pairing had to deviate from the listed order.
    # Diagnostic only, not a model step.
    guard_swaps: int = 0

    @property
    def total(self) -> int:
        return self.array_reads + self.array_writes + self.pairings + self.list_ops

    def __iadd__(self, other: "StepLedger") -> "StepLedger":
        self.array_reads += other.array_reads
        self.array_writes += other.array_writes
        self.pairings += other.pairings
        self.list_ops += other.list_ops
        self.guard_swaps += other.guard_swaps
        return self


def prefix_sum(bits):
    """Inclusive running sum, ``r[j] = bits[0] + ... + bits[j]``."""
    out = []
    acc = 0
    for b in bits:
        acc += b
        out.append(acc)
    return out


@dataclass(frozen=True)
class ReindexPlan:
    """Section renaming for case (b) of the regular router.

    Lists are 0-based containers of 1-based quantities: ``d[j-1]`` is the new
    name of section ``j``.
    """

    a: tuple[int, ...]
    r: tuple[int, ...]
    s: tuple[int, ...]
    d: tuple[int, ...]


def reindex_plan(sizes, m: int, p: int) -> ReindexPlan:
    """Rank sections holding more than ``m/p`` actives ahead of the rest.

    ``sizes[j-1]`` is ``|R_j|``.  Assumes no section exceeds ``m - m/p``.
    Sections with exactly ``m/p`` actives fall in the low group.
    """
    b = m // p
    a = [1 if size > b else 0 for size in sizes]
    r = prefix_sum(a)
    s = prefix_sum([1 - x for x in a])
    d = [a[j] * r[j] + (1 - a[j]) * (s[j] + r[-1]) for j in range(p)]
    return ReindexPlan(tuple(a), tuple(r), tuple(s), tuple(d))


def _check_kind(conc: Concentrator, kind: Kind) -> None:
    if conc.kind is not kind:
        raise RoutingError(f"router expects a {kind.value} concentrator, got {conc.kind.value}")


def _check_completed(conc: Concentrator, req: Request) -> None:
    if req.n != conc.n:
        raise RoutingError(f"request has {req.n} bits, concentrator has n={conc.n}")
    if req.k != conc.m:
        raise RoutingError(f"request must be completed to m={conc.m} active inputs, has {req.k}")


# -- full -------------------------------------------------------------------


def full_slim_pass(conc: Concentrator, bits, ledger: StepLedger):
    """Pair active slim inputs with their diagonal and queue idle outputs."""
    offset = conc.n - conc.m
    pairs = []
    idle = deque()
    for i in range(1, conc.m + 1):
        ledger.array_reads += 1
        if bits[offset + i - 1]:
            pairs.append((offset + i, i))
            ledger.pairings += 1
        else:
            idle.append(i)
            ledger.list_ops += 1
    return pairs, idle


def route_full_classical(conc: Concentrator, req: Request) -> tuple[Assignment, StepLedger]:
    _check_kind(conc, Kind.FULL)
    _check_completed(conc, req)
    ledger = StepLedger()
    bits = req.bits
    pairs, idle = full_slim_pass(conc, bits, ledger)
    for i in range(1, conc.n - conc.m + 1):
        ledger.array_reads += 1
        if bits[i - 1]:
            z = idle.popleft()
            ledger.list_ops += 1
            pairs.append((i, z))
            ledger.pairings += 1
    return Assignment(tuple(pairs)), ledger


# -- bounded ----------------------------------------------------------------


def bounded_fat_pass(conc: Concentrator, fat, out, ledger: StepLedger):
    """Stride scan: fat input ``y_i`` takes ``z_{i+qj}`` for the first idle ``j``.

    ``fat`` is a deque of fat positions ``i`` (1..q); ``out`` the 1-based
    availability array (index 0 unused).  Returns ``(pairs, unrouted)``.
    """
    q, c = conc.q, conc.c
    base = conc.n - q
    pairs = []
    unrouted = []
    while fat:
        i = fat.popleft()
        ledger.list_ops += 1
        for j in range(c):
            z = i + q * j
            ledger.array_reads += 1
            if out[z]:
                pairs.append((base + i, z))
                ledger.pairings += 1
                out[z] = 0
                ledger.array_writes += 1
                break
        else:
            unrouted.append(base + i)
    return pairs, unrouted


def route_bounded_classical(conc: Concentrator, req: Request) -> tuple[Assignment, StepLedger]:
    """Route any request; at most ``c`` actives are guaranteed to fit.

    Fat inputs whose whole stride is taken end up in ``Assignment.unrouted``.
    """
    _check_kind(conc, Kind.BOUNDED)
    if req.n != conc.n:
        raise RoutingError(f"request has {req.n} bits, concentrator has n={conc.n}")
    ledger = StepLedger()
    bits = req.bits
    out = [1] * (conc.m + 1)
    pairs = []
    for i in range(1, conc.n - conc.q + 1):
        ledger.array_reads += 1
        if bits[i - 1]:
            pairs.append((i, i))
            ledger.pairings += 1
            out[i] = 0
            ledger.array_writes += 1
    fat = deque()
    base = conc.n - conc.q
    for i in range(1, conc.q + 1):
        ledger.array_reads += 1
        if bits[base + i - 1]:
            fat.append(i)
            ledger.list_ops += 1
    fat_pairs, unrouted = bounded_fat_pass(conc, fat, out, ledger)
    pairs.extend(fat_pairs)
    if unrouted and req.k <= conc.c:
        raise RoutingError(f"inputs {unrouted} unrouted within certified capacity c={conc.c}")
    return Assignment(tuple(pairs), unrouted=tuple(unrouted)), ledger


# -- regular ----------------------------------------------------------------


def collect_sections(conc: Concentrator, bits, ledger: StepLedger) -> list[list[int]]:
    """Linear scan building ``R_j`` as lists of in-section positions ``k``."""
    m = conc.m
    R: list[list[int]] = [[] for _ in range(conc.p)]
    for j in range(conc.p):
        base = j * m
        for k in range(1, m + 1):
            ledger.array_reads += 1
            if bits[base + k - 1]:
                R[j].append(k)
                ledger.list_ops += 1
    return R


@dataclass
class _Pairer:
    conc: Concentrator
    ledger: StepLedger
    pairs: list = field(default_factory=list)
    used_out: set = field(default_factory=set)

    def pair(self, j: int, k: int, z: int) -> None:
        self.pairs.append((self.conc.flat_index(j, k), z))
        self.used_out.add(z)
        self.ledger.pairings += 1


def route_regular_sections(conc: Concentrator, R: list[list[int]], ledger: StepLedger):
    """Pairing phase of the regular router, given per-section active lists.

    ``R[j-1]`` lists the active positions ``k`` of section ``j`` in insertion
    order.  Returns ``(pairs, case, plan)`` with ``case`` in ``{"a", "b"}``.
    """
    m, p = conc.m, conc.p
    b = m // p
    sizes = [len(r) for r in R]
    if sum(sizes) != m:
        raise RoutingError(f"regular routing needs exactly m={m} actives, got {sum(sizes)}")
    heavy = [j for j in range(1, p + 1) if sizes[j - 1] > m - b]
    if len(heavy) > 1:
        raise RoutingError(f"sections {heavy} all exceed m - m/p actives")
    ledger.array_reads += p
    pr = _Pairer(conc, ledger)
    if heavy:
        _route_case_a(conc, R, heavy[0], pr)
        return pr.pairs, "a", None
    plan = reindex_plan(sizes, m, p)
    ledger.array_writes += 3 * p
    _route_case_b(conc, R, plan, pr)
    return pr.pairs, "b", plan


def _U(j: int, b: int) -> range:
    return range((j - 1) * b + 1, j * b + 1)


def _route_case_a(conc: Concentrator, R, j: int, pr: _Pairer) -> None:
    m, p = conc.m, conc.p
    b = m // p
    cyc = lambda t: (t - 1) % p + 1  # noqa: E731
    Uj = _U(j, b)
    paired: set[tuple[int, int]] = set()

    def take(sec: int, k: int, z: int) -> None:
        pr.pair(sec, k, z)
        paired.add((sec, k))

    # diagonals of W_j
    for k in R[j - 1]:
        pr.ledger.list_ops += 1
        if k in Uj:
            take(j, k, k)
    # other sections fill the rest of U_j
    free_Uj = deque(z for z in Uj if z not in pr.used_out)
    others = [(i, k) for i in range(1, p + 1) if i != j for k in R[i - 1]]
    pos = 0
    while free_Uj and pos < len(others):
        sec, k = others[pos]
        take(sec, k, free_Uj.popleft())
        pr.ledger.list_ops += 2
        pos += 1
    # R_{j-1} -> U_{j+1}
    prev, nxt = cyc(j - 1), cyc(j + 1)
    targets = deque(_U(nxt, b))
    for k in R[prev - 1]:
        pr.ledger.list_ops += 1
        if (prev, k) not in paired:
            take(prev, k, targets.popleft())
    # remaining sections -> U_{j-1}
    targets = deque(_U(prev, b))
    for i in range(1, p + 1):
        if i in (j, prev):
            continue
        for k in R[i - 1]:
            pr.ledger.list_ops += 1
            if (i, k) not in paired:
                take(i, k, targets.popleft())
    # leftover R_j -> free V_j
    free_V = deque(z for z in conc.sections[j - 1].V if z not in pr.used_out)
    pr.ledger.list_ops += len(conc.sections[j - 1].V)
    for k in R[j - 1]:
        if (j, k) not in paired:
            take(j, k, free_V.popleft())
            pr.ledger.list_ops += 1


def _route_case_b(conc: Concentrator, R, plan: ReindexPlan, pr: _Pairer) -> None:
    m, p = conc.m, conc.p
    b = m // p
    d = plan.d
    rp = plan.r[-1]
    # orig[t-1] is the original section renamed to t
    orig = [0] * p
    for j in range(1, p + 1):
        orig[d[j - 1] - 1] = j
    pr.ledger.array_writes += p
    if rp == 0:
        # every section holds exactly m/p actives: shift each onto the
        # previous section's U block, cyclically
        for t in range(1, p + 1):
            sec = orig[t - 1]
            for k, z in zip(R[sec - 1], _U(orig[(t - 2) % p], b)):
                pr.pair(sec, k, z)
            pr.ledger.list_ops += b
        return
    Q: dict[int, list[int]] = {}
    for t in range(2, rp + 1):
        sec = orig[t - 1]
        entries = R[sec - 1]
        outs = _U(orig[t - 2], b)
        for k, z in zip(entries[:b], outs):
            pr.pair(sec, k, z)
        Q[t] = entries[b:]
        # b removals plus one splice for the remainder
        pr.ledger.list_ops += b + 1
    tail_in = []
    for t in list(range(rp + 1, p + 1)) + [1]:
        sec = orig[t - 1]
        tail_in.extend((sec, k) for k in R[sec - 1])
    for t in range(2, rp + 1):
        tail_in.extend((orig[t - 1], k) for k in Q[t])
    tail_out = [z for t in range(rp, p + 1) for z in _U(orig[t - 1], b)]
    # one splice per concatenated list, one removal per paired input
    pr.ledger.list_ops += 2 * p + len(tail_in)
    if len(tail_in) != len(tail_out):
        raise RoutingError(f"tail has {len(tail_in)} inputs for {len(tail_out)} outputs")
    for pos, (sec, k) in enumerate(tail_in):
        if not _fits(conc, sec, k, tail_out[pos]):
            for alt in range(pos + 1, len(tail_out)):
                if _fits(conc, sec, k, tail_out[alt]):
                    tail_out[pos], tail_out[alt] = tail_out[alt], tail_out[pos]
                    pr.ledger.guard_swaps += 1
                    break
            else:
                raise RoutingError(f"no compatible tail output for x_({sec},{k})")
        pr.pair(sec, k, tail_out[pos])


def _fits(conc: Concentrator, sec: int, k: int, z: int) -> bool:
    # x_{sec,k} misses exactly the off-diagonal outputs of U_sec
    return (z - 1) // (conc.m // conc.p) + 1 != sec or z == k


def route_regular_classical(conc: Concentrator, req: Request) -> tuple[Assignment, StepLedger]:
    _check_kind(conc, Kind.REGULAR)
    _check_completed(conc, req)
    ledger = StepLedger()
    R = collect_sections(conc, req.bits, ledger)
    pairs, case, plan = route_regular_sections(conc, R, ledger)
    return Assignment(tuple(pairs), case=case, plan=plan), ledger


_ROUTERS = {
    Kind.FULL: route_full_classical,
    Kind.BOUNDED: route_bounded_classical,
    Kind.REGULAR: route_regular_classical,
}


def route_classical(conc: Concentrator, req: Request) -> tuple[Assignment, StepLedger]:
    """Dispatch on concentrator kind."""
    return _ROUTERS[conc.kind](conc, req)
