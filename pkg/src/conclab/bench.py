"""Sweep harness: route random requests over a grid of instance sizes and
emit one CSV row per (instance, trial, router)."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .classical import route_classical
from .grover import CostModelEngine, StatevectorEngine
from .quantum import route_quantum
from .routing import Request, complete_request, validate_assignment
from .topology import (
    Concentrator,
    Kind,
    build_bounded_fat_slim,
    build_full_fat_slim,
    build_regular_fat_slim,
)

__all__ = [
    "CSV_HEADER",
    "MAX_STATEVECTOR_N",
    "ExperimentSpec",
    "ResultRow",
    "SweepSummary",
    "build_instance",
    "loglog_fit",
    "run_sweep",
    "run_trial",
    "rows_to_csv",
    "summarize",
]

CSV_HEADER = ("n", "m", "k", "router", "engine", "trial", "quantum_queries", "classical_steps", "valid", "failed", "seed")
MAX_STATEVECTOR_N = 2**20


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str = "full"
    n_values: tuple[int, ...] = (64, 256, 1024, 4096)
    c: Optional[int] = None
    k: Optional[int] = None
    routers: tuple[str, ...] = ("classical", "quantum")
    engine: str = "cost-model"
    trials: int = 5
    delta: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if not self.n_values or any(n < 2 for n in self.n_values):
            raise ValueError("n_values must be non-empty and >= 2")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.engine not in ("statevector", "cost-model"):
            raise ValueError(f"unknown engine {self.engine!r}")
        bad = set(self.routers) - {"classical", "quantum"}
        if bad:
            raise ValueError(f"unknown routers {sorted(bad)}")
        Kind(self.kind)


@dataclass(frozen=True)
class ResultRow:
    n: int
    m: int
    k: int
    router: str
    engine: str
    trial: int
    quantum_queries: int
    classical_steps: int
    valid: bool
    failed: bool
    seed: int


def build_instance(kind: str, n: int, c: Optional[int] = None) -> Concentrator:
    """Sweep instance of size ``n``.

    full: ``m = round(sqrt(n))``.  regular: ``m = p = sqrt(n)``, so ``n`` must
    be a perfect square.  bounded: with ``c`` given, ``q = n // (c+1)`` and
    ``m = n - q``; otherwise ``q = ceil(sqrt(n))``.
    """
    kind = Kind(kind)
    if kind is Kind.FULL:
        return build_full_fat_slim(n, max(1, round(math.sqrt(n))))
    if kind is Kind.REGULAR:
        m = math.isqrt(n)
        if m * m != n:
            raise ValueError(f"regular sweep needs square n, got {n}")
        return build_regular_fat_slim(m, m)
    q = n // (c + 1) if c is not None else math.ceil(math.sqrt(n))
    return build_bounded_fat_slim(n, n - q, q)


def _window(conc: Concentrator) -> int:
    return conc.n - conc.m if conc.kind is Kind.FULL else conc.n


def _row_seed(base: int, index: int) -> int:
    return int(np.random.SeedSequence([base, index]).generate_state(1)[0])


def run_trial(conc: Concentrator, k: int, routers: Sequence[str], engine: str, delta: float, trial: int, seed: int):
    """All rows for one trial; fully determined by ``seed``."""
    rng = np.random.default_rng(seed)
    active = rng.choice(conc.n, size=k, replace=False) + 1
    req = complete_request(conc, Request.from_indices(conc.n, active.tolist()))
    rows = []
    for router in routers:
        if router == "classical":
            asg, ledger = route_classical(conc, req)
            valid = validate_assignment(conc, req, asg).valid
            rows.append(ResultRow(conc.n, conc.m, req.k, router, "classical", trial, 0, ledger.total, valid, False, seed))
        else:
            eng = StatevectorEngine() if engine == "statevector" else CostModelEngine()
            res = route_quantum(conc, req, rng, delta, engine=eng)
            valid = validate_assignment(conc, req, res.assignment).valid
            rows.append(
                ResultRow(
                    conc.n, conc.m, req.k, router, engine, trial,
                    res.quantum_queries, res.classical_steps.total, valid, res.failed, seed,
                )
            )
    return rows


def _job(args):
    return run_trial(*args)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("CONCLAB_THREADS", "1")))
    except ValueError:
        return 1


def run_sweep(spec: ExperimentSpec, workers: Optional[int] = None) -> list[ResultRow]:
    jobs = []
    for inst_idx, n in enumerate(spec.n_values):
        conc = build_instance(spec.kind, n, spec.c)
        if spec.engine == "statevector" and "quantum" in spec.routers and _window(conc) > MAX_STATEVECTOR_N:
            raise ValueError(f"statevector engine infeasible for window {_window(conc)} > 2^20; use cost-model")
        k = spec.k if spec.k is not None else conc.capacity
        if k > conc.capacity:
            raise ValueError(f"k={k} exceeds capacity {conc.capacity} at n={n}")
        for t in range(spec.trials):
            seed = _row_seed(spec.seed, inst_idx * spec.trials + t)
            jobs.append((conc, k, spec.routers, spec.engine, spec.delta, t, seed))
    workers = workers if workers is not None else _workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_job, jobs))
    else:
        chunks = [_job(j) for j in jobs]
    return [row for chunk in chunks for row in chunk]


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        d = asdict(r)
        w.writerow([int(d[h]) if isinstance(d[h], bool) else d[h] for h in CSV_HEADER])
    return buf.getvalue()


def loglog_fit(x, y) -> tuple[float, float, float]:
    """Least squares ``log y = slope * log x + intercept``; returns ``(slope, intercept, r2)``."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


@dataclass
class SweepSummary:
    n: list = field(default_factory=list)
    classical_mean: list = field(default_factory=list)
    quantum_mean: list = field(default_factory=list)
    classical_slope: Optional[float] = None
    classical_r2: Optional[float] = None
    quantum_slope: Optional[float] = None
    quantum_r2: Optional[float] = None
    crossover_n: Optional[int] = None
    failures: int = 0
    invalid: int = 0

    def lines(self) -> list[str]:
        out = []
        if self.classical_slope is not None:
            out.append(f"classical steps vs n: slope {self.classical_slope:.3f} (R^2 {self.classical_r2:.4f})")
        if self.quantum_slope is not None:
            out.append(
                f"quantum queries vs sqrt(n k) ln k: slope {self.quantum_slope:.3f} (R^2 {self.quantum_r2:.4f})"
            )
        if self.classical_mean and self.quantum_mean:
            out.append(
                "crossover n*: " + (str(self.crossover_n) if self.crossover_n is not None else "not reached in sweep")
            )
        out.append(f"failed quantum trials: {self.failures}; invalid assignments: {self.invalid}")
        return out


def summarize(rows: Sequence[ResultRow]) -> SweepSummary:
    """Per-n means, fitted exponents and the first n where the quantum cost
    (queries plus classical steps) drops below the classical step count."""
    s = SweepSummary()
    ns = sorted({r.n for r in rows})
    xs = []
    for n in ns:
        cl = [r.classical_steps for r in rows if r.n == n and r.router == "classical"]
        qu = [r for r in rows if r.n == n and r.router == "quantum"]
        s.n.append(n)
        if cl:
            s.classical_mean.append(float(np.mean(cl)))
        if qu:
            s.quantum_mean.append(float(np.mean([r.quantum_queries + r.classical_steps for r in qu])))
            k = qu[0].k
            xs.append(math.sqrt(n * k) * math.log(max(k, 2)))
    s.failures = sum(r.failed for r in rows)
    s.invalid = sum(not r.valid for r in rows if not r.failed)
    if len(ns) >= 2 and s.classical_mean:
        s.classical_slope, _, s.classical_r2 = loglog_fit(ns, s.classical_mean)
    if len(ns) >= 2 and s.quantum_mean:
        qq = [float(np.mean([r.quantum_queries for r in rows if r.n == n and r.router == "quantum"])) for n in ns]
        s.quantum_slope, _, s.quantum_r2 = loglog_fit(xs, qq)
    if s.classical_mean and s.quantum_mean:
        for n, c, q in zip(ns, s.classical_mean, s.quantum_mean):
            if q < c:
                s.crossover_n = n
                break
    return s
