"""Query-cost calibration table for the cost-model search engine.

Rows are ``(N, k, mean_queries, stdev)`` measured with the statevector
engine and no query budget.  Lookups interpolate in ``log(N/k)`` on the
normalised mean ``mean / sqrt(N/k)`` and on the coefficient of variation,
holding the end values constant outside the grid.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .grover import ConfigurationError, Oracle, StatevectorEngine

__all__ = [
    "CalibrationRow",
    "CalibrationTable",
    "DEFAULT_GRID",
    "calibrate",
    "load_default_table",
]

HEADER = ("N", "k", "mean_queries", "stdev")

DEFAULT_GRID: tuple[tuple[int, int], ...] = tuple(
    (N, k) for N in (4, 8, 16, 32, 64, 128, 256, 512, 1024) for k in (1, 2, 4, 8, 16, 32, 64) if k < N
)


@dataclass(frozen=True)
class CalibrationRow:
    N: int
    k: int
    mean_queries: float
    stdev: float


class CalibrationTable:
    def __init__(self, rows: Iterable[CalibrationRow]):
        self.rows = sorted(rows, key=lambda r: (r.N, r.k))
        if not self.rows:
            raise ConfigurationError("calibration table is empty")
        by_ratio: dict[float, list[CalibrationRow]] = {}
        for r in self.rows:
            if r.k < 1 or r.N < r.k or r.mean_queries <= 0:
                raise ConfigurationError(f"bad calibration row {r}")
            by_ratio.setdefault(math.log(r.N / r.k), []).append(r)
        xs = sorted(by_ratio)
        self._x = np.array(xs)
        self._norm = np.array([np.mean([r.mean_queries / math.sqrt(r.N / r.k) for r in by_ratio[x]]) for x in xs])
        self._cv = np.array([np.mean([r.stdev / r.mean_queries for r in by_ratio[x]]) for x in xs])

    def lookup(self, N: int, k: int) -> tuple[float, float]:
        """Mean and standard deviation of the unbounded query cost at ``(N, k)``."""
        if k < 1:
            raise ValueError("lookup needs k >= 1")
        x = math.log(N / k)
        scale = math.sqrt(N / k)
        mean = float(np.interp(x, self._x, self._norm)) * scale
        return mean, mean * float(np.interp(x, self._x, self._cv))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(HEADER)
        for r in self.rows:
            w.writerow([r.N, r.k, f"{r.mean_queries:.6f}", f"{r.stdev:.6f}"])
        return buf.getvalue()

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "CalibrationTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != HEADER:
            raise ConfigurationError(f"calibration header must be {','.join(HEADER)}, got {header}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            try:
                rows.append(CalibrationRow(int(rec[0]), int(rec[1]), float(rec[2]), float(rec[3])))
            except (ValueError, IndexError):
                raise ConfigurationError(f"line {lineno}: malformed calibration row {rec}") from None
        return cls(rows)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "CalibrationTable":
        try:
            text = Path(path).read_text()
        except FileNotFoundError:
            raise ConfigurationError(f"calibration table {path} not found; run 'conclab calibrate'") from None
        return cls.from_csv(text)


def load_default_table() -> CalibrationTable:
    try:
        text = resources.files("conclab").joinpath("data/calibration.csv").read_text()
    except FileNotFoundError:
        raise ConfigurationError("packaged calibration table missing; run 'conclab calibrate'") from None
    return CalibrationTable.from_csv(text)


def calibrate(
    grid: Sequence[tuple[int, int]] = DEFAULT_GRID,
    trials: int = 2000,
    seed: int = 0,
    rng: Optional[np.random.Generator] = None,
) -> CalibrationTable:
    """Measure unbounded statevector search costs on ``grid``."""
    engine = StatevectorEngine()
    rows = []
    for idx, (N, k) in enumerate(grid):
        gen = rng if rng is not None else np.random.default_rng([seed, idx])
        costs = np.empty(trials)
        for t in range(trials):
            oracle = Oracle.from_indices(N, range(k))
            costs[t] = engine.search(oracle, gen, math.inf).queries_used
        rows.append(CalibrationRow(N, k, float(costs.mean()), float(costs.std(ddof=1))))
    return CalibrationTable(rows)
