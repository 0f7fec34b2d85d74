"""Requests, assignments, request completion and assignment checking."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .topology import Concentrator, Kind

__all__ = [
    "Request",
    "Assignment",
    "ViolationKind",
    "Violation",
    "ValidityReport",
    "RoutingError",
    "RequestParseError",
    "complete_request",
    "validate_assignment",
    "parse_request",
]


class RoutingError(RuntimeError):
    """A router was handed a request outside its contract, or got stuck."""


class RequestParseError(ValueError):
    pass


@dataclass(frozen=True)
class Request:
    """Active-input bit array; ``bits[i-1]`` is input ``i``."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("request bits must be 0 or 1")

    @classmethod
    def from_indices(cls, n: int, active: Iterable[int]) -> "Request":
        bits = [0] * n
        for i in active:
            if not 1 <= i <= n:
                raise ValueError(f"active input {i} out of range 1..{n}")
            bits[i - 1] = 1
        return cls(tuple(bits))

    @classmethod
    def empty(cls, n: int) -> "Request":
        return cls((0,) * n)

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def k(self) -> int:
        return sum(self.bits)

    @property
    def active(self) -> list[int]:
        return [i for i, b in enumerate(self.bits, start=1) if b]

    def to_string(self) -> str:
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class Assignment:
    """Router output.

    ``unrouted`` lists active inputs a best-effort router could not place.
    ``plan`` carries the section reindexing used by regular routers, when
    one was computed.
    """

    pairs: tuple[tuple[int, int], ...]
    unrouted: tuple[int, ...] = ()
    case: Optional[str] = None
    plan: Optional[object] = None

    def __len__(self) -> int:
        return len(self.pairs)

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)


class ViolationKind(str, enum.Enum):
    UNPAIRED_ACTIVE_INPUT = "UnpairedActiveInput"
    DUPLICATE_INPUT = "DuplicateInput"
    DUPLICATE_OUTPUT = "DuplicateOutput"
    MISSING_CROSSPOINT = "MissingCrosspoint"
    INACTIVE_INPUT_PAIRED = "InactiveInputPaired"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str


@dataclass(frozen=True)
class ValidityReport:
    violations: tuple[Violation, ...] = field(default=())

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set[ViolationKind]:
        return {v.kind for v in self.violations}

    def __bool__(self) -> bool:
        return self.valid


def complete_request(conc: Concentrator, req: Request) -> Request:
    """Pad a k-request to an m-request with the lowest-indexed idle inputs.

    Full concentrators draw padding from the leftmost ``m`` inputs, regular
    ones from section ``I_1``; both blocks are inputs ``1..m``.  Bounded
    requests are returned unchanged.
    """
    if req.n != conc.n:
        raise ValueError(f"request has {req.n} bits, concentrator has n={conc.n} inputs")
    if conc.kind is Kind.BOUNDED:
        return req
    k = req.k
    if k > conc.m:
        raise RoutingError(f"request has {k} active inputs, more than m={conc.m}")
    need = conc.m - k
    if need == 0:
        return req
    bits = list(req.bits)
    for i in range(conc.m):
        if need == 0:
            break
        if not bits[i]:
            bits[i] = 1
            need -= 1
    return Request(tuple(bits))


def validate_assignment(conc: Concentrator, req: Request, asg: Assignment | Sequence[tuple[int, int]]) -> ValidityReport:
    pairs = asg.pairs if isinstance(asg, Assignment) else tuple(asg)
    out: list[Violation] = []
    seen_in: dict[int, int] = {}
    seen_out: dict[int, int] = {}
    for i, z in pairs:
        if i in seen_in:
            out.append(Violation(ViolationKind.DUPLICATE_INPUT, f"input {i} paired with {seen_in[i]} and {z}"))
        else:
            seen_in[i] = z
        if z in seen_out:
            out.append(Violation(ViolationKind.DUPLICATE_OUTPUT, f"output {z} used by {seen_out[z]} and {i}"))
        else:
            seen_out[z] = i
        if not 1 <= i <= conc.n or not req.bits[i - 1]:
            out.append(Violation(ViolationKind.INACTIVE_INPUT_PAIRED, f"input {i} is not active"))
        if not conc.has_crosspoint(i, z):
            out.append(Violation(ViolationKind.MISSING_CROSSPOINT, f"no crosspoint ({i}, {z})"))
    for i in req.active:
        if i not in seen_in:
            out.append(Violation(ViolationKind.UNPAIRED_ACTIVE_INPUT, f"active input {i} not paired"))
    return ValidityReport(tuple(out))


_INDEX_LIST = re.compile(r"^\[?\s*\d+(\s*[,\s]\s*\d+)*\s*\]?$")


def parse_request(text: str, n: int) -> Request:
    """Parse a bit string (``"0101..."``, whitespace and ``_`` ignored) or an
    index list (``"1,3,7"`` / ``"[1, 3, 7]"``).

    Strings of 0/1 characters without commas or brackets are bit strings
    and must have length ``n``; a lone index such as ``10`` must be written
    ``[10]``.
    """
    s = text.strip()
    if s in ("", "[]"):
        return Request.empty(n)
    compact = re.sub(r"[\s_]", "", s)
    if set(compact) <= {"0", "1"} and "," not in s and not s.startswith("["):
        if len(compact) != n:
            raise RequestParseError(
                f"bit-string request has length {len(compact)}, expected n={n} (write index lists as [i, j, ...])"
            )
        return Request(tuple(int(ch) for ch in compact))
    if not _INDEX_LIST.match(s):
        raise RequestParseError(f"cannot parse request {text!r}: expected {n} bits or an index list")
    idx = [int(tok) for tok in re.findall(r"\d+", s)]
    bad = [i for i in idx if not 1 <= i <= n]
    if bad:
        raise RequestParseError(f"request indices {bad} out of range 1..{n}")
    if len(set(idx)) != len(idx):
        raise RequestParseError("request index list has duplicates")
    return Request.from_indices(n, idx)
