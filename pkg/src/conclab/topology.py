"""Explicit fat-and-slim sparse crossbar concentrators.

Three constructions are provided:

* ``FULL``: an (n, m) full-capacity crossbar.  Inputs ``1..n-m`` form the fat
  section and reach every output; input ``n-m+i`` reaches only output ``i``.
* ``BOUNDED``: an (n, m, c) crossbar with a slim diagonal on the left
  (inputs ``1..n-q``) and ``q`` fat inputs on the right, fat input ``y_i``
  reaching outputs ``i, i+q, ..., i+q(c-1)`` with ``c = m // q``.
* ``REGULAR``: a (pm, m) crossbar split into ``p`` sections of ``m`` inputs.
  Input ``x_{j,k}`` (flat index ``(j-1)m + k``) reaches every output outside
  ``U_j`` and, when it lies in ``W_j``, its diagonal output ``z_k``.

All indices are 1-based.  Adjacency is materialised per input so downstream
checks never re-derive it from the formulas above.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import yaml

__all__ = [
    "Kind",
    "Section",
    "Concentrator",
    "TopologyError",
    "TopologyParseError",
    "build_full_fat_slim",
    "build_bounded_fat_slim",
    "build_regular_fat_slim",
    "neighbors",
    "crosspoint_count",
    "serialize_topology",
    "parse_topology",
]


class TopologyError(ValueError):
    """Construction parameters violate a precondition."""


class TopologyParseError(ValueError):
    """Malformed topology document."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class Kind(str, enum.Enum):
    FULL = "full"
    BOUNDED = "bounded"
    REGULAR = "regular"


@dataclass(frozen=True)
class Section:
    """Index blocks of section ``j`` of a regular concentrator.

    ``inputs`` and ``W`` hold flat input indices, ``U`` and ``V`` output
    indices.
    """

    j: int
    inputs: range
    U: range
    V: tuple[int, ...]
    W: range


@dataclass(frozen=True)
class Concentrator:
    kind: Kind
    n: int
    m: int
    adjacency: tuple[tuple[int, ...], ...]
    q: Optional[int] = None
    c: Optional[int] = None
    p: Optional[int] = None
    sections: tuple[Section, ...] = field(default=())

    @property
    def capacity(self) -> int:
        """Designated capacity: ``c`` for bounded instances, ``m`` otherwise."""
        return self.c if self.kind is Kind.BOUNDED else self.m

    @property
    def params(self) -> dict[str, int]:
        if self.kind is Kind.BOUNDED:
            return {"q": self.q, "c": self.c}
        if self.kind is Kind.REGULAR:
            return {"p": self.p}
        return {}

    def flat_index(self, j: int, k: int) -> int:
        """Flat input index of ``x_{j,k}`` in a regular concentrator."""
        if self.kind is not Kind.REGULAR:
            raise TopologyError("section coordinates only exist for regular concentrators")
        if not (1 <= j <= self.p and 1 <= k <= self.m):
            raise TopologyError(f"x_({j},{k}) out of range for p={self.p}, m={self.m}")
        return (j - 1) * self.m + k

    def section_of(self, i: int) -> tuple[int, int]:
        """Inverse of :meth:`flat_index`: ``(j, k)`` for flat input ``i``."""
        if self.kind is not Kind.REGULAR:
            raise TopologyError("section coordinates only exist for regular concentrators")
        _check_input(self, i)
        j, k = divmod(i - 1, self.m)
        return j + 1, k + 1

    def output_degrees(self) -> list[int]:
        deg = [0] * self.m
        for outs in self.adjacency:
            for z in outs:
                deg[z - 1] += 1
        return deg

    def input_degrees(self) -> list[int]:
        return [len(outs) for outs in self.adjacency]

    def has_crosspoint(self, i: int, z: int) -> bool:
        return 1 <= i <= self.n and z in self.adjacency[i - 1]

    def __repr__(self) -> str:
        extra = "".join(f", {k}={v}" for k, v in self.params.items())
        return f"Concentrator({self.kind.value}, n={self.n}, m={self.m}{extra})"


def build_full_fat_slim(n: int, m: int) -> Concentrator:
    if m < 1 or m > n:
        raise TopologyError(f"full concentrator needs 1 <= m <= n, got n={n}, m={m}")
    fat = tuple(range(1, m + 1))
    adjacency = [fat] * (n - m) + [(i,) for i in range(1, m + 1)]
    return Concentrator(Kind.FULL, n, m, tuple(adjacency))


def build_bounded_fat_slim(n: int, m: int, q: int) -> Concentrator:
    if not n > m >= 1:
        raise TopologyError(f"bounded concentrator needs n > m >= 1, got n={n}, m={m}")
    if not n - m <= q <= m:
        raise TopologyError(f"bounded concentrator needs n-m <= q <= m, got q={q} with n-m={n - m}, m={m}")
    c = m // q
    adjacency: list[tuple[int, ...]] = [(i,) for i in range(1, n - q + 1)]
    for i in range(1, q + 1):
        adjacency.append(tuple(i + q * j for j in range(c)))
    return Concentrator(Kind.BOUNDED, n, m, tuple(adjacency), q=q, c=c)


def build_regular_fat_slim(p: int, m: int) -> Concentrator:
    if p < 3:
        raise TopologyError(f"regular concentrator needs p >= 3, got p={p}")
    if m < 1 or m % p:
        raise TopologyError(f"regular concentrator needs p | m, got p={p}, m={m}")
    b = m // p
    sections = []
    adjacency: list[tuple[int, ...]] = []
    for j in range(1, p + 1):
        U = range((j - 1) * b + 1, j * b + 1)
        V = tuple(z for z in range(1, m + 1) if z not in U)
        first = (j - 1) * m
        W = range(first + U.start, first + U.stop)
        sections.append(Section(j, range(first + 1, first + m + 1), U, V, W))
        for k in range(1, m + 1):
            if k in U:
                adjacency.append(tuple(sorted(V + (k,))))
            else:
                adjacency.append(V)
    return Concentrator(Kind.REGULAR, p * m, m, tuple(adjacency), p=p, sections=tuple(sections))


def _check_input(conc: Concentrator, i: int) -> None:
    if not 1 <= i <= conc.n:
        raise IndexError(f"input {i} out of range 1..{conc.n}")


def neighbors(conc: Concentrator, i: int) -> tuple[int, ...]:
    _check_input(conc, i)
    return conc.adjacency[i - 1]


def crosspoint_count(conc: Concentrator) -> int:
    return sum(len(outs) for outs in conc.adjacency)


# Text format
#
# A YAML document with fixed keys:
#
#   format: conclab-topology/1
#   kind: full | bounded | regular
#   n: <int>
#   m: <int>
#   params: {q: .., c: ..} | {p: ..} | {}
#   adjacency:
#     <input>: [<output>, ...]      one line per input, 1..n
#   sections:                       regular only
#     <j>: {inputs: [lo, hi], U: [lo, hi], V: [...], W: [lo, hi]}

FORMAT_TAG = "conclab-topology/1"
_REQUIRED = ("kind", "n", "m", "params", "adjacency")


def _span(r: range) -> str:
    return f"[{r.start}, {r.stop - 1}]"


def serialize_topology(conc: Concentrator) -> str:
    lines = [
        f"format: {FORMAT_TAG}",
        f"kind: {conc.kind.value}",
        f"n: {conc.n}",
        f"m: {conc.m}",
        "params: {" + ", ".join(f"{k}: {v}" for k, v in conc.params.items()) + "}",
        "adjacency:",
    ]
    for i, outs in enumerate(conc.adjacency, start=1):
        lines.append(f"  {i}: [{', '.join(map(str, outs))}]")
    if conc.sections:
        lines.append("sections:")
        for s in conc.sections:
            lines.append(
                f"  {s.j}: {{inputs: {_span(s.inputs)}, U: {_span(s.U)}, "
                f"V: [{', '.join(map(str, s.V))}], W: {_span(s.W)}}}"
            )
    return "\n".join(lines) + "\n"


def _int_field(doc: dict, key: str, where: str = "") -> int:
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise TopologyParseError(f"field '{where}{key}' must be an integer, got {value!r}")
    return value


def _range_field(value, what: str) -> range:
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) for v in value)):
        raise TopologyParseError(f"{what} must be a [lo, hi] pair, got {value!r}")
    return range(value[0], value[1] + 1)


def parse_topology(text: str) -> Concentrator:
    """Parse a document produced by :func:`serialize_topology`.

    Adjacency is taken verbatim from the document.  Errors carry the line
    (and column, when YAML reports one) of the offending content.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise TopologyParseError(str(getattr(exc, "problem", exc)), mark.line + 1, mark.column + 1) from None
        raise TopologyParseError(str(exc)) from None
    end_line = text.count("\n") + 1
    if not isinstance(doc, dict):
        raise TopologyParseError("document must be a mapping", 1)
    for key in _REQUIRED:
        if key not in doc:
            raise TopologyParseError(f"missing field '{key}'", end_line)
    if "format" in doc and doc["format"] != FORMAT_TAG:
        raise TopologyParseError(f"unsupported format {doc['format']!r}", _line_of(text, "format"))
    try:
        kind = Kind(doc["kind"])
    except ValueError:
        raise TopologyParseError(f"unknown kind {doc['kind']!r}", _line_of(text, "kind")) from None
    n = _int_field(doc, "n")
    m = _int_field(doc, "m")
    params = doc["params"] or {}
    if not isinstance(params, dict):
        raise TopologyParseError("field 'params' must be a mapping", _line_of(text, "params"))
    expected = {Kind.FULL: (), Kind.BOUNDED: ("q", "c"), Kind.REGULAR: ("p",)}[kind]
    for key in expected:
        if key not in params:
            raise TopologyParseError(f"missing field 'params.{key}'", _line_of(text, "params"))
        _int_field(params, key, "params.")

    adj_doc = doc["adjacency"]
    if not isinstance(adj_doc, dict):
        raise TopologyParseError("field 'adjacency' must be a mapping", _line_of(text, "adjacency"))
    adjacency = []
    for i in range(1, n + 1):
        if i not in adj_doc:
            raise TopologyParseError(f"missing field 'adjacency.{i}'", end_line)
        outs = adj_doc[i]
        if not isinstance(outs, list) or not all(isinstance(z, int) and 1 <= z <= m for z in outs):
            raise TopologyParseError(
                f"adjacency of input {i} must be a list of outputs in 1..{m}", _line_of(text, f"{i}", indent=2)
            )
        adjacency.append(tuple(outs))
    if len(adj_doc) != n:
        raise TopologyParseError(f"adjacency has {len(adj_doc)} entries, expected n={n}", _line_of(text, "adjacency"))

    sections: tuple[Section, ...] = ()
    if kind is Kind.REGULAR:
        sec_doc = doc.get("sections")
        if not isinstance(sec_doc, dict):
            raise TopologyParseError("missing field 'sections'", end_line)
        parsed = []
        for j in range(1, params["p"] + 1):
            s = sec_doc.get(j)
            if not isinstance(s, dict) or any(key not in s for key in ("inputs", "U", "V", "W")):
                raise TopologyParseError(f"missing or incomplete field 'sections.{j}'", end_line)
            parsed.append(
                Section(
                    j,
                    _range_field(s["inputs"], f"sections.{j}.inputs"),
                    _range_field(s["U"], f"sections.{j}.U"),
                    tuple(s["V"]),
                    _range_field(s["W"], f"sections.{j}.W"),
                )
            )
        sections = tuple(parsed)

    return Concentrator(
        kind,
        n,
        m,
        tuple(adjacency),
        q=params.get("q"),
        c=params.get("c"),
        p=params.get("p"),
        sections=sections,
    )


def _line_of(text: str, key: str, indent: int = 0) -> Optional[int]:
    prefix = " " * indent + key + ":"
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith(prefix):
            return lineno
    return None
