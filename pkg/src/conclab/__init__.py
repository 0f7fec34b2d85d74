"""Routing toolkit for fat-and-slim sparse crossbar concentrators."""

from .classical import (
    ReindexPlan,
    StepLedger,
    prefix_sum,
    reindex_plan,
    route_bounded_classical,
    route_classical,
    route_full_classical,
    route_regular_classical,
)
from .routing import Assignment, Request, ValidityReport, complete_request, parse_request, validate_assignment
from .topology import (
    Concentrator,
    Kind,
    build_bounded_fat_slim,
    build_full_fat_slim,
    build_regular_fat_slim,
    crosspoint_count,
    neighbors,
    parse_topology,
    serialize_topology,
)

__version__ = "0.1.0"
