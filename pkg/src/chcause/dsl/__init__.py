"""The ``.chq`` scenario format: parser, document model and canonical renderer."""

from .document import EventSpec, FamilySpec, MatrixTerm, MemberRef, Query, ScenarioDoc
from .parser import parse_scenario
from .render import render_scenario

__all__ = [
    "EventSpec",
    "FamilySpec",
    "MatrixTerm",
    "MemberRef",
    "Query",
    "ScenarioDoc",
    "parse_scenario",
    "render_scenario",
]
