"""Resolved scenario documents.

A :class:`ScenarioDoc` holds numeric values only: every builder call in
the source (``rot``, ``kron``, ``proj``...) has already been evaluated.
Event terms that name PDI members are kept symbolic so reports can print
them by label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ..causes import Event
from ..histories import HistoryFamily
from ..projectors import PDI, Projector


@dataclass(frozen=True)
class FamilySpec:
    initial: str
    steps: tuple[str, ...]
    pdis: tuple[str, ...]


@dataclass(frozen=True)
class MemberRef:
    pdi: str
    label: str


@dataclass(frozen=True, eq=False)
class MatrixTerm:
    matrix: np.ndarray

    def __eq__(self, other):
        return isinstance(other, MatrixTerm) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.matrix.tobytes())


Term = Union[MemberRef, MatrixTerm]


@dataclass(frozen=True)
class EventSpec:
    time: str
    terms: tuple[Term, ...]
    text: str = field(default="", compare=False)


QUERY_KINDS = ("consistency", "probs", "cause", "causes", "common_cause", "compare")


@dataclass(frozen=True)
class Query:
    kind: str
    events: tuple[EventSpec, ...] = ()


def _arrays_equal(a: dict, b: dict) -> bool:
    return a.keys() == b.keys() and all(np.array_equal(a[k], b[k]) for k in a)


def _pdis_equal(a: dict[str, PDI], b: dict[str, PDI]) -> bool:
    if a.keys() != b.keys():
        return False
    for k in a:
        p, q = a[k], b[k]
        if p.labels != q.labels:
            return False
        if not all(np.array_equal(x.matrix, y.matrix) for x, y in zip(p.members, q.members)):
            return False
    return True


@dataclass(eq=False)
class ScenarioDoc:
    space: tuple[int, ...]
    kets: dict[str, np.ndarray]
    unitaries: dict[str, np.ndarray]
    pdis: dict[str, PDI]
    times: tuple[str, ...]
    family: FamilySpec
    intervened: Optional[FamilySpec] = None
    queries: tuple[Query, ...] = ()
    eps: float = 1e-9
    _families: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        d = 1
        for f in self.space:
            d *= f
        return d

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScenarioDoc):
            return NotImplemented
        return (
            self.space == other.space
            and self.times == other.times
            and self.family == other.family
            and self.intervened == other.intervened
            and self.queries == other.queries
            and _arrays_equal(self.kets, other.kets)
            and _arrays_equal(self.unitaries, other.unitaries)
            and _pdis_equal(self.pdis, other.pdis)
        )

    def build(self, spec: FamilySpec, name: str = "family") -> HistoryFamily:
        key = (spec, name)
        fam = self._families.get(key)
        if fam is None:
            fam = HistoryFamily(
                initial=self.kets[spec.initial],
                times=self.times,
                steps=tuple(self.unitaries[u] for u in spec.steps),
                pdis=tuple(self.pdis[p] for p in spec.pdis),
                name=name,
                tol=self.eps,
            )
            self._families[key] = fam
        return fam

    def base_family(self) -> HistoryFamily:
        return self.build(self.family, "family")

    def intervened_family(self) -> Optional[HistoryFamily]:
        if self.intervened is None:
            return None
        return self.build(self.intervened, "intervened")

    def event(self, spec: EventSpec) -> Event:
        total = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for t in spec.terms:
            if isinstance(t, MemberRef):
                total = total + self.pdis[t.pdi].member(t.label).matrix
            else:
                total = total + t.matrix
        return Event(self.times.index(spec.time), Projector(total, self.eps), spec.text or spec.time)
