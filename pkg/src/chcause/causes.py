"""Cause identification in a consistent family of histories.

F at an earlier time is a cause of G at a later time when both
Pr(G|F) and Pr(F|G) reach the threshold.  The two conditions are
symmetric in F and G, so the time order is checked separately.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from . import numerics as nx
from .errors import CombinatorialLimit, FrameworkMismatch, UndefinedConditional
from .histories import HistoryFamily, check_consistency
from .numerics import TolLike, eps_of
from .projectors import MAX_MEMBERS, Projector, require_member_subset

DEFAULT_THRESHOLD = 1 - 1e-6


@dataclass(frozen=True, eq=False)
class Event:
    time_index: int
    projector: Projector
    label: str = ""

    def __str__(self):
        return self.label or f"t{self.time_index}:<projector>"


def event(fam: HistoryFamily, t, *labels: str) -> Event:
    """Event made of the named PDI members at time ``t``."""
    k = fam.time_index(t)
    pdi = fam.pdis[k - 1]
    idx = [pdi.index(x) for x in labels]
    name = "|".join(labels)
    return Event(k, pdi.sum_of(idx), f"{fam.times[k]}:{name}")


class Classification(str, enum.Enum):
    CAUSE = "Cause"
    REVERSE_ORDER = "ReverseOrder"
    UNSUPPORTED = "Unsupported"
    UNDEFINED_CONDITIONAL = "UndefinedConditional"


@dataclass(frozen=True)
class CausalVerdict:
    f: Event
    g: Event
    p_g_given_f: Optional[float]
    p_f_given_g: Optional[float]
    classification: Classification


@dataclass(frozen=True)
class CommonCause:
    candidate: Event
    to_f: CausalVerdict
    to_g: CausalVerdict


@dataclass(frozen=True)
class CommonCauseResult:
    f: Event
    g: Event
    candidates: tuple[CommonCause, ...]


@dataclass(frozen=True)
class InterventionComparison:
    f: Event
    g: Event
    base_conditional: float
    intervened_conditional: float
    changed: bool


class _Analysis:
    """Per-family, per-eps view: history probabilities plus event masks."""

    def __init__(self, fam: HistoryFamily, eps: float):
        report = check_consistency(fam, eps)
        report.require_consistent()
        self.fam = fam
        self.eps = eps
        self.probs = report.diagonal.copy()
        self.choice = np.array(report.histories, dtype=np.int64).reshape(len(report.histories), fam.n_times)

    def mask(self, e: Event) -> np.ndarray:
        k = self.fam.time_index(e.time_index)
        subset = require_member_subset(self.fam.framework_at(k), e.projector, self.eps, what=str(e))
        return np.isin(self.choice[:, k - 1], subset)

    def prob(self, *events: Event) -> float:
        m = np.ones(len(self.probs), dtype=bool)
        for e in events:
            m &= self.mask(e)
        return float(self.probs[m].sum())


def _analysis(fam: HistoryFamily, tol: TolLike) -> _Analysis:
    eps = eps_of(tol)
    key = ("analysis", eps)
    a = fam._cache.get(key)
    if a is None:
        a = _Analysis(fam, eps)
        fam._cache[key] = a
    return a


def event_probability(fam: HistoryFamily, e: Event, tol: TolLike = None) -> float:
    return _analysis(fam, tol).prob(e)


def joint_probability(fam: HistoryFamily, *events: Event, tol: TolLike = None) -> float:
    return _analysis(fam, tol).prob(*events)


def conditional_probability(fam: HistoryFamily, g: Event, f: Event, tol: TolLike = None) -> float:
    """Pr(G | F) = Pr(F, G) / Pr(F)."""
    a = _analysis(fam, tol)
    pf = a.prob(f)
    if pf <= a.eps:
        raise UndefinedConditional(f"Pr({f}) = {pf:.3g} is zero; Pr(. | {f}) is undefined")
    return min(1.0, max(0.0, a.prob(f, g) / pf))


def classify_cause(
    fam: HistoryFamily,
    f: Event,
    g: Event,
    threshold: float = DEFAULT_THRESHOLD,
    tol: TolLike = None,
) -> CausalVerdict:
    a = _analysis(fam, tol)
    pf, pg, pfg = a.prob(f), a.prob(g), a.prob(f, g)
    g_given_f = min(1.0, pfg / pf) if pf > a.eps else None
    f_given_g = min(1.0, pfg / pg) if pg > a.eps else None
    if g_given_f is None or f_given_g is None:
        cls = Classification.UNDEFINED_CONDITIONAL
    elif g_given_f >= threshold and f_given_g >= threshold:
        cls = Classification.CAUSE if f.time_index < g.time_index else Classification.REVERSE_ORDER
    else:
        cls = Classification.UNSUPPORTED
    return CausalVerdict(f, g, g_given_f, f_given_g, cls)


def _candidate_events(fam: HistoryFamily, k: int):
    pdi = fam.pdis[k - 1]
    m = len(pdi)
    if m > MAX_MEMBERS:
        raise CombinatorialLimit(f"PDI at {fam.times[k]} has {m} members, limit is {MAX_MEMBERS}")
    for r in range(1, m):
        for subset in combinations(range(m), r):
            label = f"{fam.times[k]}:" + "|".join(pdi.labels[j] for j in subset)
            yield frozenset(subset), Event(k, pdi.sum_of(subset), label)


def _minimal(found: list[tuple[int, frozenset, object]]) -> list:
    keep = []
    for k, s, item in found:
        if not any(k2 == k and s2 < s for k2, s2, _ in found):
            keep.append(item)
    return keep


def _is_identity(p: Projector, eps: float) -> bool:
    return nx.max_abs(p.matrix - nx.identity(p.dim)) <= eps


def find_causes(
    fam: HistoryFamily,
    g: Event,
    threshold: float = DEFAULT_THRESHOLD,
    tol: TolLike = None,
) -> list[CausalVerdict]:
    """All minimal earlier events that are causes of ``g``.

    Candidates are every proper sub-sum of the PDI members at each earlier
    time; the identity is never a candidate.  Among causes at one time,
    only those not containing another cause are returned.
    """
    a = _analysis(fam, tol)
    a.mask(g)
    if _is_identity(g.projector, a.eps):
        return []
    found = []
    for k in range(1, g.time_index):
        for subset, f in _candidate_events(fam, k):
            v = classify_cause(fam, f, g, threshold, a.eps)
            if v.classification is Classification.CAUSE:
                found.append((k, subset, v))
    return _minimal(found)


def find_common_causes(
    fam: HistoryFamily,
    f: Event,
    g: Event,
    threshold: float = DEFAULT_THRESHOLD,
    tol: TolLike = None,
) -> CommonCauseResult:
    """Events at times before both ``f`` and ``g`` that cause each of them."""
    a = _analysis(fam, tol)
    a.mask(f)
    a.mask(g)
    found = []
    for k in range(1, min(f.time_index, g.time_index)):
        for subset, c in _candidate_events(fam, k):
            to_f = classify_cause(fam, c, f, threshold, a.eps)
            if to_f.classification is not Classification.CAUSE:
                continue
            to_g = classify_cause(fam, c, g, threshold, a.eps)
            if to_g.classification is Classification.CAUSE:
                found.append((k, subset, CommonCause(c, to_f, to_g)))
    return CommonCauseResult(f, g, tuple(_minimal(found)))


def _same_framework(base: HistoryFamily, other: HistoryFamily, k: int, eps: float) -> bool:
    p, q = base.pdis[k - 1], other.pdis[k - 1]
    if base.times[k] != other.times[k] or len(p) != len(q):
        return False
    return all(nx.max_abs(x.matrix - y.matrix) <= eps for x, y in zip(p.members, q.members))


def compare_intervention(
    base: HistoryFamily,
    intervened: HistoryFamily,
    f: Event,
    g: Event,
    tol: TolLike = None,
) -> InterventionComparison:
    """Pr(G|F) with and without an intervention on the dynamics."""
    eps = eps_of(tol)
    if base.dim != intervened.dim or base.n_times != intervened.n_times:
        raise FrameworkMismatch("base and intervened families have different shapes")
    for e in (f, g):
        if not _same_framework(base, intervened, e.time_index, eps):
            raise FrameworkMismatch(f"framework at the time of {e} differs between the families")
    before = conditional_probability(base, g, f, eps)
    after = conditional_probability(intervened, g, f, eps)
    return InterventionComparison(f, g, before, after, abs(before - after) > eps)
