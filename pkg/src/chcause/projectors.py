"""Projectors, projective decompositions of the identity, and frameworks.

A framework is represented by its PDI; its event algebra is every sum of
a subset of the PDI members.  Products of projectors are only ever formed
through :func:`conjunction`, which refuses non-commuting pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Optional, Sequence

import numpy as np

from . import numerics as nx
from .errors import (
    CombinatorialLimit,
    DimensionError,
    IncompletePDI,
    MeaninglessConjunction,
    NonOrthogonal,
    NotAProjector,
    NotInFramework,
    NotNormalized,
)
from .numerics import TolLike, eps_of

MAX_MEMBERS = 16


@dataclass(frozen=True, eq=False)
class Projector:
    """A Hermitian idempotent matrix, i.e. a quantum property."""

    matrix: np.ndarray
    tol: TolLike = field(default=None, repr=False)

    def __post_init__(self):
        m = nx.as_matrix(self.matrix, "projector")
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"projector must be square, got shape {m.shape}")
        if not is_projector(m, self.tol):
            raise NotAProjector(
                f"matrix is not Hermitian idempotent within eps={eps_of(self.tol):g}"
            )
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.matrix).real))

    def __repr__(self):
        return f"Projector(dim={self.dim}, rank={self.rank})"

    def complement(self) -> "Projector":
        return Projector(nx.identity(self.dim) - self.matrix, self.tol)

    def is_zero(self, tol: TolLike = None) -> bool:
        return nx.max_abs(self.matrix) <= eps_of(tol)

    def __add__(self, other: "Projector") -> "Projector":
        return Projector(self.matrix + other.matrix, self.tol)


def identity_projector(d: int) -> Projector:
    return Projector(nx.identity(d))


def projector_from_ket(psi, tol: TolLike = None) -> Projector:
    """Return the rank-one projector |psi><psi|; psi must be normalized."""
    psi = nx.as_ket(psi)
    n = float(np.linalg.norm(psi))
    if abs(n - 1.0) > eps_of(tol):
        raise NotNormalized(n)
    return Projector(np.outer(psi, psi.conj()), tol)


def is_projector(m, tol: TolLike = None) -> bool:
    m = nx.as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"is_projector needs a square matrix, got shape {m.shape}")
    eps = eps_of(tol)
    return nx.max_abs(m - m.conj().T) <= eps and nx.max_abs(m @ m - m) <= eps


def _same_dim(p: Projector, q: Projector) -> None:
    if p.dim != q.dim:
        raise DimensionError(f"projectors act on different spaces ({p.dim} vs {q.dim})")


def commutator_norm(p: Projector, q: Projector) -> float:
    _same_dim(p, q)
    return nx.max_abs(p.matrix @ q.matrix - q.matrix @ p.matrix)


def commutes(p: Projector, q: Projector, tol: TolLike = None) -> bool:
    return commutator_norm(p, q) <= eps_of(tol)


def conjunction(p: Projector, q: Projector, tol: TolLike = None, names=("P", "Q")) -> Projector:
    """The property "p AND q"; refused when p and q do not commute."""
    c = commutator_norm(p, q)
    if c > eps_of(tol):
        raise MeaninglessConjunction(
            f"{names[0]} AND {names[1]} is meaningless: the projectors do not commute "
            f"(max |[P,Q]| = {c:.6g})"
        )
    return Projector(p.matrix @ q.matrix, tol)


@dataclass(frozen=True, eq=False)
class PDI:
    """Mutually orthogonal projectors summing to the identity, with labels."""

    members: tuple[Projector, ...]
    labels: tuple[str, ...]

    @property
    def dim(self) -> int:
        return self.members[0].dim

    def __len__(self) -> int:
        return len(self.members)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no PDI member labelled {label!r} (have {list(self.labels)})") from None

    def __repr__(self):
        return f"PDI({', '.join(self.labels)})"

    def member(self, label: str) -> Projector:
        return self.members[self.index(label)]

    def sum_of(self, indices: Iterable[int]) -> Projector:
        m = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for j in indices:
            m = m + self.members[j].matrix
        return Projector(m)


def validate_pdi(
    candidate: Sequence, tol: TolLike = None, labels: Optional[Sequence[str]] = None
) -> PDI:
    """Check the PDI axioms and return the validated PDI.

    Raises NotAProjector, NonOrthogonal or IncompletePDI, in that order of
    checking.
    """
    if not candidate:
        raise IncompletePDI("a PDI needs at least one member")
    eps = eps_of(tol)
    members = []
    for j, c in enumerate(candidate):
        if isinstance(c, Projector):
            members.append(c)
            continue
        m = nx.as_matrix(c, f"member {j}")
        if m.shape[0] != m.shape[1] or not is_projector(m, eps):
            raise NotAProjector(f"member {j} is not a projector")
        members.append(Projector(m, eps))
    d = members[0].dim
    for j, p in enumerate(members):
        if p.dim != d:
            raise DimensionError(f"member {j} has dimension {p.dim}, expected {d}")
        if not is_projector(p.matrix, eps):
            raise NotAProjector(f"member {j} is not a projector within eps={eps:g}")
    if labels is None:
        labels = [str(j) for j in range(len(members))]
    labels = tuple(str(x) for x in labels)
    if len(labels) != len(members):
        raise ValueError(f"{len(labels)} labels for {len(members)} members")
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate PDI labels: {labels}")
    for j in range(len(members)):
        for k in range(j + 1, len(members)):
            overlap = nx.max_abs(members[j].matrix @ members[k].matrix)
            if overlap > eps:
                raise NonOrthogonal(
                    f"members {labels[j]!r} and {labels[k]!r} overlap (max |PjPk| = {overlap:.6g})"
                )
    total = sum(p.matrix for p in members)
    gap = nx.max_abs(total - nx.identity(d))
    if gap > eps:
        raise IncompletePDI(f"members sum to I only within {gap:.6g}")
    return PDI(tuple(members), labels)


@dataclass(frozen=True, eq=False)
class Framework:
    pdi: PDI

    @property
    def dim(self) -> int:
        return self.pdi.dim


def framework_of(pdi: PDI) -> Framework:
    return Framework(pdi)


def generate_framework(
    commuting: Sequence[Projector],
    tol: TolLike = None,
    names: Optional[Sequence[str]] = None,
) -> Framework:
    """Build the PDI generated by commuting projectors via complements and products.

    Members are the nonzero products Q1 Q2 ... with each Qi either Pi or
    I - Pi.  Labels are built from ``names`` as ``A&~B`` style strings.
    """
    eps = eps_of(tol)
    if not commuting:
        raise ValueError("need at least one projector")
    if len(commuting) > MAX_MEMBERS:
        raise CombinatorialLimit(f"{len(commuting)} generators exceeds the limit of {MAX_MEMBERS}")
    names = list(names) if names is not None else [f"P{j}" for j in range(len(commuting))]
    d = commuting[0].dim
    for j, p in enumerate(commuting):
        if p.dim != d:
            raise DimensionError(f"generator {names[j]} has dimension {p.dim}, expected {d}")
        for k in range(j):
            if not commutes(commuting[k], p, eps):
                raise MeaninglessConjunction(
                    f"{names[k]} and {names[j]} do not commute; they generate no framework"
                )
    members, labels = [], []
    for signs in product((True, False), repeat=len(commuting)):
        m = nx.identity(d)
        for keep, p in zip(signs, commuting):
            m = m @ (p.matrix if keep else nx.identity(d) - p.matrix)
        if nx.max_abs(m) <= eps:
            continue
        members.append(Projector(m, eps))
        labels.append("&".join(n if keep else "~" + n for keep, n in zip(signs, names)))
    return Framework(validate_pdi(members, eps, labels))


def member_subset(f: Framework, p: Projector, tol: TolLike = None) -> Optional[tuple[int, ...]]:
    """Indices of the PDI members whose sum is ``p``, or None if there are none.

    Members are orthogonal, so the only candidate subset is the members
    that ``p`` contains (p Pj = Pj); that subset is then checked exactly.
    """
    eps = eps_of(tol)
    k = len(f.pdi)
    if k > MAX_MEMBERS:
        raise CombinatorialLimit(f"framework has {k} members, limit is {MAX_MEMBERS}")
    if p.dim != f.dim:
        raise DimensionError(f"projector dimension {p.dim} does not match framework {f.dim}")
    chosen = tuple(
        j for j, q in enumerate(f.pdi.members) if nx.max_abs(p.matrix @ q.matrix - q.matrix) <= eps
    )
    total = sum((f.pdi.members[j].matrix for j in chosen), np.zeros_like(p.matrix))
    if nx.max_abs(total - p.matrix) <= eps:
        return chosen
    return None


def framework_contains(f: Framework, p: Projector, tol: TolLike = None) -> bool:
    return member_subset(f, p, tol) is not None


def require_member_subset(f: Framework, p: Projector, tol: TolLike = None, what: str = "event") -> tuple[int, ...]:
    """Like :func:`member_subset` but raise on failure.

    A projector that fails to commute with some member of the framework
    cannot be reasoned about together with it, so MeaninglessConjunction
    is raised; a commuting projector that is merely not a member-sum
    raises NotInFramework.
    """
    chosen = member_subset(f, p, tol)
    if chosen is not None:
        return chosen
    for label, q in zip(f.pdi.labels, f.pdi.members):
        if not commutes(p, q, tol):
            raise MeaninglessConjunction(
                f"{what} does not commute with framework member {label!r}; "
                "combining them violates the single framework rule"
            )
    raise NotInFramework(f"{what} is not a sum of members of the framework")


def incompatible(f: Framework, g: Framework, tol: TolLike = None) -> bool:
    if f.dim != g.dim:
        raise DimensionError(f"frameworks act on different spaces ({f.dim} vs {g.dim})")
    return any(not commutes(p, q, tol) for p in f.pdi.members for q in g.pdi.members)
