"""Product families of histories, chain operators and the decoherence functional.

A family fixes a pure initial state at t0, one unitary per time step and
one PDI at each later time.  A history picks one member of each PDI.  For
history Y the chain operator is

    C_Y = P_n U(t_n, t_{n-1}) ... P_1 U(t_1, t_0)

and the decoherence functional is D(Y, Y') = <C_Y' psi0 | C_Y psi0>.  The
family is consistent when every off-diagonal D vanishes (to within eps);
the diagonal then gives the extended Born rule probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import product
from typing import Iterator, Optional, Sequence

import numpy as np

from . import numerics as nx
from .errors import (
    CombinatorialLimit,
    DimensionError,
    InconsistentFamily,
    NotNormalized,
    NotUnitary,
)
from .numerics import TolLike, eps_of
from .projectors import PDI, Framework, Projector, validate_pdi

MAX_HISTORIES = 4096

History = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class HistoryFamily:
    initial: np.ndarray
    times: tuple[str, ...]
    steps: tuple[np.ndarray, ...]
    pdis: tuple[PDI, ...]
    name: str = ""
    tol: TolLike = field(default=None, repr=False)

    def __post_init__(self):
        eps = eps_of(self.tol)
        psi = nx.as_ket(self.initial, "initial state")
        times = tuple(str(t) for t in self.times)
        if len(times) < 2:
            raise ValueError("a family needs at least two times (t0 and t1)")
        if len(set(times)) != len(times):
            raise ValueError(f"time labels must be distinct: {times}")
        n = len(times) - 1
        if len(self.steps) != n or len(self.pdis) != n:
            raise ValueError(
                f"{n} time steps need {n} unitaries and {n} PDIs, "
                f"got {len(self.steps)} and {len(self.pdis)}"
            )
        d = psi.size
        nrm = float(np.linalg.norm(psi))
        if abs(nrm - 1.0) > eps:
            raise NotNormalized(nrm)
        steps = []
        for k, u in enumerate(self.steps):
            u = nx.as_matrix(u, f"step {k + 1}")
            if u.shape != (d, d):
                raise DimensionError(f"step {times[k]}->{times[k + 1]} has shape {u.shape}, expected {(d, d)}")
            if not nx.is_unitary(u, eps):
                raise NotUnitary(f"step {times[k]}->{times[k + 1]} is not unitary within eps={eps:g}")
            u = u.copy()
            u.setflags(write=False)
            steps.append(u)
        for k, p in enumerate(self.pdis):
            if p.dim != d:
                raise DimensionError(f"PDI at {times[k + 1]} has dimension {p.dim}, expected {d}")
            validate_pdi(p.members, eps, p.labels)
        psi = psi.copy()
        psi.setflags(write=False)
        object.__setattr__(self, "initial", psi)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "steps", tuple(steps))
        object.__setattr__(self, "pdis", tuple(self.pdis))
        object.__setattr__(self, "_cache", {})

    @property
    def dim(self) -> int:
        return self.initial.size

    @property
    def n_times(self) -> int:
        """Number of times carrying a PDI (t1..tn)."""
        return len(self.pdis)

    def time_index(self, t) -> int:
        """1-based index of a time label (or pass-through for ints)."""
        if isinstance(t, (int, np.integer)):
            if not 1 <= t <= self.n_times:
                raise IndexError(f"time index {t} outside 1..{self.n_times}")
            return int(t)
        try:
            k = self.times.index(t)
        except ValueError:
            raise KeyError(f"unknown time label {t!r}") from None
        if k == 0:
            raise IndexError(f"{t!r} is the initial time and carries no PDI")
        return k

    def pdi_at(self, t) -> PDI:
        return self.pdis[self.time_index(t) - 1]

    def framework_at(self, t) -> Framework:
        return Framework(self.pdi_at(t))

    def count(self) -> int:
        c = 1
        for p in self.pdis:
            c *= len(p)
        return c

    def histories(self) -> Iterator[History]:
        return product(*(range(len(p)) for p in self.pdis))

    def label(self, y: History) -> tuple[str, ...]:
        return tuple(p.labels[j] for p, j in zip(self.pdis, y))

    def with_pdi(self, t, pdi: PDI) -> "HistoryFamily":
        k = self.time_index(t) - 1
        pdis = list(self.pdis)
        pdis[k] = pdi
        return replace(self, pdis=tuple(pdis))

    def coarsened(self, t) -> "HistoryFamily":
        """Same family with the PDI at time ``t`` replaced by {I}."""
        return self.with_pdi(t, trivial_pdi(self.dim))


def trivial_pdi(d: int, label: str = "I") -> PDI:
    return validate_pdi([nx.identity(d)], labels=[label])


def _check_history(fam: HistoryFamily, y: Sequence[int]) -> History:
    y = tuple(int(j) for j in y)
    if len(y) != fam.n_times:
        raise IndexError(f"history has {len(y)} entries, family has {fam.n_times} times")
    for k, (j, p) in enumerate(zip(y, fam.pdis)):
        if not 0 <= j < len(p):
            raise IndexError(f"index {j} out of range for PDI at {fam.times[k + 1]} ({len(p)} members)")
    return y


def chain_operator(fam: HistoryFamily, y: Sequence[int]) -> np.ndarray:
    y = _check_history(fam, y)
    c = nx.identity(fam.dim)
    for u, p, j in zip(fam.steps, fam.pdis, y):
        c = p.members[j].matrix @ (u @ c)
    return c


def chain_ket(fam: HistoryFamily, y: Sequence[int]) -> np.ndarray:
    """C_Y applied to the initial state."""
    y = _check_history(fam, y)
    v = fam.initial
    for u, p, j in zip(fam.steps, fam.pdis, y):
        v = p.members[j].matrix @ (u @ v)
    return v


def decoherence_functional(fam: HistoryFamily, y: Sequence[int], y2: Sequence[int]) -> complex:
    return complex(np.vdot(chain_ket(fam, y2), chain_ket(fam, y)))


def _all_chain_kets(fam: HistoryFamily) -> np.ndarray:
    """Rows are C_Y psi0 for histories in ``fam.histories()`` order.

    Built breadth-first so shared prefixes are propagated once.
    """
    layer = fam.initial[None, :]
    for u, p in zip(fam.steps, fam.pdis):
        moved = layer @ u.T
        layer = np.stack([moved @ m.matrix.T for m in p.members], axis=1).reshape(-1, fam.dim)
    return layer


@dataclass(frozen=True, eq=False)
class ConsistencyReport:
    histories: tuple[History, ...]
    labels: tuple[tuple[str, ...], ...]
    dfunc: np.ndarray
    consistent: bool
    max_offdiag: float
    eps: float
    probabilities: Optional[dict[History, float]]

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.dfunc).real

    def require_consistent(self) -> dict[History, float]:
        if not self.consistent:
            raise InconsistentFamily(self.max_offdiag)
        return self.probabilities


def check_consistency(fam: HistoryFamily, tol: TolLike = None, max_histories: int = MAX_HISTORIES) -> ConsistencyReport:
    eps = eps_of(tol)
    cached = fam._cache.get(("report", eps))
    if cached is not None:
        return cached
    count = fam.count()
    if count > max_histories:
        raise CombinatorialLimit(f"family has {count} histories, limit is {max_histories}")
    ys = tuple(fam.histories())
    kets = _all_chain_kets(fam)
    dfunc = kets @ kets.conj().T
    dfunc.setflags(write=False)
    off = dfunc - np.diag(np.diag(dfunc))
    max_off = nx.max_abs(off)
    consistent = max_off <= eps
    probs = None
    if consistent:
        diag = np.diag(dfunc).real
        probs = {y: float(p) for y, p in zip(ys, diag)}
    report = ConsistencyReport(
        histories=ys,
        labels=tuple(fam.label(y) for y in ys),
        dfunc=dfunc,
        consistent=consistent,
        max_offdiag=max_off,
        eps=eps,
        probabilities=probs,
    )
    fam._cache[("report", eps)] = report
    return report


def born_probability(fam: HistoryFamily, y: Sequence[int], tol: TolLike = None) -> float:
    y = _check_history(fam, y)
    probs = check_consistency(fam, tol).require_consistent()
    return probs[y]


def history_projector(fam: HistoryFamily, y: Sequence[int]) -> np.ndarray:
    """The history as an element of the tensor-product history space.

    Y = P1 (x) P2 (x) ... (x) Pn, acting on H^(tensor n).  Only useful at
    tiny sizes; the chain-operator path is what computes probabilities.
    """
    y = _check_history(fam, y)
    return nx.kron_all(*(p.members[j].matrix for p, j in zip(fam.pdis, y)))
