"""Gedanken experiments built as history families.

Optical paths are compressed to a small label space (source, arms,
detectors, absorbers) with transport unitaries that move amplitude between
labels.  Blockers and extra detectors reroute amplitude into orthogonal
sink states, so every step stays unitary.  Measurements copy the measured
basis index into a pointer register that starts in a ready state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import product
from typing import Callable, Optional, Sequence

import numpy as np

from . import numerics as nx
from .causes import Event
from .histories import HistoryFamily, trivial_pdi
from .numerics import TolLike, eps_of
from .projectors import PDI, Projector, validate_pdi

SQRT1_2 = 1 / math.sqrt(2)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True)
class SpinDirection:
    """Unit vector given by polar angle ``theta`` and azimuth ``phi`` (radians)."""

    theta: float
    phi: float = 0.0
    name: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("spin direction angles must be finite")

    @classmethod
    def in_xz_plane(cls, angle: float, name: str = "") -> "SpinDirection":
        """Direction at ``angle`` from +z towards +x."""
        return cls(angle, 0.0, name)

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @property
    def sigma(self) -> np.ndarray:
        """n . sigma"""
        x, y, z = self.vector
        return x * PAULI_X + y * PAULI_Y + z * PAULI_Z

    @property
    def tag(self) -> str:
        return self.name or f"({self.theta:.6g},{self.phi:.6g})"

    def ket(self, sign: int = +1) -> np.ndarray:
        c, s = math.cos(self.theta / 2), math.sin(self.theta / 2)
        e = cmath.exp(1j * self.phi)
        if sign > 0:
            return np.array([c, e * s], dtype=np.complex128)
        return np.array([-s, e * c], dtype=np.complex128)

    def projector(self, sign: int = +1) -> Projector:
        return Projector((nx.identity(2) + sign * self.sigma) / 2)

    def pdi(self) -> PDI:
        return validate_pdi([self.projector(+1), self.projector(-1)], labels=[f"{self.tag}+", f"{self.tag}-"])

    def angle_to(self, other: "SpinDirection") -> float:
        return math.acos(max(-1.0, min(1.0, float(self.vector @ other.vector))))


X_AXIS = SpinDirection(math.pi / 2, 0.0, "x")
Y_AXIS = SpinDirection(math.pi / 2, math.pi / 2, "y")
Z_AXIS = SpinDirection(0.0, 0.0, "z")
AXES = {"x": X_AXIS, "y": Y_AXIS, "z": Z_AXIS}


def rotation_unitary(axis: SpinDirection, angle: float) -> np.ndarray:
    """exp(-i angle n.sigma / 2) = cos(angle/2) I - i sin(angle/2) n.sigma"""
    return math.cos(angle / 2) * nx.identity(2) - 1j * math.sin(angle / 2) * axis.sigma


def rotation_to_z(w: SpinDirection) -> np.ndarray:
    """A rotation carrying spin-up along ``w`` to spin-up along z (up to phase)."""
    return rotation_unitary(Y_AXIS, -w.theta) @ rotation_unitary(Z_AXIS, -w.phi)


# -- pointers -----------------------------------------------------------------


@dataclass(frozen=True)
class PointerModel:
    """Pointer register with a ready state (index 0) and one state per outcome."""

    outcome_count: int

    @property
    def dim(self) -> int:
        return self.outcome_count + 1

    def ready(self) -> np.ndarray:
        return nx.basis(self.dim, 0)

    def shift(self, j: int) -> np.ndarray:
        """Permutation swapping the ready state with the state for outcome j."""
        m = nx.identity(self.dim)
        m[[0, j + 1]] = m[[j + 1, 0]]
        return m

    def coupling(self, members: Sequence[Projector]) -> np.ndarray:
        """sum_j P_j (x) shift_j : records which P_j holds, leaving the system alone."""
        if len(members) != self.outcome_count:
            raise ValueError(f"{len(members)} projectors for a {self.outcome_count}-outcome pointer")
        return sum(np.kron(p.matrix, self.shift(j)) for j, p in enumerate(members))

    def pdi(self, labels: Sequence[str], system_dim: int = 1) -> PDI:
        """Pointer positions (ready first) tensored with the system identity."""
        eye = nx.identity(system_dim)
        members = [np.kron(eye, np.outer(nx.basis(self.dim, j), nx.basis(self.dim, j))) for j in range(self.dim)]
        return validate_pdi(members, labels=["ready", *labels])


def build_measurement(measured: PDI, psi, name: str = "measurement", tol: TolLike = None) -> HistoryFamily:
    """Projective measurement of ``measured`` on state ``psi``.

    t1 carries the measured PDI, t2 the pointer positions; pointer j is
    associated with ``measured.members[j]``.
    """
    pm = PointerModel(len(measured))
    d = measured.dim
    lift = validate_pdi([np.kron(p.matrix, nx.identity(pm.dim)) for p in measured.members], tol, measured.labels)
    return HistoryFamily(
        initial=np.kron(nx.as_ket(psi), pm.ready()),
        times=("t0", "t1", "t2"),
        steps=(nx.identity(d * pm.dim), pm.coupling(measured.members)),
        pdis=(lift, pm.pdi([f"pointer:{x}" for x in measured.labels], d)),
        name=name,
        tol=tol,
    )


# -- photons ------------------------------------------------------------------


@dataclass(frozen=True)
class BeamsplitterParams:
    alpha: complex
    beta: complex

    def __post_init__(self):
        total = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if not math.isfinite(total) or abs(total - 1.0) > 1e-9:
            raise ValueError(f"|alpha|^2 + |beta|^2 must be 1, got {total!r}")


@dataclass(frozen=True)
class MachZehnderParams:
    phi_a: float = 0.0
    phi_b: float = 0.0
    bs2_present: bool = True
    block_a: bool = False
    block_b: bool = False


def _proj(d: int, *indices: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=np.complex128)
    for j in indices:
        m[j, j] = 1.0
    return m


def _rest(d: int, *indices: int) -> np.ndarray:
    return nx.identity(d) - _proj(d, *indices)


BS_LABELS = ("s", "a", "b", "Da", "Db", "absorbed", "D*a")


def build_beamsplitter(
    params: BeamsplitterParams,
    block_a: bool = False,
    mirror_to_Dstar: bool = False,
    tol: TolLike = None,
) -> HistoryFamily:
    """Single beamsplitter with detectors Da and Db (optionally intervened on path a)."""
    if block_a and mirror_to_Dstar:
        raise ValueError("path a can be blocked or deflected, not both")
    d = len(BS_LABELS)
    s, a, b, da, db, absorbed, dstar = range(d)
    split = params.alpha * nx.basis(d, a) + params.beta * nx.basis(d, b)
    u1 = nx.extend_isometry(d, {s: split})
    a_goes = absorbed if block_a else dstar if mirror_to_Dstar else da
    u2 = nx.extend_isometry(d, {a: nx.basis(d, a_goes), b: nx.basis(d, db)})
    paths = validate_pdi([_proj(d, a), _proj(d, b), _rest(d, a, b)], tol, ["a", "b", "elsewhere"])
    detectors = validate_pdi(
        [_proj(d, da), _proj(d, db), _proj(d, absorbed), _proj(d, dstar), _rest(d, da, db, absorbed, dstar)],
        tol,
        ["Da", "Db", "absorbed", "D*a", "undetected"],
    )
    variant = "block_a" if block_a else "mirror_to_Dstar" if mirror_to_Dstar else "plain"
    return HistoryFamily(
        initial=nx.basis(d, s),
        times=("t0", "t1", "t2"),
        steps=(u1, u2),
        pdis=(paths, detectors),
        name=f"beamsplitter[{variant}]",
        tol=tol,
    )


MZ_LABELS = ("s", "a", "b", "Dc", "Dd", "absorbed_a", "absorbed_b")
INTERMEDIATE_CHOICES = ("which_path", "superposition", "trivial")


def build_mach_zehnder(
    params: MachZehnderParams,
    intermediate_pdi: str = "trivial",
    tol: TolLike = None,
) -> HistoryFamily:
    """Mach-Zehnder interferometer; with BS2 removed the arms cross (a->Dc, b->Dd).

    BS1 sends s to (a+b)/sqrt2; BS2 sends a to (c+d)/sqrt2 and b to
    (c-d)/sqrt2, so with equal phases the photon always reaches Dc.
    """
    if intermediate_pdi not in INTERMEDIATE_CHOICES:
        raise ValueError(f"intermediate_pdi must be one of {INTERMEDIATE_CHOICES}, got {intermediate_pdi!r}")
    d = len(MZ_LABELS)
    s, a, b, dc, dd, xa, xb = range(d)
    e = lambda j: nx.basis(d, j)
    u1 = nx.extend_isometry(d, {s: (e(a) + e(b)) * SQRT1_2})
    if params.bs2_present:
        out_a, out_b = (e(dc) + e(dd)) * SQRT1_2, (e(dc) - e(dd)) * SQRT1_2
    else:
        out_a, out_b = e(dc), e(dd)
    images = {
        a: e(xa) if params.block_a else cmath.exp(1j * params.phi_a) * out_a,
        b: e(xb) if params.block_b else cmath.exp(1j * params.phi_b) * out_b,
    }
    u2 = nx.extend_isometry(d, images)
    if intermediate_pdi == "which_path":
        mid = validate_pdi([_proj(d, a), _proj(d, b), _rest(d, a, b)], tol, ["a", "b", "elsewhere"])
    elif intermediate_pdi == "superposition":
        plus, minus = (e(a) + e(b)) * SQRT1_2, (e(a) - e(b)) * SQRT1_2
        mid = validate_pdi(
            [np.outer(plus, plus.conj()), np.outer(minus, minus.conj()), _rest(d, a, b)],
            tol,
            ["a+b", "a-b", "elsewhere"],
        )
    else:
        mid = trivial_pdi(d)
    final = validate_pdi(
        [_proj(d, dc), _proj(d, dd), _proj(d, xa, xb), _rest(d, dc, dd, xa, xb)],
        tol,
        ["Dc", "Dd", "absorbed", "in_flight"],
    )
    return HistoryFamily(
        initial=e(s),
        times=("t0", "t1", "t2"),
        steps=(u1, u2),
        pdis=(mid, final),
        name=f"mach-zehnder[bs2={'on' if params.bs2_present else 'off'},{intermediate_pdi}]",
        tol=tol,
    )


# -- spins --------------------------------------------------------------------

SPIN_FRAMEWORKS = ("along_prep", "along_measure", "trivial")


def build_spin_half(
    prep: SpinDirection,
    measure: SpinDirection,
    intermediate_framework: str = "along_measure",
    tol: TolLike = None,
) -> HistoryFamily:
    """Spin prepared up along ``prep``, drifting freely, then measured along ``measure``.

    The measuring device first rotates ``measure`` onto z and then records
    S_z in a two-outcome pointer (``+`` / ``-``).
    """
    if intermediate_framework not in SPIN_FRAMEWORKS:
        raise ValueError(f"intermediate_framework must be one of {SPIN_FRAMEWORKS}")
    pm = PointerModel(2)
    eye_p = nx.identity(pm.dim)
    if intermediate_framework == "trivial":
        mid = trivial_pdi(2 * pm.dim)
    else:
        axis = prep if intermediate_framework == "along_prep" else measure
        spin = axis.pdi()
        mid = validate_pdi([np.kron(p.matrix, eye_p) for p in spin.members], tol, spin.labels)
    z = Z_AXIS
    measurement = pm.coupling([z.projector(+1), z.projector(-1)]) @ np.kron(rotation_to_z(measure), eye_p)
    return HistoryFamily(
        initial=np.kron(prep.ket(+1), pm.ready()),
        times=("t0", "t1", "t2"),
        steps=(nx.identity(2 * pm.dim), measurement),
        pdis=(mid, pm.pdi(["+", "-"], 2)),
        name=f"spin-half[prep={prep.tag},measure={measure.tag},{intermediate_framework}]",
        tol=tol,
    )


SINGLET = (np.kron(Z_AXIS.ket(+1), Z_AXIS.ket(-1)) - np.kron(Z_AXIS.ket(-1), Z_AXIS.ket(+1))) * SQRT1_2


def _spin_pair_pdi(alice: SpinDirection, bob_projectors, bob_tag: str, pointer_dim: int, tol) -> PDI:
    members, labels = [], []
    eye = nx.identity(pointer_dim * pointer_dim)
    for sa, pa in ((+1, "+"), (-1, "-")):
        for bp, pb in zip(bob_projectors, "+-"):
            members.append(np.kron(np.kron(alice.projector(sa).matrix, bp), eye))
            labels.append(f"A:{alice.tag}{pa},B:{bob_tag}{pb}")
    return validate_pdi(members, tol, labels)


def build_eprb(
    alice_axis: SpinDirection,
    bob_axis: SpinDirection,
    bob_intervention: Optional[tuple[SpinDirection, float]] = None,
    tol: TolLike = None,
) -> HistoryFamily:
    """Singlet pair measured by Alice and Bob.

    Space: spin_a (x) spin_b (x) pointer_a (x) pointer_b.  Times:
    t1 right after creation, t2 just before the measurements, t3 readout.
    An optional rotation of Bob's spin acts between t1 and t2; the t1
    framework is the one carried onto the t2 framework by that rotation.
    """
    pm = PointerModel(2)
    dp = pm.dim
    d = 4 * dp * dp
    rot = nx.identity(2)
    if bob_intervention is not None:
        axis, angle = bob_intervention
        rot = rotation_unitary(axis, angle)
    bob_now = [bob_axis.projector(+1).matrix, bob_axis.projector(-1).matrix]
    bob_before = [rot.conj().T @ p @ rot for p in bob_now]
    tag_before = bob_axis.tag if bob_intervention is None else f"R^-1({bob_axis.tag})"
    created = _spin_pair_pdi(alice_axis, bob_before, tag_before, dp, tol)
    premeasure = _spin_pair_pdi(alice_axis, bob_now, bob_axis.tag, dp, tol)

    swap_in = np.kron(rotation_to_z(alice_axis), rotation_to_z(bob_axis))
    zz = [np.kron(Z_AXIS.projector(sa).matrix, Z_AXIS.projector(sb).matrix) for sa in (+1, -1) for sb in (+1, -1)]
    shifts = [np.kron(pm.shift(ja), pm.shift(jb)) for ja in (0, 1) for jb in (0, 1)]
    copy = sum(np.kron(p, s) for p, s in zip(zz, shifts))
    measurement = copy @ np.kron(swap_in, nx.identity(dp * dp))

    names = ["ready", "+", "-"]
    readout = validate_pdi(
        [
            np.kron(nx.identity(4), np.kron(np.outer(nx.basis(dp, i), nx.basis(dp, i)), np.outer(nx.basis(dp, j), nx.basis(dp, j))))
            for i in range(dp)
            for j in range(dp)
        ],
        tol,
        [f"A={names[i]},B={names[j]}" for i in range(dp) for j in range(dp)],
    )
    intervention = np.kron(np.kron(nx.identity(2), rot), nx.identity(dp * dp))
    label = f"eprb[alice={alice_axis.tag},bob={bob_axis.tag}"
    if bob_intervention is not None:
        label += f",bob_rotation={bob_intervention[0].tag}:{bob_intervention[1]:.6g}"
    return HistoryFamily(
        initial=np.kron(SINGLET, np.kron(pm.ready(), pm.ready())),
        times=("t0", "t1", "t2", "t3"),
        steps=(nx.identity(d), intervention, measurement),
        pdis=(created, premeasure, readout),
        name=label + "]",
        tol=tol,
    )


def event_where(fam: HistoryFamily, t, predicate: Callable[[str], bool], label: str) -> Event:
    """Event made of every PDI member at ``t`` whose label satisfies ``predicate``."""
    k = fam.time_index(t)
    pdi = fam.pdis[k - 1]
    idx = [j for j, x in enumerate(pdi.labels) if predicate(x)]
    if not idx:
        raise KeyError(f"no member at {fam.times[k]} matches {label!r}")
    return Event(k, pdi.sum_of(idx), f"{fam.times[k]}:{label}")


def eprb_pointer_event(fam: HistoryFamily, alice: Optional[str] = None, bob: Optional[str] = None) -> Event:
    """Readout event, e.g. ``alice="+"`` or ``alice="+", bob="-"``."""

    def ok(lbl: str) -> bool:
        a, b = (part.split("=")[1] for part in lbl.split(","))
        return (alice is None or a == alice) and (bob is None or b == bob)

    parts = [f"A={alice}" if alice else "", f"B={bob}" if bob else ""]
    return event_where(fam, fam.n_times, ok, ",".join(p for p in parts if p) or "I")


def eprb_spin_event(fam: HistoryFamily, t, alice_sign: Optional[str] = None, bob_sign: Optional[str] = None) -> Event:
    def ok(lbl: str) -> bool:
        a, b = lbl.split(",")
        return (alice_sign is None or a.endswith(alice_sign)) and (bob_sign is None or b.endswith(bob_sign))

    return event_where(fam, t, ok, f"A{alice_sign or '*'},B{bob_sign or '*'}")


def eprb_correlation(fam: HistoryFamily, tol: TolLike = None) -> float:
    """E = Pr(same outcomes) - Pr(opposite outcomes) at readout."""
    from .causes import event_probability

    total = 0.0
    for a, b in product("+-", repeat=2):
        p = event_probability(fam, eprb_pointer_event(fam, a, b), tol)
        total += p if a == b else -p
    return total


# -- classical signals ------------------------------------------------------------


def build_charlie_model(flip_bob: bool = False, tol: TolLike = None) -> HistoryFamily:
    """Charlie sends the same random bit to Alice (nearer) and Bob (farther).

    Space: signal (x) alice_record (x) bob_record, each a bit, starting in
    |000>.  ``flip_bob`` lets Eve invert the bit on its way to Bob.
    """
    h = np.array([[1, 1], [1, -1]], dtype=np.complex128) * SQRT1_2
    eye2 = nx.identity(2)
    p0, p1 = _proj(2, 0), _proj(2, 1)
    prepare = nx.kron_all(h, eye2, eye2)
    copy_to_alice = nx.kron_all(p0, eye2, eye2) + nx.kron_all(p1, PAULI_X, eye2)
    copy_to_bob = nx.kron_all(p0, eye2, eye2) + nx.kron_all(p1, eye2, PAULI_X)
    if flip_bob:
        copy_to_bob = nx.kron_all(eye2, eye2, PAULI_X) @ copy_to_bob

    def bit_pdi(slot: int, who: str) -> PDI:
        members = []
        for p in (p0, p1):
            factors = [eye2, eye2, eye2]
            factors[slot] = p
            members.append(nx.kron_all(*factors))
        return validate_pdi(members, tol, [f"{who}=0", f"{who}=1"])

    return HistoryFamily(
        initial=nx.basis(8, 0),
        times=("t0", "t1", "t2", "t3"),
        steps=(prepare, copy_to_alice, copy_to_bob),
        pdis=(bit_pdi(0, "Charlie"), bit_pdi(1, "Alice"), bit_pdi(2, "Bob")),
        name=f"charlie[flip_bob={str(flip_bob).lower()}]",
        tol=tol,
    )
