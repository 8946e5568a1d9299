"""Random generators and brute-force oracles shared by the test modules.

The oracles deliberately avoid the library's own machinery: no chain
operators, no decoherence functional, no SpinDirection kets.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from chcause.histories import HistoryFamily
from chcause.projectors import validate_pdi


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_partition(d: int, rng: np.random.Generator, max_blocks: int = 4) -> list[list[int]]:
    k = int(rng.integers(1, min(d, max_blocks) + 1))
    owner = rng.permutation(np.concatenate([np.arange(k), rng.integers(0, k, size=d - k)]))
    return [sorted(np.flatnonzero(owner == b).tolist()) for b in range(k)]


def random_pdi(d: int, rng: np.random.Generator, basis_change: bool = True):
    """PDI whose members are sums of columns of a random (or standard) basis."""
    u = random_unitary(d, rng) if basis_change else np.eye(d, dtype=complex)
    members = []
    for block in random_partition(d, rng):
        cols = u[:, block]
        members.append(cols @ cols.conj().T)
    return validate_pdi(members, labels=[f"m{j}" for j in range(len(members))])


def random_family(rng: np.random.Generator, name: str = "random") -> HistoryFamily:
    """One or two tensor factors of dimension 2..4, product unitaries, 1..3 times."""
    factors = [int(rng.integers(2, 5)) for _ in range(int(rng.integers(1, 3)))]
    d = math.prod(factors)
    n = int(rng.integers(1, 4))
    steps = []
    for _ in range(n):
        u = np.eye(1, dtype=complex)
        for f in factors:
            u = np.kron(u, random_unitary(f, rng))
        steps.append(u)
    pdis = [random_pdi(d, rng) for _ in range(n)]
    times = tuple(f"t{j}" for j in range(n + 1))
    return HistoryFamily(random_ket(d, rng), times, tuple(steps), tuple(pdis), name)


def random_classical_family(rng: np.random.Generator):
    """Permutation-with-phase dynamics and diagonal PDIs.

    Returns the family together with the raw ingredients the oracle needs:
    the initial weights, the permutations and the block assignment of
    each basis state at each time.
    """
    d = int(rng.integers(2, 7))
    n = int(rng.integers(1, 4))
    psi = random_ket(d, rng)
    perms, steps, owners, pdis = [], [], [], []
    for _ in range(n):
        perm = rng.permutation(d)
        phases = np.exp(2j * np.pi * rng.random(d))
        u = np.zeros((d, d), dtype=complex)
        u[perm, np.arange(d)] = phases
        perms.append(perm)
        steps.append(u)
        blocks = random_partition(d, rng)
        owner = np.empty(d, dtype=int)
        for b, idx in enumerate(blocks):
            owner[idx] = b
        owners.append(owner)
        members = [np.diag([1.0 if i in idx else 0.0 for i in range(d)]) for idx in blocks]
        pdis.append(validate_pdi(members, labels=[f"b{j}" for j in range(len(blocks))]))
    fam = HistoryFamily(psi, tuple(f"t{j}" for j in range(n + 1)), tuple(steps), tuple(pdis), "classical")
    return fam, np.abs(psi) ** 2, perms, owners


def classical_oracle(weights, perms, owners) -> dict[tuple[int, ...], float]:
    """Joint distribution of block labels, following each basis state's trajectory."""
    dist: dict[tuple[int, ...], float] = {}
    for start, w in enumerate(weights):
        state, path = start, []
        for perm, owner in zip(perms, owners):
            state = int(perm[state])
            path.append(int(owner[state]))
        key = tuple(path)
        dist[key] = dist.get(key, 0.0) + float(w)
    sizes = [int(o.max()) + 1 for o in owners]
    return {y: dist.get(y, 0.0) for y in product(*(range(s) for s in sizes))}


def spinor(theta: float, phi: float, sign: int) -> np.ndarray:
    """Eigenket of n.sigma written out from the half-angle formulas."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    e = complex(math.cos(phi), math.sin(phi))
    if sign > 0:
        return np.array([c, e * s])
    return np.array([s, -e * c])


def singlet_outcomes(a: tuple[float, float], b: tuple[float, float]) -> dict[tuple[int, int], float]:
    """Brute-force Born probabilities for the four outcomes on the singlet."""
    psi = np.array([0, 1, -1, 0]) / math.sqrt(2)
    out = {}
    for sa, sb in product((1, -1), repeat=2):
        amp = np.vdot(np.kron(spinor(*a, sa), spinor(*b, sb)), psi)
        out[(sa, sb)] = abs(amp) ** 2
    return out


def singlet_correlation(a, b) -> float:
    return sum(sa * sb * p for (sa, sb), p in singlet_outcomes(a, b).items())
