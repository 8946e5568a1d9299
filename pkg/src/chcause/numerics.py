"""Dense complex linear algebra for small Hilbert spaces.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; kets are 1-D
arrays.  Every public function validates finiteness and shapes before
doing any work, so errors surface at the boundary rather than as NaNs
several steps later.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionError, NonFiniteError

DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class Tolerance:
    """Absolute tolerance for entrywise comparisons."""

    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not (0.0 < self.eps < 1e-3):
            raise ValueError(f"tolerance must satisfy 0 < eps < 1e-3, got {self.eps!r}")


TolLike = Union[Tolerance, float, None]


def eps_of(tol: TolLike) -> float:
    if tol is None:
        return DEFAULT_EPS
    if isinstance(tol, Tolerance):
        return tol.eps
    return Tolerance(float(tol)).eps


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or 0 in m.shape:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError(f"{name} has non-finite entries")
    return m


def as_ket(v, name: str = "ket") -> np.ndarray:
    k = np.asarray(v, dtype=np.complex128)
    if k.ndim == 2 and k.shape[1] == 1:
        k = k[:, 0]
    if k.ndim != 1 or k.size == 0:
        raise DimensionError(f"{name} must be a non-empty vector, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise NonFiniteError(f"{name} has non-finite entries")
    return k


def _square(m: np.ndarray, name: str) -> None:
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")


def mat_mul(a, b) -> np.ndarray:
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    a = as_matrix(a)
    _square(a, "trace argument")
    return complex(np.trace(a))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a, "left factor"), as_matrix(b, "right factor"))


def kron_all(*factors) -> np.ndarray:
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = kron(out, f)
    return out


def max_abs(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def approx_eq(a, b, tol: TolLike = None) -> bool:
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape != b.shape:
        raise DimensionError(f"cannot compare shapes {a.shape} and {b.shape}")
    return max_abs(a - b) <= eps_of(tol)


def identity(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.complex128)


def basis(d: int, j: int) -> np.ndarray:
    v = np.zeros(d, dtype=np.complex128)
    v[j] = 1.0
    return v


def norm(v) -> float:
    return float(np.linalg.norm(as_ket(v)))


def is_unitary(u, tol: TolLike = None) -> bool:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return approx_eq(u.conj().T @ u, identity(u.shape[0]), tol)


def extend_isometry(dim: int, images: dict[int, np.ndarray], tol: TolLike = None) -> np.ndarray:
    """Complete a partial map on basis vectors to a unitary on the full space.

    ``images`` maps basis index -> image ket; the images must be
    orthonormal.  Unmapped basis vectors are sent, in index order, to an
    orthonormal basis of the complement obtained by Gram-Schmidt over the
    standard basis, so the result is deterministic.
    """
    eps = eps_of(tol)
    u = np.zeros((dim, dim), dtype=np.complex128)
    used = []
    for j, img in sorted(images.items()):
        img = as_ket(img)
        if img.size != dim:
            raise DimensionError(f"image of basis {j} has dimension {img.size}, expected {dim}")
        u[:, j] = img
        used.append(img)
    if used:
        g = np.array(used)
        if max_abs(g.conj() @ g.T - identity(len(used))) > eps:
            raise ValueError("isometry images are not orthonormal")
    free = [j for j in range(dim) if j not in images]
    candidates = iter(range(dim))
    for j in free:
        for c in candidates:
            v = basis(dim, c)
            # two passes keep the completion orthonormal to ~1e-16
            for _ in range(2):
                for w in used:
                    v = v - np.vdot(w, v) * w
            n = np.linalg.norm(v)
            if n > 1e-6:
                v = v / n
                used.append(v)
                u[:, j] = v
                break
    return u
