"""
Dense complex matrix helpers and Hilbert-Schmidt geometry.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The Hermitian
eigensolver is a cyclic Jacobi method that works on stacks of matrices, so a
whole fan of support-function problems can be diagonalised in one call.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError

HERMITIAN_RTOL = 1e-12
_JACOBI_RTOL = 1e-14
_MAX_SWEEPS = 60


def as_matrix(a, name="matrix"):
    """Validate ``a`` as a finite square complex matrix and return a copy.

    Raises
    ------
    DimensionError
        If ``a`` is not two-dimensional and square, or is empty.
    DomainError
        If any entry is NaN or infinite.
    """
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError(f"{name} has non-finite entries")
    return m


def _same_order(a, b):
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    if a.shape != b.shape:
        raise DimensionError(f"order mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a, b


def dagger(a):
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


@dataclass(frozen=True)
class HermitianDecomposition:
    """``A = herm + 1j * antiherm`` with both parts Hermitian."""

    herm: np.ndarray
    antiherm: np.ndarray


def hermitian_parts(a) -> HermitianDecomposition:
    """Split ``A`` into ``(A + A*)/2`` and ``(A - A*)/(2i)``."""
    a = as_matrix(a, "A")
    ad = dagger(a)
    return HermitianDecomposition(herm=(a + ad) / 2, antiherm=(a - ad) / 2j)


def hs_inner(a, b) -> float:
    """Real Hilbert-Schmidt inner product ``Re Tr(A* B)``."""
    a, b = _same_order(a, b)
    # Re Tr(A* B) == sum conj(a_ij) b_ij, real part
    return float(np.real(np.vdot(a, b)))


def hs_norm(a) -> float:
    a = as_matrix(a, "A")
    return float(np.linalg.norm(a))


def hs_distance(a, b) -> float:
    """Hilbert-Schmidt distance ``sqrt(Tr (A-B)(A-B)*)``."""
    a, b = _same_order(a, b)
    return float(np.linalg.norm(a - b))


def is_hermitian(h, rtol=HERMITIAN_RTOL) -> bool:
    h = np.asarray(h)
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 0.0)
    return bool(np.max(np.abs(h - dagger(h)), initial=0.0) <= rtol * scale)


def is_normal(a, tol=None) -> bool:
    """True when ``||AA* - A*A||_HS <= tol`` (default ``1e-10 ||A||^2``)."""
    a = as_matrix(a, "A")
    if tol is None:
        tol = 1e-10 * np.linalg.norm(a) ** 2
    ad = dagger(a)
    return bool(np.linalg.norm(a @ ad - ad @ a) <= tol)


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and matching orthonormal eigenvector columns.

    Both arrays may carry leading batch axes when :func:`eigh` was called on
    a stack of matrices.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _jacobi_stack(h):
    """Cyclic complex Jacobi on a stack ``(B, n, n)``; modifies ``h`` in place."""
    nb, n, _ = h.shape
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), h.shape).copy()
    if n == 1:
        return h[:, :, 0].real.copy(), v
    scale = np.linalg.norm(h, axis=(1, 2))
    target = _JACOBI_RTOL * scale
    # below this an off-diagonal entry is dropped instead of rotated away
    negligible = 1e-30 * scale
    offmask = ~np.eye(n, dtype=bool)
    for _ in range(_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(h[:, offmask]) ** 2, axis=1))
        if np.all(off <= target):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = h[:, p, q]
                r = np.abs(apq)
                active = r > negligible
                r_safe = np.where(active, r, 1.0)
                phase = np.where(active, apq / r_safe, 1.0)
                app = h[:, p, p].real
                aqq = h[:, q, q].real
                theta = (aqq - app) / (2.0 * r_safe)
                sgn = np.where(theta >= 0.0, 1.0, -1.0)
                t = sgn / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # unitary acting on (p, q): phase fix of column q, then real rotation
                j = np.empty((nb, 2, 2), dtype=np.complex128)
                j[:, 0, 0] = c
                j[:, 0, 1] = s
                j[:, 1, 0] = -s * np.conj(phase)
                j[:, 1, 1] = c * np.conj(phase)
                idx = [p, q]
                h[:, :, idx] = h[:, :, idx] @ j
                h[:, idx, :] = dagger(j) @ h[:, idx, :]
                v[:, :, idx] = v[:, :, idx] @ j
                h[:, p, q] = 0.0
                h[:, q, p] = 0.0
    w = np.diagonal(h, axis1=1, axis2=2).real.copy()
    return w, v


def eigh(h, check=True) -> EigenSystem:
    """Spectral decomposition of a Hermitian matrix (or a stack of them).

    The input is symmetrised as ``(H + H*)/2`` before the Jacobi sweeps.
    Eigenvalues come back in ascending order; eigenvectors are determined up
    to a phase (and up to a basis choice inside degenerate eigenspaces).

    Parameters
    ----------
    h : array_like, shape (..., N, N)
        Hermitian matrix or stack of Hermitian matrices.
    check : bool
        Reject inputs whose anti-Hermitian part exceeds ``1e-12`` relative.

    Raises
    ------
    DomainError
        If ``check`` is set and the input is not Hermitian.
    """
    h = np.array(h, dtype=np.complex128)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2] or h.shape[-1] == 0:
        raise DimensionError(f"expected (..., N, N) with N >= 1, got {h.shape}")
    if not np.all(np.isfinite(h)):
        raise DomainError("non-finite entries")
    if check and not is_hermitian(h):
        raise DomainError("matrix is not Hermitian within 1e-12")
    batch = h.shape[:-2]
    n = h.shape[-1]
    stack = ((h + dagger(h)) / 2).reshape(-1, n, n)
    w, v = _jacobi_stack(stack)
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return EigenSystem(eigenvalues=w.reshape(batch + (n,)), eigenvectors=v.reshape(batch + (n, n)))


def expm_hermitian(h, t) -> np.ndarray:
    """Return ``exp(-i H t)`` through the spectral decomposition of ``H``."""
    es = eigh(as_matrix(h, "H"))
    v = es.eigenvectors
    return (v * np.exp(-1j * es.eigenvalues * t)) @ dagger(v)


def commutator(a, b):
    return a @ b - b @ a
