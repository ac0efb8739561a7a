"""
Centering and affine normalisation of a matrix.

For a matrix ``A`` the map ``rho -> Tr(rho A)`` on density matrices is an
orthogonal projection onto the plane spanned by two Hermitian matrices
``V1, V2`` followed by a dilation ``alpha`` and a translation.  This module
computes that frame and its constants in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateProjectionError, FrameError
from .linalg import as_matrix, dagger, is_hermitian

FRAME_TOL = 1e-10


@dataclass(frozen=True)
class CenteredForm:
    """Traceless form ``B`` of ``A`` together with the projection constants.

    ``b1`` and ``b2`` are the Hermitian and anti-Hermitian parts of ``b``.
    ``v1, v2`` are HS-orthonormal Hermitian matrices with
    ``v_i = (b_i + gamma_i * 1) / alpha``.
    """

    b: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    d: float
    alpha: float
    c1: float
    c2: float
    gamma1: float
    gamma2: float
    v1: np.ndarray
    v2: np.ndarray

    def project(self, rho) -> complex:
        """Image of ``rho`` in the plane of the frame, ``<rho,V1> + i <rho,V2>``."""
        rho = np.asarray(rho)
        return complex(np.real(np.trace(rho @ self.v1)) + 1j * np.real(np.trace(rho @ self.v2)))


def center(a) -> np.ndarray:
    """Return ``B = A - (Tr A / N) 1``."""
    a = as_matrix(a, "A")
    n = a.shape[0]
    return a - (np.trace(a) / n) * np.eye(n)


def _check_not_scalar(a, b):
    if np.linalg.norm(b) < 1e-12 * max(1.0, np.linalg.norm(a)):
        raise DegenerateProjectionError("A is a multiple of the identity; the projection is constant")


def normalization_constants(a) -> CenteredForm:
    """Projection constants ``d, alpha, c1, c2, gamma1, gamma2`` and the frame.

    The two admissible sign branches differ by a reflection; this function
    always returns the branch with ``c2 >= 0`` and
    ``sign(c1) = -sign(Im Tr B^2)``.

    Raises
    ------
    DegenerateProjectionError
        If ``A`` is a scalar multiple of the identity.
    """
    a = as_matrix(a, "A")
    n = a.shape[0]
    b = center(a)
    _check_not_scalar(a, b)
    bd = dagger(b)
    b1 = (b + bd) / 2
    b2 = (b - bd) / 2j

    tr_b2 = complex(np.trace(b @ b))
    abs_tr_b2 = abs(tr_b2)
    tr_bbd = float(np.real(np.trace(b @ bd)))
    d = abs_tr_b2 ** 2
    alpha = float(np.sqrt(0.5 * tr_bbd + 0.5 * abs_tr_b2))

    # Tr B^2 + Tr B*^2 = 2 Re Tr B^2
    c1_sq = -0.5 * tr_b2.real + 0.5 * abs_tr_b2
    c2_sq = 0.5 * tr_b2.real + 0.5 * abs_tr_b2
    c1 = float(np.sqrt(max(c1_sq, 0.0)))
    c2 = float(np.sqrt(max(c2_sq, 0.0)))
    if tr_b2.imag > 0:
        c1 = -c1

    gamma1 = c1 / np.sqrt(n)
    gamma2 = c2 / np.sqrt(n)
    eye = np.eye(n)
    v1 = (b1 + gamma1 * eye) / alpha
    v2 = (b2 + gamma2 * eye) / alpha
    return CenteredForm(
        b=b, b1=b1, b2=b2, d=float(d), alpha=alpha, c1=c1, c2=c2,
        gamma1=float(gamma1), gamma2=float(gamma2), v1=v1, v2=v2,
    )


def natural_rescale(a) -> np.ndarray:
    """Center ``A`` and divide by ``alpha`` so that the rescaled matrix has ``alpha = 1``."""
    form = normalization_constants(a)
    return form.b / form.alpha


def frame_to_matrix(v1, v2, tol=FRAME_TOL) -> np.ndarray:
    """Build ``A = V1 + i V2`` from a Hermitian HS-orthonormal frame.

    Raises
    ------
    FrameError
        If either matrix is not Hermitian, not of unit norm, or the two are
        not orthogonal (all within ``tol``).
    """
    v1 = as_matrix(v1, "V1")
    v2 = as_matrix(v2, "V2")
    if v1.shape != v2.shape:
        raise FrameError("frame matrices have different orders")
    if not (is_hermitian(v1, tol) and is_hermitian(v2, tol)):
        raise FrameError("frame matrices must be Hermitian")
    n1 = np.real(np.trace(v1 @ v1))
    n2 = np.real(np.trace(v2 @ v2))
    cross = np.real(np.trace(v1 @ v2))
    if abs(n1 - 1) > tol or abs(n2 - 1) > tol or abs(cross) > tol:
        raise FrameError(f"frame is not orthonormal: |V1|^2={n1}, |V2|^2={n2}, <V1,V2>={cross}")
    return v1 + 1j * v2
