"""
Unitary trajectories inside the numerical shadow.

A state evolving under a Hamiltonian ``H`` traces the curve
``z(t) = <psi(t)|A|psi(t)>`` in ``W(A)``.  Besides evaluating such curves
this module decides periodicity from the spectrum of ``H`` and builds the
two real subspaces that govern when two initial states give the same curve:

* ``X_A``: traceless Hermitian ``X`` with ``Tr(X Re A) = Tr(X Im A) = 0``;
* ``H_A``: Hamiltonians ``H`` with ``Tr(H i[Re A, X]) = Tr(H i[Im A, X]) = 0``
  for every ``X`` in ``X_A``, i.e. those whose adjoint action keeps ``X_A``
  invariant.

Two states ``rho0, rho1`` with ``rho0 - rho1`` in ``X_A`` evolved by an
``H`` in ``H_A`` have identical trajectories.

Time convention: ``time_sign=-1`` (default) evolves states with
``U(t) = exp(-iHt)``, so ``z(t) = Tr(rho0 exp(iHt) A exp(-iHt))``.
``time_sign=+1`` gives ``Tr(rho0 exp(-iHt) A exp(iHt))``, the same curve
traversed backwards.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ContractViolation, DimensionError, DomainError
from .linalg import as_matrix, dagger, eigh, hermitian_parts, hs_inner, is_hermitian

# relative agreement demanded between the state and operator pictures
PICTURE_RTOL = 1e-11
_STATE_TOL = 1e-10


@dataclass(frozen=True)
class Trajectory:
    """Sampled curve ``z(t)``; ``state0`` is a vector or a density matrix."""

    times: np.ndarray
    points: np.ndarray
    state0: np.ndarray = field(repr=False)
    hamiltonian: np.ndarray = field(repr=False)
    observable: np.ndarray = field(repr=False)

    def max_deviation(self, other: Trajectory) -> float:
        return float(np.max(np.abs(self.points - other.points)))


@dataclass(frozen=True)
class TrajectorySpaces:
    """HS-orthonormal bases of ``X_A`` and ``H_A`` for one observable.

    ``d_a`` is the dimension of the span of the traceless parts of
    ``Re A`` and ``Im A``, so ``dim_xa = N^2 - 1 - d_a``.
    """

    xa_basis: list
    ha_basis: list
    d_a: int

    @property
    def dim_xa(self) -> int:
        return len(self.xa_basis)

    @property
    def dim_ha(self) -> int:
        return len(self.ha_basis)


def _hamiltonian(h):
    h = as_matrix(h, "H")
    if not is_hermitian(h):
        raise DomainError("Hamiltonian must be Hermitian")
    return h


def _sign(time_sign):
    if time_sign not in (-1, 1):
        raise ValueError(f"time_sign must be -1 or +1, got {time_sign!r}")
    return time_sign


def _check_state(psi, n):
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != n:
        raise DimensionError(f"state has {psi.size} components, Hamiltonian has order {n}")
    norm = np.linalg.norm(psi)
    if not np.isfinite(norm) or abs(norm - 1.0) > _STATE_TOL:
        raise DomainError(f"state must be normalised, got norm {norm:.6g}")
    return psi


def check_density(rho, n=None):
    """Validate a density matrix: Hermitian, unit trace, positive semidefinite."""
    rho = as_matrix(rho, "rho")
    if n is not None and rho.shape[0] != n:
        raise DimensionError(f"density matrix has order {rho.shape[0]}, expected {n}")
    if not is_hermitian(rho, 1e-10):
        raise DomainError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > _STATE_TOL:
        raise DomainError(f"density matrix has trace {tr:.6g}")
    lam = eigh(rho, check=False).eigenvalues
    if lam[0] < -_STATE_TOL:
        raise DomainError(f"density matrix has negative eigenvalue {lam[0]:.3g}")
    return rho


def _propagators(h, times, time_sign):
    """Stack of ``exp(i * time_sign * H t)`` over ``times``."""
    es = eigh(h)
    v, lam = es.eigenvectors, es.eigenvalues
    phases = np.exp(1j * time_sign * np.outer(times, lam))
    return np.einsum("ij,tj,kj->tik", v, phases, np.conj(v))


def evolve_pure(h, psi0, t, time_sign=-1):
    """``exp(-iHt) psi0`` (or ``exp(+iHt) psi0`` with ``time_sign=+1``).

    ``t`` may be a scalar or a vector; a vector gives one row per time.
    """
    h = _hamiltonian(h)
    psi0 = _check_state(psi0, h.shape[0])
    times = np.atleast_1d(np.asarray(t, dtype=float))
    out = _propagators(h, times, _sign(time_sign)) @ psi0
    return out[0] if np.ndim(t) == 0 else out


def trajectory(a, h, psi0, times, time_sign=-1) -> Trajectory:
    """Curve ``z(t) = <psi(t)|A|psi(t)>`` of a pure state.

    Computed twice, from the evolved state and from the evolved operator
    ``U(t)* A U(t)``; the two must agree to ``1e-11`` relative.

    Raises
    ------
    ContractViolation
        If the two pictures disagree.
    """
    a = as_matrix(a, "A")
    h = _hamiltonian(h)
    if a.shape != h.shape:
        raise DimensionError(f"A has order {a.shape[0]}, H has order {h.shape[0]}")
    psi0 = _check_state(psi0, a.shape[0])
    times = np.asarray(times, dtype=float).reshape(-1)
    u = _propagators(h, times, _sign(time_sign))
    psi = u @ psi0
    z_state = np.einsum("ti,ij,tj->t", np.conj(psi), a, psi)
    a_t = dagger(u) @ a @ u
    z_op = np.einsum("i,tij,j->t", np.conj(psi0), a_t, psi0)
    scale = max(1.0, float(np.linalg.norm(a)))
    gap = float(np.max(np.abs(z_state - z_op), initial=0.0))
    if gap > PICTURE_RTOL * scale:
        raise ContractViolation(f"state and operator pictures differ by {gap:.3e}")
    return Trajectory(times=times, points=z_state, state0=psi0, hamiltonian=h, observable=a)


def mixed_trajectory(a, h, rho0, times, time_sign=-1) -> Trajectory:
    """Curve ``z(t) = Tr(rho0 U(t)* A U(t))`` with ``U(t) = exp(i * time_sign * H t)``."""
    a = as_matrix(a, "A")
    h = _hamiltonian(h)
    if a.shape != h.shape:
        raise DimensionError(f"A has order {a.shape[0]}, H has order {h.shape[0]}")
    rho0 = check_density(rho0, a.shape[0])
    times = np.asarray(times, dtype=float).reshape(-1)
    u = _propagators(h, times, _sign(time_sign))
    a_t = dagger(u) @ a @ u
    z = np.einsum("ji,tij->t", rho0, a_t)
    return Trajectory(times=times, points=z, state0=rho0, hamiltonian=h, observable=a)


def period(h, tol=1e-9):
    """Smallest period of every trajectory generated by ``H``, or ``None``.

    Trajectories depend on ``H`` only through the phases
    ``exp(i (lambda_j - lambda_k) t)``, so the motion is periodic exactly
    when the nonzero eigenvalue gaps are commensurable.  The gaps are
    written as rational multiples of the smallest one; if they all share a
    common unit ``g`` within ``tol * max(1, ||H||)`` the period is
    ``2 pi / g``.

    Denominators are capped at ``min(10**6, sqrt(0.01 / tol))``: a random
    ratio is matched by some fraction with denominator ``<= Q`` to within
    ``tol`` with probability about ``tol * Q**2``, so larger caps would
    report spurious periods for irrational ratios.

    Returns ``None`` for incommensurable gaps, and also when ``H`` is a
    multiple of the identity (every trajectory is then constant).
    """
    h = _hamiltonian(h)
    lam = eigh(h).eigenvalues
    scale = max(1.0, float(np.max(np.abs(lam))))
    atol = tol * scale
    levels = [lam[0]]
    for x in lam[1:]:
        if x - levels[-1] > atol:
            levels.append(x)
    if len(levels) < 2:
        return None
    gaps = np.array(levels[1:]) - levels[0]
    unit = float(np.min(np.diff(levels)))
    max_den = int(min(10**6, math.floor(math.sqrt(0.01 / tol))))
    fracs = []
    for gap in gaps:
        f = Fraction(gap / unit).limit_denominator(max_den)
        if abs(gap - float(f) * unit) > atol:
            return None
        fracs.append(f)
    q = math.lcm(*(f.denominator for f in fracs))
    g_int = math.gcd(*(f.numerator * (q // f.denominator) for f in fracs))
    g = unit * g_int / q
    if np.max(np.abs(gaps / g - np.round(gaps / g))) * g > atol:
        return None
    return 2 * np.pi / g


def gell_mann_basis(n):
    """Generalised Gell-Mann matrices scaled to unit HS norm.

    Order: symmetric ``(j, k)`` for ``j < k`` row by row, then the
    antisymmetric ones in the same order, then the ``n - 1`` diagonal ones.
    """
    if n < 1:
        raise DimensionError(f"order must be >= 1, got {n}")
    basis = []
    s = 1 / math.sqrt(2)
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k] = m[k, j] = s
            basis.append(m)
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[j, k], m[k, j] = -1j * s, 1j * s
            basis.append(m)
    for l in range(1, n):
        d = np.zeros(n)
        d[:l] = 1.0
        d[l] = -l
        basis.append(np.diag(d / math.sqrt(l * (l + 1))).astype(complex))
    return basis


def _coords(mats, basis):
    """Real HS coordinates of Hermitian matrices in an orthonormal basis."""
    b = np.array(basis).reshape(len(basis), -1)
    m = np.array(mats).reshape(len(mats), -1)
    return np.real(np.conj(m) @ b.T)


def _null_space(rows, dim, rtol=1e-10):
    """Orthonormal basis (as rows) of the orthogonal complement of ``rows``."""
    if len(rows) == 0:
        return np.eye(dim), 0
    _, s, vt = np.linalg.svd(np.asarray(rows), full_matrices=True)
    cutoff = rtol * max(1.0, float(s[0]) if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    return vt[rank:], rank


def trajectory_spaces(a) -> TrajectorySpaces:
    """Bases of ``X_A`` and ``H_A`` for the observable ``A``."""
    a = as_matrix(a, "A")
    n = a.shape[0]
    if n == 1:
        # no traceless directions; every 1x1 Hamiltonian acts trivially
        return TrajectorySpaces(xa_basis=[], ha_basis=[np.eye(1, dtype=complex)], d_a=0)
    parts = hermitian_parts(a)
    gm = gell_mann_basis(n)
    cons = _coords([parts.herm, parts.antiherm], gm)
    xa_coef, d_a = _null_space(cons, len(gm))
    xa = [np.tensordot(c, np.array(gm), axes=1) for c in xa_coef]

    full = [np.eye(n, dtype=complex) / math.sqrt(n)] + gm
    gens = []
    for x in xa:
        gens.append(1j * (parts.herm @ x - x @ parts.herm))
        gens.append(1j * (parts.antiherm @ x - x @ parts.antiherm))
    ha_coef, _ = _null_space(_coords(gens, full) if gens else [], len(full))
    ha = [np.tensordot(c, np.array(full), axes=1) for c in ha_coef]
    return TrajectorySpaces(xa_basis=xa, ha_basis=ha, d_a=int(d_a))


def in_xa(a, x, atol=1e-10) -> bool:
    """``Tr X = 0`` and ``X`` HS-orthogonal to ``Re A`` and ``Im A``."""
    a = as_matrix(a, "A")
    x = as_matrix(x, "X")
    parts = hermitian_parts(a)
    scale = max(1.0, float(np.linalg.norm(a))) * max(1.0, float(np.linalg.norm(x)))
    checks = [abs(np.trace(x)), abs(hs_inner(x, parts.herm)), abs(hs_inner(x, parts.antiherm))]
    return bool(is_hermitian(x, 1e-10) and max(checks) <= atol * scale)


def in_ha(a, h, spaces=None, atol=1e-10) -> bool:
    """``Tr(H i[Re A, X]) = Tr(H i[Im A, X]) = 0`` for every ``X`` in ``X_A``."""
    a = as_matrix(a, "A")
    h = as_matrix(h, "H")
    spaces = trajectory_spaces(a) if spaces is None else spaces
    parts = hermitian_parts(a)
    scale = max(1.0, float(np.linalg.norm(a))) * max(1.0, float(np.linalg.norm(h)))
    worst = 0.0
    for x in spaces.xa_basis:
        for p in (parts.herm, parts.antiherm):
            worst = max(worst, abs(np.trace(h @ (1j * (p @ x - x @ p)))))
    return bool(worst <= atol * scale)


def trajectories_identical(a, h, rho0, rho1, check_times, tol=1e-10, time_sign=-1):
    """Analytic verdict and measured deviation for two mixed trajectories.

    Returns
    -------
    verdict : bool
        ``rho0 - rho1`` lies in ``X_A`` and ``H`` lies in ``H_A``.
    deviation : float
        ``max_k |z0(t_k) - z1(t_k)|`` over ``check_times``.
    """
    a = as_matrix(a, "A")
    rho0 = check_density(rho0, a.shape[0])
    rho1 = check_density(rho1, a.shape[0])
    verdict = in_xa(a, rho0 - rho1, tol) and in_ha(a, h, atol=tol)
    z0 = mixed_trajectory(a, h, rho0, check_times, time_sign).points
    z1 = mixed_trajectory(a, h, rho1, check_times, time_sign).points
    return bool(verdict), float(np.max(np.abs(z0 - z1), initial=0.0))
