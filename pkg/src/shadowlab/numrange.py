"""
Numerical range W(A) through its support function.

For an angle ``theta`` the support value is the top eigenvalue of
``cos(theta) A1 + sin(theta) A2`` (Hermitian parts of ``A``) and the matching
eigenvector ``v`` gives the boundary point ``<v|A|v>``.  Sampling many angles
gives an inscribed polygon of ``W(A)`` plus a circumscribed family of
half-planes, which is what :func:`contains` tests against.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .linalg import as_matrix, eigh, hermitian_parts

DEFAULT_RESOLUTION = 720


@dataclass(frozen=True)
class RangeBoundary:
    """Support-function samples of ``W(A)``.

    ``points[k]`` is a boundary point whose outward normal is
    ``exp(1j * angles[k])`` and ``support_values[k]`` the height of the
    supporting line in that direction.
    """

    angles: np.ndarray
    points: np.ndarray
    support_values: np.ndarray
    matrix: np.ndarray = field(repr=False)

    @property
    def barycenter(self) -> complex:
        return complex(np.trace(self.matrix) / self.matrix.shape[0])

    def box(self):
        """``(re_min, re_max, im_min, im_max)`` of the boundary points."""
        p = self.points
        return float(p.real.min()), float(p.real.max()), float(p.imag.min()), float(p.imag.max())

    def diameter(self) -> float:
        p = self.points
        return float(np.max(np.abs(p[:, None] - p[None, :])))

    def is_convex(self, tol=1e-10) -> bool:
        """Cross-product test on the distinct boundary points, in order."""
        p = _distinct(self.points, 1e-12 * max(1.0, self.diameter()))
        if len(p) < 3:
            return True
        e = np.roll(p, -1) - p
        cross = (np.conj(e) * np.roll(e, -1)).imag
        return bool(np.all(cross >= -tol))

    def flat_segments(self, tol=1e-8, min_length=None):
        """Maximal straight pieces of the boundary as ``(start, end)`` pairs.

        Every chord between consecutive distinct samples is a candidate.  A
        candidate is refined by re-evaluating the support points just before
        and just after its normal direction with a shrinking angular offset;
        on a curved arc the refined chord collapses, on a flat part it
        converges to the exact segment.  A refined chord is flat when the
        support line normal to it passes through both endpoints within
        ``tol`` (relative to ``max(1, diameter)``).  Collinear neighbours are
        merged.
        """
        diam = self.diameter()
        scale = max(1.0, diam)
        if min_length is None:
            min_length = 1e-4 * diam
        p = _distinct(self.points, 1e-12 * scale)
        if len(p) < 2:
            return []
        a1, a2 = _parts(self.matrix)
        start, end = p, np.roll(p, -1)
        keep = np.abs(end - start) > min_length
        start, end = start[keep], end[keep]
        step = 2 * np.pi / len(self.angles)
        for delta in step * 0.5 * 10.0 ** -np.arange(0, 10, 2):
            if start.size == 0:
                return []
            phi = np.angle(-1j * (end - start))
            start = _support_points(self.matrix, a1, a2, phi - delta)
            end = _support_points(self.matrix, a1, a2, phi + delta)
            keep = np.abs(end - start) > min_length
            start, end = start[keep], end[keep]
        if start.size == 0:
            return []
        normal = -1j * (end - start) / np.abs(end - start)
        h = _support_values(a1, a2, np.angle(normal))
        gap = np.maximum(h - (np.conj(normal) * start).real, h - (np.conj(normal) * end).real)
        flats = [(s, e) for s, e, g in zip(start, end, gap) if g <= tol * scale]
        return _merge_collinear(_dedupe_segments(flats, tol * scale), tol)

    def count_flat_parts(self, tol=1e-8) -> int:
        return len(self.flat_segments(tol))


@dataclass(frozen=True)
class EllipseParams:
    """Elliptical disk with foci ``focus1, focus2`` and full axes lengths."""

    focus1: complex
    focus2: complex
    minor_axis: float
    major_axis: float

    @property
    def center(self) -> complex:
        return (self.focus1 + self.focus2) / 2

    @property
    def semi_major(self) -> float:
        return self.major_axis / 2

    @property
    def semi_minor(self) -> float:
        return self.minor_axis / 2

    def support_point(self, theta):
        """Boundary point(s) with outward normal ``exp(1j*theta)``."""
        theta = np.asarray(theta, dtype=float)
        sep = self.focus2 - self.focus1
        rot = sep / abs(sep) if abs(sep) > 0 else 1.0 + 0j
        t = theta - np.angle(rot)
        a, b = self.semi_major, self.semi_minor
        norm = np.sqrt((a * np.cos(t)) ** 2 + (b * np.sin(t)) ** 2)
        local = (a * a * np.cos(t) + 1j * b * b * np.sin(t)) / norm
        return self.center + rot * local


def _parts(a):
    parts = hermitian_parts(a)
    return parts.herm, parts.antiherm


def _top_eigen(a1, a2, angles):
    stack = np.cos(angles)[:, None, None] * a1 + np.sin(angles)[:, None, None] * a2
    es = eigh(stack, check=False)
    return es.eigenvalues[:, -1], es.eigenvectors[:, :, -1]


def _support_values(a1, a2, angles):
    return _top_eigen(a1, a2, angles)[0]


def _support_points(a, a1, a2, angles):
    v = _top_eigen(a1, a2, angles)[1]
    return np.einsum("ki,ij,kj->k", np.conj(v), a, v)


def _dedupe_segments(flats, tol):
    out = []
    for s, e in flats:
        if not any(abs(s - s0) <= tol and abs(e - e0) <= tol for s0, e0 in out):
            out.append((s, e))
    return out


def _distinct(points, tol):
    """Drop cyclically consecutive duplicates."""
    keep = [points[0]]
    for z in points[1:]:
        if abs(z - keep[-1]) > tol:
            keep.append(z)
    if len(keep) > 1 and abs(keep[-1] - keep[0]) <= tol:
        keep.pop()
    return np.array(keep)


def _merge_collinear(flats, tol):
    if not flats:
        return []
    merged = [list(flats[0])]
    for start, end in flats[1:]:
        prev = merged[-1]
        if abs(start - prev[1]) <= tol and _same_direction(prev[1] - prev[0], end - start, tol):
            prev[1] = end
        else:
            merged.append([start, end])
    if len(merged) > 1:
        first, last = merged[0], merged[-1]
        if abs(last[1] - first[0]) <= tol and _same_direction(last[1] - last[0], first[1] - first[0], tol):
            first[0] = last[0]
            merged.pop()
    return [(complex(s), complex(e)) for s, e in merged]


def _same_direction(u, v, tol):
    return abs(np.angle(v / u)) <= tol


def support_point(a, theta):
    """Support value ``h(theta)`` and a boundary point attaining it.

    Returns
    -------
    h : float
        ``lambda_max(cos(theta) A1 + sin(theta) A2)``.
    p : complex
        ``<v|A|v>`` for the corresponding unit eigenvector ``v``.
    """
    a = as_matrix(a, "A")
    a1, a2 = _parts(a)
    h, v = _top_eigen(a1, a2, np.array([float(theta)]))
    v = v[0]
    return float(h[0]), complex(np.conj(v) @ a @ v)


def boundary(a, resolution=DEFAULT_RESOLUTION) -> RangeBoundary:
    """Sample the boundary of ``W(A)`` at ``resolution`` equally spaced angles."""
    a = as_matrix(a, "A")
    m = int(resolution)
    if m < 8:
        raise ValueError(f"resolution must be >= 8, got {m}")
    angles = 2 * np.pi * np.arange(m) / m
    a1, a2 = _parts(a)
    h, v = _top_eigen(a1, a2, angles)
    points = np.einsum("ki,ij,kj->k", np.conj(v), a, v)
    return RangeBoundary(angles=angles, points=points, support_values=h, matrix=a)


def contains(bnd: RangeBoundary, z, tol=1e-8, chunk=1 << 14):
    """Outer-approximation membership test against every sampled half-plane.

    ``z`` may be a scalar or an array; the result has the same shape.
    """
    z = np.asarray(z, dtype=np.complex128)
    flat = z.reshape(-1)
    normals = np.stack([np.cos(bnd.angles), np.sin(bnd.angles)])
    pts = np.stack([flat.real, flat.imag], axis=1)
    limit = bnd.support_values + tol
    out = np.empty(flat.shape, dtype=bool)
    for lo in range(0, flat.size, chunk):
        out[lo:lo + chunk] = np.all(pts[lo:lo + chunk] @ normals <= limit, axis=1)
    return bool(out[0]) if z.ndim == 0 else out.reshape(z.shape)


def ellipse_2x2(a) -> EllipseParams:
    """Murnaghan's elliptical range of a 2x2 matrix.

    Foci are the eigenvalues, the minor axis is
    ``sqrt(Tr AA* - |l1|^2 - |l2|^2)`` and the major axis follows from
    ``major^2 = minor^2 + |l1 - l2|^2``.
    """
    a = as_matrix(a, "A")
    if a.shape != (2, 2):
        raise DimensionError(f"ellipse_2x2 needs a 2x2 matrix, got order {a.shape[0]}")
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    disc = np.sqrt(tr * tr - 4 * det + 0j)
    l1, l2 = (tr - disc) / 2, (tr + disc) / 2
    minor_sq = float(np.real(np.trace(a @ np.conj(a.T)))) - abs(l1) ** 2 - abs(l2) ** 2
    minor = float(np.sqrt(max(minor_sq, 0.0)))
    major = float(np.hypot(minor, abs(l1 - l2)))
    return EllipseParams(focus1=complex(l1), focus2=complex(l2), minor_axis=minor, major_axis=major)


def hausdorff(p, q) -> float:
    """Hausdorff distance between two finite point sets in the complex plane."""
    p = np.asarray(p).reshape(-1)
    q = np.asarray(q).reshape(-1)
    d = np.abs(p[:, None] - q[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
