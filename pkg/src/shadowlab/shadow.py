"""
Monte Carlo numerical shadows.

A shadow is the distribution of ``<psi|A|psi>`` (pure states, Fubini-Study
measure) or of ``Tr(rho A)`` (mixed states, induced measure ``mu_K``) in the
complex plane.  Sampling is split over ``threads`` worker streams derived
from one :class:`~shadowlab.sampling.RngStream`; each worker fills its own
accumulators and the results are merged in worker order, so the output
depends only on ``(seed, threads)``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, DegenerateProjectionError, DimensionError, EmptySectionError
from .linalg import as_matrix
from .numrange import RangeBoundary, boundary
from .randshadow import KsResult, ks_2samp
from .sampling import RngStream, random_induced_density, random_pure_state, random_simplex_point

CHUNK = 1 << 16
DEFAULT_BINS = (256, 256)

try:
    from scipy.spatial import ConvexHull, QhullError
except ImportError:  # pragma: no cover
    ConvexHull = None
    QhullError = Exception


def as_stream(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return RngStream(0 if rng is None else int(rng))
    raise TypeError("shadow sampling needs an RngStream or an integer seed")


# -- accumulators -----------------------------------------------------------

@dataclass
class Moments:
    """Streaming mean and covariance of complex samples (Chan's merge)."""

    n: int = 0
    mean: complex = 0j
    m2: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))

    def add(self, z):
        z = np.asarray(z).reshape(-1)
        if z.size == 0:
            return
        xy = np.stack([z.real, z.imag])
        mu = xy.mean(axis=1)
        dev = xy - mu[:, None]
        self.merge(Moments(z.size, complex(mu[0], mu[1]), dev @ dev.T))

    def merge(self, other: Moments):
        if other.n == 0:
            return
        if self.n == 0:
            self.n, self.mean, self.m2 = other.n, other.mean, other.m2.copy()
            return
        n = self.n + other.n
        delta = other.mean - self.mean
        dv = np.array([delta.real, delta.imag])
        self.m2 = self.m2 + other.m2 + np.outer(dv, dv) * self.n * other.n / n
        self.mean = self.mean + delta * other.n / n
        self.n = n

    @property
    def covariance(self) -> np.ndarray:
        """Unbiased 2x2 covariance of ``(Re z, Im z)``."""
        if self.n < 2:
            return np.full((2, 2), np.nan)
        return self.m2 / (self.n - 1)

    def standard_error(self) -> float:
        """Standard error of the complex mean, ``sqrt(tr cov / n)``."""
        return float(np.sqrt(np.trace(self.covariance) / self.n))

    def to_dict(self):
        cov = self.covariance
        return {
            "n": self.n,
            "mean": [self.mean.real, self.mean.imag],
            "cov": cov.tolist(),
        }


class _Collect:
    def __init__(self):
        self.parts = []

    def add(self, z):
        self.parts.append(z)

    def merge(self, other):
        self.parts.extend(other.parts)

    def result(self):
        return np.concatenate(self.parts) if self.parts else np.empty(0, dtype=complex)


class _Grid:
    """Integer count grid, half-open bins ``(e_i, e_{i+1}]`` (first bin closed)."""

    def __init__(self, box, bins):
        self.box = box
        self.bins = bins
        self.counts = np.zeros(bins, dtype=np.int64)
        self.outside = 0

    def _index(self, x, lo, hi, nb):
        w = (hi - lo) / nb
        idx = np.ceil((x - lo) / w).astype(np.int64) - 1
        idx[x == lo] = 0
        ok = (x >= lo) & (x <= hi)
        return np.clip(idx, 0, nb - 1), ok

    def add(self, z):
        re_min, re_max, im_min, im_max = self.box
        ir, okr = self._index(z.real, re_min, re_max, self.bins[0])
        ii, oki = self._index(z.imag, im_min, im_max, self.bins[1])
        ok = okr & oki
        self.outside += int(np.count_nonzero(~ok))
        np.add.at(self.counts, (ir[ok], ii[ok]), 1)

    def merge(self, other):
        self.counts += other.counts
        self.outside += other.outside


class _Line:
    """1D count grid along a segment, parameterised by arclength."""

    def __init__(self, start, end, bins):
        self.start, self.end, self.bins = start, end, bins
        self.length = abs(end - start)
        self.u = (end - start) / self.length
        self.counts = np.zeros(bins, dtype=np.int64)
        self.outside = 0

    def add(self, z):
        s = (np.conj(self.u) * (z - self.start)).real
        w = self.length / self.bins
        idx = np.ceil(s / w).astype(np.int64) - 1
        idx[s <= 0] = 0
        # rounding slack: a segment support has no width, so allow 1e-9 relative
        ok = (s >= -1e-9 * self.length) & (s <= self.length * (1 + 1e-9))
        self.outside += int(np.count_nonzero(~ok))
        np.add.at(self.counts, np.clip(idx[ok], 0, self.bins - 1), 1)

    def merge(self, other):
        self.counts += other.counts
        self.outside += other.outside


class _SupportMax:
    """Largest projection of the samples onto each sampled direction."""

    def __init__(self, angles):
        self.dirs = np.exp(1j * angles)
        self.maxima = np.full(angles.shape, -np.inf)

    def add(self, z):
        pts = z
        if ConvexHull is not None and z.size > 64:
            try:
                pts = z[ConvexHull(np.column_stack([z.real, z.imag])).vertices]
            except (QhullError, ValueError):
                pts = z
        proj = (np.conj(self.dirs)[None, :] * pts[:, None]).real
        self.maxima = np.maximum(self.maxima, proj.max(axis=0))

    def merge(self, other):
        self.maxima = np.maximum(self.maxima, other.maxima)


class _Strip:
    """Arclength positions of the samples within ``half_width`` of a line."""

    def __init__(self, point, direction, half_width):
        self.point, self.direction, self.half_width = point, direction, half_width
        self.parts = []
        self.total = 0

    def add(self, z):
        rel = np.conj(self.direction) * (z - self.point)
        self.parts.append(rel.real[np.abs(rel.imag) <= self.half_width])
        self.total += z.size

    def merge(self, other):
        self.parts.extend(other.parts)
        self.total += other.total

    def positions(self):
        return np.concatenate(self.parts) if self.parts else np.empty(0)


class _Multi:
    def __init__(self, *accs):
        self.accs = accs

    def add(self, z):
        for a in self.accs:
            a.add(z)

    def merge(self, other):
        for a, b in zip(self.accs, other.accs):
            a.merge(b)


def _split(total, parts):
    base, extra = divmod(int(total), parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def run_streams(draw, samples, rng, threads, make_acc):
    """Draw ``samples`` values over ``threads`` worker streams and reduce them.

    ``draw(generator, n)`` returns ``n`` complex values; ``make_acc()`` builds
    an accumulator with ``add`` and ``merge``.  Worker ``i`` owns child stream
    ``i`` of ``rng`` and a private accumulator; merging happens in worker
    order after all workers finish.
    """
    threads = max(1, int(threads))
    streams = as_stream(rng).split(threads)
    sizes = _split(samples, threads)

    def work(i):
        acc = make_acc()
        gen = streams[i].generator
        left = sizes[i]
        while left > 0:
            n = min(CHUNK, left)
            acc.add(draw(gen, n))
            left -= n
        return acc

    if threads == 1:
        accs = [work(0)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            accs = list(pool.map(work, range(threads)))
    total = accs[0]
    for acc in accs[1:]:
        total.merge(acc)
    return total


# -- draws ------------------------------------------------------------------

def _pure_draw(a):
    n = a.shape[0]
    at = a.T.copy()

    def draw(gen, size):
        psi = random_pure_state(n, gen, size)
        return np.sum(np.conj(psi) * (psi @ at), axis=1)
    return draw


def _mixed_draw(a, k):
    n = a.shape[0]
    at = a.T.copy()

    def draw(gen, size):
        rho = random_induced_density(n, k, gen, size)
        return np.einsum("sij,ij->s", rho, at)
    return draw


def _normal_draw(eigenvalues):
    lam = np.asarray(eigenvalues, dtype=complex)

    def draw(gen, size):
        return random_simplex_point(lam.size, gen, size) @ lam
    return draw


def pure_samples(a, samples, rng=0, threads=1) -> np.ndarray:
    """Raw shadow samples ``<psi_j|A|psi_j>`` for Fubini-Study ``psi_j``."""
    a = as_matrix(a, "A")
    return run_streams(_pure_draw(a), samples, rng, threads, _Collect).result()


def mixed_samples(a, ancilla, samples, rng=0, threads=1) -> np.ndarray:
    """Raw mixed-state shadow samples ``Tr(rho_j A)`` with ``rho_j ~ mu_K``."""
    a = as_matrix(a, "A")
    return run_streams(_mixed_draw(a, int(ancilla)), samples, rng, threads, _Collect).result()


def normal_samples(eigenvalues, samples, rng=0, threads=1) -> np.ndarray:
    """Raw samples ``sum_i t_i lambda_i`` with ``t`` uniform on the simplex."""
    return run_streams(_normal_draw(eigenvalues), samples, rng, threads, _Collect).result()


# -- histograms -------------------------------------------------------------

@dataclass(frozen=True)
class ShadowHistogram:
    """2D binned shadow density.

    ``counts[i, j]`` counts samples with real part in bin ``i`` and
    imaginary part in bin ``j``; ``density = counts / (samples * bin_area)``.
    """

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    bins_re: int
    bins_im: int
    counts: np.ndarray
    samples: int
    moments: Moments
    outside: int = 0
    section: CrossSection | None = None

    @property
    def bin_area(self) -> float:
        return (self.re_max - self.re_min) * (self.im_max - self.im_min) / (self.bins_re * self.bins_im)

    @property
    def density(self) -> np.ndarray:
        return self.counts / (self.samples * self.bin_area)

    def centers(self):
        """Bin-center coordinates ``(re, im)`` as 1D arrays."""
        wr = (self.re_max - self.re_min) / self.bins_re
        wi = (self.im_max - self.im_min) / self.bins_im
        return (self.re_min + wr * (np.arange(self.bins_re) + 0.5),
                self.im_min + wi * (np.arange(self.bins_im) + 0.5))

    def center_points(self) -> np.ndarray:
        re, im = self.centers()
        return re[:, None] + 1j * im[None, :]


@dataclass(frozen=True)
class SegmentHistogram:
    """1D shadow density along a segment ``start -> end`` (zero-area support)."""

    start: complex
    end: complex
    bins: int
    counts: np.ndarray
    samples: int
    moments: Moments
    outside: int = 0
    section: CrossSection | None = None

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    @property
    def bin_width(self) -> float:
        return self.length / self.bins

    @property
    def density(self) -> np.ndarray:
        return self.counts / (self.samples * self.bin_width)

    def center_points(self) -> np.ndarray:
        s = self.bin_width * (np.arange(self.bins) + 0.5)
        return self.start + (self.end - self.start) / self.length * s


def _segment_of(bnd: RangeBoundary, rtol=1e-12):
    """Endpoints if ``W(A)`` has zero width in some direction, else ``None``."""
    m = len(bnd.angles)
    h = bnd.support_values
    scale = max(1.0, float(np.max(np.abs(bnd.points))))
    if m % 2 == 0:
        width = h + np.roll(h, m // 2)
        if np.min(width) > 1e-10 * scale:
            return None
    p = bnd.points
    d = np.abs(p[:, None] - p[None, :])
    i, j = np.unravel_index(np.argmax(d), d.shape)
    if d[i, j] <= rtol * scale:
        return None
    start, end = p[i], p[j]
    if (start.real, start.imag) > (end.real, end.imag):
        start, end = end, start
    u = (end - start) / abs(end - start)
    # every boundary point must sit on the segment line
    if np.max(np.abs((np.conj(u) * (p - start)).imag)) > 1e-10 * scale:
        return None
    return complex(start), complex(end)


def default_box(bnd: RangeBoundary, pad=0.01):
    re_min, re_max, im_min, im_max = bnd.box()
    pr = (re_max - re_min) * pad
    pi = (im_max - im_min) * pad
    return re_min - pr, re_max + pr, im_min - pi, im_max + pi


def _histogram(draw, a, samples, rng, threads, bins, box, check_support, section=None):
    if int(samples) < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    bnd = boundary(a)
    segment = _segment_of(bnd) if box is None else None
    if segment is not None:
        nb = int(bins[0] if np.ndim(bins) else bins)
        main = lambda: _Line(segment[0], segment[1], nb)  # noqa: E731
    else:
        if box is None:
            box = default_box(bnd)
        box = tuple(float(x) for x in box)
        if not (box[1] > box[0] and box[3] > box[2]):
            raise DegenerateProjectionError(f"histogram box has zero area: {box}")
        bins = (int(bins[0]), int(bins[1])) if np.ndim(bins) else (int(bins), int(bins))
        main = lambda: _Grid(box, bins)  # noqa: E731
    if section is not None:
        p0, u = _line(section.get("line", "real"))
        hw = float(section["half_width"])
        if hw <= 0:
            raise ValueError("half_width must be positive")

    def make():
        accs = [main(), Moments()]
        accs.append(_SupportMax(bnd.angles) if check_support else None)
        accs.append(_Strip(p0, u, hw) if section is not None else None)
        return _Multi(*[x for x in accs if x is not None])

    acc = run_streams(draw, samples, rng, threads, make).accs
    grid, mom, rest = acc[0], acc[1], list(acc[2:])
    if check_support:
        _raise_outside(bnd, rest.pop(0))
    cs = None
    if section is not None:
        strip = rest.pop(0)
        cs = _section(p0, u, hw, strip.positions(), None, strip.total,
                      section.get("bins", 64), section.get("extent"))
    if segment is not None:
        return SegmentHistogram(start=segment[0], end=segment[1], bins=grid.bins, counts=grid.counts,
                                samples=int(samples), moments=mom, outside=grid.outside, section=cs)
    return ShadowHistogram(re_min=box[0], re_max=box[1], im_min=box[2], im_max=box[3],
                           bins_re=bins[0], bins_im=bins[1], counts=grid.counts,
                           samples=int(samples), moments=mom, outside=grid.outside, section=cs)


def _raise_outside(bnd, smax, tol=1e-8):
    excess = smax.maxima - bnd.support_values
    worst = float(np.max(excess))
    if worst > tol:
        raise ContractViolation(f"shadow sample outside W(A): support exceeded by {worst:.3e}")


def pure_shadow(a, samples, bins=DEFAULT_BINS, rng=0, threads=1, box=None, check_support=False,
                section=None):
    """Histogram of the pure-state numerical shadow of ``A``.

    Parameters
    ----------
    a : array_like
        Square complex matrix.
    samples : int
        Number of Fubini-Study random states.
    bins : int or (int, int)
        Bins along the real and imaginary axes.
    rng : RngStream or int
        Parent stream (or seed); worker ``i`` uses its ``i``-th child.
    threads : int
        Number of worker streams; part of the reproducibility key.
    box : tuple, optional
        ``(re_min, re_max, im_min, im_max)``; defaults to the range box
        padded by 1% per side.
    check_support : bool
        Raise :class:`ContractViolation` if any sample falls outside W(A).
    section : dict, optional
        ``{"line": ..., "half_width": ..., "bins": ..., "extent": ...}``;
        a :class:`CrossSection` of the raw samples is attached to the
        result (see :func:`cross_section` for the keys).

    Returns
    -------
    ShadowHistogram or SegmentHistogram
        The latter when W(A) is a segment and no explicit box was given.
    """
    a = as_matrix(a, "A")
    return _histogram(_pure_draw(a), a, samples, rng, threads, bins, box, check_support, section)


def mixed_shadow(a, ancilla, samples, bins=DEFAULT_BINS, rng=0, threads=1, box=None, check_support=False,
                 section=None):
    """Histogram of the mixed-state shadow ``Tr(rho A)``, ``rho ~ mu_K``.

    Same options as :func:`pure_shadow`; ``K = 1`` reproduces it.
    """
    a = as_matrix(a, "A")
    if int(ancilla) < 1:
        raise DimensionError(f"ancilla must be >= 1, got {ancilla}")
    return _histogram(_mixed_draw(a, int(ancilla)), a, samples, rng, threads, bins, box, check_support, section)


def normal_shadow(eigenvalues, samples, bins=DEFAULT_BINS, rng=0, threads=1, box=None):
    """Shadow of a normal matrix as the projection of the uniform simplex."""
    lam = np.asarray(eigenvalues, dtype=complex).reshape(-1)
    if lam.size < 2 or np.ptp(lam.real) + np.ptp(lam.imag) == 0:
        raise DegenerateProjectionError("all eigenvalues are equal; the shadow is a point mass")
    return _histogram(_normal_draw(lam), np.diag(lam), samples, rng, threads, bins, box, False)


def check_support(a, z, tol=1e-8, resolution=720):
    """Raise :class:`ContractViolation` unless every sample lies in W(A)."""
    bnd = boundary(a, resolution)
    smax = _SupportMax(bnd.angles)
    z = np.asarray(z, dtype=complex).reshape(-1)
    for lo in range(0, z.size, CHUNK):
        smax.add(z[lo:lo + CHUNK])
    _raise_outside(bnd, smax, tol)


# -- statistics on raw samples ---------------------------------------------

def shadow_moments(samples) -> Moments:
    """Streaming moments of a sample array or an iterable of sample chunks."""
    mom = Moments()
    if isinstance(samples, np.ndarray) or np.isscalar(samples):
        chunks = [np.asarray(samples)]
    else:
        chunks = samples
    for chunk in chunks:
        mom.add(np.asarray(chunk, dtype=complex))
    if mom.n < 2:
        raise ValueError("shadow_moments needs at least two samples")
    return mom


@dataclass(frozen=True)
class CrossSection:
    """Density of the samples inside a strip around a line, by arclength.

    ``density`` integrates to the fraction of all samples that fell in the
    strip.  ``positions`` keeps the raw arclength coordinates.
    """

    point: complex
    direction: complex
    half_width: float
    bin_edges: np.ndarray
    density: np.ndarray
    positions: np.ndarray
    total: int

    @property
    def mass(self) -> float:
        return self.positions.size / self.total


def _line(line):
    if line in ("real", "real-axis", None):
        return 0j, 1 + 0j
    if line in ("imag", "imaginary-axis"):
        return 0j, 1j
    point, direction = line
    direction = complex(direction)
    return complex(point), direction / abs(direction)


def cross_section(samples, line="real", half_width=0.01, bins=64, extent=None) -> CrossSection:
    """Histogram of samples within ``half_width`` of a line.

    Parameters
    ----------
    samples : array_like or ShadowHistogram
        Raw complex samples (preferred) or a 2D histogram, in which case
        bin centers stand in for samples.
    line : "real", "imag" or (point, direction)
        The line, as complex numbers; position is measured along
        ``direction`` from ``point``.
    extent : (float, float), optional
        Arclength range of the bins; defaults to the selected samples' range.

    Raises
    ------
    EmptySectionError
        If no sample lies inside the strip.
    """
    if half_width <= 0:
        raise ValueError("half_width must be positive")
    p0, u = _line(line)
    if isinstance(samples, ShadowHistogram):
        z = samples.center_points().reshape(-1)
        weights = samples.counts.reshape(-1)
        total = samples.samples
    else:
        z = np.asarray(samples, dtype=complex).reshape(-1)
        weights = None
        total = z.size
    rel = np.conj(u) * (z - p0)
    inside = np.abs(rel.imag) <= half_width
    if weights is not None:
        inside &= weights > 0
    return _section(p0, u, half_width, rel.real[inside],
                    None if weights is None else weights[inside], total, bins, extent)


def _section(p0, u, half_width, s, w, total, bins, extent):
    if s.size == 0:
        raise EmptySectionError("no samples inside the cross-section strip")
    lo, hi = (float(s.min()), float(s.max())) if extent is None else extent
    if hi <= lo:
        hi = lo + 1e-12
    counts, edges = np.histogram(s, bins=bins, range=(lo, hi), weights=w)
    density = counts / (total * np.diff(edges))
    positions = s if w is None else np.repeat(s, w)
    return CrossSection(point=p0, direction=u, half_width=float(half_width), bin_edges=edges,
                        density=density, positions=positions, total=int(total))


def arcsine_cdf(radius):
    """CDF of the arcsine density ``1 / (pi sqrt(radius^2 - x^2))`` on ``[-radius, radius]``."""
    def cdf(x):
        x = np.clip(np.asarray(x, dtype=float) / radius, -1.0, 1.0)
        return 0.5 + np.arcsin(x) / np.pi
    return cdf


@dataclass(frozen=True)
class SwapCheck:
    real: KsResult
    imag: KsResult

    @property
    def statistic(self) -> float:
        return max(self.real.statistic, self.imag.statistic)


def marginal_ks(z1, z2) -> SwapCheck:
    """Two-sample KS statistics on the real and imaginary marginals."""
    z1, z2 = np.asarray(z1), np.asarray(z2)
    return SwapCheck(real=ks_2samp(z1.real, z2.real), imag=ks_2samp(z1.imag, z2.imag))


def tensor_shadow_swap_check(a, b, samples, rng=0, threads=1) -> SwapCheck:
    """Compare the shadows of ``A (x) B`` and ``B (x) A`` on independent streams."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    first, second = as_stream(rng).split(2)
    za = pure_samples(np.kron(a, b), samples, first, threads)
    zb = pure_samples(np.kron(b, a), samples, second, threads)
    return marginal_ks(za, zb)
