"""
Shadows of random matrices and the statistics used to check them.

For a unitarily invariant random matrix the shadow equals the law of a
single diagonal entry.  Diagonal entries of induced-measure density matrices
are ``Beta(K, K(N-1))`` and ``|U_11|^2`` of a Haar unitary is
``Beta(1, N-1)``.  The Beta CDF is evaluated with a continued fraction and
compared to samples with one- and two-sample Kolmogorov-Smirnov statistics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .sampling import as_generator, random_haar_unitary, random_induced_density, random_pure_state

_CF_EPS = 4.5e-16  # two ulps of 1.0
_CF_TINY = 1e-300
_CF_MAXIT = 10_000


@dataclass(frozen=True)
class BetaLaw:
    """Beta distribution on ``[0, 1]``; ``b == 0`` means a point mass at 1."""

    a: float
    b: float

    @property
    def degenerate(self) -> bool:
        return self.b == 0

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    @property
    def variance(self) -> float:
        s = self.a + self.b
        return self.a * self.b / (s * s * (s + 1))

    def pdf(self, r):
        r = np.asarray(r, dtype=float)
        if self.degenerate:
            raise DomainError("point mass at 1 has no density")
        logb = math.lgamma(self.a) + math.lgamma(self.b) - math.lgamma(self.a + self.b)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.exp((self.a - 1) * np.log(r) + (self.b - 1) * np.log1p(-r) - logb)
        return np.where((r < 0) | (r > 1), 0.0, out)

    def cdf(self, r):
        return beta_cdf(self, r)


@dataclass(frozen=True)
class KsResult:
    """Kolmogorov-Smirnov statistic, sample size(s) and asymptotic p-value."""

    statistic: float
    n: int
    pvalue: float
    m: int | None = None


def density_diag_law(n, k) -> BetaLaw:
    """Law of ``rho_11`` for ``rho`` drawn from the induced measure ``mu_{N,K}``.

    For ``N = 1`` the diagonal entry is identically 1 and a point mass is
    returned (``b = 0``).
    """
    if n < 1 or k < 1:
        raise DomainError(f"need N >= 1 and K >= 1, got N={n}, K={k}")
    return BetaLaw(float(k), float(k * (n - 1)))


def unitary_overlap_law(n) -> BetaLaw:
    """Law of ``|<x|U|x>|^2`` for a Haar unitary of order ``N``."""
    if n < 1:
        raise DomainError(f"need N >= 1, got {n}")
    return BetaLaw(1.0, float(n - 1))


def _betacf(a, b, x):
    """Continued fraction for the incomplete beta (modified Lentz), vectorised in ``x``.

    Elements stop updating once their Lentz factor is within ``_CF_EPS`` of
    one, so a few slow elements do not keep the whole array iterating.
    """
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    x = np.asarray(x, dtype=float)
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _CF_TINY, _CF_TINY, d)
    d = 1.0 / d
    h = d.copy()
    idx = np.arange(x.size)
    for m in range(1, _CF_MAXIT + 1):
        xs, cs, ds = x[idx], c[idx], d[idx]
        m2 = 2 * m
        aa = m * (b - m) * xs / ((qam + m2) * (a + m2))
        ds = 1.0 + aa * ds
        ds = np.where(np.abs(ds) < _CF_TINY, _CF_TINY, ds)
        cs = 1.0 + aa / cs
        cs = np.where(np.abs(cs) < _CF_TINY, _CF_TINY, cs)
        ds = 1.0 / ds
        h[idx] *= ds * cs
        aa = -(a + m) * (qab + m) * xs / ((a + m2) * (qap + m2))
        ds = 1.0 + aa * ds
        ds = np.where(np.abs(ds) < _CF_TINY, _CF_TINY, ds)
        cs = 1.0 + aa / cs
        cs = np.where(np.abs(cs) < _CF_TINY, _CF_TINY, cs)
        ds = 1.0 / ds
        step = ds * cs
        h[idx] *= step
        c[idx], d[idx] = cs, ds
        live = np.abs(step - 1.0) >= _CF_EPS
        idx = idx[live]
        if idx.size == 0:
            break
    return h


def beta_cdf(law: BetaLaw, r):
    """Regularised incomplete beta function ``I_r(a, b)``.

    Raises
    ------
    DomainError
        If any ``r`` lies outside ``[0, 1]``.
    """
    scalar = np.ndim(r) == 0
    x = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
        raise DomainError("beta_cdf argument must lie in [0, 1]")
    if law.degenerate:
        out = (x >= 1.0).astype(float)
        return float(out[0]) if scalar else out
    a, b = float(law.a), float(law.b)
    out = np.empty_like(x)
    out[x <= 0] = 0.0
    out[x >= 1] = 1.0
    inner = (x > 0) & (x < 1)
    xi = x[inner]
    lbeta = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    front = np.exp(lbeta + a * np.log(xi) + b * np.log1p(-xi))
    direct = xi < (a + 1.0) / (a + b + 2.0)
    res = np.empty_like(xi)
    if np.any(direct):
        res[direct] = front[direct] * _betacf(a, b, xi[direct]) / a
    if np.any(~direct):
        xs = xi[~direct]
        res[~direct] = 1.0 - front[~direct] * _betacf(b, a, 1.0 - xs) / b
    out[inner] = np.clip(res, 0.0, 1.0)
    return float(out[0]) if scalar else out


def _kolmogorov_sf(lam):
    """Asymptotic survival function of the Kolmogorov distribution."""
    if lam < 0.2:
        return 1.0
    k = np.arange(1, 101)
    return float(np.clip(2 * np.sum((-1.0) ** (k - 1) * np.exp(-2 * k * k * lam * lam)), 0.0, 1.0))


def ks_test(samples, cdf) -> KsResult:
    """One-sample KS statistic ``sup |F_emp - F|`` against a reference CDF.

    ``cdf`` is a callable (vectorised) or anything with a ``cdf`` method.
    """
    x = np.sort(np.asarray(samples, dtype=float).reshape(-1))
    n = x.size
    if n == 0:
        raise ValueError("ks_test needs at least one sample")
    f = cdf.cdf if hasattr(cdf, "cdf") else cdf
    fx = np.asarray(f(x), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - fx)
    d_minus = np.max(fx - (i - 1) / n)
    d = float(max(d_plus, d_minus, 0.0))
    sq = math.sqrt(n)
    return KsResult(statistic=d, n=n, pvalue=_kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d))


def ks_2samp(x, y) -> KsResult:
    """Two-sample KS statistic between the empirical CDFs of ``x`` and ``y``."""
    x = np.sort(np.asarray(x, dtype=float).reshape(-1))
    y = np.sort(np.asarray(y, dtype=float).reshape(-1))
    if x.size == 0 or y.size == 0:
        raise ValueError("ks_2samp needs non-empty samples")
    grid = np.concatenate([x, y])
    fx = np.searchsorted(x, grid, side="right") / x.size
    fy = np.searchsorted(y, grid, side="right") / y.size
    d = float(np.max(np.abs(fx - fy)))
    en = math.sqrt(x.size * y.size / (x.size + y.size))
    return KsResult(statistic=d, n=x.size, m=y.size, pvalue=_kolmogorov_sf((en + 0.12 + 0.11 / en) * d))


def uniform_cdf(lo=0.0, hi=1.0):
    def cdf(x):
        return np.clip((np.asarray(x, dtype=float) - lo) / (hi - lo), 0.0, 1.0)
    return cdf


def ks_threshold(n) -> float:
    """Pass threshold used for law checks: 0.005 at 1e6 samples, 0.01 at 1e5."""
    return max(0.005, 3.16 / math.sqrt(n))


def _chunked(total, chunk):
    while total > 0:
        step = min(chunk, total)
        yield step
        total -= step


def sample_density_diagonal(n, k, samples, rng, chunk=1 << 16) -> np.ndarray:
    """``rho_11`` for ``samples`` induced-measure density matrices."""
    rng = as_generator(rng)
    return np.concatenate([
        random_induced_density(n, k, rng, size=s)[:, 0, 0].real for s in _chunked(samples, chunk)
    ])


def sample_unitary_diagonal(n, samples, rng, chunk=1 << 16) -> np.ndarray:
    """``U_11`` for ``samples`` Haar unitaries (complex)."""
    rng = as_generator(rng)
    return np.concatenate([random_haar_unitary(n, rng, size=s)[:, 0, 0] for s in _chunked(samples, chunk)])


def sample_unitary_overlap(n, samples, rng, chunk=1 << 16) -> np.ndarray:
    """``<x|U|x>`` with ``U`` Haar and ``x`` Fubini-Study, both fresh per sample."""
    rng = as_generator(rng)
    out = []
    for s in _chunked(samples, chunk):
        u = random_haar_unitary(n, rng, size=s)
        x = random_pure_state(n, rng, size=s)
        out.append(np.einsum("si,sij,sj->s", np.conj(x), u, x))
    return np.concatenate(out)


def check_law(which, n, k=1, samples=1_000_000, rng=0, threshold=None) -> dict:
    """Monte Carlo check of a closed-form law; returns a JSON-ready summary."""
    if which == "density":
        law = density_diag_law(n, k)
        rng = as_generator(rng)
        draws = sample_density_diagonal(n, k, samples, rng)
    elif which == "unitary":
        law = unitary_overlap_law(n)
        draws = np.abs(sample_unitary_diagonal(n, samples, rng)) ** 2
    else:
        raise ValueError(f"unknown law {which!r}; use 'density' or 'unitary'")
    thr = ks_threshold(samples) if threshold is None else float(threshold)
    if law.degenerate:
        stat = float(np.max(np.abs(draws - 1.0)))
    else:
        stat = ks_test(draws, law).statistic
    return {
        "law": f"Beta({law.a:g}, {law.b:g})",
        "which": which,
        "n": n,
        "k": k if which == "density" else None,
        "samples": samples,
        "ks_statistic": stat,
        "threshold": thr,
        "pass": bool(stat < thr),
    }
