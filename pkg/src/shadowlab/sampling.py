"""
Random quantum objects: Fubini-Study pure states, Haar unitaries,
induced-measure density matrices and uniform simplex points.

Randomness comes from :class:`RngStream`, a Philox counter-based generator
keyed by ``(seed, stream_id)``.  Gaussians are drawn with numpy's ziggurat
``standard_normal``; this choice is fixed so results are reproducible.

Every sampler takes an optional ``size`` and then returns a leading batch
axis of that length.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionError


class RngStream:
    """Reproducible random stream identified by ``(seed, stream_id)``.

    Two streams with the same key produce bit-identical sequences; distinct
    ``stream_id`` values give independent sequences (numpy ``SeedSequence``
    spawn keys feeding a Philox generator).  :meth:`split` derives worker
    streams whose keys extend the parent key.
    """

    def __init__(self, seed: int = 0, stream_id: int = 0, _path: tuple = ()):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._path = tuple(_path)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,) + self._path)
        self.generator = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        extra = f", path={self._path}" if self._path else ""
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}{extra})"

    def split(self, count: int) -> list[RngStream]:
        """``count`` independent child streams, one per worker."""
        return [RngStream(self.seed, self.stream_id, self._path + (i,)) for i in range(count)]


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return RngStream(0 if rng is None else int(rng)).generator
    raise TypeError(f"cannot use {type(rng).__name__} as a random stream")


def _check_dim(dim, name="dim"):
    if int(dim) < 1:
        raise DimensionError(f"{name} must be >= 1, got {dim}")
    return int(dim)


def complex_gaussian(shape, rng) -> np.ndarray:
    """i.i.d. complex normals with independent N(0,1) real and imaginary parts."""
    g = as_generator(rng).standard_normal(tuple(shape) + (2,))
    return g[..., 0] + 1j * g[..., 1]


def _batch(size):
    return () if size is None else (int(size),)


def random_pure_state(dim, rng, size=None) -> np.ndarray:
    """Fubini-Study random pure state(s): normalised complex Gaussian vectors."""
    dim = _check_dim(dim)
    z = complex_gaussian(_batch(size) + (dim,), rng)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def random_haar_unitary(dim, rng, size=None) -> np.ndarray:
    """Haar random unitary via QR of a Ginibre matrix with the phase fix.

    Columns of ``Q`` are multiplied by the phase of the matching diagonal
    entry of ``R`` so the factorisation is unique and ``Q`` is exactly Haar.
    """
    dim = _check_dim(dim)
    z = complex_gaussian(_batch(size) + (dim, dim), rng)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[..., None, :]


def random_induced_density(dim, ancilla, rng, size=None) -> np.ndarray:
    """Density matrix ``X X* / Tr X X*`` with ``X`` an ``N x K`` Ginibre matrix.

    This is the partial trace of a random pure state on ``N x K``, i.e. the
    induced measure ``mu_K``; ``K = N`` gives the Hilbert-Schmidt measure and
    ``K = 1`` a random pure-state projector.
    """
    dim = _check_dim(dim)
    ancilla = _check_dim(ancilla, "ancilla")
    x = complex_gaussian(_batch(size) + (dim, ancilla), rng)
    rho = x @ np.conj(np.swapaxes(x, -1, -2))
    tr = np.real(np.trace(rho, axis1=-2, axis2=-1))
    return rho / tr[..., None, None]


def random_simplex_point(dim, rng, size=None) -> np.ndarray:
    """Uniform point of the probability simplex, as ``|c_i|^2`` of a FS state."""
    psi = random_pure_state(dim, rng, size)
    p = np.abs(psi) ** 2
    return p / p.sum(axis=-1, keepdims=True)


def random_ginibre(dim, rng, size=None) -> np.ndarray:
    dim = _check_dim(dim)
    return complex_gaussian(_batch(size) + (dim, dim), rng)
