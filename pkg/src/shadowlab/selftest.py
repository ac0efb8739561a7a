"""Fast invariant checks behind ``shadowlab selftest`` (well under a minute)."""
from __future__ import annotations

import math
import sys
import time

import numpy as np

from .dynamics import period, trajectories_identical, trajectory_spaces
from .linalg import eigh
from .normalize import normalization_constants
from .numrange import boundary, contains, ellipse_2x2, hausdorff
from .randshadow import BetaLaw, beta_cdf, ks_test, uniform_cdf
from .registry import BUILTINS, get_builtin
from .sampling import RngStream, random_pure_state
from .shadow import pure_samples, pure_shadow


def _eigensolver():
    rng = np.random.default_rng(11)
    worst = 0.0
    for n in (2, 3, 5, 8):
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = g + g.conj().T
        es = eigh(h)
        v = es.eigenvectors
        worst = max(worst, np.abs(h @ v - v * es.eigenvalues).max(), np.abs(v.conj().T @ v - np.eye(n)).max())
    return worst < 1e-12, f"max residual {worst:.1e}"


def _registry_alpha():
    worst = max(abs(normalization_constants(a).alpha - 1.0)
                for name, a in BUILTINS.items() if name[0] == "A" and not name.endswith("_raw"))
    return worst < 1e-12, f"max |alpha - 1| {worst:.1e}"


def _ellipse():
    a = get_builtin("A2_0")
    bnd = boundary(a, 1024)
    e = ellipse_2x2(a)
    d = hausdorff(bnd.points, e.support_point(bnd.angles))
    return d < 1e-8 and abs(e.semi_major - math.sqrt(0.5)) < 1e-10, f"hausdorff {d:.1e}"


def _flat_parts():
    counts = [boundary(get_builtin(f"A3_{i}"), 2048).count_flat_parts() for i in range(4)]
    return counts == [0, 1, 2, 3], f"flat parts {counts}"


def _support_and_mean():
    a = get_builtin("A3_1")
    z = pure_samples(a, 20_000, RngStream(3), threads=2)
    inside = contains(boundary(a), z).all()
    err = abs(z.mean() - np.trace(a) / 3)
    bound = 3 * np.linalg.norm(a) / math.sqrt(z.size)
    return bool(inside) and err < bound, f"mean error {err:.1e} (bound {bound:.1e})"


def _uniform_interval():
    z = pure_samples(np.diag([0.0, 1.0]), 100_000, RngStream(5), threads=2)
    d = ks_test(z.real, uniform_cdf()).statistic
    return d < 0.01, f"KS {d:.4f}"


def _determinism():
    a = get_builtin("A3_0")
    h1 = pure_shadow(a, 20_000, 32, RngStream(7), threads=3)
    h2 = pure_shadow(a, 20_000, 32, RngStream(7), threads=3)
    return bool(np.array_equal(h1.counts, h2.counts)), "count grids identical"


def _period():
    got = [period(np.diag(d)) for d in ([0.0, 1, 2], [0, 1, math.sqrt(2)], [0.0, 2, 6])]
    ok = got[1] is None and abs(got[0] - 2 * math.pi) < 1e-9 and abs(got[2] - math.pi) < 1e-9
    return ok, f"periods {got}"


def _identical_trajectories():
    jp = np.diag([math.sqrt(2), math.sqrt(2)], 1).astype(complex)
    sp = trajectory_spaces(jp)
    h = sum((k + 1.0) * b for k, b in enumerate(sp.ha_basis))
    b = sp.xa_basis[0]
    rho0, rho1 = np.eye(3) / 3 + 0.1 * b, np.eye(3) / 3 - 0.1 * b
    verdict, dev = trajectories_identical(jp, h, rho0, rho1, np.linspace(0, 10, 50))
    return verdict and dev < 1e-10 and sp.dim_xa == 6, f"deviation {dev:.1e}"


def _beta():
    vals = [beta_cdf(BetaLaw(1, 1), 0.3), beta_cdf(BetaLaw(2, 2), 0.5)]
    ok = abs(vals[0] - 0.3) < 1e-12 and abs(vals[1] - 0.5) < 1e-12
    return ok, f"cdf values {vals}"


def _pure_state_norm():
    psi = random_pure_state(6, RngStream(1), size=1000)
    err = np.abs(np.linalg.norm(psi, axis=1) - 1).max()
    return err < 1e-13, f"norm error {err:.1e}"


CHECKS = [
    ("hermitian eigensolver", _eigensolver),
    ("registry normalisation", _registry_alpha),
    ("2x2 elliptical range", _ellipse),
    ("flat parts, order 3", _flat_parts),
    ("shadow support and mean", _support_and_mean),
    ("uniform interval shadow", _uniform_interval),
    ("histogram determinism", _determinism),
    ("period from spectrum", _period),
    ("identical trajectories", _identical_trajectories),
    ("beta cdf", _beta),
    ("pure state sampling", _pure_state_norm),
]


def run_selftest(out=None) -> bool:
    out = sys.stdout if out is None else out
    all_ok = True
    for name, check in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is a failed check, not an abort
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok &= bool(ok)
        out.write(f"{'PASS' if ok else 'FAIL'}  {name:<26} {detail}  ({time.perf_counter() - t0:.2f} s)\n")
    out.write("selftest passed\n" if all_ok else "selftest FAILED\n")
    return all_ok
