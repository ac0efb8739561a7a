"""Acceptance criteria 1-12, each at its stated tolerance.

Every test records one PASS/FAIL line through the ``report`` fixture; the
lines are repeated under "acceptance criteria" in the terminal summary.
"""
import io
import math
import time

import numpy as np
import pytest

from shadowlab import cli
from shadowlab.dynamics import trajectories_identical, trajectory_spaces
from shadowlab.normalize import natural_rescale, normalization_constants
from shadowlab.numrange import boundary, contains, ellipse_2x2, hausdorff
from shadowlab.randshadow import (
    BetaLaw,
    check_law,
    density_diag_law,
    ks_test,
    sample_density_diagonal,
    uniform_cdf,
)
from shadowlab.registry import BUILTINS, get_builtin
from shadowlab.sampling import RngStream, random_haar_unitary, random_pure_state
from shadowlab.shadow import (
    arcsine_cdf,
    cross_section,
    marginal_ks,
    mixed_samples,
    pure_samples,
    tensor_shadow_swap_check,
)

from conftest import random_complex


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_criterion_01_normalization_constants(report):
    with Timer() as t:
        named = {"A2_0": math.sqrt(2 / 5), "A3_3": math.sqrt(2 / 3), "A4_8": 1 / math.sqrt(2)}
        worst = 0.0
        for name, scale in named.items():
            raw = get_builtin(f"{name}_raw")
            np.testing.assert_allclose(get_builtin(name), scale * raw, atol=1e-15)
            worst = max(worst, abs(normalization_constants(scale * raw).alpha - 1))
        for name, a in BUILTINS.items():
            if name.startswith("A"):
                worst = max(worst, abs(normalization_constants(natural_rescale(a)).alpha - 1))
                if not name.endswith("_raw"):
                    worst = max(worst, abs(normalization_constants(a).alpha - 1))
    ok = worst < 1e-12 and t.elapsed < 1
    report(1, ok, f"max |alpha - 1| = {worst:.1e} ({t.elapsed:.2f} s)")
    assert ok


def test_criterion_02_uniform_interval(report):
    with Timer() as t:
        z = pure_samples(np.diag([0.0, 1.0]), 1_000_000, RngStream(2), threads=4)
        d = ks_test(z.real, uniform_cdf(0, 1)).statistic
    ok = d < 0.005 and np.abs(z.imag).max() < 1e-12 and t.elapsed < 5
    report(2, ok, f"KS to U[0,1] = {d:.5f} < 0.005 ({t.elapsed:.2f} s)")
    assert ok


def test_criterion_03_arcsine_cross_section(report):
    with Timer() as t:
        z = pure_samples(get_builtin("A2_0"), 10_000_000, RngStream(3), threads=4)
        cs = cross_section(z, "real", half_width=0.01, bins=64)
        d = ks_test(cs.positions, arcsine_cdf(math.sqrt(0.5))).statistic
    ok = d < 0.01 and t.elapsed < 60
    report(3, ok, f"KS to arcsine on {cs.positions.size} strip samples = {d:.5f} < 0.01 ({t.elapsed:.2f} s)")
    assert ok


def test_criterion_04_murnaghan_ellipse(report):
    with Timer() as t:
        a = get_builtin("A2_0")
        bnd = boundary(a, 1024)
        e = ellipse_2x2(a)
        dist = hausdorff(bnd.points, e.support_point(bnd.angles))
        axis_err = abs(e.semi_major - math.sqrt(2) / 2)
    ok = dist < 1e-8 and axis_err < 1e-10 and t.elapsed < 1
    report(4, ok, f"Hausdorff {dist:.1e} < 1e-8, |semi-major - R2| {axis_err:.1e} < 1e-10 ({t.elapsed:.2f} s)")
    assert ok


def test_criterion_05_range_classes(report):
    with Timer() as t:
        counts = [boundary(get_builtin(f"A3_{i}"), 2048).count_flat_parts(tol=1e-8) for i in range(4)]
    ok = counts == [0, 1, 2, 3] and t.elapsed < 5
    report(5, ok, f"flat parts of A3_0..A3_3 = {counts} ({t.elapsed:.2f} s)")
    assert ok


def test_criterion_06_support_and_barycenter(report):
    stream = RngStream(6)
    failures = []
    with Timer() as t:
        for (name, a), sub in zip(BUILTINS.items(), stream.split(len(BUILTINS))):
            n = a.shape[0]
            z = pure_samples(a, 100_000, sub, threads=4)
            inside = contains(boundary(a), z, tol=1e-8).all()
            err = abs(z.mean() - np.trace(a) / n)
            bound = 3 * np.linalg.norm(a) / math.sqrt(z.size)
            if not (inside and err < bound):
                failures.append(f"{name} (inside={inside}, mean error {err:.2e} vs {bound:.2e})")
    ok = not failures and t.elapsed < 30
    report(6, ok, f"{len(BUILTINS)} matrices, failures: {failures or 'none'} ({t.elapsed:.2f} s)")
    assert ok


def test_criterion_07_invariance_and_swap(report, nprng):
    stream = RngStream(7)
    worst_u = worst_t = 0.0
    with Timer() as t:
        for inst, (s1, s2, s3) in enumerate(zip(*[iter(stream.split(9))] * 3)):
            n = 3 + inst % 2
            a = random_complex(nprng, n)
            u = random_haar_unitary(n, nprng)
            za = pure_samples(a, 100_000, s1, threads=4)
            zu = pure_samples(u @ a @ u.conj().T, 100_000, s2, threads=4)
            worst_u = max(worst_u, marginal_ks(za, zu).statistic)
            b = random_complex(nprng, 2 + inst % 2)
            worst_t = max(worst_t, tensor_shadow_swap_check(a, b, 100_000, s3, threads=4).statistic)
    ok = worst_u < 0.01 and worst_t < 0.01 and t.elapsed < 30
    report(7, ok, f"max KS A vs UAU* {worst_u:.4f}, A(x)B vs B(x)A {worst_t:.4f}, both < 0.01 ({t.elapsed:.2f} s)")
    assert ok


def test_criterion_08_mixed_shadow_identity(report, nprng):
    stream = RngStream(8)
    stats = {}
    with Timer() as t:
        for (n, k), (s1, s2) in zip([(2, 2), (3, 2), (2, 3)], zip(*[iter(stream.split(6))] * 2)):
            a = random_complex(nprng, n)
            zm = mixed_samples(a, k, 100_000, s1, threads=4)
            zp = pure_samples(np.kron(a, np.eye(k)), 100_000, s2, threads=4)
            stats[(n, k)] = round(marginal_ks(zm, zp).statistic, 4)
    ok = max(stats.values()) < 0.01 and t.elapsed < 60
    report(8, ok, f"marginal KS by (N, K): {stats}, all < 0.01 ({t.elapsed:.2f} s)")
    assert ok


CASES_9 = [(n, k) for n in (2, 3, 4) for k in (1, n)]


def test_criterion_09_beta_laws(report):
    stats = {}
    with Timer() as t:
        for i, (n, k) in enumerate(CASES_9):
            stats[f"rho N={n} K={k}"] = check_law("density", n, k, 1_000_000, RngStream(900 + i))["ks_statistic"]
        for n in (2, 3, 4):
            stats[f"U N={n}"] = check_law("unitary", n, samples=1_000_000, rng=RngStream(950 + n))["ks_statistic"]
    worst = max(stats.values())
    ok = worst < 0.005 and t.elapsed < 60
    report(9, ok, f"max KS over {len(stats)} laws = {worst:.5f} < 0.005 ({t.elapsed:.2f} s)")
    assert ok


def _literal_density_law(n, k):
    # (1 - r)^(K-1) r^(K(N-1)-1): the same Beta pair with the exponents exchanged
    return BetaLaw(float(k * (n - 1)), float(k))


@pytest.mark.parametrize("n,k", [
    pytest.param(n, k, marks=pytest.mark.xfail(
        strict=True, reason="at N = 2 the exchanged exponents give the same law Beta(K, K)"))
    if n == 2 else (n, k)
    for n, k in CASES_9
])
def test_criterion_09_negative_control(report, n, k):
    draws = sample_density_diagonal(n, k, 1_000_000, RngStream(900 + CASES_9.index((n, k))).generator)
    d_literal = ks_test(draws, _literal_density_law(n, k)).statistic
    d_true = ks_test(draws, density_diag_law(n, k)).statistic
    rejected = d_literal >= 0.005
    note = "" if rejected or n > 2 else " [expected: the two laws coincide at N = 2]"
    report("9nc", rejected, f"exchanged-exponent law N={n} K={k}: KS {d_literal:.5f} "
           f"(correct law {d_true:.5f}); must be >= 0.005{note}")
    assert rejected


def test_criterion_10_identical_trajectories(report, nprng):
    with Timer() as t:
        jp = np.diag([math.sqrt(2), math.sqrt(2)], 1).astype(complex)
        sp = trajectory_spaces(jp)
        h = sum(c * b for c, b in zip((0.7, 1.3), sp.ha_basis))
        x = sum(c * b for c, b in zip(nprng.normal(size=sp.dim_xa), sp.xa_basis))
        x *= 0.1 / np.linalg.norm(x)
        rho0 = np.diag([0.5, 0.3, 0.2]).astype(complex) + x / 2
        rho1 = rho0 - x
        times = np.linspace(0, 10, 200)
        same, dev = trajectories_identical(jp, h, rho0, rho1, times, tol=1e-10)
        bump = random_complex(nprng, 3)
        h_pert = h + 0.3 * (bump + bump.conj().T) / 2
        _, dev_pert = trajectories_identical(jp, h_pert, rho0, rho1, times, tol=1e-10)
        generic = [trajectory_spaces(random_complex(nprng, 3)).dim_xa for _ in range(3)]
    ok = same and dev < 1e-10 and dev_pert > 1e-4 and sp.dim_xa == 6 and generic == [6, 6, 6] and t.elapsed < 5
    report(10, ok, f"deviation {dev:.1e} < 1e-10, perturbed H {dev_pert:.2e} > 1e-4, "
           f"dim X_A = {sp.dim_xa} (generic {generic}) ({t.elapsed:.2f} s)")
    assert ok


def test_criterion_11_simplex_uniformity(report):
    stats = {}
    with Timer() as t:
        for n in (2, 3, 5):
            gen = RngStream(1100 + n).generator
            r = np.abs(random_pure_state(n, gen, size=1_000_000)[:, 0]) ** 2
            stats[n] = round(ks_test(r, BetaLaw(1.0, n - 1.0)).statistic, 5)
    ok = max(stats.values()) < 0.005 and t.elapsed < 15
    report(11, ok, f"KS to Beta(1, N-1) by N: {stats}, all < 0.005 ({t.elapsed:.2f} s)")
    assert ok


def test_criterion_12_determinism(report, tmp_path):
    argv = ["shadow", "--builtin", "A3_0", "--samples", "100000", "--seed", "7", "--threads", "4",
            "--format", "csv"]
    with Timer() as t:
        codes = [cli.run(argv + ["--out", str(tmp_path / p)], io.StringIO()) for p in ("one", "two")]
        first, second = (tmp_path / "one.csv").read_bytes(), (tmp_path / "two.csv").read_bytes()
    ok = codes == [0, 0] and first == second and len(first) > 0 and t.elapsed < 5
    report(12, ok, f"two runs, {len(first)} bytes each, identical={first == second} ({t.elapsed:.2f} s)")
    assert ok
