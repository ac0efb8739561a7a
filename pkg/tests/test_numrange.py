import numpy as np
import pytest

from shadowlab.errors import DimensionError
from shadowlab.normalize import natural_rescale
from shadowlab.numrange import boundary, contains, ellipse_2x2, hausdorff, support_point
from shadowlab.registry import BUILTINS, get_builtin

from conftest import random_complex

A3 = [f"A3_{i}" for i in range(4)]
A4 = [f"A4_{i}" for i in range(9)]


def test_support_point_examples():
    h, p = support_point(np.diag([0.0, 1.0]), 0.0)
    assert h == pytest.approx(1.0) and p == pytest.approx(1.0)
    for theta in (0.0, 0.4, 2.0, 5.5):
        h, p = support_point([[0, 1], [0, 0]], theta)
        assert h == pytest.approx(0.5, abs=1e-14)
        assert p == pytest.approx(0.5 * np.exp(1j * theta), abs=1e-12)
    h, p = support_point(get_builtin("A3_3"), 0.0)
    assert p == pytest.approx(np.sqrt(2 / 3), abs=1e-14)


def test_boundary_invariants(nprng):
    for n in (2, 3, 5, 8):
        a = random_complex(nprng, n)
        bnd = boundary(a, 256)
        assert np.all(np.diff(bnd.angles) > 0) and bnd.angles[0] == 0 and bnd.angles[-1] < 2 * np.pi
        gap = (np.exp(-1j * bnd.angles) * bnd.points).real - bnd.support_values
        assert np.abs(gap).max() < 1e-10
        assert bnd.is_convex(1e-10)


def test_boundary_resolution_floor():
    with pytest.raises(ValueError):
        boundary(np.eye(2), 4)


def test_normal_matrix_range_is_eigenvalue_hull(nprng):
    lam = np.array([1.0, 1j, -1.0, -0.7j])
    q, _ = np.linalg.qr(random_complex(nprng, 4))
    a = q @ np.diag(lam) @ q.conj().T
    bnd = boundary(a, 720)
    # every vertex is attained; at the edge normals the top eigenvalue is
    # degenerate and the sampled point may sit anywhere on that edge
    assert all(np.abs(bnd.points - v).min() < 1e-12 for v in lam)
    ordered = lam[np.argsort(np.angle(lam))]
    start, end = ordered, np.roll(ordered, -1)
    t = np.clip(((bnd.points[:, None] - start) / (end - start)).real, 0, 1)
    dist = np.abs(bnd.points[:, None] - (start + t * (end - start))).min(axis=1)
    assert dist.max() < 1e-12


@pytest.mark.parametrize("name,count", list(zip(A3, [0, 1, 2, 3])))
def test_flat_parts_order_three(name, count):
    assert boundary(get_builtin(name), 2048).count_flat_parts() == count


@pytest.mark.parametrize("name,count", list(zip(A4, [0, 1, 2, 2, 3, 3, 4, 4, 4])))
def test_flat_parts_order_four(name, count):
    assert boundary(get_builtin(name), 2048).count_flat_parts() == count


def test_flat_segments_of_triangle_are_its_edges():
    a = get_builtin("A3_3")
    lam = np.diag(a)
    segs = boundary(a, 2048).flat_segments()
    for s, e in segs:
        assert np.abs(lam - s).min() < 1e-9 and np.abs(lam - e).min() < 1e-9


def test_flat_part_of_ellipse_plus_point():
    # diag block (2x2 Jordan) plus a far eigenvalue: two tangent segments
    a = np.zeros((3, 3), dtype=complex)
    a[0, 1] = 1.0
    a[2, 2] = 2.0
    assert boundary(a, 2048).count_flat_parts() == 2


def test_segment_range_has_two_flat_sides():
    assert boundary(np.diag([0.0, 1.0]), 720).count_flat_parts() == 2


def test_contains_examples(nprng):
    for name in ("A3_1", "A4_0"):
        a = get_builtin(name)
        bnd = boundary(a)
        assert contains(bnd, np.trace(a) / a.shape[0])
        h0 = bnd.support_values[0]
        assert not contains(bnd, h0 + 1)
        grid = np.array([0.0, h0 + 1, 0.1j])
        np.testing.assert_array_equal(contains(bnd, grid), [True, False, True])


def test_contains_random_samples(stream):
    from shadowlab.sampling import random_pure_state

    a = get_builtin("A3_0")
    psi = random_pure_state(3, stream, size=100_000)
    z = np.einsum("si,ij,sj->s", psi.conj(), a, psi)
    assert contains(boundary(a), z, tol=1e-8).all()


def test_ellipse_examples():
    e = ellipse_2x2([[0, 1], [0, 0]])
    assert e.focus1 == 0 and e.focus2 == 0
    assert e.minor_axis == pytest.approx(1.0) and e.major_axis == pytest.approx(1.0)
    e = ellipse_2x2(np.diag([1.0, 2j]))
    assert e.minor_axis == pytest.approx(0.0, abs=1e-7)
    assert {e.focus1, e.focus2} == {1.0, 2j}


def test_ellipse_of_two_level_example():
    a = get_builtin("A2_0")
    e = ellipse_2x2(a)
    assert e.semi_major == pytest.approx(np.sqrt(2) / 2, abs=1e-10)
    assert e.minor_axis == pytest.approx(np.sqrt(2 / 5), abs=1e-12)
    assert sorted([e.focus1.real, e.focus2.real]) == pytest.approx([-np.sqrt(2 / 5), np.sqrt(2 / 5)])
    bnd = boundary(a, 1024)
    assert hausdorff(bnd.points, e.support_point(bnd.angles)) < 1e-8


def test_ellipse_matches_boundary_random(nprng):
    for _ in range(10):
        a = random_complex(nprng, 2)
        e = ellipse_2x2(a)
        assert e.major_axis ** 2 == pytest.approx(e.minor_axis ** 2 + abs(e.focus1 - e.focus2) ** 2)
        bnd = boundary(a, 1024)
        assert hausdorff(bnd.points, e.support_point(bnd.angles)) < 1e-8


def test_ellipse_wrong_order():
    with pytest.raises(DimensionError):
        ellipse_2x2(np.eye(3))


def test_translation_scaling_covariance(nprng):
    a = random_complex(nprng, 4)
    s, c = 2.5, 0.3 - 1.1j
    b1 = boundary(a, 128)
    b2 = boundary(s * a + c * np.eye(4), 128)
    np.testing.assert_allclose(b2.points, s * b1.points + c, atol=1e-10)


@pytest.mark.parametrize("name", sorted(n for n in BUILTINS if n.startswith("A") and not n.endswith("_raw")))
def test_rescaled_range_inside_outer_sphere(name):
    a = get_builtin(name)
    n = a.shape[0]
    bnd = boundary(natural_rescale(a), 720)
    assert np.abs(bnd.points).max() <= np.sqrt((n - 1) / n) + 1e-9


def test_rescaled_random_range_inside_outer_sphere(nprng):
    for n in (2, 3, 6):
        bnd = boundary(natural_rescale(random_complex(nprng, n)), 360)
        assert np.abs(bnd.points).max() <= np.sqrt((n - 1) / n) + 1e-9


def test_box_and_barycenter():
    a = get_builtin("A3_3")
    bnd = boundary(a, 720)
    lo_re, hi_re, lo_im, hi_im = bnd.box()
    assert hi_re == pytest.approx(np.sqrt(2 / 3))
    assert lo_im == pytest.approx(-hi_im)
    assert bnd.barycenter == pytest.approx(0, abs=1e-15)
