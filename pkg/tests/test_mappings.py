import numpy as np
import pytest

from lowerq import mappings as mp
from lowerq.errors import ImageLeftChart, NotDifferentiable
from lowerq.manifold import euclidean, ring, round_sphere
from lowerq.modulus import ExponentSet
from lowerq.quadrature import shell_grid

E2 = ExponentSet(2, 2)


def annulus_points(count, seed=0):
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.5, 1, count)
    t = rng.uniform(0, 2 * np.pi, count)
    return np.stack([r * np.cos(t), r * np.sin(t)], -1)


def test_identity_on_curved_metric():
    g = round_sphere(2)
    f = mp.identity_map(g)
    s = mp.dilatation_at(f, [1.0, 0.3], E2)
    assert (s.L, s.l, s.J, s.K_p) == pytest.approx((1, 1, 1, 1), abs=1e-12)


def test_diagonal_map():
    f = mp.linear_map([[2, 0], [0, 1]], euclidean(2))
    for analytic in (True, False):
        s = mp.dilatation_at(f, [0.3, 0.4], E2, analytic)
        assert (s.L, s.l, s.J, s.K_p) == pytest.approx((2, 1, 2, 2), rel=1e-9)


def test_radial_stretch_closed_form():
    f = mp.radial_stretch(2, euclidean(2))
    pts = annulus_points(50)
    r = np.linalg.norm(pts, axis=-1)
    L, l, J, K = mp.dilatation_fields(f, pts, E2)
    np.testing.assert_allclose(L, 2 * r)
    np.testing.assert_allclose(l, r)
    np.testing.assert_allclose(J, 2 * r**2)
    np.testing.assert_allclose(K, 2)


def test_finite_differences_agree_with_analytic_jacobians():
    pts = annulus_points(100, seed=3)
    for f in (mp.radial_stretch(2, euclidean(2)), mp.radial_stretch(1.5, euclidean(2)),
              mp.linear_map([[1, 2], [0.5, -1]], euclidean(2))):
        np.testing.assert_allclose(mp.finite_difference_jacobian(f, pts), f.jacobian(pts),
                                   rtol=1e-7, atol=1e-9)


def test_symbolic_map_matches_radial_stretch():
    sym = mp.symbolic_map(["x1*sqrt(x1^2 + x2^2)", "x2*sqrt(x1^2 + x2^2)"], euclidean(2))
    pts = annulus_points(20)
    np.testing.assert_allclose(mp.dilatation_fields(sym, pts, E2)[3], 2, rtol=1e-7)


def test_non_differentiable_map_detected():
    kink = mp.symbolic_map(["abs(x1)", "x2"], euclidean(2))
    with pytest.raises(NotDifferentiable):
        mp.finite_difference_jacobian(kink, np.array([[0.75e-5, 0.3]]))


def test_outer_dilatation_branches():
    assert mp.outer_dilatation(2.0, 2.0, 2) == 2
    assert mp.outer_dilatation(0.0, 0.0, 2) == 1
    assert mp.outer_dilatation(1.0, 0.0, 2) == np.inf


def test_rotation_invariance():
    f = mp.linear_map([[2, 0.3], [0.1, 1]], euclidean(2))
    c, s = np.cos(0.7), np.sin(0.7)
    rot = mp.rotated_chart(f, np.array([[c, -s], [s, c]]))
    pts = annulus_points(30)
    for analytic in (True, False):
        np.testing.assert_allclose(mp.dilatation_fields(rot, pts, E2, analytic)[3],
                                   mp.dilatation_fields(f, pts @ np.array([[c, -s], [s, c]]), E2,
                                                        analytic)[3], rtol=1e-7)


@pytest.fixture(scope="module")
def coarse_grid():
    return shell_grid(ring(euclidean(2), [0, 0], 0.5, 1.0), 16, 64)


def test_classify(coarse_grid):
    rep = mp.classify_map(mp.identity_map(euclidean(2)), coarse_grid)
    assert rep.lip_estimate == pytest.approx(1) and rep.lower_estimate == pytest.approx(1)
    rep = mp.classify_map(mp.linear_map([[3, 0], [0, 1]], euclidean(2)), coarse_grid)
    assert 2.5 < rep.lip_estimate <= 3 + 1e-12
    stretch = mp.radial_stretch(2, euclidean(2))
    rep = mp.classify_map(stretch, coarse_grid)
    assert rep.finitely_bilipschitz and rep.bilipschitz
    assert rep.lower_estimate >= 0.5 - 1e-9 and rep.lip_estimate <= 2 + 1e-9
    rep = mp.classify_map(stretch, coarse_grid, include_center=True)
    assert not rep.finitely_bilipschitz
    assert rep.failures == [(0.0, 0.0)]


def test_image_bound_examples(coarse_grid):
    flat = euclidean(2)
    rep = mp.verify_image_bound(mp.identity_map(flat), coarse_grid, E2)
    assert rep.holds and abs(rep.gap) <= 1e-3
    assert rep.rhs == pytest.approx(np.log(2) / (2 * np.pi), rel=1e-6)
    for f in (mp.linear_map([[2, 0], [0, 1]], flat), mp.radial_stretch(2, flat)):
        rep = mp.verify_image_bound(f, coarse_grid, E2)
        assert rep.holds and rep.lhs >= rep.rhs
        assert rep.kp_min == pytest.approx(2) and rep.kp_max == pytest.approx(2)
        assert rep.rhs == pytest.approx(np.log(2) / (4 * np.pi), rel=1e-6)


def test_image_bound_other_exponent(coarse_grid):
    f = mp.linear_map([[1.5, 0.2], [0, 1]], euclidean(2))
    assert mp.verify_image_bound(f, coarse_grid, ExponentSet(2, 3)).holds


def test_image_leaving_chart(coarse_grid):
    with pytest.raises(ImageLeftChart):
        mp.verify_image_bound(mp.linear_map([[100, 0], [0, 1]], euclidean(2)), coarse_grid, E2)
