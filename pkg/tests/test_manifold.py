import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lowerq import manifold as mf
from lowerq.errors import (ConfigError, NonPositiveDefinite, RadiusTooLarge,
                           TrajectoryLeftChart)


def sphere_embed(x):
    """Unit-sphere embedding of the polar chart (colatitude, longitude)."""
    t, p = x[..., 0], x[..., 1]
    return np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], -1)


# --- geodesic shooting -------------------------------------------------------


def test_flat_shoot_is_straight():
    np.testing.assert_allclose(mf.geodesic_shoot(mf.euclidean(2), [0, 0], [1, 0], 1.0), [1, 0])


def test_poincare_shoot_through_origin():
    for L in (0.5, 1.0, 2.0):
        end = mf.geodesic_shoot(mf.poincare_ball(2), [0, 0], [0.5, 0], L)
        np.testing.assert_allclose(end, [np.tanh(L / 2), 0], atol=1e-8)


def test_sphere_meridian_quarter_circle():
    start = np.array([0.3, 0.0])
    end = mf.geodesic_shoot(mf.round_sphere(2), start, [1.0, 0.0], np.pi / 2)
    np.testing.assert_allclose(end, [0.3 + np.pi / 2, 0.0], atol=1e-8)


def test_sphere_oblique_geodesic_matches_great_circle():
    start = np.array([1.0, 0.4])
    vel = np.array([0.6, 0.8 / np.sin(1.0)])  # unit length in g
    L = 1.1
    end = mf.geodesic_shoot(mf.round_sphere(2), start, vel, L)
    p0 = sphere_embed(start)
    e_t = np.array([np.cos(1.0) * np.cos(0.4), np.cos(1.0) * np.sin(0.4), -np.sin(1.0)])
    e_p = np.array([-np.sin(0.4), np.cos(0.4), 0.0])
    tangent = 0.6 * e_t + 0.8 * e_p
    np.testing.assert_allclose(sphere_embed(end), np.cos(L) * p0 + np.sin(L) * tangent, atol=1e-8)


def test_shoot_requires_unit_speed():
    with pytest.raises(ValueError):
        mf.geodesic_shoot(mf.poincare_ball(2), [0, 0], [1, 0], 1.0)


def test_shoot_leaving_chart():
    with pytest.raises(TrajectoryLeftChart):
        mf.geodesic_shoot(mf.round_sphere(2), [0.3, 0.0], [-1.0, 0.0], 1.0)


# --- distance -----------------------------------------------------------------


def test_distance_examples():
    assert mf.geodesic_distance(mf.euclidean(2), [0, 0], [3, 4]) == pytest.approx(5)
    assert mf.geodesic_distance(mf.conformal_flat(2, 4.0), [0, 0], [1, 0]) == pytest.approx(2, rel=1e-8)
    assert mf.geodesic_distance(mf.poincare_ball(2), [0, 0], [0.5, 0]) == pytest.approx(
        2 * np.arctanh(0.5), rel=1e-9)


def test_sphere_distance_is_great_circle_angle():
    a, b = np.array([1.2, 0.1]), np.array([1.5, 0.6])
    angle = np.arccos(np.dot(sphere_embed(a), sphere_embed(b)))
    assert mf.geodesic_distance(mf.round_sphere(2), a, b) == pytest.approx(angle, rel=1e-8)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(-0.4, 0.4), min_size=6, max_size=6))
def test_poincare_distance_symmetric_and_triangle(c):
    g = mf.poincare_ball(2)
    a, b, d = np.reshape(c, (3, 2))
    ab, ba = mf.geodesic_distance(g, a, b), mf.geodesic_distance(g, b, a)
    assert ab == pytest.approx(ba, rel=1e-7, abs=1e-10)
    assert ab <= mf.geodesic_distance(g, a, d) + mf.geodesic_distance(g, d, b) + 1e-8


# --- normal neighborhoods ---------------------------------------------------


def test_flat_neighborhood_is_identity_chart():
    nbhd = mf.build_normal_neighborhood(mf.euclidean(2), [0.3, -0.2], 1.0)
    theta = np.array([0.6, 0.8])
    np.testing.assert_allclose(nbhd.exp_map(0.7, theta), [0.3 + 0.42, -0.2 + 0.56])
    assert nbhd.metric_deviation(1.0) == 0


@pytest.mark.parametrize("metric,center,radius", [
    (mf.round_sphere(2), [np.pi / 2, 0.0], 0.5),
    (mf.conformal_flat(2, "1 + x1^2 + x2^2"), [0.0, 0.0], 0.3),
    (mf.poincare_ball(2), [0.2, 0.1], 0.5),
])
def test_exp_map_radial_distance(metric, center, radius):
    nbhd = mf.build_normal_neighborhood(metric, center, radius)
    for phi in (0.3, 2.0, 4.4):
        for r in (0.1 * radius, 0.6 * radius, radius):
            x = nbhd.exp_map(r, [np.cos(phi), np.sin(phi)])
            assert mf.geodesic_distance(metric, center, x) == pytest.approx(r, abs=1e-6 * r)


def test_deviation_small_and_growing_quadratically():
    for metric, center in ((mf.round_sphere(2), [np.pi / 2, 0.0]), (mf.poincare_ball(2), [0.0, 0.0])):
        nbhd = mf.build_normal_neighborhood(metric, center, 0.2)
        d1, d2 = nbhd.metric_deviation(0.05), nbhd.metric_deviation(0.1)
        assert d2 <= 0.02
        assert 3.0 < d2 / d1 < 5.0
        assert nbhd.metric_deviation(0.0) == 0


def test_focusing_is_rejected():
    # circles of g = exp(-|x|^2) id shrink: length ratio drops below 0.1 near r = 1.24
    g = mf.conformal_flat(2, "exp(-(x1^2 + x2^2))")
    mf.build_normal_neighborhood(g, [0.0, 0.0], 1.1)
    with pytest.raises(RadiusTooLarge):
        mf.build_normal_neighborhood(g, [0.0, 0.0], 1.24)


# --- area and volume elements ------------------------------------------------


def test_area_elements():
    nbhd = mf.build_normal_neighborhood(mf.euclidean(2), [0, 0], 1.0)
    phi = np.linspace(0, 2 * np.pi, 7)
    np.testing.assert_allclose(mf.sphere_area_element(nbhd.metric, nbhd, 1.0,
                                                      np.stack([np.cos(phi), np.sin(phi)], -1)), 1.0)
    sph = mf.build_normal_neighborhood(mf.round_sphere(2), [np.pi / 2, 0.0], 1.0)
    val = mf.sphere_area_element(sph.metric, sph, np.pi / 4, [[1.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(val, np.sin(np.pi / 4), rtol=1e-6)


def test_volume_elements():
    assert mf.volume_element(mf.euclidean(3), np.zeros(3)) == pytest.approx(1)
    lam = mf.conformal_flat(2, "1 + x1^2")
    assert mf.volume_element(lam, np.array([0.5, 0.0])) == pytest.approx(1.25)
    assert mf.volume_element(mf.poincare_ball(2), np.array([0.5, 0.0])) == pytest.approx(64 / 9)


def test_custom_metric_validation():
    g = mf.custom([["1", "0"], ["0", "1 + x1^2"]])
    np.testing.assert_allclose(g(np.array([2.0, 0.0])), [[1, 0], [0, 5]])
    with pytest.raises(ConfigError):
        mf.custom([["1", "x1"], ["x2", "1"]])
    bad = mf.custom([["1", "2"], ["2", "1"]])
    with pytest.raises(NonPositiveDefinite):
        mf.check_positive_definite(bad, np.zeros(2))


def test_ring_radius_checks():
    with pytest.raises(ConfigError):
        mf.ring(mf.euclidean(2), [0, 0], 0.6, 0.5)
    with pytest.raises(ConfigError):
        mf.ring(mf.euclidean(2), [0, 0], 1e-5, 1.0)
