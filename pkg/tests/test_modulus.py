import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lowerq import modulus as md
from lowerq.errors import ConfigError, EmptyShell, NotNormalized
from lowerq.manifold import euclidean, ring
from lowerq.quadrature import angular_grid, shell_grid, shell_grid_from_nodes

LN2 = np.log(2)
ONE = md.constant_weight(1.0)


def single_shell(n, r, nodes=None):
    rg = ring(euclidean(n), np.zeros(n), 0.5 * r, r)
    return shell_grid_from_nodes(rg, [r], [1.0], angular_grid(n, nodes))


def test_exponents():
    e = md.ExponentSet(3, 4)
    assert (e.q, e.s, e.alpha) == (2, 1, 2)
    assert e.s * (e.q - 1) == pytest.approx(1)
    assert e.alpha - e.s == pytest.approx(1)
    with pytest.raises(ConfigError):
        md.ExponentSet(3, 2)


def test_qnorm_examples():
    assert md.qnorm_on_sphere(single_shell(2, 1.0), ONE, md.ExponentSet(2, 2), 0) == pytest.approx(2 * np.pi)
    assert md.qnorm_on_sphere(single_shell(3, 1.0), ONE, md.ExponentSet(3, 3), 0) == pytest.approx(
        np.sqrt(4 * np.pi))
    dist = md.radial_weight(lambda r: r)
    assert md.qnorm_on_sphere(single_shell(2, 0.7), dist, md.ExponentSet(2, 2), 0) == pytest.approx(
        0.98 * np.pi)


def test_lower_bound_integral_examples(flat_grid2, flat_grid3):
    assert md.lower_bound_integral(flat_grid2, ONE, md.ExponentSet(2, 2)) == pytest.approx(
        LN2 / (2 * np.pi), rel=1e-12)
    assert md.lower_bound_integral(flat_grid3, ONE, md.ExponentSet(3, 3)) == pytest.approx(
        LN2 / np.sqrt(4 * np.pi), rel=1e-12)


@pytest.mark.parametrize("c", [0.25, 3.0])
def test_scaling_in_q(flat_grid2, c):
    e = md.ExponentSet(2, 3)
    Q = md.expression_weight("1 + x1^2", 2)
    base = md.lower_bound_integral(flat_grid2, Q, e)
    assert md.lower_bound_integral(flat_grid2, Q.scaled(c), e) == pytest.approx(base / c)
    rho = md.extremal_density(flat_grid2, Q, e).values
    rho_c = md.extremal_density(flat_grid2, Q.scaled(c), e).values
    np.testing.assert_allclose(rho, rho_c, rtol=1e-12)


def test_extremal_density_flat(flat_grid2):
    e = md.ExponentSet(2, 2)
    rho = md.extremal_density(flat_grid2, ONE, e).values
    np.testing.assert_allclose(rho, 1 / (2 * np.pi * flat_grid2.distances), rtol=1e-12)
    assert md.objective_value(flat_grid2, ONE, e, rho) == pytest.approx(LN2 / (2 * np.pi))
    # unit shell energy (admissibility)
    np.testing.assert_allclose(md.shell_energy(flat_grid2, e, md.Density(rho)), 1.0)


def test_objective_of_constants(flat_grid2):
    e = md.ExponentSet(2, 3)
    assert md.objective_value(flat_grid2, ONE, e, np.zeros(flat_grid2.shape)) == 0
    assert md.objective_value(flat_grid2, ONE, e, np.full(flat_grid2.shape, 2.0)) == pytest.approx(
        8 * 0.75 * np.pi)


def test_per_shell_examples():
    g = single_shell(2, 1.0)
    e = md.ExponentSet(2, 2)
    vals, alpha = md.per_shell_infima(g, ONE, e, "convex_oracle", seed=3)
    assert vals[0] == pytest.approx(1 / (2 * np.pi), rel=1e-8)
    np.testing.assert_allclose(alpha, 1 / (2 * np.pi), rtol=1e-4)
    assert md.per_shell_infimum(g, ONE.scaled(2), e, 0) == pytest.approx(0.5 / (2 * np.pi))
    e3 = md.ExponentSet(2, 3)
    Q = md.expression_weight("1 + 0.5*x1", 2)
    closed = md.per_shell_infimum(g, Q, e3, 0)
    oracle = md.per_shell_infimum(g, Q, e3, 0, "convex_oracle", seed=1)
    assert oracle == pytest.approx(closed, rel=1e-4)
    # Q = 1, p = 3: the per-shell minimizer is uniform and rho0 = alpha^(1/(n-1))
    rho0 = md.extremal_density(g, ONE, e3).values
    _, alpha = md.per_shell_infima(g, ONE, e3, "convex_oracle", seed=2)
    np.testing.assert_allclose(rho0, alpha, rtol=1e-4)


def test_family_modulus_examples(flat_grid2):
    e = md.ExponentSet(2, 2)
    for kind in ("closed_form", "convex_oracle"):
        est = md.surface_family_modulus(flat_grid2, ONE, e, kind)
        assert est.value == pytest.approx(LN2 / (2 * np.pi), rel=1e-3)
        assert est.gap <= 1e-3
        assert md.surface_family_modulus(flat_grid2, ONE.scaled(2), e, kind).value == pytest.approx(
            est.value / 2, rel=1e-8)
    Q = md.expression_weight("1 + r^2", 2)
    exact = LN2 / (2 * np.pi) - np.log(2 / 1.25) / (4 * np.pi)
    est = md.surface_family_modulus(flat_grid2, Q, e, "convex_oracle")
    assert est.value == pytest.approx(exact, rel=1e-3)


def test_empty_shell_detected():
    rg = ring(euclidean(2), [0, 0], 0.5, 1.0, lambda x: x[..., 0] > 5)
    with pytest.raises(EmptyShell):
        md.lower_bound_integral(shell_grid(rg, 2, 16), ONE, md.ExponentSet(2, 2))


def test_jensen_examples(flat_grid2):
    e = md.ExponentSet(2, 2)
    eta0 = md.canonical_profile(flat_grid2, ONE, e)
    rep = md.jensen_verify(flat_grid2, ONE, e, eta0)
    assert rep.lhs == pytest.approx(2 * np.pi / LN2, rel=1e-4)
    assert rep.rhs == pytest.approx(rep.lhs, rel=1e-4)
    uniform = md.RadialProfile(lambda r: np.full(np.shape(r), 2.0))
    rep = md.jensen_verify(flat_grid2, ONE, e, uniform)
    # int 2 pi r * 2^2 dr over (0.5, 1)
    assert rep.rhs == pytest.approx(4 * np.pi * 0.75, rel=1e-10)
    assert rep.holds
    with pytest.raises(NotNormalized):
        md.jensen_verify(flat_grid2, ONE, e, md.RadialProfile(lambda r: np.ones(np.shape(r))))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2.0, 2.5, 4.0]))
def test_jensen_random_profiles(flat_grid2, seed, p):
    e = md.ExponentSet(2, p)
    Q = md.expression_weight("1 + 0.3*x1", 2)
    for eta in md.random_profiles(flat_grid2, 3, seed):
        assert md.jensen_verify(flat_grid2, Q, e, eta).holds


def test_ring_bound_and_curve_modulus(flat_grid2):
    e = md.ExponentSet(2, 2)
    b = md.ring_upper_bound(flat_grid2, ONE, e)
    assert b.c_estimate == 1
    assert b.bound == pytest.approx(2 * np.pi / LN2, rel=1e-10)
    assert md.curve_modulus_flat_annulus(e, 0.5, 1) == pytest.approx(2 * np.pi / LN2)
    assert md.curve_modulus_flat_annulus(md.ExponentSet(3, 3), 0.5, 1) == pytest.approx(
        4 * np.pi / LN2**2)
    seq = [md.curve_modulus_flat_annulus(e, eps, 1) for eps in (0.5, 0.8, 0.95, 0.99)]
    assert all(a < b for a, b in zip(seq, seq[1:]))


@pytest.mark.parametrize("n,p", [(2, 3), (3, 3), (3, 4)])
def test_flat_duality_identity(n, p, flat_grid2, flat_grid3):
    grid = flat_grid2 if n == 2 else flat_grid3
    e = md.ExponentSet(n, p)
    total = md.lower_bound_integral(grid, ONE, e)
    assert md.curve_modulus_flat_annulus(e, 0.5, 1) == pytest.approx(total ** (-e.s), rel=1e-9)


def test_curve_brute_force_matches_closed_form():
    e = md.ExponentSet(2, 3)
    brute = md.curve_modulus_flat_annulus(e, 0.5, 1, "oracle")
    assert brute == pytest.approx(md.curve_modulus_flat_annulus(e, 0.5, 1), rel=2e-2)


def test_oracle_dominates_closed_form_lower_bound():
    g = shell_grid(ring(euclidean(2), [0, 0], 0.5, 1.0), 4, 32)
    e = md.ExponentSet(2, 3)
    Q = md.expression_weight("2 + sin(3*x1) * x2", 2)
    closed, _ = md.per_shell_infima(g, Q, e)
    oracle, _ = md.per_shell_infima(g, Q, e, "convex_oracle", seed=5)
    assert np.all(oracle >= closed * (1 - 1e-9))
    np.testing.assert_allclose(oracle, closed, rtol=1e-6)
