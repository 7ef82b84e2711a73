import numpy as np
import pytest

from lowerq import boundary as bd
from lowerq.errors import ConfigError, EmptyShell
from lowerq.manifold import build_normal_neighborhood, euclidean, half_space
from lowerq.modulus import constant_weight, expression_weight

DELTA = 0.5


@pytest.fixture(scope="module")
def nbhd():
    return build_normal_neighborhood(euclidean(2), [0.0, 0.0], DELTA)


UPPER = half_space(1)


def test_constant_weight_diverges(nbhd):
    rep = bd.divergence_check(constant_weight(1), nbhd, DELTA, UPPER)
    t = rep.cutoffs
    np.testing.assert_allclose(rep.norms, np.pi * t, rtol=1e-12)
    np.testing.assert_allclose(rep.partial_integrals, np.log(DELTA / t) / np.pi, rtol=1e-10)
    assert rep.verdict == "diverges"
    assert rep.growth_fit == pytest.approx(1 / np.pi, rel=1e-6)


def test_inverse_distance_converges(nbhd):
    rep = bd.divergence_check(expression_weight("1/r", 2), nbhd, DELTA, UPPER)
    np.testing.assert_allclose(rep.partial_integrals, (DELTA - rep.cutoffs) / np.pi, rtol=1e-10)
    assert rep.verdict == "converges"
    assert rep.tail_estimate < 1e-6


def test_log_weight_diverges_and_is_log_bounded(nbhd):
    K = expression_weight("3*log(1/r)", 2)
    rep = bd.divergence_check(K, nbhd, DELTA, UPPER)
    assert rep.verdict == "diverges"
    t = rep.cutoffs
    exact = (np.log(np.log(1 / t)) - np.log(np.log(1 / DELTA))) / (3 * np.pi)
    np.testing.assert_allclose(rep.partial_integrals, exact, rtol=1e-6)
    fit = bd.log_growth_fit(K, nbhd, DELTA, UPPER)
    assert fit.is_O_log and fit.constant == pytest.approx(3)


def test_log_growth_examples(nbhd):
    five = bd.log_growth_fit(constant_weight(5), nbhd, DELTA, UPPER)
    assert five.is_O_log and five.constant < 0.5
    assert np.all(np.diff(five.ratios) < 0)
    assert not bd.log_growth_fit(expression_weight("1/r", 2), nbhd, DELTA, UPPER).is_O_log


@pytest.mark.parametrize("source", ["1", "5", "3*log(1/r)", "2 + x1^2", "1/r"])
def test_consistency_log_bound_implies_divergence(nbhd, source):
    K = expression_weight(source, 2)
    if bd.log_growth_fit(K, nbhd, DELTA, UPPER).is_O_log:
        assert bd.divergence_check(K, nbhd, DELTA, UPPER).verdict == "diverges"


def test_monotone_in_weight(nbhd):
    small = bd.divergence_check(expression_weight("1 + x1^2", 2), nbhd, DELTA, UPPER)
    large = bd.divergence_check(expression_weight("2 + x1^2", 2), nbhd, DELTA, UPPER)
    assert np.all(large.partial_integrals <= small.partial_integrals)
    assert np.all(np.diff(small.partial_integrals) > 0)


def test_fast_power_weight_is_not_called_divergent(nbhd):
    rep = bd.divergence_check(expression_weight("r^(-1.5)", 2), nbhd, DELTA, UPPER)
    assert rep.verdict == "converges"


def test_input_checks(nbhd):
    with pytest.raises(ConfigError):
        bd.divergence_check(constant_weight(1), nbhd, 2 * DELTA, UPPER)
    with pytest.raises(EmptyShell):
        bd.divergence_check(constant_weight(1), nbhd, DELTA, lambda x: x[..., 0] > 10)
