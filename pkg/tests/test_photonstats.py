import math

import numpy as np
import pytest

from qkdsim.photonstats import (multi_photon_prob, pns_mutual_information,
                                poisson_pmf, poisson_second_order)


def test_pmf_point_values():
    assert poisson_pmf(0, 0.0) == 1.0
    assert poisson_pmf(3, 0.0) == 0.0
    # 0.5 * exp(-0.5)
    assert poisson_pmf(1, 0.5) == pytest.approx(0.303265, abs=1e-6)


@pytest.mark.parametrize("mu", [0.1, 0.5, 1.0, 2.0])
def test_pmf_normalizes(mu):
    total = sum(poisson_pmf(n, mu) for n in range(61))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_pmf_stable_at_large_n():
    # mean 150, n around the mode: must not overflow or lose normalization
    total = sum(poisson_pmf(n, 150.0) for n in range(0, 400))
    assert total == pytest.approx(1.0, abs=1e-9)
    assert poisson_pmf(170, 150.0) > 0.0


def test_second_order_values():
    assert poisson_second_order(0, 0.2) == pytest.approx(0.82, abs=1e-15)
    assert poisson_second_order(1, 0.2) == pytest.approx(0.16, abs=1e-15)
    assert poisson_second_order(2, 0.0) == 0.0
    with pytest.raises(ValueError):
        poisson_second_order(3, 0.2)


def test_second_order_expansion_error_is_cubic():
    # |expansion - pmf| stays below mu**3 for n in {0, 1} on (0, 0.3]
    for mu in np.linspace(0.01, 0.3, 30):
        for n in (0, 1):
            err = abs(poisson_second_order(n, mu) - poisson_pmf(n, mu))
            assert err <= mu ** 3


def test_multi_photon_quadratic_form():
    assert multi_photon_prob(0.0) == 0.0
    assert multi_photon_prob(0.2) == pytest.approx(0.11, abs=1e-15)


def test_multi_photon_exact_mode():
    # 1 - exp(-0.2) * 1.2
    assert multi_photon_prob(0.2, exact=True) == pytest.approx(0.01752, abs=1e-5)
    for mu in (0.0, 0.1, 0.5, 1.0):
        expected = 1.0 - math.exp(-mu) * (1.0 + mu)
        assert multi_photon_prob(mu, exact=True) == pytest.approx(expected, abs=1e-12)


def test_pns_no_split_no_information():
    assert pns_mutual_information(0.7, 0.0) == 0.0
    assert pns_mutual_information(0.7, 1.0) == 0.0


def test_pns_even_split_value():
    # maximum information gain mu/8 at an even split
    assert pns_mutual_information(0.5, 0.5) == 0.0625
    for mu in (0.1, 0.65, 1.0, 2.0):
        assert pns_mutual_information(mu, 0.5) == mu / 8.0


def test_pns_symmetry_exact():
    # dyadic fractions have exact complements; symmetry must be bit-exact
    for mu in (0.1, 0.65, 1.3):
        for k in range(65):
            lam = k / 64.0
            assert pns_mutual_information(mu, lam) == pns_mutual_information(mu, 1.0 - lam)


def test_pns_argmax_at_half():
    grid = [k / 100.0 for k in range(101)]
    for mu in (0.2, 0.65, 2.0):
        values = [pns_mutual_information(mu, lam) for lam in grid]
        assert grid[values.index(max(values))] == 0.5
