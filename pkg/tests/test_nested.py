import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semiself import mapping as mp
from semiself import nested as nt
from semiself import triplets as tp


def test_ramp_integral_frozen_values():
    assert nt.ramp_integral(1, 3.0) == pytest.approx(6.0)   # C(4, 2)
    assert nt.ramp_integral(2, 2.0) == pytest.approx(4.0)   # C(4, 3)
    assert nt.ramp_integral(0, 7.5) == pytest.approx(7.5)   # identity at m=0


def test_ramp_integer_values_exact():
    for m in range(7):
        for k in range(51):
            assert nt.ramp_integral(m, float(k)) == math.comb(k + m, m + 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=6),
       st.floats(min_value=0.0, max_value=50.0))
def test_ramp_inverse_identity(m, u):
    assert nt.ramp_integral_inverse(m, nt.ramp_integral(m, u)) == \
        pytest.approx(u, abs=1e-12)


def test_binomial_identity_exact():
    assert all(nt.binom_identity_check(n, k)
               for n in range(61) for k in range(n + 1))


def test_iterated_gaussian_oracle():
    # m=1, b=2, z=1: -1/2 sum_j (j+1) 4^-j = -8/9
    v = nt.iterated_cumulant(tp.gaussian(1.0), 2.0, 1, 1.0).values[0]
    assert v == pytest.approx(-8.0 / 9.0, abs=1e-10)


def test_composition_matches_weighted_series():
    pu = tp.poisson_unit()
    z = np.linspace(-5.0, 5.0, 21)
    once = mp.forward_triplet(pu, 2.0)
    twice = mp.forward_cumulant(once, 2.0, z, tol=1e-10).values
    direct = nt.iterated_cumulant(pu, 2.0, 1, z, tol=1e-10).values
    np.testing.assert_allclose(twice, direct, atol=5e-8)


def test_iterated_triplet_gaussian():
    # two applications scale the variance by (1 - 1/4)^-2
    trip = nt.iterated_forward_triplet(tp.gaussian(1.0), 2.0, 1)
    assert trip.gauss[0, 0] == pytest.approx(16.0 / 9.0, abs=1e-14)
    z = np.linspace(-3.0, 3.0, 7)
    np.testing.assert_allclose(tp.cumulant(trip, z).values,
                               nt.iterated_cumulant(tp.gaussian(1.0), 2.0,
                                                    1, z).values,
                               atol=1e-10)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_semistable_ladder(alpha):
    mu = nt.semi_stable_triplet(nt.SemiStableSpec(b=2.0, alpha=alpha))
    cert = nt.is_nested_member(mu, 2.0, 5)
    assert all(cert.verdicts)
    w = cert.factors[0].levy.components[0].segments[0].w
    assert w == pytest.approx(1.0 - 2.0 ** (-alpha), abs=1e-14)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_semistable_fit_recovers_index(alpha):
    mu = nt.semi_stable_triplet(nt.SemiStableSpec(b=2.0, alpha=alpha))
    fit = nt.is_semi_stable(mu, 2.0)
    assert fit.verdict
    assert fit.a == pytest.approx(2.0 ** alpha, abs=1e-8)
    if alpha != 1.0:
        # strict drift chosen: no linear correction term
        assert float(np.max(np.abs(fit.c))) < 1e-8


def test_semistable_spec_validation():
    with pytest.raises(ValueError):
        nt.SemiStableSpec(b=2.0, alpha=2.0)
    with pytest.raises(ValueError):
        nt.SemiStableSpec(b=2.0, alpha=0.5, w=-1.0)


def test_poisson_fails_level_zero():
    cert = nt.is_nested_member(tp.poisson_unit(), 2.0, 0)
    assert not cert.verdict
    assert cert.first_violation is not None


def test_mapped_poisson_splits_levels():
    mapped = mp.forward_triplet(tp.poisson_unit(), 2.0)
    cert = nt.is_nested_member(mapped, 2.0, 1)
    assert cert.verdicts[0] and not cert.verdicts[1]


def test_gaussian_member_at_all_levels():
    cert = nt.is_nested_member(tp.gaussian(1.0), 2.0, 5)
    assert all(cert.verdicts)


def test_gaussian_is_stable_with_a4():
    fit = nt.is_semi_stable(tp.gaussian(1.0), 2.0)
    assert fit.verdict and fit.a == pytest.approx(4.0, abs=1e-10)
    assert fit.alpha == pytest.approx(2.0, abs=1e-10)


def test_poisson_not_semistable():
    assert not nt.is_semi_stable(tp.poisson_unit(), 2.0).verdict


def test_level_cap():
    with pytest.raises(ValueError):
        nt.is_nested_member(tp.gaussian(1.0), 2.0, nt.M_MAX + 1)
