import math

import numpy as np
import pytest

from semiself import mapping as mp
from semiself import measures as ms
from semiself import triplets as tp
from semiself.errors import DomainError


def test_check_span_rejects_unit():
    with pytest.raises(ValueError):
        mp.check_span(1.0)
    assert mp.check_span(2.0) == 2.0


def test_forward_gaussian_oracle():
    # sum_j -(2^-j z)^2 / 2 = -z^2/2 * 1/(1 - 1/4) = -2/3 at z = 1
    v = mp.forward_cumulant(tp.gaussian(1.0), 2.0, 1.0).values[0]
    assert v == pytest.approx(-2.0 / 3.0, abs=1e-10)


def test_forward_variance_oracle():
    fwd = mp.forward_triplet(tp.gaussian(1.0), 2.0)
    assert fwd.gauss[0, 0] == pytest.approx(4.0 / 3.0, abs=1e-14)


def test_forward_drift_closed_form():
    fwd = mp.forward_triplet(tp.gaussian(1.0, drift=0.6), 2.0)
    assert fwd.drift[0] == pytest.approx(0.6 / (1.0 - 0.5), abs=1e-14)


def test_forward_cumulant_matches_direct_series(cp1):
    z = np.linspace(-5.0, 5.0, 11)
    lib = mp.forward_cumulant(cp1, 2.0, z, tol=1e-12).values
    direct = sum(tp.cumulant(cp1, z / 2.0 ** j).values for j in range(120))
    np.testing.assert_allclose(lib, direct, atol=1e-10)


def test_forward_triplet_matches_series_cumulant(lat1):
    z = np.linspace(-5.0, 5.0, 11)
    fwd = mp.forward_triplet(lat1, 2.0, tol=1e-12)
    series = mp.forward_cumulant(lat1, 2.0, z, tol=1e-12).values
    got = tp.cumulant(fwd, z).values
    np.testing.assert_allclose(got, series, atol=1e-10)


def test_roundtrip_identity(gauss1, cp1, lat1):
    for mu in (gauss1, cp1, lat1):
        fwd = mp.forward_triplet(mu, 2.0, tol=1e-12)
        inv = mp.inverse_factor(fwd, 2.0, tol=1e-12)
        assert inv.nonnegative
        np.testing.assert_allclose(inv.rho.gauss, mu.gauss, atol=1e-11)
        np.testing.assert_allclose(inv.rho.drift, mu.drift, atol=1e-11)
        z = np.linspace(-4.0, 4.0, 9)
        np.testing.assert_allclose(tp.cumulant(inv.rho, z).values,
                                   tp.cumulant(mu, z).values, atol=1e-10)


def test_factorization_identity(lat1):
    fwd = mp.forward_triplet(lat1, 2.0, tol=1e-12)
    inv = mp.inverse_factor(fwd, 2.0, tol=1e-12)
    rep = mp.factorization_check(fwd, inv.rho, 2.0, tol=1e-12)
    assert rep.max_residual < 1e-10


def test_domain_violation_raises():
    heavy = tp.LevyTriplet(
        np.zeros((1, 1)),
        ms.LevyMeasure((ms.ScaleLattice(
            [1.0], 2.0, (ms.Segment(w=1.0, r=1.0, kmin=1, power=2),)),)),
        np.zeros(1))
    with pytest.raises(DomainError):
        mp.forward_cumulant(heavy, 2.0, 1.0)
    with pytest.raises(DomainError):
        mp.forward_triplet(heavy, 2.0)


def test_membership_verdicts(gauss1):
    assert mp.is_semi_selfdecomposable(gauss1, 2.0).verdict
    cert = mp.is_semi_selfdecomposable(tp.poisson_unit(), 2.0)
    assert not cert.verdict and not cert.nonnegative
    assert cert.violations


def test_membership_of_mapped_law(cp1):
    fwd = mp.forward_triplet(cp1, 2.0)
    cert = mp.is_semi_selfdecomposable(fwd, 2.0)
    assert cert.verdict
    # the recovered factor matches the input law
    z = np.linspace(-3.0, 3.0, 7)
    np.testing.assert_allclose(tp.cumulant(cert.factor, z).values,
                               tp.cumulant(cp1, z).values, atol=1e-9)


def test_injectivity_probe_separates(gauss1, cp1):
    fgap, igap = mp.injectivity_probe(gauss1, cp1, 2.0)
    assert fgap > 0.1 and igap > 0.1


def test_classic_selfdecomposable_gaussian():
    # integral_0^inf -(A/2)(e^-t z)^2 dt = -A z^2 / 4
    v = mp.classic_selfdecomposable_cumulant(tp.gaussian(2.0), 1.5)
    assert v == pytest.approx(-0.25 * 2.0 * 1.5 ** 2, abs=1e-8)


def test_period_function_identity():
    t = np.linspace(0.0, 5.0 * math.log(2.0), 64)
    g = mp.period_function(2.0, t)
    want = 2.0 ** (-np.floor(t / math.log(2.0)))
    np.testing.assert_allclose(np.exp(-t) * g, want, atol=1e-12)


def test_default_grid_shape():
    grid = mp.default_grid(2, zmax=5.0, n=11)
    assert grid.shape == (22, 2)
    assert float(np.max(np.linalg.norm(grid, axis=1))) <= 5.0 + 1e-12
