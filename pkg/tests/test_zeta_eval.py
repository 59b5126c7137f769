import math

import mpmath as mp
import numpy as np
import pytest

from critline.errors import PoleError, UsageError
from critline.zeta_eval import (
    HurwitzParams,
    ZMethod,
    hurwitz_combination,
    hurwitz_em,
    lavrik_envelope,
    rs_main_sum,
    z_derivative_lavrik,
    z_derivatives,
    z_oracle,
    z_rs,
    z_values,
    zeta_em,
    zeta_values,
)

mp.mp.dps = 30


def test_zeta_special_values():
    assert abs(zeta_em(2) - math.pi**2 / 6) < 1e-14
    assert abs(zeta_em(-1) + 1 / 12) < 1e-14
    assert abs(zeta_em(0) + 0.5) < 1e-14
    assert abs(zeta_em(4) - math.pi**4 / 90) < 1e-14


@pytest.mark.parametrize("s", [0.5 + 14.134725j, 0.3 - 100j, 2 + 500j, -3.5 + 1j, 1 + 1e-6, 1 - 1e-6j, 0.5 + 3000j])
def test_zeta_matches_mpmath(s):
    want = complex(mp.zeta(mp.mpc(s)))
    assert abs(zeta_em(s) - want) <= 1e-11 * max(1.0, abs(want))


def test_zeta_pole():
    with pytest.raises(PoleError):
        zeta_em(1)


@pytest.mark.parametrize("a", [0.2, 0.4, 0.6, 0.8, 1.0, 0.05])
@pytest.mark.parametrize("s", [0.7 + 85j, 2.5, -1.5 + 2j])
def test_hurwitz_matches_mpmath(a, s):
    want = complex(mp.zeta(mp.mpc(s), a))
    assert abs(hurwitz_em(HurwitzParams(s, a)) - want) <= 1e-11 * max(1.0, abs(want))


def test_hurwitz_params_validation():
    with pytest.raises(UsageError):
        HurwitzParams(0.5, 0.0)
    with pytest.raises(UsageError):
        HurwitzParams(0.5, 1.5)
    with pytest.raises(PoleError):
        HurwitzParams(1.0, 0.5)


def test_balanced_combination_is_regular_at_one():
    w, a = (1.0, -1.0), (0.25, 0.75)
    # zeta(s,1/4) - zeta(s,3/4) -> psi(3/4) - psi(1/4) = pi at s = 1
    assert abs(hurwitz_combination(1.0, w, a)[0] - math.pi) < 1e-12
    s = 1 + 1e-7j
    want = complex(mp.zeta(mp.mpc(s), 0.25) - mp.zeta(mp.mpc(s), 0.75))
    assert abs(hurwitz_combination(s, w, a)[0] - want) < 1e-12
    with pytest.raises(PoleError):
        hurwitz_combination(1.0, (1.0,), (0.5,))


@pytest.mark.parametrize("t", [0.5, 2.47575, 14.134725141734693, 100.0, 1000.0, 5000.0])
def test_z_oracle_matches_siegelz(t):
    assert abs(z_oracle(t).z_value - float(mp.siegelz(t))) < 1e-11


def test_z_values_vectorised_and_even():
    t = np.array([20.0, 30.0, 40.0])
    assert np.array_equal(z_values(t), z_values(-t))
    assert z_values(t).shape == (3,)


def test_z_oracle_at_zero():
    assert abs(z_oracle(0.0).z_value - float(mp.zeta(0.5))) < 1e-14


def test_riemann_siegel_error_shape():
    rng = np.random.default_rng(7)
    ts = rng.uniform(10, 3000, 150)
    worst = max(abs(z_rs(t).z_value - z_oracle(t).z_value) * t**0.75 for t in ts)
    assert worst <= 1.0


def test_z_rs_domain_and_metadata():
    with pytest.raises(UsageError):
        z_rs(9.9)
    s = z_rs(100.0)
    assert s.method is ZMethod.RIEMANN_SIEGEL and s.err_bound == pytest.approx(100.0**-0.75)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_cauchy_derivatives_match_mpmath(k):
    for t in (30.0, 500.0):
        want = float(mp.siegelz(t, derivative=k))
        assert abs(z_derivatives(t, k)[0] - want) < 1e-9 * max(1.0, abs(want))


def test_lavrik_k0_is_main_sum():
    assert z_derivative_lavrik(300.0, 0) == rs_main_sum(300.0)


def test_lavrik_derivative_within_envelope():
    for t in (200.0, 1000.0, 3000.0):
        for k in (1, 2):
            exact = float(z_derivatives(t, k)[0])
            assert abs(z_derivative_lavrik(t, k) - exact) <= 3 * lavrik_envelope(t, k)


def test_lavrik_domain():
    with pytest.raises(UsageError):
        z_derivative_lavrik(40.0, 1)
    with pytest.raises(UsageError):
        z_derivative_lavrik(100.0, 3)
