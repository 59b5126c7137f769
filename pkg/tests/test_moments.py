from fractions import Fraction

import mpmath as mp
import pytest

from critline.errors import UsageError
from critline.moments import (
    MuCurve,
    MuVariant,
    convexity_report,
    export_moments_csv,
    export_mu_csv,
    mu_curve,
    p1,
    second_moment,
)
from critline.tabular import read_csv

mp.mp.dps = 20


def test_second_moment_against_mpmath():
    T = 100.0
    want = float(mp.quad(lambda t: mp.siegelz(t) ** 2, mp.linspace(0, T, 41)))
    rec = second_moment(T)
    assert rec.integral == pytest.approx(want, rel=1e-10)
    assert rec.e_term == pytest.approx(rec.integral - T * p1(mp.log(T)), abs=1e-9)
    assert rec.halving_change < 1e-10


def test_second_moment_domain():
    with pytest.raises(UsageError):
        second_moment(5.0)
    with pytest.raises(UsageError):
        second_moment(5000.0)


def test_p1_constant():
    assert p1(0.0) == pytest.approx(float(2 * mp.euler - 1 - mp.log(2 * mp.pi)), abs=1e-15)


def test_export_moments(tmp_path):
    rows = read_csv(export_moments_csv([second_moment(50.0)], tmp_path / "m.csv"))
    assert list(rows[0]) == ["T", "integral", "main_term", "e_term"]


@pytest.mark.parametrize("v", list(MuVariant))
def test_mu_curves_exact(v):
    assert mu_curve(v, Fraction(1, 2)) == Fraction(1, 8)
    assert mu_curve(v, Fraction(-1)) == Fraction(3, 2)
    assert mu_curve(v, Fraction(2)) == 0
    assert MuCurve(v)(Fraction(1, 2)) == Fraction(1, 8)


def test_convexity_report():
    for rep in convexity_report():
        assert rep.value_at_half == Fraction(1, 8)
        assert rep.convex and rep.nonincreasing and rep.functional_equation
        assert isinstance(rep.min_second_difference, Fraction)


def test_mu_curve_rejects_unknown_variant():
    with pytest.raises(ValueError):
        mu_curve("cubic", Fraction(1, 2))


def test_export_mu(tmp_path):
    rows = read_csv(export_mu_csv(tmp_path / "mu.csv", n=11))
    assert len(rows) == 11
    assert float(rows[5]["mu_quadratic"]) == 0.125
