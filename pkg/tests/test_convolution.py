import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critline.convolution import (
    ConvolutionEngine,
    compare_counts,
    divided_difference,
    divided_difference_table,
    m_conv,
    m_conv_derivative,
    smoothing_residual_study,
    weighted_l1_bound,
    zero_product_bound,
)
from critline.errors import UsageError
from critline.gelfand_shilov import ConvolutionKernelSpec
from critline.zeta_eval import z_values


@pytest.fixture(scope="module")
def spec1000(testfn):
    return ConvolutionKernelSpec.build(testfn, 1.0, 1000.0)


def test_convolution_reproduces_z(spec1000):
    m, err = m_conv(1000.0, spec1000)
    assert abs(m / spec1000.G - z_values(1000.0)[0]) < 1e-9
    assert err < 1e-9


def test_brute_force_riemann_sum(testfn):
    # independent oracle: plain trapezoid sum of Z(u) f((t-u)/G) on a very fine grid
    spec = ConvolutionKernelSpec.build(testfn, 2.0, 500.0)
    t = 500.0
    R = testfn.tail_radius(1e-14) * spec.G
    u = np.linspace(t - R, t + R, 400001)
    h = u[1] - u[0]
    brute = h * np.sum(z_values(u) * testfn((t - u) / spec.G))
    assert abs(m_conv(t, spec)[0] - brute) < 1e-8


def test_linearity(testfn, spec1000):
    base = m_conv(1001.0, spec1000)[0]
    for c in (2.0, -1.0):
        s = ConvolutionKernelSpec.build(testfn.scaled(c), 1.0, 1000.0)
        assert m_conv(1001.0, s)[0] == pytest.approx(c * base, rel=1e-12, abs=1e-14)
    zero = ConvolutionKernelSpec.build(testfn.scaled(0.0), 1.0, 1000.0)
    assert m_conv(1001.0, zero)[0] == 0.0


@pytest.mark.parametrize("k", [1, 2])
def test_derivative_matches_finite_difference(spec1000, k):
    t, h = 1000.3, 1e-3
    eng = ConvolutionEngine(spec1000, t - 3 * h, t + 3 * h)
    v = [eng.value(t + j * h)[0] for j in (-1, 0, 1)]
    fd = (v[2] - v[0]) / (2 * h) if k == 1 else (v[2] - 2 * v[1] + v[0]) / h**2
    d, _ = m_conv_derivative(t, spec1000, k)
    assert abs(d - fd) < 1e-5 * max(1.0, abs(d))


def test_engine_domain(spec1000):
    with pytest.raises(UsageError):
        ConvolutionEngine(spec1000, 10.0, 30.0)


def test_study_rejects_large_delta(testfn):
    spec = ConvolutionKernelSpec.build(testfn, 4 * math.pi * 2.0, 1000.0)
    with pytest.raises(UsageError):
        smoothing_residual_study(1000.0, 5, spec)
    with pytest.raises(UsageError):
        smoothing_residual_study(900.0, 5, ConvolutionKernelSpec.build(testfn, 1.0, 1000.0))


def test_breakdown_without_hypothesis(testfn):
    spec = ConvolutionKernelSpec.build(testfn, 4 * math.pi * 2.0, 1000.0)
    prof = smoothing_residual_study(1000.0, 21, spec, enforce_hypothesis=False)
    assert not prof.hypothesis_holds
    assert prof.max_residual > 1e-3


def test_study_export(tmp_path, spec1000):
    prof = smoothing_residual_study(1000.0, 11, spec1000)
    csv, js = prof.export(tmp_path / "r.csv", tmp_path / "r.json")
    assert len(csv.read_text().splitlines()) == 12
    assert '"n_points": 11' in js.read_text()
    assert prof.max_residual < 1e-6


def test_weighted_l1_range_checks(testfn):
    spec = ConvolutionKernelSpec.build(testfn, 1.0, 2000.0)
    with pytest.raises(UsageError):
        weighted_l1_bound(2000.0, 1.0, spec)
    with pytest.raises(UsageError):
        weighted_l1_bound(2000.0, 20.0, spec, strict=True)


def test_weighted_l1_small(testfn):
    spec = ConvolutionKernelSpec.build(testfn, 1.0, 1000.0)
    r = weighted_l1_bound(1000.0, 9.0, spec)
    assert r.in_proven_range
    assert r.lhs >= 0.9 * r.rhs


# --- divided differences -------------------------------------------------------------


def test_divided_difference_of_polynomial_leading_coefficient():
    # [x0..xn] of a degree-n polynomial is its leading coefficient
    rng = np.random.default_rng(5)
    for n in range(1, 7):
        c = rng.normal(size=n + 1)
        nodes = np.sort(rng.uniform(-2, 2, n))
        dd = divided_difference(np.polynomial.Polynomial(c), nodes, 2.5)
        assert dd.value == pytest.approx(c[-1], rel=1e-9, abs=1e-10)


def test_reconstruction_when_nodes_are_zeros():
    F = np.sin
    zeros = [0.0, math.pi, 2 * math.pi]
    dd = divided_difference(F, zeros, 1.0)
    assert dd.reconstruction == pytest.approx(math.sin(1.0), abs=1e-14)


def test_table_matches_symmetric_formula():
    nodes = [0.1, 0.5, 1.3, 2.0, 2.9]
    vals = [math.exp(x) for x in nodes]
    tab = divided_difference_table(nodes, vals)
    direct = divided_difference(math.exp, nodes[1:], nodes[0]).value
    assert tab.top == pytest.approx(direct, rel=1e-12)
    assert tab.entry(1, 2) == pytest.approx((vals[2] - vals[1]) / (nodes[2] - nodes[1]))


@given(st.permutations([0.0, 0.4, 1.1, 1.7, 2.3]))
@settings(max_examples=30, deadline=None)
def test_divided_difference_symmetric(perm):
    ref = divided_difference(math.cos, [0.4, 1.1, 1.7, 2.3], 0.0).value
    got = divided_difference(math.cos, list(perm[1:]), perm[0]).value
    assert got == pytest.approx(ref, rel=1e-12, abs=1e-15)


def test_coincident_nodes_rejected():
    with pytest.raises(UsageError):
        divided_difference(math.sin, [1.0, 1.0], 0.0)
    with pytest.raises(UsageError):
        divided_difference(math.sin, [1.0, 2.0], 2.0)


def test_product_bound_sin():
    b = zero_product_bound(np.sin, [0.0, math.pi], math.pi / 2, sup_bound=1.0)
    assert b.rhs == pytest.approx((math.pi / 2) ** 2 / 2)
    assert b.holds and b.lhs == pytest.approx(1.0)
    with pytest.raises(UsageError):
        zero_product_bound(np.sin, [0.0, 1.0], 0.5, sup_bound=1.0)


def test_product_bound_on_z():
    g1, g2 = 14.134725141734693, 21.022039638771556
    from critline.zeta_eval import z_derivatives

    def d2(t):
        return np.array([z_derivatives(v, 2)[0] for v in np.atleast_1d(t)])

    b = zero_product_bound(z_values, [g1, g2], 17.0, derivative=d2, samples=401, zero_tol=1e-9)
    assert b.holds


def test_product_bound_needs_sup():
    with pytest.raises(UsageError):
        zero_product_bound(np.sin, [0.0], 1.0)


def test_compare_counts_empty_window(spec1000):
    c = compare_counts(1000.0, 0.0, spec1000)
    assert c.N_window == 0 and c.N_M_window == 0


def test_compare_counts_small_window(spec1000):
    c = compare_counts(1000.0, 3.0, spec1000)
    assert c.N_window == c.N_M_window
    assert np.max(np.abs(c.z_zeros - c.m_zeros)) < 1e-8
