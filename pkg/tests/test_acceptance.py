"""One test per acceptance criterion.  Each prints a single PASS/FAIL line with
timing; the lines are also collected into the terminal summary."""

import math
import time
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from critline.arithmetic import li, mertens_power_violations, mobius_sieve, pi_count
from critline.convolution import divided_difference, smoothing_residual_study, weighted_l1_bound, zero_product_bound
from critline.davenport_heilbronn import dh_f, dh_functional_residual, dh_zero_search
from critline.gelfand_shilov import ConvolutionKernelSpec, fourier_integral
from critline.moments import MuVariant, convexity_report, mu_curve, second_moment
from critline.special_fns import chi
from critline.zeros import LehmerKind, count_and_s, lehmer_scan, scan_zeros
from critline.zeta_eval import z_oracle, z_rs, zeta_values

pytestmark = pytest.mark.acceptance


class Criterion:
    def __init__(self, record_property, number, title, budget):
        self.record = record_property
        self.number, self.title, self.budget = number, title, budget

    def __enter__(self):
        self.t0 = time.perf_counter()
        self.checks = []
        return self

    def check(self, label, ok):
        self.checks.append((label, bool(ok)))

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        self.check(f"runtime {elapsed:.2f}s < {self.budget:g}s", elapsed < self.budget)
        ok = exc_type is None and all(c for _, c in self.checks)
        failed = [label for label, c in self.checks if not c]
        detail = "; ".join(label for label, _ in self.checks)
        if exc_type is not None:
            detail = f"raised {exc_type.__name__}: {exc}"
        line = f"criterion {self.number}: {'PASS' if ok else 'FAIL'} {self.title} ({detail})"
        print(line)
        self.record("acceptance", line)
        if exc_type is None:
            assert not failed, f"criterion {self.number} failed: {failed}"
        return False


@pytest.fixture
def criterion(record_property):
    return lambda number, title, budget: Criterion(record_property, number, title, budget)


def test_01_first_zero(criterion):
    with criterion(1, "first zero of Z", 1.0) as c:
        recs = scan_zeros(10.0, 20.0)
        g = recs[0].gamma
        c.check(f"count {len(recs)} == 1", len(recs) == 1)
        c.check(f"gamma {g:.9f}, |gamma - 14.134725| = {abs(g - 14.134725):.2e} <= 1e-5", abs(g - 14.134725) <= 1e-5)
        c.check(f"residual {recs[0].residual:.1e} <= 1e-8", recs[0].residual <= 1e-8)


def test_02_lehmer_landmark(criterion):
    with criterion(2, "negative local maximum near t = 2.4757", 120.0) as c:
        z = z_oracle(2.47575).z_value
        c.check(f"Z(2.47575) = {z:.6f} within 1e-4 of -0.52625", abs(z + 0.52625) <= 1e-4)
        ev = lehmer_scan(2.0, 1000.0, step=0.005)
        neg = [e for e in ev if e.kind is LehmerKind.NEG_LOCAL_MAX]
        c.check(f"{len(neg)} negative local maximum in [2, 1000]", len(neg) == 1)
        c.check(f"located at t = {neg[0].t_ext:.7f}" if neg else "none located",
                bool(neg) and abs(neg[0].t_ext - 2.47575) < 1e-3)


def test_03_off_line_zero(criterion):
    with criterion(3, "off-line zero of the Davenport-Heilbronn function", 60.0) as c:
        zs = dh_zero_search((0.6, 0.95, 80.0, 90.0))
        c.check(f"{len(zs)} zero found", len(zs) == 1)
        z = zs[0]
        c.check(f"position {z.beta:.6f} + {z.gamma:.6f}i within 1e-4 of 0.808517 + 85.699348i",
                abs(z.beta - 0.808517) <= 1e-4 and abs(z.gamma - 85.699348) <= 1e-4)
        mp.mp.dps = 30
        tan = mp.mpf("0.28407904384041227")
        s = mp.mpc(z.beta, z.gamma)
        ref = abs(mp.power(5, -s) * (mp.zeta(s, 0.2) + tan * mp.zeta(s, mp.mpf(2) / 5)
                                     - tan * mp.zeta(s, mp.mpf(3) / 5) - mp.zeta(s, mp.mpf(4) / 5)))
        c.check(f"|f| = {z.residual:.1e} (mpmath {float(ref):.1e}) <= 1e-8", z.residual <= 1e-8 and ref <= 1e-8)
        c.check(f"on_line = {z.on_line}", z.on_line is False)


def test_04_functional_equations(criterion):
    with criterion(4, "functional equations of zeta and of the Davenport-Heilbronn function", 30.0) as c:
        rng = np.random.default_rng(42)
        s = rng.uniform(0.0, 1.0, 100) + 1j * rng.uniform(-300.0, 300.0, 100)
        lhs = zeta_values(s)
        rhs = chi(s) * zeta_values(1.0 - s)
        r_zeta = float(np.max(np.abs(lhs - rhs) / np.abs(lhs)))
        c.check(f"zeta residual {r_zeta:.1e} <= 1e-10", r_zeta <= 1e-10)
        s2 = rng.uniform(0.0, 1.0, 100) + 1j * rng.uniform(-300.0, 300.0, 100)
        r_dh = max(dh_functional_residual(v) for v in s2)
        c.check(f"Davenport-Heilbronn residual {r_dh:.1e} <= 1e-7", r_dh <= 1e-7)


def test_05_zero_counts(criterion):
    with criterion(5, "zero counts against the Riemann-von Mangoldt main term", 120.0) as c:
        for T in (100.0, 500.0, 1000.0):
            s = count_and_s(T)
            c.check(f"T={T:g}: N={s.n_found}, main={s.main_term:.3f}", abs(s.n_found - s.main_term) < 3)


def test_06_riemann_siegel(criterion):
    with criterion(6, "Riemann-Siegel error shape", 60.0) as c:
        rng = np.random.default_rng(42)
        ts = rng.uniform(50.0, 2000.0, 200)
        worst = max(abs(z_rs(t).z_value - z_oracle(t).z_value) * t**0.75 for t in ts)
        c.check(f"max |Z_rs - Z| t^(3/4) = {worst:.3f} <= 10", worst <= 10.0)


def test_07_smoothing_residual(criterion, testfn):
    with criterion(7, "M/G reproduces Z near T = 1000", 300.0) as c:
        spec = ConvolutionKernelSpec.build(testfn, 1.0, 1000.0)
        prof = smoothing_residual_study(1000.0, 200, spec)
        c.check(f"{len(prof.grid)} points", len(prof.grid) == 200)
        c.check(f"max |M/G - Z| = {prof.max_residual:.1e} <= 1e-6", prof.max_residual <= 1e-6)
        c.check(f"quadrature error/G {prof.quadrature_err:.1e}", prof.quadrature_err <= 1e-6)


def test_08_weighted_l1(criterion, testfn):
    with criterion(8, "weighted L1 lower bound at T = 2000, V = 20", 300.0) as c:
        spec = ConvolutionKernelSpec.build(testfn, 1.0, 2000.0)
        r = weighted_l1_bound(2000.0, 20.0, spec)
        target = spec.G * 20.0 * spec.plateau_value
        c.check(f"lhs {r.lhs:.4f} >= 0.9 * G V f_hat = {0.9 * target:.4f}", r.lhs >= 0.9 * target)


def test_09_divided_differences(criterion):
    with criterion(9, "divided differences and the zero-product bound", 5.0) as c:
        rng = np.random.default_rng(42)
        worst_dd = worst_rec = 0.0
        for _ in range(100):
            n = int(rng.integers(1, 7))
            roots = np.sort(rng.uniform(-3.0, 3.0, n))
            while np.min(np.diff(roots), initial=1.0) < 1e-2:
                roots = np.sort(rng.uniform(-3.0, 3.0, n))
            lead = rng.uniform(-2.0, 2.0)
            poly = np.polynomial.Polynomial.fromroots(roots) * lead
            x = rng.uniform(-4.0, 4.0)
            dd = divided_difference(poly, roots, x)
            # F^(n)/n! is the leading coefficient; the product form must give F(x)
            worst_dd = max(worst_dd, abs(dd.value - lead))
            worst_rec = max(worst_rec, abs(dd.reconstruction - poly(x)) / max(1.0, abs(poly(x))))
        c.check(f"|[x,x1..xn]F - F^(n)/n!| max {worst_dd:.1e} <= 1e-10", worst_dd <= 1e-10)
        c.check(f"reconstruction max rel err {worst_rec:.1e} <= 1e-10", worst_rec <= 1e-10)
        b = zero_product_bound(np.sin, [0.0, math.pi], math.pi / 2, sup_bound=1.0)
        c.check(f"sin: |F(pi/2)| = {b.lhs:.6f} <= (pi/2)^2/2 = {b.rhs:.6f}",
                b.holds and abs(b.rhs - (math.pi / 2) ** 2 / 2) < 1e-15)
        b3 = zero_product_bound(np.sin, [0.0, math.pi, 2 * math.pi], 4.0, sup_bound=1.0)
        c.check(f"sin, three zeros: {b3.lhs:.4f} <= {b3.rhs:.4f}", b3.holds)


def test_10_plateau_fourier(criterion, testfn):
    with criterion(10, "plateau and moments of the test function", 30.0) as c:
        b, a = testfn.b_plateau, testfn.a_support
        inner = np.linspace(-(b - a), b - a, 61)
        outer = np.concatenate([np.linspace(b + a, b + a + 3, 31), -np.linspace(b + a, b + a + 3, 31)])
        back_in = fourier_integral(testfn, inner)
        back_out = fourier_integral(testfn, outer)
        e_in = max(float(np.max(np.abs(back_in - 1.0))), float(np.max(np.abs(testfn.fourier(inner) - 1.0))))
        e_out = max(float(np.max(np.abs(back_out))), float(np.max(np.abs(testfn.fourier(outer)))))
        c.check(f"|f_hat - 1| on plateau {e_in:.1e} <= 1e-9", e_in <= 1e-9)
        c.check(f"|f_hat| beyond b+a {e_out:.1e} <= 1e-12", e_out <= 1e-12)
        for n in (1, 2):
            m = float(np.max(np.abs(fourier_integral(testfn, inner, n=n))))
            c.check(f"moment {n} on plateau {m:.1e} <= 1e-8", m <= 1e-8)


def test_11_second_moment(criterion):
    with criterion(11, "second moment error term", 600.0) as c:
        for T in (100.0, 500.0, 1000.0, 2000.0):
            rec = second_moment(T)
            c.check(f"T={T:g}: E={rec.e_term:.3f}, bound {10 * T ** (1 / 3):.1f}",
                    abs(rec.e_term) <= 10 * T ** (1 / 3))


def test_12_mu_curves(criterion):
    with criterion(12, "mu(sigma) candidates", 1.0) as c:
        for v in MuVariant:
            c.check(f"{v.value}(1/2) = {mu_curve(v, Fraction(1, 2))}", mu_curve(v, Fraction(1, 2)) == Fraction(1, 8))
        for rep in convexity_report(1001):
            c.check(f"{rep.variant.value}: convex={rep.convex} nonincreasing={rep.nonincreasing} "
                    f"reflection={rep.functional_equation}",
                    rep.convex and rep.nonincreasing and rep.functional_equation)


def test_13_arithmetic(criterion):
    with criterion(13, "Moebius, Mertens, pi(x) and li(x)", 30.0) as c:
        table = mobius_sieve(10**6)
        mu = table.mu[: 10**5 + 1].astype(np.int64)
        acc = np.zeros(10**5 + 1, dtype=np.int64)
        for d in range(1, 10**5 + 1):
            acc[d::d] += mu[d]
        c.check("sum_{d|n} mu(d) = [n = 1] for n <= 1e5", acc[1] == 1 and not np.any(acc[2:]))
        for k in (1, 2, 3):
            bad = mertens_power_violations(table, k)
            c.check(f"k={k}: {bad.size} violations of M(n)^(2k) <= n^(k+1), n <= 1e6", bad.size == 0)
        p = pi_count(10**6)
        c.check(f"pi(1e6) = {p}", p == 78498)
        v = li(2.0)
        c.check(f"li(2) = {v:.10f} within 1e-7 of 1.04516378", abs(v - 1.04516378011749) <= 1e-7)
