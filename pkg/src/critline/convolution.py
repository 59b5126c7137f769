"""Smoothed Z: M(t) = int Z(t + x) f(x/G) dx, its derivatives, and the studies built on it.

Also the divided-difference tools used to bound |F(x)| by its zeros and a
derivative bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import make_interp_spline

from .errors import NumericError, UsageError
from .gelfand_shilov import ConvolutionKernelSpec
from .tabular import dumps, write_csv
from .zeros import mean_gap, riemann_von_mangoldt, scan_zeros
from .zeta_eval import z_values

TRUNCATION_BUDGET = 1e-13
EPSILON_L = 0.1
_GL_POINTS = 8


def local_z_bound(t: float) -> float:
    """Generous majorant of |Z| near height t."""
    return 4.0 * max(t, 1.0) ** 0.25


def window_half_width(T: float) -> float:
    """T^(1/4) (log T)^(1/2 + eps)."""
    return T**0.25 * math.log(T) ** (0.5 + EPSILON_L)


class ConvolutionEngine:
    """Gauss-Legendre panels on a fixed global lattice (edges at integer
    multiples of the panel width), with Z cached at every node of
    [t_lo - R, t_hi + R].  Every M(t) in the range reuses the cache, and
    nearby t use identical nodes, so finite differences in t are smooth.

    The error estimate compares against the same rule on panels twice as wide.
    """

    def __init__(self, spec: ConvolutionKernelSpec, t_lo: float, t_hi: float, max_order: int = 0):
        if t_lo < 20.0:
            raise UsageError("convolution requires t >= 20")
        self.spec = spec
        f = spec.testfn
        G = spec.G
        bound = local_z_bound(t_hi + 100.0)
        eps = TRUNCATION_BUDGET / bound / (2.0 * math.pi * (f.b_plateau + f.a_support)) ** max_order
        self.radius = G * f.tail_radius(eps)
        self.h = min(float(mean_gap(t_hi + self.radius)) / 8.0, G / (2.0 * (f.b_plateau + f.a_support)))
        lo, hi = t_lo - self.radius, t_hi + self.radius
        self.fine = self._nodes(lo, hi, self.h)
        self.coarse = self._nodes(lo, hi, 2.0 * self.h)

    def _nodes(self, lo, hi, h):
        g, gw = leggauss(_GL_POINTS)
        k0, k1 = math.floor(lo / h), math.ceil(hi / h)
        left = np.arange(k0, k1) * h
        s = (left[:, None] + 0.5 * h * (g[None, :] + 1.0)).ravel()
        w = np.tile(0.5 * h * gw, k1 - k0)
        return s, w, z_values(s)

    def _integrate(self, nodes, t, q):
        s, w, z = nodes
        i0, i1 = np.searchsorted(s, [t - self.radius, t + self.radius])
        if i1 <= i0:
            return 0.0
        x = (s[i0:i1] - t) / self.spec.G
        fx = self.spec.testfn.derivative(x, q) if q else self.spec.testfn(x)
        return math.fsum(w[i0:i1] * z[i0:i1] * fx)

    def value(self, t: float, q: int = 0) -> tuple[float, float]:
        """(d/dt)^q M(t) = (-1/G)^q int Z(s) f^(q)((s - t)/G) ds, with an error estimate."""
        if not self.fine[0][0] + self.radius - 1e-9 <= t <= self.fine[0][-1] - self.radius + 1e-9:
            raise UsageError("t outside the engine range")
        factor = (-1.0 / self.spec.G) ** q
        fine = factor * self._integrate(self.fine, t, q)
        coarse = factor * self._integrate(self.coarse, t, q)
        return fine, abs(fine - coarse)

    def values(self, ts, q: int = 0):
        out = np.array([self.value(float(t), q) for t in np.atleast_1d(ts)])
        return out[:, 0], out[:, 1]


def m_conv(t: float, spec: ConvolutionKernelSpec) -> tuple[float, float]:
    """M(t) and a quadrature error estimate."""
    return ConvolutionEngine(spec, t, t).value(t)


def m_conv_derivative(t: float, spec: ConvolutionKernelSpec, k: int) -> tuple[float, float]:
    if not 0 <= k <= 6:
        raise UsageError("derivative order must be 0..6")
    return ConvolutionEngine(spec, t, t, max_order=k).value(t, k)


# --- smoothing-error study -----------------------------------------------------------


@dataclass
class ConvolutionProfile:
    grid: list[tuple[float, float, float, float]]  # t, M/G, Z(t), M/G - Z(t)
    spec: ConvolutionKernelSpec
    quadrature_err: float
    max_residual: float
    hypothesis_holds: bool

    def summary(self) -> dict:
        f = self.spec.testfn
        return {
            "T": self.spec.T,
            "delta": self.spec.delta,
            "G": self.spec.G,
            "a_support": f.a_support,
            "b_plateau": f.b_plateau,
            "n_points": len(self.grid),
            "max_residual_over_G": self.max_residual,
            "quadrature_err_over_G": self.quadrature_err,
            "hypothesis_holds": self.hypothesis_holds,
            "plateau_value": self.spec.plateau_value,
        }

    def export(self, csv_path=None, json_path=None):
        out = []
        if csv_path is not None:
            out.append(write_csv(csv_path, ["t", "m_over_g", "z", "residual"], self.grid))
        if json_path is not None:
            from pathlib import Path

            p = Path(json_path)
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_text(dumps(self.summary()) + "\n")
            out.append(p)
        return out


def smoothing_residual_study(T: float, n_points: int, spec: ConvolutionKernelSpec,
                            enforce_hypothesis: bool = True) -> ConvolutionProfile:
    """Compare M(t)/G with Z(t) on n_points across |t - T| <= T^(1/4) (log T)^0.6.

    With enforce_hypothesis the kernel must satisfy 0 < delta < 2 pi (b - a);
    switching it off is meant for exploring what happens when it fails.
    """
    if abs(spec.T - T) > 1e-9 * T:
        raise UsageError("spec was built for a different T")
    if enforce_hypothesis and not spec.hypothesis_holds:
        raise UsageError(
            f"delta = {spec.delta} violates 0 < delta < 2 pi (b - a) = "
            f"{2 * math.pi * (spec.testfn.b_plateau - spec.testfn.a_support):.6g}"
        )
    if n_points < 1:
        raise UsageError("n_points must be >= 1")
    if T > 5000:
        raise UsageError("T must be <= 5000")
    W = window_half_width(T)
    ts = np.linspace(T - W, T + W, n_points) if n_points > 1 else np.array([float(T)])
    eng = ConvolutionEngine(spec, float(ts[0]), float(ts[-1]))
    m, err = eng.values(ts)
    z = z_values(ts)
    mg = m / spec.G
    res = mg - z
    grid = [(float(a), float(b), float(c), float(d)) for a, b, c, d in zip(ts, mg, z, res)]
    return ConvolutionProfile(grid, spec, float(np.max(err)) / spec.G, float(np.max(np.abs(res))),
                              spec.hypothesis_holds)


# --- weighted L1 lower bound -----------------------------------------------------------


@dataclass(frozen=True)
class WeightedL1Result:
    lhs: float
    rhs: float
    ratio: float
    L: float
    error_terms: dict
    in_proven_range: bool


def weighted_l1_bound(T: float, V: float, spec: ConvolutionKernelSpec, step: float = 0.05,
                       strict: bool = False) -> WeightedL1Result:
    """lhs = int_{T-VL}^{T+VL} |M(t)| exp(-(T-t)^2/V^2) dt against
    rhs = G V |f_hat(delta/(4 pi))|.

    V >= L is always required.  The upper limit V <= T^(1/3) of the
    underlying estimate is enforced only with ``strict``; otherwise it is
    reported through ``in_proven_range``.

    M is sampled on a uniform grid, interpolated by a quintic spline, and
    |M| is integrated piecewise between the spline's roots.
    """
    L = math.log(T) ** (0.5 + EPSILON_L)
    in_range = L <= V <= T ** (1.0 / 3.0)
    if V < L or (strict and not in_range):
        raise UsageError(f"V must lie in [L, T^(1/3)] = [{L:.4g}, {T ** (1 / 3):.4g}]")
    if not 0 < spec.G < 1:
        raise UsageError("G must lie in (0, 1)")
    if abs(spec.T - T) > 1e-9 * T:
        raise UsageError("spec was built for a different T")
    lo, hi = T - V * L, T + V * L
    n = int(math.ceil((hi - lo) / step))
    ts = np.linspace(lo, hi, n + 1)
    eng = ConvolutionEngine(spec, lo, hi)
    m, _ = eng.values(ts)
    spl = make_interp_spline(ts, m, k=5)
    roots = _sign_change_roots(spl, ts, m)
    edges = np.concatenate([[lo], roots, [hi]])
    g, gw = leggauss(20)
    total = []
    for a, b in zip(edges[:-1], edges[1:]):
        # subdivide long root-free stretches so the Gaussian weight is resolved
        pieces = max(1, int(math.ceil((b - a) / 0.5)))
        sub = np.linspace(a, b, pieces + 1)
        half = 0.5 * np.diff(sub)
        x = (half[:, None] * g[None, :] + (0.5 * (sub[1:] + sub[:-1]))[:, None]).ravel()
        w = (half[:, None] * gw[None, :]).ravel()
        total.append(math.fsum(np.abs(spl(x)) * np.exp(-((T - x) / V) ** 2) * w))
    lhs = math.fsum(total)
    rhs = spec.G * V * abs(spec.plateau_value)
    terms = {
        "T^-1/4": T**-0.25,
        "V^2 T^-3/4 L^2": V**2 * T**-0.75 * L**2,
    }
    return WeightedL1Result(lhs, rhs, lhs / rhs if rhs else math.inf, L, terms, in_range)


def _sign_change_roots(spl, ts, vals):
    idx = np.flatnonzero(vals[:-1] * vals[1:] < 0)
    lo, hi = ts[idx].copy(), ts[idx + 1].copy()
    flo = vals[idx].copy()
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = spl(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


# --- divided differences -------------------------------------------------------------


@dataclass(frozen=True)
class DividedDifference:
    value: float
    reconstruction: float  # prod (x - x_j) * value; equals F(x) when every F(x_j) = 0


def _check_distinct(points):
    pts = np.asarray(points, dtype=float)
    if pts.size < 1:
        raise UsageError("need at least one node")
    if np.unique(pts).size != pts.size:
        raise UsageError("nodes must be distinct (confluent divided differences are not supported)")
    return pts


def divided_difference(F: Callable, nodes: Sequence[float], x: float) -> DividedDifference:
    """[x, x_1, ..., x_n] F = sum_p F(p) / prod_{q != p} (p - q), compensated summation."""
    nodes = _check_distinct(list(nodes))
    pts = _check_distinct(np.concatenate([[x], nodes]))
    terms = []
    for i, p in enumerate(pts):
        denom = np.prod(p - np.delete(pts, i))
        terms.append(float(np.squeeze(F(p))) / denom)
    value = math.fsum(terms)
    return DividedDifference(value, float(np.prod(x - nodes)) * value)


@dataclass(frozen=True)
class DividedDifferenceTable:
    nodes: tuple[float, ...]
    values: tuple[float, ...]
    table: tuple[tuple[float, ...], ...]  # table[j][i] = [x_i, ..., x_{i+j}]

    @property
    def top(self) -> float:
        return self.table[-1][0]

    def entry(self, i: int, j: int) -> float:
        """[x_i, ..., x_j] for i <= j."""
        return self.table[j - i][i]


def divided_difference_table(nodes: Sequence[float], values: Sequence[float]) -> DividedDifferenceTable:
    pts = _check_distinct(nodes)
    vals = np.asarray(values, dtype=float)
    if vals.shape != pts.shape:
        raise UsageError("nodes and values must have equal length")
    rows = [tuple(vals)]
    cur = vals
    for j in range(1, pts.size):
        cur = (cur[1:] - cur[:-1]) / (pts[j:] - pts[:-j])
        rows.append(tuple(cur))
    return DividedDifferenceTable(tuple(pts), tuple(vals), tuple(rows))


@dataclass(frozen=True)
class ProductBound:
    lhs: float
    rhs: float
    sup_derivative: float
    holds: bool


def zero_product_bound(F: Callable, zeros: Sequence[float], x: float, sup_bound: float | None = None,
                    derivative: Callable | None = None, samples: int = 4001,
                    zero_tol: float = 1e-10) -> ProductBound:
    """|F(x)| <= prod |x - x_k| * sup|F^(n)| / n! over the hull of x and the zeros.

    The derivative bound is either supplied or taken from dense samples of
    ``derivative`` (inflated by 1e-9 relative).
    """
    zs = _check_distinct(list(zeros))
    bad = [z for z in zs if abs(float(np.squeeze(F(z)))) > zero_tol]
    if bad:
        raise UsageError(f"F is not zero at the supplied nodes: {bad[:3]}")
    n = zs.size
    if sup_bound is None:
        if derivative is None:
            raise UsageError("supply sup_bound or a derivative callable")
        lo, hi = min(zs.min(), x), max(zs.max(), x)
        grid = np.linspace(lo, hi, samples)
        sup_bound = float(np.max(np.abs(derivative(grid)))) * (1 + 1e-9)
        if not math.isfinite(sup_bound):
            raise NumericError("derivative bound is not finite")
    lhs = abs(float(np.squeeze(F(x))))
    rhs = float(np.prod(np.abs(x - zs))) * sup_bound / math.factorial(n)
    return ProductBound(lhs, rhs, sup_bound, lhs <= rhs * (1 + 1e-12))


# --- zero counts of Z versus M -------------------------------------------------------------


@dataclass(frozen=True)
class GapStats:
    count: int
    mean: float
    min: float
    max: float


def _gap_stats(zeros) -> GapStats:
    z = np.sort(np.asarray(zeros, dtype=float))
    if z.size < 2:
        return GapStats(int(z.size), math.nan, math.nan, math.nan)
    g = np.diff(z)
    return GapStats(int(z.size), float(g.mean()), float(g.min()), float(g.max()))


def default_H(T: float, A: float = 1.0) -> float:
    """A log_3 T / log_2 T."""
    l2 = math.log(math.log(T))
    return A * math.log(l2) / l2


def m_zeros(engine: ConvolutionEngine, t_lo: float, t_hi: float, tol: float = 1e-9) -> np.ndarray:
    """Sign changes of M on [t_lo, t_hi], bisected to width tol."""
    step = min(0.05, float(mean_gap(t_hi)) / 10.0)
    n = max(1, int(math.ceil((t_hi - t_lo) / step)))
    ts = np.linspace(t_lo, t_hi, n + 1)
    m, _ = engine.values(ts)
    idx = np.flatnonzero(m[:-1] * m[1:] < 0)
    out = []
    for i in idx:
        a, b, fa = ts[i], ts[i + 1], m[i]
        while b - a > tol:
            c = 0.5 * (a + b)
            fc = engine.value(c)[0]
            if (fc > 0) == (fa > 0):
                a, fa = c, fc
            else:
                b = c
        out.append(0.5 * (a + b))
    return np.asarray(out)


@dataclass
class CountComparison:
    N_window: int
    N_M_window: int
    gaps_Z: GapStats
    gaps_M: GapStats
    H: float
    product_bound: dict = field(default_factory=dict)
    z_zeros: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    m_zeros: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)


def compare_counts(T: float, window: float, spec: ConvolutionKernelSpec, A: float = 1.0,
                   n_product_points: int = 50) -> CountComparison:
    """Zeros of Z and of M in [T - window, T + window], gap statistics, and the
    log-product of |gamma - t| over M-zeros within H of t against
    (1/pi) log(T/2pi) (H log H - H) with slack (1/pi) log(T/2pi) log_3 T / log_2 T.
    The product comparison is a report only; it presumes unproven regularity of N_M."""
    if T > 5000 or not 0 <= window <= 50:
        raise UsageError("compare_counts needs T <= 5000 and 0 <= window <= 50")
    H = default_H(T, A)
    if window == 0:
        return CountComparison(0, 0, _gap_stats([]), _gap_stats([]), H)
    lo, hi = T - window, T + window
    zz = np.array([r.gamma for r in scan_zeros(lo, hi)])
    eng = ConvolutionEngine(spec, lo, hi)
    mz = m_zeros(eng, lo, hi)
    L = math.log(T / (2 * math.pi))
    l2 = math.log(math.log(T))
    rhs = L / math.pi * (H * math.log(H) - H)
    slack = L / math.pi * math.log(l2) / l2
    worst = -math.inf
    if lo + H < hi - H:
        for t in np.linspace(lo + H, hi - H, n_product_points):
            near = mz[np.abs(mz - t) <= H]
            lp = float(np.sum(np.log(np.abs(near - t)))) if near.size else 0.0
            worst = max(worst, lp - rhs)
    product = {"rhs_main": rhs, "slack": slack, "max_lhs_minus_rhs": worst,
               "within_slack": bool(worst <= slack)}
    return CountComparison(int(zz.size), int(mz.size), _gap_stats(zz), _gap_stats(mz), H, product, zz, mz)


def count_main_term(T: float) -> float:
    return float(riemann_von_mangoldt(T))
