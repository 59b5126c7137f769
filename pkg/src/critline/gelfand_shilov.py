"""Compactly supported bump, its plateau integral and the Fourier-side test function.

    phi(x)  = K exp(-1/(1 - (x/a)^2))          on |x| < a, normalised to integral 1
    Phi(x)  = int_{x-b}^{x+b} phi(t) dt         = 1 on |x| <= b-a, 0 on |x| >= b+a
    f(x)    = int Phi(u) e^{-2 pi i x u} du      = sin(2 pi b x)/(pi x) * phi_hat(x)

so f_hat = Phi exactly.  f is even, entire and decays like exp(-c sqrt|x|).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import make_interp_spline
from scipy.optimize import linprog

from .errors import NumericError, UsageError
from .tabular import write_csv

GRID_STEP = 1.0 / 128.0
GRID_MAX = 160.0
_PHI_NODES = 800
_CDF_NODES = 128
_SERIES_RADIUS = 0.25
MAX_DERIVATIVE = 6


def _profile(x, a):
    x = np.asarray(x, dtype=float)
    r = 1.0 - (x / a) ** 2
    inside = r > 0
    out = np.zeros_like(x)
    out[inside] = np.exp(-1.0 / r[inside])
    return out


def _gl(n, lo, hi):
    x, w = leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


@dataclass(frozen=True)
class Bump:
    """Normalised bump supported on [-a, a]."""

    a: float
    norm: float

    def __call__(self, x):
        return self.norm * _profile(x, self.a)

    def cdf(self, y):
        """int_{-a}^{y} phi, exactly 0 below -a and exactly 1 above a."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.where(y >= self.a, 1.0, 0.0)
        mid = (y > -self.a) & (y < self.a)
        if mid.any():
            ym = y[mid]
            # integrate over the shorter side for accuracy near the ends
            upper = ym > 0
            lo = np.where(upper, ym, -self.a)
            hi = np.where(upper, self.a, ym)
            x, w = leggauss(_CDF_NODES)
            half = 0.5 * (hi - lo)
            pts = half[:, None] * x[None, :] + (0.5 * (hi + lo))[:, None]
            part = half * (self(pts) @ w)
            out[mid] = np.where(upper, 1.0 - part, part)
        return out


def make_bump(a_support: float) -> Bump:
    if not a_support > 0:
        raise UsageError("bump support radius must be positive")
    x, w = _gl(_PHI_NODES, 0.0, a_support)
    total = 2.0 * float(np.dot(_profile(x, a_support), w))
    return Bump(a=float(a_support), norm=1.0 / total)


@dataclass(frozen=True)
class Plateau:
    phi: Bump
    b: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        return self.phi.cdf(ax + self.b) - self.phi.cdf(ax - self.b) if x.ndim else float(
            (self.phi.cdf(ax + self.b) - self.phi.cdf(ax - self.b))[0]
        )


def make_plateau(phi: Bump, b: float) -> Plateau:
    if not b > max(1.0, phi.a):
        raise UsageError("plateau half-width b must exceed max(1, a)")
    return Plateau(phi=phi, b=float(b))


# --- derivatives of sin(w x)/(pi x) -----------------------------------------------


def sinc_derivative(x, m: int, w: float):
    """m-th derivative of sin(w x)/(pi x)."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < _SERIES_RADIUS
    if small.any():
        xs = x[small]
        acc = np.zeros_like(xs)
        for n in range((m + 1) // 2, 40):
            p = 2 * n - m
            c = (-1) ** n * w ** (2 * n + 1) / math.factorial(2 * n + 1) * math.factorial(2 * n) / math.factorial(p)
            acc += c * xs**p
        out[small] = acc
    big = ~small
    if big.any():
        xb = x[big]
        acc = np.zeros_like(xb)
        for j in range(m + 1):
            acc += (math.comb(m, j) * w ** (m - j) * (-1) ** j * math.factorial(j)
                    * np.sin(w * xb + (m - j) * math.pi / 2) / xb ** (j + 1))
        out[big] = acc
    return out / math.pi


class _Tables:
    """Spline tables of phi_hat^(j) on [0, GRID_MAX]; built lazily, thread-safe."""

    def __init__(self, phi: Bump):
        self.phi = phi
        self.nodes, w = _gl(_PHI_NODES, 0.0, phi.a)
        self.weights = 2.0 * w * phi(self.nodes)
        self.grid = np.arange(0.0, GRID_MAX + GRID_STEP / 2, GRID_STEP)
        self._splines: dict[int, object] = {}
        self._lock = threading.Lock()

    def exact(self, x, j: int):
        x = np.abs(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        flat, res = x.ravel(), out.ravel()
        for start in range(0, flat.size, 2048):
            chunk = flat[start : start + 2048]
            xmax = float(chunk.max()) if chunk.size else 0.0
            if xmax * self.phi.a > 0.3 * _PHI_NODES:
                n = int(4 * xmax * self.phi.a) + _PHI_NODES
                t, w = _gl(n, 0.0, self.phi.a)
                wt = 2.0 * w * self.phi(t)
            else:
                t, wt = self.nodes, self.weights
            arg = 2.0 * math.pi * np.outer(chunk, t) + j * math.pi / 2
            res[start : start + 2048] = np.cos(arg) @ (wt * (2.0 * math.pi * t) ** j)
        return out

    def spline(self, j: int):
        with self._lock:
            sp = self._splines.get(j)
            if sp is None:
                sp = make_interp_spline(self.grid, self.exact(self.grid, j), k=5)
                self._splines[j] = sp
            return sp

    def phi_hat(self, x, j: int = 0):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        inside = ax <= GRID_MAX
        out = np.empty_like(ax)
        if inside.any():
            out[inside] = self.spline(j)(ax[inside])
        if (~inside).any():
            out[~inside] = self.exact(ax[~inside], j)
        # phi_hat^(j) has parity (-1)^j
        return np.where((x < 0) & (j % 2 == 1), -out, out)


@dataclass(frozen=True)
class TestFunction:
    """f = Fourier transform of a plateau; immutable and shareable across threads.

    A, B, C fit |x^k f^(q)| <= C A^k B^q k^(k alpha) q^(q beta); a and C_env fit
    |f(x)| <= C_env exp(-a |x|^(1/alpha)).
    """

    alpha: float
    beta: float
    a_support: float
    b_plateau: float
    eval: Callable = field(repr=False)
    fourier: Callable = field(repr=False)
    A: float = math.nan
    B: float = math.nan
    C: float = math.nan
    a: float = math.nan
    C_env: float = math.nan
    scale: float = 1.0
    positive_integral: bool = False
    plateau: Plateau | None = field(default=None, repr=False)
    tables: _Tables | None = field(default=None, repr=False, compare=False)

    def __call__(self, x):
        return self.eval(x)

    def derivative(self, x, q: int):
        """f^(q)(x) by Leibniz over sin(2 pi b x)/(pi x) and phi_hat."""
        if not 0 <= q <= MAX_DERIVATIVE:
            raise UsageError(f"derivative order must be 0..{MAX_DERIVATIVE}")
        x = np.asarray(x, dtype=float)
        w = 2.0 * math.pi * self.b_plateau
        acc = np.zeros_like(x)
        for j in range(q + 1):
            acc = acc + math.comb(q, j) * sinc_derivative(x, q - j, w) * self.tables.phi_hat(x, j)
        return self.scale * acc

    def derivative_direct(self, x, q: int, panels_per_unit: float = 4.0):
        """f^(q)(x) = 2 int_0^{b+a} Phi(u) (2 pi u)^q cos(2 pi x u + q pi/2) du by quadrature
        of the plateau itself.  Independent of the phi_hat tables."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        b, a = self.b_plateau, self.a_support
        out = np.empty_like(xs)
        for i, xv in enumerate(xs):
            total = 0.0
            for lo, hi in ((0.0, b - a), (b - a, b + a)):
                n_pan = int(math.ceil((hi - lo) * (panels_per_unit * abs(xv) + 4)))
                edges = np.linspace(lo, hi, n_pan + 1)
                g, gw = leggauss(20)
                half = 0.5 * np.diff(edges)
                u = (half[:, None] * g[None, :] + (0.5 * (edges[1:] + edges[:-1]))[:, None]).ravel()
                wt = (half[:, None] * gw[None, :]).ravel()
                vals = np.ones_like(u) if lo == 0.0 else self.plateau(u)
                integrand = vals * (2.0 * math.pi * u) ** q * np.cos(2.0 * math.pi * xv * u + q * math.pi / 2)
                total += math.fsum(integrand * wt)
            out[i] = 2.0 * total
        out *= self.scale
        return out if np.ndim(x) else float(out[0])

    def scaled(self, c: float) -> "TestFunction":
        base = self
        return replace(
            self,
            eval=lambda x: c * base.eval(x),
            fourier=lambda x: c * np.asarray(base.fourier(x)),
            scale=self.scale * c,
            C=abs(c) * self.C,
            C_env=abs(c) * self.C_env,
        )

    def tail_radius(self, eps: float) -> float:
        """R with C_env exp(-a R^(1/alpha)) = eps (R >= b + a)."""
        if not eps > 0:
            raise UsageError("eps must be positive")
        if self.scale == 0:
            return 0.0
        r = max(math.log(self.C_env / eps), 0.0) / self.a
        return max(r**self.alpha, self.b_plateau + self.a_support)


def _eval_f(tables: _Tables, b: float):
    w = 2.0 * math.pi * b

    def f(x):
        xa = np.asarray(x, dtype=float)
        val = sinc_derivative(xa, 0, w) * tables.phi_hat(xa, 0)
        return val if xa.ndim else float(val)

    return f


def _sample_grid():
    return np.concatenate([np.arange(0.0, 20.0, 1.0 / 64.0), np.arange(20.0, GRID_MAX, 0.25)])


def _fit_envelope(x, fx, alpha):
    # tightest line log C_env - a x^(1/alpha) lying above log|f| on samples above 1e-14
    keep = np.abs(fx) > 1e-14
    u = x[keep] ** (1.0 / alpha)
    y = np.log(np.abs(fx[keep]))
    res = linprog(
        c=[keep.sum(), -u.sum()],
        A_ub=np.column_stack([-np.ones_like(u), u]),
        b_ub=-y,
        bounds=[(None, None), (0.0, None)],
        method="highs",
    )
    if not res.success:
        raise NumericError("envelope fit failed", message=res.message)
    return math.exp(res.x[0]) * (1 + 1e-12), float(res.x[1])


def _klogk(k, power):
    return power * k * math.log(k) if k > 0 else 0.0


def _fit_class(sup, alpha, beta):
    # minimise log C + k_max log A + q_max log B subject to the (k, q) bounds
    kq = [(k, q) for k in range(sup.shape[0]) for q in range(sup.shape[1]) if sup[k, q] > 0]
    k_max, q_max = sup.shape[0] - 1, sup.shape[1] - 1
    A_ub = np.array([[-1.0, -k, -q] for k, q in kq])
    b_ub = np.array([-(math.log(sup[k, q]) - _klogk(k, alpha) - _klogk(q, beta)) for k, q in kq])
    res = linprog(c=[1.0, max(k_max, 1), max(q_max, 1)], A_ub=A_ub, b_ub=b_ub,
                  bounds=[(None, None)] * 3, method="highs")
    if not res.success:
        raise NumericError("class-constant fit failed", message=res.message)
    lc, la, lb = res.x
    return math.exp(la), math.exp(lb), math.exp(lc)


def _sup_table(testfn, k_max, q_max, x):
    sup = np.zeros((k_max + 1, q_max + 1))
    for q in range(q_max + 1):
        dq = np.abs(testfn.derivative(x, q))
        for k in range(k_max + 1):
            sup[k, q] = float(np.max(x**k * dq))
    return sup


def make_f_from_plateau(Phi: Plateau, alpha: float = 2.0, require_positive_integral: bool = False) -> TestFunction:
    """Build f with f_hat = Phi, and fit its decay constants (k, q <= 3)."""
    tables = _Tables(Phi.phi)
    b, a = Phi.b, Phi.phi.a
    f = _eval_f(tables, b)
    base = TestFunction(alpha=alpha, beta=0.0, a_support=a, b_plateau=b, eval=f, fourier=Phi,
                        plateau=Phi, tables=tables, positive_integral=require_positive_integral)
    if require_positive_integral and not Phi(0.0) > 0:
        raise UsageError("test function must have positive integral")
    x = _sample_grid()
    A, B, C = _fit_class(_sup_table(base, 3, 3, x), alpha, 0.0)
    C_env, a_env = _fit_envelope(x, f(x), alpha)
    return replace(base, A=A, B=B, C=C, a=float(a_env), C_env=float(C_env))


@lru_cache(maxsize=16)
def make_test_function(a_support: float = 1.0, b_plateau: float = 2.5, alpha: float = 2.0,
                       require_positive_integral: bool = False) -> TestFunction:
    """Bump -> plateau -> f in one call; cached since construction tabulates phi_hat."""
    return make_f_from_plateau(make_plateau(make_bump(a_support), b_plateau), alpha, require_positive_integral)


@dataclass(frozen=True)
class ClassReport:
    sup: np.ndarray
    A: float
    B: float
    C: float
    a_fitted: float
    C_env: float
    a_formula: float
    envelope_holds: bool
    formula_envelope_holds: bool
    diagnostics: tuple[str, ...] = ()


def verify_class(testfn: TestFunction, k_max: int, q_max: int) -> ClassReport:
    """Fit minimal (A, B, C) for the joint decay bound over a sample grid, then
    test the exp(-a |x|^(1/alpha)) envelope with the fitted a and with
    a = alpha / (e A^(1/alpha))."""
    diagnostics = []
    if q_max > MAX_DERIVATIVE:
        diagnostics.append(f"q_max capped at {MAX_DERIVATIVE}")
        q_max = MAX_DERIVATIVE
    if k_max > MAX_DERIVATIVE:
        diagnostics.append(f"k_max capped at {MAX_DERIVATIVE}")
        k_max = MAX_DERIVATIVE
    x = _sample_grid()
    sup = _sup_table(testfn, k_max, q_max, x)
    A, B, C = _fit_class(sup, testfn.alpha, testfn.beta)
    fx = np.abs(testfn(x))
    C_env, a_fit = _fit_envelope(x, fx, testfn.alpha)
    keep = fx > 1e-14
    u = x[keep] ** (1.0 / testfn.alpha)
    holds = bool(np.all(fx[keep] <= C_env * np.exp(-a_fit * u) * (1 + 1e-9)))
    a_formula = testfn.alpha / (math.e * A ** (1.0 / testfn.alpha))
    formula_holds = bool(np.all(fx[keep] <= C * np.exp(-a_formula * u) * (1 + 1e-9)))
    return ClassReport(sup, A, B, C, a_fit, C_env, a_formula, holds and a_fit > 0,
                       formula_holds, tuple(diagnostics))


def fourier_integral(testfn: TestFunction, xi, n: int = 0, radius: float | None = None):
    """int x^n f(x) e^{2 pi i x xi} dx by panel Gauss-Legendre on [-R, R].

    For n = 0 this is the numerical inverse of f_hat, i.e. should equal Phi(xi).
    """
    R = radius if radius is not None else testfn.tail_radius(1e-17)
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    freq = testfn.b_plateau + testfn.a_support + float(np.max(np.abs(xi_arr)))
    n_pan = int(math.ceil(R * max(4.0 * freq, 1.0)))
    edges = np.linspace(0.0, R, n_pan + 1)
    g, gw = leggauss(16)
    half = 0.5 * np.diff(edges)
    x = (half[:, None] * g[None, :] + (0.5 * (edges[1:] + edges[:-1]))[:, None]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    fx = testfn(x) * x**n * w
    out = np.empty(xi_arr.size, dtype=complex)
    for i, v in enumerate(xi_arr):
        # f even: x^n f is even for even n (cosine part) and odd for odd n (sine part)
        if n % 2 == 0:
            out[i] = 2.0 * math.fsum(fx * np.cos(2.0 * math.pi * x * v))
        else:
            out[i] = 2j * math.fsum(fx * np.sin(2.0 * math.pi * x * v))
    return out if np.ndim(xi) else complex(out[0])


@dataclass(frozen=True)
class ConvolutionKernelSpec:
    """Kernel x -> f(x/G) with G = delta / log(T / 2 pi)."""

    testfn: TestFunction
    G: float
    delta: float
    T: float

    def __post_init__(self):
        if not (self.G > 0 and self.delta > 0 and self.T > 2 * math.pi):
            raise UsageError("kernel spec needs G > 0, delta > 0 and T > 2 pi")
        if abs(self.G - self.delta / math.log(self.T / (2 * math.pi))) > 1e-12 * self.G:
            raise UsageError("G must equal delta / log(T / 2 pi)")

    @classmethod
    def build(cls, testfn: TestFunction, delta: float, T: float) -> "ConvolutionKernelSpec":
        if not T > 2 * math.pi:
            raise UsageError("T must exceed 2 pi")
        return cls(testfn, delta / math.log(T / (2 * math.pi)), float(delta), float(T))

    @property
    def hypothesis_holds(self) -> bool:
        """0 < delta < 2 pi (b - a)."""
        return 0 < self.delta < 2 * math.pi * (self.testfn.b_plateau - self.testfn.a_support)

    @property
    def plateau_value(self) -> float:
        return float(self.testfn.fourier(self.delta / (4 * math.pi)))


def export_grid_csv(testfn: TestFunction, path, x_max: float = 10.0, step: float = 0.01):
    x = np.arange(-x_max, x_max + step / 2, step)
    return write_csv(path, ["x", "f", "f_hat"], zip(x, testfn(x), testfn.fourier(x)))
