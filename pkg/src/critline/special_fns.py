"""Complex log-gamma, chi(s), the Riemann-Siegel theta function and Bernoulli numbers.

Everything here is a pure, numpy-vectorised function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, PoleError, UsageError

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)
HALF_LOG_2PI = 0.5 * LOG_2PI
EULER_GAMMA = 0.5772156649015329

_STIRLING_RADIUS = 15.0
_STIRLING_TERMS = 12


@lru_cache(maxsize=None)
def bernoulli_table(n_max: int = 30) -> tuple[Fraction, ...]:
    """Exact Bernoulli numbers B_0..B_n_max (convention B_1 = -1/2)."""
    B = [Fraction(1)]
    for m in range(1, n_max + 1):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * B[k]
        B.append(-acc / (m + 1))
    return tuple(B)


def bernoulli(n: int) -> Fraction:
    if not 0 <= n <= 30:
        raise UsageError(f"Bernoulli numbers are tabulated for 0 <= n <= 30, got {n}")
    return bernoulli_table()[n]


_STIRLING_COEFFS = np.array(
    [float(bernoulli(2 * k)) / (2 * k * (2 * k - 1)) for k in range(1, _STIRLING_TERMS + 1)]
)


def _log_gamma_stirling(w):
    # valid for |w| >= _STIRLING_RADIUS, Re w > 0
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    for c in _STIRLING_COEFFS[::-1]:
        series = series * inv2 + c
    return (w - 0.5) * np.log(w) - w + HALF_LOG_2PI + series * inv


def _log_gamma_right(w):
    # Re w >= 0: all shifted logs stay on the principal sheet
    m = np.where(np.abs(w) < _STIRLING_RADIUS, np.ceil(_STIRLING_RADIUS - w.real), 0.0)
    m = np.maximum(m, 0.0)
    acc = np.zeros_like(w)
    for k in range(int(m.max()) if m.size else 0):
        mask = k < m
        acc[mask] += np.log(w[mask] + k)
    return _log_gamma_stirling(w + m) - acc


def _log_sin_pi_upper(z):
    # continuous log sin(pi z) on Im z >= 0
    return -1j * np.pi * z + (math.log(0.5) + 0.5j * np.pi) + np.log1p(-np.exp(2j * np.pi * z))


def _log_gamma_reflect(z):
    flip = z.imag < 0
    zu = np.where(flip, np.conj(z), z)
    val = LOG_PI - _log_sin_pi_upper(zu) - _log_gamma_right(1.0 - zu)
    return np.where(flip, np.conj(val), val)


def log_gamma(z):
    """Principal branch of log Gamma(z), vectorised over numpy arrays.

    Reflection handles Re z < 0, upward recurrence brings |z| past the
    Stirling radius, and 12 Stirling terms finish the job.  Raises
    :class:`PoleError` at 0, -1, -2, ...
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    bad = (arr.imag == 0) & (arr.real <= 0) & (arr.real == np.round(arr.real))
    if bad.any():
        raise PoleError(f"log_gamma has a pole at {arr[bad][0].real:g}")
    out = np.empty_like(arr)
    refl = arr.real < 0
    if (~refl).any():
        out[~refl] = _log_gamma_right(arr[~refl])
    if refl.any():
        out[refl] = _log_gamma_reflect(arr[refl])
    return out[0] if scalar else out


def chi(s):
    """chi(s) from zeta(s) = chi(s) zeta(1-s).

    Evaluated in the symmetric form pi^(s-1/2) Gamma((1-s)/2) / Gamma(s/2), which
    equals 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) by the duplication and reflection
    formulas but never overflows at large |Im s|.  chi vanishes at s = 0, -2, -4, ...
    and has poles at s = 1, 3, 5, ...
    """
    arr = np.atleast_1d(np.asarray(s, dtype=complex))
    real_int = (arr.imag == 0) & (arr.real == np.round(arr.real))
    n = arr.real.astype(float)
    pole = real_int & (n >= 1) & (np.mod(n, 2) == 1)
    if pole.any():
        raise PoleError(f"chi(s) has a pole at s = {n[pole][0]:g}")
    zero = real_int & (n <= 0) & (np.mod(n, 2) == 0)
    out = np.zeros_like(arr)
    ok = ~zero
    a = arr[ok]
    out[ok] = np.exp((a - 0.5) * LOG_PI + log_gamma((1.0 - a) / 2.0) - log_gamma(a / 2.0))
    return out[0] if np.ndim(s) == 0 else out


def theta_exact(t):
    """Riemann-Siegel theta: Im log Gamma(1/4 + it/2) - (t/2) log pi.

    Odd in t; accepts complex t (analytic continuation via the two
    conjugate log-gamma branches), which the Cauchy-integral derivatives of
    Z rely on.
    """
    arr = np.asarray(t)
    if np.iscomplexobj(arr):
        w = 0.5j * arr
        val = (log_gamma(0.25 + w) - log_gamma(0.25 - w)) / 2j - 0.5 * arr * LOG_PI
        return val
    arr = arr.astype(float)
    return np.imag(log_gamma(0.25 + 0.5j * arr)) - 0.5 * arr * LOG_PI


def theta_main(t):
    """Leading part (t/2) log(t/2pi) - t/2 - pi/8 of theta(t)."""
    t = np.asarray(t, dtype=float)
    return 0.5 * t * np.log(t / (2.0 * np.pi)) - 0.5 * t - np.pi / 8.0


# --- Delta(t) = theta(t) - theta_main(t) ---------------------------------------------


@dataclass(frozen=True)
class ThetaExpansion:
    """Asymptotic series Delta(t) ~ sum_n c_n t^(1-2n)."""

    terms: tuple[tuple[float, int], ...]
    truncation_order: int

    def __post_init__(self):
        if self.truncation_order < 1 or len(self.terms) != self.truncation_order:
            raise UsageError("truncation_order must be >= 1 and match the number of terms")
        powers = [p for _, p in self.terms]
        if powers != [1 - 2 * n for n in range(1, self.truncation_order + 1)]:
            raise UsageError("powers must be 1-2n for n = 1..N")

    def term(self, n: int, t):
        c, p = self.terms[n - 1]
        return c * np.asarray(t, dtype=float) ** p

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return sum(c * t**p for c, p in self.terms)


def delta_coefficient(n: int) -> Fraction:
    """Coefficient of t^(1-2n) in the Delta(t) expansion.

    Comes from Stirling's series for Im log Gamma(1/4 + it/2):
    (1 - 2^(1-2n)) |B_2n| / (4n(2n-1)).  n = 1 gives 1/48.
    """
    b = abs(bernoulli(2 * n))
    return (1 - Fraction(1, 2 ** (2 * n - 1))) * b / (4 * n * (2 * n - 1))


def printed_delta_coefficient(n: int) -> Fraction:
    """The coefficient as it appears in the commonly quoted printed series,
    (2^2n - 1)|B_2n| / (2^2n (2n-1) 2n).  Kept only so the discrepancy with
    :func:`delta_coefficient` (a factor 3 at n = 1) can be reported."""
    b = abs(bernoulli(2 * n))
    return Fraction(2 ** (2 * n) - 1, 2 ** (2 * n)) * b / ((2 * n - 1) * 2 * n)


def theta_expansion(order: int) -> ThetaExpansion:
    if not 1 <= order <= 15:
        raise UsageError("expansion order must be in 1..15")
    return ThetaExpansion(
        terms=tuple((float(delta_coefficient(n)), 1 - 2 * n) for n in range(1, order + 1)),
        truncation_order=order,
    )


def _delta_tail(v, h):
    # Euler-Maclaurin tail of int_U^inf psi(u) g(u) du, g = 1/((u+1/4)^2 + h^2), v = U + 1/4
    r = 1.0 / (v - 1j * h)
    g0 = (r).imag / h
    g2 = (2.0 * r**3).imag / h
    g4 = (24.0 * r**5).imag / h
    return -g0 / 12.0 + g2 / 720.0 - g4 / 30240.0


def delta_integral(t: float) -> float:
    """Delta(t) = theta(t) - theta_main(t) from the closed-form terms plus the
    sawtooth integral

        (t/2) * int_0^inf psi(u) du / ((u + 1/4)^2 + t^2/4),   psi(u) = u - [u] - 1/2.

    psi is linear between integers, so each unit interval is integrated in
    closed form; the tail beyond u = 2000 is added from its
    Euler-Maclaurin expansion.  Independent of log_gamma.
    """
    t = float(t)
    if not t > 0:
        raise DomainError("delta_integral requires t > 0")
    h = 0.5 * t
    U = 2000
    k = np.arange(U, dtype=float)
    v0 = k + 0.25
    v1 = k + 1.25
    # int_k^{k+1} (v - (k+3/4)) / (v^2 + h^2) du, v = u + 1/4
    pieces = 0.5 * np.log1p((v1 * v1 - v0 * v0) / (v0 * v0 + h * h)) - (k + 0.75) / h * np.arctan(
        h / (h * h + v0 * v1)
    )
    integral = math.fsum(pieces) + _delta_tail(U + 0.25, h)
    closed = 0.25 * t * math.log1p(1.0 / (4.0 * t * t)) + 0.25 * math.atan(1.0 / (2.0 * t))
    return closed + 0.5 * t * integral


def fit_leading_delta_coefficient(t_values=(200.0, 400.0, 800.0, 1600.0)) -> float:
    """Estimate c_1 = lim t*Delta(t) from the integral representation.

    Richardson-style: t*Delta(t) = c_1 + c_2/t^2 + ..., so eliminate the t^-2
    term between consecutive heights and return the last estimate.
    """
    ts = np.asarray(t_values, dtype=float)
    vals = np.array([t * delta_integral(t) for t in ts])
    est = (ts[1:] ** 2 * vals[1:] - ts[:-1] ** 2 * vals[:-1]) / (ts[1:] ** 2 - ts[:-1] ** 2)
    return float(est[-1])


def _series_order(t: float) -> int:
    return 6 if t >= 10 else 10


def theta_asymptotic(t, order: int | None = None):
    t = np.asarray(t, dtype=float)
    if order is None:
        order = _series_order(float(np.min(t)))
    return theta_main(t) + theta_expansion(order)(t)


def _falling(p: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= p - j
    return out


def theta_derivatives(t, k: int):
    """k-th derivative of theta for 0 <= k <= 4 (asymptotic regime t >= 10).

    Main part differentiated exactly, Delta part termwise from its series.
    """
    if k not in range(5):
        raise UsageError(f"derivative order must be 0..4, got {k}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 10):
        raise UsageError("theta_derivatives is only valid for t >= 10")
    if k == 0:
        main = theta_main(t)
    elif k == 1:
        main = 0.5 * np.log(t / (2.0 * np.pi))
    else:
        # d^k/dt^k of (1/2) log t for k >= 2
        main = 0.5 * (-1) ** k * math.factorial(k - 2) * t ** (1.0 - k)
    expansion = theta_expansion(_series_order(float(np.min(t))))
    corr = sum(c * _falling(p, k) * t ** (p - k) for c, p in expansion.terms)
    return main + corr
