"""Evaluators for zeta(s), the Hurwitz zeta function and Hardy's Z(t).

Two independent routes to Z(t):

* :func:`z_oracle` -- exp(i theta(t)) * zeta(1/2 + it) with zeta summed by
  Euler-Maclaurin.  Accurate to ~1e-12 at desk heights; the reference for
  everything else.
* :func:`z_rs` -- the Riemann-Siegel main sum plus its first correction
  term.  Cheap, error O(t^(-3/4)).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, PoleError, UsageError
from .special_fns import EULER_GAMMA, bernoulli, chi, theta_exact

# Correction terms through B_{2J}.  J = 8 rather than 5: it costs nothing and
# pushes the truncation error of the oracle below 1e-15 at every height used.
EM_BERNOULLI_TERMS = 8
_EM_COEFFS = [float(bernoulli(2 * j)) / math.factorial(2 * j) for j in range(1, EM_BERNOULLI_TERMS + 1)]

# Observed max of |z_rs - z_oracle| * t^(3/4) over t in [10, 5000] is ~0.13
# (see tests/test_zeta_eval.py); 1.0 leaves a wide margin.
RS_ERROR_CONSTANT = 1.0
ORACLE_ERROR = 1e-11
IMAG_TOLERANCE = 1e-9
_CHUNK = 512


class ZMethod(str, enum.Enum):
    RIEMANN_SIEGEL = "riemann_siegel"
    EULER_MACLAURIN = "euler_maclaurin_via_chi"


@dataclass(frozen=True)
class CriticalLineSample:
    t: float
    z_value: float
    method: ZMethod
    err_bound: float

    def __float__(self):
        return self.z_value


@dataclass(frozen=True)
class HurwitzParams:
    s: complex
    a: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.a <= 1.0:
            raise UsageError(f"Hurwitz parameter a must lie in (0, 1], got {self.a}")
        if complex(self.s) == 1:
            raise PoleError("zeta(s, a) has a pole at s = 1")


def em_cutoff(t_abs) -> np.ndarray:
    return np.ceil(1.3 * np.asarray(t_abs, dtype=float) + 30.0).astype(int)


def _hurwitz_block(s: np.ndarray, a: float) -> np.ndarray:
    """Euler-Maclaurin for a batch of s sharing one cutoff N."""
    N = int(em_cutoff(np.max(np.abs(s.imag))).max())
    N = max(N, int(np.ceil(np.max(np.abs(s)))) + 10)
    n = np.arange(N, dtype=float) + a
    log_n = np.log(n)
    head = np.exp(-np.outer(s, log_n)).sum(axis=1)
    x = N + a
    log_x = math.log(x)
    x_pow = np.exp(-s * log_x)  # x^-s
    total = head + x * x_pow / (s - 1.0) + 0.5 * x_pow
    # rising factorial s(s+1)...(s+2j-2) times x^(-s-2j+1)
    rising = s.copy()
    term_pow = x_pow / x
    for j, c in enumerate(_EM_COEFFS, start=1):
        total = total + c * rising * term_pow
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        term_pow = term_pow / (x * x)
    return total


def _expm1_ratio(x: np.ndarray) -> np.ndarray:
    # (e^x - 1) / x, complex-safe near 0
    small = np.abs(x) < 1e-5
    xs = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x / 2.0 + x * x / 6.0, np.expm1(xs) / xs)


def _combination_block(s: np.ndarray, weights, shifts) -> np.ndarray:
    N = int(em_cutoff(np.max(np.abs(s.imag))).max())
    N = max(N, int(np.ceil(np.max(np.abs(s)))) + 10)
    balanced = sum(weights) == 0
    total = np.zeros_like(s)
    for w, a in zip(weights, shifts):
        if w == 0:
            continue
        log_n = np.log(np.arange(N, dtype=float) + a)
        part = np.exp(-np.outer(s, log_n)).sum(axis=1)
        x = N + a
        L = math.log(x)
        x_pow = np.exp(-s * L)
        if balanced:
            # (x^(1-s) - 1)/(s-1); the constant -1/(s-1) cancels across the weights
            part = part - L * _expm1_ratio((1.0 - s) * L)
        else:
            part = part + x * x_pow / (s - 1.0)
        part = part + 0.5 * x_pow
        rising = s.copy()
        term_pow = x_pow / x
        for j, c in enumerate(_EM_COEFFS, start=1):
            part = part + c * rising * term_pow
            rising = rising * (s + 2 * j - 1) * (s + 2 * j)
            term_pow = term_pow / (x * x)
        total = total + w * part
    return total


def hurwitz_combination(s, weights, shifts) -> np.ndarray:
    """sum_j weights[j] * zeta(s, shifts[j]), vectorised over s.

    When the weights sum to exactly zero the 1/(s-1) poles are cancelled
    analytically before any floating-point subtraction, so the combination
    stays accurate at and near s = 1.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    if sum(weights) != 0 and np.any(s_arr == 1.0):
        raise PoleError("combination has a pole at s = 1")
    out = np.empty_like(s_arr)
    order = np.argsort(np.abs(s_arr.imag))
    for start in range(0, s_arr.size, _CHUNK):
        idx = order[start : start + _CHUNK]
        out[idx] = _combination_block(s_arr[idx], weights, shifts)
    return out


def _near_one(s: np.ndarray) -> np.ndarray:
    # Laurent expansion zeta(s) = 1/(s-1) + gamma - gamma_1 (s-1) + ...
    gamma_1 = -0.0728158454836767
    gamma_2 = -0.0096903631928723
    e = s - 1.0
    return 1.0 / e + EULER_GAMMA - gamma_1 * e + 0.5 * gamma_2 * e * e


def hurwitz_values(s, a: float = 1.0) -> np.ndarray:
    """Vectorised zeta(s, a).  No pole check beyond s == 1 exactly."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(s_arr == 1.0):
        raise PoleError("zeta(s, a) has a pole at s = 1")
    out = np.empty_like(s_arr)
    order = np.argsort(np.abs(s_arr.imag))
    for start in range(0, s_arr.size, _CHUNK):
        idx = order[start : start + _CHUNK]
        out[idx] = _hurwitz_block(s_arr[idx], a)
    return out


def zeta_values(s) -> np.ndarray:
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    near = np.abs(s_arr - 1.0) < 1e-4
    if np.any(s_arr == 1.0):
        raise PoleError("zeta(s) has a pole at s = 1")
    # left of the strip the head sum cancels badly; reflect instead
    left = (s_arr.real < 0.0) & ~near
    direct = ~near & ~left
    out = np.empty_like(s_arr)
    if near.any():
        out[near] = _near_one(s_arr[near])
    if direct.any():
        out[direct] = hurwitz_values(s_arr[direct], 1.0)
    if left.any():
        sl = s_arr[left]
        out[left] = chi(sl) * hurwitz_values(1.0 - sl, 1.0)
    return out


def zeta_em(s: complex) -> complex:
    """zeta(s) by Euler-Maclaurin summation (Laurent series within 1e-4 of s = 1,
    reflected through zeta(s) = chi(s) zeta(1 - s) for Re s < 0)."""
    return complex(zeta_values(s)[0])


def hurwitz_em(p: HurwitzParams) -> complex:
    """zeta(s, a) = sum_{n >= 0} (n + a)^-s, continued by Euler-Maclaurin."""
    return complex(hurwitz_values(p.s, p.a)[0])


# --- Z(t) --------------------------------------------------------------------------


def z_values(t, imag_tol: float = IMAG_TOLERANCE) -> np.ndarray:
    """Vectorised oracle Z(t) = exp(i theta(t)) zeta(1/2 + it); even in t."""
    t_arr = np.abs(np.atleast_1d(np.asarray(t, dtype=float)))
    zeta = zeta_values(0.5 + 1j * t_arr)
    with np.errstate(invalid="ignore"):
        theta = np.where(t_arr > 0, theta_exact(np.where(t_arr > 0, t_arr, 1.0)), 0.0)
    z = np.exp(1j * theta) * zeta
    worst = np.max(np.abs(z.imag)) if z.size else 0.0
    if worst > imag_tol:
        raise ConsistencyError(f"Z(t) has imaginary residue {worst:.3e}", imag=worst)
    return z.real


def z_complex(w) -> np.ndarray:
    """Analytic continuation of Z to complex w (no realness check)."""
    w_arr = np.atleast_1d(np.asarray(w, dtype=complex))
    return np.exp(1j * theta_exact(w_arr)) * zeta_values(0.5 + 1j * w_arr)


def z_oracle(t: float) -> CriticalLineSample:
    """Z(t) = chi^(-1/2)(1/2 + it) zeta(1/2 + it), computed as exp(i theta) zeta."""
    t = float(t)
    if t == 0:
        # theta(0) = 0, Z(0) = zeta(1/2)
        return CriticalLineSample(0.0, float(zeta_em(0.5).real), ZMethod.EULER_MACLAURIN, ORACLE_ERROR)
    return CriticalLineSample(t, float(z_values(t)[0]), ZMethod.EULER_MACLAURIN, ORACLE_ERROR)


def _rs_phase(t: float, n: int) -> float:
    # t log(sqrt(t/2pi)/n) - t/2 - pi/8
    return t * (0.5 * math.log(t / (2.0 * math.pi)) - math.log(n)) - 0.5 * t - math.pi / 8.0


def rs_main_sum(t: float, k: int = 0) -> float:
    """2 sum_{n <= sqrt(t/2pi)} n^-1/2 log(P/n)^k cos(phase + pi k/2).

    k = 0 is the Riemann-Siegel main sum; k > 0 is Lavrik's derivative sum.
    Ascending n, exactly rounded accumulation (math.fsum).
    """
    P = math.sqrt(t / (2.0 * math.pi))
    m = int(math.floor(P))
    terms = []
    for n in range(1, m + 1):
        lg = math.log(P / n)
        terms.append(lg**k * math.cos(_rs_phase(t, n) + 0.5 * math.pi * k) / math.sqrt(n))
    return 2.0 * math.fsum(terms)


def rs_correction(t: float) -> float:
    """First Riemann-Siegel correction (-1)^(m-1) (t/2pi)^(-1/4) C0(p)."""
    P = math.sqrt(t / (2.0 * math.pi))
    m = int(math.floor(P))
    p = P - m
    denom = math.cos(2.0 * math.pi * p)
    if abs(denom) < 1e-8:
        # removable singularity at p = 1/4, 3/4: average two nearby points
        h = 1e-5
        c0 = 0.5 * (_c0(p - h) + _c0(p + h))
    else:
        c0 = _c0(p)
    return (-1) ** (m - 1) * P**-0.5 * c0


def _c0(p: float) -> float:
    return math.cos(2.0 * math.pi * (p * p - p - 1.0 / 16.0)) / math.cos(2.0 * math.pi * p)


def z_rs(t: float) -> CriticalLineSample:
    """Riemann-Siegel Z(t): main sum plus one correction term, t >= 10."""
    t = float(t)
    if not t >= 10.0:
        raise UsageError(f"z_rs requires t >= 10 (got {t}); use z_oracle below that")
    value = rs_main_sum(t) + rs_correction(t)
    return CriticalLineSample(t, value, ZMethod.RIEMANN_SIEGEL, RS_ERROR_CONSTANT * t**-0.75)


def lavrik_envelope(t: float, k: int) -> float:
    return t**-0.25 * (1.5 * math.log(t)) ** (k + 1)


def z_derivative_lavrik(t: float, k: int) -> float:
    """k-th derivative of Z from Lavrik's uniform sum (no correction term).

    Valid for t >= 50 and 0 <= k <= (1/2) log t; the error is bounded by
    :func:`lavrik_envelope` up to an unspecified constant.  k = 0 is the same
    code path as the Riemann-Siegel main sum.
    """
    t = float(t)
    if t < 50.0:
        raise UsageError("z_derivative_lavrik requires t >= 50")
    if not 0 <= k <= 0.5 * math.log(t):
        raise UsageError(f"derivative order k must satisfy 0 <= k <= log(t)/2 = {0.5 * math.log(t):.3f}")
    return rs_main_sum(t, k)


def z_derivatives(t, k: int, radius: float = 0.25, points: int = 48) -> np.ndarray:
    """Z^(k)(t) via the Cauchy integral over a circle of given radius.

    Z is entire near the real axis (t away from 0), so the trapezoidal rule on
    the circle converges geometrically.  Vectorised over t.
    """
    if k < 0:
        raise UsageError("derivative order must be >= 0")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    ang = 2.0 * np.pi * np.arange(points) / points
    circle = radius * np.exp(1j * ang)
    w = (t_arr[:, None] + circle[None, :]).ravel()
    vals = z_complex(w).reshape(t_arr.size, points)
    coeff = (vals * np.exp(-1j * k * ang)[None, :]).mean(axis=1)
    return (coeff * math.factorial(k) / radius**k).real
