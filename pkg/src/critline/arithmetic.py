"""Moebius and Mertens functions, li(x) and pi(x)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import UsageError
from .special_fns import EULER_GAMMA
from .tabular import write_csv

SIEVE_LIMIT = 10**8


@dataclass(frozen=True)
class MertensTable:
    N: int
    mu: np.ndarray  # mu[n] for 0 <= n <= N (mu[0] = 0 unused)
    M: np.ndarray  # M[x] = sum_{n <= x} mu(n)

    def mertens(self, x: int) -> int:
        if not 1 <= x <= self.N:
            raise UsageError(f"x must lie in [1, {self.N}]")
        return int(self.M[x])


def mobius_sieve(N: int) -> MertensTable:
    """mu(1) = 1, mu(n) = -sum_{d | n, d < n} mu(d), as a divisor-sum sieve.

    Small d push -mu(d) onto their multiples one at a time.  Above
    B = N^(2/3) all d with the same multiplicity k = N // d are pushed
    together: such d cannot divide one another, so their values are already
    final when the block is reached.
    """
    if not isinstance(N, (int, np.integer)) or not 1 <= N <= SIEVE_LIMIT:
        raise UsageError(f"N must be an integer in [1, {SIEVE_LIMIT}]")
    N = int(N)
    mu = np.zeros(N + 1, dtype=np.int8)
    mu[1] = 1
    B = min(N, int(round(N ** (2.0 / 3.0))) + 1)
    for d in range(1, B + 1):
        m = mu[d]
        if m and 2 * d <= N:
            mu[2 * d :: d] -= m
    k = N // (B + 1)
    while k >= 2:
        d_lo, d_hi = N // (k + 1) + 1, N // k
        d_lo = max(d_lo, B + 1)
        if d_lo <= d_hi:
            D = np.arange(d_lo, d_hi + 1)
            vals = mu[D]
            for j in range(2, k + 1):
                mu[j * D] -= vals
        k -= 1
    M = np.cumsum(mu, dtype=np.int64)
    return MertensTable(N, mu, M)


def mertens_power_bound(N: int, k: int, table: MertensTable) -> bool:
    """M(N)^(2k) <= N^(k+1), compared in logarithms."""
    if N < 1 or k < 1 or N > table.N:
        raise UsageError("need N, k >= 1 and N within the sieve table")
    m = abs(int(table.M[N]))
    if m == 0:
        return True
    return 2 * k * math.log(m) <= (k + 1) * math.log(N) + 1e-12


def mertens_power_violations(table: MertensTable, k: int) -> np.ndarray:
    """Every n <= N where M(n)^(2k) > n^(k+1) (empty when the bound holds throughout)."""
    n = np.arange(1, table.N + 1)
    m = np.abs(table.M[1:]).astype(float)
    with np.errstate(divide="ignore"):
        lhs = 2 * k * np.log(m)
    bad = lhs > (k + 1) * np.log(n) + 1e-12
    return n[bad]


def export_mertens_csv(table: MertensTable, path):
    n = np.arange(1, table.N + 1)
    return write_csv(path, ["n", "mu", "M"], zip(n.tolist(), table.mu[1:].tolist(), table.M[1:].tolist()))


# --- li(x) -----------------------------------------------------------------------------


def _e1_at_one() -> float:
    # E1(1) = -gamma - sum_{n>=1} (-1)^n / (n n!)
    terms = [-EULER_GAMMA]
    fact = 1.0
    for n in range(1, 30):
        fact *= n
        terms.append(-((-1) ** n) / (n * fact))
    return math.fsum(terms)


_E1_1 = _e1_at_one()


def _gl(lo, hi, n):
    x, w = leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _central() -> float:
    # PV int_{-1}^{1} e^u / u du = int_{-1}^{1} (e^u - 1)/u du
    u, w = _gl(-1.0, 1.0, 40)
    return math.fsum(w * np.expm1(u) / u)


_CENTRAL = _central()


def _exp_over_u(lo: float, hi: float) -> float:
    if hi == lo:
        return 0.0
    n_pan = max(1, int(math.ceil(abs(hi - lo))))
    edges = np.linspace(lo, hi, n_pan + 1)
    total = []
    for a, b in zip(edges[:-1], edges[1:]):
        u, w = _gl(a, b, 32)
        total.append(math.fsum(w * np.exp(u) / u))
    return math.fsum(total)


def li(x: float) -> float:
    """Principal value of int_0^x dt / log t, x >= 2.

    With u = log t the singularity at t = 1 becomes 1/u at u = 0, which is
    removed symmetrically on [-1, 1]; the left tail is -E1(1).
    """
    if not x >= 2:
        raise UsageError("li requires x >= 2")
    L = math.log(x)
    # L >= log 2 > 0; the integral up to L is the central piece plus/minus [1, L]
    return -_E1_1 + _CENTRAL + (_exp_over_u(1.0, L) if L >= 1 else -_exp_over_u(L, 1.0))


def li_asymptotic(x: float, N: int) -> float:
    """sum_{n=1}^{N} (n-1)! x / log^n x."""
    if N < 1:
        raise UsageError("N must be >= 1")
    L = math.log(x)
    return math.fsum(math.factorial(n - 1) * x / L**n for n in range(1, N + 1))


def li_envelope(x: float, N: int, c: float = 2.0) -> float:
    """c N! x / log^(N+1) x, a bound for |li(x) - li_asymptotic(x, N)| once log x
    is comfortably larger than N."""
    return c * math.factorial(N) * x / math.log(x) ** (N + 1)


# --- prime counting ------------------------------------------------------------------


def prime_sieve(x: int) -> np.ndarray:
    """Boolean array is_prime[0..x] by the sieve of Eratosthenes."""
    if not isinstance(x, (int, np.integer)) or not 2 <= x <= SIEVE_LIMIT:
        raise UsageError(f"x must be an integer in [2, {SIEVE_LIMIT}]")
    is_p = np.ones(int(x) + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(int(x)) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return is_p


def pi_count(x: int) -> int:
    return int(np.count_nonzero(prime_sieve(x)))
