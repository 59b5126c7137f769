"""Mean square of zeta on the critical line and candidate growth-exponent curves mu(sigma)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import NumericError, UsageError
from .special_fns import EULER_GAMMA, LOG_2PI
from .tabular import write_csv
from .zeta_eval import z_values

_GL_POINTS = 16


@dataclass(frozen=True)
class MomentRecord:
    T: float
    k: int
    integral: float
    main_term: float
    e_term: float
    halving_change: float  # relative change when the panels are halved


def p1(y: float) -> float:
    """y + 2 C0 - 1 - log(2 pi)."""
    return y + 2.0 * EULER_GAMMA - 1.0 - LOG_2PI


def _panel_edges(T: float, scale: float) -> np.ndarray:
    # Z^2 has local frequency log(t/2pi)/(2pi); panels cover at most half a period
    edges = [0.0]
    while edges[-1] < T:
        t = edges[-1]
        freq = max(math.log(max(t, 2 * math.pi) / (2 * math.pi)), 1.0) / (2 * math.pi)
        edges.append(min(T, t + scale * min(0.5, 0.5 / freq)))
    return np.asarray(edges)


def _mean_square(T: float, scale: float) -> float:
    edges = _panel_edges(T, scale)
    g, gw = leggauss(_GL_POINTS)
    half = 0.5 * np.diff(edges)
    t = (half[:, None] * g[None, :] + (0.5 * (edges[1:] + edges[:-1]))[:, None]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    z = z_values(t)
    return math.fsum(w * z * z)


def second_moment(T: float) -> MomentRecord:
    """int_0^T |zeta(1/2 + it)|^2 dt = int_0^T Z(t)^2 dt, by 16-point Gauss-Legendre
    panels no wider than half a period of Z^2 (at least 32 nodes per Z oscillation),
    checked against the same rule with panels halved."""
    if not 10.0 <= T <= 3000.0:
        raise UsageError("second_moment requires 10 <= T <= 3000")
    coarse = _mean_square(T, 1.0)
    fine = _mean_square(T, 0.5)
    change = abs(fine - coarse) / abs(fine)
    if change > 1e-6:
        raise NumericError("second moment quadrature not converged", change=change)
    main = T * p1(math.log(T))
    return MomentRecord(float(T), 1, fine, main, fine - main, change)


def export_moments_csv(records, path):
    return write_csv(path, ["T", "integral", "main_term", "e_term"],
                     [(r.T, r.integral, r.main_term, r.e_term) for r in records])


# --- mu(sigma) candidates ----------------------------------------------------------------


class MuVariant(str, enum.Enum):
    LINEAR_EARLY_ZERO = "linear_early_zero"
    LINEAR_KINKED = "linear_kinked"
    QUADRATIC = "quadratic"


_HALF = Fraction(1, 2)


def mu_curve(variant, sigma):
    """Piecewise mu(sigma).  Exact when sigma is a Fraction or int.

    linear_early_zero: 1/2 - s (s <= 1/4), 3/8 - s/2 (1/4 <= s < 3/4), 0 (s >= 3/4)
    linear_kinked:     1/2 - s (s <= 0), (2 - 3s)/4 (0 < s < 1/2), (1 - s)/4 (1/2 <= s <= 1), 0 (s > 1)
    quadratic:         1/2 - s (s <= 0), (1 - s)^2 / 2 (0 < s < 1), 0 (s >= 1)
    """
    v = MuVariant(variant)
    s = sigma
    if v is MuVariant.LINEAR_EARLY_ZERO:
        if s <= Fraction(1, 4):
            return _HALF - s
        if s < Fraction(3, 4):
            return Fraction(3, 8) - s / 2
        return 0 * s
    if v is MuVariant.LINEAR_KINKED:
        if s <= 0:
            return _HALF - s
        if s < _HALF:
            return (2 - 3 * s) / 4
        if s <= 1:
            return (1 - s) / 4
        return 0 * s
    if s <= 0:
        return _HALF - s
    if s < 1:
        return (1 - s) ** 2 / 2
    return 0 * s


@dataclass(frozen=True)
class MuCurve:
    variant: MuVariant

    def __call__(self, sigma):
        return mu_curve(self.variant, sigma)


@dataclass(frozen=True)
class ConvexityReport:
    variant: MuVariant
    value_at_half: Fraction
    convex: bool
    nonincreasing: bool
    functional_equation: bool
    min_second_difference: Fraction


def convexity_report(n: int = 1001, lo: Fraction = Fraction(-1, 2), hi: Fraction = Fraction(3, 2)):
    """Exact (Fraction) checks of each curve on an n-point grid of [lo, hi] for
    convexity and monotonicity, and of mu(s) - mu(1 - s) = 1/2 - s on the
    n-point grid of [0, 1]."""
    grid = [lo + (hi - lo) * Fraction(i, n - 1) for i in range(n)]
    unit = [Fraction(i, n - 1) for i in range(n)]
    out = []
    for v in MuVariant:
        mu = [mu_curve(v, s) for s in grid]
        second = [mu[i - 1] - 2 * mu[i] + mu[i + 1] for i in range(1, n - 1)]
        fe = all(mu_curve(v, s) - mu_curve(v, 1 - s) == _HALF - s for s in unit)
        out.append(ConvexityReport(
            variant=v,
            value_at_half=mu_curve(v, _HALF),
            convex=min(second) >= 0,
            nonincreasing=all(b <= a for a, b in zip(mu, mu[1:])),
            functional_equation=fe,
            min_second_difference=min(second),
        ))
    return out


def export_mu_csv(path, n: int = 1001):
    sig = [Fraction(i, n - 1) for i in range(n)]
    rows = [(float(s), *(float(mu_curve(v, s)) for v in MuVariant)) for s in sig]
    return write_csv(path, ["sigma", "mu_linear_early_zero", "mu_linear_kinked", "mu_quadratic"], rows)
