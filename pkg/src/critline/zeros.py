"""Zeros of Z(t): scanning, refinement, counting and Lehmer-type events."""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import RepositionError, UsageError
from .tabular import write_csv
from .zeta_eval import z_derivatives, z_values

RESIDUAL_TARGET = 1e-8
BRACKET_WIDTH = 5e-10
DEFAULT_LEHMER_THRESHOLD = 0.0005


class ScanWarning(UserWarning):
    pass


class ZeroMethod(str, enum.Enum):
    SIGN_CHANGE = "sign_change"
    EXTREMUM_TOUCH = "extremum_touch"


class LehmerKind(str, enum.Enum):
    NEG_LOCAL_MAX = "neg_local_max"
    POS_LOCAL_MIN = "pos_local_min"
    CLOSE_PAIR = "close_pair"


@dataclass(frozen=True)
class ZeroRecord:
    gamma: float
    residual: float
    bracket: tuple[float, float]
    method: ZeroMethod = ZeroMethod.SIGN_CHANGE


@dataclass(frozen=True)
class LehmerEvent:
    t_ext: float
    z_ext: float
    kind: LehmerKind
    gap_pair: tuple[float, float] | None
    closeness: float


@dataclass(frozen=True)
class CountSummary:
    T: float
    n_found: int
    main_term: float
    s_estimate: float


def mean_gap(t) -> np.ndarray:
    """Average spacing 2 pi / log(t / 2 pi) of the zeros near height t."""
    t = np.asarray(t, dtype=float)
    return 2.0 * np.pi / np.log(np.maximum(t, 2.0 * np.pi * math.e) / (2.0 * np.pi))


def riemann_von_mangoldt(T) -> np.ndarray:
    """Smooth part (T/2pi) log(T/2pi) - T/2pi + 7/8 of N(T)."""
    x = np.asarray(T, dtype=float) / (2.0 * np.pi)
    return x * np.log(x) - x + 0.875


def adaptive_grid(t_lo: float, t_hi: float, fraction: float = 0.2, cap: float = 0.25) -> np.ndarray:
    """Grid with local step min(cap, fraction * mean_gap(t))."""
    pts = [t_lo]
    t = t_lo
    while t < t_hi:
        t = t + min(cap, fraction * float(mean_gap(t)))
        pts.append(min(t, t_hi))
    return np.asarray(pts)


def sample_z(ts, threads: int = 1) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    if threads <= 1 or ts.size < 4096:
        return z_values(ts)
    chunks = np.array_split(ts, threads * 4)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(z_values, chunks))
    return np.concatenate(parts)


def refine_brackets(lo, hi, zlo=None, width: float = BRACKET_WIDTH):
    """Bisect many sign-change brackets at once, then take a final secant step.

    Returns (gamma, residual, lo, hi) arrays.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        empty = np.empty(0)
        return empty, empty, empty, empty
    zlo = z_values(lo) if zlo is None else np.array(zlo, dtype=float)
    zhi = z_values(hi)
    while np.max(hi - lo) > width:
        mid = 0.5 * (lo + hi)
        zm = z_values(mid)
        left = np.sign(zm) == np.sign(zlo)
        lo = np.where(left, mid, lo)
        zlo = np.where(left, zm, zlo)
        hi = np.where(left, hi, mid)
        zhi = np.where(left, zhi, zm)
    denom = zhi - zlo
    safe = denom != 0
    gamma = np.where(safe, lo - zlo * (hi - lo) / np.where(safe, denom, 1.0), 0.5 * (lo + hi))
    gamma = np.clip(gamma, lo, hi)
    residual = np.abs(z_values(gamma))
    return gamma, residual, lo, hi


def _scan(t_lo: float, t_hi: float, step=None, threads: int = 1) -> list[ZeroRecord]:
    if step is None or step == "adaptive":
        grid = adaptive_grid(t_lo, t_hi)
    else:
        step = float(step)
        if step <= 0:
            raise UsageError("scan step must be positive")
        n = max(1, int(math.ceil((t_hi - t_lo) / step)))
        grid = np.linspace(t_lo, t_hi, n + 1)
        if step > 0.5 * float(mean_gap(t_hi)):
            warnings.warn(
                f"step {step} exceeds half the mean zero gap at t={t_hi:g}; pairs of zeros may be missed",
                ScanWarning,
                stacklevel=3,
            )
    z = sample_z(grid, threads)
    records = []
    exact = np.flatnonzero(z == 0.0)
    for i in exact:
        records.append(ZeroRecord(float(grid[i]), 0.0, (float(grid[i]), float(grid[i])), ZeroMethod.SIGN_CHANGE))
    idx = np.flatnonzero(z[:-1] * z[1:] < 0)
    gamma, residual, lo, hi = refine_brackets(grid[idx], grid[idx + 1], z[idx])
    for g, r, a, b in zip(gamma, residual, lo, hi):
        records.append(ZeroRecord(float(g), float(r), (float(a), float(b)), ZeroMethod.SIGN_CHANGE))
    records.sort(key=lambda rec: rec.gamma)
    return records


def scan_zeros(t_lo: float, t_hi: float, step_policy="adaptive", threads: int = 1) -> list[ZeroRecord]:
    """Locate every sign change of Z on [t_lo, t_hi] and refine it.

    The grid is sampled with the Euler-Maclaurin oracle, each bracket is
    bisected to width <= 1e-9 and polished with one secant step.  With the
    adaptive policy the local step is a fifth of the mean zero gap (capped at
    0.25).  A :class:`ScanWarning` is issued if the number of zeros found
    disagrees with the Riemann-von Mangoldt increment by 3 or more.
    """
    if t_hi == t_lo:
        return []
    if not (10.0 <= t_lo < t_hi):
        raise UsageError(f"scan_zeros requires 10 <= t_lo < t_hi, got [{t_lo}, {t_hi}]")
    records = _scan(float(t_lo), float(t_hi), step_policy, threads)
    expected = float(riemann_von_mangoldt(t_hi) - riemann_von_mangoldt(t_lo))
    if abs(len(records) - expected) >= 3.0 and t_hi - t_lo > 10.0:
        warnings.warn(
            f"found {len(records)} zeros on [{t_lo}, {t_hi}], expected about {expected:.1f}",
            ScanWarning,
            stacklevel=2,
        )
    return records


def count_and_s(T: float, threads: int = 1) -> CountSummary:
    """N(T) by scanning (0, T] and S(T) estimated as N(T) minus its smooth part."""
    T = float(T)
    if T < 10.0:
        raise UsageError("count_and_s requires T >= 10")
    zT = float(z_values(T)[0])
    if abs(zT) < 1e-10:
        raise RepositionError(f"T = {T} is within 1e-10 of a zero of Z; move T slightly")
    # Z < 0 on (0, 14.13), so starting the scan at t = 1 misses nothing
    n_found = len(_scan(1.0, T, threads=threads))
    main = float(riemann_von_mangoldt(T))
    return CountSummary(T, n_found, main, n_found - main)


def _refine_extremum(t0: float, h: float) -> tuple[float, float]:
    """Newton on Z' near t0, falling back to the sampled vertex."""
    t = t0
    for _ in range(30):
        d1, d2 = z_derivatives(t, 1)[0], z_derivatives(t, 2)[0]
        if d2 == 0:
            break
        step = -d1 / d2
        if abs(step) > 2 * h:
            step = math.copysign(2 * h, step)
        t += step
        if abs(step) < 1e-13:
            break
    if abs(t - t0) > 4 * h:
        t = t0
    return float(t), float(z_values(t)[0])


def _extrema(grid: np.ndarray, z: np.ndarray):
    """Yield (index, kind) of discrete local extrema, kind = +1 for max, -1 for min."""
    inner = slice(1, -1)
    is_max = (z[inner] > z[:-2]) & (z[inner] >= z[2:])
    is_min = (z[inner] < z[:-2]) & (z[inner] <= z[2:])
    for i in np.flatnonzero(is_max) + 1:
        yield int(i), 1
    for i in np.flatnonzero(is_min) + 1:
        yield int(i), -1


def lehmer_scan(t_lo: float, t_hi: float, threshold: float = DEFAULT_LEHMER_THRESHOLD,
                step: float = 0.005, threads: int = 1) -> list[LehmerEvent]:
    """Close zero pairs and sign-preserving extrema of Z on [t_lo, t_hi].

    A close pair is consecutive zeros whose midpoint satisfies |Z| < threshold.
    A sign-preserving extremum is a negative local maximum or a positive local
    minimum; each discrete extremum on the grid is located with a 5-point
    quadratic fit and polished by Newton on Z'.  Below t = 10 the oracle is
    used as everywhere else, so t_lo may go down to 0.
    """
    if t_hi == t_lo:
        return []
    if not (0.0 < t_lo < t_hi):
        raise UsageError("lehmer_scan requires 0 < t_lo < t_hi")
    n = max(4, int(math.ceil((t_hi - t_lo) / step)))
    grid = np.linspace(t_lo, t_hi, n + 1)
    z = sample_z(grid, threads)
    h = grid[1] - grid[0]
    events: list[LehmerEvent] = []

    for i, sign in _extrema(grid, z):
        if sign * z[i] > 0:
            continue  # ordinary extremum (positive max / negative min)
        j0, j1 = max(0, i - 2), min(len(grid), i + 3)
        a, b, _ = np.polyfit(grid[j0:j1] - grid[i], z[j0:j1], 2)
        vertex = grid[i] - b / (2 * a) if a != 0 else grid[i]
        t_ext, z_ext = _refine_extremum(float(vertex), h)
        curv = float(z_derivatives(t_ext, 2)[0])
        if sign > 0 and z_ext < 0 and curv < 0:
            kind = LehmerKind.NEG_LOCAL_MAX
        elif sign < 0 and z_ext > 0 and curv > 0:
            kind = LehmerKind.POS_LOCAL_MIN
        else:
            continue
        events.append(LehmerEvent(t_ext, z_ext, kind, None, abs(z_ext)))

    idx = np.flatnonzero(z[:-1] * z[1:] < 0)
    gammas, _, _, _ = refine_brackets(grid[idx], grid[idx + 1], z[idx])
    if gammas.size >= 2:
        mids = 0.5 * (gammas[:-1] + gammas[1:])
        zm = z_values(mids)
        for k in np.flatnonzero(np.abs(zm) < threshold):
            events.append(
                LehmerEvent(float(mids[k]), float(zm[k]), LehmerKind.CLOSE_PAIR,
                            (float(gammas[k]), float(gammas[k + 1])), float(abs(zm[k])))
            )
    events.sort(key=lambda e: e.t_ext)
    return events


@dataclass
class MonotonicityInterval:
    lo: float
    hi: float
    n_samples: int
    max_derivative: float
    violations: list[float] = field(default_factory=list)


@dataclass
class MonotonicityReport:
    t_lo: float
    t_hi: float
    zeros: list[float]
    intervals: list[MonotonicityInterval]
    tolerance: float
    diagnostics: list[str] = field(default_factory=list)

    @property
    def n_violations(self) -> int:
        return sum(len(iv.violations) for iv in self.intervals)


def log_derivative_slope(t) -> np.ndarray:
    """(Z'/Z)' = (Z'' Z - Z'^2) / Z^2 via Cauchy-integral derivatives."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    z0 = z_values(t)
    z1 = z_derivatives(t, 1)
    z2 = z_derivatives(t, 2)
    return (z2 * z0 - z1 * z1) / (z0 * z0), z0


def monotonicity_check(t_lo: float, t_hi: float, step: float = 0.01, tol: float = 1e-6) -> MonotonicityReport:
    """Check that Z'/Z decreases between consecutive zeros of Z.

    The range is split at the zeros of Z; in each piece (Z'/Z)' is sampled on
    a grid of the given step.  Samples with |Z| < 1e-8 are dropped (the
    quotient is then dominated by rounding) and a diagnostic is recorded.
    """
    if not 0 < t_lo < t_hi:
        raise UsageError("monotonicity_check requires 0 < t_lo < t_hi")
    z_ends = z_values([t_lo, t_hi])
    if np.any(np.abs(z_ends) < 1e-8):
        raise RepositionError("range endpoints must not be zeros of Z")
    zeros = [r.gamma for r in _scan(t_lo, t_hi)]
    edges = [t_lo] + zeros + [t_hi]
    intervals = []
    diagnostics = []
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(3, int(math.ceil((b - a) / step)))
        ts = np.linspace(a, b, n + 1)[1:-1]
        q, z0 = log_derivative_slope(ts)
        keep = np.abs(z0) >= 1e-8
        if not keep.all():
            diagnostics.append(f"[{a:.6f}, {b:.6f}]: {int((~keep).sum())} samples next to a zero dropped")
        q, ts = q[keep], ts[keep]
        bad = ts[q >= tol]
        intervals.append(
            MonotonicityInterval(float(a), float(b), int(ts.size),
                                 float(q.max()) if q.size else float("nan"), [float(x) for x in bad])
        )
    return MonotonicityReport(float(t_lo), float(t_hi), zeros, intervals, tol, diagnostics)


def export_zeros_csv(records: list[ZeroRecord], path):
    return write_csv(
        path,
        ["gamma", "residual", "bracket_lo", "bracket_hi"],
        [(r.gamma, r.residual, r.bracket[0], r.bracket[1]) for r in records],
    )
