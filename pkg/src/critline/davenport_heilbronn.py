"""The Davenport-Heilbronn function and its zeros on and off the critical line.

f(s) = 5^-s (zeta(s,1/5) + tan(theta) zeta(s,2/5) - tan(theta) zeta(s,3/5) - zeta(s,4/5))

satisfies f(s) = X(s) f(1-s) but has zeros with real part != 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericError, UsageError
from .special_fns import LOG_2PI, _log_sin_pi_upper, log_gamma
from .tabular import write_csv
from .zeta_eval import hurwitz_combination

LOG_5 = math.log(5.0)
ON_LINE_TOL = 1e-9
RESIDUAL_TARGET = 1e-8


@dataclass(frozen=True)
class DHConstants:
    theta_dh: float
    tan_theta: float

    def __post_init__(self):
        if abs(math.tan(self.theta_dh) - self.tan_theta) > 1e-14:
            raise NumericError("tan(theta) inconsistent with theta")


def _constants() -> DHConstants:
    r5 = math.sqrt(5.0)
    tan_theta = (math.sqrt(10.0 - 2.0 * r5) - 2.0) / (r5 - 1.0)
    return DHConstants(theta_dh=math.atan(tan_theta), tan_theta=tan_theta)


CONSTANTS = _constants()
_WEIGHTS = (1.0, CONSTANTS.tan_theta, -CONSTANTS.tan_theta, -1.0)
_SHIFTS = (0.2, 0.4, 0.6, 0.8)


@dataclass(frozen=True)
class StripZero:
    position: complex
    residual: float
    on_line: bool

    @property
    def beta(self) -> float:
        return self.position.real

    @property
    def gamma(self) -> float:
        return self.position.imag


def dh_values(s) -> np.ndarray:
    """Vectorised f(s).  The Hurwitz poles cancel (weights sum to zero), so
    s = 1 is a regular point."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    return np.exp(-s_arr * LOG_5) * hurwitz_combination(s_arr, _WEIGHTS, _SHIFTS)


def dh_f(s: complex) -> complex:
    return complex(dh_values(s)[0])


def dirichlet_coefficient(n: int) -> float:
    """a_n of f(s) = sum a_n n^-s: period 5 pattern 1, tan, -tan, -1, 0."""
    return (0.0, 1.0, CONSTANTS.tan_theta, -CONSTANTS.tan_theta, -1.0)[n % 5]


def log_x_factor(s) -> np.ndarray:
    """log X(s) with X(s) = 2 Gamma(1-s) cos(pi s/2) / (5^(s-1/2) (2 pi)^(1-s)).

    Continuous in Im s on each half plane; cos(pi s/2) = sin(pi (s+1)/2).
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    bad = (s_arr.imag == 0) & (s_arr.real >= 1) & (s_arr.real == np.round(s_arr.real))
    if bad.any():
        raise DomainError(f"X(s) is evaluated at a Gamma pole s = {s_arr[bad][0].real:g}")
    z = (s_arr + 1.0) / 2.0
    flip = z.imag < 0
    zu = np.where(flip, np.conj(z), z)
    lcos = _log_sin_pi_upper(zu)
    lcos = np.where(flip, np.conj(lcos), lcos)
    return math.log(2.0) + log_gamma(1.0 - s_arr) + lcos - (s_arr - 0.5) * LOG_5 - (1.0 - s_arr) * LOG_2PI


def x_factor(s) -> np.ndarray:
    return np.exp(log_x_factor(s))


def dh_functional_residual(s: complex) -> float:
    """|f(s) - X(s) f(1-s)| / |f(s)|."""
    s = complex(s)
    fs = dh_f(s)
    rhs = complex(x_factor(s)[0]) * dh_f(1.0 - s)
    return abs(fs - rhs) / max(abs(fs), 1e-300)


def z_f_values(t, imag_tol: float = 1e-9) -> np.ndarray:
    """Real rotation Z_f(t) = X^(-1/2)(1/2+it) f(1/2+it), continuous branch."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    s = 0.5 + 1j * t_arr
    rot = np.exp(-0.5j * log_x_factor(s).imag)
    val = rot * dh_values(s)
    worst = float(np.max(np.abs(val.imag))) if val.size else 0.0
    if worst > imag_tol:
        raise NumericError(f"Z_f has imaginary residue {worst:.3e}", imag=worst)
    return val.real


def _line_gap(t) -> np.ndarray:
    # mean spacing of critical-line zeros for conductor 5
    return 2.0 * np.pi / np.log(np.maximum(5.0 * np.asarray(t) / (2.0 * np.pi), math.e))


def dh_line_scan(t_lo: float, t_hi: float) -> list[StripZero]:
    """Sign changes of Z_f on [t_lo, t_hi], bisected to width 1e-9."""
    if not 10.0 <= t_lo < t_hi <= 500.0:
        raise UsageError("dh_line_scan requires 10 <= t_lo < t_hi <= 500")
    pts = [t_lo]
    while pts[-1] < t_hi:
        pts.append(min(t_hi, pts[-1] + min(0.2, 0.2 * float(_line_gap(pts[-1])))))
    grid = np.asarray(pts)
    z = z_f_values(grid)
    idx = np.flatnonzero(z[:-1] * z[1:] < 0)
    lo, hi, zlo = grid[idx], grid[idx + 1], z[idx]
    while lo.size and np.max(hi - lo) > 5e-10:
        mid = 0.5 * (lo + hi)
        zm = z_f_values(mid)
        left = np.sign(zm) == np.sign(zlo)
        lo = np.where(left, mid, lo)
        zlo = np.where(left, zm, zlo)
        hi = np.where(left, hi, mid)
    gam = 0.5 * (lo + hi)
    res = np.abs(dh_values(0.5 + 1j * gam)) if gam.size else np.empty(0)
    return [StripZero(complex(0.5, float(g)), float(r), True) for g, r in zip(gam, res)]


# --- argument principle ----------------------------------------------------------


@dataclass
class Cell:
    sigma_lo: float
    sigma_hi: float
    t_lo: float
    t_hi: float
    winding: int = 0
    zeros: list[StripZero] = field(default_factory=list)

    def contains(self, s: complex, margin: float = 0.0) -> bool:
        return (self.sigma_lo - margin <= s.real <= self.sigma_hi + margin
                and self.t_lo - margin <= s.imag <= self.t_hi + margin)


@dataclass
class SearchReport:
    rect: tuple[float, float, float, float]
    zeros: list[StripZero]
    cells: list[Cell]
    diagnostics: list[str] = field(default_factory=list)


def _boundary(c: Cell, spacing: float) -> np.ndarray:
    corners = [complex(c.sigma_lo, c.t_lo), complex(c.sigma_hi, c.t_lo),
               complex(c.sigma_hi, c.t_hi), complex(c.sigma_lo, c.t_hi)]
    pts = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        n = max(4, int(math.ceil(abs(b - a) / spacing)))
        pts.append(a + (b - a) * np.arange(n) / n)
    pts = np.concatenate(pts)
    return np.append(pts, pts[0])


def winding_number(c: Cell, spacing: float = 0.02, max_points: int = 200_000):
    """Winding of f around the cell boundary and min |f| on it.

    Segments whose phase increment exceeds pi/6 are bisected until none
    does; the count is then confirmed by one further uniform refinement.
    """
    pts = _boundary(c, spacing)
    vals = dh_values(pts)
    for _ in range(60):
        dphi = np.angle(vals[1:] / vals[:-1])
        coarse = np.abs(dphi) > math.pi / 6
        if not coarse.any():
            break
        if pts.size > max_points:
            raise NumericError("contour resolution limit reached", cell=c)
        mids = 0.5 * (pts[:-1][coarse] + pts[1:][coarse])
        mvals = dh_values(mids)
        pts = np.insert(pts, np.flatnonzero(coarse) + 1, mids)
        vals = np.insert(vals, np.flatnonzero(coarse) + 1, mvals)
    total = float(np.sum(np.angle(vals[1:] / vals[:-1])))
    w = total / (2.0 * math.pi)
    # confirm with every segment halved
    mids = 0.5 * (pts[:-1] + pts[1:])
    fine_vals = np.empty(2 * vals.size - 1, dtype=complex)
    fine_vals[0::2] = vals
    fine_vals[1::2] = dh_values(mids)
    w_fine = float(np.sum(np.angle(fine_vals[1:] / fine_vals[:-1]))) / (2.0 * math.pi)
    if abs(w - round(w)) > 1e-3 or round(w) != round(w_fine):
        raise NumericError("winding number not resolved", winding=w, refined=w_fine)
    return int(round(w)), float(np.min(np.abs(fine_vals)))


def _newton(s0: complex, radius: float = 1.0, h: float = 1e-5, iters: int = 60) -> complex:
    # returns nan once the iterate leaves the disc |s - s0| <= radius
    s = s0
    for _ in range(iters):
        if not np.isfinite(s) or abs(s - s0) > radius:
            return complex(math.nan, math.nan)
        f0, fp, fm = dh_values([s, s + h, s - h])
        d = (fp - fm) / (2 * h)
        if d == 0:
            break
        step = f0 / d
        s = s - step
        if abs(step) < 1e-15 * max(1.0, abs(s)):
            break
    return s


def _split(c: Cell) -> tuple[Cell, Cell]:
    if (c.t_hi - c.t_lo) >= (c.sigma_hi - c.sigma_lo):
        m = 0.5 * (c.t_lo + c.t_hi)
        return Cell(c.sigma_lo, c.sigma_hi, c.t_lo, m), Cell(c.sigma_lo, c.sigma_hi, m, c.t_hi)
    m = 0.5 * (c.sigma_lo + c.sigma_hi)
    return Cell(c.sigma_lo, m, c.t_lo, c.t_hi), Cell(m, c.sigma_hi, c.t_lo, c.t_hi)


def _jitter(c: Cell, amount: float) -> Cell:
    return Cell(c.sigma_lo - amount, c.sigma_hi + amount, c.t_lo - amount, c.t_hi + amount)


def search_rectangle(rect, boundary_floor: float = 1e-6, max_depth: int = 40) -> SearchReport:
    """Argument-principle search for the zeros of f in a rectangle.

    Cells with winding >= 2 (or where Newton fails to stay inside) are
    bisected along their longer side.  A boundary passing too close to a
    zero is nudged outwards and the event recorded in the diagnostics.
    """
    sigma_lo, sigma_hi, t_lo, t_hi = map(float, rect)
    if t_lo == t_hi or sigma_lo == sigma_hi:
        return SearchReport((sigma_lo, sigma_hi, t_lo, t_hi), [], [])
    if not (0.0 < sigma_lo < sigma_hi < 1.0 and t_lo < t_hi and max(abs(t_lo), abs(t_hi)) <= 500.0):
        raise UsageError("rectangle must satisfy 0 < sigma_lo < sigma_hi < 1, t_lo < t_hi, |t| <= 500")
    diagnostics: list[str] = []
    done: list[Cell] = []
    stack = [(Cell(sigma_lo, sigma_hi, t_lo, t_hi), 0)]
    root_cell = True
    while stack:
        cell, depth = stack.pop()
        spacing = min(0.02, 0.1 * min(cell.sigma_hi - cell.sigma_lo, cell.t_hi - cell.t_lo))
        w, fmin = winding_number(cell, spacing)
        nudges = 0
        while fmin < boundary_floor and nudges < 5:
            nudges += 1
            amount = 1e-4 * nudges
            diagnostics.append(f"boundary of {cell} within {fmin:.2e} of a zero; nudged by {amount:g}")
            cell = _jitter(cell, amount) if root_cell else cell
            if not root_cell:
                # interior split lines: shift the cell edges by a small fraction instead
                cell = Cell(cell.sigma_lo, cell.sigma_hi, cell.t_lo + amount, cell.t_hi + amount)
            w, fmin = winding_number(cell, spacing)
        root_cell = False
        cell.winding = w
        if w == 0:
            done.append(cell)
            continue
        if w == 1:
            centre = complex(0.5 * (cell.sigma_lo + cell.sigma_hi), 0.5 * (cell.t_lo + cell.t_hi))
            diam = abs(complex(cell.sigma_hi - cell.sigma_lo, cell.t_hi - cell.t_lo))
            s = _newton(centre, radius=2.0 * diam)
            res = abs(dh_f(s)) if np.isfinite(s) else math.inf
            if cell.contains(s) and res <= RESIDUAL_TARGET:
                s = complex(s)
                cell.zeros.append(StripZero(s, float(res), bool(abs(s.real - 0.5) < ON_LINE_TOL)))
                done.append(cell)
                continue
        if depth >= max_depth:
            raise NumericError("subdivision depth exceeded", cell=cell, winding=w)
        a, b = _split(cell)
        stack.extend([(b, depth + 1), (a, depth + 1)])
    zeros = sorted((z for c in done for z in c.zeros), key=lambda z: (z.gamma, z.beta))
    return SearchReport((sigma_lo, sigma_hi, t_lo, t_hi), zeros, done, diagnostics)


def dh_zero_search(rect) -> list[StripZero]:
    """Zeros of f in (sigma_lo, sigma_hi, t_lo, t_hi), each refined to |f| <= 1e-8."""
    return search_rectangle(rect).zeros


def export_strip_zeros_csv(zeros: list[StripZero], path):
    return write_csv(path, ["beta", "gamma", "residual", "on_line"],
                     [(z.beta, z.gamma, z.residual, z.on_line) for z in zeros])
