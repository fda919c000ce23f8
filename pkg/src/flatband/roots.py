"""Bracketing and refinement of roots of (vectorized) real functions."""
from __future__ import annotations

from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .potentials import AccumulationPoint

N_UNIFORM = 2048
N_EDGE = 96
# grid points per pi of interior phase near an accumulation point
PHASE_SAMPLES = 16


def scan_grid(
    lo: float,
    hi: float,
    accumulation: Optional[AccumulationPoint] = None,
    n_max: int = 20,
    n_uniform: int = N_UNIFORM,
) -> np.ndarray:
    """Sample points for the open interval ``[lo, hi]``.

    Combines a uniform grid, geometric refinement toward both ends (shallow
    levels hug band edges) and, when one end is an accumulation point, a grid
    uniform in ``1/sqrt(|E - E*|)``. The interior phase grows linearly in
    that variable, so the last grid resolves every level up to ``n_max``.
    """
    length = hi - lo
    pts = [np.linspace(lo, hi, n_uniform)]
    d = np.geomspace(1e-9 * max(length, 1e-300), 0.5 * length, N_EDGE)
    pts += [lo + d, hi - d]
    if accumulation is not None and accumulation.strength > 0:
        e_star = accumulation.energy
        scale = accumulation.width * np.sqrt(accumulation.strength)  # phase = scale * u
        u_max = (n_max + 4) * np.pi / scale
        du = np.pi / (PHASE_SAMPLES * scale)
        u_min = 1.0 / np.sqrt(length)
        if u_max > u_min:
            u = np.arange(u_min, u_max + du, du)
            pts.append(e_star + accumulation.side / (u * u))
    grid = np.unique(np.concatenate(pts))
    return grid[(grid >= lo) & (grid <= hi)]


def _split_dips(f: Callable, grid: np.ndarray, vals: np.ndarray, ok: np.ndarray):
    """Brackets hidden inside a dip of ``|f|`` that does not change sign.

    Two close roots (a near-degenerate doublet) inside one grid cell leave
    the sampled signs unchanged; minimizing ``|f|`` over the dip exposes them.
    """
    out = []
    scalar = lambda x: float(f(np.asarray(x)))  # noqa: E731
    for i in range(1, len(grid) - 1):
        if not (ok[i - 1] and ok[i] and ok[i + 1]):
            continue
        a, b, c = vals[i - 1], vals[i], vals[i + 1]
        if a * b <= 0 or b * c <= 0 or not (abs(b) < abs(a) and abs(b) < abs(c)):
            continue
        sgn = np.sign(b)
        res = minimize_scalar(lambda x: sgn * scalar(x), bounds=(grid[i - 1], grid[i + 1]),
                              method="bounded", options={"xatol": 1e-15 * max(1.0, abs(grid[i]))})
        if res.success and sgn * scalar(res.x) < 0:
            out += [(grid[i - 1], res.x), (res.x, grid[i + 1])]
    return out


def bracket_sign_changes(f: Callable, grid: np.ndarray):
    """Adjacent grid pairs where ``f`` changes sign, plus exact grid zeros and
    pairs of brackets split out of sign-preserving dips."""
    with np.errstate(all="ignore"):
        vals = np.asarray(f(grid), dtype=float)
    ok = np.isfinite(vals)
    brackets, exact = [], []
    for i in range(len(grid) - 1):
        if not (ok[i] and ok[i + 1]):
            continue
        if vals[i] == 0.0:
            exact.append(grid[i])
        elif vals[i] * vals[i + 1] < 0:
            brackets.append((grid[i], grid[i + 1]))
    if ok[-1] and vals[-1] == 0.0:
        exact.append(grid[-1])
    with np.errstate(all="ignore"):
        brackets += _split_dips(f, grid, vals, ok)
    return brackets, exact


def find_roots(f: Callable, grid: np.ndarray, tol: float) -> list[float]:
    brackets, exact = bracket_sign_changes(f, grid)
    scalar = lambda x: float(f(np.asarray(x)))  # noqa: E731
    found = [brentq(scalar, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
             for a, b in brackets if scalar(a) * scalar(b) < 0]
    return sorted(found + exact)


def dedupe(values, tol: float) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or abs(v - out[-1]) > tol:
            out.append(v)
    return out
