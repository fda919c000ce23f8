"""Integral-equation oracle for potentials acting on ``psi2`` only.

With ``V11 = V33 = 0`` the second component satisfies

    psi2(x) = (lam / 2E) * int exp(-lam |x - y|) V22(y) psi2(y) dy,

``lam = sqrt(m^2 - E^2)``. Discretizing on Gauss-Legendre nodes turns the
bound-state condition into ``det(I - K_N) = 0``. The kernel has a kink at
``y = x``; subtracting ``psi2(x)`` inside the integral and adding back the
exact row integral restores spectral convergence.
"""
from __future__ import annotations

import numpy as np

from . import roots as _roots
from .exceptions import DomainError, SingularEnergyError
from .model import ModelParams
from .potentials import AccumulationPoint, Delta, Potential, segments_of

SINGULAR_TOL = 1e-12


def _support(p: Potential):
    segs = [s for s in segments_of(p) if s.v22 != 0]
    for s in segments_of(p):
        if s.v11 != 0 or s.v33 != 0:
            raise DomainError("integral form needs V11 = V33 = 0")
    return segs


def _check(params: ModelParams, E: float):
    if not abs(E) < params.m:
        raise DomainError(f"E={E} outside the gap")
    if abs(E) < SINGULAR_TOL * params.m:
        raise SingularEnergyError("the kernel diverges at E = 0")


def _row_integral(x, xl, xr, lam):
    """``int_{xl}^{xr} exp(-lam |x - y|) dy`` for each ``x``."""
    inside = (2 - np.exp(-lam * (x - xl)) - np.exp(-lam * (xr - x))) / lam
    left = (np.exp(-lam * (xl - x)) - np.exp(-lam * (xr - x))) / lam
    right = (np.exp(-lam * (x - xr)) - np.exp(-lam * (x - xl))) / lam
    return np.where(x < xl, left, np.where(x > xr, right, inside))


def nystrom_nodes(p: Potential, n_nodes: int):
    """Gauss-Legendre nodes, weights and ``V22`` values over the support.

    Nodes are shared among segments in proportion to their widths.
    """
    segs = _support(p)
    total = sum(s.width for s in segs)
    xs, ws, vs = [], [], []
    for s in segs:
        n = max(8, int(round(n_nodes * s.width / total)))
        t, w = np.polynomial.legendre.leggauss(n)
        half = s.width / 2
        xs.append(0.5 * (s.x_left + s.x_right) + half * t)
        ws.append(half * w)
        vs.append(np.full(n, s.v22))
    return np.concatenate(xs), np.concatenate(ws), np.concatenate(vs), segs


def nystrom_matrix(params: ModelParams, p: Potential, E: float, n_nodes: int = 200) -> np.ndarray:
    """``I - K_N`` with singularity subtraction on the diagonal."""
    _check(params, E)
    m = params.m
    lam = np.sqrt(m * m - E * E)
    x, w, v, segs = nystrom_nodes(p, n_nodes)
    K = (lam / (2 * E)) * np.exp(-lam * np.abs(x[:, None] - x[None, :])) * (w * v)[None, :]
    np.fill_diagonal(K, 0.0)
    row = sum((lam / (2 * E)) * s.v22 * _row_integral(x, s.x_left, s.x_right, lam) for s in segs)
    K[np.diag_indices_from(K)] = row - K.sum(axis=1)
    return np.eye(len(x)) - K


def nystrom_characteristic(params: ModelParams, p: Potential, E: float, n_nodes: int = 200) -> float:
    """``det(I - K_N)`` at energy ``E``; zero at a bound state.

    A point term ``g delta(x)`` is a rank-one kernel, giving exactly
    ``1 - g lam / (2E)``.
    """
    _check(params, E)
    if isinstance(p, Delta):
        lam = np.sqrt(params.m**2 - E * E)
        return float(1 - p.g * lam / (2 * E))
    sign, logdet = np.linalg.slogdet(nystrom_matrix(params, p, E, n_nodes))
    # keep the sign, compress the magnitude so brackets stay finite
    return float(sign * np.log1p(np.exp(min(logdet, 700.0))))


def nystrom_roots(params: ModelParams, p: Potential, n_nodes: int = 200, n_max: int = 20,
                  tol: float = 1e-13, window: tuple | None = None) -> list[float]:
    """Zeros of ``det(I - K_N)`` in the gap, scanning both signs of ``E``.

    ``window = (lo, hi)`` restricts the scan to part of the gap.
    """
    m = params.m
    if isinstance(p, Delta):
        strength, width = abs(p.g), 1.0
        has = [p.g]
    else:
        segs = _support(p)
        width = max(s.x_right for s in segs) - min(s.x_left for s in segs)
        strength = max(abs(s.v22) for s in segs)
        has = [s.v22 for s in segs]

    def f(E):
        E = np.atleast_1d(E)
        out = np.array([nystrom_characteristic(params, p, float(e), n_nodes) for e in E])
        return out if out.size > 1 else out[0]

    found = []
    edge = m * (1 - 1e-9)
    for lo, hi, side in ((-edge, -1e-9 * m, -1), (1e-9 * m, edge, 1)):
        if not any(np.sign(v) == side for v in has):
            continue  # repulsive effective potential on this side
        if window is not None:
            lo, hi = max(lo, window[0]), min(hi, window[1])
            if lo >= hi:
                continue
        # near E = 0: lam^2 V / E -> k^2 ~ m^2 V / E, accumulation strength m^2 |V|
        ap = AccumulationPoint(0.0, side, m * m * strength, width)
        if window is not None and min(abs(lo), abs(hi)) > 1e-9 * m * 2:
            ap = None
        grid = _roots.scan_grid(lo, hi, accumulation=ap, n_max=n_max, n_uniform=512)
        found += _roots.find_roots(f, grid, tol)
    return _roots.dedupe(found, 10 * tol)


def nystrom_refine(params: ModelParams, p: Potential, E0: float, n_nodes: int,
                   rel: float = 1e-4, tol: float = 1e-14) -> float:
    """Zero of ``det(I - K_N)`` inside ``E0 * (1 +/- rel)``."""
    lo, hi = sorted((E0 * (1 - rel), E0 * (1 + rel)))
    grid = np.linspace(lo, hi, 9)
    f = lambda E: np.array([nystrom_characteristic(params, p, float(e), n_nodes)  # noqa: E731
                            for e in np.atleast_1d(E)])
    found = _roots.find_roots(lambda E: f(E) if np.ndim(E) else float(f(E)[0]), grid, tol)
    if not found:
        raise DomainError(f"no sign change of det(I - K) near E={E0}")
    return min(found, key=lambda r: abs(r - E0))
