"""Interface-matching solver for arbitrary piecewise-constant potentials.

Inside every constant segment the second component obeys
``psi2'' + k^2 psi2 = 0`` with

    k^2 = 2 (E - v22)(E - m - v11)(E + m - v33) / (2E - v11 - v33),

and across interfaces ``psi2`` and ``Q = psi2' * q`` are continuous, where
``q = 1/(E - m - v11) + 1/(E + m - v33)``. A point term ``g delta(x - x0)``
in ``V22`` makes ``Q`` jump by ``2 g psi2(x0)``. The unknowns (two per
segment plus one decaying amplitude on each side) form a real linear system
whose determinant vanishes at bound-state energies.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from . import roots as _roots
from .exceptions import DomainError, SingularEnergyError
from .model import SQRT2, ModelParams
from .potentials import (
    ROOT_EXCLUSION,
    Delta,
    Potential,
    Segment,
    accumulation_points,
    as_single_well,
    k_squared,
    segments_of,
    singular_energies,
)
from .spectrum import BoundState, SpectrumTable

ZERO_GRID = 4096
_FLAT_KSQ = 1e-14


@dataclass(frozen=True)
class SegmentSolution:
    """Local solution on one constant segment.

    ``amplitudes`` refer to the basis ``cos, sin`` of ``k (x - center)`` when
    oscillatory, or ``exp(kappa (x - x_r)), exp(-kappa (x - x_l))`` when
    evanescent (both bounded by one inside the segment).
    """

    x_left: float
    x_right: float
    k_squared: float
    v11: float
    v22: float
    v33: float
    amplitudes: tuple = (0.0, 0.0)

    @property
    def oscillatory(self) -> bool:
        return self.k_squared > 0

    @property
    def center(self) -> float:
        return 0.5 * (self.x_left + self.x_right)

    def basis(self, x):
        """Basis values and derivatives, each of shape ``(2, len(x))``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        ksq = self.k_squared
        if abs(ksq) < _FLAT_KSQ:
            t = x - self.center
            return np.array([np.ones_like(t), t]), np.array([np.zeros_like(t), np.ones_like(t)])
        k = np.sqrt(abs(ksq))
        if ksq > 0:
            t = k * (x - self.center)
            c, s = np.cos(t), np.sin(t)
            return np.array([c, s]), np.array([-k * s, k * c])
        # clamp exponents at zero so nothing overflows outside the segment either
        up = np.exp(np.minimum(k * (x - self.x_right), 0.0))
        down = np.exp(np.minimum(-k * (x - self.x_left), 0.0))
        return np.array([up, down]), np.array([k * up, -k * down])

    def ab_amplitudes(self) -> tuple:
        """Amplitudes of ``exp(+ikx'), exp(-ikx')`` with ``x' = x - center``."""
        al, be = self.amplitudes
        if self.k_squared > 0:
            return (al - 1j * be) / 2, (al + 1j * be) / 2
        half = np.exp(-np.sqrt(-self.k_squared) * (self.x_right - self.x_left) / 2)
        # exp(ik x') = exp(-kappa x') for k = i kappa
        return be * half, al * half


@dataclass(frozen=True)
class MatchingSystem:
    """Row-scaled matching matrix at energy ``E``.

    Columns: left decay amplitude, two per segment, right decay amplitude.
    """

    energy: float
    matrix: np.ndarray
    segments: tuple
    interfaces: tuple
    decay: float

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.matrix))


def _layout(p: Potential):
    """Ordered segments (gaps filled with zero potential) and interface list.

    Interfaces are ``(x, g)`` with ``g`` the point strength sitting there.
    """
    if isinstance(p, Delta):
        return [], [(p.x0, p.g)]
    segs = segments_of(p)
    filled: list[Segment] = []
    for s in segs:
        if filled and s.x_left > filled[-1].x_right:
            filled.append(Segment(filled[-1].x_right, s.x_left, 0.0, 0.0, 0.0))
        filled.append(s)
    if not filled:
        return [], []
    xs = [filled[0].x_left] + [s.x_right for s in filled]
    return filled, [(x, 0.0) for x in xs]


def _q(m, E, v11, v33):
    return 1.0 / (E - m - v11) + 1.0 / (E + m - v33)


def _check_energy(params: ModelParams, p: Potential, E: float):
    m = params.m
    if not abs(E) < m:
        raise DomainError(f"E={E} outside the gap")
    sing = singular_energies(p, params)
    if any(abs(E - s) <= ROOT_EXCLUSION * m for s in sing.points):
        raise SingularEnergyError(f"E={E} is a singular energy")


def matching_conditions(params: ModelParams, p: Potential, E: float, check: bool = True) -> MatchingSystem:
    """Build the matching system at ``E``; rows are scaled to unit max entry."""
    if check:
        _check_energy(params, p, E)
    m = params.m
    lam = np.sqrt(m * m - E * E)
    segs, ifaces = _layout(p)
    sols = tuple(SegmentSolution(s.x_left, s.x_right, k_squared(params, E, s.v11, s.v22, s.v33),
                                 s.v11, s.v22, s.v33) for s in segs)
    n = 2 * len(sols) + 2
    M = np.zeros((n, n))
    q_out = _q(m, E, 0.0, 0.0)
    for i, (x, g) in enumerate(ifaces):
        r0, r1 = 2 * i, 2 * i + 1
        # left side of the interface
        if i == 0:
            cols, val, der, ql = [0], np.array([1.0]), np.array([lam]), q_out
        else:
            s = sols[i - 1]
            b, db = s.basis(x)
            cols, val, der, ql = [2 * i - 1, 2 * i], b[:, 0], db[:, 0], _q(m, E, s.v11, s.v33)
        M[r0, cols] += val
        M[r1, cols] += ql * der + 2 * g * val
        # right side
        if i == len(ifaces) - 1:
            cols, val, der, qr = [n - 1], np.array([1.0]), np.array([-lam]), q_out
        else:
            s = sols[i]
            b, db = s.basis(x)
            cols, val, der, qr = [2 * i + 1, 2 * i + 2], b[:, 0], db[:, 0], _q(m, E, s.v11, s.v33)
        M[r0, cols] -= val
        M[r1, cols] -= qr * der
    scale = np.max(np.abs(M), axis=1)
    scale[scale == 0] = 1.0
    return MatchingSystem(float(E), M / scale[:, None], sols, tuple(ifaces), float(lam))


def determinant_scan(params: ModelParams, p: Potential, E_grid) -> list[tuple[float, float]]:
    """Scaled matching determinant on each energy of ``E_grid``."""
    return [(float(E), matching_conditions(params, p, float(E)).determinant) for E in E_grid]


def _det_function(params, p):
    def f(E):
        E = np.atleast_1d(E)
        out = np.array([matching_conditions(params, p, float(e), check=False).determinant for e in E])
        return out if out.size > 1 else out[0]

    return f


def null_vector(system: MatchingSystem, iterations: int = 3) -> np.ndarray:
    """Approximate null vector by inverse iteration on the scaled matrix.

    Iterates with ``(M^T M)^{-1}`` rather than ``M^{-1}``: at a root the
    matching matrix can be defective (the delta case is nilpotent), where
    plain inverse iteration stalls. Falls back to the smallest right singular vector when the factorization
    hits an exactly zero pivot.
    """
    M = system.matrix
    n = M.shape[0]
    v = np.ones(n) / np.sqrt(n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu = lu_factor(M + np.finfo(float).eps * n * np.eye(n), check_finite=False)
        for _ in range(iterations):
            v = lu_solve(lu, lu_solve(lu, v, trans=1, check_finite=False), check_finite=False)
            v /= np.linalg.norm(v)
    if not np.all(np.isfinite(v)):
        v = np.linalg.svd(M)[2][-1]
    return v


def _distribute(system: MatchingSystem, v: np.ndarray):
    sols = tuple(
        SegmentSolution(s.x_left, s.x_right, s.k_squared, s.v11, s.v22, s.v33,
                        (float(v[2 * j + 1]), float(v[2 * j + 2])))
        for j, s in enumerate(system.segments)
    )
    return float(v[0]), sols, float(v[-1])


def _coefficients(system: MatchingSystem, v: np.ndarray):
    """``(A, B, C, D)`` for a single interior segment, with ``x`` measured
    from its center; ``None`` otherwise."""
    c_l, sols, d_r = _distribute(system, v)
    if len(sols) != 1:
        if not sols:
            return (0j, 0j, complex(c_l), complex(d_r))
        return None
    s = sols[0]
    A, B = s.ab_amplitudes()
    grow = np.exp(system.decay * (s.x_right - s.x_left) / 2)
    coeffs = np.array([A, B, c_l * grow, d_r * grow], dtype=complex)
    big = coeffs[np.argmax(np.abs(coeffs))]
    return tuple(complex(c) for c in coeffs / big)


def _family_labels(params, p, states, ap):
    well = as_single_well(p)
    if well is not None:
        from .analytic import quantum_numbers

        return quantum_numbers(params, well, [s.energy for s in states], ap.energy, ap.side)
    # rank by distance from the accumulation point, farthest first
    order = sorted(range(len(states)), key=lambda i: -abs(states[i].energy - ap.energy))
    labels = [None] * len(states)
    for rank, i in enumerate(order):
        labels[i] = rank
    return labels


def solve_generic(params: ModelParams, p: Potential, n_max: int = 20,
                  tol: Optional[float] = None) -> SpectrumTable:
    """Bound states from sign changes of the matching determinant."""
    m = params.m
    tol = 1e-12 * m if tol is None else tol
    sing = singular_energies(p, params)
    acc = list(accumulation_points(p, params))
    f = _det_function(params, p)
    family, others, notes = [], [], []
    truncated = False
    for lo, hi in sing.intervals():
        ap = None
        for cand in acc:
            if (abs(lo - cand.energy) < 1e-8 * m and cand.side > 0) or (
                abs(hi - cand.energy) < 1e-8 * m and cand.side < 0
            ):
                ap = cand
        grid = _roots.scan_grid(lo, hi, accumulation=ap, n_max=n_max, n_uniform=1024)
        found = [E for E in _roots.find_roots(f, grid, tol) if E not in sing]
        states = []
        for E in _roots.dedupe(found, 10 * tol):
            system = matching_conditions(params, p, E, check=False)
            v = null_vector(system)
            ksq = None
            if len(system.segments) == 1:
                ksq = system.segments[0].k_squared
            states.append(BoundState(
                energy=float(E), decay=system.decay,
                interior_k=None if ksq is None else complex(np.sqrt(complex(ksq))),
                coefficients=_coefficients(system, v), source="generic_determinant",
                residual=float(np.linalg.norm(system.matrix @ v)),
            ))
        if ap is not None and states and any(k_squared(params, 0.5 * (lo + hi), s.v11, s.v22, s.v33) > 0
                                             for s in segments_of(p)):
            labels = _family_labels(params, p, states, ap)
            kept = [replace(s, family_index=n)
                    for s, n in zip(states, labels) if n is not None and n <= n_max]
            family += kept
            others += [s for s, n in zip(states, labels) if n is None]
            truncated = True
            notes.append(f"infinite family accumulating at E={ap.energy:.12g} truncated at n_max={n_max}")
        else:
            others += states
    family.sort(key=lambda s: s.family_index)
    others.sort(key=lambda s: s.energy)
    return SpectrumTable(family + others, params, p, truncated=truncated, notes=notes)


# ------------------------------------------------------------- wavefunctions
def _spinor_from_psi2(m, E, v11, v33, psi2, dpsi2):
    psi1 = -1j * dpsi2 / (SQRT2 * (E - m - v11))
    psi3 = -1j * dpsi2 / (SQRT2 * (E + m - v33))
    return np.stack([psi1, psi2 + 0j, psi3], axis=-1)


def _raw_solution(params: ModelParams, p: Potential, E: float):
    system = matching_conditions(params, p, E, check=False)
    v = null_vector(system)
    c_l, sols, d_r = _distribute(system, v)
    return system, c_l, sols, d_r


def _evaluate(params, system, c_l, sols, d_r, x):
    m, E, lam = params.m, system.energy, system.decay
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((x.size, 3), dtype=complex)
    x_first, x_last = system.interfaces[0][0], system.interfaces[-1][0]
    left, right = x <= x_first, x >= x_last
    if np.any(left):
        psi2 = c_l * np.exp(lam * (x[left] - x_first))
        out[left] = _spinor_from_psi2(m, E, 0, 0, psi2, lam * psi2)
    if np.any(right):
        psi2 = d_r * np.exp(-lam * (x[right] - x_last))
        out[right] = _spinor_from_psi2(m, E, 0, 0, psi2, -lam * psi2)
    for s in sols:
        sel = (x > s.x_left) & (x < s.x_right)
        if np.any(sel):
            b, db = s.basis(x[sel])
            a = np.asarray(s.amplitudes)
            out[sel] = _spinor_from_psi2(m, E, s.v11, s.v33, a @ b, a @ db)
    return out


def _norm_squared(params, system, c_l, sols, d_r) -> float:
    m, E, lam = params.m, system.energy, system.decay
    tail = 1 + 0.5 * lam * lam * (1 / (E - m) ** 2 + 1 / (E + m) ** 2)
    total = (c_l * c_l + d_r * d_r) * tail / (2 * lam)
    for s in sols:
        k = np.sqrt(abs(s.k_squared))
        nodes = int(64 + 4 * k * (s.x_right - s.x_left))
        t, w = np.polynomial.legendre.leggauss(nodes)
        half = 0.5 * (s.x_right - s.x_left)
        xs = s.center + half * t
        psi = _evaluate(params, system, c_l, [s], d_r, xs)
        total += half * np.sum(w * np.sum(np.abs(psi) ** 2, axis=1))
    return float(total)


def wavefunction(state: BoundState, p: Potential, params: ModelParams, x_grid) -> np.ndarray:
    """Spinor ``(psi1, psi2, psi3)`` on ``x_grid``, unit total probability.

    ``psi2`` is real; ``psi1`` and ``psi3`` are purely imaginary.
    """
    system, c_l, sols, d_r = _raw_solution(params, p, state.energy)
    norm = np.sqrt(_norm_squared(params, system, c_l, sols, d_r))
    psi = _evaluate(params, system, c_l, sols, d_r, x_grid) / norm
    return psi


def interface_residuals(state: BoundState, p: Potential, params: ModelParams) -> list[tuple[float, float]]:
    """``(|jump psi2|, |jump Q - 2 g psi2|)`` at each interface, relative to
    the largest ``|psi2|`` value at the interfaces."""
    system, c_l, sols, d_r = _raw_solution(params, p, state.energy)
    m, E = params.m, state.energy
    out, peak = [], 0.0
    for i, (x, g) in enumerate(system.interfaces):
        xl, xr = np.nextafter(x, -np.inf), np.nextafter(x, np.inf)

        def side(xx, j):
            if j < 0:
                v = c_l * np.exp(system.decay * (xx - system.interfaces[0][0]))
                return v, system.decay * v, _q(m, E, 0, 0)
            if j >= len(sols):
                v = d_r * np.exp(-system.decay * (xx - system.interfaces[-1][0]))
                return v, -system.decay * v, _q(m, E, 0, 0)
            s = sols[j]
            b, db = s.basis(xx)
            a = np.asarray(s.amplitudes)
            return float(a @ b[:, 0]), float(a @ db[:, 0]), _q(m, E, s.v11, s.v33)

        v_l, d_l, q_l = side(xl, i - 1)
        v_r, d_r_, q_r = side(xr, i)
        peak = max(peak, abs(v_l), abs(v_r))
        out.append((abs(v_l - v_r), abs(q_r * d_r_ - q_l * d_l - 2 * g * v_l)))
    return [(a / peak, b / peak) for a, b in out]


def psi2_zero_counts(state: BoundState, p: Potential, params: ModelParams) -> list[int]:
    """Sign changes of ``psi2`` inside each segment on a fixed fine grid."""
    system, c_l, sols, d_r = _raw_solution(params, p, state.energy)
    counts = []
    for s in sols:
        xs = np.linspace(s.x_left, s.x_right, ZERO_GRID)[1:-1]
        b, _ = s.basis(xs)
        vals = np.asarray(s.amplitudes) @ b
        counts.append(int(np.sum(np.signbit(vals[1:]) != np.signbit(vals[:-1]))))
    return counts
