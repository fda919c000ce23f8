"""Closed forms, characteristic equations and asymptotic spectra.

Characteristic functions are returned divided by ``1 + sum |term|`` so that
their zeros and signs are unchanged while values stay of order one near the
band edges.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import roots as _roots
from .exceptions import DomainError, SingularEnergyError, ZeroStrengthError
from .model import ModelParams
from .potentials import (
    ROOT_EXCLUSION,
    Delta,
    Potential,
    PotentialClass,
    SquareWell,
    accumulation_points,
    as_single_well,
    classify,
    k_squared,
    segments_of,
    singular_energies,
)
from .spectrum import BoundState, SpectrumTable


def _gap_check(params: ModelParams, E: float):
    if not abs(E) < params.m:
        raise DomainError(f"E={E} is outside the gap (-{params.m}, {params.m})")
    if E == 0:
        raise SingularEnergyError("E=0 is the flat band")


def _normalized(*terms):
    total = sum(terms)
    return total / (1.0 + sum(np.abs(t) for t in terms))


def _osc(ksq, a):
    """``sin(ka), k cos(ka)`` continued analytically to ``k^2 < 0``.

    The continued pair is divided by ``cosh(ka) > 0`` to avoid overflow.
    """
    ksq = np.asarray(ksq, dtype=float)
    k = np.sqrt(np.abs(ksq))
    pos = ksq > 0
    s = np.where(pos, np.sin(k * a), np.tanh(k * a))
    kc = np.where(pos, k * np.cos(k * a), k)
    return s, kc


# --------------------------------------------------------------------- delta
def delta_bound_energy(params: ModelParams, g: float) -> BoundState:
    """The single level of ``V22 = g delta(x)``: ``E = m g / sqrt(4 + g^2)``."""
    if g == 0:
        raise ZeroStrengthError("g = 0 has no bound state")
    m = params.m
    E = m * g / np.sqrt(4 + g * g)
    lam = np.sqrt(m * m - E * E)
    return BoundState(energy=float(E), decay=float(lam), coefficients=(0j, 0j, 1 + 0j, 1 + 0j),
                      source="delta_closed_form")


# -------------------------------------------------------------------- type I
def _char1(m, a, V, E, evanescent=False):
    E = np.asarray(E, dtype=float)
    ksq = (E - V) ** 2 - m * m
    lam = np.sqrt(m * m - E * E)
    if not evanescent:
        ksq = np.where(ksq > 0, ksq, np.nan)
    else:
        ksq = np.where(ksq < 0, ksq, np.nan)
    s, kc = _osc(ksq, a)
    poly = 2 * E**4 - 4 * E**3 * V + 2 * E * m * m * V - m * m * V * V + 2 * E * E * (V * V - m * m)
    return _normalized(poly * s, 2 * E * (V - E) * lam * kc)


def char_type1(params: ModelParams, a: float, V: float, E: float, evanescent: bool = False) -> float:
    """Determinant condition for ``V11 = V22 = V33 = V`` on a width-``a`` well.

    ``evanescent=True`` evaluates its analytic continuation to ``(E-V)^2 < m^2``.
    """
    _gap_check(params, E)
    ksq = (E - V) ** 2 - params.m**2
    if (ksq <= 0) != evanescent:
        raise DomainError(f"k^2={ksq:g} at E={E}: wrong regime")
    return float(_char1(params.m, a, V, E, evanescent))


# ------------------------------------------------------------------- type II
def _char2(m, a, V, E, evanescent=False):
    E = np.asarray(E, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = V / E - 1
        lam = np.sqrt(m * m - E * E)
        ksq = r * lam * lam
        ok = (r < 0) if evanescent else (r > 0)
        ksq = np.where(ok, ksq, np.nan)
        s, kc = _osc(ksq, a)
        # 2E sqrt(V/E - 1) cos(ka) = 2E (k/lambda) cos(ka)
        return _normalized(2 * E * kc / lam, -(V - 2 * E) * s)


def char_type2(params: ModelParams, a: float, V: float, E: float, evanescent: bool = False) -> float:
    """``2E sqrt(V/E-1) cos(ka) - (V-2E) sin(ka)`` for ``V22 = V`` only."""
    _gap_check(params, E)
    if (V / E <= 1) != evanescent:
        raise DomainError(f"V/E={V / E:g}: wrong regime")
    return float(_char2(params.m, a, V, E, evanescent))


# ------------------------------------------------------------------ type III
def _char3(m, a, V, E, evanescent=False):
    E = np.asarray(E, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ksq = 2 * E * (E + m) * (E - m - V) / (2 * E - V)
        ok = (ksq < 0) if evanescent else (ksq > 0)
        ksq = np.where(ok, ksq, np.nan)
        s, kc = _osc(ksq, a)
        return _normalized(
            2 * (V - 2 * E) * np.sqrt((m - E) / (m + E)) * kc,
            (4 * E * E - 4 * E * m - 3 * E * V + m * V) * s,
        )


def char_type3(params: ModelParams, a: float, V: float, E: float, evanescent: bool = False) -> float:
    """Determinant condition for ``V11 = V``, ``V22 = V33 = 0``."""
    _gap_check(params, E)
    if 2 * E == V:
        raise SingularEnergyError("E = V/2 is an accumulation point")
    ksq = 2 * E * (E + params.m) * (E - params.m - V) / (2 * E - V)
    if (ksq <= 0) != evanescent:
        raise DomainError(f"k^2={ksq:g} at E={E}: wrong regime")
    return float(_char3(params.m, a, V, E, evanescent))


_CHAR = {
    PotentialClass.TYPE_I: (_char1, lambda w: w.v11),
    PotentialClass.TYPE_II: (_char2, lambda w: w.v22),
    PotentialClass.TYPE_III: (_char3, lambda w: w.v11),
}


# --------------------------------------------------------------- asymptotics
def type2_asymptotic_roots(params: ModelParams, a: float, V: float, n_max: int) -> list[BoundState]:
    """Small ``|E/V|`` levels ``E_n`` of the type II well, ``n = 1..n_max``."""
    if V == 0:
        raise ZeroStrengthError("V = 0")
    m = params.m
    out = []
    for n in range(1, n_max + 1):
        p = (n * np.pi) ** 2
        # (-p + sqrt(p^2 + 4 m^2 a^4 V^2)) / (2 a^2 V), written without cancellation
        q = 4 * m * m * a**4 * V * V
        E = q / (2 * a * a * V * (p + np.sqrt(p * p + q)))
        lam = np.sqrt(m * m - E * E)
        ksq = (E - V) * (E * E - m * m) / E
        out.append(BoundState(energy=float(E), decay=float(lam), family_index=n,
                              interior_k=complex(np.sqrt(complex(ksq))),
                              source="type2_small_E_over_V"))
    return out


def hydrogen_spectrum(params: ModelParams, a: float, V: float, n_max: int) -> np.ndarray:
    """``E_n = m^2 a^2 V / (n pi)^2`` for ``n = 1..n_max``."""
    if V == 0:
        raise ZeroStrengthError("V = 0")
    n = np.arange(1, n_max + 1)
    return params.m**2 * a * a * V / (n * np.pi) ** 2


def dos_estimate_near_flatband(params: ModelParams, a: float, V: float, E: float) -> float:
    """Level density ``|dn/dE|`` of the hydrogen-like family at energy ``E``."""
    if E == 0 or V == 0 or np.sign(E) != np.sign(V):
        raise DomainError("need E != 0 with sign(E) = sign(V)")
    return params.m * a * np.sqrt(abs(V)) / (2 * np.pi * abs(E) ** 1.5)


def type3_accumulation_spectrum(params: ModelParams, a: float, V: float, n_max: int) -> np.ndarray:
    """Levels converging on ``E = V/2`` for the type III well."""
    m = params.m
    if V == 0:
        raise ZeroStrengthError("V = 0")
    if not abs(V / 2) < m:
        raise DomainError("V/2 must lie inside the gap")
    n = np.arange(1, n_max + 1)
    return V / 2 - V * (m + V / 2) ** 2 * a * a / (2 * (n * np.pi) ** 2)


# ------------------------------------------------------ single-well helpers
def _q_factor(m, E, v11, v33):
    return 1.0 / (E - m - v11) + 1.0 / (E + m - v33)


def _parity_data(params: ModelParams, well: SquareWell, E: float):
    """Return ``(N, parity, k)`` for a root of the single-well condition.

    ``N`` counts the phase ``k a + 2 arctan(rho)`` in units of pi with
    ``rho = q_in k / (q_out lambda)``; parity is ``+1`` (even) or ``-1``.
    """
    m, a = params.m, well.a
    ksq = k_squared(params, E, well.v11, well.v22, well.v33)
    lam = np.sqrt(m * m - E * E)
    q_in = _q_factor(m, E, well.v11, well.v33)
    q_out = 2 * E / (E * E - m * m)
    k = np.sqrt(abs(ksq))
    if ksq > 0:
        rho = q_in * k / (q_out * lam)
        N = int(round((k * a + 2 * np.arctan(rho)) / np.pi))
        c, s = np.cos(k * a / 2), np.sin(k * a / 2)
        even = abs(q_in * k * s - lam * q_out * c)
        odd = abs(q_in * k * c + lam * q_out * s)
    else:
        N = None
        c, s = np.cosh(k * a / 2), np.sinh(k * a / 2)
        even = abs(q_in * k * s + lam * q_out * c) / c
        odd = abs(q_in * k * c + lam * q_out * s) / c
    return N, (1 if even <= odd else -1), k


def _phase_offset(params: ModelParams, well: SquareWell, e_star: float, side: int) -> int:
    """Limit of ``2 arctan(rho)/pi`` at an accumulation point (0 or +/-1)."""
    m = params.m
    E = e_star + side * 1e-10 * m
    ksq = k_squared(params, E, well.v11, well.v22, well.v33)
    q_in = _q_factor(m, E, well.v11, well.v33)
    lam = np.sqrt(m * m - E * E)
    rho = q_in * np.sqrt(ksq) / ((2 * E / (E * E - m * m)) * lam)
    return int(round(2 * np.arctan(rho) / np.pi))


def single_well_state(params: ModelParams, well: SquareWell, E: float, source: str,
                      residual: float = 0.0, family_index: Optional[int] = None) -> BoundState:
    """Bound-state record with parity-adapted matching coefficients."""
    m, a = params.m, well.a
    lam = np.sqrt(m * m - E * E)
    ksq = k_squared(params, E, well.v11, well.v22, well.v33)
    _, parity, k = _parity_data(params, well, E)
    grow = np.exp(lam * a / 2)
    if ksq > 0:
        if parity > 0:
            A, B, C = 0.5, 0.5, np.cos(k * a / 2) * grow
        else:
            A, B, C = -0.5j, 0.5j, np.sin(k * a / 2) * grow
    else:
        if parity > 0:
            A, B, C = 0.5, 0.5, np.cosh(k * a / 2) * grow
        else:
            A, B, C = -0.5, 0.5, np.sinh(k * a / 2) * grow
    D = parity * C
    return BoundState(
        energy=float(E),
        decay=float(lam),
        family_index=family_index,
        interior_k=complex(np.sqrt(complex(ksq))),
        coefficients=tuple(complex(v) for v in (A, B, C, D)),
        source=source,
        residual=float(residual),
    )


def quantum_numbers(params: ModelParams, well: SquareWell, energies, e_star: float, side: int):
    """Family quantum numbers matching the small-gap asymptotic formulas.

    The phase count of a root differs from the asymptotic label ``n`` by a
    constant fixed at the accumulation point; the state farthest from it
    may therefore carry ``n = 0``.
    """
    offset = _phase_offset(params, well, e_star, side)
    out = []
    for E in energies:
        N, _, _ = _parity_data(params, well, E)
        out.append(None if N is None else N - offset)
    return out


# -------------------------------------------------------------- orchestration
def find_bound_states(params: ModelParams, p: Potential, n_max: int = 20,
                      tol: Optional[float] = None) -> SpectrumTable:
    """All in-gap bound states of ``p``.

    Delta potentials use the closed form; named square wells use their
    characteristic function (and its evanescent continuation) on each
    interval between singular energies; anything else is passed to the
    generic matching solver. Families accumulating at ``E*`` are labelled by
    quantum number and cut at ``n <= n_max``; the table is then flagged as
    truncated.
    """
    m = params.m
    tol = 1e-12 * m if tol is None else tol
    kind = classify(p)
    if kind is PotentialClass.DELTA:
        if p.g == 0:
            return SpectrumTable([], params, p, notes=["zero strength: no bound state"])
        return SpectrumTable([delta_bound_energy(params, p.g)], params, p)
    well = as_single_well(p)
    if kind not in _CHAR or well is None:
        from .generic import solve_generic

        return solve_generic(params, p, n_max=n_max, tol=tol)

    char, strength = _CHAR[kind]
    V, a = strength(well), well.a
    sing = singular_energies(p, params)
    acc = {ap.energy: ap for ap in accumulation_points(p, params)}
    family, others = [], []
    notes: list[str] = []
    truncated = False
    for lo, hi in sing.intervals():
        mid = 0.5 * (lo + hi)
        ksq_mid = k_squared(params, mid, well.v11, well.v22, well.v33)
        evanescent = bool(ksq_mid < 0)
        # the accumulation point must sit at an end, on the side where k^2 -> +inf
        ap = None
        for e_star, cand in acc.items():
            if (abs(lo - e_star) < 1e-8 * m and cand.side > 0) or (abs(hi - e_star) < 1e-8 * m and cand.side < 0):
                ap = cand
        f = lambda E, ev=evanescent: char(m, a, V, E, ev)  # noqa: E731
        grid = _roots.scan_grid(lo, hi, accumulation=ap, n_max=n_max)
        found = [E for E in _roots.find_roots(f, grid, tol) if E not in sing]
        found = _roots.dedupe(found, 10 * tol)
        source = f"char_{kind.value}" + ("_evanescent" if evanescent else "")
        if ap is not None and not evanescent:
            ns = quantum_numbers(params, well, found, ap.energy, ap.side)
            for E, n in zip(found, ns):
                if n is not None and n <= n_max:
                    family.append(single_well_state(params, well, E, source, abs(float(f(E))), n))
            truncated = True
            notes.append(f"infinite family accumulating at E={ap.energy:.12g} truncated at n_max={n_max}")
        else:
            others += [single_well_state(params, well, E, source, abs(float(f(E)))) for E in found]
    family.sort(key=lambda s: s.family_index)
    others.sort(key=lambda s: s.energy)
    trivial = []
    if kind is PotentialClass.TYPE_I and abs(V) < m:
        trivial = [float(V)]
        notes.append(f"trivial flat-band states at E=V={V:.12g} excluded")
    return SpectrumTable(family + others, params, p, truncated=truncated, notes=notes,
                         trivial_energies=trivial)


# -------------------------------------------------------- effective potential
@dataclass(frozen=True)
class EffectivePotentialView:
    """Schrodinger-like form ``-psi2'' + V_eff psi2 = E_eff psi2``.

    ``segments`` hold ``(x_left, x_right, V_eff)``; ``point_strengths`` hold
    ``(x0, strength)`` for delta terms.
    """

    energy: float
    e_eff: float
    segments: tuple = ()
    point_strengths: tuple = ()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for xl, xr, v in self.segments:
            out = np.where((x > xl) & (x < xr), v, out)
        return out


def effective_potential(params: ModelParams, p: Potential, E: float) -> EffectivePotentialView:
    """``E_eff = E^2 - m^2`` and ``V_eff = V22 (E^2 - m^2) / E``.

    Only valid when ``V11 = V33 = 0`` everywhere.
    """
    if E == 0:
        raise SingularEnergyError("E = 0")
    m = params.m
    e_eff = E * E - m * m
    if isinstance(p, Delta):
        return EffectivePotentialView(E, e_eff, point_strengths=((p.x0, p.g * e_eff / E),))
    segs = []
    for s in segments_of(p):
        if s.v11 != 0 or s.v33 != 0:
            raise DomainError("effective potential needs V11 = V33 = 0")
        segs.append((s.x_left, s.x_right, s.v22 * e_eff / E))
    return EffectivePotentialView(E, e_eff, segments=tuple(segs))
