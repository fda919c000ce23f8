"""Numbered acceptance checks shared by the test suite and ``flatband validate``.

Each check returns a :class:`CheckResult` holding the measured worst-case
quantity and the tolerance it was held to. Nothing here relaxes a bound:
a check that cannot be met reports a failure.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analytic, generic, greens, lattice, nystrom
from .model import ModelParams
from .potentials import Delta, SquareWell

M1 = ModelParams(1.0)


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.measured = float(self.measured)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] criterion {self.criterion:>2} {self.name}: "
                f"measured={self.measured:.3e} tol={self.tolerance:.1e} ({self.seconds:.1f}s) {self.detail}")

    def to_dict(self) -> dict:
        return {"criterion": self.criterion, "name": self.name, "passed": bool(self.passed),
                "measured": float(self.measured), "tolerance": float(self.tolerance),
                "detail": self.detail, "seconds": round(self.seconds, 3)}


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def check_delta_closed_form() -> CheckResult:
    """One level at ``m g / sqrt(4 + g^2)`` for a range of strengths, under 1 s."""
    worst, counts = 0.0, []
    t0 = time.perf_counter()
    for g in (0.01, -0.01, 0.1, -0.1, 1, -1, 2, -2, 10, -10):
        table = analytic.find_bound_states(M1, Delta(g))
        counts.append(len(table))
        exact = g / np.sqrt(4 + g * g)
        worst = max(worst, abs(table[0].energy / exact - 1))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-12 and all(c == 1 for c in counts) and elapsed < 1.0
    return CheckResult(1, "delta closed form", ok, worst, 1e-12, f"counts={set(counts)} runtime={elapsed:.3f}s")


@_timed
def check_weak_coupling() -> CheckResult:
    g = 1e-3
    E = analytic.find_bound_states(M1, Delta(g))[0].energy
    dev = abs(E / (g / 2) - 1)
    return CheckResult(2, "weak-coupling linearity", dev < 1e-4, dev, 1e-4)


@_timed
def check_type2_asymptotic() -> CheckResult:
    """Family members n = 1 and n = 5 against the small-E/V formula."""
    t0 = time.perf_counter()
    table = analytic.find_bound_states(M1, SquareWell.type2(1.0, 0.5), n_max=5)
    elapsed = time.perf_counter() - t0
    approx = {s.family_index: s.energy for s in analytic.type2_asymptotic_roots(M1, 1.0, 0.5, 5)}
    err1 = abs(table.by_index(1).energy / approx[1] - 1)
    err5 = abs(table.by_index(5).energy / approx[5] - 1)
    ok = err1 < 0.02 and err5 < 0.002 and elapsed < 1.0
    return CheckResult(3, "type II small-E/V formula", ok, max(err1 / 0.02, err5 / 0.002), 1.0,
                       f"rel err n=1: {err1:.4f} (tol 0.02), n=5: {err5:.5f} (tol 0.002); "
                       f"measured is the worst err/tol ratio; runtime={elapsed:.2f}s",
                       extra={"err1": err1, "err5": err5})


@_timed
def check_hydrogen() -> CheckResult:
    t0 = time.perf_counter()
    table = analytic.find_bound_states(M1, SquareWell.type2(1.0, 0.1), n_max=20)
    elapsed = time.perf_counter() - t0
    worst = max(abs(n * n * table.by_index(n).energy * np.pi**2 / 0.1 - 1) for n in range(10, 21))
    return CheckResult(4, "hydrogen-like 1/n^2 law", worst < 0.02 and elapsed < 5.0, worst, 0.02,
                       f"n in [10, 20], runtime={elapsed:.2f}s")


@_timed
def check_dos_scaling() -> CheckResult:
    V = 0.1
    table = analytic.find_bound_states(M1, SquareWell.type2(1.0, V), n_max=21)
    worst = 0.0
    for n in range(10, 21):
        e0, e1 = table.by_index(n).energy, table.by_index(n + 1).energy
        rho_fd = 1.0 / abs(e0 - e1)
        rho = analytic.dos_estimate_near_flatband(M1, 1.0, V, 0.5 * (e0 + e1))
        worst = max(worst, abs(rho_fd / rho - 1))
    return CheckResult(5, "level density near E=0", worst < 0.1, worst, 0.1, "n in [10, 20]")


@_timed
def check_type1_threshold() -> CheckResult:
    worst, parts = 0.0, []
    for V in (0.01, 0.02, 0.05, -0.01, -0.02, -0.05):
        E = analytic.find_bound_states(M1, SquareWell.type1(1.0, V)).energies
        gap = (E.min() + 1) if V > 0 else (1 - E.max())
        err = abs(gap / (V * V / 2) - 1)
        parts.append(f"{V:+g}:{err:.4f}")
        worst = max(worst, err)
    return CheckResult(6, "type I threshold law", worst < 0.05, worst, 0.05, " ".join(parts))


@_timed
def check_type3_accumulation() -> CheckResult:
    V = -0.4
    table = analytic.find_bound_states(M1, SquareWell.type3(1.0, V), n_max=20)
    approx = analytic.type3_accumulation_spectrum(M1, 1.0, V, 20)
    fam = table.family()
    worst = max(abs((table.by_index(n).energy - V / 2) / (approx[n - 1] - V / 2) - 1) for n in range(5, 21))
    d = np.array([s.energy - V / 2 for s in fam])
    monotone = bool(np.all(np.abs(d[1:]) < np.abs(d[:-1])) and np.all(np.sign(d) == np.sign(d[0])))
    return CheckResult(7, "type III accumulation at V/2", worst < 0.02 and monotone, worst, 0.02,
                       f"n in [5, 20], monotone={monotone}")


@_timed
def check_cross_solver() -> CheckResult:
    worst, mismatch = 0.0, []
    for make in (SquareWell.type1, SquareWell.type2, SquareWell.type3):
        for V in (0.1, -0.1, 0.5, -0.5, 2.5, -2.5):
            w = make(1.0, V)
            a = analytic.find_bound_states(M1, w, n_max=10).energies
            g = generic.solve_generic(M1, w, n_max=10).energies
            if len(a) != len(g):
                mismatch.append(f"{make.__name__}({V})")
                continue
            worst = max(worst, float(np.max(np.abs(np.sort(a) - np.sort(g)))) if len(a) else 0.0)
    ok = worst < 1e-10 and not mismatch
    return CheckResult(8, "generic vs characteristic roots", ok, worst, 1e-10,
                       f"count mismatches: {mismatch or 'none'}")


ORACLE_POTENTIALS = {
    "delta(g=2)": Delta(2.0),
    "typeI(a=1,V=-2.5)": SquareWell.type1(1.0, -2.5),
    "typeII(a=1,V=0.5)": SquareWell.type2(1.0, 0.5),
    "typeIII(a=1,V=-0.4)": SquareWell.type3(1.0, -0.4),
}


@_timed
def check_oracles(cfg: lattice.LatticeConfig | None = None) -> CheckResult:
    """Lattice (first three levels), Nystrom (type II and delta) and the
    exact delta reduction of the integral kernel."""
    cfg = cfg or lattice.LatticeConfig(L=40.0, h=0.005)
    lat_worst, parts = 0.0, []
    for name, pot in ORACLE_POTENTIALS.items():
        exact = [s.energy for s in analytic.find_bound_states(M1, pot, n_max=5)][:3]
        lat = np.array([s.energy for s in lattice.lattice_bound_states(M1, pot, cfg) if s.label != "trivial"])
        errs = [float(np.min(np.abs(lat - e)) / abs(e)) if lat.size else np.inf for e in exact]
        parts.append(f"{name}:{max(errs):.1e}")
        lat_worst = max(lat_worst, max(errs))
    nys_worst = 0.0
    w2 = SquareWell.type2(1.0, 0.5)
    exact = [s.energy for s in analytic.find_bound_states(M1, w2, n_max=5)][:3]
    roots = np.array(nystrom.nystrom_roots(M1, w2, 200, window=(0.5 * min(exact), 1.0)))
    for e in exact:
        nys_worst = max(nys_worst, float(np.min(np.abs(roots - e)) / abs(e)) if roots.size else np.inf)
    for g in (0.5, -1.0, 2.0):
        e = analytic.delta_bound_energy(M1, g).energy
        r = nystrom.nystrom_roots(M1, Delta(g), 200)
        nys_worst = max(nys_worst, min(abs(x - e) for x in r) / abs(e) if r else np.inf)
    red_worst = 0.0
    for g in (0.5, -1.0, 2.0):
        for E in (-0.9, -0.3, 0.2, 0.7):
            lam = np.sqrt(1 - E * E)
            red_worst = max(red_worst, abs(nystrom.nystrom_characteristic(M1, Delta(g), E) - (1 - g * lam / (2 * E))))
    ok = lat_worst < 1e-3 and nys_worst < 1e-6 and red_worst < 1e-12
    return CheckResult(9, "oracle concordance", ok, lat_worst, 1e-3,
                       f"lattice[{' '.join(parts)}] nystrom={nys_worst:.1e} (tol 1e-6) "
                       f"delta-kernel={red_worst:.1e} (tol 1e-12)",
                       extra={"lattice": lat_worst, "nystrom": nys_worst, "delta_kernel": red_worst})


@_timed
def check_greens() -> CheckResult:
    quad_worst = 0.0
    for x, xp, z in ((0.0, 0.0, 0.5 + 0.5j), (0.7, -0.2, 0.3 + 0.1j), (-1.5, 0.4, -0.8 + 0.2j)):
        num = greens.spectral_green_quadrature(M1, x, xp, z).regular
        ref = greens.green_coordinate(M1, x, xp, z).regular
        quad_worst = max(quad_worst, float(np.nanmax(np.abs(num - ref))))
    slope = greens.dos_threshold_exponent(M1)
    trace_worst = 0.0
    for z in (0.5 + 0.5j, 0.3j, -0.7 + 0.1j, 2.0 + 1.0j):
        trace_worst = max(trace_worst, abs(greens.dos_resolvent_integral(M1, z) - greens.trace_regular_coincident(M1, z)))
    ok = quad_worst < 1e-6 and abs(slope + 0.5) <= 0.005 and trace_worst < 1e-4
    return CheckResult(10, "Green function and DOS", ok, quad_worst, 1e-6,
                       f"exponent={slope:.5f} (-0.500+/-0.005) trace={trace_worst:.1e} (tol 1e-4)",
                       extra={"quadrature": quad_worst, "exponent": slope, "trace": trace_worst})


@_timed
def check_flat_cluster(cfg: lattice.LatticeConfig | None = None) -> CheckResult:
    cfg = cfg or lattice.LatticeConfig(L=40.0, h=0.02)
    n = lattice.lattice_hamiltonian(M1, None, cfg).shape[0]
    zeros = lattice.zero_cluster_size(M1, None, cfg, 1e-8)
    need = n / 3 - 2
    return CheckResult(11, "lattice flat-band cluster", zeros >= need, float(zeros), need,
                       f"{zeros} eigenvalues with |E|<1e-8 out of {n}; need >= N/3-2 = {need:.1f}")


CHECKS: dict[int, Callable[[], CheckResult]] = {
    1: check_delta_closed_form,
    2: check_weak_coupling,
    3: check_type2_asymptotic,
    4: check_hydrogen,
    5: check_dos_scaling,
    6: check_type1_threshold,
    7: check_type3_accumulation,
    8: check_cross_solver,
    9: check_oracles,
    10: check_greens,
    11: check_flat_cluster,
}

SUITES = {
    "all": tuple(CHECKS),
    "analytic": (1, 2, 3, 4, 5, 6, 7, 8),
    "oracle": (9, 11),
    "greens": (10,),
}


def run_suite(name: str = "all") -> list[CheckResult]:
    return [CHECKS[i]() for i in SUITES[name]]
