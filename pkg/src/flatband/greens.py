"""Free-particle Green function, density of states and spectral cross-checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .exceptions import SingularEnergyError, ThresholdError
from .model import SQRT2, ModelParams, _spinors, eigenstate, BandIndex

#: relative distance (in units of m) below which z counts as sitting on a pole
SINGULAR_TOL = 1e-10


@dataclass(frozen=True)
class GreenElement:
    """``G0(x, x', z) = regular + delta_coeff * delta(x - x')``."""

    regular: np.ndarray
    delta_coeff: np.ndarray


@dataclass(frozen=True)
class DosValue:
    continuum: float
    flat_weight: bool


def _check_off_spectrum(params: ModelParams, z: complex) -> complex:
    z = complex(z)
    m = params.m
    tol = SINGULAR_TOL * m
    if abs(z) < tol or abs(z - m) < tol or abs(z + m) < tol:
        raise SingularEnergyError(f"z={z} is within {tol:g} of a band edge or the flat band")
    if abs(z.imag) < tol and abs(z.real) >= m:
        raise SingularEnergyError(f"z={z} lies on the continuum")
    return z


def decay_constant(params: ModelParams, z: complex) -> complex:
    """``sqrt(m^2 - z^2)`` on the sheet with positive real part."""
    kappa = np.sqrt(complex(params.m**2 - complex(z) ** 2))
    if kappa.real < 0:
        kappa = -kappa
    return kappa


def green_momentum(params: ModelParams, k: float, z: complex) -> np.ndarray:
    """Coefficient of ``delta(k - k')`` in ``<k|(z - H0)^-1|k'>``."""
    z = complex(z)
    m = params.m
    tol = SINGULAR_TOL * m
    if abs(z) < tol or abs(z * z - (k * k + m * m)) < tol * max(1.0, abs(z)):
        raise SingularEnergyError(f"z={z} is an eigenvalue of H0 at k={k}")
    den = 2 * (m * m * z + k * k * z - z**3)
    s2k = SQRT2 * k
    mat = np.array(
        [
            [k * k - 2 * z * (m + z), -s2k * (m + z), -k * k],
            [-s2k * (m + z), 2 * (m * m - z * z), s2k * (m - z)],
            [-k * k, s2k * (m - z), k * k + 2 * z * (m - z)],
        ],
        dtype=complex,
    )
    return mat / den


def green_coordinate(params: ModelParams, x: float, xp: float, z: complex) -> GreenElement:
    """Closed-form real-space Green function.

    The ``sign(x - x')`` entries (1,2), (2,1), (2,3), (3,2) are returned as
    ``nan`` at coincident points, where they are undefined.
    """
    z = _check_off_spectrum(params, z)
    m = params.m
    kappa = decay_constant(params, z)
    r = float(x) - float(xp)
    ex = np.exp(-kappa * abs(r))
    sgn = np.sign(r) if r != 0 else np.nan

    g11 = (-(m + z) / (2 * kappa) - kappa / (4 * z)) * ex
    g33 = ((m - z) / (2 * kappa) - kappa / (4 * z)) * ex
    g13 = kappa / (4 * z) * ex
    g22 = kappa / (2 * z) * ex
    g12 = -1j * (m + z) * sgn / (2 * SQRT2 * z) * ex
    g23 = 1j * (m - z) * sgn / (2 * SQRT2 * z) * ex
    regular = np.array([[g11, g12, g13], [g12, g22, g23], [g13, g23, g33]], dtype=complex)

    half = 1.0 / (2 * z)
    delta = np.array([[half, 0, -half], [0, 0, 0], [-half, 0, half]], dtype=complex)
    return GreenElement(regular=regular, delta_coeff=delta)


def dos(params: ModelParams, E: float) -> DosValue:
    """Local density of states per unit length of the free model."""
    m = params.m
    E = float(E)
    if abs(E) == m:
        raise ThresholdError(f"DOS diverges at the threshold E={E}")
    if abs(E) > m:
        cont = abs(E) / (np.pi * np.sqrt(E * E - m * m))
    else:
        cont = 0.0
    return DosValue(continuum=cont, flat_weight=(E == 0.0))


def dos_threshold_exponent(params: ModelParams, eps=None) -> float:
    """Slope of ``log(dos)`` against ``log(eps)`` for ``E = m (1 + eps)``."""
    if eps is None:
        eps = np.logspace(-6, -2, 41)
    eps = np.asarray(eps, dtype=float)
    rho = [dos(params, params.m * (1 + e)).continuum for e in eps]
    slope, _ = np.polyfit(np.log(eps), np.log(rho), 1)
    return float(slope)


def _composite_gauss(lo: float, hi: float, n_nodes: int, order: int = 16):
    panels = max(1, n_nodes // order)
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _band_resolvent(params: ModelParams, k: np.ndarray, z: complex, flat_const: np.ndarray):
    """Sum over bands of ``psi psi^+ / (z - E_band)`` with the flat band's
    large-k projector removed; shape ``(len(k), 3, 3)``."""
    m = params.m
    u = _spinors(m, k)
    eps = np.hypot(k, m)
    proj = u[..., :, None] * u[..., None, :]  # (n, band, i, j); spinors are real
    out = proj[:, 0] / (z + eps)[:, None, None] + proj[:, 2] / (z - eps)[:, None, None]
    out = out + (proj[:, 1] - flat_const) / z
    return out


def spectral_green_quadrature(
    params: ModelParams,
    x: float,
    xp: float,
    z: complex,
    k_cut: float = 200.0,
    n_nodes: int = 2**14,
) -> GreenElement:
    """Real-space Green function rebuilt from the band eigenstates.

    Integrates ``sum_band psi psi^+ exp(ik(x-x')) / (z - E_band)`` over
    ``|k| < k_cut`` on a composite Gauss-Legendre rule. The flat band's
    projector tends to a constant at large ``k``; that constant is split off
    and reported as the ``delta(x - x')`` coefficient. The remaining
    integrand decays as ``1/k`` or ``1/k^2``; the two leading orders of its
    tail are removed by subtracting a rational model in ``1/(k^2+m^2)``,
    fitted at ``k_cut`` and ``2 k_cut``, whose transforms are elementary.
    """
    z = complex(z)
    m = params.m
    if abs(z) < SINGULAR_TOL * m:
        raise SingularEnergyError("z=0 is the flat band")
    r = float(x) - float(xp)

    far = eigenstate(params, BandIndex.FLAT, 1e15 * m).amplitudes.real
    flat_const = np.outer(far, far)

    # g(k) ~ c1 q + c2 q^2 with q = 1/(k^2+m^2) (times k for the odd part);
    # fitted from the two points k_cut, 2 k_cut
    s2 = m * m
    k_fit = np.array([k_cut, -k_cut, 2 * k_cut, -2 * k_cut])
    g1p, g1n, g2p, g2n = _band_resolvent(params, k_fit, z, flat_const)
    q1, q2 = 1 / (k_cut**2 + s2), 1 / (4 * k_cut**2 + s2)
    ev1, ev2 = 0.5 * (g1p + g1n), 0.5 * (g2p + g2n)
    od1, od2 = 0.5 * (g1p - g1n) / k_cut, 0.5 * (g2p - g2n) / (2 * k_cut)
    det = q1 * q2 * q2 - q2 * q1 * q1
    c_even1 = (ev1 * q2 * q2 - ev2 * q1 * q1) / det
    c_even2 = (q1 * ev2 - q2 * ev1) / det
    c_odd1 = (od1 * q2 * q2 - od2 * q1 * q1) / det
    c_odd2 = (q1 * od2 - q2 * od1) / det

    k, w = _composite_gauss(-k_cut, k_cut, n_nodes)
    g = _band_resolvent(params, k, z, flat_const)
    q = (1 / (k * k + s2))[:, None, None]
    kk = k[:, None, None]
    model = (c_even1 + c_odd1 * kk) * q + (c_even2 + c_odd2 * kk) * q * q
    phase = np.exp(1j * k * r) * w / (2 * np.pi)
    body = np.einsum("n,nij->ij", phase, g - model)

    # elementary transforms of q, q^2, k q, k q^2
    s = m
    ar = abs(r)
    ex = np.exp(-s * ar)
    tail = (
        c_even1 * ex / (2 * s)
        + c_even2 * (1 + s * ar) * ex / (4 * s**3)
        + c_odd1 * 0.5j * np.sign(r) * ex
        + c_odd2 * 1j * r * ex / (4 * s)
    )
    return GreenElement(regular=body + tail, delta_coeff=flat_const / z)


def trace_regular_coincident(params: ModelParams, z: complex) -> complex:
    """``Tr G0(x, x, z)`` without the delta terms; equals ``-z / sqrt(m^2 - z^2)``."""
    g = green_coordinate(params, 0.0, 0.0, z).regular
    return complex(g[0, 0] + g[1, 1] + g[2, 2])


def dos_resolvent_integral(params: ModelParams, z: complex, e_cut: float = 50.0) -> complex:
    """``int dE rho_continuum(E) / (z - E)`` over both continua.

    Quadrature up to ``|E| = e_cut * m`` plus a large-``E`` series for the rest.
    The substitution ``E = m + u^2`` removes the threshold singularity.
    """
    z = complex(z)
    m = params.m
    ec = e_cut * m
    umax = np.sqrt(ec - m)

    def integrand(u, part):
        E = m + u * u
        # both continua folded together: rho(E) [1/(z-E) + 1/(z+E)] dE
        val = (E / (np.pi * u * np.sqrt(2 * m + u * u))) * (2 * z / (z * z - E * E)) * 2 * u
        return val.real if part == 0 else val.imag

    re, _ = integrate.quad(integrand, 0.0, umax, args=(0,), epsabs=1e-13, epsrel=1e-12, limit=400)
    im, _ = integrate.quad(integrand, 0.0, umax, args=(1,), epsabs=1e-13, epsrel=1e-12, limit=400)
    # E/sqrt(E^2-m^2) * 2z/(z^2-E^2) = -(2z/E^2) [1 + a1/E^2 + a2/E^4 + ...]
    a1 = m * m / 2 + z * z
    a2 = 3 * m**4 / 8 + z * z * m * m / 2 + z**4
    tail = -(2 * z / np.pi) * (1 / ec + a1 / (3 * ec**3) + a2 / (5 * ec**5))
    return complex(re + 1j * im) + tail
