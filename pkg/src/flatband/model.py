"""Free spin-1 Dirac model ``H0 = -i S_x d/dx + m S_z`` with v_F = hbar = 1.

Energies are measured in units of the gap parameter ``m`` and lengths in
units of ``1/m``; every public function nevertheless takes ``m`` explicitly
through :class:`ModelParams` so that other scales can be used directly.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import FlatbandError

SQRT2 = np.sqrt(2.0)

#: spin-1 matrices in the |1>, |2>, |3> basis
S_X = np.array(
    [[0.0, 1.0, 0.0],
     [1.0, 0.0, 1.0],
     [0.0, 1.0, 0.0]]
) / SQRT2
S_Z = np.diag([1.0, 0.0, -1.0])
S_X.setflags(write=False)
S_Z.setflags(write=False)


@dataclass(frozen=True)
class ModelParams:
    """Mass gap of the free Hamiltonian."""

    m: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.m) or self.m <= 0:
            raise FlatbandError(f"mass gap m must be positive and finite, got {self.m!r}")


class BandIndex(enum.IntEnum):
    LOWER = -1
    FLAT = 0
    UPPER = 1

    @classmethod
    def parse(cls, value) -> "BandIndex":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().upper()
            aliases = {"-": "LOWER", "0": "FLAT", "+": "UPPER", "MIDDLE": "FLAT"}
            return cls[aliases.get(key, key)]
        return cls(int(value))


@dataclass(frozen=True)
class PlaneWaveState:
    """Spinor prefactor of ``exp(ikx)`` for one band at wavenumber ``k``."""

    k: float
    band: BandIndex
    amplitudes: np.ndarray
    energy: float


def bloch_hamiltonian(params: ModelParams, k: float) -> np.ndarray:
    """3x3 matrix ``k S_x + m S_z`` acting on the plane-wave prefactor."""
    return k * S_X + params.m * S_Z


def dispersion(params: ModelParams, band, k):
    """Band energy; accepts scalar or array ``k``."""
    band = BandIndex.parse(band)
    k = np.asarray(k, dtype=float)
    eps = np.sqrt(k * k + params.m**2)
    out = int(band) * eps
    return float(out) if out.ndim == 0 else out


def eigenstate(params: ModelParams, band, k: float) -> PlaneWaveState:
    """Normalized eigenvector of :func:`bloch_hamiltonian` for ``band``."""
    band = BandIndex.parse(band)
    m = params.m
    k = float(k)
    eps = np.hypot(k, m)
    if band is BandIndex.FLAT:
        amp = np.array([-k, SQRT2 * m, k]) / (SQRT2 * eps)
    elif band is BandIndex.UPPER:
        amp = np.array([eps + m, SQRT2 * k, eps - m]) / (2 * eps)
    else:
        amp = np.array([eps - m, -SQRT2 * k, eps + m]) / (2 * eps)
    return PlaneWaveState(k=k, band=band, amplitudes=amp.astype(complex),
                          energy=int(band) * eps)


def spinor_matrix(params: ModelParams, k: float) -> np.ndarray:
    """Columns are the lower, flat and upper eigenvectors at ``k``."""
    return np.column_stack(
        [eigenstate(params, b, k).amplitudes for b in (BandIndex.LOWER, BandIndex.FLAT, BandIndex.UPPER)]
    )


def _spinors(m: float, k: np.ndarray) -> np.ndarray:
    """Vectorized eigenvectors, shape ``(len(k), 3 bands, 3 components)``.

    Band order is lower, flat, upper.
    """
    k = np.asarray(k, dtype=float)
    eps = np.hypot(k, m)
    out = np.empty(k.shape + (3, 3))
    out[..., 0, :] = np.stack([eps - m, -SQRT2 * k, eps + m], axis=-1) / (2 * eps)[..., None]
    out[..., 1, :] = np.stack([-k, SQRT2 * m * np.ones_like(k), k], axis=-1) / (SQRT2 * eps)[..., None]
    out[..., 2, :] = np.stack([eps + m, SQRT2 * k, eps - m], axis=-1) / (2 * eps)[..., None]
    return out
