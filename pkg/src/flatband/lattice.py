"""Finite-difference lattice oracle on a staggered grid.

``psi2`` lives on integer sites ``x_j = j h`` (``|j| <= N``); ``psi1`` and
``psi3`` live on half-integer sites between them, so the first derivative
is a two-point difference between sublattices and the discretized operator
has no doubled low-energy branch. After the gauge change ``psi1 -> i psi1``,
``psi3 -> i psi3`` the Hamiltonian is real symmetric. Sites are interleaved
as ``(psi2_j, psi1_{j+1/2}, psi3_{j+1/2})`` giving bandwidth 3. Outside
the box every component vanishes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eig_banded, solve_banded

from .exceptions import ConfigError
from .model import SQRT2, ModelParams
from .potentials import Delta, Potential, segments_of

GAP_MARGIN = 1e-3
FLAT_WINDOW = 1e-9
IPR_FACTOR = 5.0


@dataclass(frozen=True)
class LatticeConfig:
    """Box ``[-L, L]`` with spacing ``h`` (hard walls).

    When ``expected_decay`` is given the box must hold ten decay lengths.
    """

    L: float = 40.0
    h: float = 0.005
    expected_decay: Optional[float] = None

    def __post_init__(self):
        if not (self.L > 0 and self.h > 0):
            raise ConfigError("L and h must be positive")
        if self.h > self.L:
            raise ConfigError("h must not exceed L")
        if self.expected_decay is not None and self.L * self.expected_decay < 10:
            raise ConfigError(f"L={self.L} is shorter than 10 decay lengths")

    @property
    def n_half(self) -> int:
        return int(round(self.L / self.h))

    def validate_for(self, params: ModelParams, p: Optional[Potential] = None):
        if self.h > 0.02 / params.m * (1 + 1e-12):
            raise ConfigError(f"h={self.h} exceeds 0.02/m")
        for s in segments_of(p) if p is not None else ():
            if self.h > s.width / 64 * (1 + 1e-12):
                raise ConfigError(f"h={self.h} exceeds a/64 for a segment of width {s.width}")


@dataclass(frozen=True)
class InGapState:
    """Lattice eigenstate inside the gap.

    ``label`` is ``"bound"`` for a localized state, ``"trivial"`` for a
    flat-band state shifted into a constant segment, ``"extended"``
    otherwise. ``ipr`` is ``sum |psi|^4 / (h (sum |psi|^2)^2)`` (1/length).
    """

    energy: float
    ipr: float
    in_gap: bool
    label: str


def _cell_average(values, centers, h):
    out = np.zeros_like(centers)
    for xl, xr, v in values:
        lo = np.maximum(centers - h / 2, xl)
        hi = np.minimum(centers + h / 2, xr)
        out += v * np.clip(hi - lo, 0, None) / h
    return out


def _site_potentials(p: Optional[Potential], cfg: LatticeConfig):
    N, h = cfg.n_half, cfg.h
    x_int = np.arange(-N, N + 1) * h
    x_half = x_int[:-1] + h / 2
    v11 = np.zeros_like(x_half)
    v33 = np.zeros_like(x_half)
    v22 = np.zeros_like(x_int)
    if isinstance(p, Delta):
        v22[int(np.argmin(np.abs(x_int - p.x0)))] += p.g / h
    elif p is not None:
        segs = segments_of(p)
        v11 = _cell_average([(s.x_left, s.x_right, s.v11) for s in segs], x_half, h)
        v22 = _cell_average([(s.x_left, s.x_right, s.v22) for s in segs], x_int, h)
        v33 = _cell_average([(s.x_left, s.x_right, s.v33) for s in segs], x_half, h)
    return x_int, v11, v22, v33


def lattice_banded(params: ModelParams, p: Optional[Potential], cfg: LatticeConfig):
    """Lower banded storage ``ab[d, i] = H[i + d, i]`` of the lattice matrix."""
    m, h, N = params.m, cfg.h, cfg.n_half
    _, v11, v22, v33 = _site_potentials(p, cfg)
    n = 6 * N + 1
    ab = np.zeros((4, n))
    ab[0, 0::3] = v22
    ab[0, 1::3] = m + v11
    ab[0, 2::3] = -m + v33
    c = 1.0 / (SQRT2 * h)
    j = 3 * np.arange(2 * N)
    ab[1, j] = c  # psi1_{j+1/2} <- psi2_j
    ab[2, j] = c  # psi3_{j+1/2} <- psi2_j
    ab[2, j + 1] = -c  # psi2_{j+1} <- psi1_{j+1/2}
    ab[1, j + 2] = -c  # psi2_{j+1} <- psi3_{j+1/2}
    return ab


def _banded_to_sparse(ab):
    n = ab.shape[1]
    diags = [ab[0]] + [ab[d, : n - d] for d in range(1, ab.shape[0])]
    offs = list(range(ab.shape[0]))
    lower = sp.diags(diags, [-o for o in offs], shape=(n, n), format="csr")
    upper = sp.diags(diags[1:], offs[1:], shape=(n, n), format="csr")
    return (lower + upper).tocsr()


def lattice_hamiltonian(params: ModelParams, p: Optional[Potential], cfg: LatticeConfig) -> sp.csr_matrix:
    """Real symmetric sparse lattice Hamiltonian in interleaved ordering."""
    cfg.validate_for(params, p)
    return _banded_to_sparse(lattice_banded(params, p, cfg))


def naive_lattice_hamiltonian(params: ModelParams, p: Optional[Potential], cfg: LatticeConfig) -> sp.csr_matrix:
    """All components on integer sites with a centered three-point derivative.

    Kept only to demonstrate the doubled branch this discretization produces.
    """
    m, h, N = params.m, cfg.h, cfg.n_half
    x_int, _, v22, _ = _site_potentials(p, cfg)
    v11 = np.zeros_like(x_int)
    v33 = np.zeros_like(x_int)
    if p is not None and not isinstance(p, Delta):
        segs = segments_of(p)
        v11 = _cell_average([(s.x_left, s.x_right, s.v11) for s in segs], x_int, h)
        v33 = _cell_average([(s.x_left, s.x_right, s.v33) for s in segs], x_int, h)
    n_sites = 2 * N + 1
    D = sp.diags([np.ones(n_sites - 1), -np.ones(n_sites - 1)], [1, -1]) / (2 * h)
    c = 1.0 / SQRT2
    # gauge psi1, psi3 -> i psi1, i psi3 turns -i D into the real block -D
    blocks = [
        [sp.diags(m + v11), -c * D, None],
        [c * D, sp.diags(v22), c * D],
        [None, -c * D, sp.diags(-m + v33)],
    ]
    return sp.bmat(blocks, format="csr")


def flat_energies(p: Optional[Potential]) -> list[float]:
    """Energies of compact flat-band states: 0 outside the support, and
    ``v22`` on any segment with ``2 v22 = v11 + v33``."""
    out = [0.0]
    for s in segments_of(p) if p is not None and not isinstance(p, Delta) else ():
        if abs(2 * s.v22 - s.v11 - s.v33) < 1e-14 and s.v22 not in out:
            out.append(float(s.v22))
    return sorted(out)


def _windows(lo, hi, holes, width):
    """Split ``[lo, hi]`` around each hole of half-width ``width``."""
    edges = [lo]
    for e in sorted(holes):
        if lo < e < hi:
            edges += [e - width, e + width]
    edges.append(hi)
    return [(a, b) for a, b in zip(edges[::2], edges[1::2]) if b > a]


def _eigvals(ab, lo, hi):
    return eig_banded(ab, lower=True, eigvals_only=True, select="v", select_range=(lo, hi))


def _full_band(ab):
    """``(l, u)`` banded storage for ``solve_banded`` from lower storage."""
    k, n = ab.shape[0] - 1, ab.shape[1]
    full = np.zeros((2 * k + 1, n))
    full[k] = ab[0]
    for d in range(1, k + 1):
        full[k + d, : n - d] = ab[d, : n - d]  # below diagonal
        full[k - d, d:] = ab[d, : n - d]  # above diagonal
    return full, k


def _ipr(ab, E, h, iterations=3):
    full, k = _full_band(ab)
    n = ab.shape[1]
    shift = E + 1e-11 * max(1.0, abs(E))
    band = full.copy()
    band[k] -= shift
    v = np.random.default_rng(0).standard_normal(n)
    for _ in range(iterations):
        v = solve_banded((k, k), band, v, check_finite=False)
        v /= np.linalg.norm(v)
    w = v * v
    return float(np.sum(w * w) / h)


def lattice_eigenvalues(params: ModelParams, p: Optional[Potential], cfg: LatticeConfig,
                        lo: float, hi: float) -> np.ndarray:
    """Eigenvalues of the lattice Hamiltonian in ``[lo, hi]``."""
    cfg.validate_for(params, p)
    return _eigvals(lattice_banded(params, p, cfg), lo, hi)


def zero_cluster_size(params: ModelParams, p: Optional[Potential], cfg: LatticeConfig,
                      tol: float = 1e-8) -> int:
    """Number of lattice eigenvalues with ``|E| < tol``."""
    return int(lattice_eigenvalues(params, p, cfg, -tol, tol).size)


def lattice_bound_states(params: ModelParams, p: Optional[Potential], cfg: LatticeConfig) -> list[InGapState]:
    """In-gap lattice eigenstates, labelled bound / trivial / extended.

    The cluster at ``E = 0`` is skipped entirely; other compact flat-band
    clusters are reported once per eigenvalue as ``trivial``. Bound states
    must beat ``IPR_FACTOR`` times the IPR of the most extended continuum
    state adjacent to the gap.
    """
    cfg.validate_for(params, p)
    m, h = params.m, cfg.h
    ab = lattice_banded(params, p, cfg)
    flats = [f for f in flat_energies(p) if f != 0.0]
    edge = m * (1 - GAP_MARGIN)
    # two sweeps that skip the E = 0 cluster and reach a little past each edge
    vals = np.concatenate([_eigvals(ab, -1.5 * m, -FLAT_WINDOW * m), _eigvals(ab, FLAT_WINDOW * m, 1.5 * m)])
    ref = []
    for side in (vals[vals >= m], vals[vals <= -m]):
        if side.size:
            ref.append(_ipr(ab, float(side[np.argmin(np.abs(side))]), h))
    threshold = IPR_FACTOR * (min(ref) if ref else 0.0)
    out = []
    for E in np.sort(vals[np.abs(vals) < edge]):
        if any(abs(E - f) <= FLAT_WINDOW * m for f in flats):
            out.append(InGapState(float(E), float("nan"), True, "trivial"))
            continue
        ipr = _ipr(ab, float(E), h)
        out.append(InGapState(float(E), ipr, True, "bound" if ipr > threshold else "extended"))
    return sorted(out, key=lambda s: s.energy)
