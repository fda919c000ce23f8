import numpy as np
import pytest
import scipy.sparse.linalg as spla

from flatband.analytic import find_bound_states
from flatband.exceptions import ConfigError
from flatband.lattice import (
    LatticeConfig,
    lattice_bound_states,
    lattice_eigenvalues,
    lattice_hamiltonian,
    naive_lattice_hamiltonian,
    zero_cluster_size,
)
from flatband.model import ModelParams
from flatband.potentials import Delta, SquareWell

M = ModelParams(1.0)


def test_hamiltonian_is_hermitian():
    H = lattice_hamiltonian(M, SquareWell(1.0, 0.2, 0.3, -0.1), LatticeConfig(L=2.0, h=0.01))
    assert abs(H - H.conj().T).max() < 1e-14


def test_free_lattice_has_empty_gap():
    cfg = LatticeConfig(L=40.0, h=0.02)
    assert lattice_eigenvalues(M, None, cfg, 0.05, 0.95).size == 0
    assert lattice_eigenvalues(M, None, cfg, -0.95, -0.05).size == 0


def test_flat_cluster_size():
    cfg = LatticeConfig(L=5.0, h=0.02)
    n = zero_cluster_size(M, None, cfg)
    assert n >= (2 * cfg.n_half + 1) * (1 - 5e-4) - 5
    assert n <= 2 * cfg.n_half + 1


def test_delta_bound_state():
    states = [s for s in lattice_bound_states(M, Delta(2.0), LatticeConfig(L=40.0, h=0.01))
              if s.label == "bound"]
    assert len(states) == 1
    assert states[0].energy == pytest.approx(1 / np.sqrt(2), abs=1e-2)


def test_config_errors():
    with pytest.raises(ConfigError):
        LatticeConfig(L=0.0)
    with pytest.raises(ConfigError):
        LatticeConfig(L=5.0, expected_decay=1.0)
    with pytest.raises(ConfigError):
        LatticeConfig(h=0.03).validate_for(M)
    with pytest.raises(ConfigError):
        LatticeConfig(h=0.02).validate_for(M, SquareWell.type2(1.0, 0.5))


def test_naive_discretization_doubles_levels():
    cfg = LatticeConfig(L=10.0, h=0.01)
    p = SquareWell.type2(1.0, 0.5)
    naive = naive_lattice_hamiltonian(M, p, cfg)
    vals = np.sort(spla.eigsh(naive, k=6, sigma=0.1824, return_eigenvectors=False))
    close = vals[np.abs(vals - 0.1824) < 1e-3]
    assert close.size == 2  # spurious partner from the doubled branch
    good = lattice_eigenvalues(M, p, cfg, 0.17, 0.19)
    assert good.size == 1


def test_second_order_convergence():
    p = SquareWell.type2(2.0, 0.5)
    exact = find_bound_states(M, p, n_max=0).by_index(0).energy
    errs = []
    for h in (0.02, 0.01, 0.005):
        vals = lattice_eigenvalues(M, p, LatticeConfig(L=20.0, h=h), exact - 0.01, exact + 0.01)
        errs.append(abs(vals[np.argmin(np.abs(vals - exact))] - exact))
    slope = np.polyfit(np.log([0.02, 0.01, 0.005]), np.log(errs), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.2)
