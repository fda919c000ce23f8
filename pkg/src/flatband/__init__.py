"""Bound states of a one-dimensional spin-1 Dirac model with a flat band."""
from .analytic import (
    char_type1,
    char_type2,
    char_type3,
    delta_bound_energy,
    dos_estimate_near_flatband,
    effective_potential,
    find_bound_states,
    hydrogen_spectrum,
    type2_asymptotic_roots,
    type3_accumulation_spectrum,
)
from .exceptions import (
    ConfigError,
    DomainError,
    FlatbandError,
    SingularEnergyError,
    ThresholdError,
    ZeroStrengthError,
)
from .generic import determinant_scan, matching_conditions, solve_generic, wavefunction
from .greens import dos, green_coordinate, green_momentum, spectral_green_quadrature
from .lattice import LatticeConfig, lattice_bound_states, lattice_hamiltonian
from .model import BandIndex, ModelParams, dispersion, eigenstate
from .nystrom import nystrom_characteristic, nystrom_roots
from .potentials import Delta, PiecewiseConstant, Segment, SquareWell, classify, singular_energies
from .spectrum import BoundState, SpectrumTable

__all__ = [
    "BandIndex", "BoundState", "ConfigError", "Delta", "DomainError", "FlatbandError",
    "LatticeConfig", "ModelParams", "PiecewiseConstant", "Segment", "SingularEnergyError",
    "SpectrumTable", "SquareWell", "ThresholdError", "ZeroStrengthError",
    "char_type1", "char_type2", "char_type3", "classify", "delta_bound_energy",
    "determinant_scan", "dispersion", "dos", "dos_estimate_near_flatband", "effective_potential",
    "eigenstate", "find_bound_states", "green_coordinate", "green_momentum", "hydrogen_spectrum",
    "lattice_bound_states", "lattice_hamiltonian", "matching_conditions", "nystrom_characteristic",
    "nystrom_roots", "singular_energies", "solve_generic", "spectral_green_quadrature",
    "type2_asymptotic_roots", "type3_accumulation_spectrum", "wavefunction",
]
