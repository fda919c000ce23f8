import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatband.exceptions import SingularEnergyError, ThresholdError
from flatband.greens import (

    decay_constant,
    dos,
    dos_resolvent_integral,
    dos_threshold_exponent,
    green_coordinate,
    green_momentum,
    spectral_green_quadrature,
    trace_regular_coincident,
)
from flatband.model import ModelParams, bloch_hamiltonian


def test_momentum_k0_is_diagonal(unit):
    G = green_momentum(unit, 0.0, 1j)
    np.testing.assert_allclose(G, np.diag([1 / (1j - 1), 1 / 1j, 1 / (1j + 1)]), atol=1e-15)


def test_momentum_entry_22_matches_direct_inverse(unit):
    # 2(m^2 - z^2) / (2(m^2 z + k^2 z - z^3)) = -6 / -8 at k=1, z=2
    G = green_momentum(unit, 1.0, 2.0)
    assert G[1, 1] == pytest.approx(0.75, abs=1e-15)


@settings(max_examples=100)
@given(k=st.floats(-10, 10, allow_nan=False),
       zr=st.floats(-3, 3, allow_nan=False), zi=st.floats(0.05, 3, allow_nan=False))
def test_momentum_is_resolvent(k, zr, zi):
    p = ModelParams(1.0)
    z = complex(zr, zi)
    G = green_momentum(p, k, z)
    ref = np.linalg.inv(z * np.eye(3) - bloch_hamiltonian(p, k))
    assert np.max(np.abs(G - ref)) < 1e-10 * max(1.0, np.max(np.abs(ref)))


def test_momentum_rejects_band_energy(unit):
    with pytest.raises(SingularEnergyError):
        green_momentum(unit, 1.0, np.sqrt(2.0))
    with pytest.raises(SingularEnergyError):
        green_momentum(unit, 0.3, 0.0)


def test_coordinate_examples(unit):
    assert green_coordinate(unit, 0.3, 0.3, 0.5).regular[1, 1] == pytest.approx(np.sqrt(0.75), rel=1e-14)
    assert green_coordinate(unit, 1.0, 0.0, 0.5).regular[1, 1] == pytest.approx(0.364268, abs=5e-7)
    d = green_coordinate(unit, 0.2, -1.0, 0.5).delta_coeff
    assert d[0, 0] == 1 and d[0, 2] == -1 and d[2, 2] == 1 and d[2, 0] == -1
    assert np.count_nonzero(d) == 4


def test_coordinate_sign_entries_undefined_at_coincidence(unit):
    g = green_coordinate(unit, 0.0, 0.0, 0.5 + 0.1j).regular
    assert np.isnan(g[0, 1]) and np.isnan(g[1, 2])
    assert np.isfinite(g[0, 0]) and np.isfinite(g[0, 2])


def test_coordinate_symmetric_and_decaying(unit):
    for z in (0.5, 0.3 + 0.4j, -2 + 0.5j, 3j):
        g = green_coordinate(unit, 0.7, -0.4, z).regular
        assert np.allclose(g, g.T)
        assert decay_constant(unit, z).real > 0
        far = green_coordinate(unit, 30.0, 0.0, z).regular
        assert np.max(np.abs(far)) < np.max(np.abs(g))


def test_coordinate_rejects_spectrum(unit):
    for z in (0.0, 1.0, -1.0, 1.5, -2.0, 1e-12):
        with pytest.raises(SingularEnergyError):
            green_coordinate(unit, 0.0, 1.0, z)


def test_dos_examples(unit):
    assert dos(unit, 1.25).continuum == pytest.approx(1.25 / (np.pi * 0.75), rel=1e-14)
    assert dos(unit, 1.25).continuum == pytest.approx(0.53052, abs=1e-5)
    assert dos(unit, 0.5).continuum == 0 and not dos(unit, 0.5).flat_weight
    assert dos(unit, 0.0).continuum == 0 and dos(unit, 0.0).flat_weight
    assert dos(unit, -1.25).continuum == dos(unit, 1.25).continuum
    for E in (1.0, -1.0):
        with pytest.raises(ThresholdError):
            dos(unit, E)


def test_dos_threshold_exponent(unit):
    assert abs(dos_threshold_exponent(unit) + 0.5) <= 0.005


@pytest.mark.parametrize("x,xp,z", [(0.0, 0.0, 0.5 + 0.5j), (2.0, 0.0, 1j), (0.0, 0.0, 0.5), (0.4, -0.9, -0.6)])
def test_spectral_quadrature_examples(unit, x, xp, z):
    num = spectral_green_quadrature(unit, x, xp, z, k_cut=200, n_nodes=2**14)
    ref = green_coordinate(unit, x, xp, z)
    assert np.nanmax(np.abs(num.regular - ref.regular)) < 1e-6
    np.testing.assert_allclose(num.delta_coeff, ref.delta_coeff, atol=1e-12)


def test_spectral_quadrature_random_grid(unit):
    rng = np.random.default_rng(20240531)
    worst = 0.0
    for _ in range(20):
        x, xp = rng.uniform(-3, 3, 2)
        if rng.random() < 0.5:
            z = complex(rng.uniform(-3, 3), rng.choice([-1, 1]) * rng.uniform(0.2, 2))
        else:
            z = complex(rng.choice([-1, 1]) * rng.uniform(0.05, 0.95), 0.0)
        num = spectral_green_quadrature(unit, x, xp, z).regular
        worst = max(worst, np.nanmax(np.abs(num - green_coordinate(unit, x, xp, z).regular)))
    assert worst < 1e-6


@pytest.mark.parametrize("z", [0.5, -0.3, 0.9, 0.5 + 0.5j])
def test_trace_matches_dos_integral(unit, z):
    assert abs(trace_regular_coincident(unit, z) - dos_resolvent_integral(unit, z, e_cut=50)) < 1e-4
    kappa = decay_constant(unit, z)
    assert trace_regular_coincident(unit, z) == pytest.approx(-z / kappa, rel=1e-13)
