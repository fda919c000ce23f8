import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatband.analytic import (
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
from flatband.exceptions import DomainError, SingularEnergyError, ZeroStrengthError
from flatband.model import ModelParams
from flatband.potentials import Delta, SquareWell, k_squared

M = ModelParams(1.0)

TYPE2_HALF = [0.182443193858, 0.0344674067137, 0.0112707825752,
              0.0053320859693, 0.003069700064, 0.001986335014]
TYPE3_NEG = [-0.145289424766, -0.190905085583, -0.197085899457,
             -0.198628557513, -0.199212027798, -0.199490607137]


def test_delta_examples():
    s = delta_bound_energy(M, 2.0)
    assert s.energy == pytest.approx(1 / np.sqrt(2), abs=1e-15)
    assert s.decay == pytest.approx(1 / np.sqrt(2), abs=1e-15)
    assert delta_bound_energy(M, -2.0).energy == pytest.approx(-1 / np.sqrt(2), abs=1e-15)
    assert delta_bound_energy(M, 2.0).coefficients == (0, 0, 1, 1)
    with pytest.raises(ZeroStrengthError):
        delta_bound_energy(M, 0.0)
    table = find_bound_states(M, Delta(0.0))
    assert len(table) == 0 and table.notes


@given(g=st.floats(-50, 50).filter(lambda g: abs(g) > 1e-6))
def test_delta_odd_monotone_inside_gap(g):
    E = delta_bound_energy(M, g).energy
    assert abs(E) < 1
    assert E == -delta_bound_energy(M, -g).energy
    assert delta_bound_energy(M, g * 1.1).energy > E if g > 0 else True


def test_type2_frozen_levels():
    t = find_bound_states(M, SquareWell.type2(1.0, 0.5), n_max=5)
    assert t.truncated and t.notes
    np.testing.assert_allclose([s.energy for s in t.family()], TYPE2_HALF, rtol=1e-9)
    assert [s.family_index for s in t.family()] == list(range(6))


def test_type2_small_strength_frozen():
    t = find_bound_states(M, SquareWell.type2(1.0, 0.1), n_max=10)
    assert t.by_index(0).energy == pytest.approx(0.036922267369, rel=1e-9)
    assert t.by_index(1).energy == pytest.approx(0.006899920012, rel=1e-9)
    assert t.by_index(10).energy == pytest.approx(0.000100811017, rel=1e-8)


def test_type2_levels_oscillatory_and_decreasing():
    t = find_bound_states(M, SquareWell.type2(1.0, 0.5), n_max=15)
    E = np.array([s.energy for s in t.family()])
    assert np.all(np.diff(E) < 0)
    assert np.all(0.5 / E > 1)
    assert all(s.k_squared > 0 for s in t.family())


def test_type2_repulsive_side_empty():
    # no levels with sign(E) != sign(V)
    t = find_bound_states(M, SquareWell.type2(1.0, 0.5), n_max=5)
    assert np.all(t.energies > 0)


def test_type3_frozen_levels():
    t = find_bound_states(M, SquareWell.type3(1.0, -0.4), n_max=5)
    np.testing.assert_allclose([s.energy for s in t.family()], TYPE3_NEG, rtol=1e-9)
    others = [s.energy for s in t if s.family_index is None]
    np.testing.assert_allclose(others, [0.953868908012], rtol=1e-9)
    assert find_bound_states(M, SquareWell.type3(1.0, 0.4), n_max=3).by_index(0).energy == pytest.approx(
        0.108525099504, rel=1e-9)


def test_type3_family_approaches_half_strength():
    t = find_bound_states(M, SquareWell.type3(1.0, -0.5), n_max=12)
    E = np.array([s.energy for s in t.family()])
    assert np.all(np.abs(E + 0.25) < 0.1)
    assert np.all(np.diff(np.abs(E + 0.25)) < 0)


def test_type1_levels_and_trivial_annotation():
    t = find_bound_states(M, SquareWell.type1(1.0, 0.05))
    np.testing.assert_allclose(t.energies, [-0.998844753307, 0.015802606516, 0.034193163253], rtol=1e-9)
    assert t.trivial_energies == [0.05] and not t.truncated
    assert [s.source for s in t] == ["char_type_I", "char_type_I_evanescent", "char_type_I_evanescent"]
    deep = find_bound_states(M, SquareWell.type1(1.0, -2.5))
    np.testing.assert_allclose(deep.energies, [-0.73404541463, 0.285305154719, 0.995066361062], rtol=1e-9)


def test_char_functions_vanish_at_roots():
    for s in find_bound_states(M, SquareWell.type2(1.0, 0.5), n_max=5):
        assert abs(char_type2(M, 1.0, 0.5, s.energy)) < 1e-9
    for s in find_bound_states(M, SquareWell.type3(1.0, -0.4), n_max=5):
        assert abs(char_type3(M, 1.0, -0.4, s.energy, evanescent=s.k_squared < 0)) < 1e-9


def test_char_domain_errors():
    with pytest.raises(SingularEnergyError):
        char_type2(M, 1.0, 0.5, 0.0)
    with pytest.raises(SingularEnergyError):
        char_type3(M, 1.0, -0.4, -0.2)
    with pytest.raises(DomainError):
        char_type2(M, 1.0, 0.5, 0.7)  # k^2 < 0 here
    with pytest.raises(DomainError):
        char_type1(M, 1.0, 0.05, 0.02)


def test_asymptotic_examples():
    E = [s.energy for s in type2_asymptotic_roots(M, 1.0, 0.5, 2)]
    assert E[0] == pytest.approx(0.05054, abs=5e-5)
    assert E[1] == pytest.approx(0.012665, abs=5e-6)
    np.testing.assert_allclose(hydrogen_spectrum(M, 1.0, 0.5, 1), [0.050661], atol=5e-7)
    assert dos_estimate_near_flatband(M, 1.0, 0.5, 0.001) == pytest.approx(3558.8, rel=1e-4)
    assert dos_estimate_near_flatband(M, 1.0, 0.5, 0.01) == pytest.approx(112.5, rel=1e-3)
    assert type3_accumulation_spectrum(M, 1.0, -0.4, 1)[0] == pytest.approx(-0.18703, abs=5e-6)


def test_asymptotic_formulas_agree_deep_in_family():
    roots = type2_asymptotic_roots(M, 1.0, 0.5, 200)
    hyd = hydrogen_spectrum(M, 1.0, 0.5, 200)
    for s, h in zip(roots, hyd):
        if abs(s.energy) < 0.01:
            assert abs(s.energy - h) / h < 1e-3


def test_asymptotic_error_decreases_with_index():
    # exact level n tends to the n-th asymptotic root, with an O(1/n) relative error
    t = find_bound_states(M, SquareWell.type2(1.0, 0.1), n_max=20)
    asym = type2_asymptotic_roots(M, 1.0, 0.1, 20)
    err = [abs(t.by_index(n).energy - asym[n - 1].energy) / asym[n - 1].energy for n in range(1, 21)]
    assert np.all(np.diff(err) < 0)
    assert err[-1] < 2e-3
    assert err[0] > 0.1


def test_delta_is_limit_of_narrow_type2():
    exact = delta_bound_energy(M, 2.0).energy
    errs = [abs(find_bound_states(M, SquareWell.type2(a, 2.0 / a), n_max=0).by_index(0).energy - exact)
            for a in (0.1, 0.01, 0.001)]
    assert errs[2] < 1e-4
    assert errs[0] / errs[1] > 5 and errs[1] / errs[2] > 5


def test_effective_potential_example():
    view = effective_potential(M, SquareWell.type2(1.0, 0.5), 0.05)
    assert view.segments[0][2] == pytest.approx(-9.975, rel=1e-12)
    assert view.e_eff == pytest.approx(0.05**2 - 1)
    assert view(0.0) == pytest.approx(-9.975) and view(2.0) == 0
    with pytest.raises(SingularEnergyError):
        effective_potential(M, SquareWell.type2(1.0, 0.5), 0.0)


@settings(max_examples=50, deadline=None)
@given(E=st.floats(0.001, 0.49), V=st.floats(0.5, 3))
def test_type2_interior_is_oscillatory(E, V):
    assert k_squared(M, E, 0, V, 0) > 0
