import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from flatband.exceptions import FlatbandError
from flatband.model import ModelParams
from flatband.potentials import (
    Delta,
    PiecewiseConstant,
    PotentialClass,
    Segment,
    SquareWell,
    accumulation_points,
    classify,
    k_squared,
    potential_from_dict,
    potential_to_dict,
    singular_energies,
)

P = ModelParams(1.0)


def test_classify_examples():
    assert classify(SquareWell(1, 0.5, 0.5, 0.5)) is PotentialClass.TYPE_I
    assert classify(SquareWell(1, 0, 0.5, 0)) is PotentialClass.TYPE_II
    assert classify(SquareWell(1, 0.5, 0, 0)) is PotentialClass.TYPE_III
    assert classify(SquareWell(1, 0.5, 0.1, 0)) is PotentialClass.GENERAL
    assert classify(SquareWell(1, 0, 0, 0)) is PotentialClass.GENERAL
    assert classify(Delta(1.0)) is PotentialClass.DELTA


def test_square_well_needs_positive_width():
    with pytest.raises(FlatbandError):
        SquareWell(0.0, 0, 1, 0)


def test_piecewise_rejects_overlap():
    with pytest.raises(FlatbandError):
        PiecewiseConstant(((-1, 0.5, 0, 1, 0), (0, 1, 0, 1, 0)))


def test_classify_stable_under_reordering():
    a = Segment(-3, -2, 0, 0.5, 0)
    b = Segment(2, 3, 0, 0.5, 0)
    assert classify(PiecewiseConstant((a, b))) == classify(PiecewiseConstant((b, a)))
    assert PiecewiseConstant((a, b)).segments == PiecewiseConstant((b, a)).segments


def test_singular_energy_examples():
    assert sorted(singular_energies(SquareWell.type2(1, 0.5), P).points) == [-1, 0, 0.5, 1]
    assert 0.2 in singular_energies(SquareWell.type3(1, 0.4), P).points
    assert sorted(singular_energies(Delta(1.0), P).points) == [-1, 0, 1]


def test_intervals_avoid_singular_points():
    s = singular_energies(SquareWell.type3(1, -0.4), P)
    for lo, hi in s.intervals():
        assert not any(lo <= e <= hi for e in s.points)


def test_accumulation_points_of_named_wells():
    (ap,) = accumulation_points(SquareWell.type2(1, 0.5), P)
    assert ap.energy == 0 and ap.side == 1 and ap.strength == pytest.approx(0.5)
    (ap,) = accumulation_points(SquareWell.type3(1, -0.4), P)
    assert ap.energy == pytest.approx(-0.2) and ap.side == 1
    assert accumulation_points(SquareWell.type1(1, 0.3), P) == [] or all(
        a.energy == pytest.approx(0.3) for a in accumulation_points(SquareWell.type1(1, 0.3), P))


@settings(max_examples=200)
@given(E=st.floats(-0.99, 0.99).filter(lambda e: abs(e) > 1e-3), V=st.floats(-3, 3))
def test_k_squared_reduces_to_named_forms(E, V):
    assume(abs(E - V) > 1e-3)  # E = V zeroes the shared denominator
    ref1 = (E - V) ** 2 - 1
    assert abs(k_squared(P, E, V, V, V) - ref1) <= 1e-12 * max(1.0, abs(ref1))
    ref2 = (E - V) * (E * E - 1) / E
    assert abs(k_squared(P, E, 0, V, 0) - ref2) <= 1e-12 * max(1.0, abs(ref2))


@pytest.mark.parametrize("p", [
    Delta(0.7), Delta(-1.0, x0=0.5), SquareWell(2, 0.1, 0.2, 0.3), SquareWell(1, 0, 1, 0, center=-2),
    PiecewiseConstant(((-3, -2, 0, 0.5, 0), (2, 3, 0.1, 0, 0))),
])
def test_json_round_trip(p):
    assert potential_from_dict(potential_to_dict(p)) == p


def test_json_unknown_kind():
    with pytest.raises(FlatbandError):
        potential_from_dict({"kind": "coulomb"})
