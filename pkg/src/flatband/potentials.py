"""Diagonal potentials ``diag(V11(x), V22(x), V33(x))`` and their classification."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .exceptions import FlatbandError
from .model import ModelParams

#: half-width of the window around a singular energy skipped while bracketing
BRACKET_EXCLUSION = 1e-9
#: roots closer than this to a singular energy are rejected
ROOT_EXCLUSION = 1e-12


@dataclass(frozen=True)
class Segment:
    x_left: float
    x_right: float
    v11: float = 0.0
    v22: float = 0.0
    v33: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.x_left) and np.isfinite(self.x_right)):
            raise FlatbandError("segment bounds must be finite")
        if self.x_right <= self.x_left:
            raise FlatbandError(f"empty segment [{self.x_left}, {self.x_right}]")

    @property
    def width(self) -> float:
        return self.x_right - self.x_left

    @property
    def values(self) -> tuple[float, float, float]:
        return (self.v11, self.v22, self.v33)


@dataclass(frozen=True)
class Delta:
    """``V22(x) = g delta(x - x0)``; the other diagonal entries vanish."""

    g: float
    x0: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.g):
            raise FlatbandError("delta strength must be finite")


@dataclass(frozen=True)
class SquareWell:
    """Constant ``(v11, v22, v33)`` on ``|x - center| < a/2``, zero outside."""

    a: float
    v11: float = 0.0
    v22: float = 0.0
    v33: float = 0.0
    center: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a > 0):
            raise FlatbandError(f"well width must be positive, got {self.a!r}")

    @classmethod
    def type1(cls, a: float, V: float) -> "SquareWell":
        return cls(a, V, V, V)

    @classmethod
    def type2(cls, a: float, V: float) -> "SquareWell":
        return cls(a, 0.0, V, 0.0)

    @classmethod
    def type3(cls, a: float, V: float) -> "SquareWell":
        return cls(a, V, 0.0, 0.0)

    def segment(self) -> Segment:
        h = self.a / 2
        return Segment(self.center - h, self.center + h, self.v11, self.v22, self.v33)


@dataclass(frozen=True)
class PiecewiseConstant:
    """Finite list of disjoint constant segments; zero potential elsewhere.

    Segments are stored sorted by position, so construction order is irrelevant.
    """

    segments: tuple[Segment, ...] = field(default_factory=tuple)

    def __post_init__(self):
        segs = tuple(sorted((s if isinstance(s, Segment) else Segment(*s) for s in self.segments),
                            key=lambda s: s.x_left))
        for left, right in zip(segs, segs[1:]):
            if right.x_left < left.x_right:
                raise FlatbandError("piecewise segments overlap")
        object.__setattr__(self, "segments", segs)


Potential = Union[Delta, SquareWell, PiecewiseConstant]


class PotentialClass(enum.Enum):
    DELTA = "delta"
    TYPE_I = "type_I"
    TYPE_II = "type_II"
    TYPE_III = "type_III"
    GENERAL = "general"


def _classify_values(v11: float, v22: float, v33: float) -> PotentialClass:
    if v11 == v22 == v33 == 0:
        return PotentialClass.GENERAL
    if v11 == v22 == v33:
        return PotentialClass.TYPE_I
    if v11 == 0 and v33 == 0 and v22 != 0:
        return PotentialClass.TYPE_II
    if v22 == 0 and v33 == 0 and v11 != 0:
        return PotentialClass.TYPE_III
    return PotentialClass.GENERAL


def classify(p: Potential) -> PotentialClass:
    """Named family of ``p``; a single piecewise segment is treated as a square well."""
    if isinstance(p, Delta):
        return PotentialClass.DELTA
    if isinstance(p, SquareWell):
        return _classify_values(p.v11, p.v22, p.v33)
    if isinstance(p, PiecewiseConstant):
        if len(p.segments) == 1:
            return _classify_values(*p.segments[0].values)
        return PotentialClass.GENERAL
    raise TypeError(f"not a potential: {p!r}")


def as_single_well(p: Potential) -> SquareWell | None:
    """The square well equivalent to ``p``, if it has exactly one segment."""
    if isinstance(p, SquareWell):
        return p
    if isinstance(p, PiecewiseConstant) and len(p.segments) == 1:
        s = p.segments[0]
        return SquareWell(s.width, s.v11, s.v22, s.v33, center=0.5 * (s.x_left + s.x_right))
    return None


def segments_of(p: Potential) -> tuple[Segment, ...]:
    if isinstance(p, Delta):
        return ()
    if isinstance(p, SquareWell):
        return (p.segment(),)
    return p.segments


def strength_levels(p: Potential) -> list[tuple[float, float, float]]:
    """Distinct ``(v11, v22, v33)`` values present, including the free exterior."""
    levels = {(0.0, 0.0, 0.0)}
    for s in segments_of(p):
        levels.add(tuple(float(v) for v in s.values))
    return sorted(levels)


def k_squared(params: ModelParams, E, v11: float, v22: float, v33: float):
    """Interior ``k^2 = 2(E-v22)(E-m-v11)(E+m-v33) / (2E-v11-v33)``."""
    m = params.m
    E = np.asarray(E, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 2 * (E - v22) * (E - m - v11) * (E + m - v33) / (2 * E - v11 - v33)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SingularEnergySet:
    points: tuple[float, ...]

    def __contains__(self, E) -> bool:
        return any(abs(E - p) <= ROOT_EXCLUSION for p in self.points)

    def intervals(self, margin: float = BRACKET_EXCLUSION) -> list[tuple[float, float]]:
        """Open sub-intervals of the gap between consecutive singular points."""
        pts = self.points
        out = []
        for lo, hi in zip(pts, pts[1:]):
            if hi - lo > 2 * margin:
                out.append((lo + margin, hi - margin))
        return out


def singular_energies(p: Potential, params: ModelParams) -> SingularEnergySet:
    """Energies in ``[-m, m]`` where an interior wave vector or a matching
    coefficient vanishes or diverges."""
    m = params.m
    pts = {-m, 0.0, m}
    for v11, v22, v33 in strength_levels(p):
        for e in (v22, 0.5 * (v11 + v33), m + v11, v33 - m):
            if -m <= e <= m:
                pts.add(float(e))
    return SingularEnergySet(tuple(sorted(pts)))


@dataclass(frozen=True)
class AccumulationPoint:
    """Energy where ``k^2`` of some segment diverges, and the side on which it
    tends to ``+inf`` (``+1`` means from above)."""

    energy: float
    side: int
    strength: float  # lim |E - energy| * k^2
    width: float  # total width of segments sharing this point


def accumulation_points(p: Potential, params: ModelParams) -> list[AccumulationPoint]:
    m = params.m
    found: dict[float, list] = {}
    for s in segments_of(p):
        e_star = 0.5 * (s.v11 + s.v33)
        if not -m < e_star < m:
            continue
        num = 2 * (e_star - s.v22) * (e_star - m - s.v11) * (e_star + m - s.v33)
        if num == 0:
            continue
        entry = found.setdefault(e_star, [0.0, 0.0, 0.0])
        entry[0] = num
        entry[1] = max(entry[1], abs(num) / 2)
        entry[2] += s.width
    return [
        AccumulationPoint(e, int(np.sign(v[0])), v[1], v[2]) for e, v in sorted(found.items())
    ]


def potential_to_dict(p: Potential) -> dict:
    if isinstance(p, Delta):
        out = {"kind": "delta", "g": p.g}
        if p.x0:
            out["x0"] = p.x0
        return out
    if isinstance(p, SquareWell):
        out = {"kind": "square", "a": p.a, "v11": p.v11, "v22": p.v22, "v33": p.v33}
        if p.center:
            out["center"] = p.center
        return out
    return {
        "kind": "piecewise",
        "segments": [
            {"x_left": s.x_left, "x_right": s.x_right, "v11": s.v11, "v22": s.v22, "v33": s.v33}
            for s in p.segments
        ],
    }


def potential_from_dict(d: dict) -> Potential:
    kind = d.get("kind")
    if kind == "delta":
        return Delta(float(d["g"]), float(d.get("x0", 0.0)))
    if kind == "square":
        return SquareWell(
            float(d["a"]),
            float(d.get("v11", 0.0)),
            float(d.get("v22", 0.0)),
            float(d.get("v33", 0.0)),
            center=float(d.get("center", 0.0)),
        )
    if kind == "piecewise":
        segs = []
        for s in d["segments"]:
            if isinstance(s, dict):
                segs.append(Segment(float(s["x_left"]), float(s["x_right"]),
                                    float(s.get("v11", 0.0)), float(s.get("v22", 0.0)),
                                    float(s.get("v33", 0.0))))
            else:
                segs.append(Segment(*map(float, s)))
        return PiecewiseConstant(tuple(segs))
    raise FlatbandError(f"unknown potential kind {kind!r}")
