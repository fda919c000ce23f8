"""Bound-state records and their tabular serialization."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .model import ModelParams
from .potentials import Potential, potential_to_dict

UNITS = {"energy": "m", "length": "1/m", "wavenumber": "m"}
FLOAT_FMT = "{:.12g}"


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FLOAT_FMT.format(float(x) + 0.0)  # + 0.0 turns -0.0 into 0.0


def jnum(x):
    """Float rounded to 12 significant digits for byte-stable JSON."""
    if x is None:
        return None
    return float(FLOAT_FMT.format(float(x) + 0.0))


@dataclass(frozen=True)
class BoundState:
    """One solved level.

    ``interior_k`` is ``sqrt(k^2)`` of the (first) interior segment; it is
    purely imaginary when that segment is evanescent. ``coefficients`` are
    ``(A, B, C, D)`` in ``psi2 = A e^{ikx} + B e^{-ikx}`` inside and
    ``C e^{-lambda x}``, ``D e^{lambda x}`` outside, up to normalization.
    """

    energy: float
    decay: float
    family_index: Optional[int] = None
    interior_k: Optional[complex] = None
    coefficients: Optional[tuple] = None
    source: str = ""
    residual: float = 0.0

    @property
    def k_squared(self) -> Optional[float]:
        if self.interior_k is None:
            return None
        return float((complex(self.interior_k) ** 2).real)

    @property
    def oscillatory(self) -> Optional[bool]:
        ksq = self.k_squared
        return None if ksq is None else ksq > 0

    def to_dict(self) -> dict:
        k = self.interior_k
        return {
            "n": self.family_index,
            "E": jnum(self.energy),
            "lambda": jnum(self.decay),
            "k": None if k is None else jnum(abs(complex(k))),
            "k_squared": jnum(self.k_squared),
            "solver": self.source,
            "residual": jnum(self.residual),
        }


@dataclass
class SpectrumTable:
    """Ordered bound states plus provenance and diagnostics."""

    states: list[BoundState]
    params: ModelParams
    potential: Optional[Potential] = None
    truncated: bool = False
    notes: list[str] = field(default_factory=list)
    trivial_energies: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i):
        return self.states[i]

    @property
    def energies(self) -> np.ndarray:
        return np.array([s.energy for s in self.states])

    def family(self) -> list[BoundState]:
        """States carrying a family index, ordered by index."""
        fam = [s for s in self.states if s.family_index is not None]
        return sorted(fam, key=lambda s: s.family_index)

    def by_index(self, n: int) -> BoundState:
        for s in self.states:
            if s.family_index == n:
                return s
        raise KeyError(n)

    def with_source(self, source: str) -> "SpectrumTable":
        return replace(self, states=[replace(s, source=source) for s in self.states])

    CSV_COLUMNS = ("n", "E[m]", "lambda[m]", "k[m]", "k_squared[m^2]", "solver", "residual")

    def records(self, extra: Sequence = ()) -> list[list]:
        """Typed rows in ``CSV_COLUMNS`` order (numbers rounded, ``None`` kept)."""
        keys = ("n", "E", "lambda", "k", "k_squared", "solver", "residual")
        return [list(extra) + [s.to_dict()[k] for k in keys] for s in self.states]

    def rows(self, extra: Sequence = ()) -> list[list[str]]:
        return [[v if isinstance(v, str) else fmt(v) for v in r] for r in self.records(extra)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        w.writerows(self.rows())
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "schema": "flatband.spectrum/1",
            "units": UNITS,
            "params": {"m": jnum(self.params.m)},
            "potential": None if self.potential is None else potential_to_dict(self.potential),
            "truncated": bool(self.truncated),
            "notes": list(self.notes),
            "trivial_energies": [jnum(e) for e in self.trivial_energies],
            "states": [s.to_dict() for s in self.states],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"
