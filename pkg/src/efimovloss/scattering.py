"""Tabulated pairwise scattering lengths and universality checks."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from typing import NamedTuple, TextIO

import numpy as np

from .errors import DomainError, ParseError, RangeError
from .physconst import DEFAULT, PhysicalConstants

HEADER = ("B_gauss", "a12_a0", "a23_a0", "a13_a0")
PAIRS = ("a12", "a23", "a13")


class ScatteringTriple(NamedTuple):
    """Scattering lengths (a0) of the three spin pairs at field ``B`` (G)."""

    a12: float
    a23: float
    a13: float
    B: float = math.nan

    def lengths(self) -> tuple[float, float, float]:
        return (self.a12, self.a23, self.a13)


@dataclass(frozen=True)
class ScatteringTable:
    """Rows of (B [G], a12, a23, a13 [a0]) with strictly increasing B."""

    B: np.ndarray
    a: np.ndarray  # shape (n, 3), columns a12, a23, a13

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        a = np.asarray(self.a, dtype=float).reshape(len(B), 3)
        if len(B) < 2:
            raise ParseError("scattering table needs at least 2 rows")
        if not (np.all(np.isfinite(B)) and np.all(np.isfinite(a))):
            bad = int(np.flatnonzero(~(np.isfinite(B) & np.all(np.isfinite(a), axis=1)))[0])
            raise ParseError(f"row {bad}: non-finite value")
        steps = np.diff(B)
        if np.any(steps <= 0):
            bad = int(np.flatnonzero(steps <= 0)[0]) + 1
            raise ParseError(f"row {bad}: B = {B[bad]} G is not above previous {B[bad - 1]} G")
        B.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "a", a)

    def __len__(self):
        return len(self.B)

    @property
    def field_range(self) -> tuple[float, float]:
        return float(self.B[0]), float(self.B[-1])

    def rows(self):
        for B, (a12, a23, a13) in zip(self.B, self.a):
            yield ScatteringTriple(float(a12), float(a23), float(a13), float(B))


def load_table(source: TextIO | str) -> ScatteringTable:
    """Parse a ``B_gauss,a12_a0,a23_a0,a13_a0`` CSV stream.

    Lines starting with ``#`` before the header are skipped.  Row indices in
    error messages count data rows from 0.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    lines = (ln for ln in source if ln.strip() and not ln.lstrip().startswith("#"))
    reader = csv.reader(lines)
    try:
        header = tuple(h.strip() for h in next(reader))
    except StopIteration:
        raise ParseError("empty scattering table") from None
    if header != HEADER:
        raise ParseError(f"expected header {','.join(HEADER)}, got {','.join(header)}")
    Bs, rows = [], []
    for i, rec in enumerate(reader):
        if len(rec) != 4:
            raise ParseError(f"row {i}: expected 4 columns, got {len(rec)}")
        try:
            vals = [float(x) for x in rec]
        except ValueError:
            raise ParseError(f"row {i}: not a number in {rec}") from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError(f"row {i}: non-finite value")
        if Bs and vals[0] <= Bs[-1]:
            raise ParseError(f"row {i}: B = {vals[0]} G does not increase")
        Bs.append(vals[0])
        rows.append(vals[1:])
    return ScatteringTable(np.array(Bs), np.array(rows).reshape(-1, 3))


def load_table_file(path) -> ScatteringTable:
    with open(path, newline="") as f:
        return load_table(f)


def sample_table() -> ScatteringTable:
    """Bundled approximate 6Li table for 840-1600 G (see the CSV header)."""
    text = resources.files("efimovloss.data").joinpath("li6_sample_table.csv").read_text()
    return load_table(text)


def scattering_at(table: ScatteringTable, B: float) -> ScatteringTriple:
    """Piecewise-linear interpolation of each channel at field ``B`` (G)."""
    lo, hi = table.field_range
    if not lo <= B <= hi:
        raise RangeError(f"B = {B} G outside table range [{lo}, {hi}] G")
    i = int(np.searchsorted(table.B, B, side="right")) - 1
    if i == len(table) - 1 or table.B[i] == B:
        return ScatteringTriple(*(float(x) for x in table.a[i]), float(B))
    w = (B - table.B[i]) / (table.B[i + 1] - table.B[i])
    a = (1.0 - w) * table.a[i] + w * table.a[i + 1]
    return ScatteringTriple(*(float(x) for x in a), float(B))


def vdw_length(C6: float, m: float | None = None, const: PhysicalConstants = DEFAULT) -> float:
    """van der Waals length (m C6 / hbar^2)^(1/4); C6 in J m^6."""
    if not C6 > 0:
        raise DomainError(f"C6 must be positive, got {C6}")
    m = const.m if m is None else m
    return (m * C6 / const.hbar**2) ** 0.25


def vdw_energy(lvdw: float, const: PhysicalConstants = DEFAULT) -> float:
    return const.hbar**2 / (const.m * lvdw**2)


@dataclass(frozen=True)
class Universality:
    pairs: dict[str, bool]
    energy: bool

    @property
    def universal(self) -> bool:
        return self.energy and all(self.pairs.values())


def classify_universality(
    triple: ScatteringTriple,
    E: float,
    lvdw: float,
    const: PhysicalConstants = DEFAULT,
) -> Universality:
    """Flag which pairs satisfy |a_ij| >= 2 lvdw and whether E >= E_vdW.

    ``triple`` is in a0, ``E`` in J and ``lvdw`` in m.  Both boundaries count
    as universal.
    """
    if not lvdw > 0:
        raise DomainError(f"lvdw must be positive, got {lvdw}")
    pairs = {
        name: abs(a) * const.a0 >= 2.0 * lvdw for name, a in zip(PAIRS, triple.lengths())
    }
    return Universality(pairs=pairs, energy=E >= vdw_energy(lvdw, const))
