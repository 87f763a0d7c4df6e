"""Physical constants, the 6Li atom, and unit conversion.

All computation in the package is done in SI.  The presentation units that
show up in the cold-atom literature (Bohr radii, Gauss, nK, kHz, cm^6/s) are
only used at the edges: file formats, the command line and reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from scipy import constants as _sc

from .errors import DomainError, ParseError, UnitError

__all__ = [
    "PhysicalConstants",
    "DEFAULT",
    "Quantity",
    "convert",
    "UNITS",
    "load_constants",
]

LI6_MASS_U = 6.0151228


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants plus the mass of one 6Li atom, all SI."""

    hbar: float = _sc.hbar
    kB: float = _sc.k
    m: float = LI6_MASS_U * _sc.physical_constants["atomic mass constant"][0]
    a0: float = _sc.physical_constants["Bohr radius"][0]

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"constant {f.name} must be finite and positive, got {value!r}")

    @property
    def h(self) -> float:
        return 2.0 * math.pi * self.hbar

    def with_overrides(self, **overrides: float) -> "PhysicalConstants":
        unknown = set(overrides) - {f.name for f in fields(self)}
        if unknown:
            raise ParseError(f"unknown constant(s): {', '.join(sorted(unknown))}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})


DEFAULT = PhysicalConstants()


def load_constants(path: str | Path, base: PhysicalConstants = DEFAULT) -> PhysicalConstants:
    """Read ``key = value`` overrides (SI) from a flat text file.

    Blank lines and ``#`` comments are ignored.  ``h`` is not accepted since it
    is tied to ``hbar``.
    """
    overrides = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            overrides[key] = float(value)
        except ValueError:
            raise ParseError(f"{path}:{lineno}: not a number: {value!r}") from None
    return base.with_overrides(**overrides)


# unit name -> (dimension, SI value of one unit); the SI unit of each dimension
# is listed first.
def _unit_table(c: PhysicalConstants = DEFAULT) -> dict[str, tuple[str, float]]:
    return {
        "m": ("length", 1.0),
        "cm": ("length", 1e-2),
        "um": ("length", 1e-6),
        "nm": ("length", 1e-9),
        "a0": ("length", c.a0),
        "s": ("time", 1.0),
        "ms": ("time", 1e-3),
        "us": ("time", 1e-6),
        "ns": ("time", 1e-9),
        "J": ("energy", 1.0),
        "h*Hz": ("energy", c.h),
        "h*kHz": ("energy", c.h * 1e3),
        "h*MHz": ("energy", c.h * 1e6),
        "kB*K": ("energy", c.kB),
        "kB*nK": ("energy", c.kB * 1e-9),
        "K": ("temperature", 1.0),
        "mK": ("temperature", 1e-3),
        "uK": ("temperature", 1e-6),
        "nK": ("temperature", 1e-9),
        "Hz": ("frequency", 1.0),
        "kHz": ("frequency", 1e3),
        "MHz": ("frequency", 1e6),
        "rad/s": ("frequency", 1.0 / (2.0 * math.pi)),
        "tesla": ("magnetic-field", 1.0),
        "G": ("magnetic-field", 1e-4),
        "m^6/s": ("rate-constant-L3", 1.0),
        "cm^6/s": ("rate-constant-L3", 1e-12),
        "1/m": ("inverse-length", 1.0),
        "1/cm": ("inverse-length", 1e2),
        "1/a0": ("inverse-length", 1.0 / c.a0),
    }


UNITS = _unit_table()


@dataclass(frozen=True)
class Quantity:
    """A number tagged with one of a handful of units.

    Only addition and subtraction between like dimensions and scaling by plain
    numbers are supported; this is not a units framework.
    """

    value: float
    unit: str

    def __post_init__(self):
        if self.unit not in UNITS:
            raise UnitError(f"unknown unit {self.unit!r}")

    @property
    def dimension(self) -> str:
        return UNITS[self.unit][0]

    def si(self) -> float:
        return self.value * UNITS[self.unit][1]

    def to(self, unit: str) -> "Quantity":
        return convert(self, unit)

    def _coerce(self, other):
        if not isinstance(other, Quantity):
            return NotImplemented
        if other.dimension != self.dimension:
            raise UnitError(f"cannot combine {self.dimension} with {other.dimension}")
        return convert(other, self.unit).value

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return Quantity(self.value + v, self.unit)

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return v
        return Quantity(self.value - v, self.unit)

    def __mul__(self, k):
        if isinstance(k, Quantity):
            raise UnitError("products of quantities are not supported")
        return Quantity(self.value * k, self.unit)

    __rmul__ = __mul__

    def __truediv__(self, k):
        if isinstance(k, Quantity):
            raise UnitError("ratios of quantities are not supported")
        return Quantity(self.value / k, self.unit)

    def __neg__(self):
        return Quantity(-self.value, self.unit)

    def __lt__(self, other):
        return self.value < self._coerce(other)

    def __le__(self, other):
        return self.value <= self._coerce(other)


def convert(q: Quantity, unit: str) -> Quantity:
    """Express ``q`` in ``unit``; raises UnitError on a dimension mismatch."""
    try:
        dim, scale = UNITS[unit]
    except KeyError:
        raise UnitError(f"unknown unit {unit!r}") from None
    if dim != q.dimension:
        raise UnitError(f"cannot convert {q.dimension} ({q.unit}) to {dim} ({unit})")
    if unit == q.unit:
        return q
    return Quantity(q.value * UNITS[q.unit][1] / scale, unit)
