"""Harmonic traps, thermal densities and Fermi degeneracy.

Frequencies are ordinary frequencies in Hz (not angular).  Fields are in G.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError, RangeError
from .physconst import DEFAULT, PhysicalConstants


def _trap_a(B: float) -> tuple[float, float, float]:
    return 15.0, 0.242 * math.sqrt(B), 12.0


def _trap_b(B: float) -> tuple[float, float, float]:
    dB = B - 842.0
    return 33.0 * math.sqrt(1.0 + 1.4e-3 * dB), 21.0 * math.sqrt(1.0 + 3.6e-3 * dB), 94.0


@dataclass(frozen=True)
class TrapConfig:
    """A harmonic trap.

    ``kind`` is ``"A"``, ``"B"`` or ``"custom"``.  For custom traps the
    frequencies are fixed at ``nu`` regardless of field.  ``rel_sigma`` holds
    the fractional one-sigma uncertainty of each axis.
    """

    kind: str
    nu: tuple[float, float, float] | None = None
    rel_sigma: tuple[float, float, float] = (0.0, 0.0, 0.0)
    B_min: float = 0.0
    B_max: float = math.inf

    def __post_init__(self):
        if self.kind not in ("A", "B", "custom"):
            raise DomainError(f"unknown trap kind {self.kind!r}")
        if self.kind == "custom":
            if self.nu is None or len(self.nu) != 3 or not all(v > 0 for v in self.nu):
                raise DomainError(f"custom trap needs three positive frequencies, got {self.nu}")
        if any(s < 0 for s in self.rel_sigma):
            raise DomainError("frequency uncertainties must be non-negative")

    @classmethod
    def trap_a(cls) -> "TrapConfig":
        return cls("A", rel_sigma=(2.0 / 15.0, 0.01, 1.0 / 12.0), B_min=0.0)

    @classmethod
    def trap_b(cls) -> "TrapConfig":
        return cls("B", rel_sigma=(0.03, 0.03, 2.0 / 94.0), B_min=842.0)

    @classmethod
    def custom(cls, nu_x, nu_y, nu_z, rel_sigma=(0.0, 0.0, 0.0)) -> "TrapConfig":
        return cls("custom", nu=(float(nu_x), float(nu_y), float(nu_z)), rel_sigma=tuple(rel_sigma))

    @classmethod
    def named(cls, kind: str) -> "TrapConfig":
        try:
            return {"A": cls.trap_a, "B": cls.trap_b}[kind]()
        except KeyError:
            raise DomainError(f"no built-in trap {kind!r}") from None

    @property
    def _formula(self) -> Callable[[float], tuple[float, float, float]]:
        return {"A": _trap_a, "B": _trap_b}[self.kind]

    def mean_rel_sigma(self) -> float:
        """Fractional uncertainty of the geometric-mean frequency."""
        return math.sqrt(sum(s * s for s in self.rel_sigma)) / 3.0


def trap_frequencies(cfg: TrapConfig, B: float) -> tuple[float, float, float]:
    if cfg.kind == "custom":
        return cfg.nu
    if not cfg.B_min <= B <= cfg.B_max:
        raise RangeError(f"trap {cfg.kind} formulas valid for {cfg.B_min} <= B <= {cfg.B_max} G, got {B}")
    return cfg._formula(B)


def mean_frequency(nu) -> float:
    nx, ny, nz = nu
    if not (nx > 0 and ny > 0 and nz > 0):
        raise DomainError(f"frequencies must be positive, got {nu}")
    return (nx * ny * nz) ** (1.0 / 3.0)


@dataclass(frozen=True)
class GasState:
    N: float  # atoms per spin state
    T: float  # K
    B: float = math.nan  # G

    def __post_init__(self):
        if not self.N >= 0:
            raise DomainError(f"atom number must be >= 0, got {self.N}")
        if not self.T > 0:
            raise DomainError(f"temperature must be positive, got {self.T}")


def _density_scale(T: float, nubar: float, const: PhysicalConstants) -> float:
    # 2 pi m nubar^2 / (kB T), in 1/m^2
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    return 2.0 * math.pi * const.m * nubar**2 / (const.kB * T)


def peak_density(s: GasState, nubar: float, const: PhysicalConstants = DEFAULT) -> float:
    """Central density per spin state of a thermal cloud, in 1/m^3."""
    return s.N * _density_scale(s.T, nubar, const) ** 1.5


def density_squared_average(s: GasState, nubar: float, const: PhysicalConstants = DEFAULT) -> float:
    """<n^2> = n0^2 / sqrt(27) for a harmonically trapped thermal gas (1/m^6)."""
    return peak_density(s, nubar, const) ** 2 / math.sqrt(27.0)


def loss_coefficient(L3: float, T: float, nubar: float, const: PhysicalConstants = DEFAULT) -> float:
    """beta with dN/dt = -Gamma N - beta N^3 (units 1/s)."""
    return L3 / math.sqrt(27.0) * _density_scale(T, nubar, const) ** 3


def fermi_temperature(N: float, nubar: float, const: PhysicalConstants = DEFAULT) -> float:
    """kB T_F = h nubar (6N)^(1/3)."""
    if not N >= 1:
        raise DomainError(f"need at least one atom, got N = {N}")
    return const.h * nubar * (6.0 * N) ** (1.0 / 3.0) / const.kB
