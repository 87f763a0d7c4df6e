"""Universal Efimov spectrum, threshold crossings and trimer widths.

Binding energies are returned as positive magnitudes: the trimer with index
``n`` sits at ``-binding_energy_at_unitarity(p, n)`` below the three-atom
threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError
from .physconst import DEFAULT, PhysicalConstants


@dataclass(frozen=True)
class UniversalConstants:
    """Efimov scaling exponent and the constants of the equal-a rate formula."""

    s0: float = 1.00624
    C: float = 29.62
    D: float = 0.6642
    uncertainty: dict = field(
        default_factory=lambda: {"s0": 0.0, "C": 0.01, "D": 0.0002}, compare=False
    )


UNIVERSAL = UniversalConstants()


@dataclass(frozen=True)
class EfimovParams:
    """Three-body parameter ``kappa_star`` (1/m) and decay parameter ``eta_star``."""

    kappa_star: float
    eta_star: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.kappa_star) and self.kappa_star > 0):
            raise DomainError(f"kappa_star must be positive, got {self.kappa_star}")
        if not (math.isfinite(self.eta_star) and self.eta_star >= 0):
            raise DomainError(f"eta_star must be non-negative, got {self.eta_star}")

    @classmethod
    def from_atomic(cls, kappa_inv_a0: float, eta_star: float = 0.0,
                    const: PhysicalConstants = DEFAULT) -> "EfimovParams":
        """Build from kappa_star given in units of 1/a0."""
        return cls(kappa_inv_a0 / const.a0, eta_star)

    def kappa_inv_a0(self, const: PhysicalConstants = DEFAULT) -> float:
        return self.kappa_star * const.a0


def scaling_factors(u: UniversalConstants = UNIVERSAL) -> tuple[float, float]:
    """Discrete scale factors (e^{pi/s0}, e^{2pi/s0}) for lengths and energies."""
    lam = math.exp(math.pi / u.s0)
    return lam, math.exp(2.0 * math.pi / u.s0)


def binding_energy_at_unitarity(
    p: EfimovParams,
    n: int,
    u: UniversalConstants = UNIVERSAL,
    const: PhysicalConstants = DEFAULT,
) -> float:
    """|E_n| in J for the n-th trimer at infinite scattering length."""
    if n < 0:
        raise DomainError(f"trimer index must be >= 0, got {n}")
    return math.exp(-2.0 * math.pi * n / u.s0) * const.hbar**2 * p.kappa_star**2 / const.m


def resonance_scattering_length(
    p: EfimovParams, n: int, u: UniversalConstants = UNIVERSAL
) -> float:
    """a_n^- in m: where trimer ``n`` meets the three-atom threshold (negative)."""
    if n < 0:
        raise DomainError(f"trimer index must be >= 0, got {n}")
    return -math.exp(math.pi * n / u.s0) / (u.D * p.kappa_star)


@dataclass(frozen=True)
class TrimerWidth:
    gamma: float  # rad/s
    lifetime: float  # s, inf when gamma == 0


def trimer_width(
    E: float,
    p: EfimovParams,
    u: UniversalConstants = UNIVERSAL,
    const: PhysicalConstants = DEFAULT,
) -> TrimerWidth:
    """Decay width of a trimer bound by ``E`` (J).

    Uses hbar*gamma = (4 eta_star / s0) * E, the leading small-eta relation
    between the imaginary part of the three-body parameter and the width.
    """
    if not E > 0:
        raise DomainError(f"binding energy must be positive, got {E}")
    gamma = 4.0 * p.eta_star / u.s0 * E / const.hbar
    return TrimerWidth(gamma, 1.0 / gamma if gamma > 0 else math.inf)


def spectrum_rows(p: EfimovParams, n_max: int, u: UniversalConstants = UNIVERSAL,
                  const: PhysicalConstants = DEFAULT):
    """Yield (n, E/h [Hz], a_n^- [a0], gamma [rad/s], lifetime [s]) for n = 0..n_max."""
    for n in range(n_max + 1):
        E = binding_energy_at_unitarity(p, n, u, const)
        w = trimer_width(E, p, u, const)
        yield (n, E / const.h, resonance_scattering_length(p, n, u) / const.a0,
               w.gamma, w.lifetime)
