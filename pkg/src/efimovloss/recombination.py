"""Three-body recombination rate models.

Rates are in m^6/s.  ``l3_equal_a`` is the zero-range threshold rate for
three distinguishable fermions with one common negative scattering length.
For unequal scattering lengths no closed form exists; ``effective_a`` reduces
a triple to the geometric mean of |a_ij| so that the equal-a formula can be
used as a qualitative stand-in.  That reduction is a heuristic of this
package and is not a solution of the three-body problem.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .efimov import UNIVERSAL, EfimovParams, UniversalConstants
from .errors import DomainError, SingularResonanceError
from .physconst import DEFAULT, PhysicalConstants
from .scattering import ScatteringTable, ScatteringTriple, scattering_at

UMAX_COEFF = 0.158
SATURATION_FRACTION = 1.0 / 3.0


def _phase(a_abs, p: EfimovParams, u: UniversalConstants):
    return u.s0 * np.log(u.D * a_abs * p.kappa_star)


def l3_equal_a(
    a: float,
    p: EfimovParams,
    u: UniversalConstants = UNIVERSAL,
    const: PhysicalConstants = DEFAULT,
) -> float:
    """Recombination rate constant for a12 = a23 = a13 = a < 0 (a in m).

    L3 = 16 pi^2 C sinh(2 eta) / (sin^2[s0 ln(D |a| kappa)] + sinh^2 eta) * hbar a^4 / m
    """
    if not a < 0:
        raise DomainError(f"equal-negative-a formula only; got a = {a}")
    eta = p.eta_star
    s = math.sin(_phase(-a, p, u))
    denom = s * s + math.sinh(eta) ** 2
    if eta == 0.0:
        if denom == 0.0:
            raise SingularResonanceError(f"eta_star = 0 exactly on resonance at a = {a}")
        return 0.0
    return 16.0 * math.pi**2 * u.C * math.sinh(2.0 * eta) / denom * const.hbar * a**4 / const.m


def l3_equal_a_peak(a: float, p: EfimovParams, u: UniversalConstants = UNIVERSAL,
                    const: PhysicalConstants = DEFAULT) -> float:
    """Upper envelope of ``l3_equal_a`` (its value when the sine vanishes)."""
    eta = p.eta_star
    if eta == 0.0:
        return math.inf
    return 16.0 * math.pi**2 * u.C * math.sinh(2.0 * eta) / math.sinh(eta) ** 2 * const.hbar * a**4 / const.m


def l3_max(T: float, const: PhysicalConstants = DEFAULT) -> float:
    """Unitarity limit sqrt(108) pi^2 hbar^5 / (m^3 (kB T)^2) for a thermal gas."""
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    return math.sqrt(108.0) * math.pi**2 * const.hbar**5 / (const.m**3 * (const.kB * T) ** 2)


def l3_saturation(T: float, const: PhysicalConstants = DEFAULT) -> float:
    return SATURATION_FRACTION * l3_max(T, const)


def l3_unitarized(L3: float, L3sat: float) -> float:
    """(1/L3 + 1/L3sat)^-1."""
    if not (L3 > 0 and L3sat > 0):
        raise DomainError(f"rates must be positive, got L3 = {L3}, L3sat = {L3sat}")
    small, large = sorted((L3, L3sat))
    # dividing the smaller rate by a factor >= 1 keeps the result below both
    return small / (1.0 + small / large)


def threshold_temperature(a: float, const: PhysicalConstants = DEFAULT) -> float:
    """Temperature with kB T = U_max = 0.158 hbar^2 / (m a^2); ``a`` in m."""
    if a == 0:
        raise DomainError("scattering length must be non-zero")
    return UMAX_COEFF * const.hbar**2 / (const.m * a * a * const.kB)


def effective_a(triple: ScatteringTriple, const: PhysicalConstants = DEFAULT) -> float:
    """-(|a12| |a23| |a13|)^(1/3) in m, for an all-negative triple in a0."""
    lengths = triple.lengths()
    if any(not a < 0 for a in lengths):
        raise DomainError(f"effective_a needs all a_ij < 0, got {lengths} at B = {triple.B} G")
    # sum of logs keeps the result independent of the order of the pairs
    return -math.exp(sum(math.log(-a) for a in sorted(lengths)) / 3.0) * const.a0


class CurvePoint(NamedTuple):
    B: float
    L3_zero_T: float
    L3_unitarized: float


def l3_model_curve(
    table: ScatteringTable,
    p: EfimovParams,
    T: float,
    fields,
    L3sat: float | None = None,
    u: UniversalConstants = UNIVERSAL,
    const: PhysicalConstants = DEFAULT,
) -> list[CurvePoint]:
    """Zero-temperature and unitarized rate along a list of fields (G).

    ``L3sat`` defaults to l3_max(T)/3.
    """
    sat = l3_saturation(T, const) if L3sat is None else L3sat
    out = []
    for B in fields:
        try:
            a = effective_a(scattering_at(table, B), const)
            L3 = l3_equal_a(a, p, u, const)
        except (DomainError, SingularResonanceError) as exc:
            raise type(exc)(f"at B = {B} G: {exc}") from exc
        out.append(CurvePoint(float(B), L3, l3_unitarized(L3, sat) if L3 > 0 else 0.0))
    return out


class ResonanceCrossing(NamedTuple):
    B: float
    n: int


def _branch(table, B, p, u, const):
    a = effective_a(scattering_at(table, B), const)
    return float(_phase(-a, p, u)) / math.pi


def scan_resonance_fields(
    table: ScatteringTable,
    p: EfimovParams,
    u: UniversalConstants = UNIVERSAL,
    const: PhysicalConstants = DEFAULT,
    subdivisions: int = 8,
    tol: float = 0.01,
) -> list[ResonanceCrossing]:
    """Fields (G) where a trimer crosses threshold under the effective-a model.

    A crossing of branch n is where s0 ln(D |a_eff| kappa) = n pi, i.e.
    |a_eff| = |a_n^-|.  Crossings are bracketed on a grid made of the table
    nodes split into ``subdivisions`` pieces and refined by bisection to ``tol``.
    """
    grid = [float(table.B[0])]
    for lo, hi in zip(table.B[:-1], table.B[1:]):
        grid.extend(np.linspace(lo, hi, subdivisions + 1)[1:].tolist())
    phase = [_branch(table, B, p, u, const) for B in grid]
    found = []
    for k in range(len(grid) - 1):
        B0, B1, g0, g1 = grid[k], grid[k + 1], phase[k], phase[k + 1]
        for n in range(math.ceil(min(g0, g1)), math.floor(max(g0, g1)) + 1):
            if g0 == n:
                # exact hits on a grid point belong to the interval ending there
                if k == 0:
                    found.append(ResonanceCrossing(B0, n))
                continue
            if g1 == n:
                found.append(ResonanceCrossing(B1, n))
                continue
            a, b, fa = B0, B1, g0 - n
            while b - a > tol:
                mid = 0.5 * (a + b)
                fm = _branch(table, mid, p, u, const) - n
                if (fm < 0) == (fa < 0):
                    a, fa = mid, fm
                else:
                    b = mid
            found.append(ResonanceCrossing(0.5 * (a + b), n))
    return found
