"""Atom-number decay under one-body loss and three-body recombination.

Each of the three equally populated spin states obeys

    dN/dt = -Gamma N - L3 <n^2> N,   <n^2> = n0^2 / sqrt(27),

which for a thermal cloud at fixed temperature is dN/dt = -Gamma N - beta N^3.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, IntegrationError, ParseError
from .physconst import DEFAULT, PhysicalConstants
from .trapgas import TrapConfig, loss_coefficient, mean_frequency, trap_frequencies

RTOL = 1e-10
ATOL_ATOMS = 1e-6

SERIES_HEADER = ("t_s", "N", "T_K", "sigma_N")


@dataclass(frozen=True)
class DecayModel:
    Gamma: float  # 1/s
    L3: float  # m^6/s
    trap: TrapConfig
    B: float = math.nan  # G; ignored by custom traps
    anti_evaporation: bool = False
    const: PhysicalConstants = field(default=DEFAULT, repr=False)

    def __post_init__(self):
        if not self.Gamma >= 0:
            raise DomainError(f"Gamma must be >= 0, got {self.Gamma}")
        if not (self.L3 >= 0 and math.isfinite(self.L3)):
            raise DomainError(f"L3 must be finite and >= 0, got {self.L3}")

    @property
    def nubar(self) -> float:
        return mean_frequency(trap_frequencies(self.trap, self.B))

    def beta(self, T: float) -> float:
        return loss_coefficient(self.L3, T, self.nubar, self.const)


def _closed_form(t, N0, Gamma, beta):
    """N(t) for dN/dt = -Gamma N - beta N^3; vectorised over ``t``."""
    t = np.asarray(t, dtype=float)
    x = beta * N0 * N0
    # (1 - e^{-z}) / z with z = 2 Gamma t, continuous through Gamma -> 0
    z = 2.0 * Gamma * t
    small = z < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(small, 1.0 - 0.5 * z, -np.expm1(-z) / np.where(small, 1.0, z))
    growth = 2.0 * x * t * phi
    return N0 * np.exp(-Gamma * t) / np.sqrt(1.0 + growth)


def number_analytic(m: DecayModel, N0: float, T: float, t):
    """Closed-form N(t) at constant temperature ``T`` (K)."""
    if m.anti_evaporation:
        raise DomainError("closed form requires constant temperature; use evolve_numeric")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise DomainError("times must be >= 0")
    out = _closed_form(t_arr, N0, m.Gamma, m.beta(T))
    return float(out) if out.ndim == 0 else out


def evolve_numeric(m: DecayModel, N0: float, T0: float, t_grid: Sequence[float]):
    """Integrate the rate equations; returns arrays (t, N, T).

    With anti-evaporation the temperature rises as dT/dt = (T/3) L3 <n^2>.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0 or t_grid[0] != 0 or np.any(np.diff(t_grid) <= 0):
        raise DomainError("t_grid must start at 0 and increase strictly")
    nubar = m.nubar
    const = m.const

    def rhs(_t, y):
        N, T = y
        loss = loss_coefficient(m.L3, T, nubar, const) * N * N
        dT = T * loss / 3.0 if m.anti_evaporation else 0.0
        return [-m.Gamma * N - loss * N, dT]

    if len(t_grid) == 1:
        return t_grid, np.array([float(N0)]), np.array([float(T0)])
    sol = solve_ivp(
        rhs,
        (0.0, t_grid[-1]),
        [float(N0), float(T0)],
        method="DOP853",
        t_eval=t_grid,
        rtol=RTOL,
        atol=[ATOL_ATOMS, 1e-6 * T0],
    )
    if not sol.success:
        reached = float(sol.t[-1]) if len(sol.t) else 0.0
        raise IntegrationError(f"integration failed at t = {reached} s: {sol.message}", reached)
    return sol.t, sol.y[0], sol.y[1]


@dataclass(frozen=True)
class DecaySeries:
    t: np.ndarray
    N: np.ndarray
    T: np.ndarray
    sigma_N: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        N = np.asarray(self.N, dtype=float)
        T = np.asarray(self.T, dtype=float)
        if not (t.shape == N.shape == T.shape and t.ndim == 1):
            raise DomainError("t, N and T must be 1-d arrays of equal length")
        if np.any(np.diff(t) <= 0):
            raise DomainError("sample times must increase strictly")
        if np.any(N <= 0) or np.any(T <= 0):
            raise DomainError("N and T samples must be positive")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "T", T)
        if self.sigma_N is not None:
            s = np.asarray(self.sigma_N, dtype=float)
            if s.shape != t.shape or np.any(~(s > 0)):
                raise DomainError("sigma_N must be positive and match the samples")
            object.__setattr__(self, "sigma_N", s)

    def __len__(self):
        return len(self.t)

    def sorted(self) -> "DecaySeries":
        order = np.argsort(self.t, kind="stable")
        sig = None if self.sigma_N is None else self.sigma_N[order]
        return DecaySeries(self.t[order], self.N[order], self.T[order], sig)

    def to_csv(self, stream=None, header_comments: Sequence[str] = ()) -> str:
        out = io.StringIO() if stream is None else stream
        for line in header_comments:
            out.write(f"# {line}\n")
        out.write(",".join(SERIES_HEADER) + "\n")
        for i in range(len(self)):
            sig = "" if self.sigma_N is None else repr(float(self.sigma_N[i]))
            out.write(f"{float(self.t[i])!r},{float(self.N[i])!r},{float(self.T[i])!r},{sig}\n")
        return out.getvalue() if stream is None else ""

    @classmethod
    def from_csv(cls, source) -> "DecaySeries":
        """Read ``t_s,N,T_K,sigma_N`` rows; rows may arrive in any order.

        ``sigma_N`` may be left empty on every row (unit weights).
        """
        if isinstance(source, str):
            source = io.StringIO(source)
        reader = csv.reader(ln for ln in source if ln.strip() and not ln.lstrip().startswith("#"))
        header = tuple(h.strip() for h in next(reader, ()))
        if header not in (SERIES_HEADER, SERIES_HEADER[:3]):
            raise ParseError(f"expected header {','.join(SERIES_HEADER)}, got {','.join(header)}")
        rows = []
        for i, rec in enumerate(reader):
            if len(rec) not in (3, 4):
                raise ParseError(f"row {i}: expected 3 or 4 columns")
            try:
                vals = [float(x) for x in rec[:3]]
                sig = float(rec[3]) if len(rec) == 4 and rec[3].strip() else math.nan
            except ValueError:
                raise ParseError(f"row {i}: not a number in {rec}") from None
            rows.append((*vals, sig))
        if not rows:
            raise ParseError("decay series has no rows")
        arr = np.array(sorted(rows, key=lambda r: r[0]))
        sig = arr[:, 3]
        if np.all(np.isnan(sig)):
            sigma = None
        elif np.any(np.isnan(sig)):
            raise ParseError("sigma_N must be given on every row or on none")
        else:
            sigma = sig
        try:
            return cls(arr[:, 0], arr[:, 1], arr[:, 2], sigma)
        except DomainError as exc:
            raise ParseError(str(exc)) from None


def synthesize(
    m: DecayModel,
    N0: float,
    T0: float,
    t_grid: Sequence[float],
    noise: float = 0.0,
    seed: int = 0,
    temp_noise: float = 0.0,
) -> DecaySeries:
    """Sample the forward model with multiplicative Gaussian noise.

    ``noise`` is the fractional sigma on N, recorded in ``sigma_N`` (unset
    when ``noise`` is 0); ``temp_noise`` likewise perturbs T.
    """
    if noise < 0 or temp_noise < 0:
        raise DomainError("noise levels must be >= 0")
    t_grid = np.asarray(t_grid, dtype=float)
    if m.anti_evaporation:
        t_eval = t_grid if t_grid[0] == 0 else np.concatenate([[0.0], t_grid])
        _, N, T = evolve_numeric(m, N0, T0, t_eval)
        if t_grid[0] != 0:
            N, T = N[1:], T[1:]
    else:
        N = np.asarray(number_analytic(m, N0, T0, t_grid), dtype=float)
        T = np.full_like(N, float(T0))
    rng = np.random.default_rng(seed)
    N_obs = N * (1.0 + noise * rng.standard_normal(len(N))) if noise else N.copy()
    T_obs = T * (1.0 + temp_noise * rng.standard_normal(len(T))) if temp_noise else T.copy()
    return DecaySeries(t_grid, N_obs, T_obs, noise * N if noise else None)
