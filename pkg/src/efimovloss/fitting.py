"""Two-stage extraction: L3 from decay curves, then (kappa*, eta*) from L3(B).

Both fits minimise a weighted chi-square with a Nelder-Mead simplex started
from a small grid of seeds, restarting from the best point until a full
cycle changes neither the parameters nor chi-square.  One-sigma errors come
from the quadratic expansion of chi-square at the optimum, built from a
central-difference Jacobian of the residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .dynamics import DecaySeries, _closed_form
from .efimov import UNIVERSAL, EfimovParams, UniversalConstants, scaling_factors
from .errors import DomainError, InsufficientDataError
from .physconst import DEFAULT, PhysicalConstants
from .recombination import effective_a, l3_saturation
from .scattering import ScatteringTable, scattering_at
from .trapgas import TrapConfig, loss_coefficient, mean_frequency, trap_frequencies

PARAM_RTOL = 1e-8
CHI2_RTOL = 1e-10
MAX_CYCLES = 40


@dataclass
class FitResult:
    params: dict[str, float]
    uncertainties: dict[str, float]
    chi2: float
    dof: int
    converged: bool
    covariance: np.ndarray | None = field(default=None, repr=False)

    @property
    def reduced_chi2(self) -> float:
        return self.chi2 / self.dof

    def rows(self):
        for name, value in self.params.items():
            yield name, value, self.uncertainties.get(name, math.nan)


def chi_squared(residuals: Sequence[float], sigmas: Sequence[float], dof: int | None = None):
    """Return (sum (r/sigma)^2, chi2/dof); dof defaults to the number of points."""
    r = np.asarray(residuals, dtype=float)
    s = np.asarray(sigmas, dtype=float)
    if r.shape != s.shape:
        raise DomainError(f"{r.size} residuals but {s.size} sigmas")
    if np.any(~(s > 0)):
        raise DomainError("sigmas must be positive")
    chi2 = float(np.sum((r / s) ** 2))
    dof = r.size if dof is None else dof
    return chi2, (chi2 / dof if dof > 0 else math.nan)


def _jacobian(resid: Callable[[np.ndarray], np.ndarray], x: np.ndarray, rel_step=1e-5):
    cols = []
    for i in range(len(x)):
        h = rel_step * max(abs(x[i]), 1e-3)
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        cols.append((resid(xp) - resid(xm)) / (2.0 * h))
    return np.column_stack(cols)


def _covariance(resid, x):
    J = _jacobian(resid, x)
    # chi2 ~ chi2_min + dx^T (J^T J) dx  =>  cov = (J^T J)^-1
    try:
        return np.linalg.inv(J.T @ J)
    except np.linalg.LinAlgError:
        return np.linalg.pinv(J.T @ J)


def _simplex(objective, starts, bounds=None, max_cycles=MAX_CYCLES):
    """Multistart Nelder-Mead; returns (x, f, converged).

    Starts are ranked by objective value; ties keep input order.
    """
    best = None
    for idx, x0 in enumerate(starts):
        x = np.asarray(x0, dtype=float)
        f = objective(x)
        converged = False
        for _ in range(max_cycles):
            res = minimize(
                objective, x, method="Nelder-Mead", bounds=bounds,
                options={"xatol": 1e-12, "fatol": 1e-14 * max(1.0, abs(f)),
                         "maxiter": 4000, "maxfev": 8000, "adaptive": True},
            )
            dx = np.max(np.abs(res.x - x) / np.maximum(np.abs(x), 1e-12))
            df = abs(res.fun - f) / max(abs(f), 1e-300)
            improved = res.fun <= f
            if improved:
                x, f = res.x, float(res.fun)
            if dx < PARAM_RTOL and (df < CHI2_RTOL or f < 1e-20):
                converged = True
                break
            if not improved:
                converged = dx < PARAM_RTOL
                break
        if best is None or f < best[1]:
            best = (x, f, converged, idx)
    return best[0], best[1], best[2]


def fit_decay(
    series: DecaySeries,
    trap: TrapConfig,
    B: float,
    Gamma: float,
    sigma_T_rel: float = 0.05,
    const: PhysicalConstants = DEFAULT,
) -> FitResult:
    """Fit (L3, N0, T) to a decay series with the constant-temperature solution.

    Number residuals are weighted by ``series.sigma_N`` (unit weights when
    absent, with the covariance then rescaled by the reduced chi-square).
    Because N(t) only depends on L3/T^3, the measured temperatures enter
    chi-square too, each with fractional sigma ``sigma_T_rel``.  The
    trap-frequency uncertainty is added to sigma(L3) in quadrature.
    """
    if len(series) < 4:
        raise InsufficientDataError(f"need at least 4 samples, got {len(series)}")
    if not Gamma >= 0:
        raise DomainError(f"Gamma must be >= 0, got {Gamma}")
    s = series.sorted()
    nubar = mean_frequency(trap_frequencies(trap, B))
    sig_N = s.sigma_N if s.sigma_N is not None else np.ones(len(s))
    sig_T = sigma_T_rel * s.T

    # seeds: straight line through ln N over the first few samples
    k = max(3, len(s) // 4)
    slope, intercept = np.polyfit(s.t[:k], np.log(s.N[:k]), 1)
    N0_g = math.exp(intercept)
    T_g = float(np.median(s.T))
    per_L3 = loss_coefficient(1.0, T_g, nubar, const) * N0_g**2  # beta N0^2 per unit L3
    rate = max(-slope - Gamma, 0.0)
    floor = 1.0 / (s.t[-1] - s.t[0])
    L3_scale = max(rate, 0.01 * max(Gamma, floor)) / per_L3
    scale = np.array([L3_scale, N0_g, T_g])

    def resid(x):
        L3, N0, T = x * scale
        beta = loss_coefficient(L3, T, nubar, const)
        model = _closed_form(s.t, N0, Gamma, beta)
        return np.concatenate([(s.N - model) / sig_N, (s.T - T) / sig_T])

    def objective(x):
        r = resid(x)
        if not np.all(np.isfinite(r)):
            return math.inf
        return float(r @ r)

    starts = [np.array([f, 1.0, 1.0]) for f in (1.0, 0.3, 3.0)]
    if rate == 0.0:
        starts.insert(0, np.array([0.0, 1.0, 1.0]))
    bounds = [(0.0, None), (1e-12, None), (1e-12, None)]
    x, chi2, converged = _simplex(objective, starts, bounds)

    npts = 2 * len(s)
    dof = npts - 3
    cov = _covariance(resid, x) * np.outer(scale, scale)
    if s.sigma_N is None and dof > 0:
        cov = cov * chi2 / dof
    L3, N0, T = x * scale
    sig = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    sig_L3 = math.hypot(sig[0], 6.0 * trap.mean_rel_sigma() * L3)
    return FitResult(
        params={"L3": float(L3), "N0": float(N0), "T": float(T)},
        uncertainties={"L3": sig_L3, "N0": float(sig[1]), "T": float(sig[2])},
        chi2=chi2,
        dof=dof,
        converged=converged,
        covariance=cov,
    )


def kappa_period(lvdw: float, u: UniversalConstants = UNIVERSAL) -> tuple[float, float]:
    """Default kappa* window [1/(lambda lvdw), 1/lvdw) in 1/m.

    The zero-range rate is invariant under kappa* -> kappa* e^{pi/s0}, so only
    one period is identifiable.  This window picks the labelling in which the
    deepest trimer, E_0 = hbar^2 kappa*^2/m, is the first one below E_vdW.
    """
    lam, _ = scaling_factors(u)
    return 1.0 / (lam * lvdw), 1.0 / lvdw


def fit_efimov(
    points: Sequence[tuple[float, float, float]],
    table: ScatteringTable,
    T: float | None = None,
    unitarized: bool = False,
    period: tuple[float, float] | None = None,
    lvdw: float = 62.5 * DEFAULT.a0,
    n_kappa: int = 24,
    u: UniversalConstants = UNIVERSAL,
    const: PhysicalConstants = DEFAULT,
) -> FitResult:
    """Fit (kappa*, eta*) to points (B [G], L3 [m^6/s], sigma_L3 [m^6/s]).

    Residuals are taken in ln L3 with sigma_L3/L3 as the log-space error.
    The model is the equal-a rate evaluated at effective_a(B), optionally
    unitarized with L3sat = l3_max(T)/3.  kappa* is reported inside
    ``period`` (default: ``kappa_period(lvdw)``).
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(pts) < 3:
        raise InsufficientDataError(f"need at least 3 points, got {len(pts)}")
    if len(np.unique(pts[:, 0])) < 2:
        raise InsufficientDataError("all points share one field")
    if np.any(pts[:, 1] <= 0) or np.any(pts[:, 2] <= 0):
        raise DomainError("L3 values and sigmas must be positive")
    if unitarized and not (T and T > 0):
        raise DomainError("unitarized fit needs a temperature")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    B, L3, sL3 = pts.T
    a_abs = np.array([-effective_a(scattering_at(table, b), const) for b in B])
    lnL3 = np.log(L3)
    sig_ln = sL3 / L3
    pref = 16.0 * math.pi**2 * u.C * const.hbar * a_abs**4 / const.m
    sat = l3_saturation(T, const) if unitarized else None

    k_lo, k_hi = period if period is not None else kappa_period(lvdw, u)
    ln_klo, ln_khi = math.log(k_lo), math.log(k_hi)
    width = ln_khi - ln_klo

    def model_ln(x):
        kappa, eta = math.exp(x[0]), math.exp(x[1])
        s = np.sin(u.s0 * np.log(u.D * a_abs * kappa))
        rate = pref * math.sinh(2.0 * eta) / (s * s + math.sinh(eta) ** 2)
        if sat is not None:
            rate = rate * sat / (rate + sat)
        return np.log(rate)

    def resid(x):
        return (lnL3 - model_ln(x)) / sig_ln

    def objective(x):
        r = resid(x)
        return float(r @ r) if np.all(np.isfinite(r)) else math.inf

    grid = [
        np.array([ln_klo + width * (i + 0.5) / n_kappa, math.log(eta)])
        for i in range(n_kappa)
        for eta in (0.003, 0.01, 0.03, 0.1, 0.3)
    ]
    ranked = sorted(range(len(grid)), key=lambda i: (objective(grid[i]), i))
    starts = [grid[i] for i in ranked[:6]]
    bounds = [(None, None), (math.log(1e-8), math.log(10.0))]
    x, chi2, converged = _simplex(objective, starts, bounds)
    # fold back into the reporting window; the model is exactly periodic
    x = x.copy()
    x[0] = ln_klo + (x[0] - ln_klo) % width

    cov_log = _covariance(resid, x)
    kappa, eta = math.exp(x[0]), math.exp(x[1])
    jac = np.diag([kappa, eta])
    cov = jac @ cov_log @ jac
    sig = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return FitResult(
        params={"kappa_star": kappa, "eta_star": eta},
        uncertainties={"kappa_star": float(sig[0]), "eta_star": float(sig[1])},
        chi2=chi2,
        dof=len(pts) - 2,
        converged=converged,
        covariance=cov,
    )


def efimov_params(result: FitResult) -> EfimovParams:
    return EfimovParams(result.params["kappa_star"], result.params["eta_star"])
