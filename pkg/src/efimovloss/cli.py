"""Command line front end.

Every numeric flag carries its unit in its name.  Settings are resolved as
built-in defaults, then ``--config`` (flat ``key = value`` text whose keys
are the flag names with underscores), then explicit flags.  Outputs are CSV
preceded by ``#`` comment lines recording the resolved settings.

Exit codes: 0 success, 2 usage error, 3 data or validation error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import DecayModel, DecaySeries, synthesize
from .efimov import EfimovParams, spectrum_rows
from .errors import EfimovLossError, NumericalError, ParseError, ValidationError
from .fitting import FitResult, fit_decay, fit_efimov
from .physconst import DEFAULT, PhysicalConstants
from .recombination import l3_model_curve, scan_resonance_fields
from .scattering import load_table_file, sample_table
from .trapgas import TrapConfig, fermi_temperature, mean_frequency, trap_frequencies

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
CM6 = 1e-12  # m^6/s per cm^6/s

CONSTANT_KEYS = ("hbar", "kB", "m", "a0")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _flag(p, name, help, type=float, **kw):
    p.add_argument(name, type=type, default=None, help=help, **kw)


def _trap_flags(p):
    p.add_argument("--trap", choices=["A", "B", "custom"], default=None,
                   help="trap geometry (default B)")
    _flag(p, "--nu-x-Hz", "custom trap x frequency [Hz]")
    _flag(p, "--nu-y-Hz", "custom trap y frequency [Hz]")
    _flag(p, "--nu-z-Hz", "custom trap z frequency [Hz]")


def _efimov_flags(p):
    _flag(p, "--kappa-star-inv-a0", "three-body parameter kappa* [1/a0] (default 6.9e-3)")
    _flag(p, "--eta-star", "decay parameter eta* [dimensionless] (default 0.016)")


def _table_flag(p):
    p.add_argument("--table", default=None,
                   help="scattering-length CSV B_gauss,a12_a0,a23_a0,a13_a0 (default: bundled sample)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="efimovloss", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help):
        p = sub.add_parser(name, help=help, description=help)
        p.add_argument("--config", default=None, help="flat key = value settings file (SI constants)")
        p.add_argument("-o", "--output", default=None, help="output file (default: stdout)")
        return p

    p = command("spectrum", "Efimov trimer energies, threshold crossings and widths")
    _efimov_flags(p)
    _flag(p, "--n-max", "highest trimer index [count] (default 3)", type=int)

    p = command("l3-curve", "zero-temperature and unitarized L3 versus field")
    _efimov_flags(p)
    _table_flag(p)
    _flag(p, "--T-K", "gas temperature for the unitarity limit [K] (default 30e-9)")
    _flag(p, "--B-min-gauss", "first field [G] (default: table start)")
    _flag(p, "--B-max-gauss", "last field [G] (default: table end)")
    _flag(p, "--B-step-gauss", "field step [G] (default 5)")

    p = command("scan-resonances", "fields where a trimer crosses threshold (effective-a heuristic)")
    _efimov_flags(p)
    _table_flag(p)

    p = command("simulate", "synthetic decay series N(t), T(t)")
    _trap_flags(p)
    _flag(p, "--B-gauss", "bias field [G] (default 1000)")
    _flag(p, "--Gamma-per-s", "one-body loss rate [1/s] (default 1/2.8)")
    _flag(p, "--L3-cm6-per-s", "recombination rate constant [cm^6/s] (default 1e-21)")
    _flag(p, "--N0-atoms", "initial atoms per spin state [count] (default 2e5)")
    _flag(p, "--T0-K", "initial temperature [K] (default 180e-9)")
    _flag(p, "--t-max-s", "last sample time [s] (default 8)")
    _flag(p, "--n-points", "number of samples [count] (default 30)", type=int)
    _flag(p, "--noise-frac", "fractional Gaussian noise on N [dimensionless] (default 0)")
    _flag(p, "--temp-noise-frac", "fractional Gaussian noise on T [dimensionless] (default 0)")
    _flag(p, "--seed", "random seed [integer] (default 0)", type=int)
    p.add_argument("--anti-evaporation", action="store_const", const=True, default=None,
                   help="let the temperature rise with recombination")

    p = command("fit-decay", "fit L3, N0, T to a decay series")
    p.add_argument("--input", default=None, help="decay series CSV t_s,N,T_K,sigma_N")
    _trap_flags(p)
    _flag(p, "--B-gauss", "bias field [G] (default 1000)")
    _flag(p, "--Gamma-per-s", "fixed one-body loss rate [1/s] (default 1/2.8)")
    _flag(p, "--sigma-T-rel", "fractional sigma of each temperature sample [dimensionless] (default 0.05)")

    p = command("fit-efimov", "fit kappa*, eta* to L3 versus field")
    p.add_argument("--input", default=None, help="CSV B_gauss,L3_cm6_per_s,sigma_L3 (sigma in cm^6/s)")
    _table_flag(p)
    _flag(p, "--T-K", "temperature for the unitarized model [K]")
    p.add_argument("--unitarized", action="store_const", const=True, default=None,
                   help="fit the unitarized rate instead of the zero-temperature rate")
    _flag(p, "--lvdw-a0", "van der Waals length fixing the reported kappa* period [a0] (default 62.5)")

    p = command("degeneracy", "Fermi temperature and T/T_F of a trapped gas")
    _trap_flags(p)
    _flag(p, "--B-gauss", "bias field [G] (default 1500)")
    _flag(p, "--N-atoms", "atoms per spin state [count] (default 6e4)")
    _flag(p, "--T-K", "temperature [K] (default 50e-9)")
    return parser


DEFAULTS = {
    "spectrum": {"kappa_star_inv_a0": 6.9e-3, "eta_star": 0.016, "n_max": 3},
    "l3-curve": {"kappa_star_inv_a0": 6.9e-3, "eta_star": 0.016, "table": None, "T_K": 30e-9,
                 "B_min_gauss": None, "B_max_gauss": None, "B_step_gauss": 5.0},
    "scan-resonances": {"kappa_star_inv_a0": 6.9e-3, "eta_star": 0.016, "table": None},
    "simulate": {"trap": "B", "nu_x_Hz": None, "nu_y_Hz": None, "nu_z_Hz": None,
                 "B_gauss": 1000.0, "Gamma_per_s": 1 / 2.8, "L3_cm6_per_s": 1e-21,
                 "N0_atoms": 2e5, "T0_K": 180e-9, "t_max_s": 8.0, "n_points": 30,
                 "noise_frac": 0.0, "temp_noise_frac": 0.0, "seed": 0,
                 "anti_evaporation": False},
    "fit-decay": {"input": None, "trap": "B", "nu_x_Hz": None, "nu_y_Hz": None, "nu_z_Hz": None,
                  "B_gauss": 1000.0, "Gamma_per_s": 1 / 2.8, "sigma_T_rel": 0.05},
    "fit-efimov": {"input": None, "table": None, "T_K": None, "unitarized": False,
                   "lvdw_a0": 62.5},
    "degeneracy": {"trap": "B", "nu_x_Hz": None, "nu_y_Hz": None, "nu_z_Hz": None,
                   "B_gauss": 1500.0, "N_atoms": 6e4, "T_K": 50e-9},
}

_BOOL = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def _read_config(path: str, command: str):
    settings, constants = {}, {}
    known = DEFAULTS[command]
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in CONSTANT_KEYS:
            constants[key] = _coerce(value, 0.0, path, lineno, key)
        elif key in known:
            settings[key] = _coerce(value, known[key], path, lineno, key)
        else:
            raise ParseError(f"{path}:{lineno}: unknown key {key!r} for {command}")
    return settings, constants


def _coerce(value, like, path, lineno, key):
    try:
        if isinstance(like, bool):
            return _BOOL[value.lower()]
        if isinstance(like, int):
            return int(value)
        if isinstance(like, float):
            return float(value)
        if like is None and key not in ("trap", "table", "input"):
            return float(value)
        return value
    except (KeyError, ValueError):
        raise ParseError(f"{path}:{lineno}: bad value {value!r} for {key}") from None


def resolve(args: argparse.Namespace):
    cfg = dict(DEFAULTS[args.command])
    const = DEFAULT
    if args.config:
        settings, overrides = _read_config(args.config, args.command)
        cfg.update(settings)
        const = DEFAULT.with_overrides(**overrides)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg, const


def _header(command: str, cfg: dict, const: PhysicalConstants) -> list[str]:
    lines = [f"efimovloss {__version__} {command}"]
    lines += [f"{k} = {cfg[k]!r}" for k in sorted(cfg)]
    lines += [f"{k} = {getattr(const, k)!r}" for k in CONSTANT_KEYS]
    return lines


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _csv(header_lines, columns, rows) -> str:
    out = io.StringIO()
    for line in header_lines:
        out.write(f"# {line}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")
    return out.getvalue()


def _trap(cfg) -> TrapConfig:
    if cfg["trap"] == "custom":
        nu = (cfg["nu_x_Hz"], cfg["nu_y_Hz"], cfg["nu_z_Hz"])
        if any(v is None for v in nu):
            raise ParseError("custom trap needs --nu-x-Hz, --nu-y-Hz and --nu-z-Hz")
        return TrapConfig.custom(*nu)
    return TrapConfig.named(cfg["trap"])


def _table(cfg):
    return sample_table() if cfg["table"] is None else load_table_file(cfg["table"])


def _params(cfg, const) -> EfimovParams:
    return EfimovParams.from_atomic(cfg["kappa_star_inv_a0"], cfg["eta_star"], const)


def _need_input(cfg):
    if cfg["input"] is None:
        raise ParseError("--input is required")
    return cfg["input"]


def _result_csv(header, result: FitResult, units: dict) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    out.write("parameter,value,sigma\n")
    for name, value, sigma in result.rows():
        out.write(f"{name}{units.get(name, '')},{_fmt(value)},{_fmt(sigma)}\n")
    out.write(f"chi2,{_fmt(result.chi2)},\n")
    out.write(f"dof,{result.dof},\n")
    out.write(f"converged,{_fmt(result.converged)},\n")
    return out.getvalue()


def cmd_spectrum(cfg, const, header):
    p = _params(cfg, const)
    rows = spectrum_rows(p, int(cfg["n_max"]), const=const)
    return _csv(header, ("n", "E_over_h_Hz", "a_n_minus_a0", "gamma_rad_per_s", "lifetime_s"), rows), EXIT_OK


def cmd_l3_curve(cfg, const, header):
    table = _table(cfg)
    lo, hi = table.field_range
    B_min = lo if cfg["B_min_gauss"] is None else cfg["B_min_gauss"]
    B_max = hi if cfg["B_max_gauss"] is None else cfg["B_max_gauss"]
    step = cfg["B_step_gauss"]
    if not step > 0 or B_max < B_min:
        raise ParseError("need B_step_gauss > 0 and B_max_gauss >= B_min_gauss")
    n = int(math.floor((B_max - B_min) / step + 1e-9)) + 1
    grid = [B_min + i * step for i in range(n)]
    curve = l3_model_curve(table, _params(cfg, const), cfg["T_K"], grid, const=const)
    rows = ((c.B, c.L3_zero_T / CM6, c.L3_unitarized / CM6) for c in curve)
    return _csv(header, ("B_gauss", "L3_zeroT_cm6_per_s", "L3_unitarized_cm6_per_s"), rows), EXIT_OK


def cmd_scan(cfg, const, header):
    found = scan_resonance_fields(_table(cfg), _params(cfg, const), const=const)
    return _csv(header, ("B_gauss", "n_branch"), found), EXIT_OK


def cmd_simulate(cfg, const, header):
    model = DecayModel(cfg["Gamma_per_s"], cfg["L3_cm6_per_s"] * CM6, _trap(cfg), cfg["B_gauss"],
                       bool(cfg["anti_evaporation"]), const)
    if cfg["n_points"] < 2:
        raise ParseError("n_points must be at least 2")
    t = np.linspace(0.0, cfg["t_max_s"], cfg["n_points"])
    series = synthesize(model, cfg["N0_atoms"], cfg["T0_K"], t, cfg["noise_frac"], cfg["seed"],
                        cfg["temp_noise_frac"])
    return series.to_csv(header_comments=header), EXIT_OK


def cmd_fit_decay(cfg, const, header):
    with open(_need_input(cfg), newline="") as f:
        series = DecaySeries.from_csv(f)
    result = fit_decay(series, _trap(cfg), cfg["B_gauss"], cfg["Gamma_per_s"],
                       sigma_T_rel=cfg["sigma_T_rel"], const=const)
    result.params["L3"] /= CM6
    result.uncertainties["L3"] /= CM6
    text = _result_csv(header, result, {"L3": "_cm6_per_s", "T": "_K"})
    return text, EXIT_OK if result.converged else EXIT_NUMERIC


def _read_l3_points(path):
    pts = []
    with open(path) as f:
        lines = [ln for ln in f if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or [h.strip() for h in lines[0].split(",")] != ["B_gauss", "L3_cm6_per_s", "sigma_L3"]:
        raise ParseError("expected header B_gauss,L3_cm6_per_s,sigma_L3")
    for i, ln in enumerate(lines[1:]):
        try:
            B, L3, s = (float(x) for x in ln.split(","))
        except ValueError:
            raise ParseError(f"row {i}: expected three numbers") from None
        pts.append((B, L3 * CM6, s * CM6))
    return pts


def cmd_fit_efimov(cfg, const, header):
    pts = _read_l3_points(_need_input(cfg))
    result = fit_efimov(pts, _table(cfg), T=cfg["T_K"], unitarized=bool(cfg["unitarized"]),
                        lvdw=cfg["lvdw_a0"] * const.a0, const=const)
    result.params["kappa_star"] *= const.a0
    result.uncertainties["kappa_star"] *= const.a0
    text = _result_csv(header, result, {"kappa_star": "_inv_a0"})
    return text, EXIT_OK if result.converged else EXIT_NUMERIC


def cmd_degeneracy(cfg, const, header):
    nubar = mean_frequency(trap_frequencies(_trap(cfg), cfg["B_gauss"]))
    TF = fermi_temperature(cfg["N_atoms"], nubar, const)
    rows = [(cfg["N_atoms"], nubar, TF, cfg["T_K"] / TF)]
    return _csv(header, ("N", "nubar_Hz", "T_F_K", "T_over_T_F"), rows), EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "l3-curve": cmd_l3_curve,
    "scan-resonances": cmd_scan,
    "simulate": cmd_simulate,
    "fit-decay": cmd_fit_decay,
    "fit-efimov": cmd_fit_efimov,
    "degeneracy": cmd_degeneracy,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        stderr.write(f"efimovloss: usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        cfg, const = resolve(args)
        text, status = COMMANDS[args.command](cfg, const, _header(args.command, cfg, const))
    except ValidationError as exc:
        stderr.write(f"efimovloss: data error: {type(exc).__name__}: {_oneline(exc)}\n")
        return EXIT_DATA
    except OSError as exc:
        stderr.write(f"efimovloss: data error: {type(exc).__name__}: {_oneline(exc)}\n")
        return EXIT_DATA
    except (NumericalError, FloatingPointError) as exc:
        stderr.write(f"efimovloss: numerical error: {type(exc).__name__}: {_oneline(exc)}\n")
        return EXIT_NUMERIC
    except EfimovLossError as exc:
        stderr.write(f"efimovloss: error: {_oneline(exc)}\n")
        return EXIT_DATA
    if args.output:
        Path(args.output).write_text(text)
    else:
        stdout.write(text)
    if status == EXIT_NUMERIC:
        stderr.write("efimovloss: numerical error: fit did not converge\n")
    return status


def _oneline(exc) -> str:
    return " ".join(str(exc).split())


def main():
    sys.exit(run())
