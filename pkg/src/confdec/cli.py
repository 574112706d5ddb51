"""Command-line interface.

Subcommands: ``field`` (sample and check a stochastic field), ``mc``
(Monte Carlo coherence decay), ``kernel`` (decoherence factors and the
general-correlation kernel), ``evolve`` (density-matrix evolution), and
``bound`` (experimental cutoff bounds).

Every parameter can come from a flag or a config file (``--config``,
either ``key = value`` lines or a previously written ``manifest.json``);
flags win over the file.  Each run writes its resolved parameters to
``manifest.json`` in the output directory, and re-running from that
manifest reproduces all outputs byte-identically.

Exit codes: 0 success, 2 usage or validation error, 3 numerical or
statistical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .bounds import (CosmoSourceParams, ExperimentParams, bound_report,
                     lambda_bound)
from .core import NATURAL, SI, UnitSystem
from .errors import NUMERICAL_ERRORS, VALIDATION_ERRORS
from .field import (CorrelationModel, FieldGrid, estimate_g1, estimate_g2,
                    odd_moment_check, sample_field)
from .master import (GrwParams, closed_form_kernel, decoherence_factor,
                     evolve_pure_decoherence, evolve_with_free_hamiltonian,
                     general_kernel, grw_params)
from .montecarlo import McParams, coherence_mc, fit_decoherence_rate

FLIST = "float_list"

FIELD_SPECS = [
    ("tau", float, 1.0, "correlation time"),
    ("dt", float, None, "grid step (default tau/8)"),
    ("n_steps", int, 32768, "number of grid points"),
    ("seed", int, 42, "RNG seed"),
    ("max_lag", float, None, "largest correlation lag to estimate (default 3 tau)"),
    ("g1_table", str, None, "CSV file of (lag, value) rows for a tabulated g1"),
    ("units", str, "natural", "unit system: natural or si"),
    ("out", str, "confdec-out/field", "output directory"),
]

MC_SPECS = [
    ("a0", float, 0.1, "fluctuation amplitude"),
    ("mass", float, 1.0, "particle mass"),
    ("tau", float, 1.0, "correlation time"),
    ("dx", float, 5.0, "wavepacket separation x' - x"),
    ("t_list", FLIST, [100.0, 200.0, 300.0, 400.0], "flight times, comma separated"),
    ("n_samples", int, 2000, "realizations per flight time"),
    ("seed", int, 1234, "master RNG seed"),
    ("dt", float, None, "integration step (default tau/8)"),
    ("units", str, "natural", "unit system: natural or si"),
    ("out", str, "confdec-out/mc", "output directory"),
]

KERNEL_SPECS = [
    ("tau", float, 1.0, "correlation time"),
    ("a0", float, 0.1, "fluctuation amplitude"),
    ("mass", float, 1.0, "particle mass"),
    ("dx_list", FLIST, [0.0, 0.25, 0.5, 1.0, 2.0, 5.0], "separations for factor curves"),
    ("t_list", FLIST, [0.0, 100.0, 200.0, 300.0, 400.0], "times for factor curves"),
    ("compare_t", FLIST, [100.0, 1000.0], "times for general-vs-closed comparison"),
    ("g1_table", str, None, "CSV file of (lag, value) rows for a tabulated g1"),
    ("units", str, "natural", "unit system: natural or si"),
    ("out", str, "confdec-out/kernel", "output directory"),
]

EVOLVE_SPECS = [
    ("input", str, None, "density matrix file (.json or .csv)"),
    ("lambda_grw", float, None, "localization rate (default from a0/tau/mass)"),
    ("alpha", float, None, "localization scale (default from tau)"),
    ("a0", float, 0.1, "fluctuation amplitude used when rate not given"),
    ("tau", float, 1.0, "correlation time used when rate not given"),
    ("mass", float, 1.0, "particle mass for the derived rate"),
    ("t", float, 100.0, "evolution time (pure decoherence path)"),
    ("kinetic_mass", float, None, "enable free-Hamiltonian evolution with this mass"),
    ("dt", float, None, "split step (required with kinetic-mass)"),
    ("n_steps", int, None, "number of split steps (required with kinetic-mass)"),
    ("units", str, "natural", "unit system: natural or si"),
    ("out", str, "confdec-out/evolve", "output directory"),
]

BOUND_SPECS = [
    ("mass_amu", float, 132.9, "particle mass in amu"),
    ("flight_time", float, 0.32, "interferometer flight time in s"),
    ("contrast_loss", float, 0.03, "observed fractional contrast loss"),
    ("separation", float, None, "wavepacket separation in m (optional)"),
    ("lambda_cut", float, None, "explicit cutoff for the predicted-loss report"),
    ("reference_bound", float, 18.0, "externally published bound to compare against"),
    ("cosmo_amplitude", float, 1e-30, "cosmological source amplitude"),
    ("cosmo_tau", float, 1e-13, "cosmological source correlation time in s"),
    ("cosmo_density", float, 1e-29, "energy density limit in g/cm^3"),
    ("sweep_mass", FLIST, [], "masses (amu) for a sweep table"),
    ("sweep_time", FLIST, [], "flight times (s) for a sweep table"),
    ("sweep_loss", FLIST, [], "contrast losses for a sweep table"),
    ("out", str, "confdec-out/bound", "output directory"),
]


def _convert(value, typ):
    if value is None:
        return None
    if typ == FLIST:
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        return [float(x) for x in str(value).split(",") if x.strip()]
    if typ is int and isinstance(value, str):
        return int(float(value)) if "." in value else int(value)
    return typ(value)


def _load_config(path: str) -> dict:
    p = Path(path)
    text = p.read_text()
    if p.suffix == ".json":
        obj = json.loads(text)
        return obj.get("params", obj)
    cfg = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line has no '=': {raw!r}")
        key, val = line.split("=", 1)
        cfg[key.strip().replace("-", "_")] = val.strip()
    return cfg


def _resolve(args, config: dict, specs) -> dict:
    params = {}
    for name, typ, default, _help in specs:
        value = getattr(args, name, None)
        if value is None:
            value = config.get(name, default)
        params[name] = _convert(value, typ)
    if params.get("units") not in (None, "natural", "si"):
        raise ValueError(f"units must be 'natural' or 'si', got {params['units']!r}")
    return params


def _constants(params):
    return NATURAL if params.get("units", "natural") == "natural" else SI


def _unit_system(params):
    return UnitSystem(mode=params.get("units", "natural"), tau_si=1.0)


def _constants_dict(constants):
    return {"c": constants.c, "hbar": constants.hbar, "G": constants.G,
            "amu": constants.amu, "t_planck": constants.t_planck,
            "l_planck": constants.l_planck}


def _outdir(params) -> Path:
    out = Path(params["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(outdir: Path, command: str, params: dict, outputs):
    record = {k: v for k, v in params.items() if k != "out"}
    io.write_json(outdir / "manifest.json",
                  {"command": command, "version": __version__,
                   "params": record, "outputs": sorted(outputs)})


def _correlation_model(params) -> CorrelationModel:
    if params.get("g1_table"):
        rows = np.loadtxt(params["g1_table"], delimiter=",", ndmin=2)
        return CorrelationModel.tabulated(rows[:, 0], rows[:, 1],
                                          tau=params.get("tau"))
    return CorrelationModel.gaussian(params["tau"])


def cmd_field(params) -> int:
    units = _unit_system(params)
    model = _correlation_model(params)
    dt = params["dt"] if params["dt"] is not None else model.tau / 8.0
    max_lag = (params["max_lag"] if params["max_lag"] is not None
               else 3.0 * model.tau)
    grid = FieldGrid(dt=dt, n_steps=params["n_steps"])
    realization = sample_field(model, grid, params["seed"])
    g1 = estimate_g1(realization, max_lag)
    g2 = estimate_g2(realization, max_lag)
    moments = odd_moment_check(realization)

    tlab = units.label("time")
    out = _outdir(params)
    io.realization_to_csv(realization, out / "realization.csv", tlab)
    io.correlation_to_csv(g1, out / "g1.csv", tlab)
    io.correlation_to_csv(g2, out / "g2.csv", tlab)
    io.moments_to_csv(moments, out / "moments.csv")

    check_lags = [lag for lag in (0.0, model.tau / 2.0, model.tau, 2.0 * model.tau)
                  if lag <= max_lag]
    checks = {}
    for lag in check_lags:
        k = int(round(lag / dt))
        target = model.g1(g1.lags[k])
        for stream in ("plus", "minus"):
            dev = abs(g1.estimates[stream][k] - target)
            checks[f"g1_{stream}_lag_{lag:g}"] = bool(dev <= 3.0 * g1.stderrs[stream][k])
        checks[f"g1_cross_lag_{lag:g}"] = bool(
            abs(g1.estimates["cross"][k]) <= 3.0 * g1.stderrs["cross"][k])
        g2_target = 1.0 + 2.0 * target**2
        checks[f"g2_plus_lag_{lag:g}"] = bool(
            abs(g2.estimates["plus"][k] - g2_target) <= 3.0 * g2.stderrs["plus"][k])
        checks[f"g2_cross_lag_{lag:g}"] = bool(
            abs(g2.estimates["cross"][k] - 1.0) <= 3.0 * g2.stderrs["cross"][k])
    for order, est, err in moments:
        checks[f"odd_moment_{order}"] = bool(abs(est) <= 4.0 * err)

    summary = {
        "inputs": {k: v for k, v in params.items() if k != "out"},
        "constants": _constants_dict(units.constants),
        "results": {
            "n_steps": grid.n_steps,
            "duration": grid.duration,
            "sample_mean_plus": float(realization.xi_plus.mean()),
            "sample_mean_minus": float(realization.xi_minus.mean()),
            "sample_var_plus": float(realization.xi_plus.var()),
            "sample_var_minus": float(realization.xi_minus.var()),
        },
        "checks": checks,
    }
    io.write_json(out / "summary.json", summary)
    _write_manifest(out, "field", params,
                    ["realization.csv", "g1.csv", "g2.csv", "moments.csv",
                     "summary.json"])
    if not all(checks.values()):
        print("field: statistical checks failed", file=sys.stderr)
        return 3
    return 0


def cmd_mc(params) -> int:
    constants = _constants(params)
    units = _unit_system(params)
    mc = McParams(a0=params["a0"], mass=params["mass"], tau=params["tau"],
                  positions=(0.0, params["dx"]), t_list=tuple(params["t_list"]),
                  n_samples=params["n_samples"], seed=params["seed"],
                  dt=params["dt"], constants=constants)
    estimate = coherence_mc(mc)
    out = _outdir(params)
    io.coherence_to_csv(estimate, out / "coherence.csv",
                        units.label("length"), units.label("time"))
    outputs = ["coherence.csv", "rate.json"]
    _write_manifest(out, "mc", params, outputs)

    gp = grw_params(params["mass"], params["a0"], params["tau"], constants)
    dx = mc.delta_x
    predicted = gp.lambda_grw * (1.0 - math.exp(-0.25 * gp.alpha * dx * dx))
    last = max(estimate.records, key=lambda r: r.t)
    undersampled = abs(last.mean) <= 5.0 * last.stderr
    report = {
        "inputs": {k: v for k, v in params.items() if k != "out"},
        "constants": _constants_dict(constants),
        "results": {"lambda_grw": gp.lambda_grw, "alpha": gp.alpha,
                    "predicted_rate": predicted},
        "checks": {"signal_above_noise": bool(not undersampled)},
    }
    if undersampled:
        io.write_json(out / "rate.json", report)
        print("mc: coherence at largest T is within 5 stderr of zero",
              file=sys.stderr)
        return 3
    fit = fit_decoherence_rate(estimate)
    report["results"].update(rate=fit.rate, rate_stderr=fit.stderr,
                             intercept=fit.intercept,
                             ratio_to_predicted=(fit.rate / predicted
                                                 if predicted > 0 else None))
    if predicted > 0:
        report["checks"]["rate_within_3_stderr"] = bool(
            abs(fit.rate - predicted) <= 3.0 * max(fit.stderr, 1e-300))
    io.write_json(out / "rate.json", report)
    return 0


def cmd_kernel(params) -> int:
    constants = _constants(params)
    units = _unit_system(params)
    model = _correlation_model(params)
    gp = grw_params(params["mass"], params["a0"], model.tau, constants)
    out = _outdir(params)

    rows = [(dx, t, decoherence_factor(dx, t, gp))
            for dx in params["dx_list"] for t in params["t_list"]]
    io.write_csv(out / "factors.csv",
                 [f"delta_x[{units.label('length')}]",
                  f"t[{units.label('time')}]", "factor[1]"], rows)

    comparison = []
    checks = {}
    gaussian = model.kind == "gaussian"
    for t_total in params["compare_t"]:
        for dx in params["dx_list"]:
            general = general_kernel(model, dx, t_total, params["mass"],
                                     params["a0"], constants)
            closed = closed_form_kernel(dx, t_total, params["mass"],
                                        params["a0"], model.tau, constants)
            if closed != 0.0:
                rel = (general - closed) / abs(closed)
            else:
                rel = 0.0 if general == 0.0 else math.inf
            comparison.append((dx, t_total, general, closed, rel))
            if gaussian:
                key = f"closed_form_dx_{dx:g}_T_{t_total:g}"
                if closed == 0.0:
                    scale = gp.lambda_grw * t_total
                    checks[key] = bool(abs(general) <= 1e-12 * scale)
                else:
                    checks[key] = bool(abs(rel) <= model.tau / t_total)
    io.write_csv(out / "comparison.csv",
                 [f"delta_x[{units.label('length')}]",
                  f"T[{units.label('time')}]", "general_kernel[1]",
                  "gaussian_closed_form[1]", "rel_deviation[1]"], comparison)

    summary = {
        "inputs": {k: v for k, v in params.items() if k != "out"},
        "constants": _constants_dict(constants),
        "results": {"lambda_grw": gp.lambda_grw, "alpha": gp.alpha,
                    "correlation_kind": model.kind},
        "checks": checks,
    }
    io.write_json(out / "summary.json", summary)
    _write_manifest(out, "kernel", params,
                    ["factors.csv", "comparison.csv", "summary.json"])
    if not all(checks.values()):
        print("kernel: closed-form agreement checks failed", file=sys.stderr)
        return 3
    return 0


def cmd_evolve(params) -> int:
    if not params.get("input"):
        raise ValueError("evolve requires --input (density matrix .json or .csv)")
    constants = _constants(params)
    units = _unit_system(params)
    path = Path(params["input"])
    if path.suffix == ".json":
        rho = io.density_matrix_from_json(path)
    else:
        rho = io.density_matrix_from_csv(path)
    if params["lambda_grw"] is not None and params["alpha"] is not None:
        gp = GrwParams(lambda_grw=params["lambda_grw"], alpha=params["alpha"])
    else:
        gp = grw_params(params["mass"], params["a0"], params["tau"], constants)

    if params["kinetic_mass"] is not None:
        if params["dt"] is None or params["n_steps"] is None:
            raise ValueError("kinetic evolution needs both --dt and --n-steps")
        evolved = evolve_with_free_hamiltonian(rho, gp, params["kinetic_mass"],
                                               params["dt"], params["n_steps"],
                                               constants)
        t_total = params["dt"] * params["n_steps"]
    else:
        evolved = evolve_pure_decoherence(rho, gp, params["t"])
        t_total = params["t"]

    out = _outdir(params)
    io.density_matrix_to_json(evolved, out / "evolved.json")
    io.density_matrix_to_csv(evolved, out / "evolved.csv", units.label("length"))
    min_eig = evolved.min_eigenvalue()
    herm_dev = float(np.abs(evolved.entries - evolved.entries.conj().T).max())
    checks = {
        "trace_preserved": bool(abs(evolved.trace() - rho.trace()) <= 1e-9),
        "positive_semidefinite": bool(min_eig >= -1e-9),
        "hermitian": bool(herm_dev <= 1e-12 * max(np.abs(evolved.entries).max(), 1e-300)),
    }
    summary = {
        "inputs": {k: v for k, v in params.items() if k != "out"},
        "constants": _constants_dict(constants),
        "results": {"lambda_grw": gp.lambda_grw, "alpha": gp.alpha,
                    "t_total": t_total, "trace_in": rho.trace(),
                    "trace_out": evolved.trace(), "min_eigenvalue": min_eig},
        "checks": checks,
    }
    io.write_json(out / "summary.json", summary)
    _write_manifest(out, "evolve", params,
                    ["evolved.json", "evolved.csv", "summary.json"])
    if not all(checks.values()):
        print("evolve: invariant checks failed", file=sys.stderr)
        return 3
    return 0


def cmd_bound(params) -> int:
    experiment = ExperimentParams(mass_amu=params["mass_amu"],
                                  flight_time=params["flight_time"],
                                  contrast_loss=params["contrast_loss"],
                                  separation=params["separation"])
    source = CosmoSourceParams(energy_density_limit=params["cosmo_density"],
                               correlation_time=params["cosmo_tau"],
                               amplitude=params["cosmo_amplitude"])
    report = bound_report(experiment, lambda_cut=params["lambda_cut"],
                          source=source,
                          reference_bound=params["reference_bound"])
    out = _outdir(params)
    io.write_json(out / "report.json", report)
    outputs = ["report.json"]

    masses = params["sweep_mass"] or [params["mass_amu"]]
    times = params["sweep_time"] or [params["flight_time"]]
    losses = params["sweep_loss"] or [params["contrast_loss"]]
    if params["sweep_mass"] or params["sweep_time"] or params["sweep_loss"]:
        rows = []
        for m in masses:
            for t in times:
                for d in losses:
                    rows.append((m, t, d, lambda_bound(
                        ExperimentParams(m, t, d), SI)))
        io.write_csv(out / "sweep.csv",
                     ["mass[amu]", "flight_time[s]", "contrast_loss[1]",
                      "lambda_bound[1]"], rows)
        outputs.append("sweep.csv")
    _write_manifest(out, "bound", params, outputs)
    return 0


COMMANDS = {
    "field": (FIELD_SPECS, cmd_field, "sample a field and check its statistics"),
    "mc": (MC_SPECS, cmd_mc, "Monte Carlo coherence decay and rate fit"),
    "kernel": (KERNEL_SPECS, cmd_kernel,
               "decoherence factors and general-kernel comparison"),
    "evolve": (EVOLVE_SPECS, cmd_evolve, "evolve a density matrix"),
    "bound": (BOUND_SPECS, cmd_bound, "experimental cutoff bound report"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confdec",
        description="Stochastic conformal-fluctuation decoherence toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")
    for name, (specs, _handler, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None,
                       help="config file (key = value lines, or a manifest.json)")
        for pname, typ, default, help_str in specs:
            flag = "--" + pname.replace("_", "-")
            shown = default if default not in (None, []) else None
            p.add_argument(flag, dest=pname, default=None,
                           help=(f"{help_str}"
                                 + (f" (default {shown})" if shown is not None else "")))
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (None, 0) else int(exc.code)
    if not getattr(args, "command", None):
        parser.print_help()
        return 2
    specs, handler, _help = COMMANDS[args.command]
    try:
        config = _load_config(args.config) if args.config else {}
        params = _resolve(args, config, specs)
        return handler(params)
    except NUMERICAL_ERRORS as exc:
        print(f"confdec {args.command}: {exc}", file=sys.stderr)
        return 3
    except VALIDATION_ERRORS as exc:
        print(f"confdec {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
