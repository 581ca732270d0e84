"""Command-line front end.

Every subcommand writes a CSV body preceded by ``#`` provenance lines. The
body depends only on the inputs; a timestamp is added only on request.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from casimir import __version__
from casimir.dielectric import (
    DrudeModel, DrudeParams, ExtrapolationPolicy, TabulatedModel, drude_eps_real_axis,
    load_optical_table, resistivity_spectrum,
)
from casimir.drude_fit import FitWindow, fit_drude
from casimir.errors import InputError, NumericalError
from casimir.experiments import (
    load_force_dataset, residuals, sensitivity_sweep, shift_separations,
)
from casimir.lifshitz import ForceJob, Layer, LayerStack, QuadratureSpec, ThermalSpec
from casimir.materials import material, preset
from casimir.roughness import MODEL_LABEL, RoughnessProfile, averaged_force
from casimir.units import (
    parse_frequency, parse_length, parse_resistivity, parse_temperature,
)

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
OUTPUT_DIR_ENV = "CASIMIR_OUTPUT_DIR"


# -- material resolution ---------------------------------------------------


def _extrapolation(name):
    if name == "drude":
        return ExtrapolationPolicy()
    if name == "none":
        return ExtrapolationPolicy(None, None)
    raise InputError(f"unknown extrapolation {name!r}")


def _read_keyvalue(path):
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}: expected key = value, got {line!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def load_material(ref, extrapolation="drude"):
    """Built-in name, optical-table CSV, or key-value Drude file."""
    path = Path(ref)
    if not path.exists():
        return material(ref)
    if path.suffix.lower() == ".csv":
        return TabulatedModel(load_optical_table(path), _extrapolation(extrapolation), path.stem)
    kv = _read_keyvalue(path)
    if "omega_p" not in kv:
        raise InputError(f"{path}: material file needs omega_p")
    wp = parse_frequency(kv["omega_p"])
    if kv.get("ideal_plasma", "false").lower() in ("1", "true", "yes"):
        return DrudeModel(DrudeParams(wp, 0.0, ideal_plasma=True))
    if "omega_tau" in kv:
        return DrudeModel(DrudeParams(wp, parse_frequency(kv["omega_tau"])))
    if "rho_0" in kv:
        return DrudeModel(DrudeParams.from_resistivity(wp, parse_resistivity(kv["rho_0"])))
    raise InputError(f"{path}: material file needs omega_tau or rho_0")


def build_stack(args):
    if args.preset:
        if args.material or args.top_layer:
            raise InputError("--preset cannot be combined with --material/--top-layer")
        return preset(args.preset).stack(args.experiment)
    if not args.material:
        raise InputError("give --material or --preset")
    sub = load_material(args.material, args.extrapolation)
    if not args.top_layer:
        return LayerStack.homogeneous(sub)
    ref, sep, thick = args.top_layer.rpartition(":")
    if not sep:
        raise InputError("--top-layer must look like <name|file>:<thickness>")
    return LayerStack(Layer(sub), Layer(load_material(ref, args.extrapolation), parse_length(thick)))


def build_job(args):
    stack = build_stack(args)
    radius = parse_length(args.radius) if args.radius else None
    thermal = ThermalSpec(parse_temperature(args.temperature), args.mode)
    quad = QuadratureSpec(args.rel_tol, args.x_max_offset, args.tail_tol)
    return ForceJob(stack, args.geometry, radius, thermal, quad)


def _grid(args):
    lo, hi = parse_length(args.a_min), parse_length(args.a_max)
    n = int(args.a_points)
    if not (0 < lo <= hi) or n < 1:
        raise InputError("need 0 < a-min <= a-max and a-points >= 1")
    if n == 1:
        return [lo]
    return np.linspace(lo, hi, n).tolist()


# -- output ----------------------------------------------------------------


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return repr(float(x))


def csv_body(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _config_hash(args):
    skip = {"output", "config", "timestamp", "func"}
    items = sorted((k, v) for k, v in vars(args).items() if k not in skip)
    return hashlib.sha256(repr(items).encode()).hexdigest()[:16]


def _emit(args, body, meta):
    lines = [f"# casimir {__version__} {args.command}",
             f"# config_sha256: {_config_hash(args)}"]
    lines += [f"# {k}: {v}" for k, v in meta.items()]
    if args.timestamp:
        lines.append(f"# timestamp: {_dt.datetime.now(_dt.timezone.utc).isoformat()}")
    text = "\n".join(lines) + "\n" + body
    target = args.output
    if target is None and os.environ.get(OUTPUT_DIR_ENV):
        target = str(Path(os.environ[OUTPUT_DIR_ENV]) / f"{args.command}.csv")
    if target is None or target == "-":
        sys.stdout.write(text)
    else:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(text)


def _job_meta(job):
    meta = {"stack": job.stack.describe(), "geometry": job.geometry,
            "mode": job.thermal.describe(), "tolerances": job.quad.describe()}
    if job.radius:
        meta["radius_m"] = repr(job.radius)
    return meta


# -- subcommands -----------------------------------------------------------


def cmd_fit(args):
    table = load_optical_table(args.input)
    lam_max = parse_length(args.lambda_max) if args.lambda_max else math.inf
    res = fit_drude(table, FitWindow(parse_length(args.lambda_min), lam_max), args.weights)
    p = res.params
    body = csv_body(
        ["omega_p_rad_s", "sigma_omega_p_rad_s", "omega_tau_rad_s", "sigma_omega_tau_rad_s",
         "rho_0_ohm_m", "residual_norm", "n_points", "weighting"],
        [[p.omega_p, res.sigma_omega_p, p.omega_tau, res.sigma_omega_tau, res.rho_0(),
          res.residual_norm, res.n_points_used, res.weighting]])
    _emit(args, body, {"window": f"lambda in [{args.lambda_min}, {args.lambda_max or 'inf'}]",
                       "sigma_policy": f"{args.weights} residuals, s^2 (J^T J)^-1"})
    print(f"omega_p   = {p.omega_p:.6e} +- {res.sigma_omega_p:.2e} rad/s\n"
          f"omega_tau = {p.omega_tau:.6e} +- {res.sigma_omega_tau:.2e} rad/s\n"
          f"rho_0     = {res.rho_0() / 1e-8:.4g} uOhm cm  ({res.n_points_used} points, "
          f"{res.weighting} weighting)", file=sys.stderr)


def cmd_epsilon(args):
    model = load_material(args.material, args.extrapolation)
    lo, hi = parse_frequency(args.zeta_min), parse_frequency(args.zeta_max)
    if not (0 < lo < hi) or args.points < 2:
        raise InputError("need 0 < zeta-min < zeta-max and at least 2 points")
    zeta = np.logspace(math.log10(lo), math.log10(hi), args.points)
    eps = np.atleast_1d(model.eps_imag(zeta))
    _emit(args, csv_body(["zeta_rad_s", "eps"], zip(zeta, eps)), {"material": model.describe()})


def cmd_check_drude(args):
    table = load_optical_table(args.input)
    sel = np.ones(len(table), bool)
    if args.lambda_min:
        sel &= FitWindow(parse_length(args.lambda_min)).mask(table.omega)
    spec = resistivity_spectrum(zip(table.omega[sel], table.eps[sel]))
    rho = np.array([r for _, r in spec])
    ok = rho[np.isfinite(rho) & (rho > 0)]
    flat = float(ok.max() / ok.min()) if ok.size else math.nan
    _emit(args, csv_body(["omega_rad_s", "rho_ohm_m"], spec),
          {"flatness_max_over_min": repr(flat)})


def _force_curve(job, grid, profile):
    rows = []
    for a in grid:
        res = job.evaluate(a)
        value = res.value
        if profile is not None:
            value = averaged_force(job.force, profile, a)
        rows.append([a, value, res.n_terms_used, res.tail_estimate])
    return rows


def cmd_force(args):
    job = build_job(args)
    profile = RoughnessProfile.from_csv(args.roughness) if args.roughness else None
    rows = _force_curve(job, _grid(args), profile)
    meta = _job_meta(job)
    if profile is not None:
        meta["roughness"] = f"{MODEL_LABEL}; {len(profile.entries)} heights"
    name = "pressure_Pa" if job.geometry == "plate-plate" else "force_N"
    _emit(args, csv_body(["a_m", name, "n_terms", "tail_estimate"], rows), meta)


def cmd_residual(args):
    job = build_job(args)
    ds = load_force_dataset(args.data, args.units)
    if args.shift:
        ds = shift_separations(ds, parse_length(args.shift))
    table = residuals(ds, job)
    meta = _job_meta(job)
    meta.update({"dataset": ds.label, "shift_applied_m": repr(ds.shift_applied)})
    _emit(args, table.to_csv(), meta)


def cmd_sweep(args):
    job = build_job(args)
    try:
        deltas = [float(d) for d in args.deltas.split(",")]
    except ValueError:
        raise InputError(f"bad --deltas {args.deltas!r}") from None
    grid = _grid(args)
    out = sensitivity_sweep(job, args.parameter, deltas, grid)
    rows = [[d, a, df] for d, dfs in out for a, df in zip(grid, dfs)]
    meta = _job_meta(job)
    meta["parameter"] = args.parameter
    _emit(args, csv_body(["delta", "a_m", "delta_force"], rows), meta)


# -- parser ----------------------------------------------------------------


def _common(p):
    p.add_argument("--output", "-o", help="output file (default stdout or $%s)" % OUTPUT_DIR_ENV)
    p.add_argument("--timestamp", action="store_true", help="add a timestamp header line")
    p.add_argument("--config", help="key = value file with defaults for any flag")


def _model_flags(p, grid=True):
    p.add_argument("--material", help="built-in name, optical CSV or key-value Drude file")
    p.add_argument("--top-layer", help="<name|file>:<thickness>, e.g. aupd-limit:15nm")
    p.add_argument("--preset", help="named configuration, e.g. paper-upper-limit")
    p.add_argument("--experiment", default="afm", choices=["afm", "tp"],
                   help="which coating of the preset to use")
    p.add_argument("--extrapolation", default="drude", choices=["drude", "none"])
    p.add_argument("--geometry", default="sphere-plate", choices=["sphere-plate", "plate-plate"])
    p.add_argument("--radius", help="sphere radius, e.g. 100um")
    p.add_argument("--temperature", default="300K")
    p.add_argument("--mode", default="sum", choices=["sum", "integral"])
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.add_argument("--x-max-offset", type=float, default=50.0)
    p.add_argument("--tail-tol", type=float, default=1e-10)
    if grid:
        p.add_argument("--a-min", default="100nm")
        p.add_argument("--a-max", default="900nm")
        p.add_argument("--a-points", type=int, default=50)


def make_parser():
    parser = argparse.ArgumentParser(
        prog="casimir", description="Finite-temperature Casimir force between real metals.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="Drude fit of an optical table")
    p.add_argument("--input", required=True)
    p.add_argument("--lambda-min", default="2um")
    p.add_argument("--lambda-max")
    p.add_argument("--weights", default="relerr", choices=["relerr", "uniform"])
    _common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("epsilon", help="eps(i zeta) of a material")
    p.add_argument("--material", required=True)
    p.add_argument("--extrapolation", default="drude", choices=["drude", "none"])
    p.add_argument("--zeta-min", default="1e13")
    p.add_argument("--zeta-max", default="1e17")
    p.add_argument("--points", type=int, default=100)
    _common(p)
    p.set_defaults(func=cmd_epsilon)

    p = sub.add_parser("check-drude", help="resistivity spectrum of an optical table")
    p.add_argument("--input", required=True)
    p.add_argument("--lambda-min", help="restrict to wavelengths above this")
    _common(p)
    p.set_defaults(func=cmd_check_drude)

    p = sub.add_parser("force", help="force or pressure curve")
    _model_flags(p)
    p.add_argument("--roughness", help="height_m,weight CSV")
    _common(p)
    p.set_defaults(func=cmd_force)

    p = sub.add_parser("residual", help="experimental minus model force")
    _model_flags(p, grid=False)
    p.add_argument("--data", required=True)
    p.add_argument("--units", help="e.g. nm,pN; overrides the file's units line")
    p.add_argument("--shift", help="move all separations by this, e.g. 16nm")
    _common(p)
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("sweep", help="force change under parameter variation")
    _model_flags(p)
    p.add_argument("--parameter", required=True, help="e.g. top.omega_p, substrate.rho_0")
    p.add_argument("--deltas", default="-0.1,0.1", help="comma-separated relative changes")
    _common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def _expand_config(argv):
    """Splice ``--config`` file entries in front of the explicit flags."""
    argv = list(argv)
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
        else:
            continue
        kv = _read_keyvalue(path)
        extra = []
        for k, v in kv.items():
            flag = "--" + k.replace("_", "-")
            if v.lower() == "true":
                extra.append(flag)
            elif v.lower() != "false":
                extra += [flag, v]
        # subcommand stays first; explicit flags come last and win
        return argv[:1] + extra + argv[1:]
    return argv


def run(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        argv = _expand_config(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    def show(message, category, *rest, **kw):
        print(f"warning: {message}", file=sys.stderr)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("once")
            warnings.showwarning = show
            args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
