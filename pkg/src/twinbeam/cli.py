"""Command-line interface.

Subcommands:

  state     print the Gaussian parameters, generating-polynomial
            coefficients, covariance matrix and quantifiers of a state
  crit      evaluate one non-classicality criterion on a state
  pnd       dump the joint photon-number distribution as CSV
  boundary  locate sign changes of a criterion or quantifier along one axis
  scan      evaluate targets over a parameter grid (CSV / JSON / SVG output)
  selftest  run the built-in consistency battery

States are described everywhere by the same flags: --bp/--bs/--bi for the
twin-beam parameters, then optionally --t/--phi for a beam splitter and
--eta/--eta2 for detection loss, applied in that order.

Exit codes: 0 on success, 1 for usage and parameter errors, 2 for numerical
failures.  Machine-readable error records go to stderr as single-line JSON.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys

import numpy as np

from . import selftest as selftest_module
from .criteria import FAMILIES, CriterionId, evaluate
from .errors import ConfigError, OrderLimitError, ParameterError, TwinbeamError
from .moments import (build_k_matrix, photon_number_distribution, pnd_table)
from .quantifiers import classify
from .scan import (AXIS_NAMES, AxisSpec, ScanSpec, TargetSpec, _Pipeline,
                   run_scan, write_boundaries_json, write_csv)
from .states import (BeamSplitterParams, TwinBeamParams, attenuate,
                     beam_splitter, covariance_n, symplectic_eigenvalues,
                     twin_beam)
from .svg import render_svg

__all__ = ["main"]

_BOUNDARY_DEFAULT_RANGES = {
    "bp": (1e-6, 10.0),
    "bs": (1e-6, 10.0),
    "bi": (1e-6, 10.0),
    "t": (0.5, 1.0),
    "eta": (1e-6, 1.0),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _jsonable(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _print_json(payload, stream=None):
    stream = stream or sys.stdout
    json.dump(_jsonable(payload), stream, sort_keys=True)
    stream.write("\n")


def _add_state_args(parser, require_bp=True):
    parser.add_argument("--bp", type=float, required=require_bp,
                        help="mean photon-pair number")
    parser.add_argument("--bs", type=float, default=0.0,
                        help="thermal noise mean in mode 1 (default 0)")
    parser.add_argument("--bi", type=float, default=0.0,
                        help="thermal noise mean in mode 2 (default 0)")
    parser.add_argument("--t", type=float, default=None,
                        help="beam-splitter transmissivity (omit for none)")
    parser.add_argument("--phi", type=float, default=0.0,
                        help="beam-splitter phase (default 0)")
    parser.add_argument("--eta", type=float, default=None,
                        help="detection efficiency (omit for none)")
    parser.add_argument("--eta2", type=float, default=None,
                        help="efficiency of mode 2 when it differs")


def _state_from_args(args):
    state = twin_beam(TwinBeamParams(args.bp, args.bs, args.bi))
    if args.t is not None:
        state = beam_splitter(state, BeamSplitterParams(args.t, args.phi))
    if args.eta is not None:
        state = attenuate(state, args.eta, args.eta2)
    elif args.eta2 is not None:
        raise ConfigError("--eta2 needs --eta as well")
    return state


def _criterion_from_args(args) -> CriterionId:
    return CriterionId(args.family, args.k1, args.k2, args.mode)


# -- subcommand implementations --------------------------------------------

def _cmd_state(args) -> int:
    state = _state_from_args(args)
    km = build_k_matrix(state)
    report = classify(state)
    nu = symplectic_eigenvalues(state)
    nu_pt = symplectic_eigenvalues(state, partial_transpose=True)
    payload = {
        "b1": state.b1, "b2": state.b2,
        "c1": state.c1, "c2": state.c2,
        "d12": state.d12, "dbar12": state.dbar12,
        "physical": state.is_physical(),
        "symplectic": list(nu),
        "symplectic_pt": list(nu_pt),
        "negativity": report.negativity,
        "entangled": report.entangled,
        "i_ncl": [report.i_ncl_1, report.i_ncl_2],
        "locally_nonclassical": list(report.locally_nonclassical),
        "k_matrix": {name: getattr(km, name) for name in
                     ("k12", "k13", "k14", "k22", "k24", "k33", "k34", "k44")},
        "covariance_n": covariance_n(state).entries,
    }
    _print_json(payload)
    return 0


def _cmd_crit(args) -> int:
    state = _state_from_args(args)
    cid = _criterion_from_args(args)
    result = evaluate(state, cid, max_order=args.max_order)
    _print_json({
        "criterion": cid.label(),
        "value": result.value,
        "nonclassical": result.nonclassical,
        "tol": result.tol,
        "max_order_used": result.max_order_used,
    })
    return 0


def _cmd_pnd(args) -> int:
    state = _state_from_args(args)
    if args.nmax is not None:
        if args.nmax < 0:
            raise ConfigError("--nmax must be non-negative")
        p = pnd_table(state, args.nmax, args.nmax)
        tail = 1.0 - float(p.sum())
    else:
        dist = photon_number_distribution(state, tail_tol=args.tail_tol)
        p, tail = dist.p, dist.tail_mass
    out = sys.stdout
    header = ["n1\\n2"] + [str(j) for j in range(p.shape[1])]
    out.write(",".join(header) + "\n")
    for i in range(p.shape[0]):
        out.write(",".join([str(i)] + [format(v, ".12g") for v in p[i]])
                  + "\n")
    out.write(f"# tail_mass,{format(tail, '.12g')}\n")
    return 0


def _boundary_target(args) -> TargetSpec:
    if args.family == "negativity":
        return TargetSpec("negativity")
    if args.family == "i_ncl":
        return TargetSpec("local", mode=args.mode)
    return TargetSpec("criterion",
                      criterion=CriterionId(args.family, args.k1, args.k2,
                                            args.mode))


def _cmd_boundary(args) -> int:
    target = _boundary_target(args)
    lo_default, hi_default = _BOUNDARY_DEFAULT_RANGES[args.axis]
    lo = lo_default if args.min is None else args.min
    hi = hi_default if args.max is None else args.max
    axis = AxisSpec(args.axis, lo, hi, args.samples, args.scale)

    fixed = {}
    for name in ("bp", "bs", "bi", "t", "eta", "phi"):
        if name == args.axis:
            continue
        value = getattr(args, name)
        if name in ("bs", "bi", "phi"):
            if value:
                fixed[name] = value
        elif value is not None:
            fixed[name] = value
    if args.axis != "bp" and "bp" not in fixed:
        raise ConfigError(f"--bp is required when scanning {args.axis}")

    spec = ScanSpec(axes=(axis,), targets=(target,), fixed=fixed,
                    noise_mode=args.noise_mode, threads=1)
    pipeline = _Pipeline(spec)
    values = axis.values()
    indicator = pipeline.evaluate({args.axis: values})[0][2]

    log_spacing = axis.scale == "log"
    crossings = []
    finite = np.isfinite(indicator)
    sign = indicator <= 0.0
    for k in range(len(values) - 1):
        if not (finite[k] and finite[k + 1]) or sign[k] == sign[k + 1]:
            continue
        a, b = float(values[k]), float(values[k + 1])
        sign_a = bool(sign[k])
        for _ in range(200):
            mid = (a * b) ** 0.5 if log_spacing else 0.5 * (a + b)
            f_mid = float(pipeline.evaluate(
                {args.axis: np.array([mid])})[0][2][0])
            if (f_mid <= 0.0) == sign_a:
                a = mid
            else:
                b = mid
            if b - a <= args.tol * max(abs(a), abs(b), 1e-12):
                break
        x = (a * b) ** 0.5 if log_spacing else 0.5 * (a + b)
        value = float(pipeline.evaluate(
            {args.axis: np.array([x])})[0][0][0])
        crossings.append({"x": x, "value": value})
    _print_json({
        "target": target.label(),
        "axis": args.axis,
        "fixed": fixed,
        "noise_mode": args.noise_mode,
        "crossings": crossings,
    })
    return 0


def _parse_axis_flag(text: str) -> AxisSpec:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise ConfigError(
            f"axes are written name:min:max:count[:scale], got {text!r}")
    name, lo, hi, count = parts[:4]
    scale = parts[4] if len(parts) == 5 else "linear"
    try:
        return AxisSpec(name, float(lo), float(hi), int(count), scale)
    except ValueError:
        raise ConfigError(f"malformed axis {text!r}") from None


def _parse_fixed_flag(text: str):
    name, sep, value = text.partition("=")
    if not sep:
        raise ConfigError(f"fixed values are written name=value, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise ConfigError(f"malformed fixed value {text!r}") from None


def _load_config(path: str):
    """INI scan description: [scan] targets/noise_mode/threads, [fixed]
    name=value pairs, and one [axis:NAME] section per axis in order."""
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    axes = []
    targets = []
    fixed = {}
    noise_mode = None
    threads = None
    for section in cp.sections():
        if section == "scan":
            raw = cp.get(section, "targets", fallback="")
            targets = [TargetSpec.parse(part)
                       for part in raw.split(",") if part.strip()]
            noise_mode = cp.get(section, "noise_mode", fallback=None)
            if cp.has_option(section, "threads"):
                threads = cp.getint(section, "threads")
        elif section == "fixed":
            for key, value in cp.items(section):
                try:
                    fixed[key] = float(value)
                except ValueError:
                    raise ConfigError(
                        f"fixed value {key} = {value!r} is not a number"
                    ) from None
        elif section.startswith("axis:"):
            name = section.split(":", 1)[1]
            def _num(option, default=None):
                if cp.has_option(section, option):
                    return cp.getfloat(section, option)
                return default
            lo = _num("min", _num("start"))
            hi = _num("max", _num("stop"))
            if lo is None or hi is None:
                raise ConfigError(
                    f"axis section {section!r} needs min and max")
            count = cp.getint(section, "count", fallback=2)
            scale = cp.get(section, "scale", fallback="linear")
            axes.append(AxisSpec(name, lo, hi, count, scale))
        else:
            raise ConfigError(f"unknown config section {section!r}")
    return axes, targets, fixed, noise_mode, threads


def _cmd_scan(args) -> int:
    axes, targets, fixed, noise_mode, threads = [], [], {}, None, None
    if args.config:
        axes, targets, fixed, noise_mode, threads = _load_config(args.config)
    if args.axis:
        axes = [_parse_axis_flag(text) for text in args.axis]
    if args.target:
        targets = [TargetSpec.parse(part)
                   for text in args.target
                   for part in text.split(",") if part.strip()]
    for text in args.fixed or []:
        name, value = _parse_fixed_flag(text)
        fixed[name] = value
    if args.noise_mode is not None:
        noise_mode = args.noise_mode
    if args.threads is not None:
        threads = args.threads

    spec = ScanSpec(axes=tuple(axes), targets=tuple(targets), fixed=fixed,
                    noise_mode=noise_mode or "independent", threads=threads)
    result = run_scan(spec)

    if args.csv == "-":
        write_csv(result, sys.stdout)
    else:
        with open(args.csv, "w") as handle:
            write_csv(result, handle)
    if args.json is not None:
        with open(args.json, "w") as handle:
            write_boundaries_json(result, handle)
    if args.svg is not None:
        if len(result.shape) != 2:
            raise ConfigError("SVG output needs a two-dimensional scan")
        for tgt in spec.targets:
            label = tgt.label()
            safe = label.replace(":", "-").replace("/", "-")
            path = f"{args.svg}{safe}.svg"
            with open(path, "w") as handle:
                handle.write(render_svg(result, label))
    if result.errors:
        sys.stderr.write(json.dumps(
            {"error": "EvaluationError",
             "message": f"{len(result.errors)} grid cells failed; see the "
                        "JSON error records"},
            sort_keys=True) + "\n")
    return 0


def _cmd_selftest(_args) -> int:
    failures = selftest_module.run(stream=sys.stdout)
    return 0 if failures == 0 else 2


# -- parser wiring -----------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="twinbeam",
                     description="Non-classicality analysis of noisy twin "
                                 "beams and their beam-splitter transforms.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_state = sub.add_parser("state", help="inspect one state")
    _add_state_args(p_state)
    p_state.set_defaults(func=_cmd_state)

    p_crit = sub.add_parser("crit", help="evaluate one criterion")
    _add_state_args(p_crit)
    p_crit.add_argument("--family", required=True, choices=FAMILIES)
    p_crit.add_argument("--k1", type=int, default=0)
    p_crit.add_argument("--k2", type=int, default=0)
    p_crit.add_argument("--mode", type=int, default=1, choices=(1, 2))
    p_crit.add_argument("--max-order", type=int, default=None)
    p_crit.set_defaults(func=_cmd_crit)

    p_pnd = sub.add_parser("pnd", help="dump the photon-number distribution")
    _add_state_args(p_pnd)
    p_pnd.add_argument("--nmax", type=int, default=None,
                       help="per-mode cutoff (default: adaptive)")
    p_pnd.add_argument("--tail-tol", type=float, default=1e-10)
    p_pnd.set_defaults(func=_cmd_pnd)

    p_bound = sub.add_parser("boundary",
                             help="locate sign changes along one axis")
    _add_state_args(p_bound, require_bp=False)
    p_bound.add_argument("--family", required=True,
                         choices=FAMILIES + ("negativity", "i_ncl"))
    p_bound.add_argument("--k1", type=int, default=0)
    p_bound.add_argument("--k2", type=int, default=0)
    p_bound.add_argument("--mode", type=int, default=1, choices=(1, 2))
    p_bound.add_argument("--axis", required=True, choices=AXIS_NAMES)
    p_bound.add_argument("--min", type=float, default=None)
    p_bound.add_argument("--max", type=float, default=None)
    p_bound.add_argument("--samples", type=int, default=128)
    p_bound.add_argument("--scale", choices=("linear", "log"),
                         default="linear")
    p_bound.add_argument("--tol", type=float, default=1e-8,
                         help="relative refinement tolerance on the axis")
    p_bound.add_argument("--noise-mode", default="independent",
                         choices=("independent", "balanced", "unbalanced"))
    p_bound.set_defaults(func=_cmd_boundary)

    p_scan = sub.add_parser("scan", help="evaluate targets over a grid")
    p_scan.add_argument("--config", default=None,
                        help="INI file with [scan], [fixed], [axis:NAME]")
    p_scan.add_argument("--axis", action="append", default=None,
                        metavar="NAME:MIN:MAX:COUNT[:SCALE]")
    p_scan.add_argument("--target", action="append", default=None,
                        metavar="TARGET[,TARGET..]")
    p_scan.add_argument("--fixed", action="append", default=None,
                        metavar="NAME=VALUE")
    p_scan.add_argument("--noise-mode", default=None,
                        choices=("independent", "balanced", "unbalanced"))
    p_scan.add_argument("--threads", type=int, default=None)
    p_scan.add_argument("--csv", default="-",
                        help="CSV output path, - for stdout (default)")
    p_scan.add_argument("--json", default=None,
                        help="boundary/error JSON output path")
    p_scan.add_argument("--svg", default=None,
                        help="SVG output path prefix, one file per target")
    p_scan.set_defaults(func=_cmd_scan)

    p_self = sub.add_parser("selftest", help="run built-in checks")
    p_self.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, OrderLimitError, ParameterError) as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)},
            sort_keys=True) + "\n")
        return 1
    except TwinbeamError as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)},
            sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
