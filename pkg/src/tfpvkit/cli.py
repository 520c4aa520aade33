"""Command-line entry point: ``tfpvkit <command> file.crn [options]``.

Exit status is 0 on success, 1 when an analysis runs but finds nothing (or
its conclusion is negative) and 2 for bad input.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import ltc as ltc_mod
from . import sccred, sim, tfpv
from .core import ReactionNetwork, rate_vector
from .errors import AnalysisError, CrnError, InputError, NothingFound, NumericalError
from .graph import structure
from .parser import Report, emit_report, network_dict, parse_file, to_jsonable

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2


class UsageError(InputError):
    """A command-line value could not be understood."""


def _number(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def _split(text: Optional[str]) -> List[str]:
    if not text:
        return []
    return [t.strip() for t in text.split(",") if t.strip()]


def _assignments(text: Optional[str]) -> Dict[str, Fraction]:
    out = {}
    for item in _split(text):
        if "=" not in item:
            raise UsageError(f"expected name=value, got {item!r}")
        name, value = item.split("=", 1)
        out[name.strip()] = _number(value)
    return out


def _rates(net: ReactionNetwork, text: Optional[str]):
    """``1,1,0,0`` (reaction order) or ``k1=2,km1=1`` merged over the file bindings."""
    items = _split(text)
    if items and all("=" not in i for i in items):
        if len(items) != net.m:
            raise UsageError(f"expected {net.m} rate values, got {len(items)}")
        return tuple(_number(i) for i in items)
    return rate_vector(net, _assignments(text))


def _state(net: ReactionNetwork, text: Optional[str], names: Optional[Sequence[str]] = None):
    names = list(names or net.species)
    items = _split(text)
    if not items:
        raise UsageError("a state vector is required")
    if all("=" not in i for i in items):
        if len(items) != len(names):
            raise UsageError(f"expected {len(names)} values, got {len(items)}")
        return tuple(_number(i) for i in items)
    given = {net.species[net.species_index(k)]: v for k, v in _assignments(text).items()}
    missing = [n for n in names if n not in given]
    if missing:
        raise UsageError(f"no value for {', '.join(missing)}")
    return tuple(given[n] for n in names)


def _floats(text: Optional[str]) -> List[float]:
    return [float(_number(t)) for t in _split(text)]


# --------------------------------------------------------------------------
# commands


def cmd_analyze(net, args, report: Report) -> int:
    report.summary = structure(net).to_dict()
    return EXIT_OK


def cmd_tfpv(net, args, report: Report) -> int:
    if args.verify_at:
        parts = args.verify_at.split(";")
        if len(parts) != 3:
            raise UsageError("--verify-at expects 'rates;state;s'")
        k_hat = _rates(net, parts[0])
        x0 = _state(net, parts[1])
        try:
            s = int(parts[2])
        except ValueError:
            raise UsageError(f"dimension must be an integer, got {parts[2]!r}") from None
        result = tfpv.verify_tfpv_at_point(net, k_hat, x0, s)
        report.summary = {"mode": "verify", "passed": result.passed}
        report.certificates = [result]
        return EXIT_OK if result.passed else EXIT_NEGATIVE
    if args.precheck:
        result = tfpv.no_positive_tfpv_precheck(net)
        report.summary = {"mode": "precheck", "verdict": result.verdict}
        report.certificates = [result]
        return EXIT_OK
    if args.first_order:
        certs = tfpv.first_order_tfpv(net, verify=not args.no_verify)
        mode = "first-order"
    else:
        certs = tfpv.enumerate_structural_tfpv(net, args.max_off, verify=not args.no_verify)
        mode = "structural"
    report.summary = {"mode": mode, "count": len(certs)}
    report.certificates = certs
    if not certs:
        raise NothingFound("no TFPV certificate found")
    return EXIT_OK


def cmd_ltc(net, args, report: Report) -> int:
    sets = ltc_mod.enumerate_ltc(net, all_sets=args.all, max_size=args.max_size)
    report.certificates = sets
    report.summary = {"count": len(sets), "minimal": sum(1 for s in sets if s.minimal)}
    if args.integrals:
        links = ltc_mod.first_integral_links(net, args.bound)
        report.summary["integrals"] = links
        report.summary["hull_checks"] = {
            ",".join(s.species): ltc_mod.integral_in_ltc_hull(net, s.indices) for s in sets
        }
    if not sets:
        raise NothingFound("no LTC species set")
    return EXIT_OK


def cmd_scale(net, args, report: Report) -> int:
    species = _split(args.species)
    if args.off:
        system = ltc_mod.partial_scale(net, _split(args.off), species)
    else:
        system = ltc_mod.scale(net, species)
    report.summary = system.to_dict()
    report.certificates = []
    if not args.json:
        report.summary["_text"] = system.listing()
    return EXIT_OK


def cmd_scc(net, args, report: Report) -> int:
    retained = _split(args.retain) or None
    restriction = sccred.restrict_to_scc(net, retained=retained)
    theta = _assignments(args.theta)
    unknown = set(theta) - set(restriction.theta_names)
    if unknown:
        raise UsageError(f"unknown level names: {', '.join(sorted(unknown))}")
    missing = [t for t in restriction.theta_names if t not in theta]
    if missing:
        raise UsageError(f"no value for level {', '.join(missing)}")
    report.summary = {"restriction": restriction}
    if args.point is None:
        return EXIT_OK
    point = _state(net, args.point, restriction.retained_names)
    k = _rates(net, args.kappa)
    result = sccred.near_tfpv_check(restriction, point, k, theta, net)
    report.summary["check"] = result
    report.certificates = [result]
    return EXIT_OK if result.verdict == sccred.TFPV_DIMENSION_ONE else EXIT_NEGATIVE


def cmd_simulate(net, args, report: Report) -> int:
    k = [float(v) for v in _rates(net, args.kappa)]
    x0 = [float(v) for v in _state(net, args.x0)]
    if args.probe:
        result = sim.attractivity_probe(
            net, _rates(net, args.kappa), _state(net, args.x0), args.radius, args.samples, args.t, args.step, args.seed
        )
        report.summary = {"mode": "probe", "probe": result}
        return EXIT_OK
    if args.eps_sweep:
        direction = _floats(args.direction) if args.direction else [0.0] * net.m
        if len(direction) != net.m:
            raise UsageError(f"expected {net.m} direction values")
        scaled = [net.species_index(s) for s in _split(args.ltc)] or None
        rows = sim.reduction_error(
            net, sim.PerturbationCurve(tuple(k), tuple(direction)), _floats(args.eps_sweep), x0, args.t, args.step, scaled
        )
        report.summary = {"mode": "eps-sweep", "scaled": [net.species[i] for i in scaled or []]}
        report.certificates = rows
        return EXIT_OK
    traj = sim.integrate(net, k, x0, args.t, args.step, record_every=args.record_every)
    report.summary = {"mode": "trajectory", "trajectory": traj}
    if args.csv:
        Path(args.csv).write_text(traj.to_csv(), encoding="utf-8")
    elif not args.json:
        report.summary["_text"] = traj.to_csv().rstrip("\n")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "tfpv": cmd_tfpv,
    "ltc": cmd_ltc,
    "scale": cmd_scale,
    "scc": cmd_scc,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="network file (.crn)")
    common.add_argument("--json", action="store_true", help="machine-readable JSON report")

    parser = argparse.ArgumentParser(prog="tfpvkit", description="Structural TFPV analysis of reaction networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common], help="structure summary")

    p = sub.add_parser("tfpv", parents=[common], help="TFPV certificates")
    p.add_argument("--max-off", type=int, default=None, help="largest switch-off set to try")
    p.add_argument("--first-order", action="store_true", help="first-order network criterion")
    p.add_argument("--verify-at", metavar="RATES;STATE;S", help="check the TFPV conditions at one point")
    p.add_argument("--precheck", action="store_true", help="test for absence of positive TFPVs")
    p.add_argument("--no-verify", action="store_true", help="skip point verification of certificates")

    p = sub.add_parser("ltc", parents=[common], help="LTC species sets")
    p.add_argument("--all", action="store_true", help="list non-minimal sets too")
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--integrals", action="store_true", help="relate sets to nonnegative first integrals")
    p.add_argument("--bound", type=int, default=ltc_mod.DEFAULT_COEFFICIENT_BOUND, help="coefficient bound")

    p = sub.add_parser("scale", parents=[common], help="slow-fast system for an LTC set")
    p.add_argument("--species", required=True, help="comma-separated species to scale")
    p.add_argument("--off", help="comma-separated reactions entering at order eps")

    p = sub.add_parser("scc", parents=[common], help="restriction to a compatibility class")
    p.add_argument("--retain", help="comma-separated retained species")
    p.add_argument("--theta", default="", help="level values, e.g. e0=0,s0=1")
    p.add_argument("--point", help="retained coordinates (values or name=value)")
    p.add_argument("--kappa", help="rate values (list or label=value)")

    p = sub.add_parser("simulate", parents=[common], help="numerical integration")
    p.add_argument("--kappa", help="rate values (list or label=value)")
    p.add_argument("--x0", required=True, help="initial state")
    p.add_argument("--t", type=float, default=10.0, help="end time (window for sweeps)")
    p.add_argument("--step", type=float, default=1e-2)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--csv", help="write the trajectory to this file")
    p.add_argument("--eps-sweep", help="comma-separated decreasing eps values")
    p.add_argument("--direction", help="rate perturbation direction for the sweep")
    p.add_argument("--ltc", help="scaled species for the sweep")
    p.add_argument("--probe", action="store_true", help="attractivity probe around --x0")
    p.add_argument("--radius", type=float, default=0.01)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=None, help=f"random seed (default ${sim.SEED_ENV} or {sim.DEFAULT_SEED})")
    return parser


def _text(report: Report) -> str:
    lines = [f"{report.command}: {report.network.get('name', '')}"]
    summary = dict(report.summary)
    body = summary.pop("_text", None)
    # a command with its own listing prints only that
    for key, value in ({} if body else summary).items():
        lines.append(f"{key}: {_short(to_jsonable(value))}")
    for item in report.certificates:
        lines.append(f"- {_short(to_jsonable(item))}")
    if body:
        lines.append(body)
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def _short(value) -> str:
    if isinstance(value, dict):
        return ", ".join(f"{k}={_short(v)}" for k, v in value.items())
    if isinstance(value, list):
        return "[" + "; ".join(_short(v) for v in value) + "]"
    return str(value)


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    path = Path(args.file)
    code = EXIT_OK
    error: Optional[CrnError] = None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            net = parse_file(path)
        except OSError as exc:
            print(f"error: {exc.strerror}: {args.file}", file=stderr)
            return EXIT_INPUT
        except InputError as exc:
            print(f"error: {_kind(exc)}: {exc}", file=stderr)
            return EXIT_INPUT
        report = Report(command=args.command, network=network_dict(net, path.stem))
        try:
            code = COMMANDS[args.command](net, args, report)
        except InputError as exc:
            print(f"error: {_kind(exc)}: {exc}", file=stderr)
            return EXIT_INPUT
        except (AnalysisError, NumericalError) as exc:
            error = exc
            code = EXIT_NEGATIVE
        except (KeyError, ValueError) as exc:
            print(f"error: {exc}", file=stderr)
            return EXIT_INPUT
    report.warnings = sorted({str(w.message) for w in caught})
    if error is not None:
        report.summary.setdefault("error", {"kind": _kind(error), "message": str(error)})
        print(f"{_kind(error)}: {error}", file=stderr)
    if args.json:
        report.summary.pop("_text", None)
        stdout.write(emit_report(report))
    else:
        stdout.write(_text(report))
    return code


def _kind(exc: Exception) -> str:
    name = type(exc).__name__
    return "SyntaxError" if name == "CrnSyntaxError" else name


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
