"""Command-line interface: ``gmak analyze|equilibria|witness|simulate|transform FILE``.

Exit codes: 0 success, 2 parse/validation error, 3 solver hypothesis
failure, 4 witness hypothesis not met.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .dynamics import IntegrationError, conservation_residuals, integrate
from .equilibria import (
    HypothesisNotMetError,
    RateError,
    TransformError,
    deficiencies,
    find_complex_balancing,
    multistationarity_witness,
    pseudo_reaction_transform,
    resolve_rates,
    solve_in_class,
)
from .exactla import orthogonal_complement, stoichiometric_subspace
from .graph import NotWeaklyReversibleError, decompose
from .netmodel import NetworkError, parse_network, serialize, to_json
from .report import (
    analysis_report,
    equilibria_report,
    jsonable,
    render_text,
    witness_report,
)
from .signspace import EnumerationLimitError

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_WITNESS = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_INPUT) from None
    try:
        return parse_network(text)
    except NetworkError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from None


def _parse_list(text: str, what: str, conv):
    try:
        return [conv(x) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise CliError(f"cannot parse {what} {text!r}", EXIT_INPUT) from None


def _rates(net, args):
    rates = _parse_list(args.rates, "--rates", lambda s: Fraction(s.strip())) if args.rates else None
    try:
        return resolve_rates(net, rates)
    except RateError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None


def _init(net, args):
    if not args.init:
        raise CliError("--init is required", EXIT_INPUT)
    c = _parse_list(args.init, "--init", float)
    if len(c) != net.n:
        raise CliError(f"--init needs {net.n} values (species order {', '.join(net.species_names)})", EXIT_INPUT)
    if any(not x > 0 for x in c):
        raise CliError("--init values must be positive", EXIT_INPUT)
    return np.array(c)


def _emit(args, payload: dict, title: str):
    if args.json:
        print(json.dumps(jsonable(payload), indent=2))
    else:
        sys.stdout.write(render_text(jsonable(payload), title))


def cmd_analyze(args) -> int:
    net = _load(args.file)
    try:
        rep = analysis_report(net)
    except EnumerationLimitError as exc:
        raise CliError(str(exc), EXIT_SOLVER) from None
    _emit(args, rep, f"analysis of {args.file}")
    return EXIT_OK


def cmd_equilibria(args) -> int:
    net = _load(args.file)
    rates = _rates(net, args)
    cprime = _init(net, args)
    if not decompose(net).weakly_reversible:
        raise CliError(
            "no complex balancing equilibrium exists: a network admitting one must be weakly reversible",
            EXIT_SOLVER,
        )
    cstar = find_complex_balancing(net, rates)
    if cstar is None:
        raise CliError("no complex balancing equilibrium found via log-linear solve", EXIT_SOLVER)
    sol = solve_in_class(net, cstar, cprime, starts=args.starts, seed=args.seed, rates=rates)
    _emit(args, equilibria_report(net, rates, cstar, sol), f"complex balancing equilibria of {args.file}")
    return EXIT_OK


def cmd_witness(args) -> int:
    net = _load(args.file)
    try:
        w = multistationarity_witness(net)
    except (HypothesisNotMetError, NotWeaklyReversibleError) as exc:
        raise CliError(f"witness hypothesis not met: {exc}", EXIT_WITNESS) from None
    except EnumerationLimitError as exc:
        raise CliError(str(exc), EXIT_SOLVER) from None
    _emit(args, witness_report(net, w), f"multistationarity witness for {args.file}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    net = _load(args.file)
    rates = _rates(net, args)
    c0 = _init(net, args)
    try:
        traj = integrate(net, rates, c0, args.t_end, rtol=args.rtol, atol=args.atol)
    except IntegrationError as exc:
        raise CliError(f"integration failed: {exc}", EXIT_SOLVER) from None
    drift = conservation_residuals(traj, orthogonal_complement(stoichiometric_subspace(net)))
    if args.json:
        print(json.dumps(jsonable({
            "species": net.species_names,
            "times": traj.times,
            "states": traj.states,
            "rejected_steps": traj.rejected_steps,
            "conservation_drift": drift,
        })))
    else:
        sys.stdout.write(traj.to_csv(net.species_names))
        print(
            f"# steps={len(traj.times) - 1} rejected={traj.rejected_steps} "
            f"max conservation drift={float(np.max(drift, initial=0.0)):.3g}",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_transform(args) -> int:
    net = _load(args.file)
    try:
        out = pseudo_reaction_transform(net)
    except TransformError as exc:
        raise CliError(str(exc), EXIT_SOLVER) from None
    dec = decompose(out)
    defs = deficiencies(out)
    summary = {
        "m": out.m,
        "l": dec.l,
        "t": dec.t,
        "weakly_reversible": dec.weakly_reversible,
        "s": defs.s,
        "delta": defs.delta,
        "method": defs.method,
    }
    if args.json:
        print(json.dumps({"network": to_json(out), "text": serialize(out), "summary": summary}, indent=2))
    else:
        sys.stdout.write(serialize(out))
        sys.stdout.write("# " + " ".join(f"{k}={v}" for k, v in summary.items()) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmak", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gmak {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file")
        p.add_argument("--json", action="store_true", help="emit JSON instead of the text report")
        p.set_defaults(func=func)
        return p

    add("analyze", cmd_analyze, "structural invariants and sign conditions")
    p = add("equilibria", cmd_equilibria, "complex balancing equilibria in one compatibility class")
    p.add_argument("--rates", help="comma-separated rate constants in reaction order")
    p.add_argument("--init", help="comma-separated concentrations c' fixing the class")
    p.add_argument("--starts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    add("witness", cmd_witness, "rates with two equilibria in one class")
    p = add("simulate", cmd_simulate, "integrate the ODE; CSV on stdout")
    p.add_argument("--rates")
    p.add_argument("--init")
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--atol", type=float, default=1e-10)
    add("transform", cmd_transform, "rewrite as classical pseudo-reactions")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"gmak: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
