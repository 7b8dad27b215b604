#!/usr/bin/env python3
"""theta-attest CLI"""

import argparse
import json
import sys
from fractions import Fraction

import mpmath

from . import __version__
from .catalog import CatalogError, load_catalog
from .cfrac import h_cf_prefix, h_from_param, h_product, h_theta, in_cf_window, table_from_catalog, table_lines
from .config import ConfigError, RunConfig
from .identities import SampleContext
from .mparith import BigReal, DomainError, Precision, to_string
from .params import ParamSpec, closed_forms_from_catalog, eval_param
from .qseries import ThetaPoint, euler_product, theta_fneg, theta_general, theta_phi, theta_psi
from .radexpr import ParseError, SymbolPolicy, evaluate, parse
from .report import VerificationReport
from .suites import SAMPLERS, SUITES, run_suites

PREFIX = "[theta-attest]"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3

THETA_FUNCS = {
    "phi": theta_phi,
    "psi": theta_psi,
    "fneg": theta_fneg,
    "euler": euler_product,
}


def _error(message: str):
    print(f"{PREFIX} ERROR: {message}", file=sys.stderr)


def _precision(config: RunConfig) -> Precision:
    try:
        return Precision(config.digits, config.guard)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _rational(text: str, what: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{what} must be a decimal or a/b rational, got '{text}'") from None


def agreement_digits(value: BigReal, reference: BigReal) -> str:
    """Number of leading decimal digits two values share"""
    delta = abs(value - reference).value
    if delta == 0:
        return "all"
    with mpmath.workdps(30):
        scale = max(abs(reference.value), mpmath.mpf(10) ** -value.prec.working)
        return str(max(0, int(mpmath.floor(-mpmath.log10(delta / scale)))))


def handle_config_cli(argv: list[str]) -> int:
    """Handle config subcommand with its own parser"""
    from .config import get_env_path, init_env, set_config, show_config

    parser = argparse.ArgumentParser(prog="theta-attest config", description="Manage default run settings")
    parser.add_argument("--init", action="store_true", help="Initialize .env config file")
    parser.add_argument("--force", action="store_true", help="Overwrite existing config")
    parser.add_argument("--set", dest="assignment", metavar="KEY=VALUE", help="Set one setting")

    args = parser.parse_args(argv)

    if args.init:
        path, created = init_env(force=args.force)
        if created:
            print(f"{PREFIX} Created config file: {path}")
        else:
            print(f"{PREFIX} Config file already exists: {path}")
            print(f"{PREFIX} Use --force to overwrite")
        return EXIT_OK

    if args.assignment:
        key, sep, value = args.assignment.partition("=")
        if not sep:
            _error(f"--set expects KEY=VALUE, got '{args.assignment}'")
            return EXIT_USAGE
        try:
            set_config(key.strip(), value.strip())
        except ConfigError as e:
            _error(str(e))
            return EXIT_USAGE
        print(f"{PREFIX} {key.strip()} set to: {value.strip()}")
        return EXIT_OK

    env_path = get_env_path()
    if not env_path.exists():
        print(f"{PREFIX} No config file found at: {env_path}")
        print(f"{PREFIX} Run 'theta-attest config --init' to create one")
        print()

    print(show_config())
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(config: RunConfig) -> tuple[int, VerificationReport]:
    """Run the selected suites; exit 3 if any sample hit a domain error, 1 on any failure"""
    config.validate_for_verify()
    verbose = not config.quiet and config.output == "text"
    catalog = load_catalog(config.catalog)
    if verbose:
        counts = ", ".join(f"{len(v)} {k}" for k, v in catalog.names().items())
        print(f"{PREFIX} Catalog: {counts}")
        print(f"{PREFIX} Verifying at {config.digits} digits on {config.samples} {config.sampler} samples")

    report = run_suites(config, catalog, progress=(lambda msg: print(f"{PREFIX} {msg}")) if verbose else None)

    errors = [(r, s) for r in report.results if r.status == "error" for s in r.errors]
    for r, s in errors:
        _error(f"{r.suite}/{r.name} at {s.label}: {s.error}")
    if errors:
        return EXIT_DOMAIN, report
    return (EXIT_OK if report.ok else EXIT_FAILED), report


# ---------------------------------------------------------------------------
# eval


def _point(args) -> ThetaPoint:
    if args.q is not None and args.nome is not None:
        raise ConfigError("give either --q or --nome, not both")
    if args.nome is not None:
        return ThetaPoint.nome(_rational(args.nome, "--nome"), 1, args.sign)
    if args.q is None:
        raise ConfigError("eval theta needs --q X or --nome N/K")
    return ThetaPoint.literal(args.sign * _rational(args.q, "--q"))


def _eval_theta(args, prec: Precision) -> list[str]:
    point = _point(args)
    if args.func == "general":
        b = _rational(args.b, "--b") if args.b is not None else None
        if b is None:
            raise ConfigError("eval theta general needs --b")
        value = theta_general(point.realize(prec), b, prec)
        a = str(point).partition("=")[2]
        return [f"f({a}, {b}) = {to_string(value)}  [bilateral series]"]
    value = THETA_FUNCS[args.func](point, prec)
    route = "truncated product" if args.func == "euler" else "series"
    return [f"{args.func}({point}) = {to_string(value)}  [{route}]"]


def _eval_param(args, prec: Precision, catalog_dir) -> list[str]:
    spec = ParamSpec(args.family, _rational(args.k, "K"), _rational(args.n, "N"))
    value = eval_param(spec, prec)
    lines = [f"{spec} = {to_string(value)}  [theta quotient]"]
    catalog = load_catalog(catalog_dir)
    lets = catalog.let_values(prec)
    for entry in closed_forms_from_catalog(catalog):
        if entry.spec == spec:
            expr = entry.fix.expr if entry.fix is not None else entry.expr
            closed = evaluate(expr, lets, prec)
            tag = "closed form, corrected" if entry.fix is not None else "closed form"
            lines.append(f"{spec} = {to_string(closed)}  [{tag} {entry.source}; "
                         f"agrees to {agreement_digits(closed, value)} digits]")
    return lines


def _eval_cf(args, prec: Precision, catalog_dir) -> list[str]:
    n = _rational(args.n, "--n")
    point = ThetaPoint.nome(n)
    reference = h_theta(point, prec)
    lines = [f"H({point}) = {to_string(reference)}  [theta quotient]"]
    routes = [("product", lambda: h_product(point, prec)), ("h_{3,3n} bridge", lambda: h_from_param(n, prec))]
    if in_cf_window(point.realize(prec)):
        routes.append(("three-quotient prefix", lambda: h_cf_prefix(point, prec)))
    for name, route in routes:
        value = route()
        agree = agreement_digits(value, reference)
        lines.append(f"H({point}) = {to_string(value)}  [{name}; agrees to {agree} digits]")

    catalog = load_catalog(catalog_dir)
    lets = catalog.let_values(prec)
    for row in table_from_catalog(catalog):
        if row.n == n:
            closed = evaluate(row.effective, lets, prec)
            tag = "closed form, corrected" if row.fix is not None else "closed form"
            lines.append(f"H({point}) = {to_string(closed)}  [{tag} {row.source}; "
                         f"agrees to {agreement_digits(closed, reference)} digits]")
    return lines


def _eval_expr(args, prec: Precision, catalog_dir) -> list[str]:
    if args.q is not None:
        expr = parse(args.text, SymbolPolicy.THETA_FUNCS)
        ctx = SampleContext(ThetaPoint.literal(_rational(args.q, "--q")), prec)
        return [f"{args.text} = {to_string(ctx.evaluate(expr))}  [at {ctx.label}]"]
    catalog = load_catalog(catalog_dir)
    expr = parse(args.text, SymbolPolicy.CONSTANTS_ONLY, catalog.lets)
    return [f"{args.text} = {to_string(evaluate(expr, catalog.let_values(prec), prec))}"]


def cmd_eval(kind: str, args, config: RunConfig) -> list[str]:
    """Evaluate one quantity; every line names the route that produced it"""
    prec = _precision(config)
    if kind == "theta":
        return _eval_theta(args, prec)
    if kind == "param":
        return _eval_param(args, prec, config.catalog)
    if kind == "cf":
        return _eval_cf(args, prec, config.catalog)
    if kind == "expr":
        return _eval_expr(args, prec, config.catalog)
    raise ConfigError(f"unknown eval kind '{kind}'")


# ---------------------------------------------------------------------------
# table


def cmd_table(config: RunConfig) -> tuple[int, str]:
    """The tabulated H values: n, closed form, series value and |delta|"""
    prec = _precision(config)
    lines = table_lines(load_catalog(config.catalog), prec)
    tol = prec.tolerance()
    code = EXIT_OK if all(line.delta.value < tol for line in lines) else EXIT_FAILED
    rows = [
        {
            "n": str(line.n),
            "closed_form": to_string(line.closed_form),
            "series": to_string(line.series),
            "delta": to_string(line.delta, 3),
            "corrected": line.corrected,
        }
        for line in lines
    ]
    if config.output == "json":
        return code, json.dumps({"schema": 1, "digits": str(prec.digits), "rows": rows}, indent=2, ensure_ascii=False)

    width = prec.digits + 8
    out = [f"{'n':>6}  {'closed form':<{width}}  {'series':<{width}}  |delta|"]
    for row in rows:
        mark = " *" if row["corrected"] else ""
        out.append(f"{row['n']:>6}  {row['closed_form']:<{width}}  {row['series']:<{width}}  {row['delta']}{mark}")
    if any(row["corrected"] for row in rows):
        out.append("  * closed form read with a catalog fix")
    return code, "\n".join(out)


# ---------------------------------------------------------------------------
# list


def cmd_list(config: RunConfig) -> str:
    catalog = load_catalog(config.catalog)
    out = []
    for kind, names in catalog.names().items():
        out.append(f"{kind} ({len(names)}):")
        out.extend(f"  {name}" for name in names)
    if catalog.fixes:
        out.append(f"fix ({len(catalog.fixes)}):")
        out.extend(f"  {f.kind} {f.key}: {f.field}" for f in catalog.fixes)
    out.append("")
    out.append("suites:")
    for suite in SUITES.values():
        out.append(f"  {suite.name:14} {suite.description}")
    return "\n".join(out)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="theta-attest",
        description="High-precision verification of theta-function identities and explicit evaluations",
    )
    parser.add_argument("--version", "-V", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", "-d", type=int, help="Decimal digits (default: THETA_ATTEST_DIGITS or 50)")
    common.add_argument("--catalog", metavar="DIR", help="Directory holding the .cat files (default: embedded)")

    verify = sub.add_parser("verify", parents=[common], help="Run verification suites")
    verify.add_argument("--filter", "-f", metavar="GLOB", help="Only checks whose name matches (comma-separated)")
    verify.add_argument("--samples", type=int, help="Number of sample nomes")
    verify.add_argument("--q-min", metavar="X", help="Lower end of the sample window")
    verify.add_argument("--q-max", metavar="X", help="Upper end of the sample window")
    verify.add_argument("--sampler", choices=SAMPLERS, help="Evenly spaced window or q = 1/(1+n)")
    verify.add_argument("--json", action="store_true", help="Emit the report as JSON")
    verify.add_argument("--timings", action="store_true", help="Include elapsed time per check")
    verify.add_argument("--quiet", "-q", action="store_true", help="Suppress progress output")

    ev = sub.add_parser("eval", help="Evaluate a single quantity")
    kinds = ev.add_subparsers(dest="kind", required=True)

    theta = kinds.add_parser("theta", parents=[common], help="phi, psi, f(-q), Euler product or f(a, b)")
    theta.add_argument("func", choices=[*THETA_FUNCS, "general"])
    theta.add_argument("--q", metavar="X", help="Nome as a decimal or a/b rational (a for general)")
    theta.add_argument("--nome", metavar="N/K", help="Nome exp(-pi sqrt(N/K))")
    theta.add_argument("--sign", type=int, choices=[1, -1], default=1, help="Use -q instead of q")
    theta.add_argument("--b", metavar="X", help="Second argument of f(a, b)")

    prm = kinds.add_parser("param", parents=[common], help="h, h', l or l' at (K, N)")
    prm.add_argument("family", choices=["h", "hp", "l", "lp"])
    prm.add_argument("k", metavar="K")
    prm.add_argument("n", metavar="N")

    cf = kinds.add_parser("cf", parents=[common], help="H(exp(-pi sqrt(N))) by every available route")
    cf.add_argument("--n", required=True, metavar="N")

    expr = kinds.add_parser("expr", parents=[common], help="Evaluate a nested-radical or theta expression")
    expr.add_argument("text", metavar="TEXT")
    expr.add_argument("--q", metavar="X", help="Bind q and allow phi, psi, A(r), ... calls")

    table = sub.add_parser("table", parents=[common], help="Tabulated values of H against the series")
    table.add_argument("--json", action="store_true", help="Emit the table as JSON")

    sub.add_parser("list", parents=[common], help="List catalog records and suites")
    sub.add_parser("config", help="Show or edit default settings (see: theta-attest config --help)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args_list = argv if argv is not None else sys.argv[1:]

    if args_list and args_list[0] == "config":
        return handle_config_cli(args_list[1:])

    args = build_parser().parse_args(args_list)

    try:
        config = RunConfig.from_env(
            digits=args.digits,
            catalog=args.catalog,
            filter=getattr(args, "filter", None),
            samples=getattr(args, "samples", None),
            q_min=getattr(args, "q_min", None),
            q_max=getattr(args, "q_max", None),
            sampler=getattr(args, "sampler", None),
            output="json" if getattr(args, "json", False) else None,
            quiet=getattr(args, "quiet", None),
            timings=getattr(args, "timings", None),
        )

        if args.command == "verify":
            code, report = cmd_verify(config)
            if config.output == "json":
                print(report.to_json(config.timings))
            else:
                report.print_summary(config.timings)
            return code

        if args.command == "eval":
            for line in cmd_eval(args.kind, args, config):
                print(line)
            return EXIT_OK

        if args.command == "table":
            code, text = cmd_table(config)
            print(text)
            return code

        print(cmd_list(config))
        return EXIT_OK

    except (ConfigError, CatalogError, ParseError) as e:
        _error(str(e))
        return EXIT_USAGE
    except DomainError as e:
        _error(str(e))
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
