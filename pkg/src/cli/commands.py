import argparse
import json
import logging
import os
import sys

import numpy as np

from src.axioms import check_garp, check_sarseu, sarseu_lp_oracle
from src.beliefs import find_beliefs
from src.config import load_settings
from src.errors import DatasetParseError, FamilyDomainError, SarseuInconclusiveError, SeuCornerError
from src.families import FAMILIES, all_family_report, parse_family, solve_region
from src.model import (
    dataset_to_json,
    dump_dataset,
    load_dataset,
    make_beliefs,
    parse_rational,
    validation_report,
)
from src.reporting import CornerReport, plot_data, save_plot_csv, save_plot_svg
from src.synth import generate_dataset, random_corner_budgets
from src.verify import verify_certificate

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def emit(payload, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load(args):
    return load_dataset(args.file, args.format)


def _verdict(passed):
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_validate(args):
    data = _load(args)
    emit(
        {
            "valid": True,
            "states": list(data.states),
            "observations": validation_report(data),
        }
    )
    return EXIT_PASS


def cmd_garp(args):
    result = check_garp(_load(args))
    emit(result.to_dict())
    return _verdict(result.is_consistent)


def cmd_sarseu(args):
    data = _load(args)
    result = check_sarseu(data, max_pairs=args.max_pairs)
    body = result.to_dict()
    if args.lp_oracle:
        oracle = sarseu_lp_oracle(data)
        body["lp_oracle"] = oracle.to_dict()
        body["lp_oracle"]["agrees"] = oracle.found != result.is_consistent
    emit(body)
    return _verdict(result.is_consistent)


def cmd_corners(args):
    rows = validation_report(_load(args))
    all_corners = not any(row["diversified"] for row in rows)
    emit({"all_corners": all_corners, "observations": rows})
    return _verdict(all_corners)


def cmd_beliefs(args):
    result = find_beliefs(_load(args), strict=not args.weak)
    emit(result.to_dict())
    return _verdict(result.feasible)


def _fixed(args):
    """--fix c=1 or alpha=1/2, values kept as text so rationals stay exact."""
    fixed = {}
    for item in (args.fix or "").split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise FamilyDomainError(f"fixed parameter {item!r} is not of the form name=value")
        name, value = (part.strip() for part in item.split("=", 1))
        if name not in ("c", "alpha"):
            raise FamilyDomainError(f"only c or alpha can be fixed, got {name!r}")
        fixed[name] = value
    return fixed


def cmd_solve(args):
    data = _load(args)
    beliefs = make_beliefs(args.pi)
    fixed = _fixed(args)
    if args.family == "all":
        report = all_family_report(beliefs, data, fixed)
        emit({tag: region.to_dict() for tag, region in report.items()})
        return _verdict(all(not region.is_empty for tag, region in report.items() if tag != "crra"))
    region = solve_region(args.family, beliefs, data, fixed)
    emit(region.to_dict())
    return _verdict(not region.is_empty)


def cmd_verify(args):
    data = _load(args)
    beliefs = make_beliefs(args.pi)
    family = parse_family(args.family, args.params)
    certificate = verify_certificate(data, beliefs, family, tol=args.tol, grid_points=args.grid)
    emit(certificate.to_dict())
    return _verdict(certificate.valid)


def _read_budgets(path):
    if not os.path.exists(path):
        raise FileNotFoundError(f"Budget file not found: {path}")
    with open(path) as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as e:
            raise DatasetParseError(f"Error reading budget file: {e}") from None
    rows = payload.get("budgets", []) if isinstance(payload, dict) else payload
    try:
        return [(row["prices"], parse_rational(row["wealth"])) for row in rows]
    except (KeyError, TypeError):
        raise DatasetParseError("each budget needs 'prices' and 'wealth'") from None


def cmd_synth(args):
    beliefs = make_beliefs(args.pi)
    family = parse_family(args.family, args.params)
    if args.budgets:
        budgets = _read_budgets(args.budgets)
    else:
        rng = np.random.default_rng(load_settings().seed)
        budgets = random_corner_budgets(beliefs, args.random_corners, rng)
    data = generate_dataset(family, beliefs, budgets)
    if args.out:
        dump_dataset(data, args.out)
        emit({"dataset": args.out, "observations": data.n_observations})
    else:
        emit(dataset_to_json(data))
    return EXIT_PASS


def cmd_report(args):
    data = _load(args)
    beliefs = make_beliefs(args.pi) if args.pi else None
    fixed = _fixed(args)
    report = CornerReport(data, beliefs, fixed, tol=args.tol, grid_points=args.grid)
    body = report.generate_report()
    if args.out:
        if data.n_states == 2:
            report.save_plots(args.out)
        else:
            logger.warning("Plots need two states; skipping %s.", args.out)
    emit(body)
    return _verdict(body["verdict"] == "pass")


def cmd_plot_data(args):
    data = _load(args)
    beliefs = make_beliefs(args.pi)
    family = parse_family(args.family, args.params)
    frame = plot_data(data, beliefs, family, points=args.points)
    csv_path = os.path.join(args.out, f"{family.tag}.csv")
    svg_path = os.path.join(args.out, f"{family.tag}.svg")
    save_plot_csv(frame, csv_path)
    save_plot_svg(frame, svg_path, title=family.tag)
    emit({"csv": csv_path, "svg": svg_path, "rows": len(frame)})
    return EXIT_PASS


def _add_file(parser):
    parser.add_argument("file", help="Dataset file (JSON or CSV)")
    parser.add_argument("--format", choices=["json", "csv"], help="Override format detection")


def _add_pi(parser, required=True):
    parser.add_argument("--pi", required=required, help="Beliefs as rationals, e.g. 1/4,3/4")


def _add_family(parser, params=True, allow_all=False):
    choices = sorted(FAMILIES) + (["all"] if allow_all else [])
    parser.add_argument("--family", required=True, choices=choices, help="Utility family")
    if params:
        parser.add_argument("--params", default="", help="Family parameters, e.g. beta=0.002")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="seu-corner", description="Subjective expected utility tests for corner asset demands"
    )
    parser.add_argument("--verbose", action="store_true", help="Log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="Validate a dataset")
    _add_file(p)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("garp", help="Check GARP")
    _add_file(p)
    p.set_defaults(handler=cmd_garp)

    p = sub.add_parser("sarseu", help="Check SARSEU")
    _add_file(p)
    p.add_argument("--max-pairs", type=int, help="Longest witness reported (default 2*K*n)")
    p.add_argument("--lp-oracle", action="store_true", help="Cross-check with the LP oracle")
    p.set_defaults(handler=cmd_sarseu)

    p = sub.add_parser("corners", help="Classify observations as corner or diversified")
    _add_file(p)
    p.set_defaults(handler=cmd_corners)

    p = sub.add_parser("beliefs", help="Search for compatible beliefs")
    _add_file(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--strict", action="store_true", help="Strict ratio dominance (default)")
    mode.add_argument("--weak", action="store_true", help="Weak ratio dominance")
    p.set_defaults(handler=cmd_beliefs)

    p = sub.add_parser("solve", help="Solve a family's parameter region")
    _add_file(p)
    _add_pi(p)
    _add_family(p, params=False, allow_all=True)
    p.add_argument("--fix", help="Fixed shifted_power parameter, c=1 or alpha=1/2")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("verify", help="Verify a rationalization with the grid oracle")
    _add_file(p)
    _add_pi(p)
    _add_family(p)
    p.add_argument("--grid", type=int, help="Grid points per budget-face dimension")
    p.add_argument("--tol", type=float, help="Expected-utility tolerance")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("synth", help="Generate a dataset from an SEU agent")
    _add_pi(p)
    _add_family(p)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--budgets", help="JSON file of {prices, wealth} budgets")
    source.add_argument("--random-corners", type=int, help="Number of random ratio-dominant budgets")
    p.add_argument("--out", help="Write the dataset here instead of stdout")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("report", help="Run the full pipeline")
    _add_file(p)
    _add_pi(p, required=False)
    p.add_argument("--fix", help="Fixed shifted_power parameter (default c=1)")
    p.add_argument("--grid", type=int, help="Grid points per budget-face dimension")
    p.add_argument("--tol", type=float, help="Expected-utility tolerance")
    p.add_argument("--out", default=os.path.join("reports", "plots"), help="Plot directory")
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("plot-data", help="Budget lines and indifference curves as CSV and SVG")
    _add_file(p)
    _add_pi(p)
    _add_family(p)
    p.add_argument("--points", type=int, help="Samples per curve")
    p.add_argument("--out", default=os.path.join("reports", "plots"), help="Output directory")
    p.set_defaults(handler=cmd_plot_data)
    return parser


def configure_logging(verbose=False):
    root = logging.getLogger()
    level = logging.INFO if verbose else logging.WARNING
    for handler in root.handlers:
        if getattr(handler, "_seu_corner_console", False):
            handler.setLevel(level)
            handler.setStream(sys.stderr)
            break
    else:
        handler = logging.StreamHandler(sys.stderr)
        handler._seu_corner_console = True
        handler.setLevel(level)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)
    root.setLevel(logging.INFO)


def run(argv=None):
    """Parse argv, run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except SarseuInconclusiveError as e:
        emit({"axiom": "sarseu", "verdict": "inconclusive", "message": str(e)})
        return EXIT_FAIL
    except (SeuCornerError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
