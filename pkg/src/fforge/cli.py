"""Command-line entry point: ``fforge <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure,
3 census result differs from the reference table (``census --verify``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from contextlib import contextmanager
from dataclasses import replace

from . import census as cz
from .enumeration import free_trees, write_level_sequences
from .errors import InputError, NumericalFailure
from .spectral import DEFAULT_TOL, ExtremaRule, FiedlerReport, Policy

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_MISMATCH = 0, 1, 2, 3

log = logging.getLogger("fforge")


def parse_range(text: str) -> range:
    """``"A..B"`` (inclusive) or a single integer ``"A"``."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B or an integer, got {text!r}") from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return range(lo, hi + 1)


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.12g}"
    if x is None:
        return ""
    if hasattr(x, "value"):
        return str(x.value)
    return str(x)


def to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# --- renderers -------------------------------------------------------------

CENSUS_HEADER = ["n", "trees", "violations", "ratio_percent", "policy"]
SWEEP_HEADER = ["s", "t", "p", "alpha_numeric", "alpha_analytic", "fed_numeric",
                "fed_predicted", "agreement"]
THRESHOLD_HEADER = ["s", "r_s", "f_ss", "floor_f", "empirical_flip", "asymptotic_ratio"]
SUPTEST_HEADER = ["s", "t", "flip_p", "lower_bound", "upper_bound", "within_bounds"]
GROWTH_HEADER = ["direction", "n", "code", "vertex"]


def render_census(rows: list[cz.CensusRow], fmt_name: str, list_violators: bool) -> str:
    if fmt_name == "csv":
        out = to_csv(CENSUS_HEADER, [[r.n, r.trees, r.violations, str(r.ratio_percent),
                                      r.policy] for r in rows])
        if list_violators:
            out += to_csv(["n", "code", "multiplicity", "path", "reason"],
                          [[r.n, v.code.decode(), v.multiplicity, v.path, v.reason]
                           for r in rows for v in r.violators])
        return out
    payload = []
    for r in rows:
        item = {
            "n": r.n, "trees": r.trees, "violations": r.violations,
            "ratio_percent": str(r.ratio_percent), "policy": r.policy.value,
            "degenerate": r.degenerate,
            "degenerate_violations": r.degenerate_violations,
            "strict_violations": r.strict_violations,
        }
        if list_violators:
            item["violators"] = [v.to_dict() for v in r.violators]
        payload.append(item)
    return to_json(payload)


def render_sweep(rows: list[cz.RoseSweepRow], fmt_name: str) -> str:
    table = [[r.s, r.t, r.p, r.alpha_numeric, r.alpha_analytic, r.fed_numeric,
              r.fed_predicted, r.agreement] for r in rows]
    if fmt_name == "csv":
        return to_csv(SWEEP_HEADER, table)
    return to_json([dict(zip(SWEEP_HEADER, [v.value if hasattr(v, "value") else v for v in row]))
                    for row in table])


def render_threshold(rows: list[cz.ThresholdRow], fmt_name: str) -> str:
    table = [[r.s, r.r_s, r.f_ss, r.floor_f, r.empirical_flip, r.asymptotic_ratio] for r in rows]
    if fmt_name == "csv":
        return to_csv(THRESHOLD_HEADER, table)
    return to_json([dict(zip(THRESHOLD_HEADER, row)) for row in table])


def render_suptest(rep: cz.SuptestReport, fmt_name: str) -> str:
    table = [[r.s, r.t, r.flip, r.lower, r.upper, r.within_bounds] for r in rep.rows]
    if fmt_name == "csv":
        return to_csv(SUPTEST_HEADER, table)
    return to_json({
        "s": rep.s,
        "rows": [dict(zip(SUPTEST_HEADER, row)) for row in table],
        "max_flip": rep.max_flip,
        "remark_bound": rep.remark_bound,
        "remark_bound_holds": rep.remark_bound_holds,
    })


def render_growth(rep: cz.GrowthReport, fmt_name: str) -> str:
    if fmt_name == "csv":
        return to_csv(GROWTH_HEADER, [[c.direction, c.n, c.code.decode(), c.vertex]
                                      for c in rep.counterexamples])
    return to_json({
        "n_max": rep.n_max,
        "examined": rep.examined,
        "grow_checks": rep.grow_checks,
        "shrink_checks": rep.shrink_checks,
        "counterexamples": [c.to_dict() for c in rep.counterexamples],
    })


def render_report(report: FiedlerReport, fmt_name: str) -> str:
    if fmt_name == "json":
        return to_json(report.to_dict())
    fed = report.fed
    char = report.characteristic
    lines = [
        f"lambda2         {report.lambda2:.12g}",
        f"multiplicity    {report.multiplicity}",
        f"tree type       {report.tree_type.value}"
        + (f" (characteristic {char})" if char is not None else ""),
        f"zero set        {sorted(report.zero_set)}",
        f"argmin set      {sorted(report.argmin_set)}",
        f"argmax set      {sorted(report.argmax_set)}",
        f"diameter        {fed.diameter}",
        f"extrema dist    {fed.extrema_distance}",
        f"FED             {'satisfied' if fed.satisfied else 'not satisfied'}"
        f" ({fed.reason.value}, {fed.path})",
        "fiedler vector  " + " ".join(f"{x:.12g}" for x in report.vector),
    ]
    return "\n".join(lines) + "\n"


# --- argument handling -----------------------------------------------------

def _common(suppress: bool) -> argparse.ArgumentParser:
    # subcommand copies must not overwrite values given before the subcommand
    def d(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--format", choices=["csv", "json"], default=d("csv"))
    common.add_argument("--out", default=d(None), help="output path (default: stdout)")
    common.add_argument("--tol-zero", type=float, default=d(DEFAULT_TOL.zero))
    common.add_argument("--tol-mult", type=float, default=d(DEFAULT_TOL.mult))
    common.add_argument("--policy", choices=[p.value for p in Policy],
                        default=d(Policy.PROJECTION.value),
                        help="verdict for trees whose lambda_2 is not simple")
    common.add_argument("--extrema", choices=[e.value for e in ExtremaRule],
                        default=d(ExtremaRule.SET.value),
                        help="tie handling among extremal Fiedler values")
    common.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)
    parser = argparse.ArgumentParser(
        prog="fforge", parents=[_common(suppress=False)], allow_abbrev=False,
        description="Fiedler vectors of trees and the extrema/diameter property.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], allow_abbrev=False, help="full Fiedler report of an edge-list file")
    p.add_argument("file")

    p = sub.add_parser("rose", parents=[common], allow_abbrev=False, help="numeric vs analytic sweep over R(s,t,p)")
    p.add_argument("--s", type=parse_range, required=True)
    p.add_argument("--t", type=parse_range, required=True)
    p.add_argument("--p", type=parse_range, required=True)

    p = sub.add_parser("threshold", parents=[common], allow_abbrev=False, help="threshold f(s,s) table")
    p.add_argument("--s", type=parse_range, required=True)
    p.add_argument("--max-vertices", type=int, default=200,
                   help="largest rose tree eigensolved for the empirical flip column")

    p = sub.add_parser("census", parents=[common], allow_abbrev=False, help="FED census over all free trees")
    p.add_argument("--n", type=parse_range, required=True)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--verify", action="store_true",
                   help="exit 3 if counts differ from the reference table")
    p.add_argument("--list-violators", action="store_true")
    p.add_argument("--dump-levels", default=None, metavar="PATH",
                   help="write the enumerated level sequences of the largest n to PATH")

    p = sub.add_parser("conjecture", parents=[common], allow_abbrev=False, help="growth/shrink conjecture probe")
    p.add_argument("--n-max", type=int, required=True)

    p = sub.add_parser("suptest", parents=[common], allow_abbrev=False, help="bounded FED flip probe for s < t")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t-max", type=int, required=True)
    p.add_argument("--p-probe", type=int, default=64)
    return parser


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _config(args) -> cz.Config:
    cfg = cz.Config(
        policy=Policy(args.policy),
        extrema=ExtremaRule(args.extrema),
        tol=replace(DEFAULT_TOL, zero=args.tol_zero, mult=args.tol_mult),
    )
    if getattr(args, "shards", None) is not None:
        cfg = replace(cfg, shards=args.shards)
    if getattr(args, "max_vertices", None) is not None:
        cfg = replace(cfg, max_vertices=args.max_vertices)
    return cfg


def run(args) -> int:
    cfg = _config(args)
    status = EXIT_OK
    if args.command == "analyze":
        text = render_report(cz.analyze_file(args.file, cfg), args.format)
    elif args.command == "rose":
        rows = cz.run_rose_sweep(args.s, args.t, args.p, cfg)
        text = render_sweep(rows, args.format)
    elif args.command == "threshold":
        text = render_threshold(cz.run_threshold_table(args.s, cfg), args.format)
    elif args.command == "census":
        rows = [cz.run_census(n, cfg) for n in args.n]
        if args.dump_levels:
            write_level_sequences(free_trees(args.n[-1]), args.dump_levels)
        text = render_census(rows, args.format, args.list_violators)
        if args.verify:
            problems = [msg for msg in map(cz.verify_census, rows) if msg]
            for msg in problems:
                log.error("verify: %s", msg)
            if problems:
                status = EXIT_MISMATCH
    elif args.command == "conjecture":
        rep = cz.run_conjecture_growth(args.n_max, cfg)
        log.info("examined %d trees: %d grow checks, %d shrink checks, %d counterexamples",
                 rep.examined, rep.grow_checks, rep.shrink_checks, len(rep.counterexamples))
        text = render_growth(rep, args.format)
    elif args.command == "suptest":
        rep = cz.run_suptest(args.s, args.t_max, args.p_probe, cfg)
        log.info("max flip over t: %s (remark bound %d)", rep.max_flip, rep.remark_bound)
        text = render_suptest(rep, args.format)
    else:  # pragma: no cover - argparse rejects unknown commands
        raise AssertionError(args.command)
    with _output(args.out) as fh:
        fh.write(text)
    return status


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except (InputError, OSError) as exc:
        print(f"fforge: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"fforge: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
