"""Command-line front end: ``scan``, ``explain`` and ``viz`` subcommands.

``scan`` finds the leaks, ``explain`` adds the reason and exploitability
verdict per leak, ``viz`` renders the match matrix as CSV plus an SVG
heatmap. Exit codes: 0 success (also when no leaks are found), 1 input or
I/O error, 2 bad flags.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import report as rpt
from .collection import REJECT, SPLIT_SKIP, MissingPolicy, load_collection
from .errors import LeakScanError
from .reasons import ReasonConfig, ReasonKind, reason_report, tally
from .scan import AUTO, ScanConfig, scan

_FORMATS = {"wide": "wide-csv", "long": "long-csv", "json": "json"}
_FOOTER_LABELS = {ReasonKind.EXACT_MATCH: "exact"}


def _workers(text):
    if text == AUTO:
        return AUTO
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"workers must be a positive integer or 'auto', got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("workers must be a positive integer or 'auto'")
    return value


def _add_common(p):
    p.add_argument("--input", required=True, help="path to the series collection file")
    p.add_argument("--format", choices=sorted(_FORMATS), default="long",
                   help="input format (default: long)")
    p.add_argument("--h", type=int, required=True, metavar="INT",
                   help="segment length to match (>= 3)")
    p.add_argument("--cutoff", type=float, default=1.0,
                   help="cutoff for |r| (default: 1.0)")
    p.add_argument("--missing", choices=["reject", "skip"], default="reject",
                   help="missing-value policy: reject aborts, skip admits the series "
                        "and skips affected windows (default: reject)")
    p.add_argument("--workers", type=_workers, default=None,
                   help="worker process count or 'auto' "
                        "(default: $TSLEAKSCAN_WORKERS or 1)")


def _add_report_flags(p):
    p.add_argument("--output", default=None, help="write the report to this path")
    p.add_argument("--report-format", choices=["json", "csv"], default="json",
                   help="report file format (default: json)")
    p.add_argument("--collapse-overlaps", action="store_true",
                   help="merge runs of consecutive offsets into one range per "
                        "(query, donor) pair")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tsleakscan",
        description="Detect potential data leaks in forecasting competition datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="find matching segments across the collection")
    _add_common(p_scan)
    _add_report_flags(p_scan)
    p_scan.set_defaults(func=cmd_scan)

    p_explain = sub.add_parser("explain", help="scan, then classify and judge each match")
    _add_common(p_explain)
    _add_report_flags(p_explain)
    p_explain.add_argument("--horizon", type=int, default=None, metavar="INT",
                           help="forecast horizon for the usefulness check (default: h)")
    p_explain.set_defaults(func=cmd_explain)

    p_viz = sub.add_parser("viz", help="summarize matches as a matrix CSV and SVG heatmap")
    _add_common(p_viz)
    p_viz.add_argument("--output", default="leaks.svg",
                       help="heatmap SVG path; the matrix CSV lands next to it "
                            "(default: leaks.svg)")
    p_viz.add_argument("--ang", type=float, default=90.0, metavar="DEGREES",
                       help="column label rotation angle (default: 90)")
    p_viz.set_defaults(func=cmd_viz)
    return parser


def _validate(parser, args):
    if not 0.0 < args.cutoff <= 1.0:
        parser.error("cutoff must be in (0,1]")
    if args.h < 3:
        parser.error("h must be an integer >= 3")
    if getattr(args, "horizon", None) is not None and args.horizon < 1:
        parser.error("horizon must be >= 1")
    if args.workers is None:
        env = os.environ.get("TSLEAKSCAN_WORKERS")
        if env is not None:
            try:
                args.workers = _workers(env)
            except argparse.ArgumentTypeError as exc:
                parser.error(f"TSLEAKSCAN_WORKERS: {exc}")
        else:
            args.workers = 1


def _run_scan(args):
    policy = MissingPolicy(REJECT if args.missing == "reject" else SPLIT_SKIP)
    collection = load_collection(args.input, format=_FORMATS[args.format], policy=policy)
    cfg = ScanConfig(h=args.h, cutoff=args.cutoff, workers=args.workers)
    return collection, scan(collection, cfg)


def _match_line(m):
    return f"{m.query_id} -> {m.donor_id}: {m.start}-{m.end}, r={m.r:.3f}"


def _print_skips(report):
    for sid, reason in report.skipped_queries:
        print(f"skipped query {sid}: {reason}")


def cmd_scan(args) -> int:
    collection, report = _run_scan(args)
    matches = report.matches
    if args.collapse_overlaps:
        matches = rpt.collapse_overlaps(matches)
    for m in matches:
        print(_match_line(m))
    _print_skips(report)
    if not matches:
        print("no leaks detected")
    else:
        print(f"{len(matches)} match{'es' if len(matches) != 1 else ''}")
    if args.output:
        out_report = replace(report, matches=matches)
        rpt.write_report(out_report, args.output, format=args.report_format)
        print(f"report written to {args.output}")
    return 0


def _format_predicted(values):
    return " ".join("?" if v is None else format(v, ".6g") for v in values)


def cmd_explain(args) -> int:
    collection, report = _run_scan(args)
    reasoned = reason_report(report, collection, ReasonConfig(horizon=args.horizon))
    horizon = args.horizon if args.horizon is not None else args.h
    matches = report.matches
    if args.collapse_overlaps:
        matches, reasoned = rpt.collapse_with_reasons(matches, reasoned)
    for m, rm in zip(matches, reasoned):
        line = f"{_match_line(m)}, {rm.kind.value}, {'useful' if rm.useful else 'not useful'}"
        if rm.useful:
            line += f"; predicted test: {_format_predicted(rm.predicted_test)}"
        print(line)
    _print_skips(report)
    kinds, useful = tally(reasoned)
    if not matches:
        print("0 matches")
    else:
        by_kind = ", ".join(
            f"{kinds[k]} {_FOOTER_LABELS.get(k, k.value)}" for k in ReasonKind if k in kinds
        )
        print(f"{len(matches)} matches: {by_kind}; {useful} useful")
    if args.output:
        out_report = replace(report, matches=matches)
        rpt.write_report(out_report, args.output, format=args.report_format,
                         reasoned=reasoned, horizon=horizon)
        print(f"report written to {args.output}")
    return 0


def cmd_viz(args) -> int:
    collection, report = _run_scan(args)
    matrix = rpt.build_matrix(report, collection)
    svg_path = Path(args.output)
    csv_path = svg_path.with_suffix(".csv")
    rpt.write_matrix_csv(matrix, csv_path)
    rpt.render_heatmap(matrix, svg_path, label_angle=args.ang)
    print(f"{matrix.total()} match{'es' if matrix.total() != 1 else ''} "
          f"across {len(matrix.row_ids)} series")
    print(f"matrix written to {csv_path}")
    print(f"heatmap written to {svg_path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        return args.func(args)
    except LeakScanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
