"""Result summaries: match matrix, JSON/CSV serialization, SVG heatmap.

The JSON schema is fixed (key order as written)::

    { "config": {"h": .., "cutoff": .., "horizon": ..},
      "skipped_queries": [{"id": .., "reason": ..}, ..],
      "matches": [{"query_id": .., "donor_id": .., "start": .., "end": ..,
                   "r": .., "kind": .., "m": .., "c": .., "useful": ..,
                   "predicted_test": [..]}, ..] }

The reason fields (horizon, kind, m, c, useful, predicted_test) appear only
in explained reports, and predicted_test only on useful matches.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .collection import SeriesCollection
from .errors import ConsistencyError
from .reasons import ReasonedMatch, ReasonKind
from .scan import LeakReport, MatchRecord, ScanConfig


@dataclass
class MatchMatrix:
    """Query x donor grid of match counts, in collection order."""

    row_ids: list[str]
    col_ids: list[str]
    counts: np.ndarray

    def total(self) -> int:
        return int(self.counts.sum())


def build_matrix(report: LeakReport, collection: SeriesCollection) -> MatchMatrix:
    """Count matches per (query, donor) cell; zero rows/columns are kept."""
    ids = collection.ids()
    index = {sid: i for i, sid in enumerate(ids)}
    counts = np.zeros((len(ids), len(ids)), dtype=int)
    for match in report.matches:
        if match.query_id not in index or match.donor_id not in index:
            raise ConsistencyError(
                f"match {match.query_id!r} -> {match.donor_id!r} refers to unknown series"
            )
        counts[index[match.query_id], index[match.donor_id]] += 1
    return MatchMatrix(list(ids), list(ids), counts)


def collapse_overlaps(matches: list[MatchRecord]) -> list[MatchRecord]:
    """Merge runs of consecutive offsets per (query, donor) into one range.

    Readability transform only: the merged record spans the first window's
    start to the last window's end (so end-start+1 exceeds h) and carries
    the r of the strongest member. Input order is preserved.
    """
    collapsed: list[MatchRecord] = []
    run: list[MatchRecord] = []

    def flush():
        if not run:
            return
        best = max(run, key=lambda m: abs(m.r))
        collapsed.append(MatchRecord(run[0].query_id, run[0].donor_id,
                                     run[0].start, run[-1].end, best.r))
        run.clear()

    for m in matches:
        if run and (m.query_id, m.donor_id) == (run[-1].query_id, run[-1].donor_id) \
                and m.start == run[-1].start + 1:
            run.append(m)
        else:
            flush()
            run.append(m)
    flush()
    return collapsed


def collapse_with_reasons(matches: list[MatchRecord], reasoned: list[ReasonedMatch]):
    """Collapse consecutive-offset runs while keeping reasoning aligned.

    Each merged range carries the explanation of its strongest member (the
    overlapping hits of one run come from the same underlying pattern).
    Returns (collapsed_matches, collapsed_reasoned) of equal length.
    """
    out_matches: list[MatchRecord] = []
    out_reasoned: list[ReasonedMatch] = []
    run: list[tuple[MatchRecord, ReasonedMatch]] = []

    def flush():
        if not run:
            return
        best_match, best_rm = max(run, key=lambda pair: abs(pair[0].r))
        merged = MatchRecord(run[0][0].query_id, run[0][0].donor_id,
                             run[0][0].start, run[-1][0].end, best_match.r)
        out_matches.append(merged)
        out_reasoned.append(ReasonedMatch(merged, best_rm.fit, best_rm.kind,
                                          best_rm.useful, best_rm.predicted_test,
                                          best_rm.provenance_note))
        run.clear()

    for m, rm in zip(matches, reasoned):
        if run and (m.query_id, m.donor_id) == (run[-1][0].query_id, run[-1][0].donor_id) \
                and m.start == run[-1][0].start + 1:
            run.append((m, rm))
        else:
            flush()
            run.append((m, rm))
    flush()
    return out_matches, out_reasoned


def _match_entry(match: MatchRecord, reasoned: ReasonedMatch | None) -> dict:
    entry = {
        "query_id": match.query_id,
        "donor_id": match.donor_id,
        "start": match.start,
        "end": match.end,
        "r": match.r,
    }
    if reasoned is not None:
        entry["kind"] = reasoned.kind.value
        entry["m"] = reasoned.fit.m
        entry["c"] = reasoned.fit.c
        entry["useful"] = reasoned.useful
        if reasoned.useful:
            entry["predicted_test"] = reasoned.predicted_test
    return entry


def report_payload(report: LeakReport, reasoned: list[ReasonedMatch] | None = None,
                   horizon: int | None = None) -> dict:
    """JSON-ready dict for a report, explained or plain."""
    config = {"h": report.config.h, "cutoff": report.config.cutoff}
    if reasoned is not None:
        config["horizon"] = horizon if horizon is not None else report.config.h
        if len(reasoned) != len(report.matches):
            raise ConsistencyError(
                f"{len(reasoned)} reasoned matches for {len(report.matches)} match records"
            )
    return {
        "config": config,
        "skipped_queries": [{"id": sid, "reason": reason}
                            for sid, reason in report.skipped_queries],
        "matches": [
            _match_entry(m, reasoned[i] if reasoned is not None else None)
            for i, m in enumerate(report.matches)
        ],
    }


def _fmt12(v) -> str:
    return format(float(v), ".12g")


def write_report(report: LeakReport, path, format="json",
                 reasoned: list[ReasonedMatch] | None = None,
                 horizon: int | None = None) -> None:
    """Serialize a (possibly explained) report to JSON or flat CSV."""
    if format == "json":
        payload = report_payload(report, reasoned, horizon)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    elif format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            if reasoned is None:
                writer.writerow(["query_id", "donor_id", "start", "end", "r"])
                for m in report.matches:
                    writer.writerow([m.query_id, m.donor_id, m.start, m.end, _fmt12(m.r)])
            else:
                writer.writerow(["query_id", "donor_id", "start", "end", "r",
                                 "kind", "m", "c", "useful"])
                for m, rm in zip(report.matches, reasoned):
                    writer.writerow([m.query_id, m.donor_id, m.start, m.end, _fmt12(m.r),
                                     rm.kind.value, _fmt12(rm.fit.m), _fmt12(rm.fit.c),
                                     "true" if rm.useful else "false"])
    else:
        raise ConsistencyError(f"unknown report format {format!r}")


def read_report(path) -> dict:
    """Parse a JSON report back into its payload dict."""
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def report_from_payload(payload: dict) -> LeakReport:
    """Rebuild a LeakReport from a parsed JSON payload.

    Only the serialized fields are recovered; unserialized config knobs
    (cutoff_tolerance, workers) come back as defaults.
    """
    cfg = ScanConfig(h=int(payload["config"]["h"]), cutoff=float(payload["config"]["cutoff"]))
    matches = [
        MatchRecord(e["query_id"], e["donor_id"], int(e["start"]), int(e["end"]), float(e["r"]))
        for e in payload["matches"]
    ]
    skipped = [(e["id"], e["reason"]) for e in payload["skipped_queries"]]
    return LeakReport(cfg, matches, skipped)


def write_matrix_csv(matrix: MatchMatrix, path) -> None:
    """Matrix as CSV: first column query ids, header row donor ids."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + matrix.col_ids)
        for sid, row in zip(matrix.row_ids, matrix.counts):
            writer.writerow([sid] + [int(v) for v in row])


def _ramp(frac: float) -> str:
    # light steel blue -> dark navy
    lo, hi = (222, 235, 247), (8, 48, 107)
    rgb = tuple(round(l + (h - l) * frac) for l, h in zip(lo, hi))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def render_heatmap(matrix: MatchMatrix, path, label_angle: float = 90.0) -> None:
    """Write the match matrix as a standalone SVG heatmap.

    One rect per cell; zero cells are white with a pale border so they read
    as empty, nonzero cells follow a blue ramp with a legend. Column labels
    are rotated by ``label_angle`` degrees.
    """
    n_rows, n_cols = matrix.counts.shape
    size = max(n_rows, n_cols)
    cell = 28.0 if size <= 30 else max(4.0, 840.0 / size)
    font = max(3.0, min(12.0, cell * 0.55))
    label_space = 10 + font * max((len(s) for s in matrix.row_ids + matrix.col_ids), default=1) * 0.62
    left = label_space
    top = label_space
    legend_h = 46.0
    width = left + n_cols * cell + 20
    height = top + n_rows * cell + legend_h + 20
    max_count = int(matrix.counts.max()) if matrix.counts.size else 0
    with_titles = size <= 50

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect x="0" y="0" width="{width:.0f}" height="{height:.0f}" fill="#ffffff"/>',
    ]
    for i in range(n_rows):
        for j in range(n_cols):
            count = int(matrix.counts[i, j])
            x = left + j * cell
            y = top + i * cell
            if count == 0:
                style = 'fill="#ffffff" stroke="#d9d9d9" stroke-width="0.4"'
            else:
                frac = 1.0 if max_count <= 1 else 0.25 + 0.75 * (count / max_count)
                style = f'fill="{_ramp(frac)}" stroke="#555555" stroke-width="0.4"'
            title = ""
            if with_titles:
                label = escape(f"{matrix.row_ids[i]} -> {matrix.col_ids[j]}: {count}")
                title = f"<title>{label}</title>"
            parts.append(
                f'<rect class="cell" x="{x:.1f}" y="{y:.1f}" '
                f'width="{cell:.1f}" height="{cell:.1f}" {style}>{title}</rect>'
            )
    for i, sid in enumerate(matrix.row_ids):
        y = top + i * cell + cell / 2 + font / 3
        parts.append(
            f'<text x="{left - 4:.1f}" y="{y:.1f}" font-size="{font:.1f}" '
            f'text-anchor="end" font-family="sans-serif">{escape(sid)}</text>'
        )
    for j, sid in enumerate(matrix.col_ids):
        x = left + j * cell + cell / 2
        y = top - 4
        parts.append(
            f'<text x="{x:.1f}" y="{y:.1f}" font-size="{font:.1f}" text-anchor="start" '
            f'font-family="sans-serif" transform="rotate({-label_angle:g} {x:.1f} {y:.1f})"'
            f'>{escape(sid)}</text>'
        )
    ly = top + n_rows * cell + 18
    parts.append(
        f'<rect x="{left:.1f}" y="{ly:.1f}" width="14" height="14" '
        f'fill="#ffffff" stroke="#d9d9d9" stroke-width="0.4"/>'
        f'<text x="{left + 18:.1f}" y="{ly + 11:.1f}" font-size="11" '
        f'font-family="sans-serif">0 matches</text>'
    )
    if max_count > 0:
        steps = sorted({1, max(1, max_count // 2), max_count})
        x = left + 110
        for count in steps:
            frac = 1.0 if max_count <= 1 else 0.25 + 0.75 * (count / max_count)
            parts.append(
                f'<rect x="{x:.1f}" y="{ly:.1f}" width="14" height="14" '
                f'fill="{_ramp(frac)}" stroke="#555555" stroke-width="0.4"/>'
                f'<text x="{x + 18:.1f}" y="{ly + 11:.1f}" font-size="11" '
                f'font-family="sans-serif">{count}</text>'
            )
            x += 56
    parts.append("</svg>\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))
