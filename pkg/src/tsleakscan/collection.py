"""Loading, validation and serialization of time-series collections.

Three on-disk formats are supported:

* ``long-csv`` (canonical): header ``series_id,index,value``, one row per
  observation, ``index`` 1-based and contiguous per series.
* ``wide-csv``: header row of series ids, one column per series, shorter
  series padded with empty cells at the bottom.
* ``json``: object mapping id -> array of numbers, ``null`` marking a
  missing value.

Collection order always follows input order (it later fixes the row and
column order of the match matrix). Non-finite literals (nan, inf) are
treated as missing values everywhere.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, ValidationError

FORMATS = ("wide-csv", "long-csv", "json")

REJECT = "reject"
SPLIT_SKIP = "split-skip"


@dataclass(frozen=True)
class MissingPolicy:
    """How to treat missing observations during ingestion.

    ``reject`` aborts on the first missing value; ``split-skip`` admits the
    series and records the missing positions so that the scanner can skip
    every window overlapping them.
    """

    mode: str = REJECT

    def __post_init__(self):
        if self.mode not in (REJECT, SPLIT_SKIP):
            raise ValidationError(f"unknown missing policy {self.mode!r}")


@dataclass(frozen=True)
class Series:
    """One named univariate series.

    ``values`` is a finite float vector; positions listed in ``missing``
    hold a neutral filler (0.0) and are only ever used to decide which
    windows to skip, never as data.
    """

    id: str
    values: np.ndarray
    missing: tuple[int, ...] = ()  # 0-based positions

    def __len__(self):
        return len(self.values)


@dataclass
class SeriesCollection:
    """Ordered, immutable set of named series loaded from one source."""

    entries: list[Series]
    source_path: str = "<memory>"
    created_from: str = "memory"
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self._index = {}
        for pos, s in enumerate(self.entries):
            if s.id in self._index:
                raise ValidationError(f"duplicate series id {s.id!r}")
            if len(s.values) < 1:
                raise ValidationError(f"series {s.id!r} has no observations")
            arr = np.asarray(s.values, dtype=np.float64)
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"series {s.id!r} contains non-finite values")
            arr.flags.writeable = False
            object.__setattr__(s, "values", arr)
            self._index[s.id] = pos

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, series_id):
        return series_id in self._index

    def ids(self) -> list[str]:
        return [s.id for s in self.entries]

    def get(self, series_id: str) -> Series:
        try:
            return self.entries[self._index[series_id]]
        except KeyError:
            raise KeyError(f"no series named {series_id!r}") from None


def from_dict(data, source_path="<memory>", created_from="memory") -> SeriesCollection:
    """Build a collection from a mapping id -> sequence of finite reals."""
    entries = [Series(str(k), np.asarray(v, dtype=np.float64)) for k, v in data.items()]
    return SeriesCollection(entries, source_path=source_path, created_from=created_from)


def _parse_cell(text, where):
    """Parse one CSV cell into (value, is_missing)."""
    text = text.strip()
    if text == "":
        return 0.0, True
    try:
        v = float(text)
    except ValueError:
        raise FormatError(f"{where}: cannot parse {text!r} as a number") from None
    if not math.isfinite(v):
        return 0.0, True  # nan/inf literals count as missing
    return v, False


def _finish_series(sid, values, missing, policy, where):
    if policy.mode == REJECT and missing:
        pos = missing[0] + 1
        raise ValidationError(
            f"{where}: series {sid!r} has a missing value at position {pos} "
            f"(policy is {REJECT!r})"
        )
    return Series(sid, np.asarray(values, dtype=np.float64), tuple(missing))


def _load_wide_csv(path, policy):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if any(h == "" for h in header):
        raise FormatError(f"{path}:1: empty column name in header")
    columns = [[] for _ in header]
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) > len(header):
            raise FormatError(f"{path}:{lineno}: row has {len(row)} cells, header has {len(header)}")
        for j in range(len(header)):
            columns[j].append(row[j] if j < len(row) else "")
    entries = []
    for sid, cells in zip(header, columns):
        # trailing empty cells are padding, not missing values
        last = None
        for i, cell in enumerate(cells):
            if cell.strip() != "":
                last = i
        if last is None:
            raise ValidationError(f"{path}: series {sid!r} has no observations")
        values, missing = [], []
        for i in range(last + 1):
            v, is_missing = _parse_cell(cells[i], f"{path}:{i + 2}")
            values.append(v)
            if is_missing:
                missing.append(i)
        entries.append(_finish_series(sid, values, missing, policy, path))
    return entries


def _load_long_csv(path, policy):
    expected_header = ["series_id", "index", "value"]
    order: list[str] = []
    values: dict[str, list] = {}
    missing: dict[str, list] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        if [h.strip() for h in header] != expected_header:
            raise FormatError(
                f"{path}:1: expected header {','.join(expected_header)!r}, got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            if len(row) != 3:
                raise FormatError(f"{path}:{lineno}: expected 3 cells, got {len(row)}")
            sid = row[0].strip()
            if sid == "":
                raise FormatError(f"{path}:{lineno}: empty series_id")
            try:
                idx = int(row[1])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: index {row[1]!r} is not an integer") from None
            if sid not in values:
                order.append(sid)
                values[sid] = []
                missing[sid] = []
            if idx != len(values[sid]) + 1:
                raise FormatError(
                    f"{path}:{lineno}: series {sid!r} index {idx} is not contiguous "
                    f"(expected {len(values[sid]) + 1})"
                )
            v, is_missing = _parse_cell(row[2], f"{path}:{lineno}")
            if is_missing:
                missing[sid].append(idx - 1)
            values[sid].append(v)
    return [_finish_series(sid, values[sid], missing[sid], policy, path) for sid in order]


def _load_json(path, policy):
    def reject_duplicates(pairs):
        seen = set()
        for k, _ in pairs:
            if k in seen:
                raise ValidationError(f"{path}: duplicate series id {k!r}")
            seen.add(k)
        return dict(pairs)

    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh, object_pairs_hook=reject_duplicates)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise FormatError(f"{path}: top-level JSON value must be an object")
    entries = []
    for sid, raw in data.items():
        if not isinstance(raw, list):
            raise FormatError(f"{path}: series {sid!r} is not an array")
        values, missing = [], []
        for i, item in enumerate(raw):
            if item is None:
                values.append(0.0)
                missing.append(i)
            elif isinstance(item, (int, float)) and not isinstance(item, bool):
                if math.isfinite(item):
                    values.append(float(item))
                else:
                    values.append(0.0)
                    missing.append(i)
            else:
                raise FormatError(f"{path}: series {sid!r} element {i + 1} is not a number")
        if not values:
            raise ValidationError(f"{path}: series {sid!r} has no observations")
        entries.append(_finish_series(sid, values, missing, policy, path))
    return entries


_LOADERS = {"wide-csv": _load_wide_csv, "long-csv": _load_long_csv, "json": _load_json}


def load_collection(path, format="long-csv", policy=MissingPolicy()) -> SeriesCollection:
    """Load a series collection from ``path`` in the declared ``format``.

    Raises FormatError on unparsable input (naming the first offending
    row/record) and ValidationError on duplicate ids, empty series or -
    under the reject policy - missing values.
    """
    if format not in _LOADERS:
        raise ValidationError(f"unknown format {format!r}; expected one of {', '.join(FORMATS)}")
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"input file not found: {path}")
    entries = _LOADERS[format](path, policy)
    return SeriesCollection(entries, source_path=str(path), created_from=format)


def validate_collection(c: SeriesCollection) -> list[str]:
    """Return advisory warnings (short series, constant series, confusable ids)."""
    warnings = []
    for s in c:
        if len(s) < 3:
            warnings.append(f"series {s.id!r}: only {len(s)} observation(s), too short for matching")
        observed = np.delete(s.values, list(s.missing)) if s.missing else s.values
        if len(observed) > 1 and np.all(observed == observed[0]):
            warnings.append(f"series {s.id!r}: constant values (zero variance)")
    normalized: dict[str, str] = {}
    for s in c:
        key = s.id.strip().casefold()
        if key in normalized and normalized[key] != s.id:
            warnings.append(
                f"series ids {normalized[key]!r} and {s.id!r} differ only by whitespace/case"
            )
        else:
            normalized[key] = s.id
    return warnings


def _format_value(v):
    # repr round-trips every finite double exactly
    return repr(float(v))


def write_collection(c: SeriesCollection, path, format="long-csv") -> None:
    """Serialize a collection; the long-csv/json writers round-trip exactly."""
    path = Path(path)
    if format == "long-csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["series_id", "index", "value"])
            for s in c:
                missing = set(s.missing)
                for i, v in enumerate(s.values):
                    writer.writerow([s.id, i + 1, "" if i in missing else _format_value(v)])
    elif format == "wide-csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(c.ids())
            depth = max(len(s) for s in c)
            for i in range(depth):
                row = []
                for s in c:
                    if i < len(s) and i not in s.missing:
                        row.append(_format_value(s.values[i]))
                    else:
                        row.append("")
                writer.writerow(row)
    elif format == "json":
        payload = {
            s.id: [None if i in set(s.missing) else float(v) for i, v in enumerate(s.values)]
            for s in c
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    else:
        raise ValidationError(f"unknown format {format!r}; expected one of {', '.join(FORMATS)}")
