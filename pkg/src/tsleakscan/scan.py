"""Full-collection leak scan.

For every series the terminal length-h segment of its training part is
taken as the query and swept across every series in the collection
(including its own, which picks up repeating-pattern leaks). Offsets whose
absolute correlation clears the cutoff become match records; the single
trivial hit of a query against its own terminal position is removed.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .collection import SeriesCollection
from .corr import MIN_WINDOW, sliding_correlations
from .errors import ConfigError, ContractViolation

TOO_SHORT = "too-short"
ZERO_VARIANCE_QUERY = "zero-variance-query"
MISSING_IN_QUERY = "missing-in-query"

AUTO = "auto"


@dataclass(frozen=True)
class ScanConfig:
    """Scan parameters: segment length, correlation cutoff, worker count.

    The cutoff comparison is |r| >= cutoff - cutoff_tolerance; the
    tolerance keeps exact copies detectable at cutoff=1 despite
    floating-point roundoff.
    """

    h: int
    cutoff: float = 1.0
    cutoff_tolerance: float = 1e-10
    workers: int | str = 1

    def __post_init__(self):
        if not isinstance(self.h, (int, np.integer)) or self.h < MIN_WINDOW:
            raise ConfigError(f"h must be an integer >= {MIN_WINDOW}, got {self.h!r}")
        if not 0.0 < self.cutoff <= 1.0:
            raise ConfigError("cutoff must be in (0,1]")
        if self.cutoff_tolerance < 0.0:
            raise ConfigError("cutoff_tolerance must be non-negative")
        if self.cutoff - self.cutoff_tolerance <= 0.0:
            raise ConfigError("cutoff_tolerance must leave the effective cutoff positive")
        if self.workers != AUTO and (not isinstance(self.workers, int) or self.workers < 1):
            raise ConfigError(f"workers must be a positive integer or {AUTO!r}, got {self.workers!r}")

    @property
    def threshold(self) -> float:
        return self.cutoff - self.cutoff_tolerance

    def resolved_workers(self) -> int:
        if self.workers == AUTO:
            return os.cpu_count() or 1
        return self.workers


@dataclass(frozen=True)
class QuerySegment:
    """The last h observations of a series, with their 1-based positions."""

    series_id: str
    values: np.ndarray
    start: int
    end: int


@dataclass(frozen=True)
class MatchRecord:
    """One detected leak: where a query segment reappears inside a donor."""

    query_id: str
    donor_id: str
    start: int  # 1-based, inclusive
    end: int    # start + h - 1
    r: float


@dataclass
class LeakReport:
    """Scan output: matches grouped by query in collection order, plus the
    queries that could not be scanned at all."""

    config: ScanConfig
    matches: list[MatchRecord]
    skipped_queries: list[tuple[str, str]] = field(default_factory=list)


def extract_query(values, h, *, series_id="") -> QuerySegment | None:
    """Terminal length-h segment of a series, or None when it is too short."""
    values = np.asarray(values, dtype=np.float64)
    n = len(values)
    if n < h:
        return None
    return QuerySegment(series_id, values[n - h:], n - h + 1, n)


def _query_skip_reason(series, h):
    n = len(series.values)
    if n < h:
        return TOO_SHORT
    if any(p >= n - h for p in series.missing):
        return MISSING_IN_QUERY
    tail = series.values[n - h:]
    if np.all(tail == tail[0]):
        return ZERO_VARIANCE_QUERY
    return None


def _scan_query(collection, cfg, qi):
    """All matches for query series ``qi``, or the skip reason."""
    series = collection.entries[qi]
    reason = _query_skip_reason(series, cfg.h)
    if reason is not None:
        return [], (series.id, reason)
    query = extract_query(series.values, cfg.h, series_id=series.id)
    matches = []
    for donor in collection.entries:
        if len(donor.values) < cfg.h:
            continue  # no length-h windows to match
        profile = sliding_correlations(
            query.values, donor.values, cfg.h, target_id=donor.id, missing=donor.missing
        )
        hits = np.abs(profile.r_values) >= cfg.threshold
        for start, r in zip(profile.offsets[hits], profile.r_values[hits]):
            end = int(start) + cfg.h - 1
            if donor.id == series.id and end == len(series.values):
                continue  # the query trivially matches its own position
            matches.append(MatchRecord(series.id, donor.id, int(start), end, float(r)))
    return matches, None


_POOL_STATE: dict = {}


def _pool_init(collection, cfg):
    _POOL_STATE["collection"] = collection
    _POOL_STATE["cfg"] = cfg


def _pool_scan_query(qi):
    return _scan_query(_POOL_STATE["collection"], _POOL_STATE["cfg"], qi)


def scan(collection: SeriesCollection, cfg: ScanConfig) -> LeakReport:
    """Run the leak scan over the whole collection.

    The scan is data-parallel over query series when cfg.workers > 1; the
    observable output is identical for every worker count because results
    are merged back in collection order.
    """
    if len(collection) == 0:
        raise ContractViolation("empty collection")
    workers = cfg.resolved_workers()
    indices = range(len(collection))
    if workers == 1 or len(collection) == 1:
        per_query = [_scan_query(collection, cfg, qi) for qi in indices]
    else:
        chunk = max(1, len(collection) // (workers * 4))
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_pool_init, initargs=(collection, cfg)
        ) as pool:
            per_query = list(pool.map(_pool_scan_query, indices, chunksize=chunk))
    matches = []
    skipped = []
    for match_list, skip in per_query:
        matches.extend(match_list)
        if skip is not None:
            skipped.append(skip)
    return LeakReport(cfg, matches, skipped)
