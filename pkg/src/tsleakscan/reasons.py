"""Explain matches and judge whether they can be exploited.

Each match gets a least-squares affine fit of the donor window against the
query segment; the (slope, intercept, residual) triple classifies the leak
as an exact copy, an added constant, a scaling, a general affine image, a
negative-slope image, or merely high correlation. A match is exploitable
("useful") exactly when the donor continues far enough past the matched
window to cover the query's forecast horizon; in that case the donor
continuation, mapped back through the inverse transform, is the predicted
test segment of the query series.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .collection import SeriesCollection
from .errors import ConfigError, ConsistencyError, ContractViolation
from .scan import LeakReport, MatchRecord


class ReasonKind(str, Enum):
    EXACT_MATCH = "exact-match"
    ADD_CONSTANT = "add-constant"
    MULTIPLY_CONSTANT = "multiply-constant"
    AFFINE_TRANSFORM = "affine-transform"
    NEGATIVE_AFFINE = "negative-affine"
    HIGH_CORRELATION_ONLY = "high-correlation-only"


@dataclass(frozen=True)
class AffineFit:
    """Least-squares fit w ~ m*q + c with its largest absolute residual."""

    m: float
    c: float
    max_residual: float


@dataclass(frozen=True)
class ReasonConfig:
    """Classification tolerances and the forecast horizon.

    slope_tol compares the slope against 1; intercept_tol and affine_tol
    are relative to scale(w) = max(1, max|w|). horizon=None means "use the
    scan's segment length h", which is how every worked example sets it.
    """

    slope_tol: float = 1e-8
    intercept_tol: float = 1e-8
    affine_tol: float = 1e-8
    horizon: int | None = None

    def __post_init__(self):
        for name in ("slope_tol", "intercept_tol", "affine_tol"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be positive")
        if self.horizon is not None and self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")


@dataclass(frozen=True)
class ReasonedMatch:
    base: MatchRecord
    fit: AffineFit
    kind: ReasonKind
    useful: bool
    predicted_test: list | None  # present iff useful
    provenance_note: str


def scale_of(w) -> float:
    return max(1.0, float(np.max(np.abs(w))))


def fit_affine(q, w) -> AffineFit:
    """Fit the matched window against the query: m = cov(q,w)/var(q)."""
    q = np.asarray(q, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if len(q) != len(w):
        raise ContractViolation(f"length mismatch: {len(q)} vs {len(w)}")
    if len(q) < 2 or np.all(q == q[0]):
        raise ContractViolation("query segment has zero variance")
    qc = q - q.mean()
    m = float((qc @ (w - w.mean())) / (qc @ qc))
    c = float(w.mean() - m * q.mean())
    max_residual = float(np.max(np.abs(w - (m * q + c))))
    return AffineFit(m, c, max_residual)


def classify(fit: AffineFit, r: float, cfg: ReasonConfig, *, window_scale: float = 1.0) -> ReasonKind:
    """Total classification of a fit into exactly one ReasonKind.

    ``r`` is the match correlation the fit came from; whenever |r| is 1 the
    residual is negligible and one of the affine kinds applies, so the
    residual branch below is only reachable for cutoffs below 1.
    """
    if fit.max_residual > cfg.affine_tol * window_scale:
        return ReasonKind.HIGH_CORRELATION_ONLY
    slope_is_one = abs(fit.m - 1.0) <= cfg.slope_tol
    intercept_is_zero = abs(fit.c) <= cfg.intercept_tol * window_scale
    if slope_is_one and intercept_is_zero:
        return ReasonKind.EXACT_MATCH
    if slope_is_one:
        return ReasonKind.ADD_CONSTANT
    if fit.m < 0.0:
        return ReasonKind.NEGATIVE_AFFINE
    if intercept_is_zero:
        return ReasonKind.MULTIPLY_CONSTANT
    return ReasonKind.AFFINE_TRANSFORM


def assess_usefulness(match: MatchRecord, collection: SeriesCollection, cfg: ReasonConfig,
                      fit: AffineFit | None = None):
    """Decide exploitability and build the predicted test segment.

    useful <=> end + horizon <= len(donor): pure index arithmetic. When
    useful, the donor continuation donor[end+1 .. end+horizon] is mapped
    through the inverse transform (v - c)/m onto the query series' scale;
    continuation positions that are missing in the donor come out as None.
    """
    horizon = cfg.horizon
    if horizon is None:
        raise ConfigError("horizon not resolved; pass an explicit horizon")
    if match.donor_id not in collection or match.query_id not in collection:
        raise ConsistencyError(
            f"match {match.query_id!r} -> {match.donor_id!r} refers to unknown series"
        )
    donor = collection.get(match.donor_id)
    if not match.end + horizon <= len(donor.values):
        return False, None
    if fit is None:
        h = match.end - match.start + 1
        query = collection.get(match.query_id)
        fit = fit_affine(query.values[-h:], donor.values[match.start - 1:match.end])
    continuation = donor.values[match.end:match.end + horizon]
    predicted = (continuation - fit.c) / fit.m
    missing = set(donor.missing)
    return True, [
        None if (match.end + i) in missing else float(v) for i, v in enumerate(predicted)
    ]


def reason_report(report: LeakReport, collection: SeriesCollection,
                  cfg: ReasonConfig = ReasonConfig()) -> list[ReasonedMatch]:
    """Explain every match in the report, preserving report order."""
    horizon = cfg.horizon if cfg.horizon is not None else report.config.h
    resolved = ReasonConfig(cfg.slope_tol, cfg.intercept_tol, cfg.affine_tol, horizon)
    reasoned = []
    for match in report.matches:
        for sid in (match.query_id, match.donor_id):
            if sid not in collection:
                raise ConsistencyError(f"report references unknown series {sid!r}")
        query = collection.get(match.query_id)
        donor = collection.get(match.donor_id)
        if match.end > len(donor.values):
            raise ConsistencyError(
                f"match into {match.donor_id!r} ends at {match.end}, "
                f"series has {len(donor.values)} observations"
            )
        h = match.end - match.start + 1
        q = query.values[-h:]
        w = donor.values[match.start - 1:match.end]
        fit = fit_affine(q, w)
        kind = classify(fit, match.r, resolved, window_scale=scale_of(w))
        useful, predicted = assess_usefulness(match, collection, resolved, fit)
        if useful:
            note = (f"donor {match.donor_id!r} has observations "
                    f"{match.end + 1}..{match.end + horizon}")
        else:
            note = (f"donor {match.donor_id!r} observations "
                    f"{match.end + 1}..{match.end + horizon} are not available")
        reasoned.append(ReasonedMatch(match, fit, kind, useful, predicted, note))
    return reasoned


def tally(reasoned) -> tuple[dict[ReasonKind, int], int]:
    """Counts by kind plus the number of useful matches, for summaries."""
    kinds: dict[ReasonKind, int] = {}
    useful = 0
    for rm in reasoned:
        kinds[rm.kind] = kinds.get(rm.kind, 0) + 1
        useful += rm.useful
    return kinds, useful
