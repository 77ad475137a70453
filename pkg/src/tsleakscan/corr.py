"""Pearson correlation kernel and the sliding-correlation sweep.

``sliding_correlations`` slides a fixed query segment across a target
series and computes the Pearson correlation at every offset. Window means
and variances come from rolling prefix sums (O(1) per window); the cross
term is computed per window on mean-centered values, so the whole sweep is
O(n*h) per query/target pair. ``naive_sliding_oracle`` recomputes every
window from scratch and exists solely as an independent reference for
equivalence testing and benchmarks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation

MIN_WINDOW = 3  # below this every non-constant window correlates at +-1

ZERO_VARIANCE_WINDOW = "zero-variance-window"
MISSING_OVERLAP = "missing-overlap"


@dataclass
class SlidingProfile:
    """Correlations of one query against every length-h window of a target.

    ``offsets`` are 1-based window start indices, aligned with ``r_values``;
    ``skipped`` holds (offset, reason) pairs for windows where Pearson is
    undefined (constant window) or that overlap a missing observation.
    Offsets and skips together cover every start 1..len(target)-h+1.
    """

    target_id: str | None
    offsets: np.ndarray
    r_values: np.ndarray
    skipped: list[tuple[int, str]] = field(default_factory=list)


def _as_vector(x, name):
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ContractViolation(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} contains non-finite values")
    return arr


def _is_constant(arr):
    # exact test: variance is mathematically zero iff all values are equal
    return bool(np.all(arr == arr[0]))


def pearson(a, b) -> float | None:
    """Pearson correlation of two equal-length vectors, clamped to [-1, 1].

    Returns None when either vector has zero variance (the coefficient is
    undefined there). Raises ContractViolation on length mismatch or
    vectors shorter than 2.
    """
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    if len(a) != len(b):
        raise ContractViolation(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise ContractViolation("correlation needs at least 2 observations")
    if _is_constant(a) or _is_constant(b):
        return None
    ca = a - a.mean()
    cb = b - b.mean()
    denom = np.sqrt((ca @ ca) * (cb @ cb))
    if denom == 0.0:
        return None
    return float(np.clip((ca @ cb) / denom, -1.0, 1.0))


def _check_sweep_args(query, target, h, missing):
    query = _as_vector(query, "query")
    target = _as_vector(target, "target")
    if h < MIN_WINDOW:
        raise ContractViolation(f"window length must be >= {MIN_WINDOW}, got {h}")
    if len(query) != h:
        raise ContractViolation(f"query has {len(query)} observations, expected h={h}")
    if len(target) < h:
        raise ContractViolation(f"target shorter than window: {len(target)} < {h}")
    if _is_constant(query):
        raise ContractViolation("query has zero variance")
    missing = sorted(set(int(i) for i in missing))
    if missing and (missing[0] < 0 or missing[-1] >= len(target)):
        raise ContractViolation("missing positions out of range")
    return query, target, h, missing


def sliding_correlations(query, target, h, *, target_id=None, missing=()) -> SlidingProfile:
    """Correlate ``query`` with every length-``h`` window of ``target``.

    Parameters
    ----------
    query : array_like
        Segment of length ``h`` with nonzero variance.
    target : array_like
        Series to sweep; must be at least ``h`` long.
    target_id : str, optional
        Label carried into the resulting profile.
    missing : iterable of int, optional
        0-based positions of missing observations in ``target``; any
        window overlapping one is skipped.

    Returns
    -------
    SlidingProfile
    """
    query, target, h, missing = _check_sweep_args(query, target, h, missing)
    n = len(target)
    m = n - h + 1

    # Shifting the whole target by its global mean keeps the prefix-sum
    # window variances well conditioned when |mean| >> std.
    shifted = target - target.mean()
    s1 = np.concatenate(([0.0], np.cumsum(shifted)))
    s2 = np.concatenate(([0.0], np.cumsum(shifted * shifted)))
    win_sum = s1[h:] - s1[:-h]
    win_css = (s2[h:] - s2[:-h]) - win_sum * win_sum / h

    # a window is constant iff all of its h-1 adjacent pairs are equal
    eq = np.concatenate(([0], np.cumsum(target[1:] == target[:-1])))
    constant = (eq[h - 1:] - eq[: n - h + 1]) == h - 1

    if missing:
        ind = np.zeros(n)
        ind[missing] = 1.0
        cind = np.concatenate(([0.0], np.cumsum(ind)))
        overlaps = (cind[h:] - cind[:-h]) > 0
    else:
        overlaps = np.zeros(m, dtype=bool)

    degenerate = constant | (win_css <= 0.0)
    valid = ~degenerate & ~overlaps

    qc = query - query.mean()
    q_css = qc @ qc
    windows = np.lib.stride_tricks.sliding_window_view(shifted, h)
    cross = (windows - (win_sum / h)[:, None]) @ qc

    denom = np.sqrt(np.where(valid, q_css * win_css, 1.0))
    r = np.zeros(m)
    np.divide(cross, denom, out=r, where=valid)
    r = np.clip(r, -1.0, 1.0)

    starts = np.arange(1, m + 1)
    skipped = [
        (int(s), MISSING_OVERLAP if overlaps[s - 1] else ZERO_VARIANCE_WINDOW)
        for s in starts[~valid]
    ]
    return SlidingProfile(target_id, starts[valid], r[valid], skipped)


def naive_sliding_oracle(query, target, h, *, target_id=None, missing=()) -> SlidingProfile:
    """Reference sweep: independent per-window recomputation, no shared state.

    Same contract as ``sliding_correlations``; kept deliberately dumb so the
    optimized path can be checked against it (the two must agree within
    1e-9 on every emitted r and produce identical offset/skip sets).
    """
    query, target, h, missing = _check_sweep_args(query, target, h, missing)
    missing_set = set(missing)
    offsets, r_values, skipped = [], [], []
    for s in range(len(target) - h + 1):
        if any(p in missing_set for p in range(s, s + h)):
            skipped.append((s + 1, MISSING_OVERLAP))
            continue
        window = target[s:s + h]
        if _is_constant(window):
            skipped.append((s + 1, ZERO_VARIANCE_WINDOW))
            continue
        cw = window - window.mean()
        qc = query - query.mean()
        denom = np.sqrt((qc @ qc) * (cw @ cw))
        if denom == 0.0:
            skipped.append((s + 1, ZERO_VARIANCE_WINDOW))
            continue
        offsets.append(s + 1)
        r_values.append(float(np.clip((qc @ cw) / denom, -1.0, 1.0)))
    return SlidingProfile(target_id, np.asarray(offsets, dtype=int), np.asarray(r_values), skipped)
