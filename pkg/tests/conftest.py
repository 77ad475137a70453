import statistics

import numpy as np
import pytest

import tsleakscan as ts


def brute_pearson(a, b):
    """Textbook Pearson via the stdlib, independent of the package kernel."""
    try:
        return statistics.correlation(list(map(float, a)), list(map(float, b)))
    except statistics.StatisticsError:
        return None  # zero variance


def brute_sliding(query, target, h):
    """Per-window reference profile: dict offset -> r (None where undefined)."""
    out = {}
    for s in range(len(target) - h + 1):
        out[s + 1] = brute_pearson(query, target[s:s + h])
    return out


def brute_scan(series_list, h, threshold):
    """Double-loop reference scan over (id, values) pairs.

    Returns the set of (query_id, donor_id, start, end) with |r| at or
    above the threshold, terminal self-hits removed, plus the r per key.
    """
    keys = set()
    r_by_key = {}
    for qid, qv in series_list:
        if len(qv) < h:
            continue
        q = qv[-h:]
        if all(v == q[0] for v in q):
            continue
        for did, dv in series_list:
            for start, r in brute_sliding(q, dv, h).items():
                if r is None:
                    continue
                end = start + h - 1
                if did == qid and end == len(dv):
                    continue
                if abs(r) >= threshold:
                    keys.add((qid, did, start, end))
                    r_by_key[(qid, did, start, end)] = r
    return keys, r_by_key


def usage_style_collection(seed=2024):
    """Three series with the structure of the worked three-series example:
    x arbitrary, y ends with x[1..5], z ends with x[10..15] (1-based)."""
    rng = np.random.default_rng(seed)
    x = rng.normal(size=15)
    y = np.concatenate([rng.normal(size=10), x[0:5]])
    z = np.concatenate([rng.normal(size=10), x[9:15]])
    return ts.from_dict({"x": x, "y": y, "z": z}), x


def random_collection(rng, n_series=None, length_range=(20, 120)):
    n = n_series if n_series is not None else int(rng.integers(3, 11))
    data = {}
    for i in range(n):
        length = int(rng.integers(length_range[0], length_range[1] + 1))
        data[f"s{i:03d}"] = rng.normal(size=length)
    return ts.from_dict(data)


@pytest.fixture
def usage_collection():
    return usage_style_collection()
