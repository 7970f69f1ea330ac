"""Attribute-space reduction for the weak-rule search.

Three filters shrink the candidate pool up front (global frequency,
per-sense frequency, and an information-based ranking by normalized
partition distance), while :func:`sample_candidates` instead draws a fresh
random subset of the pool every round, trading per-round search effort for
the chance of missing the best predicate in any single round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AttributeSubset:
    """A kept set of attribute ids plus the method and parameter behind it."""

    kept: np.ndarray
    method: str
    parameter: int

    def __len__(self) -> int:
        return len(self.kept)


def keep_by_frequency(global_count: np.ndarray, min_count: int) -> np.ndarray:
    """Ids of attributes occurring at least ``min_count`` times."""
    if min_count < 1:
        raise ValueError("min_count must be at least 1")
    return np.flatnonzero(global_count >= min_count)


def keep_by_sense_frequency(sense_count: np.ndarray, per_sense: int) -> np.ndarray:
    """Union over senses of each sense's ``per_sense`` most frequent attributes.

    Only attributes actually occurring with a sense compete for its slots;
    ties at the cutoff go to the lower attribute id.
    """
    if per_sense < 1:
        raise ValueError("per_sense must be at least 1")
    n_attrs, k = sense_count.shape
    keep = np.zeros(n_attrs, dtype=bool)
    for s in range(k):
        counts = sense_count[:, s]
        present = np.flatnonzero(counts > 0)
        if len(present) > per_sense:
            # stable sort on descending count keeps lower ids first on ties
            order = present[np.argsort(-counts[present], kind="stable")]
            present = order[:per_sense]
        keep[present] = True
    return np.flatnonzero(keep)


def _plogp(p: np.ndarray) -> np.ndarray:
    out = np.zeros(p.shape)
    mask = p > 0
    out[mask] = p[mask] * np.log2(p[mask])
    return out


def partition_distance(contingency) -> float:
    """Normalized distance between the two partitions of a contingency table.

    Computed as (H(rows|cols) + H(cols|rows)) / H(rows, cols) with base-2
    logarithms, taken to be 0 when the joint entropy is 0. Symmetric in the
    two partitions, always in [0, 1], and 0 exactly when each row block
    equals a union-free rearrangement of the column blocks.
    """
    counts = np.asarray(contingency, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise ValueError("contingency table must have positive total count")
    p = counts / total
    # summing joint terms in sorted order makes the value exactly invariant
    # under transposing the table
    h_joint = -np.sort(_plogp(p).ravel()).sum()
    if h_joint == 0.0:
        return 0.0
    h_rows = -np.sort(_plogp(p.sum(axis=1))).sum()
    h_cols = -np.sort(_plogp(p.sum(axis=0))).sum()
    numerator = 2.0 * h_joint - (h_rows + h_cols)
    return float(np.clip(numerator / h_joint, 0.0, 1.0))


def partition_distances(global_count, sense_count, class_count, m) -> np.ndarray:
    """Partition distance of every attribute's holds/fails split, vectorized.

    Low values mean the predicate's two example blocks line up well with the
    sense partition.
    """
    if m < 1:
        raise ValueError("need at least one example")
    held = sense_count / m  # (A, k) joint probabilities, predicate holds
    missed = (class_count[np.newaxis, :] - sense_count) / m
    h_joint = -(_plogp(held).sum(axis=1) + _plogp(missed).sum(axis=1))
    g = global_count / m
    h_attr = -(_plogp(g) + _plogp(1.0 - g))
    h_class = -_plogp(class_count / m).sum()
    num = 2.0 * h_joint - h_attr - h_class
    out = np.zeros(len(global_count))
    np.divide(num, h_joint, out=out, where=h_joint > 0)
    return np.clip(out, 0.0, 1.0)


def keep_by_partition_distance(distances: np.ndarray, budget: int) -> np.ndarray:
    """Ids of the ``budget`` attributes with the smallest distance.

    Ties go to the lower id; the result is returned in id order.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    order = np.argsort(distances, kind="stable")[:budget]
    return np.sort(order)


def freq_filter(dataset, min_count: int) -> AttributeSubset:
    """Keep attributes occurring at least ``min_count`` times in the dataset."""
    kept = keep_by_frequency(dataset.index.global_count, min_count)
    return AttributeSubset(kept, "freq", min_count)


def lfreq_filter(dataset, per_sense: int) -> AttributeSubset:
    """Keep each sense's ``per_sense`` most frequent attributes."""
    kept = keep_by_sense_frequency(dataset.index.sense_count, per_sense)
    return AttributeSubset(kept, "lfreq", per_sense)


def rlm_distance(dataset, attr: int) -> float:
    """Partition distance between one predicate's split and the senses."""
    held = dataset.index.sense_count[attr]
    missed = dataset.sense_counts - held
    return partition_distance(np.stack([held, missed]))


def rlm_distances(dataset) -> np.ndarray:
    return partition_distances(
        dataset.index.global_count,
        dataset.index.sense_count,
        dataset.sense_counts,
        dataset.m,
    )


def rlm_rank(dataset, budget: int) -> AttributeSubset:
    """Keep the ``budget`` attributes whose split best matches the senses."""
    kept = keep_by_partition_distance(rlm_distances(dataset), budget)
    return AttributeSubset(kept, "rlm", budget)


# Guard against binary float representation pushing exact products like
# 0.1 * 5000 just above the integer they should land on.
_CEIL_GUARD = 1e-9


def _ceil(x: float) -> int:
    return math.ceil(x - _CEIL_GUARD)


def sample_candidates(pool: np.ndarray, p: float, seed: int, round_index: int) -> np.ndarray:
    """Per-round uniform sample of ceil(p * |pool|) attribute ids, at least 1.

    Sampling is without replacement, deterministic in (seed, round_index),
    and independent across rounds. ``p`` of 1 returns the pool unchanged.
    The result is sorted so downstream tie-breaks see ids in order.
    """
    pool = np.asarray(pool)
    if pool.size == 0:
        raise ValueError("cannot sample from an empty pool")
    if not 0.0 < p <= 1.0:
        raise ValueError("sampling proportion must be in (0, 1]")
    if p >= 1.0:
        return pool
    if seed < 0 or round_index < 0:
        raise ValueError("seed and round_index must be non-negative")
    size = max(1, _ceil(p * len(pool)))
    rng = np.random.default_rng([seed, round_index])
    picked = rng.choice(len(pool), size=size, replace=False)
    return np.sort(pool[picked])


def rejection_subset(dataset, method: str, level: float) -> AttributeSubset:
    """Subset of attributes whose rejected fraction best approaches ``level``.

    Filter parameters are integers, so not every rejection level is
    achievable; the choice is the closest one not exceeding the target.
    Level 0 keeps everything.
    """
    if not 0.0 <= level < 1.0:
        raise ValueError("rejection level must be in [0, 1)")
    n_attrs = dataset.n_attributes

    if method == "freq":
        counts = np.sort(dataset.index.global_count)

        def rejection(min_count):
            kept = n_attrs - np.searchsorted(counts, min_count, side="left")
            return 1.0 - kept / n_attrs

        lo, hi = 1, int(counts[-1]) + 1
        while lo < hi:  # largest threshold still within the target
            mid = (lo + hi + 1) // 2
            if rejection(mid) <= level:
                lo = mid
            else:
                hi = mid - 1
        return freq_filter(dataset, lo)

    if method == "lfreq":
        sense_count = dataset.index.sense_count

        def rejection(per_sense):
            kept = len(keep_by_sense_frequency(sense_count, per_sense))
            return 1.0 - kept / n_attrs

        lo, hi = 1, n_attrs
        while lo < hi:  # smallest budget already within the target
            mid = (lo + hi) // 2
            if rejection(mid) <= level:
                hi = mid
            else:
                lo = mid + 1
        return lfreq_filter(dataset, lo)

    if method == "rlm":
        budget = max(1, _ceil(n_attrs * (1.0 - level)))
        return rlm_rank(dataset, budget)

    raise ValueError(f"unknown selection method {method!r}")
