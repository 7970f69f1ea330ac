"""Confidence-rated boosting with single-predicate weak rules.

The learner keeps a weight matrix over (example, label) pairs. Each round it
scans a candidate set of binary context predicates, scores every candidate by
the normalizer its optimal confidence-rated stump would achieve, keeps the
predicate with the smallest score, then pushes the weight matrix through the
stump's exponential loss and renormalizes so later rounds concentrate on the
pairs the ensemble still gets wrong. The ensemble score of a label is the
plain sum of the per-rule confidence vectors, one vector added when the
rule's predicate holds in the example and the other otherwise.

The candidate scan is postings-driven: each candidate costs work proportional
to the number of examples in which its predicate holds (times the number of
senses), so shrinking the candidate set genuinely shrinks the round cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .selection import (
    keep_by_frequency,
    keep_by_partition_distance,
    keep_by_sense_frequency,
    partition_distances,
    sample_candidates,
)
from .validation import check_examples, check_labels


@dataclass(frozen=True)
class WeakRule:
    """One predicate stump.

    ``c_hold[l]`` is added to label l's score when the predicate holds in the
    example, ``c_fail[l]`` otherwise. Positive entries vote for the label,
    negative ones against it, and the magnitude carries the confidence.
    """

    attr: int
    c_fail: np.ndarray
    c_hold: np.ndarray


def init_distribution(m: int, k: int) -> np.ndarray:
    """Uniform starting weights: every (example, label) cell gets 1/(m*k)."""
    if m < 1:
        raise ValueError("need at least one example")
    if k < 2:
        raise ValueError("need at least two labels")
    return np.full((m, k), 1.0 / (m * k))


class _FitContext:
    """Per-fit constants: the example/attribute indicator in postings form."""

    def __init__(self, X, y, k, n_attributes):
        m, width = X.shape
        indptr = np.arange(0, m * width + 1, width)
        ones = np.ones(m * width)
        holds = sp.csr_matrix(
            (ones, np.sort(X, axis=1).ravel(), indptr), shape=(m, n_attributes)
        )
        self.holds_t = holds.T.tocsr()  # rows are per-attribute postings lists
        self.y = y
        self.m = m
        self.k = k
        self.n_attributes = n_attributes

    def postings(self, attr: int) -> np.ndarray:
        t = self.holds_t
        return t.indices[t.indptr[attr] : t.indptr[attr + 1]]

    def holds_mask(self, attr: int) -> np.ndarray:
        mask = np.zeros(self.m, dtype=bool)
        mask[self.postings(attr)] = True
        return mask


def _context(dataset) -> _FitContext:
    ctx = getattr(dataset, "_scan_context", None)
    if ctx is None:
        ctx = _FitContext(dataset.X, dataset.y, dataset.k, dataset.n_attributes)
        dataset._scan_context = ctx
    return ctx


def _scan_tables(ctx: _FitContext, dist: np.ndarray, candidates: np.ndarray):
    """Mass partition per candidate predicate.

    Returns four (n_candidates, k) arrays: mass on own-label cells where the
    predicate holds (w1p), mass on other-label cells where it holds (w1m),
    and the same two restricted to examples where it fails (w0p, w0m). The
    four add up to the full distribution mass for every candidate.
    """
    m, k = dist.shape
    idx = np.arange(m)
    on_label = dist[idx, ctx.y]
    pos_mass = np.bincount(ctx.y, weights=on_label, minlength=k)
    neg_mass = dist.sum(axis=0) - pos_mass
    dpos = np.zeros_like(dist)
    dpos[idx, ctx.y] = on_label

    rows = ctx.holds_t[candidates]
    total_hold = rows @ dist
    w1p = rows @ dpos
    w1m = np.maximum(total_hold - w1p, 0.0)
    w0p = np.maximum(pos_mass[np.newaxis, :] - w1p, 0.0)
    w0m = np.maximum(neg_mass[np.newaxis, :] - w1m, 0.0)
    return w1p, w1m, w0p, w0m


def _z_values(w1p, w1m, w0p, w0m) -> np.ndarray:
    return 2.0 * (np.sqrt(w1p * w1m) + np.sqrt(w0p * w0m)).sum(axis=1)


def _confidences(wp, wm, smoothing) -> np.ndarray:
    return 0.5 * np.log((wp + smoothing) / (wm + smoothing))


def weight_table(dataset, dist: np.ndarray, attr: int) -> np.ndarray:
    """The (2, k, 2) mass partition induced by one predicate.

    Axis 0 indexes predicate fails/holds, axis 1 the label, axis 2 whether
    the mass sits on the example's own label (index 0) or on another label
    (index 1). Entries are non-negative and sum to the distribution mass.
    """
    ctx = _context(dataset)
    w1p, w1m, w0p, w0m = _scan_tables(ctx, dist, np.asarray([attr]))
    table = np.empty((2, ctx.k, 2))
    table[0, :, 0] = w0p[0]
    table[0, :, 1] = w0m[0]
    table[1, :, 0] = w1p[0]
    table[1, :, 1] = w1m[0]
    return table


def rule_z(table: np.ndarray) -> float:
    """Normalizer achieved by the optimal unsmoothed confidences, in [0, 1]."""
    z = _z_values(
        table[1, :, 0][np.newaxis],
        table[1, :, 1][np.newaxis],
        table[0, :, 0][np.newaxis],
        table[0, :, 1][np.newaxis],
    )
    return float(z[0])


def rule_confidences(table: np.ndarray, smoothing: float) -> tuple[np.ndarray, np.ndarray]:
    """Smoothed per-label confidences (fail vector, hold vector).

    Each entry is half the log ratio of own-label to other-label mass, with
    ``smoothing`` added to both sides so empty cells stay finite.
    """
    if smoothing <= 0:
        raise ValueError("smoothing must be positive")
    c_fail = _confidences(table[0, :, 0], table[0, :, 1], smoothing)
    c_hold = _confidences(table[1, :, 0], table[1, :, 1], smoothing)
    return c_fail, c_hold


def _pick_best(candidates, w1p, w1m, w0p, w0m, smoothing):
    z = _z_values(w1p, w1m, w0p, w0m)
    b = int(np.argmin(z))  # first minimum, so ties go to the lowest id
    rule = WeakRule(
        attr=int(candidates[b]),
        c_fail=_confidences(w0p[b], w0m[b], smoothing),
        c_hold=_confidences(w1p[b], w1m[b], smoothing),
    )
    return rule, float(z[b])


def best_rule(dataset, dist, candidates, smoothing) -> tuple[WeakRule, float]:
    """The candidate whose stump has the smallest normalizer.

    Equal normalizers go to the lowest attribute id. Returns the smoothed
    rule together with its unsmoothed normalizer value.
    """
    if smoothing <= 0:
        raise ValueError("smoothing must be positive")
    cands = np.unique(np.asarray(candidates, dtype=np.int64))
    if cands.size == 0:
        raise ValueError("empty candidate set")
    if cands[0] < 0 or cands[-1] >= dataset.n_attributes:
        raise ValueError("candidate attribute id out of range")
    ctx = _context(dataset)
    tables = _scan_tables(ctx, dist, cands)
    return _pick_best(cands, *tables, smoothing)


def _rule_outputs(holds: np.ndarray, rule: WeakRule) -> np.ndarray:
    return np.where(holds[:, np.newaxis], rule.c_hold, rule.c_fail)


def _reweight(dist: np.ndarray, outputs: np.ndarray, y: np.ndarray):
    # exp(-output) on the example's own label, exp(+output) elsewhere
    m = len(y)
    idx = np.arange(m)
    signed = outputs.copy()
    signed[idx, y] = -signed[idx, y]
    out = dist * np.exp(signed)
    z = float(out.sum())
    out /= z
    return out, z


def update_distribution(dist, rule: WeakRule, dataset):
    """Push the distribution through one rule's exponential loss.

    Weight rises on (example, label) cells the rule gets wrong and falls on
    the ones it gets right. Returns the renormalized matrix and the
    pre-normalization mass, whose running product bounds the training
    Hamming loss of the ensemble so far.
    """
    ctx = _context(dataset)
    if not 0 <= rule.attr < ctx.n_attributes:
        raise ValueError("rule attribute id out of range")
    outputs = _rule_outputs(ctx.holds_mask(rule.attr), rule)
    return _reweight(dist, outputs, ctx.y)


def _majority_first_order(class_count: np.ndarray) -> np.ndarray:
    """Label ids ordered most-frequent first, ties by lower id."""
    k = len(class_count)
    return np.lexsort((np.arange(k), -class_count))


def _argmax_with_tiebreak(scores: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Row-wise argmax where exactly-tied scores follow the given label order."""
    return order[np.argmax(scores[:, order], axis=1)]


class BoostClassifier(ClassifierMixin, BaseEstimator):
    """Boosted ensemble of confidence-rated predicate stumps.

    Parameters
    ----------
    n_rounds : int
        Upper bound on the number of weak rules.
    stop_error : float
        Training halts once the training error rate drops strictly below
        this value; 0 disables early stopping.
    smoothing : float or None
        Additive smoothing for the confidence log ratios. None means
        1/(m*k), recomputed at fit time.
    filter_method : {"none", "freq", "lfreq", "rlm"}
        Optional attribute-space reduction computed from the fit data.
    filter_param : int or None
        Minimum count (freq), per-sense budget (lfreq) or global budget
        (rlm) for the filter.
    sample_p : float
        Proportion of the candidate pool scanned per round; each round draws
        a fresh uniform sample without replacement. 1.0 scans the full pool.
    candidate_pool : array-like or None
        Explicit attribute ids to search within (intersected with the
        attributes present in the fit data).
    n_attributes : int or None
        Size of the attribute id space; None infers max(X) + 1.
    random_state : int
        Seed for the per-round candidate sampling.

    Attributes
    ----------
    rules_ : list of WeakRule
    z_history_ : unsmoothed normalizer of the chosen rule, per round
    z_empirical_history_ : realized normalizer of the distribution update
    train_error_history_ : training error rate after each round
    """

    def __init__(
        self,
        n_rounds=750,
        stop_error=0.05,
        smoothing=None,
        filter_method="none",
        filter_param=None,
        sample_p=1.0,
        candidate_pool=None,
        n_attributes=None,
        random_state=0,
    ):
        self.n_rounds = n_rounds
        self.stop_error = stop_error
        self.smoothing = smoothing
        self.filter_method = filter_method
        self.filter_param = filter_param
        self.sample_p = sample_p
        self.candidate_pool = candidate_pool
        self.n_attributes = n_attributes
        self.random_state = random_state

    def _check_params(self):
        if self.n_rounds < 1:
            raise ValueError("n_rounds must be at least 1")
        if not 0.0 <= self.stop_error < 1.0:
            raise ValueError("stop_error must be in [0, 1)")
        if self.smoothing is not None and self.smoothing <= 0:
            raise ValueError("smoothing must be positive")
        if not 0.0 < self.sample_p <= 1.0:
            raise ValueError("sample_p must be in (0, 1]")
        if self.filter_method not in ("none", "freq", "lfreq", "rlm"):
            raise ValueError(f"unknown filter method {self.filter_method!r}")
        if self.filter_method != "none" and (
            self.filter_param is None or self.filter_param < 1
        ):
            raise ValueError("filter_param must be a positive integer")

    def _build_pool(self, X, y, k, n_attributes):
        present = np.unique(X)
        pool = present
        if self.filter_method != "none":
            global_count = np.bincount(X.ravel(), minlength=n_attributes)
            sense_count = np.zeros((n_attributes, k), dtype=np.int64)
            np.add.at(sense_count, (X.ravel(), np.repeat(y, X.shape[1])), 1)
            if self.filter_method == "freq":
                kept = keep_by_frequency(global_count, self.filter_param)
            elif self.filter_method == "lfreq":
                kept = keep_by_sense_frequency(sense_count, self.filter_param)
            else:
                class_count = np.bincount(y, minlength=k)
                distances = partition_distances(
                    global_count, sense_count, class_count, len(y)
                )
                kept = keep_by_partition_distance(distances, self.filter_param)
            pool = np.intersect1d(pool, kept, assume_unique=True)
        if self.candidate_pool is not None:
            wanted = np.unique(np.asarray(self.candidate_pool, dtype=np.int64))
            pool = np.intersect1d(pool, wanted, assume_unique=True)
        if pool.size == 0:
            raise ValueError("candidate pool is empty after filtering")
        return pool

    def fit(self, X, y):
        self._check_params()
        X = check_examples(X)
        y = check_labels(y, len(X))
        if len(X) == 0:
            raise ValueError("cannot fit on zero examples")
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        k = len(self.classes_)
        if k < 2:
            raise ValueError("need at least 2 senses in the training data")
        m = len(y_enc)
        n_attributes = self.n_attributes
        if n_attributes is None:
            n_attributes = int(X.max()) + 1
        elif X.max() >= n_attributes:
            raise ValueError("attribute id outside the declared id space")

        ctx = _FitContext(X, y_enc, k, n_attributes)
        pool = self._build_pool(X, y_enc, k, n_attributes)
        smoothing = self.smoothing if self.smoothing is not None else 1.0 / (m * k)

        self.class_count_ = np.bincount(y_enc, minlength=k)
        self._label_order = _majority_first_order(self.class_count_)

        dist = init_distribution(m, k)
        scores = np.zeros((m, k))
        rules, zs, z_emps, errors = [], [], [], []
        for t in range(1, self.n_rounds + 1):
            cands = sample_candidates(pool, self.sample_p, self.random_state, t)
            tables = _scan_tables(ctx, dist, cands)
            rule, z = _pick_best(cands, *tables, smoothing)
            outputs = _rule_outputs(ctx.holds_mask(rule.attr), rule)
            dist, z_emp = _reweight(dist, outputs, y_enc)
            scores += outputs
            predicted = _argmax_with_tiebreak(scores, self._label_order)
            err = float(np.mean(predicted != y_enc))
            rules.append(rule)
            zs.append(z)
            z_emps.append(z_emp)
            errors.append(err)
            if err < self.stop_error:
                break

        self.rules_ = rules
        self.z_history_ = np.asarray(zs)
        self.z_empirical_history_ = np.asarray(z_emps)
        self.train_error_history_ = np.asarray(errors)
        self.n_rounds_ = len(rules)
        self.n_attributes_ = n_attributes
        self.n_positions_ = X.shape[1]
        self.candidate_pool_ = pool
        return self

    def _raw_scores(self, X, n_rules=None):
        rules = self.rules_ if n_rules is None else self.rules_[:n_rules]
        scores = np.zeros((len(X), len(self.classes_)))
        for rule in rules:
            holds = (X == rule.attr).any(axis=1)
            scores += _rule_outputs(holds, rule)
        return scores

    def decision_function(self, X):
        """Per-label ensemble scores, columns ordered like ``classes_``."""
        check_is_fitted(self, "rules_")
        X = check_examples(X, self.n_positions_)
        return self._raw_scores(X)

    def predict(self, X):
        scores = self.decision_function(X)
        winners = _argmax_with_tiebreak(scores, self._label_order)
        return self.classes_[winners]

    def error_rate(self, X, y) -> float:
        y = check_labels(np.asarray(y), len(X))
        return float(np.mean(self.predict(X) != y))

    def prefix_errors(self, X, y, checkpoints):
        """Error rate of each leading slice of the ensemble, in one pass.

        ``checkpoints`` must be strictly increasing rule counts, each at most
        ``n_rounds_``. Checkpoint 0 scores everything zero, so the prediction
        falls back to the most frequent training sense.
        """
        check_is_fitted(self, "rules_")
        X = check_examples(X, self.n_positions_)
        y = check_labels(np.asarray(y), len(X))
        cps = [int(c) for c in checkpoints]
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise ValueError("checkpoints must be strictly increasing")
        if cps and (cps[0] < 0 or cps[-1] > self.n_rounds_):
            raise ValueError("checkpoint outside the trained round range")

        scores = np.zeros((len(X), len(self.classes_)))
        errors = []
        done = 0
        for cp in cps:
            for rule in self.rules_[done:cp]:
                holds = (X == rule.attr).any(axis=1)
                scores += _rule_outputs(holds, rule)
            done = cp
            winners = _argmax_with_tiebreak(scores, self._label_order)
            errors.append(float(np.mean(self.classes_[winners] != y)))
        return np.asarray(errors)
