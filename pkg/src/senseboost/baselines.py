"""Benchmark classifiers: majority sense, smoothed Naive Bayes, Hamming k-NN.

All three share the boosted classifier's input convention (rows of
position-scoped attribute ids) and its tie-break policy: exactly tied label
scores go to the sense most frequent at fit time, then to the lowest id.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .boosting import _argmax_with_tiebreak, _majority_first_order
from .validation import check_examples, check_labels


class MostFrequentSenseClassifier(ClassifierMixin, BaseEstimator):
    """Predicts the sense seen most often at fit time, ignoring the context."""

    def fit(self, X, y):
        X = check_examples(X)
        y = check_labels(y, len(X))
        if len(y) == 0:
            raise ValueError("cannot fit on zero examples")
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        self.class_count_ = np.bincount(y_enc, minlength=len(self.classes_))
        self.majority_ = self.classes_[int(np.argmax(self.class_count_))]
        self.n_positions_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "majority_")
        X = check_examples(X, self.n_positions_)
        return np.full(len(X), self.majority_, dtype=self.classes_.dtype)


class SparseNaiveBayesClassifier(ClassifierMixin, BaseEstimator):
    """Naive Bayes over the active predicates of each example.

    Priors are relative sense frequencies and each conditional is the
    fraction of a sense's examples in which the predicate holds. A
    (attribute, sense) pair never seen together falls back to prior/m, or to
    a fixed constant if ``fallback`` is a float; attributes absent from the
    fit data entirely get the same fallback. Scoring runs in log space.
    """

    def __init__(self, fallback="prior", n_attributes=None):
        self.fallback = fallback
        self.n_attributes = n_attributes

    def fit(self, X, y):
        X = check_examples(X)
        y = check_labels(y, len(X))
        if len(y) == 0:
            raise ValueError("cannot fit on zero examples")
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        k = len(self.classes_)
        m = len(y_enc)
        n_attributes = self.n_attributes
        if n_attributes is None:
            n_attributes = int(X.max()) + 1
        elif X.size and X.max() >= n_attributes:
            raise ValueError("attribute id outside the declared id space")

        self.class_count_ = np.bincount(y_enc, minlength=k)
        self._label_order = _majority_first_order(self.class_count_)
        prior = self.class_count_ / m
        if self.fallback == "prior":
            fallback = prior / m
        else:
            fallback = np.full(k, float(self.fallback))
            if fallback[0] <= 0 or fallback[0] > 1:
                raise ValueError("constant fallback must be in (0, 1]")

        counts = np.zeros((n_attributes, k), dtype=np.int64)
        np.add.at(counts, (X.ravel(), np.repeat(y_enc, X.shape[1])), 1)
        with np.errstate(divide="ignore"):
            log_cond = np.log(counts / self.class_count_[np.newaxis, :])
        self.log_fallback_ = np.log(fallback)
        self.log_cond_ = np.where(counts > 0, log_cond, self.log_fallback_)
        self.log_prior_ = np.log(prior)
        self.n_attributes_ = n_attributes
        self.n_positions_ = X.shape[1]
        return self

    def joint_log_likelihood(self, X):
        """Log prior plus summed log conditionals, columns like ``classes_``."""
        check_is_fitted(self, "log_cond_")
        X = check_examples(X, self.n_positions_)
        # Canonical id order makes the score exactly invariant to the order
        # in which an example lists its attributes.
        Xs = np.sort(X, axis=1)
        known = Xs < self.n_attributes_
        rows = self.log_cond_[np.where(known, Xs, 0)]
        rows = np.where(known[:, :, np.newaxis], rows, self.log_fallback_)
        return self.log_prior_[np.newaxis, :] + rows.sum(axis=1)

    def predict(self, X):
        scores = self.joint_log_likelihood(X)
        winners = _argmax_with_tiebreak(scores, self._label_order)
        return self.classes_[winners]


class HammingKnnClassifier(ClassifierMixin, BaseEstimator):
    """Exemplar classifier: all fit examples are stored and scanned.

    Distance is the number of window positions whose attribute differs. The
    ``n_neighbors`` closest examples vote for their sense, by default with
    strength (positions - distance) so nearer neighbours count more and
    maximally distant ones not at all. Boundary ties at the last neighbour
    slot are admitted by lowest example index.
    """

    _CHUNK = 256  # query rows scored per distance-matrix block

    def __init__(self, n_neighbors=15, vote_weight="linear"):
        self.n_neighbors = n_neighbors
        self.vote_weight = vote_weight

    def fit(self, X, y):
        X = check_examples(X)
        y = check_labels(y, len(X))
        if len(y) == 0:
            raise ValueError("cannot fit on zero examples")
        if self.n_neighbors < 1:
            raise ValueError("n_neighbors must be at least 1")
        if self.n_neighbors > len(y):
            raise ValueError(
                f"n_neighbors={self.n_neighbors} exceeds the {len(y)} stored examples"
            )
        if self.vote_weight not in ("linear", "inverse", "uniform"):
            raise ValueError(f"unknown vote weight {self.vote_weight!r}")
        self.classes_, self._y_enc = np.unique(y, return_inverse=True)
        self.class_count_ = np.bincount(self._y_enc, minlength=len(self.classes_))
        self._label_order = _majority_first_order(self.class_count_)
        self.X_ = X
        self.n_positions_ = X.shape[1]
        return self

    def _weights(self, distances):
        if self.vote_weight == "linear":
            return (self.n_positions_ - distances).astype(float)
        if self.vote_weight == "inverse":
            return 1.0 / (1.0 + distances)
        return np.ones(len(distances))

    def predict(self, X):
        check_is_fitted(self, "X_")
        X = check_examples(X, self.n_positions_)
        k = len(self.classes_)
        out = np.empty(len(X), dtype=self.classes_.dtype)
        for start in range(0, len(X), self._CHUNK):
            chunk = X[start : start + self._CHUNK]
            dists = (chunk[:, np.newaxis, :] != self.X_[np.newaxis, :, :]).sum(axis=2)
            for row, d in enumerate(dists):
                near = np.argsort(d, kind="stable")[: self.n_neighbors]
                votes = np.bincount(
                    self._y_enc[near], weights=self._weights(d[near]), minlength=k
                )
                winner = _argmax_with_tiebreak(votes[np.newaxis, :], self._label_order)
                out[start + row] = self.classes_[winner[0]]
        return out
