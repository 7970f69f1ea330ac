"""Benchmark protocol: stratified cross-validation, paired significance
tests, wins/ties/losses summaries, and the two error-curve families
(error vs ensemble size, error vs attribute rejection level).

Comparisons are only meaningful when every algorithm saw exactly the same
train/test splits, so fold plans carry a content digest and the comparison
helpers refuse results built from different plans.
"""

from __future__ import annotations

import csv
import hashlib
import time
from dataclasses import dataclass

import numpy as np
from sklearn.base import clone

from .boosting import BoostClassifier, best_rule, init_distribution, update_distribution
from .selection import rejection_subset, sample_candidates

T_THRESHOLD = 2.262  # two-sided Student t critical value, 9 dof, 95%


@dataclass
class FoldPlan:
    """A fixed partition of example indices into test folds."""

    n_folds: int
    folds: list[np.ndarray]
    seed: int
    stratified: bool

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(str(self.n_folds).encode())
        for fold in self.folds:
            digest.update(fold.tobytes())
        return digest.hexdigest()

    def splits(self):
        """Yield (fold index, train indices, test indices) per fold."""
        m = sum(len(f) for f in self.folds)
        mask = np.empty(m, dtype=bool)
        for i, fold in enumerate(self.folds):
            mask[:] = True
            mask[fold] = False
            yield i, np.flatnonzero(mask), fold


def make_folds(y, n_folds: int = 10, seed=0, stratified: bool = True) -> FoldPlan:
    """Partition examples into folds of near-equal size, deterministically.

    With stratification each sense's examples are dealt round-robin across
    folds (continuing the rotation from sense to sense), so per-sense counts
    differ by at most one between folds whenever possible.
    """
    y = np.asarray(y)
    m = len(y)
    if n_folds < 2:
        raise ValueError("need at least 2 folds")
    if n_folds > m:
        raise ValueError(f"cannot split {m} examples into {n_folds} folds")
    rng = np.random.default_rng(seed)
    buckets: list[list[int]] = [[] for _ in range(n_folds)]
    if stratified:
        cursor = 0
        for s in range(int(y.max()) + 1):
            members = rng.permutation(np.flatnonzero(y == s))
            for i in members:
                buckets[cursor % n_folds].append(int(i))
                cursor += 1
    else:
        for cursor, i in enumerate(rng.permutation(m)):
            buckets[cursor % n_folds].append(int(i))
    folds = [np.sort(np.asarray(b, dtype=np.int64)) for b in buckets]
    return FoldPlan(n_folds=n_folds, folds=folds, seed=seed, stratified=stratified)


@dataclass
class CvResult:
    """Per-fold accuracies of one algorithm on one word."""

    algo: str
    word: str
    accuracies: np.ndarray
    plan_digest: str

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))


def cross_validate(estimator, dataset, plan: FoldPlan, algo: str | None = None) -> CvResult:
    """Train on each fold's complement and test on the fold.

    The estimator is cloned per fold, so the same unfitted instance can be
    reused across words and plans.
    """
    X, y = dataset.X, dataset.y
    accuracies = np.empty(plan.n_folds)
    for i, train_idx, test_idx in plan.splits():
        model = clone(estimator).fit(X[train_idx], y[train_idx])
        predicted = model.predict(X[test_idx])
        accuracies[i] = float(np.mean(predicted == y[test_idx]))
    return CvResult(
        algo=algo if algo is not None else type(estimator).__name__,
        word=dataset.word,
        accuracies=accuracies,
        plan_digest=plan.fingerprint(),
    )


@dataclass
class Comparison:
    """Paired t comparison of two matched accuracy vectors."""

    t: float
    significant: bool
    winner: str  # "a", "b" or "tie", by comparing the two means
    algo_a: str | None = None
    algo_b: str | None = None
    word: str | None = None


def paired_t(a, b, threshold: float = T_THRESHOLD) -> Comparison:
    """Paired Student t on matched samples.

    t = mean(d) / (sd(d) / sqrt(n)) with the (n-1)-denominator deviation.
    Zero variance with a nonzero mean counts as significant (t infinite);
    zero variance with zero mean is a tie.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired t needs two equal-length vectors")
    n = len(a)
    if n < 2:
        raise ValueError("paired t needs at least 2 pairs")
    d = a - b
    mean = float(np.mean(d))
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        t = 0.0 if mean == 0.0 else float(np.copysign(np.inf, mean))
    else:
        t = mean / (sd / np.sqrt(n))
    mean_a, mean_b = float(np.mean(a)), float(np.mean(b))
    if mean_a > mean_b:
        winner = "a"
    elif mean_a < mean_b:
        winner = "b"
    else:
        winner = "tie"
    return Comparison(t=float(t), significant=bool(abs(t) > threshold), winner=winner)


def compare_cv(ra: CvResult, rb: CvResult, threshold: float = T_THRESHOLD) -> Comparison:
    """Paired t between two results that must share word and fold plan."""
    if ra.word != rb.word:
        raise ValueError(f"comparing different words: {ra.word!r} vs {rb.word!r}")
    if ra.plan_digest != rb.plan_digest:
        raise ValueError(f"fold plans differ for word {ra.word!r}")
    cmp = paired_t(ra.accuracies, rb.accuracies, threshold)
    cmp.algo_a, cmp.algo_b, cmp.word = ra.algo, rb.algo, ra.word
    return cmp


@dataclass
class PairSummary:
    """Wins/ties/losses of algorithm A against B over a set of words."""

    algo_a: str
    algo_b: str
    wins: int
    sig_wins: int
    ties: int
    losses: int
    sig_losses: int
    per_word: list[Comparison]

    def format(self) -> str:
        return f"{self.wins}({self.sig_wins})-{self.ties}-{self.losses}({self.sig_losses})"


def compare_table(
    results_a: dict[str, CvResult],
    results_b: dict[str, CvResult],
    threshold: float = T_THRESHOLD,
) -> PairSummary:
    """Aggregate per-word comparisons into a wins/ties/losses summary.

    A win is a strictly larger mean accuracy; the bracketed counts are the
    wins and losses whose paired t clears the threshold.
    """
    if set(results_a) != set(results_b):
        raise ValueError("the two result sets cover different words")
    wins = ties = losses = sig_wins = sig_losses = 0
    per_word = []
    for word in results_a:
        cmp = compare_cv(results_a[word], results_b[word], threshold)
        per_word.append(cmp)
        if cmp.winner == "a":
            wins += 1
            sig_wins += int(cmp.significant)
        elif cmp.winner == "b":
            losses += 1
            sig_losses += int(cmp.significant)
        else:
            ties += 1
    algo_a = per_word[0].algo_a if per_word else ""
    algo_b = per_word[0].algo_b if per_word else ""
    return PairSummary(
        algo_a=algo_a,
        algo_b=algo_b,
        wins=wins,
        sig_wins=sig_wins,
        ties=ties,
        losses=losses,
        sig_losses=sig_losses,
        per_word=per_word,
    )


def curve_rounds(clf: BoostClassifier, X, y, checkpoints) -> list[tuple[int, float]]:
    """Test error of each leading slice of a trained ensemble."""
    errors = clf.prefix_errors(X, y, checkpoints)
    return [(int(c), float(e)) for c, e in zip(checkpoints, errors)]


def curve_rejection(
    dataset,
    method: str,
    levels,
    n_rounds: int,
    plan: FoldPlan,
    seed: int = 0,
    smoothing: float | None = None,
    sample_p: float = 1.0,
) -> list[tuple[float, float]]:
    """Cross-validated error after rejecting a fraction of the attributes.

    For each requested level the filter parameter realizing the closest
    achievable rejection (not exceeding it) is found on the full dataset,
    then a fixed-length ensemble is cross-validated on the surviving pool.
    Returns (achieved rejection, mean CV error) pairs.
    """
    points = []
    for level in levels:
        subset = rejection_subset(dataset, method, level)
        achieved = 1.0 - len(subset.kept) / dataset.n_attributes
        clf = BoostClassifier(
            n_rounds=n_rounds,
            stop_error=0.0,
            smoothing=smoothing,
            sample_p=sample_p,
            candidate_pool=subset.kept,
            n_attributes=dataset.n_attributes,
            random_state=seed,
        )
        result = cross_validate(clf, dataset, plan)
        points.append((float(achieved), 1.0 - result.mean))
    return points


def time_weak_learner(
    dataset,
    n_rounds: int,
    p: float = 1.0,
    seed: int = 0,
    smoothing: float | None = None,
) -> dict:
    """Run the boosting loop and time the per-round weak-rule search.

    The timed section covers drawing the round's candidates and scanning
    them for the best rule; the distribution update is excluded since both
    full and sampled search pay it identically.
    """
    pool = np.unique(dataset.X)
    eps = smoothing if smoothing is not None else 1.0 / (dataset.m * dataset.k)
    dist = init_distribution(dataset.m, dataset.k)
    per_round = []
    total_start = time.perf_counter()
    for t in range(1, n_rounds + 1):
        start = time.perf_counter()
        cands = sample_candidates(pool, p, seed, t)
        rule, _ = best_rule(dataset, dist, cands, eps)
        per_round.append(time.perf_counter() - start)
        dist, _ = update_distribution(dist, rule, dataset)
    return {
        "p": p,
        "rounds": n_rounds,
        "per_round": np.asarray(per_round),
        "mean_round": float(np.mean(per_round)),
        "total": time.perf_counter() - total_start,
    }


def write_accuracy_csv(results, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["word", "algo", "fold", "accuracy"])
        for result in results:
            for fold, acc in enumerate(result.accuracies):
                writer.writerow([result.word, result.algo, fold, repr(float(acc))])


def write_comparison_csv(comparisons, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["word", "algoA", "algoB", "t", "significant", "winner"])
        for cmp in comparisons:
            writer.writerow(
                [
                    cmp.word,
                    cmp.algo_a,
                    cmp.algo_b,
                    repr(float(cmp.t)),
                    str(cmp.significant).lower(),
                    cmp.winner,
                ]
            )


def write_curve_csv(points, path, x_name: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([x_name, "error"])
        for x, err in points:
            writer.writerow([repr(float(x)) if x_name != "round" else int(x), repr(float(err))])


def summary_table(datasets, results: dict, algos) -> str:
    """Per-word accuracy table with noun/verb/overall averages.

    ``results`` maps (word, algo) to a CvResult. Counts and the majority
    share come from the datasets; accuracy cells are fold means, in percent.
    """
    header = ["word", "pos", "senses", "examples", "attributes", "mfs%"]
    header += [f"{algo}%" for algo in algos]
    rows = []
    for ds in datasets:
        row = [
            ds.word,
            ds.pos,
            ds.k,
            ds.m,
            ds.n_attributes,
            100.0 * ds.sense_counts.max() / ds.m,
        ]
        row += [100.0 * results[(ds.word, algo)].mean for algo in algos]
        rows.append(row)

    def average(selector, label):
        group = [r for r, ds in zip(rows, datasets) if selector(ds)]
        if not group:
            return None
        out = [label, ""]
        for col in range(2, len(header)):
            out.append(float(np.mean([r[col] for r in group])))
        return out

    footer = [
        avg
        for avg in (
            average(lambda ds: ds.pos == "n", "avg-nouns"),
            average(lambda ds: ds.pos == "v", "avg-verbs"),
            average(lambda ds: True, "avg-all"),
        )
        if avg is not None
    ]

    def fmt(value):
        if isinstance(value, float):
            return f"{value:.1f}"
        return str(value)

    table = [header] + [[fmt(v) for v in row] for row in rows + footer]
    widths = [max(len(line[c]) for line in table) for c in range(len(header))]
    lines = [
        "  ".join(cell.rjust(widths[c]) for c, cell in enumerate(line))
        for line in table
    ]
    return "\n".join(lines)
