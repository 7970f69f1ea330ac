"""Text serialization for trained ensembles.

A model file is self-contained: it carries the sense inventory with training
counts (needed for tie-breaks), the full attribute table (needed to encode
raw occurrences), and one record per weak rule. Rule records come last and
in training order, so a reader can stop after any prefix and score the
partial ensemble.

Format (tab-separated fields, UTF-8, one record per line)::

    senseboost-model <TAB> 1
    word   <TAB> <target word>
    pos    <TAB> <part of speech>
    senses <TAB> <k>
    <sense id> <TAB> <label> <TAB> <training count>      (k lines)
    attributes <TAB> <A>
    <attr id> <TAB> <position index> <TAB> <value>       (A lines)
    rules  <TAB> <T>
    <attr id> <TAB> <k fail values> <TAB> <k hold values>  (T lines)

Floats are written with 17 significant digits, so reloading reproduces the
trained confidences bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boosting import BoostClassifier, WeakRule, _majority_first_order
from .corpus import N_POSITIONS, Feature, RawInstance, extract_features

MODEL_MAGIC = "senseboost-model"
MODEL_VERSION = 1


class ModelFormatError(ValueError):
    pass


@dataclass
class SenseModel:
    """A trained ensemble for one word, plus everything needed to apply it."""

    word: str
    pos: str
    senses: tuple[str, ...]
    sense_counts: np.ndarray
    features: list[Feature]
    rules: list[WeakRule]
    z_values: np.ndarray | None = field(default=None, compare=False)
    z_empirical: np.ndarray | None = field(default=None, compare=False)

    @property
    def n_rounds(self) -> int:
        return len(self.rules)

    @classmethod
    def from_fit(cls, dataset, clf: BoostClassifier) -> "SenseModel":
        if not np.array_equal(clf.classes_, np.arange(dataset.k)):
            raise ValueError("classifier was not fit on this dataset's sense ids")
        return cls(
            word=dataset.word,
            pos=dataset.pos,
            senses=dataset.senses,
            sense_counts=clf.class_count_.copy(),
            features=list(dataset.index.value_of),
            rules=list(clf.rules_),
            z_values=clf.z_history_.copy(),
            z_empirical=clf.z_empirical_history_.copy(),
        )

    def to_classifier(self, n_rules: int | None = None) -> BoostClassifier:
        """Rebuild a fitted classifier from the first ``n_rules`` rules."""
        rules = self.rules if n_rules is None else self.rules[:n_rules]
        clf = BoostClassifier(n_rounds=max(1, len(rules)))
        clf.classes_ = np.arange(len(self.senses))
        clf.class_count_ = self.sense_counts
        clf._label_order = _majority_first_order(self.sense_counts)
        clf.rules_ = list(rules)
        clf.n_rounds_ = len(rules)
        clf.n_attributes_ = len(self.features)
        clf.n_positions_ = N_POSITIONS
        clf.z_history_ = np.empty(0) if self.z_values is None else self.z_values
        clf.z_empirical_history_ = (
            np.empty(0) if self.z_empirical is None else self.z_empirical
        )
        clf.train_error_history_ = np.empty(0)
        return clf

    def encode_instances(self, instances: list[RawInstance]) -> np.ndarray:
        """Map raw occurrences into this model's attribute id space.

        Features never seen at training time all map to one id past the
        table, which no rule's predicate can match.
        """
        unknown = len(self.features)
        table = {feat: a for a, feat in enumerate(self.features)}
        X = np.empty((len(instances), N_POSITIONS), dtype=np.int64)
        for i, inst in enumerate(instances):
            for p, feat in enumerate(extract_features(inst)):
                X[i, p] = table.get(feat, unknown)
        return X

    def classify_instances(self, instances: list[RawInstance]) -> list[str]:
        clf = self.to_classifier()
        predicted = clf.predict(self.encode_instances(instances))
        return [self.senses[j] for j in predicted]


def _fmt(value: float) -> str:
    return format(value, ".17g")


def save_model(model: SenseModel, path) -> None:
    k = len(model.senses)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{MODEL_MAGIC}\t{MODEL_VERSION}\n")
        fh.write(f"word\t{model.word}\n")
        fh.write(f"pos\t{model.pos}\n")
        fh.write(f"senses\t{k}\n")
        for s, label in enumerate(model.senses):
            fh.write(f"{s}\t{label}\t{int(model.sense_counts[s])}\n")
        fh.write(f"attributes\t{len(model.features)}\n")
        for a, feat in enumerate(model.features):
            fh.write(f"{a}\t{feat.position}\t{feat.value}\n")
        fh.write(f"rules\t{len(model.rules)}\n")
        for rule in model.rules:
            cells = [str(rule.attr)]
            cells.extend(_fmt(v) for v in rule.c_fail)
            cells.extend(_fmt(v) for v in rule.c_hold)
            fh.write("\t".join(cells) + "\n")


def _expect(fields, n, what, line_no):
    if len(fields) != n:
        raise ModelFormatError(
            f"line {line_no}: expected {n} fields for {what}, got {len(fields)}"
        )


def load_model(path, max_rules: int | None = None) -> SenseModel:
    """Read a model file, optionally stopping after ``max_rules`` rule records."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    cursor = 0

    def next_line(what):
        nonlocal cursor
        if cursor >= len(lines):
            raise ModelFormatError(f"unexpected end of file while reading {what}")
        cursor += 1
        return lines[cursor - 1], cursor

    line, no = next_line("header")
    fields = line.split("\t")
    _expect(fields, 2, "header", no)
    if fields[0] != MODEL_MAGIC:
        raise ModelFormatError(f"not a model file (bad magic {fields[0]!r})")
    if int(fields[1]) != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {fields[1]}")

    def keyed(key):
        line, no = next_line(key)
        fields = line.split("\t")
        _expect(fields, 2, key, no)
        if fields[0] != key:
            raise ModelFormatError(f"line {no}: expected {key!r}, got {fields[0]!r}")
        return fields[1]

    word = keyed("word")
    pos = keyed("pos")
    k = int(keyed("senses"))
    senses, counts = [], []
    for s in range(k):
        line, no = next_line("sense record")
        fields = line.split("\t")
        _expect(fields, 3, "sense record", no)
        if int(fields[0]) != s:
            raise ModelFormatError(f"line {no}: sense records out of order")
        senses.append(fields[1])
        counts.append(int(fields[2]))

    n_attrs = int(keyed("attributes"))
    features = []
    for a in range(n_attrs):
        line, no = next_line("attribute record")
        fields = line.split("\t")
        _expect(fields, 3, "attribute record", no)
        if int(fields[0]) != a:
            raise ModelFormatError(f"line {no}: attribute records out of order")
        features.append(Feature(int(fields[1]), fields[2]))

    n_rules = int(keyed("rules"))
    if max_rules is not None:
        n_rules = min(n_rules, max_rules)
    rules = []
    for _ in range(n_rules):
        line, no = next_line("rule record")
        fields = line.split("\t")
        _expect(fields, 1 + 2 * k, "rule record", no)
        attr = int(fields[0])
        if not 0 <= attr < n_attrs:
            raise ModelFormatError(f"line {no}: rule attribute id out of range")
        values = np.array([float(v) for v in fields[1:]])
        rules.append(WeakRule(attr=attr, c_fail=values[:k], c_hold=values[k:]))

    return SenseModel(
        word=word,
        pos=pos,
        senses=tuple(senses),
        sense_counts=np.asarray(counts, dtype=np.int64),
        features=features,
        rules=rules,
    )
