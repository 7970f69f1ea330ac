"""Sense-tagged corpus handling: parsing, context features, sparse binarization.

Every occurrence of an ambiguous word is described by seven binary
"feature = value" predicates drawn from a two-word window on each side of the
target: the four window tokens themselves plus the three collocations of
adjacent window slots. A :class:`Dataset` holds all occurrences of one word
with those predicates mapped to dense attribute ids, together with the
occurrence counts and postings lists the learners and filters work from.

Corpus files are UTF-8 text, one occurrence per line::

    target_word <TAB> pos <TAB> sense_label <TAB> w-2 w-1 w+1 w+2

with four space-separated context tokens, ``_NIL_`` marking positions that
fall outside the sentence, and ``#`` starting a comment line.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

NIL = "_NIL_"

# Joins the two tokens of a collocation feature. \x1f counts as whitespace for
# str.split(), so no whitespace-delimited corpus token can ever contain it.
PAIR_SEP = "\x1f"

POSITION_NAMES = ("w-2", "w-1", "w+1", "w+2", "w-2:w-1", "w-1:w+1", "w+1:w+2")
N_POSITIONS = len(POSITION_NAMES)


class Feature(NamedTuple):
    """A binary context predicate: the value seen at one window position."""

    position: int
    value: str


class CorpusFormatError(ValueError):
    """Raised for a malformed corpus line; carries the 1-based line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class RawInstance:
    """One sense-tagged occurrence: target word, POS, sense, 4-token window."""

    word: str
    pos: str
    sense: str
    context: tuple[str, str, str, str]


def extract_features(instance: RawInstance) -> tuple[Feature, ...]:
    """The seven predicates of an occurrence, in fixed position order."""
    a, b, c, d = instance.context
    return (
        Feature(0, a),
        Feature(1, b),
        Feature(2, c),
        Feature(3, d),
        Feature(4, a + PAIR_SEP + b),
        Feature(5, b + PAIR_SEP + c),
        Feature(6, c + PAIR_SEP + d),
    )


def parse_corpus(lines: Iterable[str]) -> list[RawInstance]:
    """Parse corpus lines into instances, preserving order.

    Blank lines and ``#`` comments are skipped. A line with the wrong number
    of fields or context tokens, or an empty target/sense, raises
    :class:`CorpusFormatError` naming the offending line.
    """
    instances = []
    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise CorpusFormatError(
                f"expected 4 tab-separated fields, got {len(fields)}", line_no
            )
        word, pos, sense, context = fields
        if not word:
            raise CorpusFormatError("empty target word", line_no)
        if not sense:
            raise CorpusFormatError("empty sense label", line_no)
        tokens = context.split()
        if len(tokens) != 4:
            raise CorpusFormatError(
                f"expected 4 context tokens, got {len(tokens)}", line_no
            )
        instances.append(RawInstance(word, pos, sense, tuple(tokens)))
    return instances


def load_corpus(path) -> list[RawInstance]:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh)


def format_instance(instance: RawInstance) -> str:
    return "\t".join(
        (instance.word, instance.pos, instance.sense, " ".join(instance.context))
    )


def write_corpus(instances: Iterable[RawInstance], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for inst in instances:
            fh.write(format_instance(inst) + "\n")


class AttributeIndex:
    """Dense ids for context predicates plus the counts behind them.

    Ids are assigned in first-occurrence order. ``postings(a)`` lists, in
    strictly increasing order, the examples in which predicate ``a`` holds;
    ``global_count[a]`` is its length and ``sense_count[a, s]`` restricts it
    to examples labelled ``s``.
    """

    def __init__(self, attr_of, global_count, sense_count, post_indptr, post_indices):
        self.attr_of: dict[Feature, int] = attr_of
        self.value_of: list[Feature] = [None] * len(attr_of)
        for feat, a in attr_of.items():
            self.value_of[a] = feat
        self.global_count = global_count
        self.sense_count = sense_count
        self._post_indptr = post_indptr
        self._post_indices = post_indices

    @property
    def n_attributes(self) -> int:
        return len(self.value_of)

    def postings(self, attr: int) -> np.ndarray:
        lo, hi = self._post_indptr[attr], self._post_indptr[attr + 1]
        return self._post_indices[lo:hi]

    def lookup(self, feature: Feature, default: int = -1) -> int:
        return self.attr_of.get(feature, default)


@dataclass
class Dataset:
    """All occurrences of one ambiguous word in dense attribute form.

    Row ``i`` of ``X`` holds the attribute id observed at each of the seven
    window positions of occurrence ``i`` (column order = position order), and
    ``y[i]`` is its dense sense id. Treated as immutable once built, so a
    single instance is safe to share across workers.
    """

    word: str
    pos_tags: tuple[str, ...]
    senses: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    index: AttributeIndex
    _sense_counts: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def m(self) -> int:
        return len(self.y)

    @property
    def k(self) -> int:
        return len(self.senses)

    @property
    def n_attributes(self) -> int:
        return self.index.n_attributes

    @property
    def pos(self) -> str:
        return self.pos_tags[0] if self.pos_tags else ""

    @property
    def sense_counts(self) -> np.ndarray:
        if self._sense_counts is None:
            self._sense_counts = np.bincount(self.y, minlength=self.k)
        return self._sense_counts

    def majority_sense(self) -> int:
        return int(np.argmax(self.sense_counts))

    def to_instances(self) -> list[RawInstance]:
        """Reconstruct the parsed instances (inverse of :func:`build_dataset`)."""
        out = []
        for i in range(self.m):
            context = tuple(
                self.index.value_of[self.X[i, p]].value for p in range(4)
            )
            out.append(
                RawInstance(self.word, self.pos_tags[i], self.senses[self.y[i]], context)
            )
        return out


def build_dataset(instances: list[RawInstance]) -> Dataset:
    """Binarize one word's occurrences into a :class:`Dataset`.

    Attribute and sense ids are assigned in first-occurrence order so a given
    instance list always produces the same dataset.
    """
    if not instances:
        raise ValueError("cannot build a dataset from zero instances")
    word = instances[0].word
    for inst in instances:
        if inst.word != word:
            raise ValueError(
                f"mixed target words in one dataset: {word!r} vs {inst.word!r}"
            )

    attr_of: dict[Feature, int] = {}
    sense_of: dict[str, int] = {}
    post_lists: list[list[int]] = []
    m = len(instances)
    X = np.empty((m, N_POSITIONS), dtype=np.int64)
    y = np.empty(m, dtype=np.int64)

    for i, inst in enumerate(instances):
        y[i] = sense_of.setdefault(inst.sense, len(sense_of))
        for p, feat in enumerate(extract_features(inst)):
            a = attr_of.setdefault(feat, len(attr_of))
            if a == len(post_lists):
                post_lists.append([])
            post_lists[a].append(i)
            X[i, p] = a

    n_attrs = len(attr_of)
    k = len(sense_of)
    global_count = np.array([len(pl) for pl in post_lists], dtype=np.int64)
    post_indptr = np.zeros(n_attrs + 1, dtype=np.int64)
    np.cumsum(global_count, out=post_indptr[1:])
    post_indices = np.concatenate([np.asarray(pl, dtype=np.int64) for pl in post_lists])

    sense_count = np.zeros((n_attrs, k), dtype=np.int64)
    np.add.at(sense_count, (X.ravel(), np.repeat(y, N_POSITIONS)), 1)

    index = AttributeIndex(attr_of, global_count, sense_count, post_indptr, post_indices)
    return Dataset(
        word=word,
        pos_tags=tuple(inst.pos for inst in instances),
        senses=tuple(sense_of),
        X=X,
        y=y,
        index=index,
    )


def build_datasets(instances: list[RawInstance]) -> list[Dataset]:
    """Split a mixed-word instance list by target word and build each dataset.

    Words appear in first-occurrence order.
    """
    groups: dict[str, list[RawInstance]] = {}
    for inst in instances:
        groups.setdefault(inst.word, []).append(inst)
    return [build_dataset(group) for group in groups.values()]
