"""Seeded synthetic sense-tagged corpora for desk-scale experiments.

Each sense owns a private token pool per window position. A clean draw picks
the token from the example's own sense pool; with probability ``noise`` the
token comes from a uniformly random sense's pool instead, so noise 0 makes
every token fully sense-revealing and noise 1 removes the signal entirely.
The label prior is geometric in the sense id with ratio ``1 - skew``: skew 0
is uniform, skew 0.9 puts roughly 90% of the mass on sense 0.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .corpus import RawInstance

_SLOT_TAGS = ("m2", "m1", "p1", "p2")


@dataclass(frozen=True)
class SynthSpec:
    """Generator settings for a single ambiguous word.

    ``stopword_rate`` mixes in function-word-like tokens from a small pool
    shared by all senses, so part of the window carries no sense signal but
    still produces frequent coincidental matches, the way real context
    windows do. ``template_rho`` makes clean draws within an example reuse
    one latent pool index across positions, mimicking the rigid multiword
    expressions that signal senses in real text (and correlating the window
    tokens given the sense). Both default to off and leave the clean-draw
    guarantees of noise 0 untouched.
    """

    n_senses: int = 3
    n_examples: int = 300
    vocab_size: int | tuple[int, int, int, int] = 8
    skew: float = 0.0
    noise: float = 0.0
    stopword_rate: float = 0.0
    stopword_vocab: int = 4
    template_rho: float = 0.0
    word: str = "synth"
    pos: str = "n"

    def vocab_sizes(self) -> tuple[int, int, int, int]:
        v = self.vocab_size
        return (v, v, v, v) if isinstance(v, int) else tuple(v)

    def validate(self) -> None:
        if self.n_senses < 2:
            raise ValueError("need at least 2 senses")
        if self.n_examples < self.n_senses:
            raise ValueError(
                f"need at least {self.n_senses} examples to cover every sense"
            )
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError("noise must be in [0, 1]")
        if not 0.0 <= self.skew < 1.0:
            raise ValueError("skew must be in [0, 1)")
        if min(self.vocab_sizes()) < 1:
            raise ValueError("vocabulary sizes must be positive")
        if not 0.0 <= self.stopword_rate < 1.0:
            raise ValueError("stopword_rate must be in [0, 1)")
        if self.stopword_vocab < 1:
            raise ValueError("stopword_vocab must be positive")
        if not 0.0 <= self.template_rho <= 1.0:
            raise ValueError("template_rho must be in [0, 1]")


def _label_prior(k: int, skew: float) -> np.ndarray:
    if skew == 0.0:
        return np.full(k, 1.0 / k)
    ratio = 1.0 - skew
    prior = ratio ** np.arange(k)
    return prior / prior.sum()


def _force_all_senses(labels: np.ndarray, k: int) -> None:
    # Reassign one example of the currently largest sense to each missing one.
    for s in range(k):
        counts = np.bincount(labels, minlength=k)
        if counts[s] == 0:
            donor = int(np.argmax(counts))
            labels[int(np.argmax(labels == donor))] = s


def generate_synthetic(spec: SynthSpec, seed) -> list[RawInstance]:
    """Generate one word's occurrences, deterministically for a fixed seed."""
    spec.validate()
    rng = np.random.default_rng(seed)
    k, m = spec.n_senses, spec.n_examples

    labels = rng.choice(k, size=m, p=_label_prior(k, spec.skew))
    _force_all_senses(labels, k)

    template = None
    if spec.template_rho > 0.0:
        template = rng.integers(0, max(spec.vocab_sizes()), size=m)

    columns = []
    for slot, tag in enumerate(_SLOT_TAGS):
        vocab = spec.vocab_sizes()[slot]
        source = labels.copy()
        noisy = rng.random(m) < spec.noise
        source[noisy] = rng.integers(0, k, size=int(noisy.sum()))
        token_idx = rng.integers(0, vocab, size=m)
        if template is not None:
            templated = ~noisy & (rng.random(m) < spec.template_rho)
            token_idx[templated] = template[templated] % vocab
        column = [f"{tag}.s{source[i]}.{token_idx[i]}" for i in range(m)]
        if spec.stopword_rate > 0.0:
            stop = rng.random(m) < spec.stopword_rate
            stop_idx = rng.integers(0, spec.stopword_vocab, size=m)
            for i in np.flatnonzero(stop):
                column[i] = f"x{stop_idx[i]}"
        columns.append(column)

    return [
        RawInstance(
            word=spec.word,
            pos=spec.pos,
            sense=f"{spec.word}%{labels[i]}",
            context=(columns[0][i], columns[1][i], columns[2][i], columns[3][i]),
        )
        for i in range(m)
    ]


@dataclass(frozen=True)
class CorpusSpec:
    """Generator settings for a whole multi-word corpus.

    ``n_senses`` and ``noise`` may be (low, high) ranges sampled per word, so
    one corpus covers easy and hard disambiguation problems.
    """

    n_words: int = 15
    n_examples: int = 1000
    n_senses: int | tuple[int, int] = (4, 30)
    noise: float | tuple[float, float] = (0.1, 0.3)
    vocab_size: int = 8
    skew: float = 0.55
    stopword_rate: float = 0.0
    stopword_vocab: int = 4
    template_rho: float = 0.0

    @classmethod
    def from_string(cls, text: str) -> "CorpusSpec":
        """Parse a compact spec like ``words=15,m=1000,k=4:30,noise=0.1:0.3``.

        Keys: words, m, k, noise, vocab, skew, stopwords, stopvocab,
        templates. Ranges use ``low:high``.
        """
        kwargs = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise ValueError(f"bad synthetic-spec item {item!r}")
            key, _, value = item.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "words":
                kwargs["n_words"] = int(value)
            elif key == "m":
                kwargs["n_examples"] = int(value)
            elif key == "k":
                kwargs["n_senses"] = _int_or_range(value)
            elif key == "noise":
                kwargs["noise"] = _float_or_range(value)
            elif key == "vocab":
                kwargs["vocab_size"] = int(value)
            elif key == "skew":
                kwargs["skew"] = float(value)
            elif key == "stopwords":
                kwargs["stopword_rate"] = float(value)
            elif key == "stopvocab":
                kwargs["stopword_vocab"] = int(value)
            elif key == "templates":
                kwargs["template_rho"] = float(value)
            else:
                raise ValueError(f"unknown synthetic-spec key {key!r}")
        return cls(**kwargs)

    def word_spec(self, i: int, seed) -> SynthSpec:
        rng = np.random.default_rng([_entropy(seed), i, 0])
        if isinstance(self.n_senses, tuple):
            lo, hi = self.n_senses
            k = int(rng.integers(lo, hi + 1))
        else:
            k = self.n_senses
        if isinstance(self.noise, tuple):
            lo, hi = self.noise
            noise = float(rng.uniform(lo, hi))
        else:
            noise = self.noise
        # Two thirds nouns, one third verbs, deterministically interleaved.
        pos = "n" if i % 3 != 2 else "v"
        return SynthSpec(
            n_senses=k,
            n_examples=self.n_examples,
            vocab_size=self.vocab_size,
            skew=self.skew,
            noise=noise,
            stopword_rate=self.stopword_rate,
            stopword_vocab=self.stopword_vocab,
            template_rho=self.template_rho,
            word=f"syn{i:02d}",
            pos=pos,
        )


def generate_corpus(spec: CorpusSpec, seed) -> list[RawInstance]:
    """Generate a multi-word corpus, one classification problem per word."""
    if spec.n_words < 1:
        raise ValueError("need at least one word")
    instances = []
    for i in range(spec.n_words):
        wspec = spec.word_spec(i, seed)
        instances.extend(generate_synthetic(wspec, [_entropy(seed), i, 1]))
    return instances


def _entropy(seed) -> int:
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    raise ValueError("corpus generation needs an integer seed")


def _int_or_range(value: str):
    if ":" in value:
        lo, _, hi = value.partition(":")
        return (int(lo), int(hi))
    return int(value)


def _float_or_range(value: str):
    if ":" in value:
        lo, _, hi = value.partition(":")
        return (float(lo), float(hi))
    return float(value)
