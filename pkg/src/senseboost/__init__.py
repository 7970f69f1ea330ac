"""Boosted word sense disambiguation over sparse binary context predicates.

The package pairs a confidence-rated boosting classifier (with per-round
candidate sampling and three attribute filters) against the classic
benchmark trio of majority sense, Naive Bayes, and Hamming-distance k-NN,
all behind sklearn-style fit/predict estimators, plus the corpus handling,
cross-validation protocol, and CLI to run reproducible experiments.
"""

from .baselines import (
    HammingKnnClassifier,
    MostFrequentSenseClassifier,
    SparseNaiveBayesClassifier,
)
from .boosting import (
    BoostClassifier,
    WeakRule,
    best_rule,
    init_distribution,
    rule_confidences,
    rule_z,
    update_distribution,
    weight_table,
)
from .corpus import (
    NIL,
    PAIR_SEP,
    POSITION_NAMES,
    AttributeIndex,
    CorpusFormatError,
    Dataset,
    Feature,
    RawInstance,
    build_dataset,
    build_datasets,
    extract_features,
    load_corpus,
    parse_corpus,
    write_corpus,
)
from .evaluation import (
    Comparison,
    CvResult,
    FoldPlan,
    PairSummary,
    T_THRESHOLD,
    compare_cv,
    compare_table,
    cross_validate,
    curve_rejection,
    curve_rounds,
    make_folds,
    paired_t,
    time_weak_learner,
)
from .model_io import ModelFormatError, SenseModel, load_model, save_model
from .selection import (
    AttributeSubset,
    freq_filter,
    lfreq_filter,
    partition_distance,
    rejection_subset,
    rlm_distance,
    rlm_distances,
    rlm_rank,
    sample_candidates,
)
from .synth import CorpusSpec, SynthSpec, generate_corpus, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "AttributeIndex",
    "AttributeSubset",
    "BoostClassifier",
    "Comparison",
    "CorpusFormatError",
    "CorpusSpec",
    "CvResult",
    "Dataset",
    "Feature",
    "FoldPlan",
    "HammingKnnClassifier",
    "ModelFormatError",
    "MostFrequentSenseClassifier",
    "NIL",
    "PAIR_SEP",
    "POSITION_NAMES",
    "PairSummary",
    "RawInstance",
    "SenseModel",
    "SparseNaiveBayesClassifier",
    "SynthSpec",
    "T_THRESHOLD",
    "WeakRule",
    "best_rule",
    "build_dataset",
    "build_datasets",
    "compare_cv",
    "compare_table",
    "cross_validate",
    "curve_rejection",
    "curve_rounds",
    "extract_features",
    "freq_filter",
    "generate_corpus",
    "generate_synthetic",
    "init_distribution",
    "lfreq_filter",
    "load_corpus",
    "load_model",
    "make_folds",
    "paired_t",
    "parse_corpus",
    "partition_distance",
    "rejection_subset",
    "rlm_distance",
    "rlm_distances",
    "rlm_rank",
    "rule_confidences",
    "rule_z",
    "sample_candidates",
    "save_model",
    "time_weak_learner",
    "update_distribution",
    "weight_table",
    "write_corpus",
]
