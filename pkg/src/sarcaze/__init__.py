"""Sarcasm classification from eye movements and text.

Parses fixation logs and labeled sentences, derives cognitive gaze
features (scanpath-level and saliency-graph-level) alongside textual
incongruity features, and evaluates classifiers, including a
multi-instance logistic regression that treats each reader's trial as
one instance of a sentence-level bag.
"""

from .corpus import (
    Corpus,
    Fixation,
    Lexicons,
    Sentence,
    Trial,
    load_corpus,
    load_lexicons,
    parse_sentences,
    parse_trials,
    tokenize,
    validate_corpus,
)
from .dataset import (
    FEATURE_CONFIGS,
    FeatureSchema,
    assemble_averaged,
    assemble_bags,
)
from .errors import (
    DataError,
    NumericError,
    SarcazeError,
    UsageError,
)
from .eval import (
    ClassifierSpec,
    EvalReport,
    FittedPipeline,
    default_classifier_spec,
    fit_pipeline,
    pipeline_from_dict,
    run_ablation,
    run_comparison,
    run_crossval,
    run_rank,
    run_ttest_table,
)
from .gaze import derive_saccades, simple_gaze_features
from .learn import TrainConfig, train_gnb, train_logreg, train_milr, train_mlp, train_svm
from .saliency import build_graph, complex_gaze_features
from .stats import (
    classification_metrics,
    mcnemar,
    rank_chi_squared,
    rank_info_gain,
    stratified_kfold,
    welch_ttest,
)
from .synth import SynthConfig, generate
from .textfeat import flesch_score, textual_features

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "Fixation",
    "Lexicons",
    "Sentence",
    "Trial",
    "load_corpus",
    "load_lexicons",
    "parse_sentences",
    "parse_trials",
    "tokenize",
    "validate_corpus",
    "FEATURE_CONFIGS",
    "FeatureSchema",
    "assemble_averaged",
    "assemble_bags",
    "DataError",
    "NumericError",
    "SarcazeError",
    "UsageError",
    "ClassifierSpec",
    "EvalReport",
    "FittedPipeline",
    "default_classifier_spec",
    "fit_pipeline",
    "pipeline_from_dict",
    "run_ablation",
    "run_comparison",
    "run_crossval",
    "run_rank",
    "run_ttest_table",
    "derive_saccades",
    "simple_gaze_features",
    "TrainConfig",
    "train_gnb",
    "train_logreg",
    "train_milr",
    "train_mlp",
    "train_svm",
    "build_graph",
    "complex_gaze_features",
    "classification_metrics",
    "mcnemar",
    "rank_chi_squared",
    "rank_info_gain",
    "stratified_kfold",
    "welch_ttest",
    "SynthConfig",
    "generate",
    "flesch_score",
    "textual_features",
    "__version__",
]
