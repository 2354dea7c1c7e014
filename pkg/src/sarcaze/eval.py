"""Experiment orchestration: cross-validated configuration comparisons,
training-size ablation, per-participant duration tests, feature ranking,
and whole-pipeline fitting for the train/predict commands.

Every lexical artifact (unigram principal axes, the learned-polarity
predictor, the feature scaler) is fitted on training sentences only and
applied unchanged to held-out sentences; per-fold hashes of those
artifacts let tests prove nothing leaked from a test fold.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, Lexicons
from .dataset import (
    Bag,
    FeatureSchema,
    FEATURE_CONFIGS,
    _CONFIG_BLOCKS,
    assemble_bags,
    fit_scaler,
    needs_unigrams,
    scale_bags,
)
from .errors import FoldMismatch, InvalidConfig, SingleClassTraining, TooFewPerClass
from .learn import (
    GNBModel,
    LinearModel,
    MILR_COMBINES,
    MLPModel,
    TrainConfig,
    model_from_dict,
    model_to_dict,
    predict_bag,
    predict_gnb_matrix,
    predict_linear_matrix,
    predict_mlp_matrix,
    train_gnb,
    train_logreg,
    train_milr,
    train_mlp,
    train_svm,
)
from .stats import (
    FeatureRanking,
    McNemarResult,
    Metrics,
    TTestResult,
    classification_metrics,
    mcnemar,
    rank_chi_squared,
    rank_info_gain,
    stratified_kfold,
    welch_ttest,
)
from .svg import bar_chart, line_chart
from .textfeat import LPModel, UnigramModel, derive_polarity_labels, fit_unigrams, train_lp

CLASSIFIER_KINDS = ("gnb", "logreg", "svm", "mlp", "milr")


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    train: TrainConfig
    milr_combine: str = "noisy-or"

    def __post_init__(self):
        if self.kind not in CLASSIFIER_KINDS:
            raise InvalidConfig(f"classifier {self.kind!r} not one of {CLASSIFIER_KINDS}")
        if self.milr_combine not in MILR_COMBINES:
            raise InvalidConfig(f"combine {self.milr_combine!r} not one of {MILR_COMBINES}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "train": {
                "learning_rate": self.train.learning_rate,
                "l2": self.train.l2,
                "epochs": self.train.epochs,
                "batch_size": self.train.batch_size,
                "seed": self.train.seed,
                "hidden_units": self.train.hidden_units,
            },
            "milr_combine": self.milr_combine,
        }


def default_classifier_spec(kind: str, seed: int = 0, combine: str = "noisy-or") -> ClassifierSpec:
    if kind == "svm":
        train = TrainConfig(epochs=100, seed=seed)
    else:
        train = TrainConfig(seed=seed)
    return ClassifierSpec(kind=kind, train=train, milr_combine=combine)


# --- fold-local fitting ---------------------------------------------------


def _digest(payload) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _unigram_payload(model: UnigramModel | None):
    if model is None:
        return None
    return {
        "vocabulary": model.vocabulary,
        "axes": model.axes.tolist(),
        "mean": model.mean.tolist(),
    }


def _lp_payload(model: LPModel | None):
    if model is None:
        return None
    if model.model is None:
        return {"constant": model.fallback}
    return {
        "vocabulary": model.vocabulary,
        "weights": model.model.weights.tolist(),
        "bias": model.model.bias,
    }


def _scaler_payload(scaler):
    if scaler is None:
        return None
    return {"mean": scaler.mean.tolist(), "scale": scaler.scale.tolist()}


def _clamped_unigram_k(requested: int, sentences) -> int:
    vocab = {t.lower() for s in sentences for t in s.tokens}
    limit = min(len(vocab), len(sentences) - 1)
    if limit < 1:
        raise InvalidConfig(f"cannot fit unigram axes on {len(sentences)} sentences")
    return max(1, min(requested, limit))


def _fit_lexical_models(train_sentences, lexicons, feature_config, unigram_k):
    """Unigram axes and the polarity predictor, fitted on training
    sentences only; either may be absent for configurations that do not
    use it."""
    unigram_model = None
    if needs_unigrams(feature_config):
        k = _clamped_unigram_k(unigram_k, train_sentences)
        unigram_model = fit_unigrams(train_sentences, k)
    lp_model = None
    if "sarcasm" in _CONFIG_BLOCKS[feature_config]:
        if lexicons is None:
            raise InvalidConfig(f"config {feature_config!r} needs lexicons")
        labeled = derive_polarity_labels(train_sentences, lexicons)
        kinds = {p for _, p in labeled}
        if kinds == {1, -1}:
            try:
                lp_model = train_lp(labeled)
            except SingleClassTraining:
                lp_model = LPModel.constant(-1)
        else:
            lp_model = LPModel.constant(-1 if kinds != {1} else 1)
    return unigram_model, lp_model


def _train_classifier(spec: ClassifierSpec, bags: list[Bag]):
    """Train one classifier on training bags.  MILR consumes the bags
    themselves; the others consume participant-averaged vectors."""
    labels = [b.label for b in bags]
    if spec.kind == "milr":
        return train_milr(
            [b.instances for b in bags], labels, spec.train, combine=spec.milr_combine
        )
    X = np.stack([b.averaged() for b in bags])
    if spec.kind == "gnb":
        return train_gnb(X, labels)
    if spec.kind == "logreg":
        return train_logreg(X, labels, spec.train)
    if spec.kind == "svm":
        return train_svm(X, labels, spec.train)
    if spec.kind == "mlp":
        return train_mlp(X, labels, spec.train)
    raise InvalidConfig(f"unknown classifier {spec.kind!r}")


def _predict_with(spec: ClassifierSpec, model, bags: list[Bag]) -> np.ndarray:
    if spec.kind == "milr":
        return np.asarray(
            [predict_bag(model, b.instances, spec.milr_combine) for b in bags]
        )
    X = np.stack([b.averaged() for b in bags])
    if spec.kind == "gnb":
        return predict_gnb_matrix(model, X)
    if spec.kind == "mlp":
        return predict_mlp_matrix(model, X)
    return predict_linear_matrix(model, X)


@dataclass(frozen=True)
class _FoldOutcome:
    fold: int
    test_ids: tuple[int, ...]
    predictions: np.ndarray
    artifact_hash: str


def _run_fold(corpus, lexicons, feature_config, spec, unigram_k, sentence_ids, folds, fold):
    train_ids = [sid for sid, f in zip(sentence_ids, folds) if f != fold]
    test_ids = [sid for sid, f in zip(sentence_ids, folds) if f == fold]
    train_sentences = [corpus.sentences[sid] for sid in train_ids]
    unigram_model, lp_model = _fit_lexical_models(
        train_sentences, lexicons, feature_config, unigram_k
    )
    _, bags = assemble_bags(
        corpus, lexicons, feature_config, unigram_model=unigram_model, lp_model=lp_model
    )
    by_id = {b.sentence_id: b for b in bags}
    train_bags = [by_id[sid] for sid in train_ids]
    test_bags = [by_id[sid] for sid in test_ids]
    scaler = None
    if spec.kind != "gnb":
        scaler = fit_scaler(np.vstack([b.instances for b in train_bags]))
        train_bags = scale_bags(scaler, train_bags)
        test_bags = scale_bags(scaler, test_bags)
    model = _train_classifier(spec, train_bags)
    predictions = _predict_with(spec, model, test_bags)
    artifact_hash = _digest(
        {
            "unigram": _unigram_payload(unigram_model),
            "lp": _lp_payload(lp_model),
            "scaler": _scaler_payload(scaler),
            "classifier": model_to_dict(model),
        }
    )
    return _FoldOutcome(
        fold=fold,
        test_ids=tuple(test_ids),
        predictions=predictions,
        artifact_hash=artifact_hash,
    )


# --- cross-validation -----------------------------------------------------


@dataclass(frozen=True)
class EvalReport:
    feature_config: str
    classifier: ClassifierSpec
    k: int
    seed: int
    unigram_k: int
    corpus_hash: str
    fold_hash: str
    sentence_ids: tuple[int, ...]
    gold: tuple[int, ...]
    predictions: tuple[int, ...]
    pooled: Metrics
    per_fold: tuple[Metrics, ...]
    artifact_hashes: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "feature_config": self.feature_config,
            "classifier": self.classifier.to_dict(),
            "k": self.k,
            "seed": self.seed,
            "unigram_k": self.unigram_k,
            "corpus_hash": self.corpus_hash,
            "fold_hash": self.fold_hash,
            "sentence_ids": list(self.sentence_ids),
            "gold": list(self.gold),
            "predictions": list(self.predictions),
            "pooled": self.pooled.to_dict(),
            "per_fold": [m.to_dict() for m in self.per_fold],
            "artifact_hashes": list(self.artifact_hashes),
        }

    def report_hash(self) -> str:
        return _digest(self.to_dict())


def _fold_hash(sentence_ids, folds) -> str:
    return _digest({"sentence_ids": list(sentence_ids), "folds": [int(f) for f in folds]})


def run_crossval(
    corpus: Corpus,
    lexicons: Lexicons | None,
    feature_config: str,
    classifier: ClassifierSpec,
    k: int = 10,
    seed: int = 0,
    unigram_k: int = 50,
    fold_assignment=None,
    jobs: int = 1,
) -> EvalReport:
    """Stratified k-fold evaluation of one (features, classifier) pair.

    Pass ``fold_assignment`` (an array of fold ids aligned with sorted
    sentence ids) to pin folds across several runs; otherwise folds come
    from the seed.
    """
    if feature_config not in FEATURE_CONFIGS:
        raise InvalidConfig(f"config {feature_config!r} not one of {FEATURE_CONFIGS}")
    sentence_ids = corpus.sentence_ids()
    labels = np.asarray([corpus.sentences[sid].label for sid in sentence_ids])
    for cls in (1, -1):
        if int((labels == cls).sum()) < k:
            raise TooFewPerClass(
                f"class {cls} has {int((labels == cls).sum())} sentences; need >= {k} for {k} folds"
            )
    if fold_assignment is None:
        folds = stratified_kfold(labels, k, seed)
    else:
        folds = np.asarray(fold_assignment, dtype=int)
        if folds.size != len(sentence_ids):
            raise FoldMismatch(
                f"fold assignment covers {folds.size} items, corpus has {len(sentence_ids)}"
            )

    def job(fold: int) -> _FoldOutcome:
        return _run_fold(
            corpus, lexicons, feature_config, classifier, unigram_k, sentence_ids, folds, fold
        )

    fold_ids = sorted(set(folds.tolist()))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(job, fold_ids))
    else:
        outcomes = [job(f) for f in fold_ids]

    predicted: dict[int, int] = {}
    for outcome in outcomes:
        for sid, pred in zip(outcome.test_ids, outcome.predictions):
            predicted[sid] = int(pred)
    predictions = tuple(predicted[sid] for sid in sentence_ids)
    gold = tuple(int(v) for v in labels)
    per_fold = tuple(
        classification_metrics(
            [predicted[sid] for sid in outcome.test_ids],
            [corpus.sentences[sid].label for sid in outcome.test_ids],
        )
        for outcome in outcomes
    )
    return EvalReport(
        feature_config=feature_config,
        classifier=classifier,
        k=k,
        seed=seed,
        unigram_k=unigram_k,
        corpus_hash=corpus.content_hash(),
        fold_hash=_fold_hash(sentence_ids, folds),
        sentence_ids=tuple(sentence_ids),
        gold=gold,
        predictions=predictions,
        pooled=classification_metrics(list(predictions), list(gold)),
        per_fold=per_fold,
        artifact_hashes=tuple(outcome.artifact_hash for outcome in outcomes),
    )


# --- paired comparison ----------------------------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    runs: tuple[EvalReport, ...]
    pairs: tuple[tuple[int, int, McNemarResult], ...]
    alpha: float

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "runs": [
                {
                    "feature_config": r.feature_config,
                    "classifier": r.classifier.to_dict(),
                    "pooled": r.pooled.to_dict(),
                }
                for r in self.runs
            ],
            "pairs": [
                {
                    "a": a,
                    "b": b,
                    "mcnemar": result.to_dict(),
                    "verdict": "significant" if result.significant else "not significant",
                }
                for a, b, result in self.pairs
            ],
        }


def compare_reports(report_a: EvalReport, report_b: EvalReport, alpha: float = 0.05,
                    exact: bool = False) -> McNemarResult:
    """Paired test over two runs' pooled predictions; the runs must share
    the exact same fold assignment."""
    if report_a.fold_hash != report_b.fold_hash:
        raise FoldMismatch("runs were evaluated on different fold assignments")
    return mcnemar(
        list(report_a.predictions), list(report_b.predictions), list(report_a.gold),
        alpha=alpha, exact=exact,
    )


def run_comparison(
    corpus: Corpus,
    lexicons: Lexicons | None,
    runs: list[tuple[str, ClassifierSpec]],
    k: int = 10,
    seed: int = 0,
    unigram_k: int = 50,
    alpha: float = 0.05,
    jobs: int = 1,
) -> ComparisonReport:
    """Evaluate several (features, classifier) pairs on one shared fold
    assignment and test every pair of prediction vectors."""
    if len(runs) < 2:
        raise InvalidConfig(f"comparison needs >= 2 runs, got {len(runs)}")
    sentence_ids = corpus.sentence_ids()
    labels = np.asarray([corpus.sentences[sid].label for sid in sentence_ids])
    folds = stratified_kfold(labels, k, seed)
    reports = tuple(
        run_crossval(
            corpus, lexicons, feature_config, spec,
            k=k, seed=seed, unigram_k=unigram_k, fold_assignment=folds, jobs=jobs,
        )
        for feature_config, spec in runs
    )
    pairs = []
    for i in range(len(reports)):
        for j in range(i + 1, len(reports)):
            pairs.append((i, j, compare_reports(reports[i], reports[j], alpha=alpha)))
    return ComparisonReport(runs=reports, pairs=tuple(pairs), alpha=alpha)


# --- training-size ablation -----------------------------------------------

ABLATION_FRACTIONS = (0.7, 0.8, 0.9, 1.0)


@dataclass(frozen=True)
class AblationPoint:
    fraction: float
    n_train: int
    weighted_f: float
    kappa: float


@dataclass(frozen=True)
class AblationReport:
    feature_configs: tuple[str, ...]
    classifier: ClassifierSpec
    seed: int
    curves: dict[str, tuple[AblationPoint, ...]]

    def to_dict(self) -> dict:
        return {
            "classifier": self.classifier.to_dict(),
            "seed": self.seed,
            "curves": {
                config: [
                    {
                        "fraction": p.fraction,
                        "n_train": p.n_train,
                        "weighted_f": p.weighted_f,
                        "kappa": p.kappa,
                    }
                    for p in points
                ]
                for config, points in self.curves.items()
            },
        }

    def to_svg(self) -> str:
        series = []
        labels = []
        for config in self.feature_configs:
            series.append([(p.fraction, p.weighted_f) for p in self.curves[config]])
            labels.append(config)
        return line_chart(
            series, labels, "weighted F by training fraction", x_ticks=list(ABLATION_FRACTIONS)
        )

    def to_csv(self) -> str:
        lines = ["feature_config,fraction,n_train,weighted_f,kappa"]
        for config in self.feature_configs:
            for p in self.curves[config]:
                lines.append(f"{config},{p.fraction},{p.n_train},{p.weighted_f},{p.kappa}")
        return "\n".join(lines) + "\n"


def run_ablation(
    corpus: Corpus,
    lexicons: Lexicons | None,
    feature_configs: list[str],
    classifier: ClassifierSpec,
    fractions=ABLATION_FRACTIONS,
    seed: int = 0,
    unigram_k: int = 50,
) -> AblationReport:
    """Hold out a stratified 20% test set, then retrain on nested
    stratified subsamples of the remaining 80% at each fraction."""
    fractions = tuple(sorted(fractions))
    if not fractions or not all(0.0 < f <= 1.0 for f in fractions):
        raise InvalidConfig(f"fractions {fractions} must lie in (0, 1]")
    sentence_ids = corpus.sentence_ids()
    labels = np.asarray([corpus.sentences[sid].label for sid in sentence_ids])
    split = stratified_kfold(labels, 5, seed)
    test_ids = [sid for sid, f in zip(sentence_ids, split) if f == 0]
    pool_ids = [sid for sid, f in zip(sentence_ids, split) if f != 0]

    rng = np.random.default_rng(seed)
    per_class: dict[int, list[int]] = {1: [], -1: []}
    for sid in pool_ids:
        per_class[corpus.sentences[sid].label].append(sid)
    shuffled = {
        cls: [ids[i] for i in rng.permutation(len(ids))] for cls, ids in per_class.items()
    }

    test_set = set(test_ids)
    curves: dict[str, tuple[AblationPoint, ...]] = {}
    for config in feature_configs:
        points = []
        for fraction in fractions:
            train_ids = sorted(
                sid
                for ids in shuffled.values()
                for sid in ids[: int(round(fraction * len(ids)))]
            )
            keep = set(train_ids) | test_set
            sub_ids = [sid for sid in sentence_ids if sid in keep]
            sub_folds = [0 if sid in test_set else 1 for sid in sub_ids]
            outcome = _run_fold(
                corpus, lexicons, config, classifier, unigram_k, sub_ids, sub_folds, 0
            )
            metrics = classification_metrics(
                list(outcome.predictions),
                [corpus.sentences[sid].label for sid in outcome.test_ids],
            )
            points.append(
                AblationPoint(
                    fraction=fraction,
                    n_train=len(train_ids),
                    weighted_f=metrics.weighted_f,
                    kappa=metrics.kappa,
                )
            )
        curves[config] = tuple(points)
    return AblationReport(
        feature_configs=tuple(feature_configs),
        classifier=classifier,
        seed=seed,
        curves=curves,
    )


# --- per-participant duration tests ---------------------------------------


@dataclass(frozen=True)
class TTestTable:
    rows: tuple[tuple[str, TTestResult], ...]
    alpha: float

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "rows": [
                {
                    "participant": participant,
                    **result.to_dict(),
                    "significant": result.p < self.alpha,
                }
                for participant, result in self.rows
            ],
        }

    def to_text(self) -> str:
        header = (
            f"{'participant':<12}{'mean_s':>10}{'std_s':>10}{'mean_ns':>10}"
            f"{'std_ns':>10}{'t':>9}{'p':>12}  sig"
        )
        lines = [header, "-" * len(header)]
        for participant, r in self.rows:
            lines.append(
                f"{participant:<12}{r.mean_a:>10.1f}{r.std_a:>10.1f}{r.mean_b:>10.1f}"
                f"{r.std_b:>10.1f}{r.t:>9.2f}{r.p:>12.3g}  {'*' if r.p < self.alpha else ''}"
            )
        return "\n".join(lines) + "\n"

    def all_significant(self) -> bool:
        return all(r.p < self.alpha for _, r in self.rows)


def run_ttest_table(corpus: Corpus, alpha: float = 0.05) -> TTestTable:
    """For each participant, compare per-sentence duration-per-word
    between sarcastic and non-sarcastic sentences."""
    rows = []
    for participant in corpus.participants:
        samples: dict[int, list[float]] = {1: [], -1: []}
        for (sid, pid), trial in corpus.trials.items():
            if pid != participant:
                continue
            sentence = corpus.sentences[sid]
            samples[sentence.label].append(
                trial.total_duration() / len(sentence.tokens)
            )
        rows.append((participant, welch_ttest(samples[1], samples[-1])))
    return TTestTable(rows=tuple(rows), alpha=alpha)


# --- feature ranking ------------------------------------------------------


@dataclass(frozen=True)
class RankReport:
    ranking: FeatureRanking
    schema: FeatureSchema
    gaze_features: frozenset[str]

    def gaze_in_top(self, top_n: int) -> int:
        return sum(1 for name in self.ranking.names()[:top_n] if name in self.gaze_features)

    def to_dict(self) -> dict:
        return {
            "ranking": self.ranking.to_dict(),
            "feature_config": self.schema.config,
            "gaze_features": sorted(self.gaze_features),
            "gaze_in_top_10": self.gaze_in_top(10),
            "gaze_in_top_20": self.gaze_in_top(20),
        }

    def to_svg(self, top_n: int = 20) -> str:
        items = self.ranking.items[:top_n]
        return bar_chart(
            [name for name, _ in items],
            [merit for _, merit in items],
            f"top {len(items)} features by {self.ranking.method}",
            highlight=self.gaze_features,
            height=max(300.0, 22.0 * len(items) + 80.0),
        )


def run_rank(
    corpus: Corpus,
    lexicons: Lexicons | None,
    feature_config: str = "gaze+sarcasm",
    method: str = "chi_squared",
    bins: int = 10,
    unigram_k: int = 50,
) -> RankReport:
    """Rank all features of one configuration against the labels.

    Descriptive (not predictive), so the lexical models are fitted on the
    whole corpus.
    """
    sentences = [corpus.sentences[sid] for sid in corpus.sentence_ids()]
    unigram_model, lp_model = _fit_lexical_models(
        sentences, lexicons, feature_config, unigram_k
    )
    schema, bags = assemble_bags(
        corpus, lexicons, feature_config, unigram_model=unigram_model, lp_model=lp_model
    )
    matrix = np.stack([b.averaged() for b in bags])
    labels = [b.label for b in bags]
    if method == "chi_squared":
        ranking = rank_chi_squared(matrix, labels, schema.names, bins=bins)
    elif method == "info_gain":
        ranking = rank_info_gain(matrix, labels, schema.names, bins=bins)
    else:
        raise InvalidConfig(f"method {method!r} not one of ('chi_squared', 'info_gain')")
    gaze = frozenset(
        name for name, flag in zip(schema.names, schema.is_gaze()) if flag
    )
    return RankReport(ranking=ranking, schema=schema, gaze_features=gaze)


# --- fitted pipeline (train / predict commands) ---------------------------

PIPELINE_FORMAT = "sarcaze-pipeline/1"


@dataclass(frozen=True)
class FittedPipeline:
    feature_config: str
    classifier: ClassifierSpec
    unigram_k: int
    schema: FeatureSchema
    unigram_model: UnigramModel | None
    lp_model: LPModel | None
    scaler: object | None
    model: object

    def predict(self, corpus: Corpus, lexicons: Lexicons | None) -> dict[int, int]:
        _, bags = assemble_bags(
            corpus, lexicons, self.feature_config,
            unigram_model=self.unigram_model, lp_model=self.lp_model,
        )
        if self.scaler is not None:
            bags = scale_bags(self.scaler, bags)
        predictions = _predict_with(self.classifier, self.model, bags)
        return {b.sentence_id: int(p) for b, p in zip(bags, predictions)}

    def to_dict(self) -> dict:
        from .dataset import Scaler

        scaler = None
        if self.scaler is not None:
            assert isinstance(self.scaler, Scaler)
            scaler = _scaler_payload(self.scaler)
        return {
            "format": PIPELINE_FORMAT,
            "feature_config": self.feature_config,
            "classifier": self.classifier.to_dict(),
            "unigram_k": self.unigram_k,
            "schema_hash": self.schema.schema_hash(),
            "unigram": _unigram_payload(self.unigram_model),
            "lp": _lp_payload(self.lp_model),
            "scaler": scaler,
            "model": model_to_dict(self.model),
        }


def fit_pipeline(
    corpus: Corpus,
    lexicons: Lexicons | None,
    feature_config: str,
    classifier: ClassifierSpec,
    unigram_k: int = 50,
) -> FittedPipeline:
    """Fit every artifact on the full corpus and train the classifier."""
    sentences = [corpus.sentences[sid] for sid in corpus.sentence_ids()]
    unigram_model, lp_model = _fit_lexical_models(
        sentences, lexicons, feature_config, unigram_k
    )
    schema, bags = assemble_bags(
        corpus, lexicons, feature_config, unigram_model=unigram_model, lp_model=lp_model
    )
    scaler = None
    if classifier.kind != "gnb":
        scaler = fit_scaler(np.vstack([b.instances for b in bags]))
        bags = scale_bags(scaler, bags)
    model = _train_classifier(classifier, bags)
    return FittedPipeline(
        feature_config=feature_config,
        classifier=classifier,
        unigram_k=unigram_k,
        schema=schema,
        unigram_model=unigram_model,
        lp_model=lp_model,
        scaler=scaler,
        model=model,
    )


def pipeline_from_dict(data: dict) -> FittedPipeline:
    from .dataset import Scaler, build_schema

    if data.get("format") != PIPELINE_FORMAT:
        raise InvalidConfig(f"unsupported pipeline format {data.get('format')!r}")
    spec_data = data["classifier"]
    spec = ClassifierSpec(
        kind=spec_data["kind"],
        train=TrainConfig(**spec_data["train"]),
        milr_combine=spec_data.get("milr_combine", "noisy-or"),
    )
    unigram = None
    if data.get("unigram") is not None:
        u = data["unigram"]
        axes = np.asarray(u["axes"], dtype=float)
        unigram = UnigramModel(
            vocabulary={str(k): int(v) for k, v in u["vocabulary"].items()},
            axes=axes,
            mean=np.asarray(u["mean"], dtype=float),
            eigenvalues=np.zeros(axes.shape[0]),
        )
    lp = None
    if data.get("lp") is not None:
        lp_data = data["lp"]
        if "constant" in lp_data:
            lp = LPModel.constant(int(lp_data["constant"]))
        else:
            lp = LPModel(
                vocabulary={str(k): int(v) for k, v in lp_data["vocabulary"].items()},
                model=LinearModel(
                    weights=np.asarray(lp_data["weights"], dtype=float),
                    bias=float(lp_data["bias"]),
                ),
            )
    scaler = None
    if data.get("scaler") is not None:
        scaler = Scaler(
            mean=np.asarray(data["scaler"]["mean"], dtype=float),
            scale=np.asarray(data["scaler"]["scale"], dtype=float),
        )
    schema = build_schema(
        data["feature_config"], unigram.k if unigram is not None else 0
    )
    if schema.schema_hash() != data.get("schema_hash"):
        raise InvalidConfig("pipeline schema hash does not match its configuration")
    return FittedPipeline(
        feature_config=data["feature_config"],
        classifier=spec,
        unigram_k=int(data["unigram_k"]),
        schema=schema,
        unigram_model=unigram,
        lp_model=lp,
        scaler=scaler,
        model=model_from_dict(data["model"]),
    )


# --- text rendering -------------------------------------------------------


def format_metrics_table(rows: list[tuple[str, Metrics]]) -> str:
    """Aligned text table: per-class and weighted precision/recall/F plus
    kappa, one row per named run."""
    header = (
        f"{'run':<28}{'P(1)':>7}{'R(1)':>7}{'F(1)':>7}"
        f"{'P(-1)':>8}{'R(-1)':>8}{'F(-1)':>8}"
        f"{'P(avg)':>8}{'R(avg)':>8}{'F(avg)':>8}{'kappa':>8}"
    )
    lines = [header, "-" * len(header)]
    for name, m in rows:
        lines.append(
            f"{name:<28}"
            f"{100 * m.precision[1]:>7.1f}{100 * m.recall[1]:>7.1f}{100 * m.f_score[1]:>7.1f}"
            f"{100 * m.precision[-1]:>8.1f}{100 * m.recall[-1]:>8.1f}{100 * m.f_score[-1]:>8.1f}"
            f"{100 * m.weighted_precision:>8.1f}{100 * m.weighted_recall:>8.1f}"
            f"{100 * m.weighted_f:>8.1f}{m.kappa:>8.2f}"
        )
    return "\n".join(lines) + "\n"
