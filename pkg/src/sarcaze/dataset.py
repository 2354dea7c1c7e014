"""Feature assembly: canonical ordering, per-participant bags,
participant-averaged vectors, and z-scoring.

Five named feature configurations select which blocks go into a vector:

========  =========================================================
unigram        unigram principal components only
sarcasm        unigram + the seven incongruity/polarity features
gaze           readability/length + simple + graph gaze features
gaze+sarcasm   every block
reading-time   unigram + sarcasm + readability/length + total
               reading time as the only cognitive feature
========  =========================================================

The canonical order within a full vector is: unigram block, sarcasm block
(PUN..LP), control block (RED, LEN), simple gaze block, complex gaze
block; the reading-time configuration swaps the two gaze blocks for the
single RT column.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, Lexicons, Sentence
from .errors import InvalidConfig, LexiconMissing, MissingTrials
from .gaze import SIMPLE_FEATURE_NAMES, simple_gaze_features
from .saliency import COMPLEX_FEATURE_NAMES, build_graph, complex_gaze_features
from .textfeat import (
    LPModel,
    TEXTUAL_CONTROL_NAMES,
    TEXTUAL_SARCASM_NAMES,
    UnigramModel,
    apply_lp,
    flesch_score,
    project_unigrams,
    textual_features,
)

FEATURE_CONFIGS = ("unigram", "sarcasm", "gaze", "gaze+sarcasm", "reading-time")

_CONFIG_BLOCKS = {
    "unigram": ("unigram",),
    "sarcasm": ("unigram", "sarcasm"),
    "gaze": ("control", "simple", "complex"),
    "gaze+sarcasm": ("unigram", "sarcasm", "control", "simple", "complex"),
    "reading-time": ("unigram", "sarcasm", "control", "reading_time"),
}

_GAZE_BLOCKS = frozenset({"simple", "complex", "reading_time"})


@dataclass(frozen=True)
class FeatureSchema:
    """Resolved feature layout for one configuration."""

    config: str
    blocks: tuple[str, ...]
    names: tuple[str, ...]
    unigram_k: int

    def is_gaze(self) -> tuple[bool, ...]:
        """Per-feature mask marking cognitive (gaze-derived) columns."""
        flags = []
        for block in self.blocks:
            flags.extend([block in _GAZE_BLOCKS] * len(_block_names(block, self.unigram_k)))
        return tuple(flags)

    def schema_hash(self) -> str:
        payload = json.dumps(
            {"config": self.config, "names": list(self.names)}, sort_keys=True
        ).encode()
        return hashlib.sha256(payload).hexdigest()


def _block_names(block: str, unigram_k: int) -> tuple[str, ...]:
    if block == "unigram":
        return tuple(f"UNI_PC{i}" for i in range(1, unigram_k + 1))
    if block == "sarcasm":
        return TEXTUAL_SARCASM_NAMES
    if block == "control":
        return TEXTUAL_CONTROL_NAMES
    if block == "simple":
        return SIMPLE_FEATURE_NAMES
    if block == "complex":
        return COMPLEX_FEATURE_NAMES
    if block == "reading_time":
        return ("RT",)
    raise InvalidConfig(f"unknown feature block {block!r}")


def build_schema(config: str, unigram_k: int = 0) -> FeatureSchema:
    if config not in FEATURE_CONFIGS:
        raise InvalidConfig(f"config {config!r} not one of {FEATURE_CONFIGS}")
    blocks = _CONFIG_BLOCKS[config]
    if "unigram" in blocks and unigram_k < 1:
        raise InvalidConfig(f"config {config!r} needs unigram_k >= 1, got {unigram_k}")
    names: list[str] = []
    for block in blocks:
        names.extend(_block_names(block, unigram_k))
    return FeatureSchema(
        config=config,
        blocks=blocks,
        names=tuple(names),
        unigram_k=unigram_k if "unigram" in blocks else 0,
    )


def needs_fixations(config: str) -> bool:
    if config not in FEATURE_CONFIGS:
        raise InvalidConfig(f"config {config!r} not one of {FEATURE_CONFIGS}")
    return bool(_GAZE_BLOCKS & set(_CONFIG_BLOCKS[config]))


def needs_unigrams(config: str) -> bool:
    if config not in FEATURE_CONFIGS:
        raise InvalidConfig(f"config {config!r} not one of {FEATURE_CONFIGS}")
    return "unigram" in _CONFIG_BLOCKS[config]


@dataclass(frozen=True, eq=False)
class FeatureVector:
    sentence_id: int
    label: int
    values: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.values).all():
            raise InvalidConfig(f"non-finite feature values for sentence {self.sentence_id}")


@dataclass(frozen=True, eq=False)
class Bag:
    """One sentence's instances: a (participants x features) matrix whose
    rows share the textual blocks and differ in the gaze blocks."""

    sentence_id: int
    label: int
    participants: tuple[str, ...]
    instances: np.ndarray

    def __post_init__(self):
        if self.instances.ndim != 2 or self.instances.shape[0] < 1:
            raise InvalidConfig(f"bag for sentence {self.sentence_id} has no instances")
        if not np.isfinite(self.instances).all():
            raise InvalidConfig(f"non-finite instance values for sentence {self.sentence_id}")

    def averaged(self) -> np.ndarray:
        return self.instances.mean(axis=0)


def _textual_values(sentence: Sentence, blocks, lexicons, lp_model) -> dict[str, tuple]:
    out: dict[str, tuple] = {}
    if "sarcasm" in blocks:
        if lexicons is None:
            raise LexiconMissing("config with sarcasm features needs lexicons")
        tf = textual_features(sentence, lexicons)
        if lp_model is not None:
            tf = tf.with_lp(apply_lp(lp_model, sentence))
        out["sarcasm"] = tf.sarcasm_values()
        out["control"] = tf.control_values()
    elif "control" in blocks:
        out["control"] = (flesch_score(sentence), float(len(sentence.tokens)))
    return out


def assemble_bags(
    corpus: Corpus,
    lexicons: Lexicons | None,
    config: str,
    *,
    unigram_model: UnigramModel | None = None,
    lp_model: LPModel | None = None,
) -> tuple[FeatureSchema, list[Bag]]:
    """One bag per sentence, one instance per participant with a trial.

    Gaze-bearing configurations require at least one trial per sentence
    (MissingTrials otherwise); purely textual configurations fall back to
    a single instance when a sentence has no trials at all.
    """
    if config not in FEATURE_CONFIGS:
        raise InvalidConfig(f"config {config!r} not one of {FEATURE_CONFIGS}")
    blocks = _CONFIG_BLOCKS[config]
    if "unigram" in blocks and unigram_model is None:
        raise InvalidConfig(f"config {config!r} needs a fitted unigram model")
    schema = build_schema(config, unigram_model.k if unigram_model is not None else 0)
    bags: list[Bag] = []
    for sid in corpus.sentence_ids():
        sentence = corpus.sentences[sid]
        head: list[float] = []
        if "unigram" in blocks:
            head.extend(project_unigrams(unigram_model, sentence).tolist())
        textual = _textual_values(sentence, blocks, lexicons, lp_model)
        for name in ("sarcasm", "control"):
            if name in blocks:
                head.extend(textual[name])
        trials = corpus.trials_for_sentence(sid)
        gaze_needed = bool(_GAZE_BLOCKS & set(blocks))
        if gaze_needed and not trials:
            raise MissingTrials(sid)
        rows: list[list[float]] = []
        participants: list[str] = []
        if not trials:
            rows.append(list(head))
        for trial in trials:
            row = list(head)
            if "simple" in blocks:
                simple = simple_gaze_features(trial, sentence)
                row.extend(simple[n] for n in SIMPLE_FEATURE_NAMES)
            if "complex" in blocks:
                complex_ = complex_gaze_features(build_graph(trial, sentence))
                row.extend(complex_[n] for n in COMPLEX_FEATURE_NAMES)
            if "reading_time" in blocks:
                row.append(trial.total_duration())
            rows.append(row)
            participants.append(trial.participant_id)
        bags.append(
            Bag(
                sentence_id=sid,
                label=sentence.label,
                participants=tuple(participants),
                instances=np.asarray(rows, dtype=float),
            )
        )
    return schema, bags


def assemble_averaged(
    corpus: Corpus,
    lexicons: Lexicons | None,
    config: str,
    *,
    unigram_model: UnigramModel | None = None,
    lp_model: LPModel | None = None,
) -> tuple[FeatureSchema, list[FeatureVector]]:
    """Per-sentence vectors: the feature-wise mean of the sentence's bag
    instances (gaze features averaged across participants, textual blocks
    untouched)."""
    schema, bags = assemble_bags(
        corpus, lexicons, config, unigram_model=unigram_model, lp_model=lp_model
    )
    vectors = [
        FeatureVector(sentence_id=b.sentence_id, label=b.label, values=b.averaged())
        for b in bags
    ]
    return schema, vectors


# --- scaling --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Scaler:
    mean: np.ndarray
    scale: np.ndarray


def fit_scaler(matrix) -> Scaler:
    """Column mean/std from training rows; zero-variance columns get unit
    scale so they pass through unchanged."""
    X = np.asarray(matrix, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise InvalidConfig(f"scaler needs >= 2 training vectors, got shape {X.shape}")
    std = X.std(axis=0)
    return Scaler(mean=X.mean(axis=0), scale=np.where(std > 0.0, std, 1.0))


def apply_scaler(scaler: Scaler, matrix) -> np.ndarray:
    return (np.asarray(matrix, dtype=float) - scaler.mean) / scaler.scale


def standardize(matrix) -> tuple[Scaler, np.ndarray]:
    scaler = fit_scaler(matrix)
    return scaler, apply_scaler(scaler, matrix)


def fit_scaler_bags(bags: list[Bag]) -> Scaler:
    return fit_scaler(np.vstack([b.instances for b in bags]))


def scale_bags(scaler: Scaler, bags: list[Bag]) -> list[Bag]:
    return [
        Bag(
            sentence_id=b.sentence_id,
            label=b.label,
            participants=b.participants,
            instances=apply_scaler(scaler, b.instances),
        )
        for b in bags
    ]


# --- serialization --------------------------------------------------------


def matrix_of(vectors: list[FeatureVector]) -> np.ndarray:
    return np.stack([v.values for v in vectors])


def labels_of(items) -> np.ndarray:
    return np.asarray([item.label for item in items])


def dump_features_csv(schema: FeatureSchema, vectors: list[FeatureVector]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sentence_id", "label", *schema.names])
    for v in vectors:
        writer.writerow([v.sentence_id, v.label, *(repr(float(x)) for x in v.values)])
    return buf.getvalue().encode("utf-8")


def dump_features_json(schema: FeatureSchema, vectors: list[FeatureVector]) -> dict:
    return {
        "schema": {
            "config": schema.config,
            "blocks": list(schema.blocks),
            "names": list(schema.names),
            "unigram_k": schema.unigram_k,
            "hash": schema.schema_hash(),
        },
        "rows": [
            {
                "sentence_id": v.sentence_id,
                "label": v.label,
                "values": [float(x) for x in v.values],
            }
            for v in vectors
        ],
    }
