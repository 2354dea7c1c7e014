"""Seeded synthetic corpus generator.

Produces labeled sentences, per-participant fixation logs, and a matching
miniature lexicon so the full pipeline can run without recorded data.
Token choice is independent of the label; the planted signal lives in the
gaze channel: sarcastic trials draw longer fixations (mean ratio set by
``duration_ratio``) and regress more often (``regression_boost``).

The per-fixation duration factor applied to sarcastic trials is
calibrated against the expected fixation-count inflation from the extra
regressions, so the empirical mean-FDUR ratio between classes lands on
``duration_ratio`` itself, and collapses to exactly 1 in the null
configuration (ratio 1, boost 0).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus, Fixation, Lexicons, Sentence, Trial, validate_corpus
from .corpus import write_fixations_csv, write_sentences_csv
from .errors import InvalidConfig

POSITIVE_WORDS = ("great", "lovely", "wonderful", "nice", "brilliant", "amazing")
NEGATIVE_WORDS = ("terrible", "awful", "boring", "bad", "horrible", "dull")
IMPLICIT_PHRASES = (("oh the joy", 1), ("so much fun", 1))
_PHRASE_TOKENS = ("oh", "the", "joy", "so", "much", "fun")

_BASE_DURATION_MS = 170.0
_SKIP_PROB = 0.2
_BASE_REGRESSION_PROB = 0.04
_FIXATION_JITTER_SIGMA = 0.35
_PARTICIPANT_SIGMA = 0.25
_POLAR_PROB = 0.1
_COMMA_PROB = 0.05
_PHRASE_PROB = 0.1


@dataclass(frozen=True)
class SynthConfig:
    n_sentences: int = 1000
    sarcastic_fraction: float = 0.35
    n_participants: int = 7
    vocabulary_size: int = 120
    words_min: int = 6
    words_max: int = 14
    duration_ratio: float = 1.5
    regression_boost: float = 0.15
    noise_std: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if self.n_sentences < 2:
            raise InvalidConfig(f"n_sentences {self.n_sentences} must be >= 2")
        if not 0.0 < self.sarcastic_fraction < 1.0:
            raise InvalidConfig(f"sarcastic_fraction {self.sarcastic_fraction} must be in (0, 1)")
        if self.n_participants < 1:
            raise InvalidConfig(f"n_participants {self.n_participants} must be >= 1")
        if self.vocabulary_size < 20:
            raise InvalidConfig(f"vocabulary_size {self.vocabulary_size} must be >= 20")
        if not 2 <= self.words_min <= self.words_max:
            raise InvalidConfig(
                f"word range {self.words_min}..{self.words_max} must satisfy 2 <= min <= max"
            )
        if not self.duration_ratio > 0:
            raise InvalidConfig(f"duration_ratio {self.duration_ratio} must be > 0")
        if not 0.0 <= self.regression_boost <= 1.0 - _BASE_REGRESSION_PROB:
            raise InvalidConfig(
                f"regression_boost {self.regression_boost} must be in [0, {1 - _BASE_REGRESSION_PROB}]"
            )
        if self.noise_std < 0.0:
            raise InvalidConfig(f"noise_std {self.noise_std} must be >= 0")


@dataclass(frozen=True)
class SynthResult:
    corpus: Corpus
    lexicons: Lexicons

    def save_to(self, directory: str | Path) -> dict[str, Path]:
        """Write sentences.csv, fixations.csv, and a lexicons/ directory;
        byte-identical output for identical configs."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        lexdir = directory / "lexicons"
        lexdir.mkdir(exist_ok=True)
        paths = {
            "sentences": directory / "sentences.csv",
            "fixations": directory / "fixations.csv",
            "lexicons": lexdir,
        }
        ordered = [self.corpus.sentences[i] for i in self.corpus.sentence_ids()]
        trials = [
            self.corpus.trials[key]
            for key in sorted(self.corpus.trials, key=lambda k: (k[0], k[1]))
        ]
        paths["sentences"].write_bytes(write_sentences_csv(ordered))
        paths["fixations"].write_bytes(write_fixations_csv(trials))
        (lexdir / "positive.txt").write_text("\n".join(POSITIVE_WORDS) + "\n")
        (lexdir / "negative.txt").write_text("\n".join(NEGATIVE_WORDS) + "\n")
        (lexdir / "implicit_phrases.tsv").write_text(
            "".join(f"{phrase}\t{pol}\n" for phrase, pol in IMPLICIT_PHRASES)
        )
        return paths


def _filler_vocabulary(size: int) -> list[str]:
    onsets = "b d f g h k l m n p r s t v z".split()
    rimes = "an en in on un ar er ir or ur al el il ol ul".split()
    reserved = set(POSITIVE_WORDS) | set(NEGATIVE_WORDS) | set(_PHRASE_TOKENS)
    words = [o + r for o, r in itertools.product(onsets, rimes) if o + r not in reserved]
    if size > len(words):
        raise InvalidConfig(f"vocabulary_size {size} exceeds the {len(words)} available fillers")
    return words[:size]


def _duration_factor(config: SynthConfig) -> float:
    """Sarcastic per-fixation duration multiplier, corrected for the extra
    fixations regressions inject so the FDUR ratio matches the config.

    The walk covers tokens, one more than the word count (terminal
    punctuation), hence the shifted length range."""
    lengths = range(config.words_min + 1, config.words_max + 2)
    eligible = sum(max(0, n - 2) / n for n in lengths) / len(lengths)
    reg_ns = _BASE_REGRESSION_PROB
    reg_s = _BASE_REGRESSION_PROB + config.regression_boost
    inflation_ns = 1.0 + 2.0 * reg_ns * eligible
    inflation_s = 1.0 + 2.0 * reg_s * eligible
    return config.duration_ratio * inflation_ns / inflation_s


def _make_tokens(rng, config: SynthConfig, fillers: list[str]) -> str:
    n_words = int(rng.integers(config.words_min, config.words_max + 1))
    body: list[str] = []
    for _ in range(n_words):
        roll = rng.random()
        if roll < _POLAR_PROB:
            pool = POSITIVE_WORDS if rng.random() < 0.5 else NEGATIVE_WORDS
            body.append(pool[int(rng.integers(len(pool)))])
        else:
            body.append(fillers[int(rng.integers(len(fillers)))])
    if rng.random() < _PHRASE_PROB:
        phrase, pol = IMPLICIT_PHRASES[int(rng.integers(len(IMPLICIT_PHRASES)))]
        at = int(rng.integers(len(body) + 1))
        body[at:at] = phrase.split()
        if rng.random() < 0.5:
            pool = NEGATIVE_WORDS if pol == 1 else POSITIVE_WORDS
            body.append(pool[int(rng.integers(len(pool)))])
    with_commas: list[str] = []
    for i, tok in enumerate(body):
        with_commas.append(tok)
        if 0 < i < len(body) - 1 and rng.random() < _COMMA_PROB:
            with_commas.append(",")
    terminal = "!" if rng.random() < 0.2 else "."
    return " ".join(with_commas) + terminal


def _walk(rng, n_tokens: int, sarcastic: bool, scale: float, config: SynthConfig) -> list[Fixation]:
    """Left-to-right pass with Bernoulli skips; a fixated word may trigger
    a regression (jump back, then return)."""
    reg_prob = _BASE_REGRESSION_PROB + (config.regression_boost if sarcastic else 0.0)

    def one_duration() -> float:
        d = scale * math.exp(rng.normal(0.0, _FIXATION_JITTER_SIGMA))
        return max(round(d, 1), 0.1)

    def x_of(word: int) -> float:
        return round(60.0 * word + float(rng.uniform(-10.0, 10.0)), 1)

    fixations: list[Fixation] = []
    for word in range(1, n_tokens + 1):
        if rng.random() < _SKIP_PROB:
            continue
        fixations.append(Fixation(word, one_duration(), x_of(word)))
        if word >= 3 and rng.random() < reg_prob:
            back = int(rng.integers(1, word))
            fixations.append(Fixation(back, one_duration(), x_of(back)))
            fixations.append(Fixation(word, one_duration(), x_of(word)))
    if not fixations:
        fixations.append(Fixation(1, one_duration(), x_of(1)))
    return fixations


def generate(config: SynthConfig | None = None) -> SynthResult:
    """Build a validated corpus plus lexicons from one seed.

    Draw order is fixed (labels, participant multipliers, then per
    sentence: tokens, shared effect, one walk per participant), so equal
    configs give structurally identical corpora and byte-identical CSVs.
    """
    config = config or SynthConfig()
    rng = np.random.default_rng(config.seed)
    fillers = _filler_vocabulary(config.vocabulary_size)
    n_sar = round(config.n_sentences * config.sarcastic_fraction)
    labels = np.array([1] * n_sar + [-1] * (config.n_sentences - n_sar))
    rng.shuffle(labels)
    participants = [f"P{i}" for i in range(1, config.n_participants + 1)]
    multipliers = {p: math.exp(rng.normal(0.0, _PARTICIPANT_SIGMA)) for p in participants}
    sar_factor = _duration_factor(config)

    sentences: list[Sentence] = []
    trials: list[Trial] = []
    for sid in range(1, config.n_sentences + 1):
        label = int(labels[sid - 1])
        text = _make_tokens(rng, config, fillers)
        sentence = Sentence.from_text(sid, label, text)
        sentences.append(sentence)
        shared = math.exp(rng.normal(0.0, config.noise_std)) if config.noise_std > 0 else 1.0
        class_factor = sar_factor if label == 1 else 1.0
        for participant in participants:
            scale = _BASE_DURATION_MS * class_factor * shared * multipliers[participant]
            fixations = _walk(rng, len(sentence.tokens), label == 1, scale, config)
            trials.append(
                Trial(sentence_id=sid, participant_id=participant, fixations=tuple(fixations))
            )
    corpus = validate_corpus(sentences, trials)
    lexicons = Lexicons.build(POSITIVE_WORDS, NEGATIVE_WORDS, IMPLICIT_PHRASES)
    return SynthResult(corpus=corpus, lexicons=lexicons)
