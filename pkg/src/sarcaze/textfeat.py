"""Textual features: lexical polarity counts, explicit/implicit
incongruity, readability, length, unigram principal components, and the
learned sentence-polarity feature.

The incongruity features look only at the subsequence of polar tokens
(words found in the positive or negative lexicon); neutral words between
them are transparent.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .corpus import PUNCTUATION, Lexicons, Sentence
from .errors import DegenerateMatrix, InvalidConfig, NoWords
from .learn import LinearModel, TrainConfig, train_logreg

VOWELS = frozenset("aeiouy")

TEXTUAL_SARCASM_NAMES = ("PUN", "IMP", "EXP", "LAR", "+VE", "-VE", "LP")
TEXTUAL_CONTROL_NAMES = ("RED", "LEN")

_PCA_TOL = 1e-9
_PCA_MAX_ITER = 1000
_PCA_RNG_SEED = 0xC0FFEE


def count_syllables(word: str) -> int:
    """Heuristic syllable count: maximal vowel groups (aeiouy), one less
    for a terminal silent 'e' (kept when the word ends in consonant+"le"),
    floor one for any alphabetic word.  Non-alphabetic input counts 0."""
    if not word.isalpha():
        return 0
    w = word.lower()
    groups = 0
    in_group = False
    for ch in w:
        if ch in VOWELS:
            if not in_group:
                groups += 1
            in_group = True
        else:
            in_group = False
    if w.endswith("e") and groups > 0:
        silent = True
        if len(w) >= 3 and w.endswith("le") and w[-3] not in VOWELS:
            silent = False
        if silent:
            groups -= 1
    return max(groups, 1)


def flesch_score(sentence: Sentence) -> float:
    """Reading-ease score 206.835 - 1.015 (words/sentences)
    - 84.6 (syllables/words); words counts alphabetic tokens, sentence
    count is the number of terminal-punctuation tokens (at least 1)."""
    words = [t for t in sentence.tokens if t.isalpha()]
    if not words:
        raise NoWords(f"sentence {sentence.id} has no alphabetic tokens")
    n_sentences = max(1, sum(1 for t in sentence.tokens if t in (".", "!", "?")))
    n_syllables = sum(count_syllables(w) for w in words)
    return (
        206.835
        - 1.015 * (len(words) / n_sentences)
        - 84.6 * (n_syllables / len(words))
    )


@dataclass(frozen=True)
class TextFeatures:
    """Per-sentence textual feature values.

    ``lp`` holds the learned-polarity feature and starts at 0 (unfilled);
    the evaluation layer replaces it with the fold-local prediction.
    """

    pun: int
    imp: bool
    exp: int
    lar: int
    pos: int
    neg: int
    lp: int
    red: float
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise InvalidConfig(f"length {self.length} must be >= 1")
        if self.lar > self.pos + self.neg:
            raise InvalidConfig("largest polar run exceeds polar token count")
        if self.exp > max(0, self.pos + self.neg - 1):
            raise InvalidConfig("polarity flip count exceeds adjacent polar pairs")
        if self.lp not in (1, 0, -1):
            raise InvalidConfig(f"lp {self.lp} must be -1, 0 or 1")

    def with_lp(self, lp: int) -> "TextFeatures":
        return replace(self, lp=lp)

    def sarcasm_values(self) -> tuple[float, ...]:
        return (
            float(self.pun),
            1.0 if self.imp else 0.0,
            float(self.exp),
            float(self.lar),
            float(self.pos),
            float(self.neg),
            float(self.lp),
        )

    def control_values(self) -> tuple[float, ...]:
        return (self.red, float(self.length))


def _polar_signs(tokens, lexicons: Lexicons) -> list[int]:
    return [s for s in (lexicons.polarity(t) for t in tokens) if s != 0]


def _longest_run(signs: list[int]) -> int:
    best = run = 0
    prev = 0
    for s in signs:
        run = run + 1 if s == prev else 1
        prev = s
        best = max(best, run)
    return best


def _has_implicit_incongruity(tokens_lower, signs, lexicons: Lexicons) -> bool:
    for phrase, phrase_pol in lexicons.implicit_phrases:
        if not any(s == -phrase_pol for s in signs):
            continue
        span = len(phrase)
        for start in range(len(tokens_lower) - span + 1):
            if tuple(tokens_lower[start : start + span]) == phrase:
                return True
    return False


def textual_features(sentence: Sentence, lexicons: Lexicons) -> TextFeatures:
    """All lexicon-driven features of one sentence plus readability and
    length.  EXP counts sign flips along the polar-token subsequence; LAR
    is its longest constant-sign run.  IMP fires when an implicit phrase
    occurs contiguously and its polarity opposes some polar token."""
    tokens_lower = [t.lower() for t in sentence.tokens]
    signs = _polar_signs(sentence.tokens, lexicons)
    return TextFeatures(
        pun=sum(1 for t in sentence.tokens if t and all(ch in PUNCTUATION for ch in t)),
        imp=_has_implicit_incongruity(tokens_lower, signs, lexicons),
        exp=sum(1 for a, b in zip(signs, signs[1:]) if a != b),
        lar=_longest_run(signs),
        pos=sum(1 for s in signs if s == 1),
        neg=sum(1 for s in signs if s == -1),
        lp=0,
        red=flesch_score(sentence),
        length=len(sentence.tokens),
    )


# --- unigram principal components -----------------------------------------


@dataclass(frozen=True, eq=False)
class UnigramModel:
    vocabulary: dict[str, int]
    axes: np.ndarray
    mean: np.ndarray
    eigenvalues: np.ndarray

    @property
    def k(self) -> int:
        return self.axes.shape[0]


def _presence_row(tokens, vocabulary: dict[str, int]) -> np.ndarray:
    row = np.zeros(len(vocabulary))
    for t in tokens:
        col = vocabulary.get(t.lower())
        if col is not None:
            row[col] = 1.0
    return row


def presence_matrix(sentences, vocabulary: dict[str, int]) -> np.ndarray:
    return np.stack([_presence_row(s.tokens, vocabulary) for s in sentences])


def build_vocabulary(sentences) -> dict[str, int]:
    vocab = sorted({t.lower() for s in sentences for t in s.tokens})
    return {t: i for i, t in enumerate(vocab)}


def _power_iteration(cov: np.ndarray, prior_axes: list[np.ndarray], rng) -> tuple[np.ndarray, float]:
    """Dominant eigenvector of ``cov`` restricted to the complement of
    ``prior_axes``; returns (unit vector, eigenvalue)."""
    d = cov.shape[0]
    v = rng.standard_normal(d)
    for axis in prior_axes:
        v -= (v @ axis) * axis
    norm = np.linalg.norm(v)
    if norm == 0.0:
        v = np.zeros(d)
        v[len(prior_axes) % d] = 1.0
    else:
        v /= norm
    for _ in range(_PCA_MAX_ITER):
        w = cov @ v
        for axis in prior_axes:
            w -= (w @ axis) * axis
        norm = np.linalg.norm(w)
        if norm < _PCA_TOL:
            # null direction: the current orthonormal v is a valid axis
            return v, 0.0
        w /= norm
        if np.linalg.norm(w - v) < _PCA_TOL:
            v = w
            break
        v = w
    eigenvalue = float(v @ cov @ v)
    return v, eigenvalue


def _fix_sign(v: np.ndarray) -> np.ndarray:
    pivot = int(np.argmax(np.abs(v)))
    return -v if v[pivot] < 0 else v


def fit_unigrams(sentences, k: int) -> UnigramModel:
    """Top-k principal axes of the mean-centered binary presence matrix,
    extracted by power iteration with deflation.

    Axes are unit-norm, mutually orthogonal, and sign-fixed (largest
    component positive).  Directions beyond the data's rank come back with
    eigenvalue 0 and complete the basis orthonormally.
    """
    sentences = list(sentences)
    if len(sentences) < 2:
        raise InvalidConfig(f"need >= 2 training sentences, got {len(sentences)}")
    vocabulary = build_vocabulary(sentences)
    limit = min(len(vocabulary), len(sentences) - 1)
    if not 1 <= k <= limit:
        raise InvalidConfig(f"k={k} outside 1..{limit} (vocab {len(vocabulary)}, n {len(sentences)})")
    X = presence_matrix(sentences, vocabulary)
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / (len(sentences) - 1)
    if float(np.trace(cov)) <= 0.0:
        raise DegenerateMatrix("presence matrix has zero variance in every column")
    rng = np.random.default_rng(_PCA_RNG_SEED)
    axes: list[np.ndarray] = []
    eigenvalues: list[float] = []
    deflated = cov.copy()
    for _ in range(k):
        v, eigenvalue = _power_iteration(deflated, axes, rng)
        v = _fix_sign(v)
        axes.append(v)
        eigenvalues.append(eigenvalue)
        if eigenvalue > 0.0:
            deflated = deflated - eigenvalue * np.outer(v, v)
    return UnigramModel(
        vocabulary=vocabulary,
        axes=np.stack(axes),
        mean=mean,
        eigenvalues=np.asarray(eigenvalues),
    )


def project_unigrams(model: UnigramModel, sentence: Sentence) -> np.ndarray:
    """Project one sentence onto the fitted axes (out-of-vocabulary tokens
    contribute nothing)."""
    return model.axes @ (_presence_row(sentence.tokens, model.vocabulary) - model.mean)


def project_unigrams_matrix(model: UnigramModel, sentences) -> np.ndarray:
    X = presence_matrix(sentences, model.vocabulary)
    return (X - model.mean) @ model.axes.T


# --- learned sentence polarity --------------------------------------------


@dataclass(frozen=True, eq=False)
class LPModel:
    vocabulary: dict[str, int]
    model: LinearModel | None
    fallback: int = -1

    @classmethod
    def constant(cls, label: int) -> "LPModel":
        """Degenerate predictor returning ``label`` everywhere (used when
        polarity training data collapses to one class)."""
        return cls(vocabulary={}, model=None, fallback=label)


def derive_polarity_labels(sentences, lexicons: Lexicons) -> list[tuple[Sentence, int]]:
    """Weak sentence-polarity labels from lexicon counts: the sign of
    positive-minus-negative hits; balanced sentences are skipped."""
    labeled = []
    for s in sentences:
        signs = _polar_signs(s.tokens, lexicons)
        diff = sum(signs)
        if diff != 0:
            labeled.append((s, 1 if diff > 0 else -1))
    return labeled


def train_lp(labeled_sentences, config: TrainConfig | None = None) -> LPModel:
    """Fit the sentence-polarity predictor: logistic regression on binary
    unigram presence.  Propagates SingleClassTraining when the labels
    collapse."""
    labeled_sentences = list(labeled_sentences)
    sentences = [s for s, _ in labeled_sentences]
    labels = [p for _, p in labeled_sentences]
    vocabulary = build_vocabulary(sentences)
    X = presence_matrix(sentences, vocabulary)
    model = train_logreg(X, labels, config or TrainConfig(epochs=200))
    return LPModel(vocabulary=vocabulary, model=model)


def apply_lp(model: LPModel, sentence: Sentence) -> int:
    """Predicted sentence polarity; a sentence with no known words falls
    back to the sign of the bias (ties predict -1)."""
    if model.model is None:
        return model.fallback
    row = _presence_row(sentence.tokens, model.vocabulary)
    score = float(row @ model.model.weights + model.model.bias)
    return 1 if score > 0.0 else -1
