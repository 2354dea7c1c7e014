"""Sentence corpus, per-participant fixation logs, and lexicon files.

Defines the on-disk CSV/text formats, the parsed domain types, and the
referential-integrity validation that assembles a :class:`Corpus`.

File formats (UTF-8, comma separated, double-quote escaping):

* ``sentences.csv`` -- header ``sentence_id,label,text`` (optionally plus
  ``aspect``); label is 1 or -1.
* ``fixations.csv`` -- header ``sentence_id,participant_id,fixation_index,
  word_index,duration_ms,x_px``; ``fixation_index`` strictly increasing
  within each (sentence, participant) group.
* ``positive.txt`` / ``negative.txt`` -- one word per line.
* ``implicit_phrases.tsv`` -- ``phrase<TAB>polarity`` with polarity 1 or -1.

All parsed types are immutable after construction and safe to share
read-only across concurrent workers.
"""

from __future__ import annotations

import csv
import hashlib
import io
import string
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DanglingSentenceRef,
    DuplicateId,
    DuplicateTrial,
    EmptyTrial,
    LexiconMissing,
    LexiconOverlap,
    MalformedRow,
    NonMonotoneIndex,
    NonPositiveDuration,
    WordIndexOutOfRange,
)

PUNCTUATION = frozenset(string.punctuation)

SENTENCE_HEADER = ("sentence_id", "label", "text")
FIXATION_HEADER = (
    "sentence_id",
    "participant_id",
    "fixation_index",
    "word_index",
    "duration_ms",
    "x_px",
)

MAX_TOKENS = 200


def tokenize(text: str) -> list[str]:
    """Split ``text`` on whitespace, peeling leading/trailing punctuation
    marks off each chunk into their own tokens.

    Interior punctuation stays attached (``don't`` is one token), and a
    chunk made of punctuation only yields one token per mark.  The split is
    deterministic so fixation word indices align reproducibly.
    """
    tokens: list[str] = []
    for chunk in text.split():
        lead: list[str] = []
        while chunk and chunk[0] in PUNCTUATION:
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail: list[str] = []
        while chunk and chunk[-1] in PUNCTUATION:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trail))
    return tokens


@dataclass(frozen=True)
class Sentence:
    """One labeled sentence; tokens are 1-based for fixation indexing."""

    id: int
    text: str
    tokens: tuple[str, ...]
    label: int
    aspect: str | None = None

    def __post_init__(self):
        if not 1 <= len(self.tokens) <= MAX_TOKENS:
            raise MalformedRow(
                f"sentence {self.id}: token count {len(self.tokens)} outside 1..{MAX_TOKENS}"
            )
        if self.label not in (1, -1):
            raise MalformedRow(f"sentence {self.id}: label {self.label!r} not in {{1, -1}}")
        if tuple(tokenize(self.text)) != self.tokens:
            raise MalformedRow(f"sentence {self.id}: tokens do not re-tokenize from text")

    @classmethod
    def from_text(cls, id: int, label: int, text: str, aspect: str | None = None) -> "Sentence":
        return cls(id=id, text=text, tokens=tuple(tokenize(text)), label=label, aspect=aspect)


@dataclass(frozen=True)
class Fixation:
    """A single fixation, already mapped to a 1-based word index upstream."""

    word_index: int
    duration: float
    x: float

    def __post_init__(self):
        if not isinstance(self.word_index, int) or self.word_index < 1:
            raise MalformedRow(f"word_index {self.word_index!r} must be an integer >= 1")
        if not self.duration > 0:
            raise NonPositiveDuration(f"duration {self.duration!r} must be > 0")
        if self.x < 0:
            raise MalformedRow(f"x {self.x!r} must be non-negative")


@dataclass(frozen=True)
class Trial:
    """One participant's fixation sequence over one sentence, in the
    recorded temporal order.  The module never re-sorts fixations."""

    sentence_id: int
    participant_id: str
    fixations: tuple[Fixation, ...]

    def __post_init__(self):
        if not self.fixations:
            raise EmptyTrial(
                f"trial ({self.sentence_id}, {self.participant_id}) has no fixations"
            )

    @property
    def key(self) -> tuple[int, str]:
        return (self.sentence_id, self.participant_id)

    def total_duration(self) -> float:
        return sum(f.duration for f in self.fixations)


@dataclass(frozen=True)
class CorpusReport:
    """Validation summary produced alongside an assembled corpus."""

    n_sentences: int
    n_trials: int
    n_fixations: int
    participants: tuple[str, ...]
    sentences_per_class: dict[int, int]
    trials_per_participant: dict[str, int]

    @property
    def class_ratio(self) -> str:
        return f"{self.sentences_per_class.get(1, 0)}:{self.sentences_per_class.get(-1, 0)}"

    def to_dict(self) -> dict:
        return {
            "n_sentences": self.n_sentences,
            "n_trials": self.n_trials,
            "n_fixations": self.n_fixations,
            "participants": list(self.participants),
            "sentences_per_class": {str(k): v for k, v in sorted(self.sentences_per_class.items())},
            "trials_per_participant": dict(sorted(self.trials_per_participant.items())),
            "class_ratio": self.class_ratio,
        }


@dataclass(frozen=True)
class Corpus:
    """Validated sentences + trials with referential integrity enforced."""

    sentences: dict[int, Sentence]
    trials: dict[tuple[int, str], Trial]
    participants: tuple[str, ...]
    report: CorpusReport

    def sentence_ids(self) -> list[int]:
        return sorted(self.sentences)

    def trials_for_sentence(self, sentence_id: int) -> list[Trial]:
        """All trials over one sentence, ordered by participant id."""
        return [
            self.trials[(sentence_id, p)]
            for p in self.participants
            if (sentence_id, p) in self.trials
        ]

    def content_hash(self) -> str:
        """Hash of the canonical CSV serialization; pins report identity."""
        h = hashlib.sha256()
        h.update(write_sentences_csv(self.sentences.values()))
        h.update(write_fixations_csv(self.trials.values()))
        return h.hexdigest()


def parse_sentences(data: bytes | str) -> list[Sentence]:
    """Parse ``sentences.csv`` content into a list of sentences.

    Row order is preserved; tokens come from :func:`tokenize`.
    """
    rows = _read_csv(data)
    if not rows:
        raise MalformedRow("empty sentences file")
    header = tuple(rows[0])
    if header == SENTENCE_HEADER:
        has_aspect = False
    elif header == SENTENCE_HEADER + ("aspect",):
        has_aspect = True
    else:
        raise MalformedRow(f"bad sentences header {header!r}")
    seen: set[int] = set()
    sentences: list[Sentence] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise MalformedRow(f"line {lineno}: expected {len(header)} columns, got {len(row)}")
        try:
            sid = int(row[0])
        except ValueError:
            raise MalformedRow(f"line {lineno}: sentence_id {row[0]!r} is not an integer") from None
        try:
            label = int(row[1])
        except ValueError:
            raise MalformedRow(f"line {lineno}: label {row[1]!r} is not an integer") from None
        if label not in (1, -1):
            raise MalformedRow(f"line {lineno}: label {label} not in {{1, -1}}")
        if sid in seen:
            raise DuplicateId(f"line {lineno}: duplicate sentence id {sid}")
        seen.add(sid)
        aspect = row[3] if has_aspect and row[3] else None
        sentences.append(Sentence.from_text(sid, label, row[2], aspect))
    return sentences


def parse_trials(data: bytes | str) -> list[Trial]:
    """Parse ``fixations.csv`` content, grouping rows into trials.

    Groups are keyed by (sentence_id, participant_id); within each group
    ``fixation_index`` must be strictly increasing.  Trials come back in
    first-appearance order.
    """
    rows = _read_csv(data)
    if not rows:
        raise MalformedRow("empty fixations file")
    if tuple(rows[0]) != FIXATION_HEADER:
        raise MalformedRow(f"bad fixations header {tuple(rows[0])!r}")
    groups: dict[tuple[int, str], list[Fixation]] = {}
    last_index: dict[tuple[int, str], int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(FIXATION_HEADER):
            raise MalformedRow(f"line {lineno}: expected {len(FIXATION_HEADER)} columns")
        try:
            sid = int(row[0])
            fix_index = int(row[2])
            word_index = int(row[3])
            duration = float(row[4])
            x = float(row[5])
        except ValueError:
            raise MalformedRow(f"line {lineno}: non-numeric field in {row!r}") from None
        participant = row[1]
        if not participant:
            raise MalformedRow(f"line {lineno}: empty participant_id")
        if duration <= 0:
            raise NonPositiveDuration(f"line {lineno}: duration_ms {duration} must be > 0")
        key = (sid, participant)
        if key in last_index and fix_index <= last_index[key]:
            raise NonMonotoneIndex(
                f"line {lineno}: fixation_index {fix_index} not increasing for {key}"
            )
        last_index[key] = fix_index
        if word_index < 1:
            raise MalformedRow(f"line {lineno}: word_index {word_index} must be >= 1")
        if x < 0:
            raise MalformedRow(f"line {lineno}: x_px {x} must be non-negative")
        groups.setdefault(key, []).append(Fixation(word_index, duration, x))
    return [
        Trial(sentence_id=sid, participant_id=pid, fixations=tuple(fixs))
        for (sid, pid), fixs in groups.items()
    ]


def validate_corpus(sentences: list[Sentence], trials: list[Trial]) -> Corpus:
    """Assemble a corpus, enforcing referential integrity.

    Rejects trials referencing unknown sentences, duplicate trial keys, and
    fixations whose word index exceeds the sentence's token count.
    """
    by_id: dict[int, Sentence] = {}
    for s in sentences:
        if s.id in by_id:
            raise DuplicateId(f"duplicate sentence id {s.id}")
        by_id[s.id] = s
    trial_map: dict[tuple[int, str], Trial] = {}
    for t in trials:
        if t.sentence_id not in by_id:
            raise DanglingSentenceRef(f"trial {t.key} references unknown sentence {t.sentence_id}")
        if t.key in trial_map:
            raise DuplicateTrial(f"duplicate trial {t.key}")
        n = len(by_id[t.sentence_id].tokens)
        for f in t.fixations:
            if f.word_index > n:
                raise WordIndexOutOfRange(
                    f"trial {t.key}: word_index {f.word_index} > token count {n}"
                )
        trial_map[t.key] = t
    participants = tuple(sorted({t.participant_id for t in trial_map.values()}))
    per_class: dict[int, int] = {1: 0, -1: 0}
    for s in by_id.values():
        per_class[s.label] += 1
    per_participant = {p: 0 for p in participants}
    for t in trial_map.values():
        per_participant[t.participant_id] += 1
    report = CorpusReport(
        n_sentences=len(by_id),
        n_trials=len(trial_map),
        n_fixations=sum(len(t.fixations) for t in trial_map.values()),
        participants=participants,
        sentences_per_class=per_class,
        trials_per_participant=per_participant,
    )
    return Corpus(sentences=by_id, trials=trial_map, participants=participants, report=report)


def load_corpus(sentences_path: str | Path, fixations_path: str | Path | None = None) -> Corpus:
    sentences = parse_sentences(Path(sentences_path).read_bytes())
    trials: list[Trial] = []
    if fixations_path is not None:
        trials = parse_trials(Path(fixations_path).read_bytes())
    return validate_corpus(sentences, trials)


def write_sentences_csv(sentences) -> bytes:
    """Serialize sentences back to the canonical CSV format."""
    sentences = list(sentences)
    buf = io.StringIO()
    has_aspect = any(s.aspect is not None for s in sentences)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SENTENCE_HEADER + (("aspect",) if has_aspect else ()))
    for s in sentences:
        row = [str(s.id), str(s.label), s.text]
        if has_aspect:
            row.append(s.aspect or "")
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def write_fixations_csv(trials) -> bytes:
    """Serialize trials back to the canonical CSV format.

    ``fixation_index`` is re-emitted as 1..n per trial; the original input
    indices are not retained (only their order matters).
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FIXATION_HEADER)
    for t in trials:
        for i, f in enumerate(t.fixations, start=1):
            writer.writerow(
                [
                    str(t.sentence_id),
                    t.participant_id,
                    str(i),
                    str(f.word_index),
                    repr(float(f.duration)),
                    repr(float(f.x)),
                ]
            )
    return buf.getvalue().encode("utf-8")


# --- lexicons -------------------------------------------------------------


@dataclass(frozen=True)
class Lexicons:
    """Sentiment word lists plus the implicit-incongruity phrase list."""

    positive: frozenset[str]
    negative: frozenset[str]
    implicit_phrases: tuple[tuple[tuple[str, ...], int], ...] = ()

    def __post_init__(self):
        overlap = self.positive & self.negative
        if overlap:
            raise LexiconOverlap(f"words in both lexicons: {sorted(overlap)[:5]}")

    @classmethod
    def build(cls, positive, negative, phrases=()) -> "Lexicons":
        """Convenience constructor from iterables; phrases are
        (phrase string, polarity) pairs."""
        return cls(
            positive=frozenset(w.lower() for w in positive),
            negative=frozenset(w.lower() for w in negative),
            implicit_phrases=tuple(
                (tuple(tokenize(p.lower())), int(pol)) for p, pol in phrases
            ),
        )

    def polarity(self, token: str) -> int:
        t = token.lower()
        if t in self.positive:
            return 1
        if t in self.negative:
            return -1
        return 0


def parse_word_list(data: bytes | str) -> frozenset[str]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


def parse_implicit_phrases(data: bytes | str) -> tuple[tuple[tuple[str, ...], int], ...]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    phrases = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise MalformedRow(f"implicit_phrases line {lineno}: expected phrase<TAB>polarity")
        try:
            pol = int(parts[1])
        except ValueError:
            raise MalformedRow(f"implicit_phrases line {lineno}: bad polarity {parts[1]!r}") from None
        if pol not in (1, -1):
            raise MalformedRow(f"implicit_phrases line {lineno}: polarity {pol} not in {{1, -1}}")
        tokens = tuple(tokenize(parts[0].lower()))
        if not tokens:
            raise MalformedRow(f"implicit_phrases line {lineno}: empty phrase")
        phrases.append((tokens, pol))
    return tuple(phrases)


def load_lexicons(directory: str | Path) -> Lexicons:
    """Load ``positive.txt``, ``negative.txt`` and ``implicit_phrases.tsv``
    from a directory.  The phrase file is optional; the word lists are not."""
    directory = Path(directory)
    pos_path = directory / "positive.txt"
    neg_path = directory / "negative.txt"
    if not pos_path.is_file() or not neg_path.is_file():
        raise LexiconMissing(f"positive.txt / negative.txt not found under {directory}")
    phrases_path = directory / "implicit_phrases.tsv"
    phrases = parse_implicit_phrases(phrases_path.read_bytes()) if phrases_path.is_file() else ()
    return Lexicons(
        positive=parse_word_list(pos_path.read_bytes()),
        negative=parse_word_list(neg_path.read_bytes()),
        implicit_phrases=phrases,
    )


def _read_csv(data: bytes | str) -> list[list[str]]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    return list(csv.reader(io.StringIO(text)))
