"""Shared fixtures: the hand-computed reference trial, a miniature
lexicon set, and one session-scoped synthetic corpus reused by the
slower end-to-end tests."""

import pytest

from sarcaze.corpus import Fixation, Lexicons, Sentence, Trial
from sarcaze.synth import SynthConfig, generate


@pytest.fixture
def ref_sentence() -> Sentence:
    return Sentence.from_text(7, 1, "ah what a lovely day")


@pytest.fixture
def ref_trial(ref_sentence) -> Trial:
    """Five fixations over a five-word sentence, with one regression
    (word 4 -> 2) and one skip (word 3 never fixated)."""
    words = [1, 2, 4, 2, 5]
    durations = [200.0, 250.0, 300.0, 350.0, 220.0]
    xs = [50.0, 150.0, 350.0, 150.0, 450.0]
    fixations = tuple(
        Fixation(word_index=w, duration=d, x=x)
        for w, d, x in zip(words, durations, xs)
    )
    return Trial(sentence_id=ref_sentence.id, participant_id="P1", fixations=fixations)


@pytest.fixture
def mini_lexicons() -> Lexicons:
    return Lexicons.build(
        positive=["lovely", "great", "happy", "joy"],
        negative=["awful", "terrible", "sad", "broken"],
        phrases=[("oh the joy", 1), ("what a lovely", 1)],
    )


@pytest.fixture(scope="session")
def small_synth():
    """120 sentences x 3 participants; big enough for 5-fold runs,
    small enough to keep the suite quick."""
    return generate(SynthConfig(n_sentences=120, n_participants=3, seed=7))


@pytest.fixture(scope="session")
def small_corpus(small_synth):
    return small_synth.corpus


@pytest.fixture(scope="session")
def small_lexicons(small_synth):
    return small_synth.lexicons
