"""Synthetic corpus generator: structure, determinism, and the planted
duration/regression effects that the end-to-end checks rely on."""

import statistics

import numpy as np
import pytest

from sarcaze.corpus import load_corpus, load_lexicons
from sarcaze.errors import InvalidConfig
from sarcaze.synth import SynthConfig, generate


def _fdur_by_class(corpus):
    per = {1: [], -1: []}
    for (sid, pid), trial in corpus.trials.items():
        s = corpus.sentences[sid]
        per[s.label].append(trial.total_duration() / len(s.tokens))
    return per


class TestStructure:
    def test_counts_and_ratio(self, small_corpus):
        assert len(small_corpus.sentences) == 120
        labels = [s.label for s in small_corpus.sentences.values()]
        assert labels.count(1) == round(0.35 * 120)
        assert len(small_corpus.participants) == 3
        assert len(small_corpus.trials) == 120 * 3

    def test_every_sentence_has_all_participants(self, small_corpus):
        for sid in small_corpus.sentence_ids():
            trials = small_corpus.trials_for_sentence(sid)
            assert [t.participant_id for t in trials] == ["P1", "P2", "P3"]

    def test_word_lengths_within_bounds(self, small_corpus):
        # an inserted 3-word phrase plus its contrast word may exceed the
        # sampled base length by up to 4
        config = SynthConfig(n_sentences=120, n_participants=3, seed=7)
        for s in small_corpus.sentences.values():
            words = [t for t in s.tokens if any(c.isalpha() for c in t)]
            assert config.words_min <= len(words) <= config.words_max + 4

    def test_lexicons_cover_generated_polar_words(self, small_synth):
        lex = small_synth.lexicons
        assert len(lex.positive) == 6
        assert len(lex.negative) == 6
        assert len(lex.implicit_phrases) == 2


class TestDeterminism:
    def test_same_seed_same_corpus(self):
        a = generate(SynthConfig(n_sentences=25, n_participants=2, seed=5))
        b = generate(SynthConfig(n_sentences=25, n_participants=2, seed=5))
        assert a.corpus.content_hash() == b.corpus.content_hash()

    def test_different_seed_different_corpus(self):
        a = generate(SynthConfig(n_sentences=25, n_participants=2, seed=5))
        b = generate(SynthConfig(n_sentences=25, n_participants=2, seed=6))
        assert a.corpus.content_hash() != b.corpus.content_hash()


class TestPlantedEffect:
    def test_duration_ratio_near_target(self, small_corpus):
        per = _fdur_by_class(small_corpus)
        ratio = statistics.mean(per[1]) / statistics.mean(per[-1])
        assert 1.3 <= ratio <= 1.7

    def test_acceptance_scale_ratio_tight(self):
        result = generate(SynthConfig(seed=11))
        per = _fdur_by_class(result.corpus)
        ratio = statistics.mean(per[1]) / statistics.mean(per[-1])
        assert 1.4 <= ratio <= 1.6

    def test_regressions_more_frequent_in_sarcastic_trials(self, small_corpus):
        from sarcaze.gaze import derive_saccades

        rates = {1: [], -1: []}
        for (sid, pid), trial in small_corpus.trials.items():
            label = small_corpus.sentences[sid].label
            saccades = derive_saccades(trial)
            if saccades:
                rates[label].append(
                    sum(1 for s in saccades if s.regressive) / len(saccades)
                )
        assert statistics.mean(rates[1]) > statistics.mean(rates[-1])

    def test_null_config_plants_nothing(self):
        result = generate(
            SynthConfig(
                n_sentences=200,
                n_participants=2,
                duration_ratio=1.0,
                regression_boost=0.0,
                seed=13,
            )
        )
        per = _fdur_by_class(result.corpus)
        ratio = statistics.mean(per[1]) / statistics.mean(per[-1])
        assert 0.93 <= ratio <= 1.07


class TestSaveLoad:
    def test_round_trip_through_files(self, tmp_path):
        result = generate(SynthConfig(n_sentences=15, n_participants=2, seed=3))
        result.save_to(tmp_path)
        corpus = load_corpus(tmp_path / "sentences.csv", tmp_path / "fixations.csv")
        assert corpus.content_hash() == result.corpus.content_hash()
        lex = load_lexicons(tmp_path / "lexicons")
        assert lex.positive == result.lexicons.positive
        assert lex.implicit_phrases == result.lexicons.implicit_phrases


class TestConfigValidation:
    def test_bad_fraction_rejected(self):
        with pytest.raises(InvalidConfig):
            SynthConfig(sarcastic_fraction=1.5)

    def test_bad_word_range_rejected(self):
        with pytest.raises(InvalidConfig):
            SynthConfig(words_min=10, words_max=5)

    def test_nonpositive_counts_rejected(self):
        with pytest.raises(InvalidConfig):
            SynthConfig(n_sentences=0)
        with pytest.raises(InvalidConfig):
            SynthConfig(n_participants=0)
