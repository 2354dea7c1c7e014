"""Scanpath-level feature extraction, pinned against hand-computed
values and a brute-force reference."""

import numpy as np
import pytest

from sarcaze.corpus import Fixation, Sentence, Trial
from sarcaze.errors import TrialSentenceMismatch
from sarcaze.gaze import (
    SIMPLE_FEATURE_NAMES,
    derive_saccades,
    render_scanpath_svg,
    simple_gaze_features,
)

from oracles import brute_simple, random_trial


def _trial(words, durations, xs, sentence_id=1, participant="P1"):
    return Trial(
        sentence_id=sentence_id,
        participant_id=participant,
        fixations=tuple(
            Fixation(word_index=w, duration=d, x=x)
            for w, d, x in zip(words, durations, xs)
        ),
    )


def _sentence(n, sentence_id=1):
    return Sentence.from_text(sentence_id, 1, " ".join(f"w{i}" for i in range(n)))


class TestSaccades:
    def test_reference_trial(self, ref_trial):
        saccades = derive_saccades(ref_trial)
        assert [(s.from_word, s.to_word) for s in saccades] == [
            (1, 2), (2, 4), (4, 2), (2, 5),
        ]
        assert [s.regressive for s in saccades] == [False, False, True, False]
        assert [s.word_distance for s in saccades] == [1, 2, 2, 3]

    def test_refixation_produces_no_saccade(self):
        trial = _trial([2, 2, 3], [100, 120, 90], [10, 12, 30])
        saccades = derive_saccades(trial)
        assert [(s.from_word, s.to_word) for s in saccades] == [(2, 3)]

    def test_single_fixation_no_saccades(self):
        assert derive_saccades(_trial([1], [100], [5])) == []

    def test_pixel_amplitude(self):
        (s,) = derive_saccades(_trial([1, 3], [100, 100], [20, 260]))
        assert s.pixel_amplitude == pytest.approx(240.0)


class TestReferenceValues:
    """The worked example: words [1,2,4,2,5], durations
    [200,250,300,350,220], x [50,150,350,150,450], 5 tokens."""

    EXPECTED = {
        "FDUR": 264.0,
        "FC": 1.0,
        "SL": 1.6,
        "REG": 1,
        "SKIP": 0.2,
        "RSF": 1,
        "LREG": 0.8,
    }

    def test_exact(self, ref_trial, ref_sentence):
        feats = simple_gaze_features(ref_trial, ref_sentence)
        for name, expected in self.EXPECTED.items():
            assert feats[name] == expected, name

    def test_names_and_order(self, ref_trial, ref_sentence):
        feats = simple_gaze_features(ref_trial, ref_sentence)
        assert tuple(feats) == SIMPLE_FEATURE_NAMES


class TestEdgeCases:
    def test_all_words_fixated_once_left_to_right(self):
        trial = _trial([1, 2, 3], [100, 100, 100], [0, 50, 100])
        feats = simple_gaze_features(trial, _sentence(3))
        assert feats["REG"] == 0
        assert feats["SKIP"] == 0.0
        assert feats["LREG"] == 0.0

    def test_lreg_tie_keeps_earlier_regression(self):
        # two regressions with equal pixel amplitude; source words differ
        trial = _trial([3, 1, 4, 2], [100] * 4, [200, 100, 300, 200])
        feats = simple_gaze_features(trial, _sentence(4))
        assert feats["LREG"] == pytest.approx(3 / 4)

    def test_rsf_requires_crossing_the_midpoint(self):
        # regression 5 -> 4 stays in the second half: not an RSF
        trial = _trial([5, 4], [100, 100], [400, 300])
        feats = simple_gaze_features(trial, _sentence(6))
        assert feats["REG"] == 1
        assert feats["RSF"] == 0

    def test_mismatched_sentence_rejected(self, ref_trial):
        with pytest.raises(TrialSentenceMismatch):
            simple_gaze_features(ref_trial, _sentence(5, sentence_id=99))


class TestAgainstBruteForce:
    def test_200_random_trials(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            words, durations, xs, n = random_trial(rng)
            trial = _trial(words, durations, xs)
            feats = simple_gaze_features(trial, _sentence(n))
            expected = brute_simple(words, durations, xs, n)
            for name in SIMPLE_FEATURE_NAMES:
                assert feats[name] == expected[name], (name, words, n)


class TestScanpathSvg:
    def test_renders_valid_svg(self, ref_trial, ref_sentence):
        svg = render_scanpath_svg(ref_trial, ref_sentence)
        assert svg.startswith("<svg")
        assert svg.rstrip().endswith("</svg>")
        assert svg.count("<circle") == len(ref_trial.fixations)

    def test_regressive_segment_marked(self, ref_trial, ref_sentence):
        svg = render_scanpath_svg(ref_trial, ref_sentence)
        forward_only = render_scanpath_svg(
            _trial([1, 2], [100, 100], [10, 60], sentence_id=3),
            _sentence(2, sentence_id=3),
        )
        assert "#d62728" in svg
        assert "#d62728" not in forward_only
