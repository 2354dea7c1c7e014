"""Saccade derivation and first-order gaze features for one trial.

A saccade is the movement between two consecutive fixations on different
words; consecutive fixations on the same word contribute no saccade.  A
saccade is regressive when it lands on an earlier word than it left.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Sentence, Trial
from .errors import TrialSentenceMismatch
from .svg import SvgCanvas

SIMPLE_FEATURE_NAMES = ("FDUR", "FC", "SL", "REG", "SKIP", "RSF", "LREG")


@dataclass(frozen=True)
class Saccade:
    from_word: int
    to_word: int
    from_x: float
    to_x: float

    @property
    def regressive(self) -> bool:
        return self.to_word < self.from_word

    @property
    def direction(self) -> int:
        return 1 if self.to_word > self.from_word else -1

    @property
    def word_distance(self) -> int:
        return abs(self.to_word - self.from_word)

    @property
    def pixel_amplitude(self) -> float:
        return abs(self.to_x - self.from_x)


def derive_saccades(trial: Trial) -> list[Saccade]:
    saccades = []
    for a, b in zip(trial.fixations, trial.fixations[1:]):
        if a.word_index == b.word_index:
            continue
        saccades.append(Saccade(a.word_index, b.word_index, a.x, b.x))
    return saccades


def _check_pair(trial: Trial, sentence: Sentence):
    if trial.sentence_id != sentence.id:
        raise TrialSentenceMismatch(
            f"trial is for sentence {trial.sentence_id}, got sentence {sentence.id}"
        )


def simple_gaze_features(trial: Trial, sentence: Sentence) -> dict[str, float]:
    """First-order features of one trial, most normalized by the sentence
    length n (token count).

    FDUR  total fixation duration / n (ms per word)
    FC    fixation count / n
    SL    total saccade word distance / n
    REG   number of regressive saccades
    SKIP  fraction of words never fixated
    RSF   regressions launched from the second half of the sentence that
          land in the first half (boundary at floor(n/2))
    LREG  position of the source word of the pixel-longest regression,
          divided by n (0.0 when there is no regression; ties broken
          toward the earlier saccade)
    """
    _check_pair(trial, sentence)
    n = len(sentence.tokens)
    saccades = derive_saccades(trial)
    fixated = {f.word_index for f in trial.fixations}
    regressions = [s for s in saccades if s.regressive]

    half = n // 2
    rsf = sum(1 for s in regressions if s.from_word > half and s.to_word <= half)

    lreg = 0.0
    if regressions:
        longest = max(regressions, key=lambda s: s.pixel_amplitude)
        lreg = longest.from_word / n

    return {
        "FDUR": trial.total_duration() / n,
        "FC": len(trial.fixations) / n,
        "SL": sum(s.word_distance for s in saccades) / n,
        "REG": float(len(regressions)),
        "SKIP": (n - len(fixated)) / n,
        "RSF": float(rsf),
        "LREG": lreg,
    }


def render_scanpath_svg(trial: Trial, sentence: Sentence) -> str:
    """Draw the fixation sequence: x = recorded horizontal position,
    y = cumulative time, circle radius proportional to duration."""
    _check_pair(trial, sentence)
    width, height = 800.0, 500.0
    margin = 60.0
    xs = [f.x for f in trial.fixations]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    total = trial.total_duration()

    def sx(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(t):
        return margin + (t / total) * (height - 2 * margin)

    max_dur = max(f.duration for f in trial.fixations)
    canvas = SvgCanvas(width, height)
    canvas.text(
        width / 2,
        margin / 2,
        f"sentence {sentence.id} participant {trial.participant_id}",
        size=13.0,
        anchor="middle",
    )
    elapsed = 0.0
    points = []
    for f in trial.fixations:
        mid = elapsed + f.duration / 2.0
        points.append((sx(f.x), sy(mid), f))
        elapsed += f.duration
    for (xa, ya, fa), (xb, yb, fb) in zip(points, points[1:]):
        color = "#d62728" if fb.word_index < fa.word_index else "#888888"
        canvas.line(xa, ya, xb, yb, stroke=color, stroke_width=1.5)
    for x, y, f in points:
        canvas.circle(x, y, 4.0 + 8.0 * (f.duration / max_dur), opacity=0.75)
        canvas.text(x + 6, y - 6, str(f.word_index), size=9.0)
    return canvas.render()
