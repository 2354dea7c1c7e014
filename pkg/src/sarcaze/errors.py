"""Exception hierarchy shared across the package.

Three families map onto the CLI exit codes: usage errors (exit 1), data
errors (exit 2), and numeric failures (exit 3).
"""


class SarcazeError(Exception):
    """Base class for every error raised by this package."""


class UsageError(SarcazeError):
    """Bad invocation: missing flags, inconsistent options, bad parameters."""


class DataError(SarcazeError):
    """Malformed or internally inconsistent input data."""


class NumericError(SarcazeError):
    """Numeric failure during fitting or evaluation."""


# --- corpus ---------------------------------------------------------------

class MalformedRow(DataError):
    """A CSV row violates the documented column layout or field domains."""


class DuplicateId(DataError):
    """Two sentences share the same id."""


class NonMonotoneIndex(DataError):
    """fixation_index not strictly increasing within a trial."""


class NonPositiveDuration(DataError):
    """A fixation duration is zero or negative."""


class EmptyTrial(DataError):
    """A trial carries no fixations."""


class DanglingSentenceRef(DataError):
    """A trial references a sentence id that does not exist."""


class WordIndexOutOfRange(DataError):
    """A fixation points past the end of its sentence."""


class DuplicateTrial(DataError):
    """Two trials share the same (sentence_id, participant_id) key."""


class LexiconMissing(DataError):
    """A required lexicon file or argument is absent."""


class LexiconOverlap(DataError):
    """A word appears in both the positive and the negative lexicon."""


# --- gaze / saliency ------------------------------------------------------

class TrialSentenceMismatch(DataError):
    """Trial and sentence passed together do not belong to each other."""


class EmptyGraph(DataError):
    """Saliency-graph operation invoked on a graph with no vertices."""


# --- textfeat -------------------------------------------------------------

class NoWords(DataError):
    """Readability requested for a sentence without alphabetic tokens."""


class DegenerateMatrix(NumericError):
    """Zero-variance input where principal axes are undefined."""


# --- dataset --------------------------------------------------------------

class MissingTrials(DataError):
    """A sentence has no recorded trial in a mode that requires one."""

    def __init__(self, sentence_id):
        super().__init__(f"sentence {sentence_id} has no trials")
        self.sentence_id = sentence_id


# --- learn ----------------------------------------------------------------

class SingleClassTraining(DataError):
    """Training data contains only one class."""


class Diverged(NumericError):
    """Optimization loss increased over too many consecutive epochs."""


# --- stats ----------------------------------------------------------------

class DomainError(NumericError):
    """Special-function argument outside its mathematical domain."""


class ConvergenceError(NumericError):
    """A series or continued fraction failed to converge."""


class InsufficientData(DataError):
    """Too few observations for the requested statistic."""


class ZeroVariance(NumericError):
    """A statistic is undefined because all variance terms vanish."""


class LengthMismatch(DataError):
    """Paired sequences have different lengths."""


class DegenerateLabels(DataError):
    """Feature ranking requires at least two distinct labels."""


class TooFewPerClass(DataError):
    """A class has fewer members than the requested fold count."""


# --- eval / synth ---------------------------------------------------------

class FoldMismatch(UsageError):
    """Compared runs do not share the same fold assignment."""


class InvalidConfig(UsageError):
    """A configuration object violates its own invariants."""
