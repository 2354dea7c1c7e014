"""Gaze graph over fixated words and the second-order features read off it.

Vertices are the distinct fixated words of one trial; each saccade adds a
directed edge from its source word to its target word, accumulating counts
and word distances separately for forward and regressive movements.  Each
feature scheme assigns a weight to each out-edge; a vertex's score is the
sum of its out-edge weights, and the trial-level features are the largest
and second-largest vertex scores under that scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Sentence, Trial
from .errors import EmptyGraph, TrialSentenceMismatch
from .gaze import derive_saccades
from .svg import SvgCanvas

COMPLEX_FEATURE_NAMES = (
    "ED",
    "F1H",
    "F1S",
    "F2H",
    "F2S",
    "PSH",
    "PSS",
    "PSDH",
    "PSDS",
    "RSH",
    "RSS",
    "RSDH",
    "RSDS",
)


@dataclass
class EdgeStats:
    forward_count: int = 0
    forward_distance: int = 0
    regressive_count: int = 0
    regressive_distance: int = 0

    @property
    def total_count(self) -> int:
        return self.forward_count + self.regressive_count


@dataclass(frozen=True)
class SaliencyGraph:
    vertices: frozenset[int]
    edges: dict[tuple[int, int], EdgeStats]
    word_duration: dict[int, float]
    saccade_count: int

    def out_edges(self, vertex: int) -> list[tuple[int, EdgeStats]]:
        return [(j, stats) for (i, j), stats in self.edges.items() if i == vertex]


def build_graph(trial: Trial, sentence: Sentence) -> SaliencyGraph:
    if trial.sentence_id != sentence.id:
        raise TrialSentenceMismatch(
            f"trial is for sentence {trial.sentence_id}, got sentence {sentence.id}"
        )
    duration: dict[int, float] = {}
    for f in trial.fixations:
        duration[f.word_index] = duration.get(f.word_index, 0.0) + f.duration
    edges: dict[tuple[int, int], EdgeStats] = {}
    saccades = derive_saccades(trial)
    for s in saccades:
        stats = edges.setdefault((s.from_word, s.to_word), EdgeStats())
        if s.regressive:
            stats.regressive_count += 1
            stats.regressive_distance += s.word_distance
        else:
            stats.forward_count += 1
            stats.forward_distance += s.word_distance
    vertices = frozenset(duration)
    if not vertices:
        raise EmptyGraph(f"trial {trial.key} fixated no words")
    return SaliencyGraph(
        vertices=vertices,
        edges=edges,
        word_duration=duration,
        saccade_count=len(saccades),
    )


def _top_two(scores: dict[int, float]) -> tuple[float, float]:
    """Largest and second-largest score values (0.0 padding when the graph
    has a single vertex)."""
    ordered = sorted(scores.values(), reverse=True)
    if len(ordered) == 1:
        return ordered[0], 0.0
    return ordered[0], ordered[1]


def edge_density(graph: SaliencyGraph) -> float:
    """Distinct directed edges per vertex."""
    return len(graph.edges) / len(graph.vertices)


def complex_gaze_features(graph: SaliencyGraph) -> dict[str, float]:
    """Second-order features of one trial's gaze graph.

    ED       distinct directed edges per vertex
    F1H/F1S  top two vertex scores, each out-edge weighted by the total
             fixation duration on the source word
    F2H/F2S  same, weighted by the duration on the target word
    PSH/PSS  same, weighted by forward saccade counts
    PSDH/PSDS  forward saccade word distances
    RSH/RSS  regressive saccade counts
    RSDH/RSDS  regressive saccade word distances

    A vertex's score is the sum of its out-edge weights; vertices without
    out-edges score 0 under every scheme.
    """

    def scores(weight) -> dict[int, float]:
        out: dict[int, float] = {v: 0.0 for v in graph.vertices}
        for (i, j), stats in graph.edges.items():
            out[i] += weight(i, j, stats)
        return out

    f1h, f1s = _top_two(scores(lambda i, j, st: graph.word_duration[i]))
    f2h, f2s = _top_two(scores(lambda i, j, st: graph.word_duration[j]))
    psh, pss = _top_two(scores(lambda i, j, st: float(st.forward_count)))
    psdh, psds = _top_two(scores(lambda i, j, st: float(st.forward_distance)))
    rsh, rss = _top_two(scores(lambda i, j, st: float(st.regressive_count)))
    rsdh, rsds = _top_two(scores(lambda i, j, st: float(st.regressive_distance)))
    return {
        "ED": edge_density(graph),
        "F1H": f1h,
        "F1S": f1s,
        "F2H": f2h,
        "F2S": f2s,
        "PSH": psh,
        "PSS": pss,
        "PSDH": psdh,
        "PSDS": psds,
        "RSH": rsh,
        "RSS": rss,
        "RSDH": rsdh,
        "RSDS": rsds,
    }


def render_graph_svg(graph: SaliencyGraph, sentence: Sentence) -> str:
    """Draw the gaze graph: one node per fixated word laid out left to
    right in sentence order, forward edges arcing above the baseline and
    regressive edges below, labeled with their counts."""
    width, height = 900.0, 420.0
    margin = 70.0
    baseline = height / 2.0
    order = sorted(graph.vertices)
    n = len(order)
    step = (width - 2 * margin) / max(n - 1, 1)
    pos = {w: margin + i * step for i, w in enumerate(order)}
    max_dur = max(graph.word_duration.values())

    canvas = SvgCanvas(width, height)
    canvas.text(width / 2, 24.0, f"sentence {sentence.id}", size=13.0, anchor="middle")
    for (i, j), stats in sorted(graph.edges.items()):
        span = abs(pos[j] - pos[i])
        if stats.forward_count:
            canvas.arc(pos[i], baseline, pos[j], baseline, 30.0 + span * 0.25,
                       stroke="#1f77b4", stroke_width=1.0 + stats.forward_count)
            canvas.text((pos[i] + pos[j]) / 2, baseline - 34.0 - span * 0.25,
                        str(stats.forward_count), size=9.0, fill="#1f77b4", anchor="middle")
        if stats.regressive_count:
            canvas.arc(pos[i], baseline, pos[j], baseline, -(30.0 + span * 0.25),
                       stroke="#d62728", stroke_width=1.0 + stats.regressive_count)
            canvas.text((pos[i] + pos[j]) / 2, baseline + 44.0 + span * 0.25,
                        str(stats.regressive_count), size=9.0, fill="#d62728", anchor="middle")
    for w in order:
        r = 6.0 + 10.0 * (graph.word_duration[w] / max_dur)
        canvas.circle(pos[w], baseline, r, fill="#2ca02c", opacity=0.85)
        token = sentence.tokens[w - 1] if w - 1 < len(sentence.tokens) else str(w)
        canvas.text(pos[w], baseline + r + 14.0, token, size=10.0, anchor="middle")
    return canvas.render()
