"""Acceptance gate.

One test per release criterion, each at its stated tolerance, so the
verbose run prints one pass/fail line for each.  Every check here is
against an independent oracle (brute-force loops, mpmath series, hand
computation) or a hard behavioral bound; nothing is tuned to the
implementation under test.
"""

import os
import time
from pathlib import Path

import mpmath
import numpy as np
import pytest

from sarcaze.corpus import (
    Fixation,
    Lexicons,
    Sentence,
    Trial,
    load_corpus,
    load_lexicons,
    validate_corpus,
)
from sarcaze.eval import (
    ClassifierSpec,
    default_classifier_spec,
    run_comparison,
    run_crossval,
    run_rank,
    run_ttest_table,
)
from sarcaze.gaze import SIMPLE_FEATURE_NAMES, simple_gaze_features
from sarcaze.learn import (
    MLPModel,
    TrainConfig,
    logistic_gradient,
    logistic_objective,
    milr_gradient,
    milr_objective,
    mlp_gradient,
    mlp_objective,
    model_to_dict,
    predict_bag,
    predict_mlp,
    train_gnb,
    train_logreg,
    train_milr,
    train_mlp,
    train_svm,
)
from sarcaze.saliency import COMPLEX_FEATURE_NAMES, build_graph, complex_gaze_features
from sarcaze.stats import (
    classification_metrics,
    mcnemar,
    reg_incomplete_beta,
    reg_incomplete_gamma,
    stratified_kfold,
    welch_ttest,
)
from sarcaze.synth import SynthConfig, generate

from oracles import brute_complex, brute_simple, random_trial

mpmath.mp.dps = 40

GRAD_TOL = 1e-5


def _trial(words, durations, xs=None, sentence_id=1, participant="P1"):
    xs = xs if xs is not None else [float(40 * w) for w in words]
    fixations = tuple(
        Fixation(word_index=w, duration=float(d), x=float(x))
        for w, d, x in zip(words, durations, xs)
    )
    return Trial(sentence_id=sentence_id, participant_id=participant, fixations=fixations)


def _sentence(n_words, sentence_id=1):
    return Sentence.from_text(sentence_id, 1, " ".join(f"w{i}" for i in range(n_words)))


def _rel_err(analytic, numeric):
    denom = max(np.abs(analytic).max(), np.abs(numeric).max(), 1e-8)
    return np.abs(np.asarray(analytic) - np.asarray(numeric)).max() / denom


# --- criterion 1: feature extraction equals brute force -------------------


def test_criterion_1_brute_force_parity_500_trials():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    for _ in range(500):
        words, durations, xs, n_tokens = random_trial(rng, max_words=6, max_fix=10)
        trial = _trial(words, durations, xs)
        sentence = _sentence(n_tokens)
        simple = simple_gaze_features(trial, sentence)
        expected_simple = brute_simple(words, durations, xs, n_tokens)
        for name in SIMPLE_FEATURE_NAMES:
            assert simple[name] == expected_simple[name], (name, words, n_tokens)
        graph = build_graph(trial, sentence)
        complex_ = complex_gaze_features(graph)
        expected_complex = brute_complex(words, durations)
        for name in COMPLEX_FEATURE_NAMES:
            assert complex_[name] == expected_complex[name], (name, words, n_tokens)
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"500 trials took {elapsed:.2f}s (budget 10s)"


# --- criterion 2: the worked reference trial, exact -----------------------


def test_criterion_2_reference_trial_exact(ref_trial, ref_sentence):
    expected = {
        "FDUR": 264.0,
        "FC": 1.0,
        "SL": 1.6,
        "REG": 1,
        "SKIP": 0.2,
        "RSF": 1,
        "LREG": 0.8,
        "ED": 1.0,
        "F1H": 1200.0,
        "F1S": 300.0,
        "PSH": 2.0,
        "PSS": 1.0,
        "PSDH": 5.0,
        "PSDS": 1.0,
        "RSH": 1.0,
        "RSS": 0.0,
        "RSDH": 2.0,
        "RSDS": 0.0,
    }
    actual = dict(simple_gaze_features(ref_trial, ref_sentence))
    actual.update(complex_gaze_features(build_graph(ref_trial, ref_sentence)))
    for name, value in expected.items():
        assert actual[name] == value, name


# --- criterion 3: statistical kernel --------------------------------------


def test_criterion_3_statistical_kernel():
    # Welch t on samples moment-matched to the reference row
    n_a, n_b = 334, 660
    rng = np.random.default_rng(12)
    a = rng.standard_normal(n_a)
    a = (a - a.mean()) / a.std(ddof=1) * 142.0 + 383.0
    b = rng.standard_normal(n_b)
    b = (b - b.mean()) / b.std(ddof=1) * 130.0 + 253.0
    assert welch_ttest(a, b).t == pytest.approx(14.1, abs=0.2)

    # kappa on the 40/10/20/30 confusion table
    gold = [1] * 50 + [-1] * 50
    pred = [1] * 40 + [-1] * 10 + [1] * 20 + [-1] * 30
    assert classification_metrics(pred, gold).kappa == pytest.approx(0.4, abs=1e-9)

    # McNemar with 25 vs 10 discordant pairs
    gold = [1] * 100
    pred_a = [-1] * 25 + [1] * 75
    pred_b = [1] * 25 + [-1] * 10 + [1] * 65
    r = mcnemar(pred_a, pred_b, gold)
    assert (r.b, r.c) == (25, 10)
    assert r.chi2 == pytest.approx(5.6, abs=1e-9)
    assert r.p == pytest.approx(0.018, abs=0.002)

    # special functions against mpmath series evaluation
    for a_ in (0.5, 1.0, 2.5, 7.0):
        for b_ in (0.5, 1.0, 3.0, 9.5):
            for x in (0.01, 0.3, 0.5, 0.9, 0.99):
                expected = float(mpmath.betainc(a_, b_, 0, x, regularized=True))
                assert reg_incomplete_beta(a_, b_, x) == pytest.approx(
                    expected, abs=1e-10
                ), (a_, b_, x)
    for s in (0.5, 1.0, 3.5, 10.0):
        for x in (0.1, 1.0, 5.0, 20.0):
            expected = float(mpmath.gammainc(s, 0, x, regularized=True))
            assert reg_incomplete_gamma(s, x) == pytest.approx(
                expected, abs=1e-10
            ), (s, x)


# --- criterion 4: trainer numerics ----------------------------------------


def _blobs(seed, n=40, d=4, sep=2.0):
    rng = np.random.default_rng(seed)
    half = n // 2
    X = np.vstack([
        rng.normal(+sep / 2, 1.0, size=(half, d)),
        rng.normal(-sep / 2, 1.0, size=(n - half, d)),
    ])
    y = np.asarray([1] * half + [-1] * (n - half))
    return X, y


def _planted_bags(seed, n_bags=40, instances=5, d=6):
    rng = np.random.default_rng(seed)
    bags, labels = [], []
    for i in range(n_bags):
        label = 1 if i % 2 == 0 else -1
        X = rng.normal(-1.0, 0.7, size=(instances, d))
        if label == 1:
            planted = rng.integers(1, instances + 1)
            X[:planted] = rng.normal(+1.5, 0.7, size=(planted, d))
        bags.append(X)
        labels.append(label)
    return bags, labels


def test_criterion_4_trainer_numerics():
    eps = 1e-6

    # logistic gradient vs central differences
    X, y = _blobs(seed=1, n=30, d=5, sep=1.0)
    rng = np.random.default_rng(2)
    w, b, l2 = rng.normal(0, 0.5, 5), 0.3, 0.01
    grad_w, grad_b = logistic_gradient(w, b, X, y, l2)
    num_w = np.zeros_like(w)
    for j in range(5):
        wp, wm = w.copy(), w.copy()
        wp[j] += eps
        wm[j] -= eps
        num_w[j] = (
            logistic_objective(wp, b, X, y, l2) - logistic_objective(wm, b, X, y, l2)
        ) / (2 * eps)
    num_b = (
        logistic_objective(w, b + eps, X, y, l2)
        - logistic_objective(w, b - eps, X, y, l2)
    ) / (2 * eps)
    assert _rel_err(grad_w, num_w) < GRAD_TOL
    assert abs(grad_b - num_b) / max(abs(num_b), 1e-8) < GRAD_TOL

    # MLP gradients vs central differences
    rng = np.random.default_rng(15)
    Xm = rng.normal(size=(12, 3))
    ym = np.asarray([1, -1] * 6)
    model = MLPModel(
        w1=rng.normal(0, 0.5, size=(3, 4)),
        b1=rng.normal(0, 0.1, size=4),
        w2=rng.normal(0, 0.5, size=4),
        b2=0.1,
    )
    dw1, db1, dw2, db2 = mlp_gradient(model, Xm, ym)

    def mlp_obj(w1, b1, w2, b2):
        return mlp_objective(MLPModel(w1=w1, b1=b1, w2=w2, b2=b2), Xm, ym)

    num_dw1 = np.zeros_like(model.w1)
    for i in range(3):
        for j in range(4):
            wp, wm = model.w1.copy(), model.w1.copy()
            wp[i, j] += eps
            wm[i, j] -= eps
            num_dw1[i, j] = (
                mlp_obj(wp, model.b1, model.w2, model.b2)
                - mlp_obj(wm, model.b1, model.w2, model.b2)
            ) / (2 * eps)
    assert _rel_err(dw1, num_dw1) < GRAD_TOL
    num_db2 = (
        mlp_obj(model.w1, model.b1, model.w2, model.b2 + eps)
        - mlp_obj(model.w1, model.b1, model.w2, model.b2 - eps)
    ) / (2 * eps)
    assert abs(db2 - num_db2) / max(abs(num_db2), 1e-8) < GRAD_TOL

    # MILR gradient vs central differences (noisy-or combine)
    bags, labels = _planted_bags(seed=17, n_bags=8, instances=3, d=4)
    rng = np.random.default_rng(18)
    w, b, l2 = rng.normal(0, 0.5, 4), 0.2, 0.01
    grad_w, grad_b = milr_gradient(w, b, bags, labels, l2, "noisy-or")
    num_w = np.zeros_like(w)
    for j in range(4):
        wp, wm = w.copy(), w.copy()
        wp[j] += eps
        wm[j] -= eps
        num_w[j] = (
            milr_objective(wp, b, bags, labels, l2, "noisy-or")
            - milr_objective(wm, b, bags, labels, l2, "noisy-or")
        ) / (2 * eps)
    assert _rel_err(grad_w, num_w) < GRAD_TOL

    # every trainer is bit-deterministic
    X, y = _blobs(seed=5)
    for fit in (
        lambda: train_logreg(X, y, TrainConfig(epochs=50, seed=3)),
        lambda: train_svm(X, y, TrainConfig(epochs=50, seed=3)),
        lambda: train_mlp(X, y, TrainConfig(epochs=50, seed=3)),
        lambda: train_gnb(X, y),
        lambda: train_milr(bags, labels, TrainConfig(epochs=50, seed=3)),
    ):
        assert model_to_dict(fit()) == model_to_dict(fit())

    # MILR recovers planted bags
    big_bags, big_labels = _planted_bags(seed=21)
    milr = train_milr(big_bags, big_labels, TrainConfig(epochs=400))
    preds = [predict_bag(milr, bag) for bag in big_bags]
    assert np.mean(np.asarray(preds) == np.asarray(big_labels)) >= 0.9

    # MLP solves XOR for at least one of three seeds
    Xx = np.asarray([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    yx = np.asarray([-1, 1, 1, -1])
    solved = 0
    for seed in (1, 2, 3):
        m = train_mlp(
            Xx, yx, TrainConfig(learning_rate=2.0, epochs=3000, seed=seed, hidden_units=4)
        )
        if np.array_equal([predict_mlp(m, x) for x in Xx], yx):
            solved += 1
    assert solved >= 1


# --- criterion 5: the synthetic end-to-end run ----------------------------


@pytest.fixture(scope="module")
def acceptance_synth():
    return generate(
        SynthConfig(
            n_sentences=1000,
            sarcastic_fraction=0.35,
            n_participants=7,
            duration_ratio=1.5,
            seed=11,
        )
    )


def test_criterion_5_synthetic_end_to_end(acceptance_synth):
    start = time.perf_counter()
    corpus = acceptance_synth.corpus
    lexicons = acceptance_synth.lexicons
    assert corpus.report.class_ratio == "350:650"

    # (a) slower reading of sarcastic sentences for every participant
    table = run_ttest_table(corpus, alpha=0.05)
    assert len(table.rows) == 7
    assert table.all_significant()

    # (b) 10-fold MILR: gaze+sarcasm reaches 0.80 and beats unigram-only
    spec = default_classifier_spec("milr", seed=11)
    report = run_comparison(
        corpus, lexicons,
        [("gaze+sarcasm", spec), ("unigram", spec)],
        k=10, seed=11,
    )
    full, unigram_only = report.runs
    assert full.pooled.weighted_f >= 0.80, full.pooled.weighted_f
    assert full.pooled.weighted_f > unigram_only.pooled.weighted_f

    # (c) the improvement is significant under McNemar
    (_, _, mcnemar_result) = report.pairs[0]
    assert mcnemar_result.p < 0.05, mcnemar_result.p

    # (d) gaze features dominate the ranking
    ranking = run_rank(corpus, lexicons, "gaze+sarcasm", method="chi_squared")
    assert ranking.gaze_in_top(10) >= 5, ranking.ranking.items[:10]

    elapsed = time.perf_counter() - start
    assert elapsed < 300.0, f"end-to-end run took {elapsed:.1f}s (budget 300s)"


# --- criterion 6: no test-fold information reaches fitted artifacts -------


def _permute_fold_labels(corpus, folds, fold, seed=123):
    ids = corpus.sentence_ids()
    test_ids = [sid for sid, f in zip(ids, folds) if f == fold]
    labels = [corpus.sentences[sid].label for sid in test_ids]
    rng = np.random.default_rng(seed)
    shuffled = [labels[i] for i in rng.permutation(len(labels))]
    assert shuffled != labels, "pick a seed that actually moves a label"
    replacement = dict(zip(test_ids, shuffled))
    sentences = [
        Sentence.from_text(s.id, replacement.get(s.id, s.label), s.text, s.aspect)
        for s in (corpus.sentences[sid] for sid in ids)
    ]
    return validate_corpus(sentences, list(corpus.trials.values()))


def test_criterion_6_leakage_audit(small_corpus, small_lexicons):
    """Permuting the labels of a fold's test sentences must leave that
    fold's fitted-artifact hash bit-identical, for every feature
    configuration and every classifier family."""
    fast = TrainConfig(epochs=60, seed=0)
    runs = [
        ("unigram", ClassifierSpec(kind="logreg", train=fast)),
        ("sarcasm", ClassifierSpec(kind="gnb", train=fast)),
        ("gaze", ClassifierSpec(kind="svm", train=fast)),
        ("reading-time", ClassifierSpec(kind="mlp", train=fast)),
        ("gaze+sarcasm", ClassifierSpec(kind="milr", train=fast)),
    ]
    ids = small_corpus.sentence_ids()
    labels = np.asarray([small_corpus.sentences[i].label for i in ids])
    folds = stratified_kfold(labels, 5, seed=6)
    permuted_corpus = _permute_fold_labels(small_corpus, folds, fold=0)
    for config, spec in runs:
        baseline = run_crossval(
            small_corpus, small_lexicons, config, spec,
            k=5, seed=6, unigram_k=8, fold_assignment=folds,
        )
        permuted = run_crossval(
            permuted_corpus, small_lexicons, config, spec,
            k=5, seed=6, unigram_k=8, fold_assignment=folds,
        )
        assert permuted.artifact_hashes[0] == baseline.artifact_hashes[0], (
            config, spec.kind,
        )


# --- criterion 7 (optional): replication on a real recorded dataset ------


def test_criterion_7_real_dataset_replication():
    """Only meaningful when a real eye-tracking corpus is available; the
    expected layout is a directory with sentences.csv, fixations.csv and
    a lexicons/ subdirectory, named by SARCAZE_REAL_DATASET."""
    root = os.environ.get("SARCAZE_REAL_DATASET", "")
    if not root or not Path(root).is_dir():
        pytest.skip(
            "real dataset not present (set SARCAZE_REAL_DATASET to a directory "
            "with sentences.csv, fixations.csv, lexicons/); criterion reported "
            "as not evaluated"
        )
    root = Path(root)
    corpus = load_corpus(root / "sentences.csv", root / "fixations.csv")
    lexicons = load_lexicons(root / "lexicons")
    spec = default_classifier_spec("milr", seed=0)
    report = run_crossval(corpus, lexicons, "gaze+sarcasm", spec, k=10, seed=0)
    f_pct = report.pooled.weighted_f * 100.0
    kappa = report.pooled.kappa
    if abs(f_pct - 75.7) > 3.0 or abs(kappa - 0.47) > 0.06:
        pytest.xfail(
            f"replication off target: weighted F {f_pct:.1f} (want 75.7 +/- 3.0), "
            f"kappa {kappa:.3f} (want 0.47 +/- 0.06); reported without failing the build"
        )
