"""Command-line front end.

One executable, eleven subcommands: ``validate``, ``features``, ``train``,
``predict``, ``crossval``, ``compare``, ``ablation``, ``ttest``, ``rank``,
``render``, ``synth`` (plus ``render-graph`` as an alias for
``render --kind graph``).  Results go to stdout as JSON unless ``--out``
or ``--format table`` says otherwise; diagnostics go to stderr.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .corpus import Corpus, Lexicons, load_corpus, load_lexicons
from .dataset import (
    FEATURE_CONFIGS,
    assemble_averaged,
    dump_features_csv,
    dump_features_json,
    needs_fixations,
)
from .errors import DataError, NumericError, UsageError
from .eval import (
    ClassifierSpec,
    default_classifier_spec,
    fit_pipeline,
    format_metrics_table,
    pipeline_from_dict,
    run_ablation,
    run_comparison,
    run_crossval,
    run_rank,
    run_ttest_table,
)
from .gaze import render_scanpath_svg
from .learn import MILR_COMBINES, TrainConfig
from .saliency import build_graph, render_graph_svg
from .synth import SynthConfig, generate
from .textfeat import fit_unigrams, train_lp, derive_polarity_labels


class _Parser(argparse.ArgumentParser):
    """argparse terminates the process on bad usage; raise instead so the
    exit-code mapping stays in one place."""

    def error(self, message):
        raise UsageError(message)


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("SARCAZE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"SARCAZE_SEED={env!r} is not an integer")
    return 0


def _emit(args, payload: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(payload)
    else:
        sys.stdout.write(payload)
        if not payload.endswith("\n"):
            sys.stdout.write("\n")


def _emit_json(args, data) -> None:
    _emit(args, json.dumps(data, indent=2, sort_keys=True) + "\n")


def _load_inputs(args, *, feature_config: str | None = None,
                 require_fixations: bool = False) -> tuple[Corpus, Lexicons | None]:
    needs_gaze = require_fixations or (
        feature_config is not None and needs_fixations(feature_config)
    )
    if needs_gaze and not getattr(args, "fixations", None):
        raise UsageError(
            f"--fixations is required for config {feature_config!r}"
            if feature_config
            else "--fixations is required for this command"
        )
    corpus = load_corpus(args.sentences, getattr(args, "fixations", None))
    lexicons = None
    if getattr(args, "lexicons", None):
        lexicons = load_lexicons(args.lexicons)
    return corpus, lexicons


def _classifier_spec(args) -> ClassifierSpec:
    seed = _resolve_seed(args.seed)
    overrides = {}
    if getattr(args, "epochs", None) is not None:
        overrides["epochs"] = args.epochs
    if getattr(args, "learning_rate", None) is not None:
        overrides["learning_rate"] = args.learning_rate
    if getattr(args, "l2", None) is not None:
        overrides["l2"] = args.l2
    if getattr(args, "hidden_units", None) is not None:
        overrides["hidden_units"] = args.hidden_units
    spec = default_classifier_spec(
        args.classifier, seed=seed, combine=getattr(args, "milr_combine", "noisy-or")
    )
    if overrides:
        spec = ClassifierSpec(
            kind=spec.kind,
            train=TrainConfig(
                learning_rate=overrides.get("learning_rate", spec.train.learning_rate),
                l2=overrides.get("l2", spec.train.l2),
                epochs=overrides.get("epochs", spec.train.epochs),
                batch_size=spec.train.batch_size,
                seed=seed,
                hidden_units=overrides.get("hidden_units", spec.train.hidden_units),
            ),
            milr_combine=spec.milr_combine,
        )
    return spec


# --- subcommand handlers --------------------------------------------------


def _cmd_validate(args) -> int:
    corpus, lexicons = _load_inputs(args)
    payload = corpus.report.to_dict()
    if lexicons is not None:
        payload["lexicons"] = {
            "positive": len(lexicons.positive),
            "negative": len(lexicons.negative),
            "implicit_phrases": len(lexicons.implicit_phrases),
        }
    _emit_json(args, payload)
    return 0


def _cmd_features(args) -> int:
    corpus, lexicons = _load_inputs(args, feature_config=args.config)
    unigram_model = None
    lp_model = None
    from .dataset import needs_unigrams, _CONFIG_BLOCKS
    from .textfeat import LPModel

    sentences = [corpus.sentences[sid] for sid in corpus.sentence_ids()]
    if needs_unigrams(args.config):
        k = min(args.unigram_k, len({t.lower() for s in sentences for t in s.tokens}),
                len(sentences) - 1)
        unigram_model = fit_unigrams(sentences, max(1, k))
    if "sarcasm" in _CONFIG_BLOCKS[args.config]:
        if lexicons is None:
            raise UsageError(f"--lexicons is required for config {args.config!r}")
        labeled = derive_polarity_labels(sentences, lexicons)
        if {p for _, p in labeled} == {1, -1}:
            lp_model = train_lp(labeled)
        else:
            lp_model = LPModel.constant(-1)
    schema, vectors = assemble_averaged(
        corpus, lexicons, args.config, unigram_model=unigram_model, lp_model=lp_model
    )
    if args.format == "json":
        _emit_json(args, dump_features_json(schema, vectors))
    else:
        _emit(args, dump_features_csv(schema, vectors).decode())
    return 0


def _cmd_train(args) -> int:
    corpus, lexicons = _load_inputs(args, feature_config=args.config)
    spec = _classifier_spec(args)
    pipeline = fit_pipeline(corpus, lexicons, args.config, spec, unigram_k=args.unigram_k)
    _emit_json(args, pipeline.to_dict())
    return 0


def _cmd_predict(args) -> int:
    data = json.loads(Path(args.model).read_text())
    pipeline = pipeline_from_dict(data)
    corpus, lexicons = _load_inputs(args, feature_config=pipeline.feature_config)
    predictions = pipeline.predict(corpus, lexicons)
    rows = [
        {"sentence_id": sid, "prediction": predictions[sid]}
        for sid in corpus.sentence_ids()
    ]
    if args.format == "csv":
        lines = ["sentence_id,prediction"]
        lines += [f"{r['sentence_id']},{r['prediction']}" for r in rows]
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit_json(args, {"feature_config": pipeline.feature_config, "predictions": rows})
    return 0


def _cmd_crossval(args) -> int:
    corpus, lexicons = _load_inputs(args, feature_config=args.config)
    spec = _classifier_spec(args)
    report = run_crossval(
        corpus, lexicons, args.config, spec,
        k=args.k, seed=_resolve_seed(args.seed), unigram_k=args.unigram_k, jobs=args.jobs,
    )
    if args.format == "table":
        name = f"{args.config}/{spec.kind}"
        _emit(args, format_metrics_table([(name, report.pooled)]))
    else:
        _emit_json(args, report.to_dict())
    return 0


def _parse_run(text: str) -> tuple[str, str]:
    if ":" not in text:
        raise UsageError(f"--run takes CONFIG:CLASSIFIER, got {text!r}")
    config, classifier = text.split(":", 1)
    if config not in FEATURE_CONFIGS:
        raise UsageError(f"config {config!r} not one of {FEATURE_CONFIGS}")
    return config, classifier


def _cmd_compare(args) -> int:
    pairs = [_parse_run(r) for r in args.run]
    gaze_configs = [c for c, _ in pairs if needs_fixations(c)]
    corpus, lexicons = _load_inputs(
        args, feature_config=gaze_configs[0] if gaze_configs else None
    )
    seed = _resolve_seed(args.seed)
    runs = [
        (config, default_classifier_spec(classifier, seed=seed, combine=args.milr_combine))
        for config, classifier in pairs
    ]
    report = run_comparison(
        corpus, lexicons, runs,
        k=args.k, seed=seed, unigram_k=args.unigram_k, alpha=args.alpha, jobs=args.jobs,
    )
    if args.format == "table":
        rows = [
            (f"{r.feature_config}/{r.classifier.kind}", r.pooled) for r in report.runs
        ]
        text = format_metrics_table(rows)
        for a, b, result in report.pairs:
            verdict = "significant" if result.significant else "not significant"
            text += (
                f"McNemar {rows[a][0]} vs {rows[b][0]}: chi2={result.chi2:.3f} "
                f"p={result.p:.4g} ({verdict})\n"
            )
        _emit(args, text)
    else:
        _emit_json(args, report.to_dict())
    return 0


def _cmd_ablation(args) -> int:
    configs = args.config.split(",")
    for config in configs:
        if config not in FEATURE_CONFIGS:
            raise UsageError(f"config {config!r} not one of {FEATURE_CONFIGS}")
    gaze_configs = [c for c in configs if needs_fixations(c)]
    corpus, lexicons = _load_inputs(
        args, feature_config=gaze_configs[0] if gaze_configs else None
    )
    spec = _classifier_spec(args)
    fractions = tuple(float(f) for f in args.fractions.split(","))
    report = run_ablation(
        corpus, lexicons, configs, spec,
        fractions=fractions, seed=_resolve_seed(args.seed), unigram_k=args.unigram_k,
    )
    if args.svg:
        Path(args.svg).write_text(report.to_svg())
    if args.format == "csv":
        _emit(args, report.to_csv())
    else:
        _emit_json(args, report.to_dict())
    return 0


def _cmd_ttest(args) -> int:
    corpus, _ = _load_inputs(args, require_fixations=True)
    table = run_ttest_table(corpus, alpha=args.alpha)
    if args.format == "table":
        _emit(args, table.to_text())
    else:
        _emit_json(args, table.to_dict())
    return 0


def _cmd_rank(args) -> int:
    corpus, lexicons = _load_inputs(args, feature_config=args.config)
    report = run_rank(
        corpus, lexicons, args.config,
        method=args.method, bins=args.bins, unigram_k=args.unigram_k,
    )
    if args.svg:
        Path(args.svg).write_text(report.to_svg(top_n=args.top))
    if args.format == "table":
        lines = [f"{'rank':>5}  {'feature':<16}{'merit':>12}  gaze"]
        for i, (name, merit) in enumerate(report.ranking.items[: args.top], start=1):
            flag = "*" if name in report.gaze_features else ""
            lines.append(f"{i:>5}  {name:<16}{merit:>12.4f}  {flag}")
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit_json(args, report.to_dict())
    return 0


def _cmd_render(args) -> int:
    corpus, _ = _load_inputs(args, require_fixations=True)
    key = (args.sentence_id, args.participant)
    if key not in corpus.trials:
        raise DataError(
            f"no trial for sentence {args.sentence_id} participant {args.participant!r}"
        )
    trial = corpus.trials[key]
    sentence = corpus.sentences[args.sentence_id]
    if args.kind == "scanpath":
        svg = render_scanpath_svg(trial, sentence)
    else:
        svg = render_graph_svg(build_graph(trial, sentence), sentence)
    _emit(args, svg)
    return 0


def _cmd_synth(args) -> int:
    config = SynthConfig(
        n_sentences=args.n_sentences,
        sarcastic_fraction=args.sarcastic_fraction,
        n_participants=args.participants,
        duration_ratio=args.duration_ratio,
        regression_boost=args.regression_boost,
        noise_std=args.noise_std,
        seed=_resolve_seed(args.seed),
    )
    result = generate(config)
    out = Path(args.out)
    result.save_to(out)
    corpus = result.corpus
    print(
        f"wrote {len(corpus.sentences)} sentences, {len(corpus.trials)} trials to {out}",
        file=sys.stderr,
    )
    return 0


# --- parser construction --------------------------------------------------


def _add_io_flags(p, *, fixations=True, lexicons=True):
    p.add_argument("--sentences", required=True, help="labeled sentences CSV")
    if fixations:
        p.add_argument("--fixations", help="fixation log CSV")
    if lexicons:
        p.add_argument("--lexicons", help="lexicon directory")


def _add_common_flags(p, *, classifier=False):
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: SARCAZE_SEED or 0)")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--unigram-k", type=int, default=50, dest="unigram_k",
                   help="number of unigram principal axes")
    if classifier:
        p.add_argument("--classifier", required=True,
                       choices=["gnb", "logreg", "svm", "mlp", "milr"])
        p.add_argument("--milr-combine", choices=list(MILR_COMBINES),
                       default="noisy-or", dest="milr_combine")
        p.add_argument("--epochs", type=int, default=None)
        p.add_argument("--learning-rate", type=float, default=None, dest="learning_rate")
        p.add_argument("--l2", type=float, default=None)
        p.add_argument("--hidden-units", type=int, default=None, dest="hidden_units")


def build_parser() -> _Parser:
    parser = _Parser(prog="sarcaze", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check corpus files and print a summary")
    _add_io_flags(p)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("features", help="dump the feature matrix")
    _add_io_flags(p)
    p.add_argument("--config", required=True, choices=list(FEATURE_CONFIGS))
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common_flags(p)
    p.set_defaults(handler=_cmd_features)

    p = sub.add_parser("train", help="fit a full pipeline and save it as JSON")
    _add_io_flags(p)
    p.add_argument("--config", required=True, choices=list(FEATURE_CONFIGS))
    _add_common_flags(p, classifier=True)
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("predict", help="apply a saved pipeline to new sentences")
    p.add_argument("--model", required=True, help="pipeline JSON from `train`")
    _add_io_flags(p)
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_predict)

    p = sub.add_parser("crossval", help="stratified k-fold evaluation")
    _add_io_flags(p)
    p.add_argument("--config", required=True, choices=list(FEATURE_CONFIGS))
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["json", "table"], default="json")
    _add_common_flags(p, classifier=True)
    p.set_defaults(handler=_cmd_crossval)

    p = sub.add_parser("compare", help="evaluate several runs on shared folds")
    _add_io_flags(p)
    p.add_argument("--run", action="append", required=True,
                   help="CONFIG:CLASSIFIER, repeatable")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.add_argument("--milr-combine", choices=list(MILR_COMBINES),
                   default="noisy-or", dest="milr_combine")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--unigram-k", type=int, default=50, dest="unigram_k")
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser("ablation", help="learning curve over training fractions")
    _add_io_flags(p)
    p.add_argument("--config", required=True,
                   help="comma-separated feature configurations")
    p.add_argument("--fractions", default="0.7,0.8,0.9,1.0")
    p.add_argument("--svg", help="also write a line chart here")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    _add_common_flags(p, classifier=True)
    p.set_defaults(handler=_cmd_ablation)

    p = sub.add_parser("ttest", help="per-participant reading-duration test")
    _add_io_flags(p, lexicons=False)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--format", choices=["json", "table"], default="table")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_ttest)

    p = sub.add_parser("rank", help="rank features against the labels")
    _add_io_flags(p)
    p.add_argument("--config", default="gaze+sarcasm", choices=list(FEATURE_CONFIGS))
    p.add_argument("--method", choices=["chi_squared", "info_gain"], default="chi_squared")
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--svg", help="also write a bar chart here")
    p.add_argument("--format", choices=["json", "table"], default="json")
    _add_common_flags(p)
    p.set_defaults(handler=_cmd_rank)

    for name, kind in (("render", None), ("render-graph", "graph")):
        p = sub.add_parser(
            name,
            help="draw one trial as SVG"
            if kind is None
            else "draw one trial's gaze graph as SVG",
        )
        _add_io_flags(p, lexicons=False)
        if kind is None:
            p.add_argument("--kind", choices=["scanpath", "graph"], default="scanpath")
        p.add_argument("--sentence-id", type=int, required=True, dest="sentence_id")
        p.add_argument("--participant", required=True)
        p.add_argument("--out")
        p.set_defaults(handler=_cmd_render, **({"kind": kind} if kind else {}))

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n-sentences", type=int, default=1000, dest="n_sentences")
    p.add_argument("--sarcastic-fraction", type=float, default=0.35,
                   dest="sarcastic_fraction")
    p.add_argument("--participants", type=int, default=7)
    p.add_argument("--duration-ratio", type=float, default=1.5, dest="duration_ratio")
    p.add_argument("--regression-boost", type=float, default=0.15,
                   dest="regression_boost")
    p.add_argument("--noise-std", type=float, default=0.15, dest="noise_std")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=_cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
