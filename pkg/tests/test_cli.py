"""End-to-end runs of the command-line front end through ``main(argv)``:
exit codes, output shapes, the seed environment fallback, and the
train/predict round trip via files."""

import json

import pytest

from sarcaze.cli import main
from sarcaze.corpus import load_corpus


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli-data")
    code = main([
        "synth", "--out", str(out),
        "--n-sentences", "80", "--participants", "2", "--seed", "9",
    ])
    assert code == 0
    return out


@pytest.fixture(scope="session")
def data_args(data_dir):
    return [
        "--sentences", str(data_dir / "sentences.csv"),
        "--fixations", str(data_dir / "fixations.csv"),
        "--lexicons", str(data_dir / "lexicons"),
    ]


@pytest.fixture(scope="session")
def cli_corpus(data_dir):
    return load_corpus(data_dir / "sentences.csv", data_dir / "fixations.csv")


class TestValidate:
    def test_summary_json(self, data_args, capsys):
        assert main(["validate", *data_args]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["n_sentences"] == 80
        assert payload["class_ratio"] == "28:52"
        assert len(payload["participants"]) == 2
        assert payload["lexicons"]["positive"] > 0

    def test_out_flag_writes_file(self, data_args, tmp_path, capsys):
        target = tmp_path / "report.json"
        assert main(["validate", *data_args, "--out", str(target)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(target.read_text())["n_sentences"] == 80

    def test_missing_file_is_usage_error(self, tmp_path):
        assert main(["validate", "--sentences", str(tmp_path / "nope.csv")]) == 1

    def test_corrupt_csv_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("id,label,text\n1,maybe,hello there\n")
        assert main(["validate", "--sentences", str(bad)]) == 2


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 1
        assert "usage error" in capsys.readouterr().err

    def test_missing_required_flag(self):
        assert main(["validate"]) == 1

    def test_gaze_config_requires_fixations(self, data_dir):
        code = main([
            "features",
            "--sentences", str(data_dir / "sentences.csv"),
            "--lexicons", str(data_dir / "lexicons"),
            "--config", "gaze",
        ])
        assert code == 1

    def test_bad_config_choice(self, data_args):
        assert main(["features", *data_args, "--config", "everything"]) == 1


class TestFeatures:
    def test_csv_dump(self, data_args, cli_corpus, capsys):
        assert main(["features", *data_args, "--config", "gaze"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("sentence_id,label,")
        assert len(lines) == 1 + len(cli_corpus.sentences)

    def test_json_dump(self, data_args, capsys):
        code = main([
            "features", *data_args, "--config", "sarcasm", "--format", "json"
        ])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["schema"]["config"] == "sarcasm"
        assert len(payload["rows"]) == 80


class TestTrainPredict:
    def test_round_trip(self, data_args, tmp_path, capsys):
        model_path = tmp_path / "model.json"
        code = main([
            "train", *data_args, "--config", "gaze", "--classifier", "logreg",
            "--epochs", "60", "--seed", "1", "--out", str(model_path),
        ])
        assert code == 0
        saved = json.loads(model_path.read_text())
        assert saved["format"] == "sarcaze-pipeline/1"

        code = main(["predict", "--model", str(model_path), *data_args])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["feature_config"] == "gaze"
        assert len(payload["predictions"]) == 80
        assert {r["prediction"] for r in payload["predictions"]} <= {1, -1}

    def test_predict_csv_format(self, data_args, tmp_path, capsys):
        model_path = tmp_path / "model.json"
        main([
            "train", *data_args, "--config", "gaze", "--classifier", "gnb",
            "--seed", "1", "--out", str(model_path),
        ])
        capsys.readouterr()
        code = main([
            "predict", "--model", str(model_path), *data_args, "--format", "csv"
        ])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "sentence_id,prediction"
        assert len(lines) == 81

    def test_invalid_model_json_is_data_error(self, data_args, tmp_path):
        bad = tmp_path / "model.json"
        bad.write_text("{not json")
        assert main(["predict", "--model", str(bad), *data_args]) == 2

    def test_divergent_training_is_numeric_error(self, data_args):
        code = main([
            "train", *data_args, "--config", "gaze", "--classifier", "logreg",
            "--learning-rate", "1e6", "--epochs", "50", "--seed", "1",
        ])
        assert code == 3


class TestCrossval:
    def test_json_report(self, data_args, capsys):
        code = main([
            "crossval", *data_args, "--config", "gaze", "--classifier", "logreg",
            "--k", "5", "--epochs", "60", "--seed", "2",
        ])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["k"] == 5
        assert len(payload["per_fold"]) == 5
        assert 0.0 <= payload["pooled"]["weighted_f"] <= 1.0

    def test_table_format(self, data_args, capsys):
        code = main([
            "crossval", *data_args, "--config", "gaze", "--classifier", "logreg",
            "--k", "5", "--epochs", "60", "--seed", "2", "--format", "table",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "kappa" in out and "gaze/logreg" in out

    def test_deterministic_across_invocations(self, data_args, capsys):
        argv = [
            "crossval", *data_args, "--config", "gaze", "--classifier", "logreg",
            "--k", "5", "--epochs", "60", "--seed", "2",
        ]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        assert capsys.readouterr().out == first


class TestCompare:
    def test_table_includes_mcnemar(self, data_args, capsys):
        code = main([
            "compare", *data_args,
            "--run", "gaze:gnb", "--run", "unigram:gnb",
            "--k", "5", "--seed", "3", "--format", "table",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "McNemar gaze/gnb vs unigram/gnb" in out

    def test_bad_run_spec(self, data_args):
        assert main(["compare", *data_args, "--run", "gaze", "--k", "5"]) == 1


class TestTTest:
    def test_table_default(self, data_args, capsys):
        assert main(["ttest", *data_args[:4]]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2 + 2  # header, rule, one row per participant

    def test_json(self, data_args, capsys):
        assert main(["ttest", *data_args[:4], "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["rows"]) == 2


class TestRank:
    def test_table(self, data_args, capsys):
        code = main([
            "rank", *data_args, "--config", "gaze", "--format", "table", "--top", "5"
        ])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 6

    def test_svg_side_output(self, data_args, tmp_path, capsys):
        chart = tmp_path / "rank.svg"
        code = main([
            "rank", *data_args, "--config", "gaze", "--svg", str(chart)
        ])
        assert code == 0
        capsys.readouterr()
        assert chart.read_text().startswith("<svg")


class TestRender:
    def test_scanpath(self, data_args, cli_corpus, capsys):
        sid, participant = next(iter(sorted(cli_corpus.trials)))
        code = main([
            "render", *data_args[:4],
            "--sentence-id", str(sid), "--participant", participant,
        ])
        assert code == 0
        assert capsys.readouterr().out.startswith("<svg")

    def test_graph_alias_matches_kind_flag(self, data_args, cli_corpus, capsys):
        sid, participant = next(iter(sorted(cli_corpus.trials)))
        base = data_args[:4]
        args = ["--sentence-id", str(sid), "--participant", participant]
        assert main(["render", *base, "--kind", "graph", *args]) == 0
        via_kind = capsys.readouterr().out
        assert main(["render-graph", *base, *args]) == 0
        assert capsys.readouterr().out == via_kind

    def test_unknown_trial_is_data_error(self, data_args, capsys):
        code = main([
            "render", *data_args[:4],
            "--sentence-id", "999999", "--participant", "nobody",
        ])
        assert code == 2
        assert "data error" in capsys.readouterr().err


class TestSeedFallback:
    def test_env_seed_matches_explicit_flag(self, tmp_path, monkeypatch):
        a, b = tmp_path / "a", tmp_path / "b"
        monkeypatch.setenv("SARCAZE_SEED", "21")
        assert main(["synth", "--out", str(a), "--n-sentences", "30",
                     "--participants", "2"]) == 0
        monkeypatch.delenv("SARCAZE_SEED")
        assert main(["synth", "--out", str(b), "--n-sentences", "30",
                     "--participants", "2", "--seed", "21"]) == 0
        assert (a / "sentences.csv").read_bytes() == (b / "sentences.csv").read_bytes()
        assert (a / "fixations.csv").read_bytes() == (b / "fixations.csv").read_bytes()

    def test_garbage_env_seed_is_usage_error(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SARCAZE_SEED", "eleven")
        code = main(["synth", "--out", str(tmp_path / "x"), "--n-sentences", "30"])
        assert code == 1
