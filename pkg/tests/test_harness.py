import csv
import json
import math

import numpy as np
import pytest

from pconf import cli
from pconf.data import TwoGaussianSpec, sample_labeled_dataset, sample_pconf_dataset
from pconf.fileio import read_labeled_csv, read_pconf_csv, write_labeled_csv, write_pconf_csv
from pconf.harness import (
    STREAM_LABELED,
    STREAM_NOISY,
    STREAM_PCONF,
    STREAM_TEST,
    ExperimentConfig,
    Method,
    SingleRunConfig,
    TrialResult,
    run_study,
    summarize,
    train_single,
    trial_seed,
)
from pconf.model import load_model
from pconf.optim import OptimizerConfig
from pconf.risk import accuracy

FAST = OptimizerConfig(max_epochs=300)


@pytest.fixture
def files(tmp_path):
    spec = TwoGaussianSpec(mu_minus=(3.0, 3.0), seed=1)
    write_pconf_csv(tmp_path / "pconf.csv", sample_pconf_dataset(spec, 300))
    write_labeled_csv(tmp_path / "labeled.csv", sample_labeled_dataset(spec.with_seed(2), 150, 150))
    write_labeled_csv(tmp_path / "test.csv", sample_labeled_dataset(spec.with_seed(3), 200, 200))
    return tmp_path


def test_csv_round_trip_is_exact(files):
    spec = TwoGaussianSpec(mu_minus=(3.0, 3.0), seed=1)
    original = sample_pconf_dataset(spec, 300)
    back = read_pconf_csv(files / "pconf.csv")
    assert back.X.tobytes() == original.X.tobytes()
    assert back.r.tobytes() == original.r.tobytes()
    text = (files / "labeled.csv").read_text()
    assert text.splitlines()[0] == "x1,x2,y"
    assert {ln.rsplit(",", 1)[1] for ln in text.splitlines()[1:]} == {"1", "-1"}


def test_seed_streams_never_overlap():
    fingerprints = set()
    for stream in (STREAM_PCONF, STREAM_LABELED, STREAM_TEST, STREAM_NOISY):
        for trial in range(3):
            for mu in ((2.0, 2.0), (3.0, 3.0)):
                seed = trial_seed(0, mu, None, trial, stream)
                first = np.random.default_rng(seed).standard_normal()
                fingerprints.add(first)
    assert len(fingerprints) == 4 * 3 * 2


def small_config(**kw):
    base = dict(
        mu_minus=((3.0, 3.0),), trials=2, n_pos=200, n_neg=200,
        n_test_pos=200, n_test_neg=200, optimizer=FAST,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_overlap_study_outputs(tmp_path):
    rows, summary = run_study(small_config(), tmp_path)
    assert [r.method for r in rows[:2]] == ["pconf", "pconf"]
    assert len(rows) == 2 * 4
    assert all(0.0 <= r.accuracy <= 1.0 for r in rows)
    assert {s.method for s in summary} == {m.value for m in Method}
    with open(tmp_path / "trials.csv") as fh:
        table = list(csv.DictReader(fh))
    for s in summary:
        accs = [float(t["accuracy"]) for t in table if t["method"] == s.method]
        assert abs(np.mean(accs) - s.mean_accuracy) <= 1e-12
        assert abs(np.std(accs, ddof=1) - s.std_accuracy) <= 1e-12
    bounds = [float(t["est_error_bound"]) for t in table if t["method"] == "pconf"]
    assert all(b > 0 for b in bounds)


def test_noise_study_defaults_to_two_methods():
    cfg = small_config(study="noise", ms=(100,), trials=1)
    rows, _ = run_study(cfg)
    assert [r.method for r in rows] == ["pconf", "weighted"]
    assert rows[0].m == 100


def test_study_is_deterministic(tmp_path):
    run_study(small_config(), tmp_path / "a")
    run_study(small_config(), tmp_path / "b")
    for name in ("trials.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_cell_results_do_not_depend_on_the_grid():
    alone, _ = run_study(small_config(trials=1, methods=("pconf",)))
    grid, _ = run_study(small_config(
        trials=1, methods=("pconf",), mu_minus=((2.0, 2.0), (3.0, 3.0)),
    ))
    [match] = [r for r in grid if r.mu_minus == (3.0, 3.0)]
    assert match.accuracy == alone[0].accuracy


def test_summary_flags_failed_cells_and_marks_equivalents():
    mu = (3.0, 3.0)
    rows = [TrialResult("overlap", "pconf", mu, None, t, "s", accuracy=a) for t, a in enumerate([0.9, 0.91, 0.92])]
    rows += [TrialResult("overlap", "weighted", mu, None, t, "s", accuracy=a) for t, a in enumerate([0.905, 0.9, 0.915])]
    rows += [TrialResult("overlap", "regression", mu, None, t, "s", accuracy=0.5) for t in range(2)]
    rows += [TrialResult("overlap", "regression", mu, None, 2, "s", status="failed")]
    rows += [TrialResult("overlap", "supervised", mu, None, t, "s", status="failed") for t in range(3)]
    by = {s.method: s for s in summarize(rows, tuple(Method))}
    assert by["pconf"].best_or_equivalent and by["weighted"].best_or_equivalent
    assert not by["regression"].best_or_equivalent
    assert by["regression"].n_failed == 1 and not by["regression"].flagged
    assert by["supervised"].flagged and by["supervised"].n_ok == 0
    assert by["regression"].significant_vs_pconf


def test_train_then_eval_reproduces_accuracy(files, capsys):
    cfg = SingleRunConfig(
        method="pconf", train_path=files / "pconf.csv", epochs=500,
        model_out=str(files / "model.txt"), test_path=files / "test.csv",
    )
    _, record = train_single(cfg)
    recorded = json.loads((files / "model.txt.json").read_text())["test_accuracy"]
    assert recorded == record["test_accuracy"]
    model = load_model(files / "model.txt")
    assert accuracy(read_labeled_csv(files / "test.csv"), model) == recorded
    assert cli.main(["eval", "--model", str(files / "model.txt"), "--test", str(files / "test.csv")]) == 0
    assert f"accuracy {recorded:.9g}" in capsys.readouterr().out


def test_overrides_are_echoed(files):
    cfg = SingleRunConfig(method="weighted", train_path=files / "pconf.csv", lam=0.25, floor=0.05, epochs=50)
    _, record = train_single(cfg)
    assert record["lambda"] == 0.25 and record["floor"] == 0.05 and record["epochs_run"] == 50


def test_lambda_grid_selection(files):
    cfg = SingleRunConfig(method="pconf", train_path=files / "pconf.csv", epochs=200, lambda_grid=(1e-4, 10.0, 1e4))
    _, record = train_single(cfg)
    assert set(record["lambda_grid_scores"]) == {"0.0001", "10", "10000"}
    best = min(record["lambda_grid_scores"].items(), key=lambda kv: kv[1])
    assert record["lambda"] == float(best[0])


@pytest.mark.parametrize("method", ["regression", "supervised"])
def test_other_methods_train(files, method):
    path = files / ("labeled.csv" if method == "supervised" else "pconf.csv")
    _, record = train_single(SingleRunConfig(method=method, train_path=path, epochs=100, test_path=files / "test.csv"))
    assert record["test_accuracy"] > 0.4


# -- CLI ---------------------------------------------------------------------


def test_cli_missing_confidence_column(files, capsys):
    code = cli.main(["train", "--method", "pconf", "--train", str(files / "labeled.csv")])
    assert code == cli.EXIT_INPUT
    assert "'r'" in capsys.readouterr().err


def test_cli_io_error(tmp_path):
    assert cli.main(["train", "--train", str(tmp_path / "missing.csv")]) == cli.EXIT_IO


def test_cli_divergence_exit_code(files, capsys):
    code = cli.main(["train", "--train", str(files / "pconf.csv"), "--loss", "squared", "--lr", "1e308", "--epochs", "5"])
    assert code == cli.EXIT_NUMERIC
    assert "epoch" in capsys.readouterr().err


def test_cli_config_file_and_flag_override(files, capsys):
    conf = files / "train.conf"
    conf.write_text(f"method=weighted\ntrain={files / 'pconf.csv'}\nlambda=0.5\nepochs=20\n")
    assert cli.main(["train", "--config", str(conf), "--epochs", "30"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["method"] == "weighted" and record["lambda"] == 0.5 and record["epochs"] == 30


def test_cli_config_unknown_key(files):
    conf = files / "bad.conf"
    conf.write_text("colour=blue\n")
    assert cli.main(["bound", "--config", str(conf)]) == cli.EXIT_INPUT


def test_cli_generate(tmp_path):
    spec = tmp_path / "noisy.spec"
    spec.write_text("kind=pconf\nmu_minus=2.5,2.5\nseed=4\nn_pos=50\nnoisy_m=100\nnoisy_seed=9\n")
    assert cli.main(["generate", "--spec", str(spec), "--out", str(tmp_path / "d.csv")]) == 0
    data = read_pconf_csv(tmp_path / "d.csv")
    assert len(data) == 50 and np.all((data.r > 0) & (data.r < 1))
    spec.write_text("kind=labeled\nn_pos=3\nn_neg=4\n")
    assert cli.main(["generate", "--spec", str(spec), "--out", str(tmp_path / "l.csv")]) == 0
    assert len(read_labeled_csv(tmp_path / "l.csv")) == 7
    spec.write_text("kind=weird\n")
    assert cli.main(["generate", "--spec", str(spec), "--out", str(tmp_path / "x.csv")]) == cli.EXIT_INPUT


def test_cli_bound(capsys):
    args = ["bound", "--n", "1000", "--pi-plus", "0.5", "--c-r", "0.01", "--loss", "logistic",
            "--c-w", "1", "--c-phi", "1", "--delta", "0.05"]
    assert cli.main(args) == 0
    out = dict(line.split() for line in capsys.readouterr().out.splitlines())
    assert float(out["uniform_deviation_bound"]) == pytest.approx(6.04212932, rel=1e-8)
    assert float(out["estimation_error_bound"]) == pytest.approx(12.0842586, rel=1e-8)


def test_cli_study_byte_identical(tmp_path, capsys):
    args = ["study", "overlap", "--trials", "2", "--seed", "5", "--mu-minus", "2.5,2.5", "--epochs", "200"]
    assert cli.main(args + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "trials.csv").read_bytes() == (tmp_path / "b" / "trials.csv").read_bytes()
    assert "pconf" in capsys.readouterr().out
