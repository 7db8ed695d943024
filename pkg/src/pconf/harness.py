"""Synthetic replication studies and single-run training.

Every trial draws its datasets from seeds of the form
``(base_seed, mu_index, m_index, trial, stream)``, with one stream each for
the Pconf training set, the labeled training set, the test set and the
noisy-confidence training set, so no two streams share draws.
"""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import enum
import json
import logging
import math
from pathlib import Path

import numpy as np

from pconf.data import (
    NoisySpec,
    TwoGaussianSpec,
    noisy_confidence_model,
    sample_labeled_dataset,
    sample_pconf_dataset,
)
from pconf.errors import DivergenceError, DomainError, InputFormatError, NumericalError
from pconf.fileio import read_labeled_csv, read_pconf_csv
from pconf.loss import LossKind
from pconf.model import AffineBasis, PenaltyKind, Regularizer, save_model
from pconf.optim import OptimizerConfig, minimize, ridge_regression_fit
from pconf.risk import (
    DEFAULT_FLOOR,
    LabeledDataset,
    ObjectiveKind,
    RiskObjective,
    accuracy,
    pconf_validation_score,
    weighted_validation_score,
)
from pconf.stats import welch_t_test
from pconf.theory import empirical_constants, estimation_error_bound

log = logging.getLogger(__name__)

OVERLAP_MEANS = tuple((v, v) for v in (2.0, 2.5, 3.0, 3.5, 4.0, 4.5))
NOISE_MS = (1000, 500, 100)

STREAM_PCONF, STREAM_LABELED, STREAM_TEST, STREAM_NOISY = range(4)


class Method(str, enum.Enum):
    PCONF = "pconf"
    WEIGHTED = "weighted"
    REGRESSION = "regression"
    SUPERVISED = "supervised"


# methods that see only Pconf data; the t-test compares within this group
COMPARED = (Method.PCONF, Method.WEIGHTED, Method.REGRESSION)


class Study(str, enum.Enum):
    OVERLAP = "overlap"
    NOISE = "noise"
    SINGLE = "single"


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    study: Study = Study.OVERLAP
    mu_minus: tuple = OVERLAP_MEANS
    ms: tuple = NOISE_MS
    trials: int = 10
    n_pos: int = 1000
    n_neg: int = 1000
    n_test_pos: int = 1000
    n_test_neg: int = 1000
    methods: tuple | None = None
    seed: int = 0
    optimizer: OptimizerConfig = OptimizerConfig()
    loss: LossKind = LossKind.LOGISTIC
    lam: float = 0.0
    floor: float = DEFAULT_FLOOR
    pi_plus: float = 0.5
    delta: float = 0.05
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "study", Study(self.study))
        object.__setattr__(self, "loss", LossKind.parse(self.loss))
        if self.methods is None:
            default = (
                (Method.PCONF, Method.WEIGHTED)
                if self.study is Study.NOISE
                else tuple(Method)
            )
            object.__setattr__(self, "methods", default)
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        object.__setattr__(
            self, "mu_minus", tuple(tuple(float(v) for v in mu) for mu in self.mu_minus)
        )
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if not self.methods:
            raise DomainError("method set must not be empty")

    @property
    def m_values(self):
        return tuple(self.ms) if self.study is Study.NOISE else (None,)


@dataclasses.dataclass
class TrialResult:
    study: str
    method: str
    mu_minus: tuple
    m: int | None
    trial: int
    seed: str
    status: str = "ok"
    accuracy: float = math.nan
    train_objective: float = math.nan
    epochs_run: int = 0
    validation_score: float = math.nan
    est_error_bound: float = math.nan
    degenerate: bool = False
    error: str = ""


TRIAL_COLUMNS = [f.name for f in dataclasses.fields(TrialResult)]


def _g9(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else format(v, ".9g")
    return v


def _mu_str(mu):
    return ";".join(format(v, "g") for v in mu)


def trial_seed(base, mu, m, trial, stream):
    """Entropy tuple for one random stream; distinct tuples give independent streams.

    Keyed on the cell's mean and m themselves, not their grid positions, so a
    cell draws the same data whichever other cells share the run.
    """
    mu_bits = np.asarray(mu, dtype=np.float64).view(np.uint64).tolist()
    return (int(base), int(stream), int(trial), 0 if m is None else int(m), len(mu_bits), *mu_bits)


def _bound(model, train, config):
    c_w = model.weight_norm()
    if c_w == 0.0:
        return math.nan
    consts = empirical_constants(model.basis, c_w, train, config.loss, config.floor)
    return estimation_error_bound(
        consts.bound_inputs(len(train), config.pi_plus, config.delta)
    )


def _fit(method, config, pconf_train, labeled_train, basis, lam=None):
    lam = config.lam if lam is None else lam
    reg = Regularizer(lam, PenaltyKind.IDENTITY_EXCEPT_BIAS)
    if method is Method.REGRESSION:
        return ridge_regression_fit(pconf_train, basis, lam), None
    if method is Method.SUPERVISED:
        objective = RiskObjective(ObjectiveKind.SUPERVISED, config.loss, reg)
        return minimize(objective, labeled_train, basis, config.optimizer)
    objective = RiskObjective(ObjectiveKind(method.value), config.loss, reg)
    return minimize(objective, pconf_train, basis, config.optimizer)


def _validation(method, model, pconf_data):
    if method is Method.WEIGHTED:
        return weighted_validation_score(pconf_data, model)
    return pconf_validation_score(pconf_data, model)


def run_trial(config, mu_index, m_index, trial):
    """Train and evaluate every configured method on one fresh draw."""
    mu = config.mu_minus[mu_index]
    m = config.m_values[m_index]
    d = len(mu)
    base = TwoGaussianSpec(mu_plus=(0.0,) * d, mu_minus=mu, pi_plus=config.pi_plus)

    def seeded(stream):
        return base.with_seed(trial_seed(config.seed, mu, m, trial, stream))

    confidence = None
    if m is not None:
        noisy = NoisySpec(m=m, seed=seeded(STREAM_NOISY).seed)
        confidence = noisy_confidence_model(base, noisy)
    pconf_train = sample_pconf_dataset(seeded(STREAM_PCONF), config.n_pos, confidence)
    pconf_train = pconf_train.clamped(config.floor)
    labeled_train = None
    if Method.SUPERVISED in config.methods:
        labeled_train = sample_labeled_dataset(seeded(STREAM_LABELED), config.n_pos, config.n_neg)
    test = sample_labeled_dataset(seeded(STREAM_TEST), config.n_test_pos, config.n_test_neg)
    basis = AffineBasis(d)

    results = []
    for method in config.methods:
        res = TrialResult(
            study=config.study.value,
            method=method.value,
            mu_minus=mu,
            m=m,
            trial=trial,
            seed=f"{config.seed}:{trial}",
            degenerate=pconf_train.is_degenerate,
        )
        try:
            model, report = _fit(method, config, pconf_train, labeled_train, basis)
        except NumericalError as exc:
            log.warning("trial %s/%s/%s %s failed: %s", mu, m, trial, method.value, exc)
            res.status = "failed"
            res.error = str(exc)
            results.append(res)
            continue
        res.accuracy = accuracy(test, model)
        if report is not None:
            res.train_objective = report.final_objective
            res.epochs_run = report.epochs_run
        res.validation_score = _validation(method, model, pconf_train)
        res.est_error_bound = _bound(model, pconf_train, config)
        results.append(res)
    return results


def _tasks(config):
    return [
        (i, j, t)
        for i in range(len(config.mu_minus))
        for j in range(len(config.m_values))
        for t in range(config.trials)
    ]


def _run_trial_task(args):
    config, i, j, t = args
    return run_trial(config, i, j, t)


def run_trials(config):
    """All trials of a study, ordered by (mu index, m index, method, trial)."""
    tasks = _tasks(config)
    if config.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(config.jobs) as pool:
            chunks = list(pool.map(_run_trial_task, [(config, *t) for t in tasks]))
    else:
        chunks = [run_trial(config, *t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    mu_rank = {mu: k for k, mu in enumerate(config.mu_minus)}
    m_rank = {m: k for k, m in enumerate(config.m_values)}
    method_rank = {m.value: k for k, m in enumerate(config.methods)}
    rows.sort(key=lambda r: (mu_rank[r.mu_minus], m_rank[r.m], method_rank[r.method], r.trial))
    return rows


@dataclasses.dataclass
class SummaryRow:
    mu_minus: tuple
    m: int | None
    method: str
    n_ok: int
    n_failed: int
    flagged: bool
    mean_accuracy: float
    std_accuracy: float
    t_vs_pconf: float = math.nan
    dof_vs_pconf: float = math.nan
    p_vs_pconf: float = math.nan
    significant_vs_pconf: bool = False
    best_or_equivalent: bool = False


SUMMARY_COLUMNS = [f.name for f in dataclasses.fields(SummaryRow)]


def summarize(rows, methods):
    """Mean and sample std (ddof=1) of accuracy per cell and method, with t-tests.

    ``best_or_equivalent`` marks, among the Pconf-data methods, the one with
    the highest mean and any other not significantly different from it by
    Welch's test at 5%.
    """
    cells = {}
    for r in rows:
        cells.setdefault((r.mu_minus, r.m), {}).setdefault(r.method, []).append(r)

    out = []
    for (mu, m), by_method in cells.items():
        accs = {
            meth: np.array([r.accuracy for r in rs if r.status == "ok"])
            for meth, rs in by_method.items()
        }
        cell_rows = {}
        for meth in (mm.value for mm in methods):
            if meth not in by_method:
                continue
            a = accs[meth]
            n_failed = sum(r.status != "ok" for r in by_method[meth])
            row = SummaryRow(
                mu_minus=mu,
                m=m,
                method=meth,
                n_ok=int(a.size),
                n_failed=n_failed,
                flagged=2 * n_failed >= len(by_method[meth]),
                mean_accuracy=float(np.mean(a)) if a.size else math.nan,
                std_accuracy=float(np.std(a, ddof=1)) if a.size > 1 else math.nan,
            )
            pc = accs.get(Method.PCONF.value)
            if meth != Method.PCONF.value and pc is not None and pc.size > 1 and a.size > 1:
                w = welch_t_test(pc, a)
                row.t_vs_pconf, row.dof_vs_pconf = w.t, w.dof
                row.p_vs_pconf, row.significant_vs_pconf = w.p_value, w.significant
            cell_rows[meth] = row
            out.append(row)

        compared = [mm.value for mm in COMPARED if mm.value in cell_rows and accs[mm.value].size]
        if compared:
            best = max(compared, key=lambda k: cell_rows[k].mean_accuracy)
            for k in compared:
                if k == best:
                    cell_rows[k].best_or_equivalent = True
                elif accs[k].size > 1 and accs[best].size > 1:
                    cell_rows[k].best_or_equivalent = not welch_t_test(accs[best], accs[k]).significant
    return out


def _csv_value(name, v):
    if name == "mu_minus":
        return _mu_str(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    return _g9(v)


def write_rows_csv(path, rows, columns):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_csv_value(c, getattr(r, c)) for c in columns])


def run_study(config, out_dir=None):
    """Run a replication study; write ``trials.csv`` and ``summary.csv`` if asked."""
    rows = run_trials(config)
    summary = summarize(rows, config.methods)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_rows_csv(out / "trials.csv", rows, TRIAL_COLUMNS)
        write_rows_csv(out / "summary.csv", summary, SUMMARY_COLUMNS)
    return rows, summary


def run_overlap_study(config, out_dir=None):
    return run_study(dataclasses.replace(config, study=Study.OVERLAP), out_dir)


def run_noise_study(config, out_dir=None):
    return run_study(dataclasses.replace(config, study=Study.NOISE), out_dir)


# -- single runs ----------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class SingleRunConfig:
    method: Method
    train_path: str
    loss: LossKind = LossKind.LOGISTIC
    lam: float = 0.0
    floor: float = DEFAULT_FLOOR
    epochs: int = 10_000
    lr: float = 1e-3
    seed: int = 0
    model_out: str | None = None
    test_path: str | None = None
    lambda_grid: tuple = ()
    pi_plus: float = 0.5
    delta: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "loss", LossKind.parse(self.loss))


def _holdout(data, seed, fraction=0.2):
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(data))
    n_val = max(1, int(round(fraction * len(data))))
    if n_val >= len(data):
        raise InputFormatError("too few samples to hold out a validation split")
    val, tr = perm[:n_val], perm[n_val:]
    cls = type(data)
    second = data.y if isinstance(data, LabeledDataset) else data.r
    return cls(data.X[tr], second[tr]), cls(data.X[val], second[val])


def _select_lambda(cfg, exp, data):
    """Pick lambda from the grid by the method's zero-one validation score."""
    tr, val = _holdout(data, cfg.seed)
    basis = AffineBasis(data.d)
    scores = {}
    for lam in cfg.lambda_grid:
        if cfg.method is Method.SUPERVISED:
            model, _ = _fit(cfg.method, exp, None, tr, basis, lam)
            scores[lam] = 1.0 - accuracy(val, model)
        else:
            model, _ = _fit(cfg.method, exp, tr, None, basis, lam)
            scores[lam] = _validation(cfg.method, model, val)
    best = min(cfg.lambda_grid, key=lambda lam: (scores[lam], lam))
    return best, scores


def train_single(cfg):
    """Train one method on a CSV file; returns ``(model, record)``.

    The record echoes the settings used and, when ``test_path`` is given,
    the test accuracy. The model is written to ``model_out`` and the record
    to ``model_out + '.json'``.
    """
    if cfg.method is Method.SUPERVISED:
        data = read_labeled_csv(cfg.train_path)
    else:
        data = read_pconf_csv(cfg.train_path).clamped(cfg.floor)
    exp = ExperimentConfig(
        study=Study.SINGLE,
        optimizer=OptimizerConfig(step_size=cfg.lr, max_epochs=cfg.epochs, seed=cfg.seed),
        loss=cfg.loss,
        lam=cfg.lam,
        floor=cfg.floor,
        pi_plus=cfg.pi_plus,
        delta=cfg.delta,
        methods=(cfg.method,),
    )
    record = {
        "method": cfg.method.value,
        "train": str(cfg.train_path),
        "loss": cfg.loss.value,
        "lambda": cfg.lam,
        "floor": cfg.floor,
        "epochs": cfg.epochs,
        "lr": cfg.lr,
        "seed": cfg.seed,
        "n_train": len(data),
    }
    lam = cfg.lam
    if cfg.lambda_grid:
        lam, scores = _select_lambda(cfg, exp, data)
        record["lambda_grid_scores"] = {format(k, ".9g"): v for k, v in scores.items()}
        record["lambda"] = lam

    basis = AffineBasis(data.d)
    try:
        if cfg.method is Method.SUPERVISED:
            model, report = _fit(cfg.method, exp, None, data, basis, lam)
        else:
            model, report = _fit(cfg.method, exp, data, None, basis, lam)
    except DivergenceError as exc:
        raise DivergenceError(exc.epoch, f"{cfg.train_path}: {exc}") from None

    if report is not None:
        record.update(
            epochs_run=report.epochs_run,
            final_objective=report.final_objective,
            final_grad_norm=report.final_grad_norm,
        )
    if cfg.method is not Method.SUPERVISED:
        record["degenerate"] = data.is_degenerate
        record["validation_score"] = _validation(cfg.method, model, data)
        record["est_error_bound"] = _bound(model, data, exp)
    if cfg.test_path:
        record["test"] = str(cfg.test_path)
        record["test_accuracy"] = accuracy(read_labeled_csv(cfg.test_path), model)
    if cfg.model_out:
        save_model(model, cfg.model_out)
        record["model"] = str(cfg.model_out)
        Path(str(cfg.model_out) + ".json").write_text(
            json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return model, record
