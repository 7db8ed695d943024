"""Command-line interface: ``pconf generate|train|eval|study|bound``.

Every subcommand accepts ``--config FILE`` with flat ``key=value`` lines
named after the long flags (``lambda=0.1``, ``model-out=m.txt``); flags
given on the command line win.

Exit codes: 0 success, 2 input-format error, 3 numerical or divergence
error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from pconf.data import (
    NoisySpec,
    TwoGaussianSpec,
    noisy_confidence_model,
    sample_labeled_dataset,
    sample_pconf_dataset,
)
from pconf.errors import DomainError, InputFormatError, NumericalError, ShapeError
from pconf.fileio import (
    parse_vector,
    read_keyvalue,
    read_labeled_csv,
    write_labeled_csv,
    write_pconf_csv,
)
from pconf.harness import (
    OVERLAP_MEANS,
    ExperimentConfig,
    Method,
    SingleRunConfig,
    Study,
    run_study,
    train_single,
)
from pconf.loss import TRAINABLE_LOSSES, LossKind, loss_constants
from pconf.model import load_model
from pconf.optim import OptimizerConfig
from pconf.risk import accuracy
from pconf.theory import BoundInputs, estimation_error_bound, rademacher_linear, uniform_deviation_bound

EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 2, 3, 4

LOSS_CHOICES = [k.value for k in TRAINABLE_LOSSES]


def _mu_list(text):
    """``"3,3"`` or ``"2,2 3,3"`` -> tuple of mean vectors."""
    return tuple(parse_vector(chunk) for chunk in str(text).split())


def _int_list(text):
    return tuple(int(v) for v in str(text).replace(",", " ").split())


def _float_list(text):
    return tuple(float(v) for v in str(text).replace(",", " ").split())


def build_parser():
    parser = argparse.ArgumentParser(prog="pconf", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--config", help="key=value file of defaults for this command")
        return p

    g = add("generate", help="sample a synthetic two-Gaussian dataset")
    g.add_argument("--spec", required=True, help="key=value dataset description")
    g.add_argument("--out", required=True)

    t = add("train", help="train one method on a CSV file")
    t.add_argument("--method", choices=[m.value for m in Method], default="pconf")
    t.add_argument("--train", dest="train_path")
    t.add_argument("--loss", choices=LOSS_CHOICES, default="logistic")
    t.add_argument("--lambda", dest="lam", type=float, default=0.0)
    t.add_argument("--lambda-grid", type=_float_list, default=(),
                   help="select lambda from these values by zero-one validation score")
    t.add_argument("--floor", type=float, default=0.01)
    t.add_argument("--epochs", type=int, default=10_000)
    t.add_argument("--lr", type=float, default=1e-3)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--model-out")
    t.add_argument("--test", dest="test_path")

    e = add("eval", help="accuracy of a saved model on a labeled CSV")
    e.add_argument("--model")
    e.add_argument("--test")

    s = add("study", help="run a replication study")
    s.add_argument("study", choices=[Study.OVERLAP.value, Study.NOISE.value])
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--mu-minus", type=_mu_list, default=OVERLAP_MEANS,
                   help='space-separated negative means, e.g. "2,2 3,3"')
    s.add_argument("--m", dest="ms", type=_int_list, default=(1000, 500, 100))
    s.add_argument("--methods", type=lambda v: tuple(str(v).replace(",", " ").split()))
    s.add_argument("--epochs", type=int, default=10_000)
    s.add_argument("--lr", type=float, default=1e-3)
    s.add_argument("--jobs", type=int, default=1)

    b = add("bound", help="evaluate the uniform deviation and estimation error bounds")
    b.add_argument("--n", type=int)
    b.add_argument("--pi-plus", type=float, default=0.5)
    b.add_argument("--c-r", type=float)
    b.add_argument("--loss", choices=LOSS_CHOICES, default="logistic")
    b.add_argument("--c-w", type=float)
    b.add_argument("--c-phi", type=float)
    b.add_argument("--delta", type=float, default=0.05)
    return parser


def _apply_config(parser, argv):
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    sub = parser._subparsers._group_actions[0].choices[args.command]
    dests = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                dests[opt[2:].replace("-", "_")] = action
    defaults = {}
    for key, raw in read_keyvalue(args.config).items():
        action = dests.get(key)
        if action is None:
            raise InputFormatError(f"{args.config}: unknown key {key!r}")
        value = action.type(raw) if action.type else raw
        if action.choices is not None and value not in action.choices:
            raise InputFormatError(f"{args.config}: invalid value {raw!r} for {key!r}")
        defaults[action.dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise InputFormatError("missing required option(s): " + ", ".join(missing))


def cmd_generate(args):
    kv = read_keyvalue(args.spec)
    kind = kv.get("kind", "pconf")
    try:
        mu_plus = parse_vector(kv.get("mu_plus", "0,0"))
        spec = TwoGaussianSpec(
            mu_plus=mu_plus,
            mu_minus=parse_vector(kv.get("mu_minus", "2,2")),
            pi_plus=float(kv.get("pi_plus", 0.5)),
            seed=int(kv.get("seed", 0)),
        )
        n_pos = int(kv.get("n_pos", 1000))
        n_neg = int(kv.get("n_neg", 1000))
    except ValueError as exc:
        raise InputFormatError(f"{args.spec}: {exc}") from None
    if kind == "pconf":
        confidence = None
        if "noisy_m" in kv:
            noisy = NoisySpec(m=int(kv["noisy_m"]), seed=int(kv.get("noisy_seed", spec.seed + 1)))
            confidence = noisy_confidence_model(spec, noisy)
        write_pconf_csv(args.out, sample_pconf_dataset(spec, n_pos, confidence))
    elif kind == "labeled":
        write_labeled_csv(args.out, sample_labeled_dataset(spec, n_pos, n_neg))
    else:
        raise InputFormatError(f"{args.spec}: kind must be 'pconf' or 'labeled', got {kind!r}")
    print(f"wrote {args.out}")


def cmd_train(args):
    _require(args, "train_path")
    cfg = SingleRunConfig(
        method=args.method,
        train_path=args.train_path,
        loss=args.loss,
        lam=args.lam,
        floor=args.floor,
        epochs=args.epochs,
        lr=args.lr,
        seed=args.seed,
        model_out=args.model_out,
        test_path=args.test_path,
        lambda_grid=tuple(args.lambda_grid),
    )
    _, record = train_single(cfg)
    print(json.dumps(record, indent=2, sort_keys=True))


def cmd_eval(args):
    _require(args, "model", "test")
    model = load_model(args.model)
    test = read_labeled_csv(args.test)
    if test.d != model.basis.d:
        raise InputFormatError(f"{args.test}: model expects {model.basis.d} features, file has {test.d}")
    margins = model.margins(test.X)
    print(f"accuracy {accuracy(test, model):.9g}")
    print(f"n {len(test)}")
    print(f"margin_mean {np.mean(margins):.9g}")
    print(f"margin_std {np.std(margins):.9g}")
    print(f"margin_min {np.min(margins):.9g}")
    print(f"margin_max {np.max(margins):.9g}")


def cmd_study(args):
    config = ExperimentConfig(
        study=args.study,
        mu_minus=args.mu_minus,
        ms=args.ms,
        trials=args.trials,
        methods=args.methods,
        seed=args.seed,
        optimizer=OptimizerConfig(step_size=args.lr, max_epochs=args.epochs),
        jobs=args.jobs,
    )
    _, summary = run_study(config, args.out)
    for row in summary:
        m = "" if row.m is None else f" m={row.m}"
        mark = "*" if row.best_or_equivalent else " "
        print(
            f"mu-={list(row.mu_minus)}{m} {row.method:<10} "
            f"{100 * row.mean_accuracy:6.2f} +- {100 * row.std_accuracy:5.2f} {mark}"
        )


def cmd_bound(args):
    _require(args, "n", "c_r", "c_w", "c_phi")
    c_g = args.c_w * args.c_phi
    c_ell, l_ell = loss_constants(args.loss, c_g)
    rad = rademacher_linear(args.c_w, args.c_phi, args.n)
    b = BoundInputs(args.n, args.pi_plus, args.c_r, c_ell, l_ell, rad, args.delta)
    print(f"C_g {c_g:.9g}")
    print(f"C_ell {c_ell:.9g}")
    print(f"L_ell {l_ell:.9g}")
    print(f"rademacher {rad:.9g}")
    print(f"uniform_deviation_bound {uniform_deviation_bound(b):.9g}")
    print(f"estimation_error_bound {estimation_error_bound(b):.9g}")


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "eval": cmd_eval,
    "study": cmd_study,
    "bound": cmd_bound,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        COMMANDS[args.command](args)
    except (InputFormatError, DomainError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
