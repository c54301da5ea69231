"""Command-line entry point: ``hyperego <command> ...``.

Exit codes: 0 success, 2 malformed input, 3 no eligible ego-networks,
4 training failure, 5 reconstruction failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from . import classifier as clf
from . import features as feat
from . import isect
from .egonet import ELIGIBILITY_PRESETS, EgoKind, EligibilityConfig, eligible_egos, extract_ego, write_egos
from .reconstruct import SearchConfig, evaluate_reconstruction
from .simplices import DatasetError, load_prefix, write_dataset
from .synthetic import locality_dataset

EXIT_OK, EXIT_INPUT, EXIT_NO_EGOS, EXIT_TRAIN, EXIT_RECON = 0, 2, 3, 4, 5

log = logging.getLogger("hyperego")


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------

def _load_config(path) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _eligibility(args, conf: dict) -> EligibilityConfig:
    """Per-dataset preset, overridden by the config file, overridden by flags."""
    base = ELIGIBILITY_PRESETS.get(args.preset or conf.get("preset", ""), EligibilityConfig(10, 0, True))
    over = {f.name: conf["eligibility"][f.name] for f in fields(EligibilityConfig) if f.name in conf.get("eligibility", {})}
    for name in ("min_length", "min_alters", "max_length"):
        if getattr(args, name, None) is not None:
            over[name] = getattr(args, name)
    return replace(base, **over)


def _train_config(args, conf: dict) -> clf.TrainConfig:
    kw = dict(conf.get("train", {}))
    if "hidden_sizes" in kw:
        kw["hidden_sizes"] = tuple(kw["hidden_sizes"])
    if getattr(args, "hidden", None) is not None:
        kw["hidden_sizes"] = tuple(int(h) for h in args.hidden.split(",") if h)
    if getattr(args, "logistic", False):
        kw["hidden_sizes"] = ()
    if getattr(args, "max_epochs", None) is not None:
        kw["max_epochs"] = args.max_epochs
    kw["seed"] = args.seed
    return clf.TrainConfig(**kw)


def _egos(args, conf: dict):
    try:
        ds = load_prefix(args.dataset_prefix)
    except FileNotFoundError as exc:
        raise CommandError(str(exc), EXIT_INPUT) from None
    except DatasetError as exc:
        raise CommandError(str(exc), EXIT_INPUT) from None
    cfg = _eligibility(args, conf)
    candidates = None
    if getattr(args, "ego_list", None):
        try:
            candidates = [int(v) for v in Path(args.ego_list).read_text().split()]
        except (OSError, ValueError) as exc:
            raise CommandError(f"cannot read ego list: {exc}", EXIT_INPUT) from None
    egos = list(eligible_egos(ds, args.kind, cfg, candidates))
    if getattr(args, "sample", None) and len(egos) > args.sample:
        rng = np.random.default_rng(args.seed)
        keep = sorted(rng.choice(len(egos), size=args.sample, replace=False))
        egos = [egos[i] for i in keep]
    if not egos:
        raise CommandError(f"no eligible {args.kind} ego-networks under {cfg}", EXIT_NO_EGOS)
    log.info("%d eligible %s ego-networks", len(egos), args.kind)
    return ds, egos


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_validate(args, conf):
    try:
        ds = load_prefix(args.dataset_prefix)
    except FileNotFoundError as exc:
        raise CommandError(str(exc), EXIT_INPUT) from None
    except DatasetError as exc:
        raise CommandError(str(exc), EXIT_INPUT) from None
    lo, hi = ds.time_range()
    print(f"{len(ds)} simplices, {ds.node_count} nodes, {ds.trivial_count()} trivial")
    print(f"timestamps {lo}..{hi}; {ds.duplicate_nodes_dropped} duplicate node ids collapsed")


def cmd_extract(args, conf):
    if args.ego is not None:
        try:
            ds = load_prefix(args.dataset_prefix)
            egos = [extract_ego(ds, args.ego, args.kind)]
        except DatasetError as exc:
            raise CommandError(str(exc), EXIT_INPUT) from None
        except KeyError:
            raise CommandError(f"node {args.ego} is not in any non-trivial simplex", EXIT_INPUT) from None
    else:
        _, egos = _egos(args, conf)
    path = _out(args) / f"egos-{args.kind}.txt"
    write_egos(egos, path)
    print(f"{len(egos)} {args.kind} ego-networks -> {path}")


def cmd_stats(args, conf):
    ds, egos = _egos(args, conf)
    out = _out(args)
    ext = "json" if args.format == "json" else "csv"
    for measure in args.measures.split(","):
        variants = ["ordered", "shuffled"]
        if measure in ("intersection", "density", "spread"):
            variants.append("first20")
        if measure == "arrival" and args.kind == "star":
            variants = ["ordered"]
        curves = feat.aggregate_curves(egos, measure, variants, seed=args.seed)
        for v, curve in curves.items():
            feat.write_curves([curve], out / f"{measure}-{v}.{ext}", args.format)
    rows = feat.degree_arrival_table(egos, ds.degree_index)
    _write_rows(out / f"degree-arrival.{ext}", rows, args.format)
    print(f"{len(egos)} ego-networks; curves written to {out}")


def _write_rows(path, rows, fmt):
    if fmt == "json":
        Path(path).write_text(json.dumps(rows, indent=1) + "\n")
        return
    with open(path, "w", newline="") as fh:
        if rows:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)


def _examples(args, conf):
    _, egos = _egos(args, conf)
    return egos, clf.make_training_set(egos, seed=args.seed)


def cmd_trainset(args, conf):
    _, examples = _examples(args, conf)
    names = examples[0].features.names
    rows = [{"ego": e.ego_id, "label": e.label, **{n: getattr(e.features, n) for n in names}} for e in examples]
    path = _out(args) / f"trainset-{args.kind}.{args.format}"
    _write_rows(path, rows, args.format)
    print(f"{len(examples)} examples -> {path}")


def _columns(args):
    return tuple(args.features.split(",")) if getattr(args, "features", None) else None


def cmd_train(args, conf):
    _, examples = _examples(args, conf)
    try:
        model = clf.train(examples, _train_config(args, conf), _columns(args))
    except (clf.TrainingError, ValueError) as exc:
        raise CommandError(str(exc), EXIT_TRAIN) from None
    path = _out(args) / f"model-{args.kind}.txt"
    clf.save_model(model, path)
    print(f"trained on {len(examples)} examples ({model.epochs_run} epochs); "
          f"training accuracy {clf.accuracy(model, examples):.3f} -> {path}")


def _cv(args, conf, examples):
    try:
        return clf.cross_validate(examples, args.folds, _train_config(args, conf), _columns(args))
    except (clf.TrainingError, ValueError) as exc:
        raise CommandError(str(exc), EXIT_TRAIN) from None


def _write_cv(path, res, fmt):
    if fmt == "json":
        Path(path).write_text(json.dumps({"mean": res.mean, "std": res.std, "folds": res.fold_accuracies}) + "\n")
        return
    rows = [{"fold": i, "accuracy": repr(a)} for i, a in enumerate(res.fold_accuracies)]
    rows += [{"fold": "mean", "accuracy": repr(res.mean)}, {"fold": "std", "accuracy": repr(res.std)}]
    _write_rows(path, rows, "csv")


def cmd_cv(args, conf):
    _, examples = _examples(args, conf)
    res = _cv(args, conf, examples)
    _write_cv(_out(args) / f"cv-{args.kind}.{args.format}", res, args.format)
    print(f"{args.folds}-fold accuracy {res}")


def _reconstruct(args, egos, model):
    cfg = SearchConfig(args.restarts, args.seed)
    try:
        rep = evaluate_reconstruction(egos, model, cfg, args.tie_policy, jobs=args.jobs)
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_RECON) from None
    out = _out(args)
    rep.write_csv(out / f"reconstruction-{args.kind}.csv", timing=not args.no_timing)
    if args.traces:
        rep.write_traces(out / "traces")
    return rep


def _print_summary(rep):
    for method, (mean, std) in rep.summary().items():
        print(f"{method:>10}: {mean:.3f} ± {std:.3f}")
    wins, losses, p = rep.sign_test()
    print(f"hill_climb vs random: {wins} wins, {losses} losses, sign test p={p:.3g}")


def cmd_reconstruct(args, conf):
    try:
        model = clf.load_model(args.model)
    except (OSError, ValueError) as exc:
        raise CommandError(f"cannot load model: {exc}", EXIT_INPUT) from None
    _, egos = _egos(args, conf)
    _print_summary(_reconstruct(args, egos, model))


def cmd_pipeline(args, conf):
    egos, examples = _examples(args, conf)
    res = _cv(args, conf, examples)
    out = _out(args)
    _write_cv(out / f"cv-{args.kind}.{args.format}", res, args.format)
    print(f"{args.folds}-fold accuracy {res}")
    try:
        model = clf.train(examples, _train_config(args, conf), _columns(args))
    except (clf.TrainingError, ValueError) as exc:
        raise CommandError(str(exc), EXIT_TRAIN) from None
    clf.save_model(model, out / f"model-{args.kind}.txt")
    recon = egos
    if args.recon_sample and len(egos) > args.recon_sample:
        recon = egos[: args.recon_sample]
    _print_summary(_reconstruct(args, recon, model))


def cmd_theorem(args, conf):
    instances = list(isect.small_instances(args.max_m, args.universe))
    results = isect.sweep(instances)
    path = _out(args) / "theorem-sweep.csv"
    isect.write_sweep(results, path)
    bad = [i for i, r in results if not r.holds]
    print(f"{len(results)} instances, {len(bad)} violations -> {path}")
    if bad:
        return 1
    return 0


def cmd_synth(args, conf):
    ds, egos = locality_dataset(args.egos, (args.min_m, args.max_m), seed=args.seed,
                                alter_simplex_rate=args.alter_rate, outsider_rate=args.outsider_rate)
    prefix = Path(args.out) / args.name
    write_dataset(ds, prefix)
    Path(str(prefix) + "-egos.txt").write_text("".join(f"{u}\n" for u in egos))
    print(f"{len(ds)} simplices around {len(egos)} egos -> {prefix}-*.txt")


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def _common(p, dataset=True, egos=True):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--config", help="JSON file with 'preset', 'eligibility', 'train' sections")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    if dataset:
        p.add_argument("--dataset-prefix", required=True, help="path prefix of the -nverts/-simplices/-times files")
    if egos:
        p.add_argument("--kind", choices=[k.value for k in EgoKind], default="star")
        p.add_argument("--preset", choices=sorted(ELIGIBILITY_PRESETS))
        p.add_argument("--min-length", type=int)
        p.add_argument("--max-length", type=int)
        p.add_argument("--min-alters", type=int)
        p.add_argument("--sample", type=int, help="seeded sample of this many eligible egos")
        p.add_argument("--ego-list", help="file of whitespace-separated node ids to consider as egos")


def _training(p):
    p.add_argument("--hidden", help="comma-separated hidden layer sizes (default 100,24)")
    p.add_argument("--logistic", action="store_true", help="no hidden layers")
    p.add_argument("--max-epochs", type=int)
    p.add_argument("--features", help="comma-separated subset of feature columns")


def _search(p):
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--tie-policy", choices=("exclude", "ordinal"), default="exclude")
    p.add_argument("--traces", action="store_true", help="write one JSON search trace per ego")
    p.add_argument("--no-timing", action="store_true", help="leave the seconds column empty")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperego", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a three-file dataset and summarize it")
    p.add_argument("--dataset-prefix", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("extract", help="write eligible ego-networks (or one, with --ego)")
    _common(p)
    p.add_argument("--ego", type=int)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("stats", help="measure curves (ordered / shuffled / first 20%%)")
    _common(p)
    p.add_argument("--measures", default="intersection,spread,arrival,novelty,size")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("trainset", help="write the labeled feature table")
    _common(p)
    p.set_defaults(func=cmd_trainset)

    p = sub.add_parser("train", help="train and save an ordering classifier")
    _common(p)
    _training(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cv", help="k-fold cross-validated accuracy")
    _common(p)
    _training(p)
    p.add_argument("--folds", type=int, default=10)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("reconstruct", help="hill-climb reconstruction with a saved model")
    _common(p)
    _search(p)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("pipeline", help="cv + train + reconstruct in one go")
    _common(p)
    _training(p)
    _search(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--recon-sample", type=int, help="reconstruct only the first N egos")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("theorem", help="exhaustive local-search ratio sweep")
    _common(p, dataset=False, egos=False)
    p.add_argument("--max-m", type=int, default=5)
    p.add_argument("--universe", type=int, default=4)
    p.set_defaults(func=cmd_theorem)

    p = sub.add_parser("synth", help="write a synthetic locality dataset")
    _common(p, dataset=False, egos=False)
    p.add_argument("--name", default="synthetic")
    p.add_argument("--egos", type=int, default=500)
    p.add_argument("--min-m", type=int, default=10)
    p.add_argument("--max-m", type=int, default=20)
    p.add_argument("--alter-rate", type=float, default=0.0)
    p.add_argument("--outsider-rate", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        conf = _load_config(getattr(args, "config", None))
        return args.func(args, conf) or EXIT_OK
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
