"""Command-line entry point for reproducible classification experiments.

Subcommands:

* ``synth``       generate the cross-plane dataset as train/test CSVs
* ``train``       split, normalize, grid-search, fit, and report one model
* ``predict``     apply a saved model to a feature CSV
* ``benchmark``   compare variants over datasets with rank statistics
* ``noise-sweep`` repeat the train pipeline under injected label noise
* ``stats``       recompute rank statistics from an accuracy CSV

Options resolve as: command-line flag, then ``--config`` file entry
(flat ``key=value`` lines, ``#`` comments), then the built-in default.
Every run writes ``run.meta``, an echo of the fully resolved options that
can itself be replayed as a config file. All randomness derives from the
single ``seed`` option, expanded deterministically per pipeline stage.

Exit codes: 0 success (including tolerated per-dataset benchmark
failures), 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys

import numpy as np

from . import datakit, evalstats, models
from .datakit import SplitPlan
from .errors import EigensvmError
from .evalstats import DEFAULT_GRID, NEMENYI_Q_ALPHA_05, GridSpec
from .kernels import GAUSSIAN, LINEAR
from .models import Variant

log = logging.getLogger(__name__)

VARIANT_NAMES = tuple(v.value for v in Variant)

_STAGE = {"synth": 11, "split": 12, "cv": 13, "noise": 14}


class ConfigError(Exception):
    """Bad option value or config file; maps to exit code 2."""


def stage_seed(master: int, stage: str, *extra: int) -> int:
    """Expand the master seed into a decorrelated per-stage seed."""
    ss = np.random.SeedSequence((int(master), _STAGE[stage], *[int(e) for e in extra]))
    return int(ss.generate_state(1)[0])


# ---------------------------------------------------------------- options

def _parse_int(raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"expected an integer, got {raw!r}") from None


def _parse_float(raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"expected a number, got {raw!r}") from None


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected true/false, got {raw!r}")


def _parse_str(raw: str) -> str:
    return raw.strip()


def _parse_opt_float(raw: str):
    raw = raw.strip()
    return None if raw == "" else _parse_float(raw)


def _parse_float_list(raw: str):
    raw = raw.strip()
    if raw == "":
        return ()
    return tuple(_parse_float(tok) for tok in raw.split(","))


def _parse_int_pair(raw: str):
    toks = raw.split(",")
    if len(toks) != 2:
        raise ConfigError(f"expected two comma-separated counts, got {raw!r}")
    pair = tuple(_parse_int(t) for t in toks)
    if any(v < 0 for v in pair):
        raise ConfigError(f"counts must be nonnegative, got {raw!r}")
    return pair


def _parse_variant(raw: str) -> str:
    name = raw.strip().lower()
    if name not in VARIANT_NAMES:
        raise ConfigError(f"unknown variant {raw!r}; choose from {', '.join(VARIANT_NAMES)}")
    return name


def _parse_variants(raw: str):
    names = tuple(_parse_variant(tok) for tok in raw.split(","))
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate variant in {raw!r}")
    return names


def _parse_kernel(raw: str) -> str:
    kind = raw.strip().lower()
    if kind not in (LINEAR, GAUSSIAN):
        raise ConfigError(f"unknown kernel {raw!r}; choose {LINEAR} or {GAUSSIAN}")
    return kind


def _parse_levels(raw: str):
    levels = _parse_float_list(raw)
    if not levels:
        raise ConfigError("levels must not be empty")
    if any(not 0.0 <= lv <= 100.0 for lv in levels):
        raise ConfigError(f"levels are percentages in [0,100], got {raw!r}")
    return levels


def _parse_paths(raw: str):
    paths = tuple(tok.strip() for tok in raw.split(",") if tok.strip())
    if not paths:
        raise ConfigError("expected at least one path")
    return paths


REQUIRED = object()

_GRID_OPTS = {
    "kernel": (LINEAR, _parse_kernel, "classifier kernel: linear or gaussian"),
    "folds": ("10", _parse_int, "cross-validation folds"),
    "delta-grid": ("", _parse_float_list, "comma list for delta (empty: 2^-8..2^8)"),
    "eta-grid": ("", _parse_float_list, "comma list for eta (empty: 2^-8..2^8)"),
    "sigma-grid": ("", _parse_float_list, "comma list for sigma (empty: 2^-8..2^8)"),
    "delta": ("", _parse_opt_float, "fix delta instead of searching"),
    "eta": ("", _parse_opt_float, "fix eta instead of searching"),
    "sigma": ("", _parse_opt_float, "fix sigma instead of searching"),
}

_SPLIT_OPTS = {
    "train-fraction": ("0.7", _parse_float, "train share of the split"),
    "normalize": ("true", _parse_bool, "min-max scale features to [0,1] on train"),
}

OPTIONS = {
    "synth": {
        "per-class": ("20", _parse_int, "training points per class"),
        "outliers": ("8,7", _parse_int_pair, "outliers appended to +1,-1"),
        "test-per-class": ("72", _parse_int, "test points per class"),
        "test-noise": ("2.5", _parse_float, "uniform +-noise on test coordinates"),
        "jitter": ("0.5", _parse_float, "uniform +-jitter on outlier coordinates"),
        "seed": ("0", _parse_int, "master seed"),
        "out": ("out", _parse_str, "output directory"),
    },
    "train": {
        "data": (REQUIRED, _parse_str, "dataset CSV (label in last column)"),
        "variant": (REQUIRED, _parse_variant, "one of " + ", ".join(VARIANT_NAMES)),
        **_SPLIT_OPTS,
        **_GRID_OPTS,
        "seed": ("0", _parse_int, "master seed"),
        "out": ("out", _parse_str, "output directory"),
    },
    "predict": {
        "model": (REQUIRED, _parse_str, "model file written by train"),
        "data": (REQUIRED, _parse_str, "feature CSV (optional label last column)"),
        "scaler": ("", _parse_str, "scaler file written by train (optional)"),
        "out": ("out", _parse_str, "output directory"),
    },
    "benchmark": {
        "datasets": (REQUIRED, _parse_paths, "comma list of dataset CSVs"),
        "variants": (",".join(VARIANT_NAMES), _parse_variants, "comma list of variants"),
        **_SPLIT_OPTS,
        **_GRID_OPTS,
        "q-alpha": ("auto", _parse_str, "Nemenyi critical value or 'auto'"),
        "seed": ("0", _parse_int, "master seed"),
        "out": ("out", _parse_str, "output directory"),
    },
    "noise-sweep": {
        "data": (REQUIRED, _parse_str, "dataset CSV (label in last column)"),
        "variants": (",".join(VARIANT_NAMES), _parse_variants, "comma list of variants"),
        "levels": ("0,5,10,15,20", _parse_levels, "label-noise percentages"),
        **_SPLIT_OPTS,
        **_GRID_OPTS,
        "seed": ("0", _parse_int, "master seed"),
        "out": ("out", _parse_str, "output directory"),
    },
    "stats": {
        "accuracy": (REQUIRED, _parse_str, "accuracy CSV: dataset,model,accuracy"),
        "q-alpha": ("auto", _parse_str, "Nemenyi critical value or 'auto'"),
        "out": ("out", _parse_str, "output directory"),
    },
}


def _read_config(path: str) -> dict:
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    cfg = {}
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {text!r}")
        key, value = text.split("=", 1)
        cfg[key.strip()] = value.strip()
    return cfg


def resolve_options(command: str, args: argparse.Namespace) -> dict:
    """Merge flags over config over defaults into typed values.

    The raw strings are kept under the ``_raw`` key for the run.meta echo.
    """
    spec = OPTIONS[command]
    cfg = _read_config(args.config) if args.config else {}
    unknown = set(cfg) - set(spec)
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {', '.join(sorted(unknown))}")
    resolved, raws = {}, {}
    for key, (default, parse, _help) in spec.items():
        flag_val = getattr(args, key.replace("-", "_"))
        if flag_val is not None:
            raw = flag_val
        elif key in cfg:
            raw = cfg[key]
        elif default is REQUIRED:
            raise ConfigError(f"missing required option --{key}")
        else:
            raw = default
        try:
            resolved[key] = parse(raw)
        except ConfigError as exc:
            raise ConfigError(f"option {key}: {exc}") from None
        raws[key] = raw
    resolved["_raw"] = raws
    return resolved


# ---------------------------------------------------------------- outputs

def _write_atomic(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _write_atomic(path, buf.getvalue())


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_meta(outdir: str, command: str, resolved: dict) -> None:
    lines = [f"# command: {command}"]
    for key in sorted(resolved["_raw"]):
        lines.append(f"{key}={resolved['_raw'][key]}")
    _write_atomic(os.path.join(outdir, "run.meta"), "\n".join(lines) + "\n")


def _ensure_outdir(resolved: dict) -> str:
    outdir = resolved["out"]
    os.makedirs(outdir, exist_ok=True)
    return outdir


# ---------------------------------------------------------------- pipeline

def _make_grid(o: dict, cv_seed: int) -> GridSpec:
    def axis(grid_key, fixed_key):
        if o[fixed_key] is not None:
            return (o[fixed_key],)
        if o[grid_key]:
            return o[grid_key]
        return DEFAULT_GRID

    return GridSpec(
        delta_grid=axis("delta-grid", "delta"),
        eta_grid=axis("eta-grid", "eta"),
        sigma_grid=axis("sigma-grid", "sigma"),
        folds=o["folds"],
        seed=cv_seed,
    )


def _prepare(ds, o: dict, split_seed: int):
    plan = SplitPlan(train_fraction=o["train-fraction"], seed=split_seed)
    train, test = datakit.split(ds, plan)
    scaler = None
    if o["normalize"]:
        train, [test], scaler = datakit.minmax_normalize(train, [test])
    return train, test, scaler


def _chosen_sigma(hp) -> float | None:
    if hp.kernel.kind == GAUSSIAN:
        return hp.kernel.sigma
    if hp.if_params is not None and hp.if_params.score_kernel is not None:
        return hp.if_params.score_kernel.sigma
    return None


def _cv_rows(cv_table) -> list[list]:
    return [
        [_fmt(cell["delta"]), _fmt(cell["eta"]), _fmt(cell["sigma"]), _fmt(cell["accuracy"])]
        for cell in cv_table
    ]


# ---------------------------------------------------------------- commands

def cmd_synth(o: dict) -> None:
    outdir = _ensure_outdir(o)
    train, test = datakit.gen_crossplane(
        o["per-class"],
        outliers_pos=o["outliers"][0],
        outliers_neg=o["outliers"][1],
        seed=stage_seed(o["seed"], "synth"),
        test_per_class=o["test-per-class"],
        test_noise=o["test-noise"],
        outlier_jitter=o["jitter"],
    )
    for ds, stem in ((train, "crossplane_train"), (test, "crossplane_test")):
        tmp = os.path.join(outdir, stem + ".csv.tmp")
        datakit.save_csv(ds, tmp)
        os.replace(tmp, os.path.join(outdir, stem + ".csv"))
    _write_meta(outdir, "synth", o)
    log.info("wrote %s/crossplane_train.csv (%d rows) and crossplane_test.csv (%d rows)",
             outdir, train.m, test.m)


def cmd_train(o: dict) -> None:
    outdir = _ensure_outdir(o)
    ds = datakit.load_csv(o["data"])
    train, test, scaler = _prepare(ds, o, stage_seed(o["seed"], "split"))
    grid = _make_grid(o, stage_seed(o["seed"], "cv"))
    variant = Variant(o["variant"])
    best_hp, cv_table, model, train_acc, test_acc = evalstats.evaluate_split(
        train, test, variant, grid, o["kernel"]
    )
    tmp = os.path.join(outdir, "model.txt.tmp")
    models.save_model(model, tmp)
    os.replace(tmp, os.path.join(outdir, "model.txt"))
    if scaler is not None:
        tmp = os.path.join(outdir, "scaler.txt.tmp")
        datakit.save_scaler(scaler, tmp)
        os.replace(tmp, os.path.join(outdir, "scaler.txt"))
    _write_csv(
        os.path.join(outdir, "cv_table.csv"),
        ["delta", "eta", "sigma", "accuracy"],
        _cv_rows(cv_table),
    )
    report = [
        ["variant", variant.value],
        ["kernel", o["kernel"]],
        ["delta", _fmt(best_hp.delta)],
        ["eta", _fmt(best_hp.eta if variant.uses_eta else None)],
        ["sigma", _fmt(_chosen_sigma(best_hp))],
        ["train_accuracy", _fmt(train_acc)],
        ["test_accuracy", _fmt(test_acc)],
    ]
    _write_csv(os.path.join(outdir, "report.csv"), ["key", "value"], report)
    _write_meta(outdir, "train", o)
    log.info("%s train accuracy %.2f, test accuracy %.2f", variant.value, train_acc, test_acc)


def cmd_predict(o: dict) -> None:
    outdir = _ensure_outdir(o)
    model = models.load_model(o["model"])
    raw = datakit.load_matrix(o["data"])
    n = model.n_features
    truth = None
    if raw.shape[1] == n:
        X = raw
    elif raw.shape[1] == n + 1:
        truth = datakit.map_raw_labels(raw[:, -1], o["data"])
        X = raw[:, :-1]
    else:
        raise EigensvmError(
            f"{o['data']}: {raw.shape[1]} columns, expected {n} features "
            f"(or {n + 1} with a trailing label)"
        )
    if o["scaler"]:
        X = datakit.load_scaler(o["scaler"]).apply(X)
    preds = models.predict(model, X)
    if truth is None:
        rows = [[int(p)] for p in preds]
        _write_csv(os.path.join(outdir, "predictions.csv"), ["prediction"], rows)
    else:
        rows = [[int(p), int(t)] for p, t in zip(preds, truth)]
        _write_csv(os.path.join(outdir, "predictions.csv"), ["prediction", "truth"], rows)
        acc = evalstats.accuracy(preds, truth)
        print(f"accuracy {acc}")
    _write_meta(outdir, "predict", o)


def _resolve_q_alpha(raw: str, q: int) -> float:
    if raw.strip().lower() == "auto":
        return NEMENYI_Q_ALPHA_05.get(q, float("nan"))
    return _parse_float(raw)


def _emit_rank_stats(outdir: str, acc_table: dict, model_order: list, q_alpha_raw: str) -> None:
    """Write ranks.csv, stats.csv, and wtl.csv for a complete accuracy table."""
    ranks = evalstats.average_ranks(acc_table)
    N, q = len(acc_table), len(model_order)
    _write_csv(
        os.path.join(outdir, "ranks.csv"),
        ["model", "avg_rank"],
        [[mdl, _fmt(ranks[mdl])] for mdl in model_order],
    )
    try:
        chi2_f, f_f = evalstats.friedman(
            [ranks[mdl] for mdl in model_order], N, q
        )
    except EigensvmError as exc:
        log.warning("Friedman statistics unavailable: %s", exc)
        chi2_f = f_f = float("nan")
    q_alpha = _resolve_q_alpha(q_alpha_raw, q)
    cd = evalstats.nemenyi_cd(q, N, q_alpha) if np.isfinite(q_alpha) else float("nan")
    wtl_rows = []
    threshold = float("nan")
    for a in model_order:
        for b in model_order:
            if a == b:
                continue
            r = evalstats.win_tie_loss(acc_table, a, b)
            threshold = r.threshold
            wtl_rows.append([a, b, r.wins, r.ties, r.losses, _fmt(r.significant)])
    stats_rows = [
        ["n_datasets", str(N)],
        ["n_models", str(q)],
        ["chi2_f", _fmt(chi2_f)],
        ["f_f", _fmt(f_f)],
        ["q_alpha", _fmt(q_alpha)],
        ["cd", _fmt(cd)],
        ["wtl_threshold", _fmt(threshold)],
    ]
    _write_csv(os.path.join(outdir, "stats.csv"), ["statistic", "value"], stats_rows)
    _write_csv(
        os.path.join(outdir, "wtl.csv"),
        ["model_a", "model_b", "wins", "ties", "losses", "significant"],
        wtl_rows,
    )


def cmd_benchmark(o: dict) -> None:
    outdir = _ensure_outdir(o)
    variants = o["variants"]
    if len(variants) < 2:
        raise ConfigError("benchmark needs at least two variants")
    acc_table: dict = {}
    params_rows, excluded = [], []
    for di, path in enumerate(o["datasets"]):
        try:
            ds = datakit.load_csv(path)
            name = ds.name
            if name in acc_table:
                name = f"{name}#{di}"
            train, test, _ = _prepare(ds, o, stage_seed(o["seed"], "split", di))
            row = {}
            for vname in variants:
                grid = _make_grid(o, stage_seed(o["seed"], "cv", di))
                best_hp, _, _, _, test_acc = evalstats.evaluate_split(
                    train, test, Variant(vname), grid, o["kernel"]
                )
                row[vname] = test_acc
                params_rows.append(
                    [name, vname, _fmt(best_hp.delta),
                     _fmt(best_hp.eta if Variant(vname).uses_eta else None),
                     _fmt(_chosen_sigma(best_hp))]
                )
            acc_table[name] = row
        except (EigensvmError, OSError) as exc:
            log.warning("excluding dataset %s: %s", path, exc)
            excluded.append([path, str(exc)])
    acc_rows = [
        [name, vname, _fmt(acc_table[name][vname])]
        for name in acc_table
        for vname in variants
    ]
    _write_csv(os.path.join(outdir, "accuracy.csv"), ["dataset", "model", "accuracy"], acc_rows)
    _write_csv(
        os.path.join(outdir, "params.csv"),
        ["dataset", "model", "delta", "eta", "sigma"],
        params_rows,
    )
    _write_csv(os.path.join(outdir, "excluded.csv"), ["dataset", "error"], excluded)
    if acc_table:
        _emit_rank_stats(outdir, acc_table, list(variants), o["q-alpha"])
    _write_meta(outdir, "benchmark", o)
    log.info("benchmark finished: %d dataset(s), %d excluded", len(acc_table), len(excluded))


def cmd_noise_sweep(o: dict) -> None:
    outdir = _ensure_outdir(o)
    ds = datakit.load_csv(o["data"])
    plan = SplitPlan(train_fraction=o["train-fraction"], seed=stage_seed(o["seed"], "split"))
    train_raw, test_raw = datakit.split(ds, plan)
    rows = []
    for level in o["levels"]:
        # noise goes into the training labels only; the test set stays clean
        noise_seed = stage_seed(o["seed"], "noise", int(round(level * 100)))
        noisy = datakit.inject_label_noise(train_raw, level / 100.0, noise_seed)
        if o["normalize"]:
            train, [test], _ = datakit.minmax_normalize(noisy, [test_raw])
        else:
            train, test = noisy, test_raw
        grid = _make_grid(o, stage_seed(o["seed"], "cv"))
        for vname in o["variants"]:
            _, _, _, _, test_acc = evalstats.evaluate_split(
                train, test, Variant(vname), grid, o["kernel"]
            )
            rows.append([_fmt(float(level)), vname, _fmt(test_acc)])
    _write_csv(os.path.join(outdir, "noise.csv"), ["noise_level", "model", "accuracy"], rows)
    _write_meta(outdir, "noise-sweep", o)


def _read_accuracy_csv(path: str):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows or [c.strip() for c in rows[0]] != ["dataset", "model", "accuracy"]:
        raise EigensvmError(f"{path}: expected header dataset,model,accuracy")
    table: dict = {}
    model_order: list = []
    for row in rows[1:]:
        if len(row) != 3:
            raise EigensvmError(f"{path}: malformed row {row!r}")
        name, mdl, acc = row[0].strip(), row[1].strip(), float(row[2])
        table.setdefault(name, {})[mdl] = acc
        if mdl not in model_order:
            model_order.append(mdl)
    if not table:
        raise EigensvmError(f"{path}: no accuracy rows")
    return table, model_order


def cmd_stats(o: dict) -> None:
    outdir = _ensure_outdir(o)
    table, model_order = _read_accuracy_csv(o["accuracy"])
    _emit_rank_stats(outdir, table, model_order, o["q-alpha"])
    _write_meta(outdir, "stats", o)


COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "predict": cmd_predict,
    "benchmark": cmd_benchmark,
    "noise-sweep": cmd_noise_sweep,
    "stats": cmd_stats,
}


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigensvm",
        description="Eigenvalue-based proximal SVM classifiers and benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, spec in OPTIONS.items():
        p = sub.add_parser(command, help=f"{command} command")
        p.add_argument("--config", default=None, help="key=value config file")
        for key, (default, _parse, help_text) in spec.items():
            shown = "required" if default is REQUIRED else f"default: {default or '(empty)'}"
            p.add_argument(f"--{key}", default=None, help=f"{help_text} ({shown})")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        resolved = resolve_options(args.command, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        COMMANDS[args.command](resolved)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EigensvmError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
