"""Experiment driver.

One executable with five subcommands: ``synth`` writes a generated corpus
file, ``ingest`` summarizes a corpus, ``train`` fits one ensemble per word
and saves model plus training log, ``eval`` runs the cross-validated
benchmark with significance tests and optional error curves, and ``bench``
times the weak-rule search with and without per-round candidate sampling.

Every flag can also be given in a flat ``key = value`` config file passed
with --config; explicit flags win over the file. All artifacts are
deterministic functions of (inputs, config, seed).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from .baselines import (
    HammingKnnClassifier,
    MostFrequentSenseClassifier,
    SparseNaiveBayesClassifier,
)
from .boosting import BoostClassifier
from .corpus import CorpusFormatError, build_datasets, load_corpus, write_corpus
from .evaluation import (
    compare_cv,
    compare_table,
    cross_validate,
    curve_rejection,
    make_folds,
    summary_table,
    time_weak_learner,
    write_accuracy_csv,
    write_comparison_csv,
    write_curve_csv,
)
from .model_io import SenseModel, save_model
from .synth import CorpusSpec, generate_corpus


class ConfigError(ValueError):
    pass


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_OPTION_TYPES = {
    "corpus": str,
    "synth": str,
    "algo": str,
    "rounds": int,
    "stop_error": float,
    "smoothing": float,
    "filter": str,
    "filter_param": int,
    "sample_p": float,
    "knn_k": int,
    "folds": int,
    "seed": int,
    "out": str,
    "jobs": int,
    "stratify": _parse_bool,
    "curve_rounds": str,
    "curve_rejection": str,
    "curve_methods": str,
}

_DEFAULTS = {
    "corpus": None,
    "synth": None,
    "algo": "boost,nb,knn,mfs",
    "rounds": 750,
    "stop_error": 0.05,
    "smoothing": None,
    "filter": "none",
    "filter_param": None,
    "sample_p": 1.0,
    "knn_k": 15,
    "folds": 10,
    "seed": 0,
    "out": None,
    "jobs": os.cpu_count() or 1,
    "stratify": True,
    "curve_rounds": None,
    "curve_rejection": None,
    "curve_methods": "freq,lfreq,rlm",
}

_ALGOS = ("mfs", "nb", "knn", "boost")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_RUNTIME = 4


def _load_config(path) -> dict:
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for line_no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in _OPTION_TYPES:
            raise ConfigError(f"{path}:{line_no}: unknown option {key!r}")
        try:
            values[key] = _OPTION_TYPES[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{line_no}: bad value for {key}: {exc}") from exc
    return values


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="flat key = value config file")
    shared.add_argument("--corpus", help="corpus file to read")
    shared.add_argument("--synth", help="synthetic corpus spec, e.g. words=15,m=1000,k=4:30,noise=0.1:0.3")
    shared.add_argument("--algo", help="comma list from mfs,nb,knn,boost")
    shared.add_argument("--rounds", type=int, help="weak-rule cap per word")
    shared.add_argument("--stop-error", type=float, help="stop once training error falls below this")
    shared.add_argument("--smoothing", type=float, help="confidence smoothing constant (default 1/(m*k))")
    shared.add_argument("--filter", choices=("none", "freq", "lfreq", "rlm"), help="attribute filter")
    shared.add_argument("--filter-param", type=int, help="filter threshold or budget")
    shared.add_argument("--sample-p", type=float, help="per-round candidate sampling proportion")
    shared.add_argument("--knn-k", type=int, help="neighbour count for knn")
    shared.add_argument("--folds", type=int, help="cross-validation folds")
    shared.add_argument("--seed", type=int, help="master seed")
    shared.add_argument("--out", help="output file (synth) or directory (train/eval)")
    shared.add_argument("--jobs", type=int, help="worker processes for per-word fan-out")
    shared.add_argument(
        "--no-stratify",
        action="store_const",
        const=False,
        dest="stratify",
        help="plain shuffled folds instead of stratified ones",
    )
    shared.add_argument("--curve-rounds", help="comma list of ensemble-size checkpoints")
    shared.add_argument("--curve-rejection", help="comma list of rejection levels in [0,1)")
    shared.add_argument("--curve-methods", help="filters swept by --curve-rejection")

    parser = argparse.ArgumentParser(
        prog="senseboost",
        description="boosted word sense disambiguation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[shared], help="write a synthetic corpus file").set_defaults(handler=cmd_synth)
    sub.add_parser("ingest", parents=[shared], help="summarize a corpus").set_defaults(handler=cmd_ingest)
    sub.add_parser("train", parents=[shared], help="train one model per word").set_defaults(handler=cmd_train)
    sub.add_parser("eval", parents=[shared], help="cross-validated benchmark").set_defaults(handler=cmd_eval)
    sub.add_parser("bench", parents=[shared], help="time full vs sampled rule search").set_defaults(handler=cmd_bench)
    return parser


def _resolve(args: argparse.Namespace) -> SimpleNamespace:
    config = _load_config(args.config) if args.config else {}
    merged = {}
    for key, default in _DEFAULTS.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            merged[key] = cli_value
        elif key in config:
            merged[key] = config[key]
        else:
            merged[key] = default
    return SimpleNamespace(command=args.command, **merged)


def _load_datasets(opts):
    if opts.corpus and opts.synth:
        raise ConfigError("give either --corpus or --synth, not both")
    if opts.corpus:
        instances = load_corpus(opts.corpus)
    elif opts.synth:
        try:
            spec = CorpusSpec.from_string(opts.synth)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        instances = generate_corpus(spec, opts.seed)
    else:
        raise ConfigError("need a corpus: pass --corpus PATH or --synth SPEC")
    return build_datasets(instances)


def _out_dir(opts) -> Path:
    if not opts.out:
        raise ConfigError("this command needs --out")
    path = Path(opts.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _parse_algos(opts):
    algos = [a.strip() for a in opts.algo.split(",") if a.strip()]
    for algo in algos:
        if algo not in _ALGOS:
            raise ConfigError(f"unknown algorithm {algo!r} (choose from {', '.join(_ALGOS)})")
    if not algos:
        raise ConfigError("empty --algo list")
    return algos


def _make_estimator(algo, opts, dataset):
    if algo == "mfs":
        return MostFrequentSenseClassifier()
    if algo == "nb":
        return SparseNaiveBayesClassifier(n_attributes=dataset.n_attributes)
    if algo == "knn":
        return HammingKnnClassifier(n_neighbors=opts.knn_k)
    return BoostClassifier(
        n_rounds=opts.rounds,
        stop_error=opts.stop_error,
        smoothing=opts.smoothing,
        filter_method=opts.filter,
        filter_param=opts.filter_param,
        sample_p=opts.sample_p,
        n_attributes=dataset.n_attributes,
        random_state=opts.seed,
    )


def _parallel_map(fn, items, jobs):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    workers = min(jobs, len(items))
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def cmd_synth(opts) -> int:
    if not opts.synth:
        raise ConfigError("synth needs --synth SPEC")
    if not opts.out:
        raise ConfigError("synth needs --out FILE")
    try:
        spec = CorpusSpec.from_string(opts.synth)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    instances = generate_corpus(spec, opts.seed)
    Path(opts.out).parent.mkdir(parents=True, exist_ok=True)
    write_corpus(instances, opts.out)
    words = len({inst.word for inst in instances})
    print(f"wrote {len(instances)} instances over {words} words to {opts.out}")
    return EXIT_OK


def cmd_ingest(opts) -> int:
    if not opts.corpus:
        raise ConfigError("ingest needs --corpus PATH")
    datasets = build_datasets(load_corpus(opts.corpus))
    print(f"{len(datasets)} words")
    if datasets:
        header = ("word", "pos", "senses", "examples", "attributes", "mfs%")
        rows = [header]
        for ds in datasets:
            rows.append(
                (
                    ds.word,
                    ds.pos,
                    str(ds.k),
                    str(ds.m),
                    str(ds.n_attributes),
                    f"{100.0 * ds.sense_counts.max() / ds.m:.1f}",
                )
            )
        widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
        for row in rows:
            print("  ".join(cell.rjust(widths[c]) for c, cell in enumerate(row)))
    return EXIT_OK


def _train_one(item):
    dataset, opt_values, out = item
    opts = SimpleNamespace(**opt_values)
    clf = _make_estimator("boost", opts, dataset)
    clf.fit(dataset.X, dataset.y)
    model = SenseModel.from_fit(dataset, clf)
    out = Path(out)
    save_model(model, out / f"{dataset.word}.model")
    log_path = out / f"{dataset.word}.trainlog.csv"
    with open(log_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("round,attr,z,z_empirical,train_error\n")
        for t, rule in enumerate(clf.rules_, start=1):
            fh.write(
                f"{t},{rule.attr},{clf.z_history_[t - 1]!r},"
                f"{clf.z_empirical_history_[t - 1]!r},{clf.train_error_history_[t - 1]!r}\n"
            )
    return dataset.word, clf.n_rounds_, float(clf.train_error_history_[-1])


def cmd_train(opts) -> int:
    datasets = _load_datasets(opts)
    out = _out_dir(opts)
    opt_values = vars(opts).copy()
    results = _parallel_map(
        _train_one, [(ds, opt_values, str(out)) for ds in datasets], opts.jobs
    )
    for word, rounds, err in results:
        print(f"{word}: {rounds} rules, train error {err:.4f}")
    return EXIT_OK


def _eval_one(item):
    index, dataset, algos, opt_values = item
    opts = SimpleNamespace(**opt_values)
    plan = make_folds(
        dataset.y, opts.folds, seed=[opts.seed, index], stratified=opts.stratify
    )
    results = {
        algo: cross_validate(_make_estimator(algo, opts, dataset), dataset, plan, algo)
        for algo in algos
    }

    round_curve = None
    if opts.curve_rounds:
        checkpoints = [int(c) for c in opts.curve_rounds.split(",")]
        cap = max(max(checkpoints), 1)
        fold_errors = []
        for _, train_idx, test_idx in plan.splits():
            clf = BoostClassifier(
                n_rounds=cap,
                stop_error=0.0,
                smoothing=opts.smoothing,
                sample_p=opts.sample_p,
                n_attributes=dataset.n_attributes,
                random_state=opts.seed,
            )
            clf.fit(dataset.X[train_idx], dataset.y[train_idx])
            fold_errors.append(
                clf.prefix_errors(dataset.X[test_idx], dataset.y[test_idx], checkpoints)
            )
        round_curve = list(zip(checkpoints, np.mean(fold_errors, axis=0)))

    rejection_curves = {}
    if opts.curve_rejection:
        levels = [float(v) for v in opts.curve_rejection.split(",")]
        for method in [m.strip() for m in opts.curve_methods.split(",") if m.strip()]:
            rejection_curves[method] = curve_rejection(
                dataset,
                method,
                levels,
                n_rounds=opts.rounds,
                plan=plan,
                seed=opts.seed,
                smoothing=opts.smoothing,
                sample_p=opts.sample_p,
            )
    return index, dataset.word, results, round_curve, rejection_curves


def cmd_eval(opts) -> int:
    datasets = _load_datasets(opts)
    if not datasets:
        raise ConfigError("the corpus holds no instances")
    algos = _parse_algos(opts)
    out = _out_dir(opts)
    opt_values = vars(opts).copy()
    items = [(i, ds, algos, opt_values) for i, ds in enumerate(datasets)]
    outputs = sorted(_parallel_map(_eval_one, items, opts.jobs))

    all_results = []
    by_algo: dict[str, dict[str, object]] = {algo: {} for algo in algos}
    table_results = {}
    for _, word, results, _, _ in outputs:
        for algo in algos:
            all_results.append(results[algo])
            by_algo[algo][word] = results[algo]
            table_results[(word, algo)] = results[algo]
    write_accuracy_csv(all_results, out / "accuracy.csv")

    comparisons = []
    summaries = []
    for i, algo_a in enumerate(algos):
        for algo_b in algos[i + 1 :]:
            summaries.append(compare_table(by_algo[algo_a], by_algo[algo_b]))
            comparisons.extend(
                compare_cv(by_algo[algo_a][ds.word], by_algo[algo_b][ds.word])
                for ds in datasets
            )
    write_comparison_csv(comparisons, out / "comparisons.csv")

    table = summary_table(datasets, table_results, algos)
    print(table)
    for summary in summaries:
        print(f"{summary.algo_a} vs {summary.algo_b}: {summary.format()}")
    (out / "summary.txt").write_text(
        table
        + "\n"
        + "\n".join(f"{s.algo_a} vs {s.algo_b}: {s.format()}" for s in summaries)
        + "\n",
        encoding="utf-8",
    )

    for _, word, _, round_curve, rejection_curves in outputs:
        if round_curve is not None:
            write_curve_csv(round_curve, out / f"curve_rounds_{word}.csv", "round")
        for method, points in rejection_curves.items():
            write_curve_csv(
                points, out / f"curve_rejection_{method}_{word}.csv", "rejection"
            )
    round_curves = [c for _, _, _, c, _ in outputs if c is not None]
    if round_curves:
        checkpoints = [cp for cp, _ in round_curves[0]]
        mean_curve = list(
            zip(checkpoints, np.mean([[e for _, e in c] for c in round_curves], axis=0))
        )
        write_curve_csv(mean_curve, out / "curve_rounds_avg.csv", "round")
    return EXIT_OK


def cmd_bench(opts) -> int:
    if not (opts.corpus or opts.synth):
        opts.synth = "words=1,m=2000,k=8,noise=0.2,vocab=25,skew=0.0"
    datasets = _load_datasets(opts)
    dataset = datasets[0]
    print(
        f"benchmarking on {dataset.word}: {dataset.m} examples, "
        f"{dataset.k} senses, {dataset.n_attributes} attributes"
    )
    full = time_weak_learner(
        dataset, opts.rounds, p=1.0, seed=opts.seed, smoothing=opts.smoothing
    )
    lazy = time_weak_learner(
        dataset, opts.rounds, p=opts.sample_p, seed=opts.seed, smoothing=opts.smoothing
    )
    speedup = full["mean_round"] / lazy["mean_round"]
    print(f"rounds: {full['rounds']}")
    print(f"full search:    {1e3 * full['mean_round']:.3f} ms/round, total {full['total']:.3f} s")
    print(
        f"sampled p={opts.sample_p:g}: {1e3 * lazy['mean_round']:.3f} ms/round, "
        f"total {lazy['total']:.3f} s"
    )
    print(f"weak-learner speedup: {speedup:.2f}x")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (None, 0) else int(exc.code)
    try:
        opts = _resolve(args)
        return args.handler(opts)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CorpusFormatError as exc:
        print(f"corpus error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Exception as exc:  # anything else is a runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
