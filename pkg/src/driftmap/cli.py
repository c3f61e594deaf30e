"""Command-line surface: train maps, monitor streams, generate labeled
streams, run the projection baseline, and score detections.

Settings resolve in three layers: built-in defaults, then a flat key=value
--config file, then long-form flags (kebab-case of the config keys). Exit
codes: 0 success, 1 validation error, 2 I/O error.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np

from driftmap import baseline as baseline_mod
from driftmap import config as config_mod
from driftmap import detector, embedding, evaluate, maps, stream


class CliError(Exception):
    """Configuration or input validation failure (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


@dataclass(frozen=True)
class Option:
    parse: callable
    default: object = None
    help: str = ""
    flag: bool = False


def _kind(text):
    if text not in maps.MAP_KINDS:
        raise ValueError(f"map kind must be one of {maps.MAP_KINDS}")
    return text


SCHEDULE_OPTIONS = {
    "epochs": Option(int, 10, "training epochs"),
    "eta_start": Option(float, 0.5, "initial learning rate"),
    "eta_end": Option(float, 0.05, "final learning rate"),
    "sigma_start": Option(float, 5.0, "initial neighborhood radius"),
    "sigma_end": Option(float, 0.5, "final neighborhood radius"),
    "neighborhood": Option(str, "gaussian", "gaussian or dog"),
    "dog_ratio": Option(float, 1.6, "radius ratio of the subtracted gaussian"),
    "dog_amplitude": Option(float, 0.5, "amplitude of the subtracted gaussian"),
}

MAP_OPTIONS = {
    "map_kind": Option(_kind, "som", "som or sim"),
    "grid_rows": Option(int, 10, "lattice rows"),
    "grid_cols": Option(int, 10, "lattice columns"),
    "grid_metric": Option(str, "manhattan", "lattice metric"),
}

DETECTOR_OPTIONS = {
    "alpha": Option(float, 5.0, "decision-rule width multiplier"),
    "window": Option(int, 8, "decision-rule window length"),
    "chunk_size": Option(int, 200, "samples per chunk"),
    "cl_eta": Option(float, 0.1, "continual-update learning rate"),
    "cl_epochs": Option(int, 1, "continual-update passes"),
    "statistic": Option(str, "m1", "per-sample summary statistic"),
}

SOURCE_OPTIONS = {
    "data": Option(str, None, "csv data file"),
    "stream_spec": Option(str, None, "stream recipe file"),
    "train_fraction": Option(float, 0.30, "leading fraction reserved for training"),
    "seed": Option(int, 0, "top-level random seed"),
}


def _options_for(command):
    opts = dict(SOURCE_OPTIONS)
    if command == "train":
        opts.update(MAP_OPTIONS)
        opts.update(SCHEDULE_OPTIONS)
        opts["map_out"] = Option(str, "map.npz", "output map file")
    elif command == "monitor":
        opts.update(SCHEDULE_OPTIONS)
        opts.update(DETECTOR_OPTIONS)
        opts["map"] = Option(str, None, "trained map file")
        opts["signal_out"] = Option(str, "signal.csv", "score csv output")
        opts["events_out"] = Option(str, "events.jsonl", "shift event output")
        opts["moments_out"] = Option(str, None, "optional per-chunk moment csv")
    elif command == "generate":
        opts["stream_out"] = Option(str, "stream.csv", "sample csv output")
        opts["truth_out"] = Option(str, "truth.txt", "shift index output")
    elif command == "baseline":
        opts["chunk_size"] = DETECTOR_OPTIONS["chunk_size"]
        opts["alpha"] = DETECTOR_OPTIONS["alpha"]
        opts["window"] = DETECTOR_OPTIONS["window"]
        opts["n_components"] = Option(int, 4, "principal components")
        opts["n_bins"] = Option(int, 100, "histogram bins")
        opts["hist_out"] = Option(str, "baseline_hist.csv", "cumulative-histogram signal csv")
        opts["ks_out"] = Option(str, "baseline_ks.csv", "ks-statistic signal csv")
        opts["kernel_pca"] = Option(config_mod.parse_bool, None,
                                    "request the kernel variant (not available)", flag=True)
        opts["with_decision"] = Option(config_mod.parse_bool, None,
                                       "apply the decision rule to baseline scores", flag=True)
    elif command == "evaluate":
        opts.update(SCHEDULE_OPTIONS)
        opts.update(DETECTOR_OPTIONS)
        opts["events"] = Option(str, None, "events jsonl from monitor")
        opts["truth"] = Option(str, None, "ground-truth shift file")
        opts["n_chunks"] = Option(int, None, "monitored chunk count")
        opts["tol"] = Option(int, 1, "matching tolerance in chunks")
        opts["report_out"] = Option(str, "report.json", "detection report output")
        opts["grid"] = Option(config_mod.parse_bool, None, "run the alpha x window grid", flag=True)
        opts["map"] = Option(str, None, "trained map file (grid mode)")
        opts["alphas"] = Option(str, "2:28:2", "alpha values, list or start:stop:step")
        opts["windows"] = Option(str, "2:24:2", "window values, list or start:stop:step")
        opts["matrix_out"] = Option(str, "kappa_matrix.csv", "kappa matrix csv (grid mode)")
    return opts


def _build_parser():
    parser = _Parser(prog="driftmap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for command in ("train", "monitor", "generate", "baseline", "evaluate"):
        p = sub.add_parser(command)
        p.add_argument("--config", default=None, help="flat key=value settings file")
        for key, opt in _options_for(command).items():
            flag = "--" + key.replace("_", "-")
            if opt.flag:
                p.add_argument(flag, dest=key, action="store_true", default=None, help=opt.help)
            else:
                p.add_argument(flag, dest=key, default=None, type=opt.parse, help=opt.help)
    return parser


def _resolve(args, command):
    options = _options_for(command)
    values = {key: opt.default for key, opt in options.items()}
    if args.config:
        for key, text in config_mod.parse_kv_file(args.config).items():
            if key in options:
                values[key] = options[key].parse(text)
    for key in options:
        flag_value = getattr(args, key)
        if flag_value is not None:
            values[key] = flag_value
    return SimpleNamespace(**values)


def _derive_seed(seed, index):
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1)[0])


def _schedule(cfg):
    return maps.TrainSchedule(
        epochs=cfg.epochs, eta_start=cfg.eta_start, eta_end=cfg.eta_end,
        sigma_start=cfg.sigma_start, sigma_end=cfg.sigma_end,
        neighborhood=cfg.neighborhood, dog_ratio=cfg.dog_ratio,
        dog_amplitude=cfg.dog_amplitude,
    )


def _load_rows(cfg):
    """Full row matrix from --data or a --stream-spec recipe, plus the chunk
    size to use when re-chunking."""
    if (cfg.data is None) == (cfg.stream_spec is None):
        raise CliError("exactly one of --data or --stream-spec is required")
    if cfg.data is not None:
        rows = stream.load_csv(cfg.data)
        chunk_size = getattr(cfg, "chunk_size", None)
        return rows, chunk_size
    spec = config_mod.parse_stream_spec(cfg.stream_spec)
    chunks, _ = stream.generate_stream(spec)
    rows = np.concatenate([c.samples for c in chunks], axis=0)
    return rows, spec.chunk_size


def _split_training(rows, train_fraction):
    if not 0.0 <= train_fraction < 1.0:
        raise CliError("train-fraction must be in [0, 1)")
    n_train = int(rows.shape[0] * train_fraction)
    return rows[:n_train], rows[n_train:]


def _monitored_chunks(cfg):
    """Chunks of the post-training remainder, indexed from 0."""
    rows, chunk_size = _load_rows(cfg)
    if chunk_size is None:
        chunk_size = cfg.chunk_size
    _, remainder = _split_training(rows, cfg.train_fraction)
    return list(stream.chunk_rows(remainder, chunk_size)), chunk_size


def cmd_train(cfg):
    rows, _ = _load_rows(cfg)
    train_rows, _ = _split_training(rows, cfg.train_fraction)
    if train_rows.shape[0] == 0:
        raise CliError("training fraction selects no rows")
    grid = maps.GridSpec(cfg.grid_rows, cfg.grid_cols, cfg.grid_metric)
    fmap = maps.init_map(grid, cfg.map_kind, train_rows, _derive_seed(cfg.seed, 0))
    fmap, history = maps.train(fmap, train_rows, _schedule(cfg), _derive_seed(cfg.seed, 1))
    maps.save_map(fmap, cfg.map_out)
    print(f"trained {cfg.map_kind} map on {train_rows.shape[0]} rows "
          f"-> {cfg.map_out}; final quantization error {history[-1]!r}")
    return 0


def cmd_monitor(cfg):
    if cfg.map is None:
        raise CliError("--map is required")
    fmap = maps.load_map(cfg.map)
    chunks, chunk_size = _monitored_chunks(cfg)
    dconfig = detector.DetectorConfig(
        alpha=cfg.alpha, window=cfg.window, chunk_size=chunk_size,
        cl_eta=cfg.cl_eta, cl_epochs=cfg.cl_epochs, statistic=cfg.statistic,
    )
    monitor = detector.DriftMonitor(fmap, dconfig, _schedule(cfg),
                                    seed=_derive_seed(cfg.seed, 2),
                                    collect_moments=cfg.moments_out is not None)
    for chunk in chunks:
        monitor.step(chunk)
    detector.write_signal_csv(cfg.signal_out, monitor.signal)
    detector.write_events_jsonl(cfg.events_out, monitor.events)
    if cfg.moments_out is not None:
        embedding.write_moments_csv(cfg.moments_out, monitor.moment_rows)
    print(f"monitored {len(chunks)} chunks: {len(monitor.events)} shift events "
          f"-> {cfg.signal_out}, {cfg.events_out}")
    return 0


def cmd_generate(cfg):
    if cfg.stream_spec is None:
        raise CliError("--stream-spec is required")
    spec = config_mod.parse_stream_spec(cfg.stream_spec)
    chunks, truth = stream.generate_stream(spec)
    n_written = stream.write_stream_csv(cfg.stream_out, chunks)

    total_rows = spec.n_chunks * spec.chunk_size
    n_train = int(total_rows * cfg.train_fraction)
    if n_train % spec.chunk_size:
        raise CliError(
            f"train-fraction {cfg.train_fraction} cuts {n_train} rows, which is not "
            f"a whole number of chunks of {spec.chunk_size}; ground truth cannot "
            "be aligned with the monitored remainder")
    train_chunks = n_train // spec.chunk_size
    relative = [i - train_chunks for i in truth]
    if any(r < 1 for r in relative):
        raise CliError("a shift falls inside (or at the start of) the training window")
    stream.write_truth(cfg.truth_out, relative)
    print(f"generated {n_written} chunks of {spec.chunk_size} -> {cfg.stream_out}; "
          f"{len(relative)} shifts -> {cfg.truth_out}")
    return 0


def _write_baseline_csv(path, indexed_scores, alpha, window, with_decision):
    signal = detector.MonitorSignal()
    scores = [s for _, s in indexed_scores]
    if with_decision:
        bounds = detector.score_sequence_decisions(scores, alpha, window)
    else:
        bounds = [(-np.inf, np.inf, False)] * len(scores)
    for (index, score), (lower, upper, flag) in zip(indexed_scores, bounds):
        signal.append(detector.SignalRow(index, score, lower, upper, flag))
    detector.write_signal_csv(path, signal)


def cmd_baseline(cfg):
    if cfg.kernel_pca:
        print("kernel-pca is excluded from this tool (it scales with the number "
              "of samples); falling back to linear pca")
    rows, chunk_size = _load_rows(cfg)
    if chunk_size is None:
        chunk_size = cfg.chunk_size
    train_rows, remainder = _split_training(rows, cfg.train_fraction)
    if train_rows.shape[0] < 2:
        raise CliError("training fraction selects fewer than 2 rows")
    model = baseline_mod.fit_pca(train_rows, cfg.n_components, seed=_derive_seed(cfg.seed, 3))
    chunks = list(stream.chunk_rows(remainder, chunk_size))
    triples = baseline_mod.baseline_signals(model, chunks, cfg.n_bins)
    with_decision = bool(cfg.with_decision)
    _write_baseline_csv(cfg.hist_out, [(i, h) for i, h, _ in triples],
                        cfg.alpha, cfg.window, with_decision)
    _write_baseline_csv(cfg.ks_out, [(i, k) for i, _, k in triples],
                        cfg.alpha, cfg.window, with_decision)
    print(f"baseline scored {len(triples)} chunk pairs -> {cfg.hist_out}, {cfg.ks_out}")
    return 0


def _evaluate_grid(cfg):
    if cfg.map is None or cfg.truth is None:
        raise CliError("grid mode requires --map and --truth")
    base_map = maps.load_map(cfg.map)
    chunks, chunk_size = _monitored_chunks(cfg)
    truth = stream.read_truth(cfg.truth)
    alphas = config_mod.parse_value_range(cfg.alphas)
    windows = [int(w) for w in config_mod.parse_value_range(cfg.windows)]
    base_config = detector.DetectorConfig(
        alpha=alphas[0], window=windows[0], chunk_size=chunk_size,
        cl_eta=cfg.cl_eta, cl_epochs=cfg.cl_epochs, statistic=cfg.statistic,
    )
    matrix = evaluate.grid_search(
        lambda: iter(chunks), base_map.copy, alphas, windows, base_config,
        _schedule(cfg), truth, len(chunks), tol=cfg.tol,
        seed=_derive_seed(cfg.seed, 2),
    )
    evaluate.write_kappa_matrix_csv(cfg.matrix_out, matrix, alphas, windows)
    best = np.unravel_index(np.argmax(matrix), matrix.shape)
    print(f"kappa grid {matrix.shape[0]}x{matrix.shape[1]} -> {cfg.matrix_out}; "
          f"best kappa {matrix[best]:.4f} at alpha={alphas[best[0]]}, "
          f"window={windows[best[1]]}")
    return 0


def cmd_evaluate(cfg):
    if cfg.grid:
        return _evaluate_grid(cfg)
    if cfg.events is None or cfg.truth is None:
        raise CliError("--events and --truth are required")
    if cfg.n_chunks is None:
        raise CliError("--n-chunks is required (monitored chunk count)")
    events = detector.read_events_jsonl(cfg.events)
    truth = stream.read_truth(cfg.truth)
    report = evaluate.detection_report([e.chunk_index for e in events], truth,
                                       cfg.n_chunks, tol=cfg.tol)
    payload = {
        "kappa": report.kappa,
        "recall": report.recall,
        "fpr": report.fpr,
        "mean_delay": report.mean_delay,
        "matched_pairs": [list(pair) for pair in report.matched_pairs],
        "n_detected": len(events),
        "n_truth": len(truth),
    }
    with open(cfg.report_out, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"kappa {report.kappa:.4f}, recall {report.recall:.4f}, "
          f"fpr {report.fpr:.4f}, mean delay {report.mean_delay:.2f} "
          f"-> {cfg.report_out}")
    return 0


COMMANDS = {
    "train": cmd_train,
    "monitor": cmd_monitor,
    "generate": cmd_generate,
    "baseline": cmd_baseline,
    "evaluate": cmd_evaluate,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve(args, args.command)
        return COMMANDS[args.command](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
