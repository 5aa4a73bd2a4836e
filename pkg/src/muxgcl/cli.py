"""Command-line entry point: prepare / train / eval / analyze / benchmark.

All figures are emitted as CSV data; plotting is left to external tools.
Outputs go to fresh directories (refused without --force if occupied) and
every command that consumes a config echoes the fully resolved document
next to its outputs.

Exit codes: 0 ok, 2 usage or config problem, 3 data or shape problem,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import apply_overrides, default_config, load_config, write_echo
from .errors import ConfigError, DataError, NumericError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

BENCH_WARMUP = 5
BENCH_MIN_MEASURE = 20


def _set_threads(mode: str) -> None:
    # Must run before the first numpy import to take effect.
    if mode == "1":
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, "1")


def _resolve_config(args) -> dict:
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = default_config()
    overrides = list(getattr(args, "set", None) or [])
    if getattr(args, "data", None):
        overrides.append(f"dataset.path={args.data}")
    if getattr(args, "seed", None) is not None:
        overrides.append(f"train.seed={args.seed}")
    return apply_overrides(cfg, overrides)


def _dataset_from(cfg: dict):
    from .datasets import load_dataset

    path = cfg["dataset"]["path"]
    if path is None:
        raise ConfigError("no dataset: set dataset.path in the config or pass --data")
    return load_dataset(path)


def _out_dir(args, *, required=True) -> Path | None:
    if args.out is None:
        if required:
            raise ConfigError("--out is required")
        return None
    out = Path(args.out)
    if out.exists() and any(out.iterdir()) and not args.force:
        raise ConfigError(f"output directory {out} is not empty (use --force)")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_prepare(args) -> int:
    from .datasets import load_dataset

    g = load_dataset(args.data)
    print(
        f"ok: {g.name}: {g.num_nodes} nodes, {g.num_edges} undirected edges, "
        f"{g.num_features} features, {g.num_classes} classes"
    )
    return EXIT_OK


def cmd_train(args) -> int:
    from .trainer import TrainConfig, history_to_csv, train

    cfg = _resolve_config(args)
    dataset = _dataset_from(cfg)
    out = _out_dir(args)
    write_echo(cfg, out / "config.echo.json")
    params, history = train(
        dataset,
        TrainConfig.from_mapping(cfg),
        out_dir=out,
        pae_cache=args.pae_cache,
    )
    history_to_csv(history, out / "history.csv")
    print(
        f"trained {cfg['train']['epochs']} epochs on {dataset.name} "
        f"(mode={cfg['loss']['mode']}), final loss {history.losses[-1]:.6f}; "
        f"outputs in {out}"
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    from .encoder import load_params
    from .evaluation.protocol import (
        embed_clean,
        evaluate_classification,
        evaluate_clustering,
    )

    cfg = _resolve_config(args)
    dataset = _dataset_from(cfg)
    out = _out_dir(args)
    write_echo(cfg, out / "config.echo.json")
    params = load_params(args.checkpoint)
    embeddings = embed_clean(dataset, params)
    ev = cfg["eval"]
    fractions = (ev["split"]["train"], ev["split"]["val"], ev["split"]["test"])
    provenance = str(args.checkpoint)

    reports = []
    if args.task in ("classification", "both"):
        reports.append(
            evaluate_classification(
                dataset,
                embeddings,
                seeds=ev["seeds"],
                split_fractions=fractions,
                l2=ev["l2"],
                normalize=ev["normalize_embeddings"],
                provenance=provenance,
            )
        )
    if args.task in ("clustering", "both"):
        reports.append(
            evaluate_clustering(
                dataset,
                embeddings,
                seeds=ev["seeds"],
                normalize=ev["normalize_embeddings"],
                provenance=provenance,
            )
        )
    for report in reports:
        report.save(out / f"{report.task}.json")
        print(report.format_table())
    return EXIT_OK


def cmd_analyze(args) -> int:
    import glob as globmod

    from .analysis import (
        GaussianFit,
        export_fits,
        export_histograms,
        similarity_histograms,
        t_statistics,
    )
    from .augment import AugmentConfig
    from .encoder import load_params
    from .trainer import TrainConfig, build_affinity

    cfg = _resolve_config(args)
    dataset = _dataset_from(cfg)
    out = _out_dir(args)
    write_echo(cfg, out / "config.echo.json")
    aug = cfg["augment"]
    augment = AugmentConfig(
        edge_drop=(aug["view1"]["edge_drop"], aug["view2"]["edge_drop"]),
        feature_mask=(aug["view1"]["feature_mask"], aug["view2"]["feature_mask"]),
    )
    seed = cfg["train"]["seed"]

    if args.epoch_glob:
        checkpoints = sorted(Path(p) for p in globmod.glob(args.epoch_glob))
        if not checkpoints:
            raise DataError(f"no checkpoints match {args.epoch_glob!r}")
    elif args.checkpoint:
        checkpoints = [Path(args.checkpoint)]
    else:
        raise ConfigError("pass --checkpoint or --epoch-glob")

    if args.what == "similarity":
        for ckpt in checkpoints:
            params = load_params(ckpt)
            hists = similarity_histograms(
                dataset, params, augment, seed=seed, bins=cfg["analysis"]["bins"]
            )
            target = out / ckpt.stem if len(checkpoints) > 1 else out
            written = export_histograms(hists, target)
            print(f"{ckpt}: wrote {len(written)} histogram files to {target}")
        return EXIT_OK

    affinity = build_affinity(dataset, TrainConfig.from_mapping(cfg),
                              cache_path=args.pae_cache)
    summary_rows = []
    for ckpt in checkpoints:
        params = load_params(ckpt)
        stats = t_statistics(
            dataset,
            params,
            affinity,
            augment,
            sample_count=cfg["analysis"]["sample_count"],
            seed=seed,
        )
        fit_s: GaussianFit = stats["fit_s"]
        fit_d: GaussianFit = stats["fit_d"]
        export_fits({"t_same_view": fit_s, "t_cross_view": fit_d},
                    out / f"tstats_{ckpt.stem}.csv")
        summary_rows.append((ckpt.name, fit_s, fit_d))
        print(
            f"{ckpt}: frac_positive same-view {fit_s.frac_positive:.4f} "
            f"cross-view {fit_d.frac_positive:.4f}"
        )
    with open(out / "tstats_summary.csv", "w") as fh:
        fh.write("checkpoint,frac_positive_same,frac_positive_cross,"
                 "mean_same,mean_cross\n")
        for name, fs, fd in summary_rows:
            fh.write(f"{name},{fs.frac_positive!r},{fd.frac_positive!r},"
                     f"{fs.mean!r},{fd.mean!r}\n")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    from .trainer import TrainConfig, benchmark_epoch

    if args.epochs < BENCH_WARMUP + BENCH_MIN_MEASURE:
        raise ConfigError(
            f"--epochs must be >= {BENCH_WARMUP + BENCH_MIN_MEASURE} "
            f"({BENCH_WARMUP} warmup + {BENCH_MIN_MEASURE} measured)"
        )
    cfg = _resolve_config(args)
    dataset = _dataset_from(cfg)
    out = _out_dir(args, required=False)
    if out is not None:
        write_echo(cfg, out / "config.echo.json")

    results = {}
    for mode in ("mux", "grace"):
        mode_cfg = apply_overrides(cfg, [f"loss.mode={mode}"])
        results[mode] = benchmark_epoch(
            dataset,
            TrainConfig.from_mapping(mode_cfg),
            measure_epochs=args.epochs - BENCH_WARMUP,
            warmup=BENCH_WARMUP,
        )
    stages = ("augment", "forward", "loss", "backward", "update", "total")
    print(f"{'stage':10s} {'mux (s)':>12s} {'grace (s)':>12s} {'ratio':>8s}")
    lines = ["stage,mux_seconds,grace_seconds"]
    for stage in stages:
        mux_t, grace_t = results["mux"][stage], results["grace"][stage]
        ratio = mux_t / grace_t if grace_t > 0 else float("inf")
        print(f"{stage:10s} {mux_t:12.6f} {grace_t:12.6f} {ratio:8.2f}")
        lines.append(f"{stage},{mux_t!r},{grace_t!r}")
    if out is not None:
        (out / "benchmark.csv").write_text("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="muxgcl",
        description="Train and evaluate cross-scale graph contrastive embeddings.",
    )
    parser.add_argument("--threads", choices=("1", "auto"), default="1",
                        help="BLAS thread policy (1 = reproducible)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_out=True):
        p.add_argument("--config", type=Path, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--data", "--dataset", type=Path, default=None,
                       help="dataset directory (overrides dataset.path)")
        p.add_argument("--set", action="append", metavar="KEY.PATH=VALUE",
                       help="config override, repeatable")
        if with_out:
            p.add_argument("--out", type=Path, default=None)
            p.add_argument("--force", action="store_true",
                           help="write into a non-empty output directory")

    p = sub.add_parser("prepare", help="validate a dataset directory")
    p.add_argument("--data", type=Path, required=True)
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("train", help="train an encoder")
    common(p)
    p.add_argument("--pae-cache", type=Path, default=None,
                   help="reuse/store pooled topology embeddings")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="downstream evaluation of a checkpoint")
    common(p)
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--task", choices=("classification", "clustering", "both"),
                   default="both")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze", help="similarity/T-statistic diagnostics")
    common(p)
    p.add_argument("--checkpoint", type=Path, default=None)
    p.add_argument("--epoch-glob", type=str, default=None,
                   help="glob over checkpoint files to sweep")
    p.add_argument("--what", choices=("similarity", "tstats"), required=True)
    p.add_argument("--pae-cache", type=Path, default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("benchmark", help="per-stage epoch timing, both modes")
    common(p)
    p.add_argument("--epochs", type=int, default=BENCH_WARMUP + BENCH_MIN_MEASURE)
    p.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _set_threads(args.threads)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
