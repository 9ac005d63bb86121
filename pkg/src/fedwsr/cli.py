"""Experiment front-end.

Subcommands:
    gen-data       write train.fwsr / test.fwsr described by the config
    train-central  centralized training -> metrics CSV + checkpoint + figure
    train-fed      federated training -> per-round CSV + checkpoint + figure
    evaluate       checkpoint -> accuracy/confusion/enhancement CSVs + figures
    summarize      per-layer shape/parameter/MAC tables for the networks

Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.
Every command re-run with identical config and inputs produces
byte-identical CSV and checkpoint files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, load_config
from .errors import ConfigError, DataError, NumericError
from .fed import run_federated
from .metrics import accuracy_by_snr, confusion, enhancement_gain
from .models import WSENet, WSERNet, WSRNet, model_summary
from .nncore import flatten_params, load_checkpoint, load_params, save_checkpoint
from .signal import Dataset, generate_dataset, read_dataset, write_dataset
from .train import predict_in_batches, train_centralized

CHECKPOINT_NAME = "checkpoint.fwsp"


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)  # shortest round-trip representation
    return str(value)


def _write_csv(path: Path, version_tag: str, columns: list[str], rows) -> None:
    lines = [f"# {version_tag}", ",".join(columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _out_dir(cfg: ExperimentConfig, out_flag: str | None) -> Path:
    out = Path(out_flag) if out_flag else Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_split(cfg: ExperimentConfig, split: str) -> Dataset:
    path = Path(cfg.data.dir) / f"{split}.fwsr"
    if not path.exists():
        raise DataError(f"dataset file {path} not found (run gen-data first)")
    ds = read_dataset(path)
    expected = tuple(s.value for s in cfg.data.schemes)
    if ds.scheme_names != expected:
        raise DataError(
            f"{path}: scheme names {ds.scheme_names} do not match config {expected}"
        )
    if ds.frame_len != cfg.data.frame_len:
        raise DataError(
            f"{path}: frame length {ds.frame_len} does not match config {cfg.data.frame_len}"
        )
    return ds


# ---- subcommands ----------------------------------------------------------


def cmd_gen_data(cfg: ExperimentConfig, out_flag: str | None) -> None:
    out = Path(out_flag) if out_flag else Path(cfg.data.dir)
    out.mkdir(parents=True, exist_ok=True)
    for split in ("train", "test"):
        ds = generate_dataset(cfg.dataset_spec(split))
        path = out / f"{split}.fwsr"
        write_dataset(path, ds)
        print(f"{split}: {len(ds)} samples -> {path}")
        for label, name in enumerate(ds.scheme_names):
            for snr in cfg.data.snr_grid_db:
                count = int(np.sum((ds.labels == label) & (ds.snr_db == snr)))
                print(f"  {name} @ {snr:+.0f} dB: {count}")


def cmd_train_central(cfg: ExperimentConfig, out_flag: str | None) -> None:
    if cfg.mode not in ("central_wsr", "central_wser"):
        raise ConfigError(f"train-central requires mode central_wsr or central_wser, not {cfg.mode}")
    train = _load_split(cfg, "train")
    test = _load_split(cfg, "test")
    task = cfg.task_factory()()
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seeds.model, spawn_key=(1,)))
    s = train.s_star if cfg.mode == "central_wser" else None
    tr = cfg.training
    rows = train_centralized(
        task,
        (train.x, s, train.labels),
        (test.x, test.labels),
        epochs=tr.epochs,
        batch_size=tr.batch_size,
        lr=tr.lr,
        momentum=tr.momentum,
        weight_decay=tr.weight_decay,
        rng=rng,
    )
    out = _out_dir(cfg, out_flag)
    _write_csv(
        out / "central_metrics.csv",
        "fedwsr-central-v1",
        ["epoch", "train_loss", "train_accuracy", "test_accuracy"],
        [(r.epoch, r.train_loss, r.train_accuracy, r.test_accuracy) for r in rows],
    )
    save_checkpoint(out / CHECKPOINT_NAME, flatten_params(task.model, with_state=True), cfg.arch_digest())
    from . import plots

    plots.plot_training_curves(rows, out / "training_curves.png")
    final = rows[-1].test_accuracy if rows else float("nan")
    print(f"trained {cfg.mode} for {len(rows)} epochs; final test accuracy {final:.4f}")
    print(f"wrote {out / 'central_metrics.csv'} and {out / CHECKPOINT_NAME}")


def cmd_train_fed(cfg: ExperimentConfig, out_flag: str | None, max_parallel: int) -> None:
    if cfg.mode != "fed":
        raise ConfigError(f"train-fed requires mode fed, not {cfg.mode}")
    train = _load_split(cfg, "train")
    test = _load_split(cfg, "test")
    alg = cfg.fed_algorithm()
    records, final_params = run_federated(
        alg,
        cfg.fed.rounds,
        train,
        test,
        cfg.partition_spec(),
        cfg.task_factory(),
        clients_per_round=cfg.fed.clients_per_round,
        selection_seed=cfg.seeds.selection,
        max_parallel=max_parallel,
    )
    out = _out_dir(cfg, out_flag)
    _write_csv(
        out / "fed_rounds.csv",
        "fedwsr-fed-v1",
        ["round", "algorithm", "k", "p_global", "mean_p_k", "min_mu", "max_mu", "mean_local_loss"],
        [
            (
                r.round,
                alg.tag,
                cfg.fed.clients_per_round,
                r.global_performance,
                r.mean_performance,
                r.min_mu,
                r.max_mu,
                r.mean_local_loss,
            )
            for r in records
        ],
    )
    save_checkpoint(out / CHECKPOINT_NAME, final_params, cfg.arch_digest())
    from . import plots

    plots.plot_round_curves(records, out / "fed_rounds.png")
    final = records[-1].global_performance if records else float("nan")
    print(f"{alg.tag}: {len(records)} rounds; final global accuracy {final:.4f}")
    print(f"wrote {out / 'fed_rounds.csv'} and {out / CHECKPOINT_NAME}")


def cmd_evaluate(
    cfg: ExperimentConfig,
    out_flag: str | None,
    checkpoint: str | None,
    confusion_snr: float | None,
    split: str,
) -> None:
    out = _out_dir(cfg, out_flag)
    ckpt_path = Path(checkpoint) if checkpoint else out / CHECKPOINT_NAME
    if not ckpt_path.exists():
        raise DataError(f"checkpoint {ckpt_path} not found")
    vector, digest = load_checkpoint(ckpt_path)
    expected = cfg.arch_digest()
    if digest != expected:
        raise DataError(
            f"checkpoint architecture digest {digest[:12]}... does not match config {expected[:12]}..."
        )
    task = cfg.task_factory()()
    load_params(task.model, vector)
    ds = _load_split(cfg, split)

    table = accuracy_by_snr(task, ds)
    _write_csv(
        out / "accuracy_by_snr.csv",
        "fedwsr-eval-v1",
        ["snr_db", "class", "accuracy", "count"],
        [
            ("ALL" if r.snr_db is None else r.snr_db, r.class_name or "ALL", r.accuracy, r.count)
            for r in table.rows
        ],
    )

    preds = predict_in_batches(task, ds.x)
    if confusion_snr is None:
        mask = np.ones(len(ds), dtype=bool)
        conf_tag = "all SNRs"
    else:
        mask = ds.snr_db == np.float32(confusion_snr)
        if not mask.any():
            raise DataError(f"no samples at snr_db == {confusion_snr}")
        conf_tag = f"{confusion_snr:g} dB"
    matrix = confusion(preds[mask], ds.labels[mask], ds.num_classes)
    _write_csv(
        out / "confusion.csv",
        "fedwsr-confusion-v1",
        ["true_class", *ds.scheme_names],
        [(name, *matrix[i].tolist()) for i, name in enumerate(ds.scheme_names)],
    )

    from . import plots

    plots.plot_accuracy_vs_snr(table, out / "accuracy_by_snr.png")
    plots.plot_confusion(matrix, ds.scheme_names, out / "confusion.png", title=f"confusion at {conf_tag}")

    if cfg.arch_kind() == "wser":
        task.model.eval()
        gains = enhancement_gain(task.model.enhancer.forward, ds)
        _write_csv(
            out / "enhancement.csv",
            "fedwsr-enhance-v1",
            ["snr_db", "mse_in", "mse_out", "gain_db"],
            [(g.snr_db, g.mse_in, g.mse_out, g.gain_db) for g in gains],
        )
        plots.plot_enhancement(gains, out / "enhancement.png")

    overall = table.overall()
    print(f"{split} accuracy over {overall.count} samples: {overall.accuracy:.4f}")
    print(f"wrote evaluation CSVs and figures to {out}")


def cmd_summarize(cfg: ExperimentConfig, out_flag: str | None) -> None:
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seeds.model, spawn_key=(0,)))
    enh = WSENet(cfg.wsenet_cfg(), rng, dtype=np.float32)
    rec = WSRNet(cfg.wsrnet_cfg(), rng, dtype=np.float32)
    joint = WSERNet(cfg.wsenet_cfg(), cfg.wsrnet_cfg(), rng, dtype=np.float32)
    text = "\n\n".join(model_summary(m).format() for m in (enh, rec, joint))
    print(text)
    if out_flag:
        out = _out_dir(cfg, out_flag)
        (out / "model_summary.txt").write_text(text + "\n")
        print(f"wrote {out / 'model_summary.txt'}")


# ---- argument parsing -------------------------------------------------------


def _parse_seed_overrides(pairs: list[str]) -> dict[str, int]:
    overrides = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError(f"--seed-override expects NAME=VALUE, got {pair!r}")
        try:
            overrides[name.strip()] = int(value)
        except ValueError:
            raise ConfigError(f"--seed-override value must be an integer, got {value!r}") from None
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fedwsr",
        description="Synthetic I/Q datasets and centralized/federated training "
        "of signal enhancement + modulation recognition networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, metavar="PATH", help="YAML experiment config")
        sp.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
        sp.add_argument(
            "--seed-override",
            action="append",
            default=[],
            metavar="NAME=VALUE",
            help="override a seed (dataset/model/partition/selection); repeatable",
        )

    common(sub.add_parser("gen-data", help="generate train/test dataset files"))
    common(sub.add_parser("train-central", help="centralized training"))
    fed = sub.add_parser("train-fed", help="simulated federated training")
    common(fed)
    fed.add_argument("--max-parallel", type=int, default=1, metavar="N",
                     help="max clients trained in parallel per round")
    ev = sub.add_parser("evaluate", help="evaluate a checkpoint on a dataset split")
    common(ev)
    ev.add_argument("--checkpoint", metavar="PATH", help="checkpoint file (default OUT/checkpoint.fwsp)")
    ev.add_argument("--confusion-snr", type=float, metavar="DB",
                    help="restrict the confusion matrix to one SNR bucket")
    ev.add_argument("--split", choices=("train", "test"), default="test",
                    help="dataset split to evaluate (default test)")
    common(sub.add_parser("summarize", help="print per-layer model summaries"))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, _parse_seed_overrides(args.seed_override))
        if args.command == "gen-data":
            cmd_gen_data(cfg, args.out)
        elif args.command == "train-central":
            cmd_train_central(cfg, args.out)
        elif args.command == "train-fed":
            if args.max_parallel < 1:
                raise ConfigError("--max-parallel must be >= 1")
            cmd_train_fed(cfg, args.out, args.max_parallel)
        elif args.command == "evaluate":
            cmd_evaluate(cfg, args.out, args.checkpoint, args.confusion_snr, args.split)
        elif args.command == "summarize":
            cmd_summarize(cfg, args.out)
    except ConfigError as exc:
        print(f"fedwsr: config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"fedwsr: data error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"fedwsr: numeric failure: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
