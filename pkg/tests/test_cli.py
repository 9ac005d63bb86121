"""End-to-end CLI tests on miniature experiments.

All subcommands run in-process through fedwsr.cli.main so exit codes and
outputs can be asserted exactly. One shared workspace (data + trained
artifacts) is built per session to keep runtime low.
"""

import shutil
import textwrap
from pathlib import Path

import numpy as np
import pytest

from fedwsr.cli import main
from fedwsr.nncore import load_checkpoint

CENTRAL_YAML = textwrap.dedent(
    """
    data:
      dir: {root}/data
      schemes: [BPSK, QPSK, PAM4]
      snr_grid_db: [0, 10]
      train_frames_per_cell: 24
      test_frames_per_cell: 8
      frame_len: 64
      channel:
        impairment_level: awgn_only
    model:
      mode: {mode}
      wsrnet:
        channels: [4, 8]
        strides: [1, 2]
      wsenet:
        width: 4
        depth_blocks: 1
      lambda: {lam}
    training:
      epochs: 2
      batch_size: 16
      lr: 0.01
    seeds:
      dataset: 11
      model: 22
      partition: 33
      selection: 44
    output_dir: {root}/{out}
    """
)

FED_YAML = textwrap.dedent(
    """
    data:
      dir: {root}/data
      schemes: [BPSK, QPSK, PAM4]
      snr_grid_db: [0, 10]
      train_frames_per_cell: 24
      test_frames_per_cell: 8
      frame_len: 64
      channel:
        impairment_level: awgn_only
    model:
      mode: fed
      wsrnet:
        channels: [4, 8]
        strides: [1, 2]
      lambda: 1.0
    fed:
      algorithm: {algorithm}
      num_clients: 4
      clients_per_round: 2
      rounds: 2
      local_epochs: 1
      local_batch: 16
      local_lr: 0.01
      partition:
        mode: iid
        classes_per_client: 3
      model: wsr
    seeds:
      dataset: 11
      model: 22
      partition: 33
      selection: 44
    output_dir: {root}/{out}
    """
)


@pytest.fixture(scope="session")
def workspace(tmp_path_factory):
    """Dataset plus one central and one federated training run."""
    root = tmp_path_factory.mktemp("cli")
    central = root / "central.yaml"
    central.write_text(CENTRAL_YAML.format(root=root, mode="central_wsr", lam="1.0", out="out-central"))
    wser = root / "wser.yaml"
    wser.write_text(CENTRAL_YAML.format(root=root, mode="central_wser", lam="0.3", out="out-wser"))
    fed = root / "fed.yaml"
    fed.write_text(FED_YAML.format(root=root, algorithm="fedproxplus", out="out-fed"))

    assert main(["gen-data", "--config", str(central)]) == 0
    assert main(["train-central", "--config", str(central)]) == 0
    assert main(["train-fed", "--config", str(fed)]) == 0
    return root


def read_csv(path: Path) -> tuple[str, list[str], list[list[str]]]:
    lines = path.read_text().splitlines()
    header, columns = lines[0], lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return header, columns, rows


# ---- gen-data ---------------------------------------------------------------


def test_gen_data_writes_both_splits(workspace):
    assert (workspace / "data" / "train.fwsr").exists()
    assert (workspace / "data" / "test.fwsr").exists()


def test_gen_data_rerun_is_byte_identical(workspace, tmp_path):
    assert main(["gen-data", "--config", str(workspace / "central.yaml"), "--out", str(tmp_path)]) == 0
    for name in ("train.fwsr", "test.fwsr"):
        assert (tmp_path / name).read_bytes() == (workspace / "data" / name).read_bytes()


def test_gen_data_seed_override_changes_data(workspace, tmp_path):
    assert main([
        "gen-data", "--config", str(workspace / "central.yaml"),
        "--out", str(tmp_path), "--seed-override", "dataset=999",
    ]) == 0
    assert (tmp_path / "train.fwsr").read_bytes() != (workspace / "data" / "train.fwsr").read_bytes()


# ---- train-central ------------------------------------------------------------


def test_train_central_outputs(workspace):
    out = workspace / "out-central"
    header, columns, rows = read_csv(out / "central_metrics.csv")
    assert header == "# fedwsr-central-v1"
    assert columns == ["epoch", "train_loss", "train_accuracy", "test_accuracy"]
    assert [r[0] for r in rows] == ["0", "1"]
    assert (out / "checkpoint.fwsp").exists()
    assert (out / "training_curves.png").exists()


def test_train_central_rerun_is_byte_identical(workspace, tmp_path):
    assert main(["train-central", "--config", str(workspace / "central.yaml"), "--out", str(tmp_path)]) == 0
    out = workspace / "out-central"
    assert (tmp_path / "central_metrics.csv").read_bytes() == (out / "central_metrics.csv").read_bytes()
    assert (tmp_path / "checkpoint.fwsp").read_bytes() == (out / "checkpoint.fwsp").read_bytes()


def test_train_central_rejects_fed_config(workspace):
    assert main(["train-central", "--config", str(workspace / "fed.yaml")]) == 2


def test_train_wser_writes_checkpoint(workspace):
    assert main(["train-central", "--config", str(workspace / "wser.yaml")]) == 0
    vector, _ = load_checkpoint(workspace / "out-wser" / "checkpoint.fwsp")
    names = [e.name for e in vector.layout]
    assert any(n.startswith("enhancer.") for n in names)
    assert any(n.startswith("recognizer.") for n in names)


# ---- train-fed -------------------------------------------------------------------


def test_train_fed_outputs(workspace):
    out = workspace / "out-fed"
    header, columns, rows = read_csv(out / "fed_rounds.csv")
    assert header == "# fedwsr-fed-v1"
    assert columns == ["round", "algorithm", "k", "p_global", "mean_p_k",
                       "min_mu", "max_mu", "mean_local_loss"]
    assert len(rows) == 2
    assert all(r[1] == "fedproxplus" and r[2] == "2" for r in rows)
    assert (out / "fed_rounds.png").exists()


def test_train_fed_parallel_matches_serial(workspace, tmp_path):
    assert main([
        "train-fed", "--config", str(workspace / "fed.yaml"),
        "--out", str(tmp_path), "--max-parallel", "4",
    ]) == 0
    out = workspace / "out-fed"
    assert (tmp_path / "fed_rounds.csv").read_bytes() == (out / "fed_rounds.csv").read_bytes()
    assert (tmp_path / "checkpoint.fwsp").read_bytes() == (out / "checkpoint.fwsp").read_bytes()


def test_train_fed_rejects_central_config(workspace):
    assert main(["train-fed", "--config", str(workspace / "central.yaml")]) == 2


def test_fedavg_and_fedprox_zero_mu_write_identical_params(workspace, tmp_path):
    cfg_avg = tmp_path / "avg.yaml"
    cfg_avg.write_text(FED_YAML.format(root=workspace, algorithm="fedavg", out="unused"))
    cfg_prox = tmp_path / "prox.yaml"
    cfg_prox.write_text(
        FED_YAML.format(root=workspace, algorithm="fedprox", out="unused")
        .replace("  model: wsr", "  model: wsr\n  mu_fixed: 0.0")
    )
    out_a, out_p = tmp_path / "a", tmp_path / "p"
    assert main(["train-fed", "--config", str(cfg_avg), "--out", str(out_a)]) == 0
    assert main(["train-fed", "--config", str(cfg_prox), "--out", str(out_p)]) == 0
    assert (out_a / "checkpoint.fwsp").read_bytes() == (out_p / "checkpoint.fwsp").read_bytes()


# ---- evaluate -------------------------------------------------------------------


def test_evaluate_writes_tables_and_figures(workspace):
    out = workspace / "out-central"
    assert main(["evaluate", "--config", str(workspace / "central.yaml")]) == 0
    header, columns, rows = read_csv(out / "accuracy_by_snr.csv")
    assert header == "# fedwsr-eval-v1"
    assert columns == ["snr_db", "class", "accuracy", "count"]
    assert rows[0][0] == "ALL" and rows[0][1] == "ALL"
    _, conf_cols, conf_rows = read_csv(out / "confusion.csv")
    assert conf_cols == ["true_class", "BPSK", "QPSK", "PAM4"]
    assert sum(int(v) for row in conf_rows for v in row[1:]) == 3 * 2 * 8
    assert (out / "accuracy_by_snr.png").exists()
    assert (out / "confusion.png").exists()


def test_evaluate_train_split_reproduces_logged_train_accuracy(workspace, tmp_path):
    # the final epoch's train_accuracy and an evaluate --split train run use
    # the same checkpoint and eval path, so the values match to the digit
    out = workspace / "out-central"
    _, _, train_rows = read_csv(out / "central_metrics.csv")
    logged = train_rows[-1][2]
    assert main([
        "evaluate", "--config", str(workspace / "central.yaml"),
        "--checkpoint", str(out / "checkpoint.fwsp"),
        "--out", str(tmp_path), "--split", "train",
    ]) == 0
    _, _, eval_rows = read_csv(tmp_path / "accuracy_by_snr.csv")
    assert eval_rows[0][2] == logged


def test_evaluate_confusion_snr_filter(workspace, tmp_path):
    out = workspace / "out-central"
    assert main([
        "evaluate", "--config", str(workspace / "central.yaml"),
        "--checkpoint", str(out / "checkpoint.fwsp"),
        "--out", str(tmp_path), "--confusion-snr", "10",
    ]) == 0
    _, _, conf_rows = read_csv(tmp_path / "confusion.csv")
    assert sum(int(v) for row in conf_rows for v in row[1:]) == 3 * 8  # one SNR bucket


def test_evaluate_missing_snr_bucket_is_data_error(workspace, tmp_path):
    assert main([
        "evaluate", "--config", str(workspace / "central.yaml"),
        "--checkpoint", str(workspace / "out-central" / "checkpoint.fwsp"),
        "--out", str(tmp_path), "--confusion-snr", "-17",
    ]) == 3


def test_evaluate_digest_mismatch_is_data_error(workspace, tmp_path):
    # architecture in config no longer matches the stored checkpoint
    other = tmp_path / "other.yaml"
    other.write_text(
        CENTRAL_YAML.format(root=workspace, mode="central_wsr", lam="1.0", out="x")
        .replace("[4, 8]", "[4, 16]")
    )
    assert main([
        "evaluate", "--config", str(other),
        "--checkpoint", str(workspace / "out-central" / "checkpoint.fwsp"),
        "--out", str(tmp_path),
    ]) == 3


def test_evaluate_wser_writes_enhancement_table(workspace):
    out = workspace / "out-wser"
    assert main(["evaluate", "--config", str(workspace / "wser.yaml")]) == 0
    header, columns, rows = read_csv(out / "enhancement.csv")
    assert header == "# fedwsr-enhance-v1"
    assert columns == ["snr_db", "mse_in", "mse_out", "gain_db"]
    assert len(rows) == 2  # one per SNR bucket
    assert (out / "enhancement.png").exists()


def test_evaluate_rerun_is_byte_identical(workspace, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main([
            "evaluate", "--config", str(workspace / "central.yaml"),
            "--checkpoint", str(workspace / "out-central" / "checkpoint.fwsp"),
            "--out", str(out),
        ]) == 0
    for name in ("accuracy_by_snr.csv", "confusion.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


# ---- summarize --------------------------------------------------------------------


def test_summarize_prints_tables(workspace, capsys):
    assert main(["summarize", "--config", str(workspace / "central.yaml")]) == 0
    text = capsys.readouterr().out
    assert "WSRNet" in text and "WSENet" in text
    assert "total" in text and "MACs" in text


# ---- error handling ------------------------------------------------------------------


def test_missing_config_is_exit_2(tmp_path):
    assert main(["gen-data", "--config", str(tmp_path / "none.yaml")]) == 2


def test_malformed_yaml_is_exit_2(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("data: [unclosed")
    assert main(["gen-data", "--config", str(bad)]) == 2


def test_bad_seed_override_is_exit_2(workspace):
    assert main([
        "gen-data", "--config", str(workspace / "central.yaml"),
        "--seed-override", "dataset=oops",
    ]) == 2
    assert main([
        "gen-data", "--config", str(workspace / "central.yaml"),
        "--seed-override", "noequals",
    ]) == 2


def test_missing_dataset_is_exit_3(workspace, tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(
        CENTRAL_YAML.format(root=workspace, mode="central_wsr", lam="1.0", out="x")
        .replace(f"{workspace}/data", str(tmp_path / "absent"))
    )
    assert main(["train-central", "--config", str(cfg)]) == 3


def test_dataset_config_mismatch_is_exit_3(workspace, tmp_path):
    # same files on disk, but the config now claims different schemes
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(
        CENTRAL_YAML.format(root=workspace, mode="central_wsr", lam="1.0", out="x")
        .replace("[BPSK, QPSK, PAM4]", "[BPSK, QPSK, QAM16]")
    )
    assert main(["train-central", "--config", str(cfg)]) == 3


def test_corrupt_dataset_is_exit_3(workspace, tmp_path):
    data = tmp_path / "data"
    data.mkdir()
    shutil.copy(workspace / "data" / "train.fwsr", data / "train.fwsr")
    shutil.copy(workspace / "data" / "test.fwsr", data / "test.fwsr")
    blob = (data / "train.fwsr").read_bytes()
    (data / "train.fwsr").write_bytes(blob[:-10])
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(
        CENTRAL_YAML.format(root=workspace, mode="central_wsr", lam="1.0", out="x")
        .replace(f"{workspace}/data", str(data))
    )
    assert main(["train-central", "--config", str(cfg)]) == 3
