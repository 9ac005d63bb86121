"""Experiment configuration: YAML schema, validation, and object builders.

Every run is fully described by one YAML file.  The four RNG seeds
(dataset, model, partition, selection) must be explicit — reproducibility
is part of the contract, so there are no hidden seed defaults.  The
train/test datasets derive their generator seeds as ``seeds.dataset`` and
``seeds.dataset + 1``.

Top-level keys:

    data:       dir, schemes, snr_grid_db, train_frames_per_cell,
                test_frames_per_cell, frame_len, channel {...}
    model:      mode (central_wsr | central_wser | fed), wsrnet {channels,
                strides}, wsenet {width, depth_blocks, residual_output,
                identity_init}, lambda
    training:   epochs, batch_size, lr, momentum, weight_decay
                (required for central modes)
    fed:        algorithm, num_clients, clients_per_round, rounds,
                local_epochs, local_batch, local_lr, partition {mode,
                classes_per_client}, mu_fixed, mu0, mu_min, mu_max,
                epsilon, model (wsr | wser)   (required for fed mode)
    seeds:      dataset, model, partition, selection  (all required)
    output_dir: where checkpoints/CSVs/figures go (CLI --out overrides)
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError
from .fed import FedAlgorithm, PartitionSpec
from .models import JointLossCfg, WSENetCfg, WSERNet, WSRNet, WSRNetCfg
from .nncore import config_digest
from .signal import ChannelConfig, DatasetSpec, ModScheme
from .train import JointTask, RecognitionTask

MODES = ("central_wsr", "central_wser", "fed")
FED_MODELS = ("wsr", "wser")


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"missing required key {where}.{key}")
    return mapping[key]


def _as_mapping(value, where: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(value).__name__}")
    return value


@dataclass(frozen=True)
class Seeds:
    dataset: int
    model: int
    partition: int
    selection: int


@dataclass(frozen=True)
class DataSection:
    dir: str
    schemes: tuple[ModScheme, ...]
    snr_grid_db: tuple[float, ...]
    train_frames_per_cell: int
    test_frames_per_cell: int
    frame_len: int
    channel: ChannelConfig


@dataclass(frozen=True)
class TrainingSection:
    epochs: int
    batch_size: int
    lr: float
    momentum: float = 0.9
    weight_decay: float = 0.0005


@dataclass(frozen=True)
class FedSection:
    algorithm: str
    num_clients: int
    clients_per_round: int
    rounds: int
    partition_mode: str
    classes_per_client: int
    local_epochs: int = 2
    local_batch: int = 64
    local_lr: float = 0.002
    momentum: float = 0.9
    weight_decay: float = 0.0005
    mu_fixed: float = 0.01
    mu0: float = 0.01
    mu_min: float | None = None
    mu_max: float | None = None
    epsilon: float = 0.01
    model: str = "wsr"


@dataclass(frozen=True)
class ExperimentConfig:
    data: DataSection
    mode: str
    wsrnet_channels: tuple[int, ...]
    wsrnet_strides: tuple[int, ...]
    wsenet_width: int
    wsenet_depth: int
    wsenet_residual: bool
    wsenet_identity_init: bool
    lam: float
    training: TrainingSection | None
    fed: FedSection | None
    seeds: Seeds
    output_dir: str

    # ---- derived builders -------------------------------------------------

    @property
    def num_classes(self) -> int:
        return len(self.data.schemes)

    def dataset_spec(self, split: str) -> DatasetSpec:
        if split == "train":
            frames, seed = self.data.train_frames_per_cell, self.seeds.dataset
        elif split == "test":
            frames, seed = self.data.test_frames_per_cell, self.seeds.dataset + 1
        else:
            raise ConfigError(f"unknown dataset split {split!r}")
        return DatasetSpec(
            schemes=self.data.schemes,
            snr_grid_db=self.data.snr_grid_db,
            frames_per_scheme_per_snr=frames,
            frame_len=self.data.frame_len,
            channel=self.data.channel,
            seed=seed,
        )

    def wsrnet_cfg(self) -> WSRNetCfg:
        return WSRNetCfg(
            num_classes=self.num_classes,
            channels=self.wsrnet_channels,
            strides=self.wsrnet_strides,
            frame_len=self.data.frame_len,
        )

    def wsenet_cfg(self) -> WSENetCfg:
        return WSENetCfg(
            width=self.wsenet_width,
            depth_blocks=self.wsenet_depth,
            frame_len=self.data.frame_len,
            residual_output=self.wsenet_residual,
            identity_init=self.wsenet_identity_init,
        )

    def arch_kind(self) -> str:
        """Which architecture this config trains/evaluates: wsr or wser."""
        if self.mode == "central_wsr":
            return "wsr"
        if self.mode == "central_wser":
            return "wser"
        return self.fed.model

    def task_factory(self):
        """Deterministic builder of a fresh task (model seeded by seeds.model)."""
        kind = self.arch_kind()
        rec_cfg = self.wsrnet_cfg()
        enh_cfg = self.wsenet_cfg()
        loss_cfg = JointLossCfg(self.lam)
        model_seed = self.seeds.model

        def factory():
            rng = np.random.default_rng(np.random.SeedSequence(model_seed, spawn_key=(0,)))
            if kind == "wsr":
                return RecognitionTask(WSRNet(rec_cfg, rng, dtype=np.float32))
            return JointTask(WSERNet(enh_cfg, rec_cfg, rng, dtype=np.float32), loss_cfg)

        return factory

    def fed_algorithm(self) -> FedAlgorithm:
        f = self.fed
        return FedAlgorithm(
            tag=f.algorithm,
            local_epochs=f.local_epochs,
            local_lr=f.local_lr,
            local_batch=f.local_batch,
            momentum=f.momentum,
            weight_decay=f.weight_decay,
            fixed_mu=f.mu_fixed,
            mu_0=f.mu0,
            mu_min=f.mu_min,
            mu_max=f.mu_max,
            epsilon=f.epsilon,
        )

    def partition_spec(self) -> PartitionSpec:
        f = self.fed
        return PartitionSpec(
            mode=f.partition_mode,
            num_clients=f.num_clients,
            classes_per_client=f.classes_per_client,
            seed=self.seeds.partition,
        )

    def arch_digest(self) -> str:
        arch = {
            "kind": self.arch_kind(),
            "frame_len": self.data.frame_len,
            "num_classes": self.num_classes,
            "wsrnet_channels": list(self.wsrnet_channels),
            "wsrnet_strides": list(self.wsrnet_strides),
        }
        if self.arch_kind() == "wser":
            arch.update(
                wsenet_width=self.wsenet_width,
                wsenet_depth=self.wsenet_depth,
                wsenet_residual=self.wsenet_residual,
                lam=self.lam,
            )
        return config_digest(arch)


def _parse_channel(raw: dict) -> ChannelConfig:
    known = {
        "samples_per_symbol": int,
        "rolloff": float,
        "f_err": float,
        "theta_err": float,
        "zeta_err": float,
        "cpfsk_index": float,
        "gfsk_bt": float,
        "impairment_level": str,
        "sample_rate_hz": float,
    }
    kwargs = {}
    for key, value in raw.items():
        if key in ("fading_tap_mags_db", "fading_tap_delays"):
            kwargs[key] = tuple(float(v) for v in value)
        elif key in known:
            kwargs[key] = known[key](value)
        else:
            raise ConfigError(f"unknown key data.channel.{key}")
    try:
        return ChannelConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"data.channel: {exc}") from exc


def _parse_data(raw: dict) -> DataSection:
    try:
        schemes = tuple(ModScheme.from_name(str(s)) for s in _require(raw, "schemes", "data"))
    except ValueError as exc:
        raise ConfigError(f"data.schemes: {exc}") from exc
    snr_grid = tuple(float(v) for v in _require(raw, "snr_grid_db", "data"))
    section = DataSection(
        dir=str(_require(raw, "dir", "data")),
        schemes=schemes,
        snr_grid_db=snr_grid,
        train_frames_per_cell=int(_require(raw, "train_frames_per_cell", "data")),
        test_frames_per_cell=int(_require(raw, "test_frames_per_cell", "data")),
        frame_len=int(raw.get("frame_len", 128)),
        channel=_parse_channel(_as_mapping(raw.get("channel"), "data.channel")),
    )
    if len(set(schemes)) != len(schemes):
        raise ConfigError("data.schemes must be distinct")
    if not snr_grid:
        raise ConfigError("data.snr_grid_db must be nonempty")
    if section.train_frames_per_cell < 1 or section.test_frames_per_cell < 1:
        raise ConfigError("data.*_frames_per_cell must be >= 1")
    return section


def _parse_training(raw: dict) -> TrainingSection:
    return TrainingSection(
        epochs=int(_require(raw, "epochs", "training")),
        batch_size=int(_require(raw, "batch_size", "training")),
        lr=float(_require(raw, "lr", "training")),
        momentum=float(raw.get("momentum", 0.9)),
        weight_decay=float(raw.get("weight_decay", 0.0005)),
    )


def _parse_fed(raw: dict) -> FedSection:
    partition = _as_mapping(_require(raw, "partition", "fed"), "fed.partition")
    section = FedSection(
        algorithm=str(_require(raw, "algorithm", "fed")),
        num_clients=int(_require(raw, "num_clients", "fed")),
        clients_per_round=int(_require(raw, "clients_per_round", "fed")),
        rounds=int(_require(raw, "rounds", "fed")),
        partition_mode=str(_require(partition, "mode", "fed.partition")),
        classes_per_client=int(partition.get("classes_per_client", 2)),
        local_epochs=int(raw.get("local_epochs", 2)),
        local_batch=int(raw.get("local_batch", 64)),
        local_lr=float(raw.get("local_lr", 0.002)),
        momentum=float(raw.get("momentum", 0.9)),
        weight_decay=float(raw.get("weight_decay", 0.0005)),
        mu_fixed=float(raw.get("mu_fixed", 0.01)),
        mu0=float(raw.get("mu0", 0.01)),
        mu_min=None if raw.get("mu_min") is None else float(raw["mu_min"]),
        mu_max=None if raw.get("mu_max") is None else float(raw["mu_max"]),
        epsilon=float(raw.get("epsilon", 0.01)),
        model=str(raw.get("model", "wsr")),
    )
    if section.model not in FED_MODELS:
        raise ConfigError(f"fed.model must be one of {FED_MODELS}, got {section.model!r}")
    if section.rounds < 0:
        raise ConfigError("fed.rounds must be >= 0")
    if not 1 <= section.clients_per_round <= section.num_clients:
        raise ConfigError("fed.clients_per_round must be in [1, num_clients]")
    return section


def _parse_seeds(raw: dict, overrides: dict[str, int]) -> Seeds:
    merged = dict(raw)
    for name, value in overrides.items():
        if name not in ("dataset", "model", "partition", "selection"):
            raise ConfigError(f"unknown seed override {name!r}")
        merged[name] = value
    kwargs = {}
    for name in ("dataset", "model", "partition", "selection"):
        if name not in merged:
            raise ConfigError(f"missing required key seeds.{name} (all seeds must be explicit)")
        try:
            kwargs[name] = int(merged[name])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"seeds.{name} must be an integer") from exc
    return Seeds(**kwargs)


def load_config(path: str | Path, seed_overrides: dict[str, int] | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    return parse_config(_as_mapping(raw, "config"), seed_overrides)


def parse_config(raw: dict, seed_overrides: dict[str, int] | None = None) -> ExperimentConfig:
    data = _parse_data(_as_mapping(_require(raw, "data", "config"), "data"))
    model_raw = _as_mapping(_require(raw, "model", "config"), "model")
    mode = str(_require(model_raw, "mode", "model"))
    if mode not in MODES:
        raise ConfigError(f"model.mode must be one of {MODES}, got {mode!r}")
    wsr_raw = _as_mapping(model_raw.get("wsrnet"), "model.wsrnet")
    wse_raw = _as_mapping(model_raw.get("wsenet"), "model.wsenet")
    lam = float(model_raw.get("lambda", 0.3))
    if not 0.0 <= lam <= 1.0:
        raise ConfigError(f"model.lambda must be in [0, 1], got {lam}")

    training = None
    if mode in ("central_wsr", "central_wser"):
        if "training" not in raw:
            raise ConfigError(f"mode {mode} requires a training section")
        training = _parse_training(_as_mapping(raw["training"], "training"))
    fed = None
    if mode == "fed":
        if "fed" not in raw:
            raise ConfigError("mode fed requires a fed section")
        fed = _parse_fed(_as_mapping(raw["fed"], "fed"))

    seeds = _parse_seeds(_as_mapping(_require(raw, "seeds", "config"), "seeds"), seed_overrides or {})

    cfg = ExperimentConfig(
        data=data,
        mode=mode,
        wsrnet_channels=tuple(int(c) for c in wsr_raw.get("channels", (64, 128, 256, 512))),
        wsrnet_strides=tuple(int(s) for s in wsr_raw.get("strides", (1, 2, 2, 2))),
        wsenet_width=int(wse_raw.get("width", 32)),
        wsenet_depth=int(wse_raw.get("depth_blocks", 15)),
        wsenet_residual=bool(wse_raw.get("residual_output", True)),
        wsenet_identity_init=bool(wse_raw.get("identity_init", False)),
        lam=lam,
        training=training,
        fed=fed,
        seeds=seeds,
        output_dir=str(raw.get("output_dir", "fedwsr-out")),
    )
    try:  # materialize the model/dataset configs once so bad values fail fast
        cfg.wsrnet_cfg()
        cfg.wsenet_cfg()
        cfg.dataset_spec("train")
        cfg.dataset_spec("test")
        if fed is not None:
            cfg.fed_algorithm()
            cfg.partition_spec()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg
