"""Client data partitioning: IID permutation split and label sharding.

Both modes return disjoint, exhaustive shards of sample indices (each
shard sorted ascending, so shard contents do not depend on permutation
internals).  The non-IID mode sorts the dataset by label, splits it into
``num_clients * classes_per_client`` contiguous chunks, and deals each
client ``classes_per_client`` random chunks — the canonical severe
label-skew construction: with a balanced dataset whose per-class counts
divide evenly, every chunk is single-label and each client sees at most
``classes_per_client`` distinct labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PARTITION_MODES = ("iid", "noniid_label_shard")


@dataclass(frozen=True)
class PartitionSpec:
    mode: str
    num_clients: int
    classes_per_client: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.mode not in PARTITION_MODES:
            raise ValueError(f"mode must be one of {PARTITION_MODES}, got {self.mode!r}")
        if self.num_clients < 1:
            raise ValueError(f"num_clients must be >= 1, got {self.num_clients}")
        if self.classes_per_client < 1:
            raise ValueError(f"classes_per_client must be >= 1, got {self.classes_per_client}")


def partition_iid(dataset, num_clients: int, seed: int) -> list[np.ndarray]:
    """Random near-equal split (shard sizes differ by at most one)."""
    n = len(dataset)
    if not 1 <= num_clients <= n:
        raise ValueError(f"num_clients must be in [1, {n}], got {num_clients}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(chunk) for chunk in np.array_split(perm, num_clients)]


def partition_noniid(
    dataset, num_clients: int, classes_per_client: int, seed: int
) -> list[np.ndarray]:
    """Label-sharded split: each client draws classes_per_client chunks of
    the label-sorted index order."""
    n = len(dataset)
    num_classes = dataset.num_classes
    if not 1 <= num_clients <= n:
        raise ValueError(f"num_clients must be in [1, {n}], got {num_clients}")
    if classes_per_client * num_clients < 2 * num_classes:
        raise ValueError(
            "infeasible non-IID partition: need classes_per_client * num_clients"
            f" >= 2 * num_classes ({classes_per_client} * {num_clients} < 2 * {num_classes})"
        )
    total_chunks = num_clients * classes_per_client
    if total_chunks > n:
        raise ValueError(f"more chunks ({total_chunks}) than samples ({n})")
    order = np.argsort(dataset.labels, kind="stable")
    chunks = np.array_split(order, total_chunks)
    deal = np.random.default_rng(seed).permutation(total_chunks)
    shards = []
    for k in range(num_clients):
        mine = deal[k * classes_per_client : (k + 1) * classes_per_client]
        shards.append(np.sort(np.concatenate([chunks[j] for j in mine])))
    return shards


def make_partition(dataset, spec: PartitionSpec) -> list[np.ndarray]:
    if spec.mode == "iid":
        return partition_iid(dataset, spec.num_clients, spec.seed)
    return partition_noniid(dataset, spec.num_clients, spec.classes_per_client, spec.seed)
