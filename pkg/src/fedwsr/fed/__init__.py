"""Simulated federated learning: partitioning, rounds, FedAvg/FedProx/FedProx+."""

from .partition import (
    PARTITION_MODES,
    PartitionSpec,
    make_partition,
    partition_iid,
    partition_noniid,
)
from .rounds import (
    ALGORITHMS,
    AdaptiveMuCfg,
    ClientRoundStat,
    ClientState,
    FedAlgorithm,
    RoundRecord,
    ServerState,
    adaptive_mu,
    aggregate,
    client_mu,
    evaluate,
    local_train,
    make_clients,
    run_federated,
    run_round,
    select_clients,
)

__all__ = [
    "ALGORITHMS",
    "AdaptiveMuCfg",
    "ClientRoundStat",
    "ClientState",
    "FedAlgorithm",
    "PARTITION_MODES",
    "PartitionSpec",
    "RoundRecord",
    "ServerState",
    "adaptive_mu",
    "aggregate",
    "client_mu",
    "evaluate",
    "local_train",
    "make_clients",
    "make_partition",
    "partition_iid",
    "partition_noniid",
    "run_federated",
    "run_round",
    "select_clients",
]
