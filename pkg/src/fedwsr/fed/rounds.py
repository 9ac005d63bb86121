"""Federated orchestration: selection, local training, aggregation, FedProx+.

One round: select K clients, broadcast the global parameters, run each
selected client's proximal local SGD (mu=0 for FedAvg, fixed mu for
FedProx, per-client adapted mu for FedProx+), aggregate by shard size,
evaluate the new global model, and — for FedProx+ — refresh every client's
mu from the ratio of global to local performance.

All randomness flows through explicit, spawn-keyed RNG streams: the
selection stream is (selection_seed, (0,)) and client k's stream in round
t is (selection_seed, (1, t, k)), so trajectories do not depend on
execution order and re-runs are bit-identical.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..nncore import ParamVector, SGDState, flatten_params, load_params
from ..signal import Dataset
from ..train import evaluate_accuracy, run_epochs
from .partition import PartitionSpec, make_partition

ALGORITHMS = ("fedavg", "fedprox", "fedproxplus")


@dataclass(frozen=True)
class AdaptiveMuCfg:
    mu_min: float
    mu_max: float
    epsilon: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.mu_min <= self.mu_max:
            raise ValueError(f"need 0 <= mu_min <= mu_max, got [{self.mu_min}, {self.mu_max}]")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


def adaptive_mu(p_k: float, p_global: float, mu_0: float, cfg: AdaptiveMuCfg) -> float:
    """mu_k = clamp(mu_0 * max(P_global, eps) / max(P_k, eps), mu_min, mu_max).

    Clients lagging the global model (small P_k) get a stronger pull toward
    it.  Flooring both performances at epsilon keeps the ratio defined and
    makes P_k == P_global an exact fixed point (mu_0, within the clamp)
    even at zero accuracy.
    """
    if mu_0 <= 0.0:
        raise ValueError(f"mu_0 must be positive, got {mu_0}")
    ratio = max(p_global, cfg.epsilon) / max(p_k, cfg.epsilon)
    return float(min(max(mu_0 * ratio, cfg.mu_min), cfg.mu_max))


@dataclass(frozen=True)
class FedAlgorithm:
    tag: str
    local_epochs: int = 2
    local_lr: float = 0.002
    local_batch: int = 64
    momentum: float = 0.9
    weight_decay: float = 0.0005
    fixed_mu: float = 0.01  # FedProx
    mu_0: float = 0.01  # FedProx+
    mu_min: float | None = None  # default mu_0 / 10
    mu_max: float | None = None  # default mu_0 * 10
    epsilon: float = 0.01

    def __post_init__(self):
        if self.tag not in ALGORITHMS:
            raise ValueError(f"tag must be one of {ALGORITHMS}, got {self.tag!r}")
        if self.local_epochs < 1 or self.local_batch < 1:
            raise ValueError("local_epochs and local_batch must be >= 1")

    @property
    def adaptive_cfg(self) -> AdaptiveMuCfg:
        mu_min = self.mu_0 / 10.0 if self.mu_min is None else self.mu_min
        mu_max = self.mu_0 * 10.0 if self.mu_max is None else self.mu_max
        return AdaptiveMuCfg(mu_min, mu_max, self.epsilon)

    def initial_mu(self) -> float:
        if self.tag == "fedavg":
            return 0.0
        if self.tag == "fedprox":
            return self.fixed_mu
        return self.mu_0


@dataclass
class ClientState:
    id: int
    shard: np.ndarray
    mu_k: float = 0.0
    last_performance: float | None = None

    def __post_init__(self):
        if self.shard.size == 0:
            raise ValueError(f"client {self.id} has an empty shard")
        if self.mu_k < 0.0:
            raise ValueError(f"mu_k must be >= 0, got {self.mu_k}")


@dataclass
class ServerState:
    params: ParamVector
    round: int = 0
    mu_0: float = 0.01
    adaptive: AdaptiveMuCfg = field(default_factory=lambda: AdaptiveMuCfg(0.001, 0.1))
    selection_probs: np.ndarray | None = None


@dataclass(frozen=True)
class ClientRoundStat:
    client_id: int
    n_k: int
    mu_k: float
    local_loss: float
    performance: float  # P_k: shard accuracy after local training


@dataclass(frozen=True)
class RoundRecord:
    round: int
    selected: tuple[int, ...]
    stats: tuple[ClientRoundStat, ...]
    global_performance: float
    wall_time: float

    @property
    def mean_performance(self) -> float:
        return float(np.mean([s.performance for s in self.stats]))

    @property
    def mean_local_loss(self) -> float:
        return float(np.mean([s.local_loss for s in self.stats]))

    @property
    def min_mu(self) -> float:
        return min(s.mu_k for s in self.stats)

    @property
    def max_mu(self) -> float:
        return max(s.mu_k for s in self.stats)


def make_clients(shards: list[np.ndarray], alg: FedAlgorithm) -> list[ClientState]:
    mu = alg.initial_mu()
    return [ClientState(id=k, shard=shard, mu_k=mu) for k, shard in enumerate(shards)]


def select_clients(
    server: ServerState, num_clients: int, k: int, rng: np.random.Generator
) -> np.ndarray:
    """Sample k distinct client ids (sorted) with the server's probabilities."""
    if not 1 <= k <= num_clients:
        raise ValueError(f"k must be in [1, {num_clients}], got {k}")
    p = server.selection_probs
    if p is not None:
        p = np.asarray(p, dtype=np.float64)
        if p.shape != (num_clients,) or not np.isclose(p.sum(), 1.0):
            raise ValueError("selection_probs must be a length-N vector summing to 1")
    return np.sort(rng.choice(num_clients, size=k, replace=False, p=p))


def client_mu(alg: FedAlgorithm, client: ClientState) -> float:
    if alg.tag == "fedavg":
        return 0.0
    if alg.tag == "fedprox":
        return alg.fixed_mu
    return client.mu_k


def local_train(
    client: ClientState,
    w_t: ParamVector,
    alg: FedAlgorithm,
    factory,
    data: tuple[np.ndarray, np.ndarray | None, np.ndarray],
    rng: np.random.Generator,
) -> tuple[ParamVector, float, int]:
    """E local epochs of (proximal) SGD from w_t on the client's shard.

    Returns the updated parameters (with batch-norm state), the mean local
    loss over all local epochs, and the shard size n_k.
    """
    x, s, y = data
    task = factory()
    load_params(task.model, w_t)
    trainable = flatten_params(task.model)
    anchor = trainable.values.copy()
    opt = SGDState.for_vector(
        trainable, lr=alg.local_lr, momentum=alg.momentum, weight_decay=alg.weight_decay
    )
    losses = run_epochs(
        task,
        x,
        s,
        y,
        epochs=alg.local_epochs,
        batch_size=alg.local_batch,
        opt=opt,
        rng=rng,
        mu=client_mu(alg, client),
        anchor=anchor,
    )
    return flatten_params(task.model, with_state=True), float(np.mean(losses)), int(x.shape[0])


def aggregate(updates: list[tuple[ParamVector, int]]) -> ParamVector:
    """Shard-size-weighted mean of parameter vectors.

    Zero-weight updates are dropped (they contribute nothing), the list is
    put in a canonical order so the result is permutation-invariant, and
    the mean is accumulated relative to the first update — which makes
    "all updates identical" and "single effective update" return their
    input bit-for-bit.
    """
    if not updates:
        raise ValueError("aggregate needs at least one update")
    kept = [(w, int(n)) for w, n in updates if n > 0]
    if not kept:
        raise ValueError("all aggregation weights are zero")
    layout = kept[0][0].layout
    for w, _ in kept[1:]:
        if w.layout != layout:
            raise ValueError("aggregate: parameter layout mismatch")
    kept.sort(key=lambda wn: (wn[1], wn[0].values.tobytes()))
    base = kept[0][0].values
    total = sum(n for _, n in kept)
    acc = np.zeros_like(base)
    for w, n in kept:
        acc += n * (w.values - base)
    return kept[0][0].with_values(base + acc / total)


def evaluate(params: ParamVector, dataset, factory) -> float:
    """Eval-mode accuracy of the given parameters over a dataset."""
    if isinstance(dataset, Dataset):
        x, y = dataset.x, dataset.labels
    else:
        x, y = dataset
    task = factory()
    load_params(task.model, params)
    return evaluate_accuracy(task, x, y)


def run_round(
    server: ServerState,
    clients: list[ClientState],
    alg: FedAlgorithm,
    k: int,
    client_data,
    test_data: tuple[np.ndarray, np.ndarray],
    factory,
    selection_rng: np.random.Generator,
    client_rng,
    max_parallel: int = 1,
) -> tuple[ServerState, RoundRecord]:
    """One full federated round; mutates server and clients in place."""
    t0 = time.perf_counter()
    selected = select_clients(server, len(clients), k, selection_rng)

    def train_one(cid: int):
        client = clients[cid]
        rng = client_rng(server.round, cid)
        w_k, loss, n_k = local_train(client, server.params, alg, factory, client_data(cid), rng)
        x, _, y = client_data(cid)
        p_k = evaluate(w_k, (x, y), factory)
        return cid, w_k, loss, n_k, p_k

    if max_parallel > 1:
        with ThreadPoolExecutor(max_workers=max_parallel) as pool:
            results = list(pool.map(train_one, selected))
    else:
        results = [train_one(cid) for cid in selected]

    stats = []
    for cid, w_k, loss, n_k, p_k in results:
        stats.append(
            ClientRoundStat(
                client_id=int(cid),
                n_k=n_k,
                mu_k=client_mu(alg, clients[cid]),
                local_loss=loss,
                performance=p_k,
            )
        )
        clients[cid].last_performance = p_k

    new_params = aggregate([(w_k, n_k) for _, w_k, _, n_k, _ in results])
    p_global = evaluate(new_params, test_data, factory)

    if alg.tag == "fedproxplus":
        for client in clients:
            p_k = client.last_performance
            if p_k is None:  # never selected: neutral ratio keeps mu at mu_0
                p_k = p_global
            client.mu_k = adaptive_mu(p_k, p_global, server.mu_0, server.adaptive)

    record = RoundRecord(
        round=server.round,
        selected=tuple(int(c) for c in selected),
        stats=tuple(stats),
        global_performance=p_global,
        wall_time=time.perf_counter() - t0,
    )
    server.params = new_params
    server.round += 1
    return server, record


def run_federated(
    alg: FedAlgorithm,
    rounds: int,
    train_dataset: Dataset,
    test_dataset: Dataset,
    partition: PartitionSpec,
    factory,
    clients_per_round: int,
    selection_seed: int,
    on_round=None,
    max_parallel: int = 1,
) -> tuple[list[RoundRecord], ParamVector]:
    """Drive T rounds end to end; emits a RoundRecord after every round."""
    if rounds < 0:
        raise ValueError(f"rounds must be >= 0, got {rounds}")
    shards = make_partition(train_dataset, partition)
    clients = make_clients(shards, alg)
    init_task = factory()
    server = ServerState(
        params=flatten_params(init_task.model, with_state=True),
        mu_0=alg.mu_0,
        adaptive=alg.adaptive_cfg,
    )
    selection_rng = np.random.default_rng(np.random.SeedSequence(selection_seed, spawn_key=(0,)))

    def client_rng(round_idx: int, cid: int) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(selection_seed, spawn_key=(1, round_idx, cid))
        )

    shard_data = {}

    def client_data(cid: int):
        if cid not in shard_data:
            shard = clients[cid].shard
            shard_data[cid] = (
                train_dataset.x[shard],
                train_dataset.s_star[shard],
                train_dataset.labels[shard],
            )
        return shard_data[cid]

    test_data = (test_dataset.x, test_dataset.labels)
    records = []
    for _ in range(rounds):
        server, record = run_round(
            server,
            clients,
            alg,
            clients_per_round,
            client_data,
            test_data,
            factory,
            selection_rng,
            client_rng,
            max_parallel=max_parallel,
        )
        records.append(record)
        if on_round is not None:
            on_round(record)
    return records, server.params
