"""Downstream task heads and full-batch training orchestration.

Classification trains the unrolled stack against a squared softmax-residual
loss with a ridge term on the final consequent matrix; clustering alternates
a K-means head (center and partition updates) with gradient steps on the
representation. Both estimate the antecedent and the graph from the data they
are given, so classification callers pass the training split only.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .antecedent import FuzzyAntecedent, estimate_widths, fcm_cluster, fuzzy_map
from .data import Dataset, one_hot
from .errors import ConfigError, DivergenceError
from .geometry import GeometryOperators, build_geometry
from .solver import AdamState, UnrolledStack, backward, forward, init_stack, outer_update


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for one training run.

    m defaults to the class count for classification; clustering callers must
    set it explicitly (the representation width is free there).
    """

    H: int = 10
    K: int = 10
    m: int | None = None
    alpha: float = 0.0001
    beta: float = 0.01
    lr: float = 5e-5
    epochs: int = 1000
    knn_k: int = 5
    bandwidth: float | str = "auto"
    seed: int = 0
    fuzzifier: float = 2.0
    fcm_tol: float = 1e-5
    fcm_max_iter: int = 100

    def __post_init__(self):
        for name in ("H", "K", "knn_k", "fcm_max_iter"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.m is not None and self.m < 1:
            raise ConfigError(f"m must be >= 1, got {self.m}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.alpha < 0 or self.beta < 0:
            raise ConfigError("alpha and beta must be nonnegative")
        if self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")
        if self.bandwidth != "auto" and float(self.bandwidth) <= 0:
            raise ConfigError(f"bandwidth must be 'auto' or a positive real, got {self.bandwidth}")
        if self.fuzzifier <= 1:
            raise ConfigError(f"fuzzifier must exceed 1, got {self.fuzzifier}")


@dataclass(frozen=True)
class Model:
    """A trained antecedent + stack pair with its final consequent matrix."""

    antecedent: FuzzyAntecedent
    stack: UnrolledStack
    P_final: np.ndarray
    config: TrainConfig
    task: str


@dataclass(frozen=True)
class ClusterState:
    """K-means head state: centers V (m x c) and one-hot partition U (c x N)."""

    V: np.ndarray
    U: np.ndarray


@dataclass
class TrainTrace:
    """Optional collector for per-epoch losses and the similarity graph."""

    losses: list[float] = field(default_factory=list)
    similarity: np.ndarray | None = None


def _derive_seeds(seed: int, n: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


def softmax_rows(Z: np.ndarray) -> np.ndarray:
    """Rowwise exp-normalization with max subtraction for stability."""
    Z = np.asarray(Z, dtype=float)
    shifted = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(shifted)
    return E / E.sum(axis=1, keepdims=True)


def classification_loss(Z: np.ndarray, Y: np.ndarray, P: np.ndarray, beta: float) -> float:
    """Squared softmax residual plus a squared-Frobenius ridge on P."""
    residual = softmax_rows(Z) - Y if Z.shape[0] else 0.0
    return float(np.sum(np.square(residual)) + beta * np.sum(np.asarray(P) ** 2))


def classification_grad(Z: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Exact gradient of the squared softmax residual with respect to Z."""
    S = softmax_rows(Z)
    G = 2.0 * (S - Y)
    return S * (G - np.sum(G * S, axis=1, keepdims=True))


def _fit_antecedent(X: np.ndarray, config: TrainConfig, seed: int) -> FuzzyAntecedent:
    E = fcm_cluster(X, config.H, config.fuzzifier, config.fcm_tol, config.fcm_max_iter, seed)
    return FuzzyAntecedent(E=E, Q=estimate_widths(X, E))


def _prepare(data: Dataset, config: TrainConfig, m: int, graph_space: str,
             fcm_seed: int, p0_seed: int) -> tuple[FuzzyAntecedent, np.ndarray, GeometryOperators, UnrolledStack]:
    if graph_space not in ("fuzzy", "original"):
        raise ConfigError(f"graph_space must be 'fuzzy' or 'original', got {graph_space!r}")
    antecedent = _fit_antecedent(data.X, config, fcm_seed)
    Xg = fuzzy_map(data.X, antecedent)
    kernel_X = None if graph_space == "fuzzy" else data.X
    geometry = build_geometry(Xg, config.knn_k, config.bandwidth, kernel_X=kernel_X)
    stack = init_stack(geometry.M, geometry.Lc, config.alpha, config.K, m, p0_seed)
    return antecedent, Xg, geometry, stack


def _check_finite_loss(loss: float, epoch: int) -> float:
    if not np.isfinite(loss):
        raise DivergenceError(f"loss became non-finite at epoch {epoch}")
    return loss


def train_classifier(train: Dataset, config: TrainConfig, *, graph_space: str = "fuzzy",
                     trace: TrainTrace | None = None) -> Model:
    """Full-batch training of the classification head.

    The antecedent and graph come from the given (training) data only; the
    output dimension must equal the class count.
    """
    if config.m is None:
        config = replace(config, m=train.c)
    elif config.m != train.c:
        raise ConfigError(f"classification needs m = class count ({train.c}), got m={config.m}")
    fcm_seed, p0_seed, _ = _derive_seeds(config.seed, 3)
    antecedent, Xg, geometry, stack = _prepare(train, config, config.m, graph_space, fcm_seed, p0_seed)
    if trace is not None:
        trace.similarity = geometry.S

    Y = one_hot(train.y, train.c)
    state: AdamState | None = None
    for epoch in range(config.epochs):
        P_K, cache = forward(stack)
        Z = Xg @ P_K
        loss = _check_finite_loss(classification_loss(Z, Y, P_K, config.beta), epoch)
        if trace is not None:
            trace.losses.append(loss)
        dP = Xg.T @ classification_grad(Z, Y) + 2.0 * config.beta * P_K
        grads = backward(stack, cache, dP)
        stack, state = outer_update(stack, grads, state, config.lr)

    P_final, _ = forward(stack)
    return Model(antecedent=antecedent, stack=stack, P_final=P_final, config=config,
                 task="classification")


def predict(model: Model, X: np.ndarray) -> np.ndarray:
    """Class labels: argmax over the rows of fuzzy_map(X) @ P_final (ties -> lowest index)."""
    Xg = fuzzy_map(X, model.antecedent)
    return np.argmax(Xg @ model.P_final, axis=1)


def update_centers(Z: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Cluster centers (m x c): column j is the mean of the rows assigned to j.

    An empty cluster is re-seeded to the row farthest from its assigned
    center; rows claimed this way are not reused within the same pass.
    """
    Z = np.asarray(Z, dtype=float)
    U = np.asarray(U, dtype=float)
    counts = U.sum(axis=1)
    V = np.zeros((Z.shape[1], U.shape[0]))
    nonempty = counts > 0
    V[:, nonempty] = (U[nonempty] @ Z).T / counts[nonempty]
    empties = np.flatnonzero(~nonempty)
    if empties.size:
        assigned = np.argmax(U, axis=0)
        dist = np.linalg.norm(Z - V[:, assigned].T, axis=1)
        for j in empties:
            row = int(np.argmax(dist))
            V[:, j] = Z[row]
            dist[row] = -np.inf
    return V


def update_partition(Z: np.ndarray, V: np.ndarray) -> np.ndarray:
    """One-hot partition (c x N) assigning every row to its nearest center."""
    Z = np.asarray(Z, dtype=float)
    V = np.asarray(V, dtype=float)
    # sq_dist[j, i] = ||z_j - v_:,i||^2
    sq_dist = ((Z[:, None, :] - V.T[None, :, :]) ** 2).sum(axis=2)
    nearest = np.argmin(sq_dist, axis=1)
    U = np.zeros((V.shape[1], Z.shape[0]))
    U[nearest, np.arange(Z.shape[0])] = 1.0
    return U


def clustering_loss(Z: np.ndarray, V: np.ndarray, U: np.ndarray) -> float:
    """Squared Frobenius residual ||Z^T - V U||_F^2 of the K-means head."""
    return float(np.sum((np.asarray(Z).T - V @ U) ** 2))


def _balanced_partition(n: int, c: int, seed: int) -> np.ndarray:
    order = np.random.default_rng(seed).permutation(n)
    U = np.zeros((c, n))
    U[np.arange(n) % c, order] = 1.0
    return U


def train_clusterer(data: Dataset, config: TrainConfig, *, graph_space: str = "fuzzy",
                    trace: TrainTrace | None = None) -> tuple[Model, ClusterState]:
    """Full-batch transductive training of the clustering head.

    Per epoch: forward, center update, partition update, loss, then the
    gradient step through the representation with V and U held constant. The
    returned state reflects one final center/partition alternation on the
    trained representation.
    """
    if config.m is None:
        raise ConfigError("clustering needs an explicit output dimension m")
    fcm_seed, p0_seed, part_seed = _derive_seeds(config.seed, 3)
    antecedent, Xg, geometry, stack = _prepare(data, config, config.m, graph_space, fcm_seed, p0_seed)
    if trace is not None:
        trace.similarity = geometry.S

    U = _balanced_partition(data.n, data.c, part_seed)
    state: AdamState | None = None
    for epoch in range(config.epochs):
        P_K, cache = forward(stack)
        Z = Xg @ P_K
        V = update_centers(Z, U)
        U = update_partition(Z, V)
        loss = _check_finite_loss(clustering_loss(Z, V, U), epoch)
        if trace is not None:
            trace.losses.append(loss)
        dP = Xg.T @ (2.0 * (Z - (V @ U).T))
        grads = backward(stack, cache, dP)
        stack, state = outer_update(stack, grads, state, config.lr)

    P_final, _ = forward(stack)
    Z = Xg @ P_final
    V = update_centers(Z, U)
    U = update_partition(Z, V)
    model = Model(antecedent=antecedent, stack=stack, P_final=P_final, config=config,
                  task="clustering")
    return model, ClusterState(V=V, U=U)
