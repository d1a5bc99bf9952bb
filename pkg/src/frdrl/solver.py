"""Differentiable unrolled shrinkage solver for the consequent parameters.

The classical iteration P_k = prox(G P_{k-1}, theta) with G = I - M/Lc and
theta = alpha/Lc is unrolled into K blocks whose layer matrices G_k and shared
threshold theta are trained by a hand-derived backward sweep plus an
adaptive-moment outer update. `classical_ista` keeps the untrained iteration
around as an oracle and baseline; an untrained stack reproduces it bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError

DIVERGENCE_CAP = 1e12


def soft_threshold(V: np.ndarray, theta: float) -> np.ndarray:
    """Elementwise shrink-toward-zero: v -> sign(v) * max(|v| - theta, 0)."""
    if theta < 0:
        raise ValueError(f"threshold must be nonnegative, got {theta}")
    V = np.asarray(V, dtype=float)
    return np.where(V > theta, V - theta, np.where(V < -theta, V + theta, 0.0))


def _ista_layer(M: np.ndarray, Lc: float) -> np.ndarray:
    """The fixed gradient-step layer I - M/Lc shared by init and the oracle."""
    return np.eye(M.shape[0]) - M / Lc


@dataclass(frozen=True)
class UnrolledStack:
    """K learnable square layers, one shared threshold, and the fixed start P0."""

    G: list[np.ndarray]
    theta: float
    P0: np.ndarray

    @property
    def n_blocks(self) -> int:
        return len(self.G)

    @property
    def dim(self) -> int:
        return self.P0.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.P0.shape[1]


@dataclass(frozen=True)
class ForwardCache:
    """Pre-activations A_k and every iterate P_0..P_K from one forward pass."""

    A: list[np.ndarray]
    P: list[np.ndarray]


@dataclass(frozen=True)
class StackGradients:
    """Gradients mirroring UnrolledStack's learnable parameters."""

    dG: list[np.ndarray]
    dtheta: float


def init_stack(M: np.ndarray, Lc: float, alpha: float, K: int, m: int, seed: int) -> UnrolledStack:
    """Fresh stack matching the classical iteration: G_k = I - M/Lc, theta = alpha/Lc.

    P0 entries are drawn uniformly from [-0.1, 0.1] with the given seed.
    """
    if Lc <= 0:
        raise ValueError(f"Lipschitz constant must be positive, got {Lc}")
    if K < 1:
        raise ValueError(f"block count must be >= 1, got {K}")
    M = np.asarray(M, dtype=float)
    layer = _ista_layer(M, Lc)
    rng = np.random.default_rng(seed)
    P0 = rng.uniform(-0.1, 0.1, size=(M.shape[0], m))
    return UnrolledStack(G=[layer.copy() for _ in range(K)], theta=alpha / Lc, P0=P0)


def forward(stack: UnrolledStack) -> tuple[np.ndarray, ForwardCache]:
    """Run every block sequentially, caching all intermediates."""
    P = stack.P0
    A_list: list[np.ndarray] = []
    P_list: list[np.ndarray] = [P]
    for G in stack.G:
        A = G @ P
        P = soft_threshold(A, stack.theta)
        if not np.all(np.isfinite(P)) or np.max(np.abs(P)) > DIVERGENCE_CAP:
            raise DivergenceError(
                f"block {len(A_list) + 1} produced non-finite or exploding values "
                f"(max |P| = {np.max(np.abs(P)):.3e})"
            )
        A_list.append(A)
        P_list.append(P)
    return P, ForwardCache(A=A_list, P=P_list)


def classical_ista(M: np.ndarray, Lc: float, alpha: float, P0: np.ndarray, iters: int) -> np.ndarray:
    """Plain shrinkage iteration with the fixed layer I - M/Lc; the no-learning oracle."""
    if Lc <= 0:
        raise ValueError(f"Lipschitz constant must be positive, got {Lc}")
    M = np.asarray(M, dtype=float)
    layer = _ista_layer(M, Lc)
    threshold = alpha / Lc
    P = np.asarray(P0, dtype=float)
    for _ in range(iters):
        P = soft_threshold(layer @ P, threshold)
    return P


def ista_objective(Xg: np.ndarray, Lg: np.ndarray, Lam: np.ndarray, P: np.ndarray, alpha: float) -> float:
    """Geometry-preservation objective tr(Z^T Lg Z) + tr(Z^T Lam^T Lam Z) + alpha ||P||_1."""
    Z = np.asarray(Xg, dtype=float) @ P
    LamZ = Lam @ Z
    return float(np.trace(Z.T @ Lg @ Z) + np.sum(LamZ**2) + alpha * np.sum(np.abs(P)))


def backward(stack: UnrolledStack, cache: ForwardCache, dP_K: np.ndarray) -> StackGradients:
    """Reverse sweep through the blocks for dG_k and dtheta.

    The prox derivative uses the subgradient convention: entries with
    |A_k| <= theta (boundary included) pass no gradient.
    """
    if dP_K.shape != stack.P0.shape:
        raise ValueError(f"upstream gradient shape {dP_K.shape} does not match P shape {stack.P0.shape}")
    dP = np.asarray(dP_K, dtype=float)
    dG = [np.empty(0)] * stack.n_blocks
    dtheta = 0.0
    for k in range(stack.n_blocks - 1, -1, -1):
        A = cache.A[k]
        mask = np.abs(A) > stack.theta
        dA = dP * mask
        dtheta += float(np.sum(-np.sign(A) * mask * dP))
        dG[k] = dA @ cache.P[k].T
        dP = stack.G[k].T @ dA
    return StackGradients(dG=dG, dtheta=dtheta)


@dataclass
class AdamState:
    """First/second moment accumulators for every learnable parameter."""

    step: int = 0
    mG: list[np.ndarray] = field(default_factory=list)
    vG: list[np.ndarray] = field(default_factory=list)
    mtheta: float = 0.0
    vtheta: float = 0.0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_stack(cls, stack: UnrolledStack) -> "AdamState":
        return cls(
            mG=[np.zeros_like(G) for G in stack.G],
            vG=[np.zeros_like(G) for G in stack.G],
        )


def outer_update(stack: UnrolledStack, grads: StackGradients, state: AdamState | None,
                 lr: float) -> tuple[UnrolledStack, AdamState]:
    """One adaptive-moment step on every G_k and theta; theta is clamped to >= 0."""
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    if state is None:
        state = AdamState.for_stack(stack)
    t = state.step + 1
    b1, b2, eps = state.beta1, state.beta2, state.eps
    corr1 = 1.0 - b1**t
    corr2 = 1.0 - b2**t

    new_G = []
    new_mG = []
    new_vG = []
    for G, g, m, v in zip(stack.G, grads.dG, state.mG, state.vG):
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * g**2
        new_G.append(G - lr * (m / corr1) / (np.sqrt(v / corr2) + eps))
        new_mG.append(m)
        new_vG.append(v)

    mtheta = b1 * state.mtheta + (1.0 - b1) * grads.dtheta
    vtheta = b2 * state.vtheta + (1.0 - b2) * grads.dtheta**2
    theta = stack.theta - lr * (mtheta / corr1) / (np.sqrt(vtheta / corr2) + eps)
    theta = max(theta, 0.0)

    new_state = AdamState(step=t, mG=new_mG, vG=new_vG, mtheta=mtheta, vtheta=vtheta,
                          beta1=b1, beta2=b2, eps=eps)
    return UnrolledStack(G=new_G, theta=theta, P0=stack.P0), new_state
