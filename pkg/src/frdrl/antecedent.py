"""TSK antecedent estimation and the mapping into the fuzzy feature space.

The antecedent of each rule is a per-feature Gaussian fuzzy set. Centers come
from fuzzy c-means over the training rows, widths from the ratio-of-scatters
estimate, and inputs are lifted to the H(d+1)-dimensional fuzzy feature space
by concatenating the normalized-firing-weighted affine blocks of every rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

WIDTH_FLOOR = 1e-8
FIRING_FLOOR = 1e-12


@dataclass(frozen=True)
class FuzzyAntecedent:
    """Gaussian centers E and widths Q (both H x d) of the rule antecedents."""

    E: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        E = np.ascontiguousarray(np.asarray(self.E, dtype=float))
        Q = np.ascontiguousarray(np.asarray(self.Q, dtype=float))
        if E.ndim != 2 or E.shape[0] < 1:
            raise ValueError(f"centers must be H x d with H >= 1, got shape {E.shape}")
        if Q.shape != E.shape:
            raise ValueError(f"width shape {Q.shape} does not match center shape {E.shape}")
        if np.any(Q <= 0):
            raise ValueError("all widths must be positive")
        E.setflags(write=False)
        Q.setflags(write=False)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "Q", Q)

    @property
    def n_rules(self) -> int:
        return self.E.shape[0]

    @property
    def n_features(self) -> int:
        return self.E.shape[1]


def _fcm_memberships(X: np.ndarray, E: np.ndarray, fuzzifier: float) -> np.ndarray:
    """Membership matrix U (H x N) for centers E; zero-distance rows saturate."""
    # sq_dist[h, i] = ||x_i - e_h||^2
    sq_dist = ((X[None, :, :] - E[:, None, :]) ** 2).sum(axis=2)
    U = np.zeros_like(sq_dist)
    zero_cols = np.flatnonzero((sq_dist == 0).any(axis=0))
    power = 1.0 / (fuzzifier - 1.0)
    regular = np.setdiff1d(np.arange(X.shape[0]), zero_cols, assume_unique=False)
    if regular.size:
        inv = (1.0 / sq_dist[:, regular]) ** power
        U[:, regular] = inv / inv.sum(axis=0, keepdims=True)
    for i in zero_cols:
        U[np.argmin(sq_dist[:, i]), i] = 1.0
    return U


def _fcm_centers(X: np.ndarray, U: np.ndarray, fuzzifier: float) -> np.ndarray:
    W = U**fuzzifier
    return (W @ X) / W.sum(axis=1, keepdims=True)


def _fcm_objective(X: np.ndarray, E: np.ndarray, U: np.ndarray, fuzzifier: float) -> float:
    sq_dist = ((X[None, :, :] - E[:, None, :]) ** 2).sum(axis=2)
    return float(np.sum(U**fuzzifier * sq_dist))


def fcm_cluster(X: np.ndarray, H: int, fuzzifier: float = 2.0, tol: float = 1e-5,
                max_iter: int = 100, seed: int = 0) -> np.ndarray:
    """Fuzzy c-means cluster centers (H x d), deterministic for a fixed seed.

    Centers start from H distinct rows sampled without replacement; iteration
    stops when the largest center shift drops below tol.
    """
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise DataError("non-finite input to clustering")
    n = X.shape[0]
    if not 1 <= H <= n:
        raise DataError(f"rule count H={H} must satisfy 1 <= H <= N={n}")
    if fuzzifier <= 1.0:
        raise DataError(f"fuzzifier must exceed 1, got {fuzzifier}")
    rng = np.random.default_rng(seed)
    E = X[rng.choice(n, size=H, replace=False)].copy()
    for _ in range(max_iter):
        U = _fcm_memberships(X, E, fuzzifier)
        E_new = _fcm_centers(X, U, fuzzifier)
        shift = float(np.max(np.abs(E_new - E)))
        E = E_new
        if shift < tol:
            break
    return E


def estimate_widths(X: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Per-rule, per-feature Gaussian widths from the scatter-ratio rule.

    q[h, j] = sum_i (x[i,j]-e[h,j])^2 / sum_{h'} sum_i (x[i,j]-e[h',j])^2,
    floored at 1e-8 so memberships stay defined for constant columns.
    """
    X = np.asarray(X, dtype=float)
    E = np.asarray(E, dtype=float)
    if X.shape[1] != E.shape[1]:
        raise ValueError(f"feature count mismatch: X has {X.shape[1]}, E has {E.shape[1]}")
    # scatter[h, j] = sum_i (x_{i,j} - e_{h,j})^2
    scatter = ((X[None, :, :] - E[:, None, :]) ** 2).sum(axis=1)
    denom = scatter.sum(axis=0, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        Q = np.where(denom > 0, scatter / np.where(denom > 0, denom, 1.0), 0.0)
    return np.maximum(Q, WIDTH_FLOOR)


def membership(x_j: float, e: float, q: float) -> float:
    """Gaussian membership exp(-(x-e)^2 / (2q)) of one feature value."""
    if q <= 0:
        raise ValueError(f"width must be positive, got {q}")
    return float(np.exp(-((x_j - e) ** 2) / (2.0 * q)))


def _log_firing(X: np.ndarray, antecedent: FuzzyAntecedent) -> np.ndarray:
    """log mu[i, h]: summed Gaussian exponents, one row per instance."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    diff = X[:, None, :] - antecedent.E[None, :, :]
    return -(diff**2 / (2.0 * antecedent.Q[None, :, :])).sum(axis=2)


def firing_levels(x: np.ndarray, antecedent: FuzzyAntecedent) -> np.ndarray:
    """Normalized rule firing levels for one input row.

    Per-feature memberships are combined by summing log-memberships; the
    normalizer is floored at 1e-12 against total underflow.
    """
    mu = np.exp(_log_firing(x, antecedent))[0]
    return mu / max(mu.sum(), FIRING_FLOOR)


def fuzzy_map(X: np.ndarray, antecedent: FuzzyAntecedent) -> np.ndarray:
    """Lift rows of X into the fuzzy feature space (N x H(d+1)).

    Block h of row i is firing[i, h] * [1, x_i].
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != antecedent.n_features:
        raise DataError(
            f"input has {X.shape[1]} features but the antecedent was built for {antecedent.n_features}"
        )
    mu = np.exp(_log_firing(X, antecedent))
    norm = np.maximum(mu.sum(axis=1, keepdims=True), FIRING_FLOOR)
    firing = mu / norm
    ones = np.ones((X.shape[0], 1))
    extended = np.concatenate([ones, X], axis=1)
    # blocks[i, h, :] = firing[i, h] * [1, x_i]
    blocks = firing[:, :, None] * extended[:, None, :]
    return blocks.reshape(X.shape[0], antecedent.n_rules * (antecedent.n_features + 1))
