"""Neighborhood graph and the operators driving the consequent solver.

Builds the symmetrized kNN similarity S, the graph Laplacian, the
second-order reconstruction operator I - S, the combined quadratic-form
operator M = Xg^T (Lg + (I-S)^T (I-S)) Xg, and a power-iteration upper bound
on M's largest eigenvalue that sets the shrinkage step size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class GeometryOperators:
    """Graph operators derived from one feature matrix.

    S: symmetrized similarity (N x N), Lg: graph Laplacian, Lam: I - S,
    M: combined operator in feature space (d_g x d_g), Lc: Lipschitz bound.
    """

    S: np.ndarray
    Lg: np.ndarray
    Lam: np.ndarray
    M: np.ndarray
    Lc: float


def knn_similarity(Xg: np.ndarray, k: int, bandwidth="auto") -> np.ndarray:
    """Symmetrized Gaussian kNN similarity with zero diagonal.

    Raw s[i, j] = exp(-||x_i - x_j||^2 / (2 sigma^2)) when j is one of the k
    nearest neighbors of i (self excluded), else 0; the result is
    (raw + raw^T) / 2. With bandwidth="auto", sigma is the median of all kNN
    distances (1.0 if that median is zero).
    """
    Xg = np.asarray(Xg, dtype=float)
    n = Xg.shape[0]
    if not 1 <= k < n:
        raise DataError(f"neighbor count k={k} must satisfy 1 <= k < N={n}")
    sq_norms = (Xg**2).sum(axis=1)
    sq_dist = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (Xg @ Xg.T)
    np.maximum(sq_dist, 0.0, out=sq_dist)
    np.fill_diagonal(sq_dist, np.inf)

    neighbor_idx = np.argsort(sq_dist, axis=1, kind="stable")[:, :k]
    rows = np.repeat(np.arange(n), k)
    cols = neighbor_idx.reshape(-1)

    if bandwidth == "auto":
        knn_dists = np.sqrt(sq_dist[rows, cols])
        sigma = float(np.median(knn_dists))
        if sigma <= 0.0:
            sigma = 1.0
    else:
        sigma = float(bandwidth)
        if sigma <= 0.0:
            raise DataError(f"bandwidth must be positive, got {bandwidth}")

    raw = np.zeros((n, n))
    raw[rows, cols] = np.exp(-sq_dist[rows, cols] / (2.0 * sigma**2))
    S = (raw + raw.T) / 2.0
    np.fill_diagonal(S, 0.0)
    return S


def _check_similarity(S: np.ndarray) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DataError(f"similarity matrix must be square, got shape {S.shape}")
    if not np.array_equal(S, S.T):
        raise DataError("similarity matrix must be symmetric")
    return S


def laplacian(S: np.ndarray) -> np.ndarray:
    """Graph Laplacian D - S with D the diagonal of row sums."""
    S = _check_similarity(S)
    return np.diag(S.sum(axis=1)) - S


def second_order_operator(S: np.ndarray) -> np.ndarray:
    """Reconstruction operator I - S whose Gram matrix scores neighborhood fit."""
    S = _check_similarity(S)
    return np.eye(S.shape[0]) - S


def combined_operator(Xg: np.ndarray, Lg: np.ndarray, Lam: np.ndarray) -> np.ndarray:
    """Quadratic-form operator Xg^T (Lg + Lam^T Lam) Xg, explicitly symmetrized."""
    Xg = np.asarray(Xg, dtype=float)
    M = Xg.T @ (Lg + Lam.T @ Lam) @ Xg
    return (M + M.T) / 2.0


def lipschitz_estimate(M: np.ndarray, tol: float = 1e-6, max_iter: int = 1000) -> float:
    """Power-iteration bound on the largest eigenvalue, times a 1.01 margin.

    Returns 1.0 for an all-zero operator so the shrinkage step stays defined.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if not np.array_equal(M, M.T):
        raise DataError("operator must be symmetric")
    if not M.any():
        return 1.0
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(max_iter):
        w = M @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            # v landed in the nullspace; restart from a fresh direction
            v = rng.standard_normal(n)
            v /= np.linalg.norm(v)
            continue
        v = w / norm
        new_estimate = float(v @ (M @ v))
        if abs(new_estimate - estimate) <= tol * abs(new_estimate):
            estimate = new_estimate
            break
        estimate = new_estimate
    value = max(estimate, 0.0) * 1.01
    return value if value > 0.0 else 1.0


def build_geometry(Xg: np.ndarray, k: int, bandwidth="auto", kernel_X: np.ndarray | None = None) -> GeometryOperators:
    """Assemble every graph operator needed by the solver.

    The similarity graph is built over kernel_X when given (the original-space
    switch), over Xg otherwise; the combined operator always lives in the
    space of Xg, which is what the consequent parameters multiply.
    """
    S = knn_similarity(Xg if kernel_X is None else kernel_X, k, bandwidth)
    Lg = laplacian(S)
    Lam = second_order_operator(S)
    M = combined_operator(Xg, Lg, Lam)
    return GeometryOperators(S=S, Lg=Lg, Lam=Lam, M=M, Lc=lipschitz_estimate(M))
