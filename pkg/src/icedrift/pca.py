"""Standardized PCA across concurrently deployed buoys.

Each buoy's per-step displacement series becomes one column of an ensemble
matrix. Columns are centred and scaled by their sample standard deviation
(n-1 denominator), the correlation matrix Z^T Z / (n-1) is diagonalized with
cyclic Jacobi rotations, and the sorted eigenpairs drive projection onto the
leading components, reconstruction back to physical units, explained-variance
fractions and RMS reconstruction errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadRank,
    DegenerateColumn,
    NoConvergence,
    NumericalError,
    ShapeMismatch,
)
from .geodesy import displacement_series
from .ingest import EnsembleWindow

JACOBI_SWEEP_BUDGET = 100
# Convergence: off-diagonal Frobenius mass below 1e-12 * ||C||_F.
JACOBI_OFF_TOL = 1e-12
EIGVAL_CLAMP = -1e-10
SIGMA_FLOOR = 1e-12


@dataclass(frozen=True)
class EnsembleMatrix:
    """n x p matrix of per-step displacement (km); column j belongs to ids[j]."""

    times: np.ndarray
    ids: tuple[str, ...]
    x: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=float)
        x.setflags(write=False)
        times = np.ascontiguousarray(self.times, dtype=np.int64)
        times.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "ids", tuple(self.ids))
        n, p = self.x.shape
        if n < 2 or p < 1:
            raise ValueError(f"ensemble needs n >= 2 and p >= 1, got {self.x.shape}")
        if len(self.ids) != p or len(self.times) != n:
            raise ValueError("ids/times lengths must match the matrix shape")
        if not np.all(np.isfinite(self.x)):
            raise ValueError("ensemble matrix must be hole-free and finite")


@dataclass(frozen=True)
class PcaModel:
    """Column means/sigmas plus sorted eigenpairs of the correlation matrix."""

    ids: tuple[str, ...]
    mu: np.ndarray
    sigma: np.ndarray
    eigvals: np.ndarray
    eigvecs: np.ndarray
    explained: np.ndarray

    def __post_init__(self):
        for name in ("mu", "sigma", "eigvals", "eigvecs", "explained"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "ids", tuple(self.ids))
        p = len(self.mu)
        if not (
            len(self.sigma) == len(self.eigvals) == len(self.explained) == p
            and self.eigvecs.shape == (p, p)
            and len(self.ids) == p
        ):
            raise ValueError("inconsistent model dimensions")
        if np.any(np.diff(self.eigvals) > 0.0):
            raise ValueError("eigenvalues must be sorted descending")

    @property
    def p(self) -> int:
        return len(self.eigvals)


def ensemble_from_window(window: EnsembleWindow, channel: str = "total") -> EnsembleMatrix:
    """Stack one displacement channel of aligned tracks into an ensemble."""
    series = [displacement_series(t) for t in window.tracks]
    return EnsembleMatrix(
        times=series[0].times,
        ids=tuple(t.id for t in window.tracks),
        x=np.column_stack([s.channel(channel) for s in series]),
    )


def standardize(x: np.ndarray, ids: tuple[str, ...] | None = None):
    """Center and scale columns: z[:,j] = (x[:,j] - mu[j]) / sigma[j].

    sigma uses the n-1 denominator. Raises DegenerateColumn for a column
    whose sample standard deviation is at (or below) floating-point zero.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ShapeMismatch(f"need an (n >= 2, p) matrix, got shape {x.shape}")
    mu = x.mean(axis=0)
    sigma = x.std(axis=0, ddof=1)
    for j in np.flatnonzero(sigma <= SIGMA_FLOOR):
        raise DegenerateColumn(ids[j] if ids is not None else str(j))
    return (x - mu) / sigma, mu, sigma


def correlation_matrix(z: np.ndarray) -> np.ndarray:
    """Z^T Z / (n-1) for standardized Z: symmetric with unit diagonal."""
    z = np.asarray(z, dtype=float)
    c = z.T @ z / (z.shape[0] - 1)
    return (c + c.T) / 2.0  # kill BLAS round-off asymmetry


def eigendecompose_sym(
    c: np.ndarray, sweep_budget: int = JACOBI_SWEEP_BUDGET
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix via cyclic Jacobi rotations.

    Sweeps zero every off-diagonal element in turn until the off-diagonal
    Frobenius mass drops below 1e-12 * ||C||_F; raises NoConvergence if the
    sweep budget is exhausted. Eigenvalues come back descending (stable order
    on ties) with each eigenvector's first non-negligible component made
    positive so outputs are byte-stable.
    """
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ShapeMismatch(f"need a square matrix, got shape {c.shape}")
    if np.max(np.abs(c - c.T), initial=0.0) > 1e-10:
        raise ValueError("matrix is not symmetric within 1e-10")
    n = c.shape[0]
    a = c.copy()
    v = np.eye(n)
    fro = np.linalg.norm(c)
    threshold = JACOBI_OFF_TOL * fro
    converged = False
    for _ in range(sweep_budget):
        off = math.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off <= threshold:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                cr = 1.0 / math.sqrt(t * t + 1.0)
                s = t * cr
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = cr * col_p - s * col_q
                a[:, q] = s * col_p + cr * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = cr * row_p - s * row_q
                a[q, :] = s * row_p + cr * row_q
                a[p, q] = a[q, p] = 0.0
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = cr * vec_p - s * vec_q
                v[:, q] = s * vec_p + cr * vec_q
    if not converged:
        raise NoConvergence(f"Jacobi did not converge within {sweep_budget} sweeps")
    vals = np.diag(a).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = v[:, order]
    for j in range(n):
        nz = np.flatnonzero(np.abs(vecs[:, j]) > 1e-12)
        if nz.size and vecs[nz[0], j] < 0.0:
            vecs[:, j] = -vecs[:, j]
    return vals, vecs


def fit(ensemble: EnsembleMatrix) -> PcaModel:
    """Standardize, correlate and diagonalize one ensemble."""
    z, mu, sigma = standardize(ensemble.x, ensemble.ids)
    vals, vecs = eigendecompose_sym(correlation_matrix(z))
    if np.any(vals < EIGVAL_CLAMP):
        raise NumericalError(
            f"correlation matrix has eigenvalue {vals.min()} below {EIGVAL_CLAMP}"
        )
    clamped = np.where(vals > 0.0, vals, 0.0)
    return PcaModel(
        ids=ensemble.ids,
        mu=mu,
        sigma=sigma,
        eigvals=vals,
        eigvecs=vecs,
        explained=np.cumsum(clamped) / np.sum(clamped),
    )


def project(z: np.ndarray, eigvecs: np.ndarray, k: int) -> np.ndarray:
    """Scores of standardized data on the k leading components: Z @ P[:, :k]."""
    z = np.asarray(z, dtype=float)
    eigvecs = np.asarray(eigvecs, dtype=float)
    p = eigvecs.shape[1]
    if not 1 <= k <= p:
        raise BadRank(f"k must be in 1..{p}, got {k}")
    if z.shape[1] != eigvecs.shape[0]:
        raise ShapeMismatch(f"z has {z.shape[1]} columns, eigvecs {eigvecs.shape[0]} rows")
    return z @ eigvecs[:, :k]


def reconstruct(
    scores: np.ndarray,
    eigvecs: np.ndarray,
    k: int,
    mu: np.ndarray,
    sigma: np.ndarray,
) -> np.ndarray:
    """Map scores back to physical units: (scores @ P[:, :k]^T) * sigma + mu."""
    scores = np.asarray(scores, dtype=float)
    eigvecs = np.asarray(eigvecs, dtype=float)
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    p = eigvecs.shape[1]
    if not 1 <= k <= p:
        raise BadRank(f"k must be in 1..{p}, got {k}")
    if scores.ndim != 2 or scores.shape[1] != k:
        raise ShapeMismatch(f"scores must be (n, {k}), got {scores.shape}")
    if eigvecs.shape[0] != p or len(mu) != p or len(sigma) != p:
        raise ShapeMismatch("eigvecs/mu/sigma dimensions disagree")
    return scores @ eigvecs[:, :k].T * sigma + mu


def explained_variance(eigvals: np.ndarray, k: int) -> float:
    """Fraction of total variance carried by the k leading eigenvalues."""
    vals = np.asarray(eigvals, dtype=float)
    vals = np.where(vals > 0.0, vals, 0.0)  # clamp -1e-10-scale noise
    k = min(max(k, 0), len(vals))
    return float(np.sum(vals[:k]) / np.sum(vals))


def rms_error(x: np.ndarray, x_prime: np.ndarray) -> np.ndarray:
    """Per-column root-mean-square difference in km."""
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    if x.shape != x_prime.shape:
        raise ShapeMismatch(f"shapes differ: {x.shape} vs {x_prime.shape}")
    return np.sqrt(np.mean((x - x_prime) ** 2, axis=0))


def pearson_r(a: np.ndarray, b: np.ndarray) -> float:
    """Sample Pearson correlation of two equal-length, non-constant series."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise ShapeMismatch("need two equal-length 1-d series with n >= 2")
    da = a - a.mean()
    db = b - b.mean()
    ssa = float(np.sum(da * da))
    ssb = float(np.sum(db * db))
    floor = (SIGMA_FLOOR**2) * (len(a) - 1)
    if ssa <= floor:
        raise DegenerateColumn("a")
    if ssb <= floor:
        raise DegenerateColumn("b")
    r = float(np.sum(da * db)) / math.sqrt(ssa * ssb)
    return min(1.0, max(-1.0, r))
