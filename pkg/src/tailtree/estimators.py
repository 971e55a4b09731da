"""Rank-based tail estimators.

Everything here consumes only the ordinal ranks of the data columns, so
the estimators are invariant under strictly increasing marginal
transformations.  The effective sample size k counts how many of the
largest observations per column enter the tail statistics.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    AllZeroWeights,
    DimensionMismatch,
    InputError,
    InvalidNode,
    InvalidParameter,
    KOutOfRange,
)

__all__ = [
    "RankMatrix",
    "rank_transform",
    "default_k",
    "k_from_tail_fraction",
    "chi_hat",
    "chi_matrix",
    "chi_curve",
    "gamma_hat_rooted",
    "gamma_hat_combined",
    "VariogramEstimate",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RankMatrix:
    """Per-column ordinal ranks of a data matrix.

    ``ranks`` holds integers 1..n per column (ties broken by row index);
    ``u = ranks / (n + 1)`` are the pseudo-uniform scores.
    """

    n: int
    d: int
    u: np.ndarray = field(repr=False)
    ranks: np.ndarray = field(repr=False)


def rank_transform(data) -> RankMatrix:
    """Ordinal column ranks of an (n, d) data matrix.

    Accepts an ndarray or anything with a ``.values`` array.  Ties are
    broken by row index (stable sort), so the map is deterministic and
    rank vectors are permutations of 1..n in every column.
    """
    arr = np.asarray(getattr(data, "values", data), dtype=float)
    if arr.ndim != 2:
        raise InputError(f"data must be 2-dimensional, got shape {arr.shape}")
    n, d = arr.shape
    if n < 2:
        raise InputError(f"need at least 2 rows, got {n}")
    if d < 2:
        raise InputError(f"need at least 2 columns, got {d}")
    if not np.isfinite(arr).all():
        raise InputError("data must be finite")
    order = np.argsort(arr, axis=0, kind="stable")
    ranks = np.empty((n, d), dtype=np.int64)
    np.put_along_axis(ranks, order, np.arange(1, n + 1, dtype=np.int64)[:, None], axis=0)
    u = ranks / float(n + 1)
    u.setflags(write=False)
    ranks.setflags(write=False)
    return RankMatrix(n=n, d=d, u=u, ranks=ranks)


def default_k(n: int) -> int:
    """Default effective sample size: max(2, floor(n^0.8)), capped at n.

    floor(n^0.8) is computed in exact integer arithmetic (largest k with
    k^5 <= n^4), so values like n = 10^5 give exactly 10000 rather than
    falling victim to floating-point power rounding.
    """
    n = int(n)
    if n < 2:
        raise KOutOfRange(f"n must be >= 2, got {n}")
    target = n**4
    k = int(float(n) ** 0.8) + 2
    while k**5 > target:
        k -= 1
    while (k + 1) ** 5 <= target:
        k += 1
    return min(max(2, k), n)


def k_from_tail_fraction(q: float, n: int) -> int:
    """k = round(q * n) with round-half-up, clamped into [2, n]."""
    q = float(q)
    n = int(n)
    if not (0.0 < q <= 1.0):
        raise InvalidParameter(f"tail fraction q must lie in (0, 1], got {q}")
    if n < 2:
        raise KOutOfRange(f"n must be >= 2, got {n}")
    k = int(np.floor(q * n + 0.5))
    clamped = min(max(k, 2), n)
    if clamped != k:
        logger.warning("k = round(%g * %d) = %d clamped to %d", q, n, k, clamped)
    return clamped


def _check_k(k: int, n: int, lo: int) -> int:
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise KOutOfRange(f"k must be an integer, got {k!r}")
    if not (lo <= k <= n):
        raise KOutOfRange(f"k must lie in [{lo}, {n}], got {k}")
    return int(k)


def _check_node(d: int, m: int) -> int:
    if not (0 <= m < d):
        raise InvalidNode(f"node {m} outside [0, {d})")
    return int(m)


def chi_hat(ranks: RankMatrix, i: int, j: int, k: int) -> float:
    """Empirical extremal correlation of columns i and j at level k: the
    fraction of the k largest observations of column i that are also
    among the k largest of column j (symmetric in i and j)."""
    i = _check_node(ranks.d, i)
    j = _check_node(ranks.d, j)
    k = _check_k(k, ranks.n, 1)
    thresh = ranks.n - k
    both = (ranks.ranks[:, i] > thresh) & (ranks.ranks[:, j] > thresh)
    return float(np.count_nonzero(both) / k)


def chi_matrix(ranks: RankMatrix, k: int) -> np.ndarray:
    """All-pairs chi_hat as a d x d matrix with unit diagonal."""
    k = _check_k(k, ranks.n, 1)
    top = (ranks.ranks > ranks.n - k).astype(np.float64)
    counts = top.T @ top
    chi = counts / float(k)
    np.fill_diagonal(chi, 1.0)
    return chi


def chi_curve(
    ranks: RankMatrix, i: int, j: int, q_grid: Sequence[float]
) -> list[tuple[float, float]]:
    """chi_hat along a grid of tail fractions q, with k = round(q * n)
    clamped to [2, n]; returns (q, chi) pairs in grid order."""
    out = []
    for q in q_grid:
        k = k_from_tail_fraction(q, ranks.n)
        out.append((float(q), chi_hat(ranks, i, j, k)))
    return out


@dataclass(frozen=True, eq=False)
class VariogramEstimate:
    """An estimated extremal-variogram matrix.

    ``root`` is the conditioning node, or None for a weighted combination
    across all roots (serialized as the string ``"combined"``); ``k`` and
    ``n`` record the tail size it was computed from, and ``weights`` the
    combination weights actually used (None for rooted estimates).
    """

    d: int
    root: int | None
    g: np.ndarray = field(repr=False)
    k: int = 0
    n: int = 0
    weights: tuple[float, ...] | None = None

    def to_dict(self) -> dict:
        out = {
            "d": self.d,
            "root": "combined" if self.root is None else self.root,
            "g": [[float(x) for x in row] for row in self.g],
            "k": self.k,
            "n": self.n,
        }
        if self.weights is not None:
            out["weights"] = list(self.weights)
        return out


def gamma_hat_rooted(ranks: RankMatrix, m: int, k: int) -> VariogramEstimate:
    """Empirical extremal variogram conditioned on column m: the variance
    (denominator k) of log(1-u_i) - log(1-u_j) over the k rows where
    column m is largest, for every pair (i, j)."""
    m = _check_node(ranks.d, m)
    k = _check_k(k, ranks.n, 2)
    sel = ranks.ranks[:, m] > ranks.n - k  # exactly k rows
    logs = np.log1p(-ranks.u[sel])
    centered = logs - logs.mean(axis=0)
    cov = centered.T @ centered / float(k)
    v = np.diagonal(cov).copy()
    g = v[:, None] + v[None, :] - cov - cov.T
    np.fill_diagonal(g, 0.0)
    g = np.maximum(g, 0.0)
    return VariogramEstimate(d=ranks.d, root=m, g=g, k=k, n=ranks.n)


def gamma_hat_combined(
    ranks: RankMatrix,
    k: int,
    weights: Sequence[float] | None = None,
) -> VariogramEstimate:
    """Weighted combination of the rooted variogram estimates over all
    conditioning nodes (uniform 1/d by default).  Zero-weight roots are
    skipped entirely, so an indicator weight vector reproduces the rooted
    estimate bit-for-bit."""
    d = ranks.d
    if weights is None:
        w = np.full(d, 1.0 / d)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (d,):
            raise DimensionMismatch(f"weights must have length {d}, got shape {w.shape}")
        if not np.isfinite(w).all() or (w < 0).any():
            raise InvalidParameter("weights must be finite and nonnegative")
        if not w.any():
            raise AllZeroWeights("weights must not all be zero")
    k = _check_k(k, ranks.n, 2)
    g = np.zeros((d, d))
    for m in range(d):
        if w[m] != 0.0:
            g += w[m] * gamma_hat_rooted(ranks, m, k).g
    return VariogramEstimate(
        d=d, root=None, g=g, k=k, n=ranks.n, weights=tuple(float(x) for x in w)
    )
