"""Structure learning: minimum spanning trees over tail-dependence weights.

``mst`` is a Prim implementation with a pinned lexicographic tie rule, and
``mst_bruteforce`` is an exhaustive oracle (all labeled trees via Prüfer
enumeration, d <= 8) sharing the same rule, so the two agree exactly even
on tied inputs.  On top of these sit the two structure learners (negative
log extremal correlation, and extremal variogram) and a Husler-Reiss fit
of the learned tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionTooLarge, NoFiniteTree
from .estimators import (
    RankMatrix,
    VariogramEstimate,
    chi_matrix,
    gamma_hat_combined,
    gamma_hat_rooted,
)
from .trees import LabeledTree, WeightMatrix, enumerate_labeled_trees
from .variogram import VariogramMatrix, hr_chi_from_gamma, path_sum_matrix

__all__ = [
    "mst",
    "mst_bruteforce",
    "learn_tree_chi",
    "learn_tree_gamma",
    "fit_hr_tree",
    "FittedHrTree",
]


def _as_weight_array(weights) -> np.ndarray:
    if isinstance(weights, WeightMatrix):
        return weights.w
    return WeightMatrix(np.asarray(weights, dtype=float)).w


def mst(weights) -> LabeledTree:
    """Minimum spanning tree of a symmetric nonnegative weight matrix.

    Ties are broken deterministically: candidate edges are compared by
    (weight, (min(u, v), max(u, v))) lexicographically, which makes the
    result the unique minimum under that total order.  Edges of weight
    +inf are unusable; if they disconnect the graph, NoFiniteTree is
    raised.
    """
    w = _as_weight_array(weights)
    d = w.shape[0]
    if d == 1:
        return LabeledTree(1, [])
    inf = np.inf
    in_tree = [False] * d
    in_tree[0] = True
    best_w = [w[0, v] for v in range(d)]
    best_pair = [(0, v) for v in range(d)]
    edges: list[tuple[int, int]] = []
    for _ in range(d - 1):
        pick = -1
        for v in range(d):
            if in_tree[v]:
                continue
            if pick < 0 or (best_w[v], best_pair[v]) < (best_w[pick], best_pair[pick]):
                pick = v
        if best_w[pick] == inf:
            raise NoFiniteTree("infinite-weight edges disconnect the graph")
        edges.append(best_pair[pick])
        in_tree[pick] = True
        for v in range(d):
            if in_tree[v]:
                continue
            cand = (min(pick, v), max(pick, v))
            if (w[pick, v], cand) < (best_w[v], best_pair[v]):
                best_w[v] = w[pick, v]
                best_pair[v] = cand
    return LabeledTree(d, edges)


@lru_cache(maxsize=8)
def _all_trees(d: int):
    trees = enumerate_labeled_trees(d)
    arr = np.array([t.edges for t in trees], dtype=np.int16)  # (T, d-1, 2)
    return trees, arr


def mst_bruteforce(weights) -> LabeledTree:
    """Exhaustive minimum spanning tree over all labeled trees (d <= 8).

    Totals are accumulated with ``math.fsum`` so trees whose edge weights
    tie exactly are not separated by float summation order.  Ties are
    broken by the lexicographically smallest sorted list of
    (weight, (u, v)) tuples: the winner is the unique minimum spanning
    tree under that edge order, i.e. the tree :func:`mst` returns.
    """
    w = _as_weight_array(weights)
    d = w.shape[0]
    if d > 8:
        raise DimensionTooLarge(f"brute force enumerates d^(d-2) trees; d={d} > 8")
    if d == 1:
        return LabeledTree(1, [])
    trees, arr = _all_trees(d)
    per_edge = w[arr[:, :, 0], arr[:, :, 1]]
    totals = np.array([math.fsum(row) for row in per_edge])
    best = totals.min()
    if best == np.inf:
        raise NoFiniteTree("every spanning tree has infinite total weight")
    candidates = np.flatnonzero(totals == best)
    winner = min(
        candidates,
        key=lambda t: sorted((w[a, b], (a, b)) for a, b in trees[t].edges),
    )
    return trees[int(winner)]


def learn_tree_chi(ranks: RankMatrix, k: int) -> LabeledTree:
    """Tree learned from pairwise extremal correlations: the minimum
    spanning tree of -log(chi_hat).  Pairs with chi_hat = 0 get weight
    +inf; if those disconnect the graph, NoFiniteTree propagates."""
    chi = chi_matrix(ranks, k)
    with np.errstate(divide="ignore"):
        w = -np.log(chi)
    np.fill_diagonal(w, 0.0)
    return mst(w)


def learn_tree_gamma(
    ranks: RankMatrix,
    k: int,
    root: int | None = None,
    weights: Sequence[float] | None = None,
) -> LabeledTree:
    """Tree learned from the empirical extremal variogram: the minimum
    spanning tree of gamma_hat rooted at ``root``, or of the weighted
    combination across all roots when ``root`` is None (uniform by
    default)."""
    if root is not None:
        est = gamma_hat_rooted(ranks, root, k)
    else:
        est = gamma_hat_combined(ranks, k, weights)
    return mst(est.g)


@dataclass(frozen=True, eq=False)
class FittedHrTree:
    """A learned tree with Husler-Reiss dependence fitted to its edges.

    ``edge_gamma`` carries the estimated variogram per tree edge,
    ``full_gamma`` its path-sum extension to all pairs (a root-free
    variogram matrix), and ``implied_chi`` the extremal correlations the
    fit implies — comparable directly to empirical chi_hat values.
    """

    tree: LabeledTree
    edge_gamma: dict[tuple[int, int], float]
    full_gamma: VariogramMatrix
    implied_chi: np.ndarray = field(repr=False)
    k: int
    n: int


def fit_hr_tree(
    ranks: RankMatrix,
    k: int,
    weights: Sequence[float] | None = None,
) -> FittedHrTree:
    """Learn a tree from the combined variogram and fit Husler-Reiss
    parameters: each tree edge keeps its estimated variogram entry, pairs
    get path sums, and implied extremal correlations follow from the
    Husler-Reiss chi formula (unit diagonal by construction)."""
    est = gamma_hat_combined(ranks, k, weights)
    tree = mst(est.g)
    edge_gamma = {(u, v): float(est.g[u, v]) for u, v in tree.edges}
    full = path_sum_matrix(tree, edge_gamma)
    full_gamma = VariogramMatrix(ranks.d, None, full)
    implied = hr_chi_from_gamma(full_gamma.g)
    return FittedHrTree(
        tree=tree,
        edge_gamma=edge_gamma,
        full_gamma=full_gamma,
        implied_chi=implied,
        k=k,
        n=ranks.n,
    )
