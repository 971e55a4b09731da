"""Exact simulation of extremal tree models.

Provides the multiplicative edge increments W, the rooted spectral vectors
Y^(m), exact max-stable vectors with standard Fréchet margins (via the
extremal-functions algorithm), two noise mechanisms, and samples in the
max-domain of attraction (max-stable plus noise).

All routines draw from a :class:`~tailtree.rng.RandomStream` (or a raw
numpy Generator) and are bit-reproducible for a fixed stream.  The
max-stable sampler shards rows into fixed-size blocks, each on its own
derived substream, so results do not depend on scheduling and the cost is
dominated by vectorized numpy kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InputError, SimulationBudgetExceeded
from .models import Dirichlet, EdgeDistribution, ExtremalTreeModel, HuslerReiss, Logistic
from .rng import RandomStream, as_generator

__all__ = [
    "IndependentNoise",
    "TreeNoise",
    "NoiseSpec",
    "sample_edge_w",
    "sample_w_vector",
    "sample_y_rooted",
    "sample_max_stable",
    "sample_noise",
    "sample_domain_of_attraction",
]

_BLOCK = 4096


def _open_uniform(gen: np.random.Generator, size: int) -> np.ndarray:
    """Uniform draws strictly inside (0, 1), so logs and reciprocals stay finite."""
    u = gen.random(size)
    while True:
        zero = u == 0.0
        if not zero.any():
            return u
        u[zero] = gen.random(int(zero.sum()))


def _edge_w_draws(
    dist: EdgeDistribution, reverse: bool, gen: np.random.Generator, size: int
) -> np.ndarray:
    """Vectorized draws of the increment W for one edge traversal.

    The traversal runs from the edge's smaller to its larger endpoint
    unless ``reverse``.  For two-draw families the to-side variable is
    drawn first, then the from-side (fixed order, for reproducibility).

    Husler-Reiss: W = exp(N), N ~ Normal(-gamma/2, gamma).
    Logistic(theta): W = U_to / U_from with
        U_to   = (-log u)^(-theta) / Gamma(1-theta),  u ~ U(0, 1),
        U_from = G0^(-theta) / Gamma(1-theta),        G0 ~ Gamma(1-theta, 1).
    Dirichlet: W = U_to / U_from with
        U_to   ~ Gamma(alpha_to,      scale 1/alpha_to),
        U_from ~ Gamma(alpha_from + 1, scale 1/alpha_from).

    All draws are almost surely positive; extreme logistic dependence
    (theta -> 1, Gamma shape -> 0) can underflow to 0.0 in double
    precision — far outside the parameter ranges exercised here.
    """
    if isinstance(dist, HuslerReiss):
        g = dist.gamma
        return np.exp(gen.normal(-0.5 * g, math.sqrt(g), size))
    if isinstance(dist, Logistic):
        t = dist.theta
        c = 1.0 / math.gamma(1.0 - t)
        u_to = np.power(-np.log(_open_uniform(gen, size)), -t) * c
        g0 = gen.gamma(1.0 - t, 1.0, size)
        u_from = np.power(g0, -t) * c
        return u_to / u_from
    if isinstance(dist, Dirichlet):
        a_from, a_to = (dist.alpha_v, dist.alpha_u) if reverse else (dist.alpha_u, dist.alpha_v)
        u_to = gen.gamma(a_to, 1.0 / a_to, size)
        u_from = gen.gamma(a_from + 1.0, 1.0 / a_from, size)
        return u_to / u_from
    raise InputError(f"unknown edge distribution {dist!r}")


def sample_edge_w(
    dist: EdgeDistribution,
    rng: RandomStream | np.random.Generator,
    size: int | None = None,
    reverse: bool = False,
):
    """Draw W for a single edge traversal; scalar if ``size`` is None."""
    gen = as_generator(rng)
    out = _edge_w_draws(dist, reverse, gen, 1 if size is None else int(size))
    return float(out[0]) if size is None else out


def _root_plan(model: ExtremalTreeModel, m: int) -> list[tuple[int, int, EdgeDistribution, bool]]:
    """Edges as (from, to, dist, reverse) in BFS order away from m."""
    tree = model.tree
    parent = tree.rooted_parents(m)
    plan = []
    for node in tree.rooted_order(m):
        p = parent[node]
        if p >= 0:
            plan.append((p, node, model.edge_models[(min(p, node), max(p, node))], p > node))
    return plan


def _w_matrix(
    model: ExtremalTreeModel,
    plan: list[tuple[int, int, EdgeDistribution, bool]],
    m: int,
    gen: np.random.Generator,
    size: int,
    collect: dict | None = None,
) -> np.ndarray:
    """(size, d) extremal-function increments rooted at m: W[:, m] = 1 and
    W[:, child] = W[:, parent] * w_edge along the tree away from m."""
    w = np.ones((size, model.tree.d))
    for a, b, dist, rev in plan:
        draws = _edge_w_draws(dist, rev, gen, size)
        if collect is not None:
            collect[(a, b)] = draws
        w[:, b] = w[:, a] * draws
    return w


def sample_w_vector(
    model: ExtremalTreeModel,
    m: int,
    rng: RandomStream | np.random.Generator,
    size: int | None = None,
    return_edge_draws: bool = False,
):
    """Extremal-function increment vectors W^(m): W_m = 1 exactly, and each
    coordinate is the product of independent edge increments along the
    tree path from m.  Returns (d,) for ``size=None`` else (size, d);
    with ``return_edge_draws`` also a dict of per-edge draw arrays keyed
    by directed edge (away from m).
    """
    gen = as_generator(rng)
    n = 1 if size is None else int(size)
    collect: dict | None = {} if return_edge_draws else None
    w = _w_matrix(model, _root_plan(model, m), m, gen, n, collect)
    if size is None:
        w = w[0]
        if collect is not None:
            collect = {e: a[0] for e, a in collect.items()}
    return (w, collect) if return_edge_draws else w


def sample_y_rooted(
    model: ExtremalTreeModel,
    m: int,
    n: int,
    rng: RandomStream | np.random.Generator,
) -> np.ndarray:
    """Samples of the extremal function rooted at m: Y = P * W^(m) with an
    independent standard Pareto factor P, so Y_m is standard Pareto and
    every coordinate is >= 0.
    """
    gen = as_generator(rng)
    n = int(n)
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    pareto = 1.0 / _open_uniform(gen, n)
    w = _w_matrix(model, _root_plan(model, m), m, gen, n)
    return pareto[:, None] * w


def sample_max_stable(
    model: ExtremalTreeModel,
    n: int,
    rng: RandomStream | np.random.Generator,
    max_proposals_per_sample: int | None = None,
) -> np.ndarray:
    """Exact samples of the max-stable vector with standard Fréchet margins
    associated with the tree model.

    Implements the extremal-functions construction: for each coordinate m
    in turn, Poisson points 1/zeta (zeta a running Exp(1) sum) propose
    extremal functions W^(m)/zeta, accepted only if they do not exceed the
    running maximum on coordinates already finalized.  The expected number
    of proposals per sample is finite; a cap (default 10^4 * d) guards
    against runaway loops and raises a diagnostic if hit.

    Rows are processed in fixed 4096-row blocks; with a RandomStream each
    block uses the derived substream ``rng.child(block_index)``, so output
    is bit-reproducible and independent of scheduling.  A raw Generator is
    consumed sequentially across blocks instead.
    """
    n = int(n)
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    d = model.tree.d
    cap = 10_000 * d if max_proposals_per_sample is None else int(max_proposals_per_sample)
    plans = [_root_plan(model, m) for m in range(d)]
    out = np.empty((n, d))
    n_blocks = (n + _BLOCK - 1) // _BLOCK
    seq_gen = None if isinstance(rng, RandomStream) else as_generator(rng)
    for b in range(n_blocks):
        lo, hi = b * _BLOCK, min((b + 1) * _BLOCK, n)
        gen = rng.child(b).generator() if seq_gen is None else seq_gen
        out[lo:hi] = _max_stable_block(model, plans, gen, hi - lo, cap, lo)
    return out


def _max_stable_block(
    model: ExtremalTreeModel,
    plans: list,
    gen: np.random.Generator,
    rows: int,
    cap: int,
    row_offset: int,
) -> np.ndarray:
    d = model.tree.d
    z = np.zeros((rows, d))
    proposals = np.zeros(rows, dtype=np.int64)
    for m in range(d):
        zeta = gen.standard_exponential(rows)
        active = np.flatnonzero(1.0 / zeta > z[:, m])
        while active.size:
            w = _w_matrix(model, plans[m], m, gen, active.size)
            proposals[active] += 1
            if (proposals[active] > cap).any():
                worst = int(active[np.argmax(proposals[active])])
                raise SimulationBudgetExceeded(
                    f"row {row_offset + worst} exceeded {cap} proposals at coordinate {m}; "
                    "the model may be numerically degenerate"
                )
            cand = w / zeta[active, None]
            if m == 0:
                acc = np.ones(active.size, dtype=bool)
            else:
                acc = (cand[:, :m] < z[active, :m]).all(axis=1)
            upd = active[acc]
            z[upd] = np.maximum(z[upd], cand[acc])
            zeta[active] += gen.standard_exponential(active.size)
            active = active[1.0 / zeta[active] > z[active, m]]
    return z


# -- noise and domain-of-attraction samples -----------------------------------

@dataclass(frozen=True)
class IndependentNoise:
    """iid noise with CDF exp(-1/x^2) per entry (square root of a standard
    Fréchet variable); heavy-tailed but of strictly lighter extremal order
    than the signal."""


@dataclass(frozen=True, eq=False)
class TreeNoise:
    """Dependent noise: the square root of a max-stable vector drawn from
    an independent tree model (same lighter-tail property as
    :class:`IndependentNoise`, but cross-sectionally dependent)."""

    model: ExtremalTreeModel


NoiseSpec = IndependentNoise | TreeNoise


def sample_noise(
    spec: NoiseSpec,
    n: int,
    d: int,
    rng: RandomStream | np.random.Generator,
) -> np.ndarray:
    """(n, d) noise draws; every entry is strictly positive."""
    n = int(n)
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if isinstance(spec, IndependentNoise):
        gen = as_generator(rng)
        frechet = -1.0 / np.log(_open_uniform(gen, n * d).reshape(n, d))
        return np.sqrt(frechet)
    if isinstance(spec, TreeNoise):
        if spec.model.tree.d != d:
            raise DimensionMismatch(
                f"noise model has d={spec.model.tree.d}, data has d={d}"
            )
        return np.sqrt(sample_max_stable(spec.model, n, rng))
    raise InputError(f"unknown noise spec {spec!r}")


def sample_domain_of_attraction(
    model: ExtremalTreeModel,
    noise: NoiseSpec,
    n: int,
    rng: RandomStream | np.random.Generator,
    return_parts: bool = False,
):
    """Samples X = Z + eps: a max-stable vector plus independent noise.

    X has the same extremal tree structure as Z but is not max-stable
    itself — the estimation target for everything downstream.  With a
    RandomStream, Z uses ``rng.child(0)`` and eps uses ``rng.child(1)``.
    """
    d = model.tree.d
    if isinstance(rng, RandomStream):
        z = sample_max_stable(model, n, rng.child(0))
        eps = sample_noise(noise, n, d, rng.child(1))
    else:
        gen = as_generator(rng)
        z = sample_max_stable(model, n, gen)
        eps = sample_noise(noise, n, d, gen)
    x = z + eps
    return (x, z, eps) if return_parts else x
