"""Monte Carlo oracles: slow, direct estimates of population quantities.

These exist to cross-check the closed forms and the estimators from an
independent direction — extremal correlations via the path-product
identity, and the pre-asymptotic variogram at tail fraction q via brute
conditioning on exact samples with known margins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, InvalidNode
from .models import ExtremalTreeModel
from .rng import RandomStream, as_generator
from .sampling import _edge_w_draws, sample_max_stable
from .trees import path_edges

__all__ = ["McEstimate", "mc_chi", "MaxStableGenerator", "mc_variogram_pre"]

_MC_BLOCK = 1_000_000


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo estimate with its standard error."""

    value: float
    se: float
    samples: int
    conditioned: int | None = None


def mc_chi(
    model: ExtremalTreeModel,
    h: int,
    l: int,
    samples: int,
    rng: RandomStream | np.random.Generator,
) -> McEstimate:
    """Extremal correlation of coordinates h and l by direct simulation:
    chi = E[min(prod of path increments, 1)], the product taken over the
    tree path from h to l with each edge traversed away from h.
    """
    d = model.tree.d
    if not (0 <= h < d) or not (0 <= l < d):
        raise InvalidNode(f"nodes ({h}, {l}) outside [0, {d})")
    samples = int(samples)
    if samples < 2:
        raise InputError(f"samples must be >= 2, got {samples}")
    if h == l:
        return McEstimate(1.0, 0.0, samples)
    gen = as_generator(rng)
    prod = np.ones(samples)
    for a, b in path_edges(model.tree, h, l):
        dist = model.edge_models[(min(a, b), max(a, b))]
        prod *= _edge_w_draws(dist, a > b, gen, samples)
    vals = np.minimum(prod, 1.0)
    value = float(vals.mean())
    se = float(vals.std(ddof=1) / np.sqrt(samples))
    return McEstimate(value, se, samples)


@dataclass(frozen=True, eq=False)
class MaxStableGenerator:
    """Data generator with exactly known margins: max-stable samples from
    a tree model, every margin standard Fréchet.

    Any object with the same ``sample(n, rng)`` / ``margin_cdf(x)``
    surface can be plugged into :func:`mc_variogram_pre` (margins of
    noisy mixtures have no closed form, so none is shipped here).
    """

    model: ExtremalTreeModel

    @property
    def d(self) -> int:
        return self.model.tree.d

    def sample(self, n: int, rng: RandomStream | np.random.Generator) -> np.ndarray:
        return sample_max_stable(self.model, n, rng)

    def margin_cdf(self, x: np.ndarray) -> np.ndarray:
        """Standard Fréchet CDF exp(-1/x), columnwise."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = np.exp(-1.0 / x[pos])
        return out


def mc_variogram_pre(
    generator,
    m: int,
    i: int,
    j: int,
    q: float,
    samples: int,
    rng: RandomStream | np.random.Generator,
) -> McEstimate:
    """Pre-asymptotic extremal variogram at tail fraction q by brute
    conditioning: the variance of log(1-U_i) - log(1-U_j) over rows where
    U_m > 1-q, with U the generator's exact margin transforms.

    Returns the estimate, a standard error from the fourth central
    moment, and the number of conditioned rows used.
    """
    d = generator.d
    for node in (m, i, j):
        if not (0 <= node < d):
            raise InvalidNode(f"node {node} outside [0, {d})")
    q = float(q)
    if not (0.0 < q <= 1.0):
        raise InputError(f"tail fraction q must lie in (0, 1], got {q}")
    samples = int(samples)
    if samples < 2:
        raise InputError(f"samples must be >= 2, got {samples}")
    collected: list[np.ndarray] = []
    n_blocks = (samples + _MC_BLOCK - 1) // _MC_BLOCK
    seq_gen = None if isinstance(rng, RandomStream) else as_generator(rng)
    total = 0
    for b in range(n_blocks):
        rows = min(_MC_BLOCK, samples - b * _MC_BLOCK)
        block_rng = rng.child(b) if seq_gen is None else seq_gen
        x = generator.sample(rows, block_rng)
        u = generator.margin_cdf(x[:, [m, i, j]])
        keep = u[:, 0] > 1.0 - q
        if keep.any():
            uk = u[keep]
            collected.append(np.log1p(-uk[:, 1]) - np.log1p(-uk[:, 2]))
        total += rows
    diffs = np.concatenate(collected) if collected else np.empty(0)
    n_cond = diffs.size
    if i == j:
        return McEstimate(0.0, 0.0, total, n_cond)
    if n_cond < 2:
        raise InputError(
            f"only {n_cond} of {total} samples fell in the conditioning set; increase samples"
        )
    value = float(diffs.var(ddof=1))
    centered = diffs - diffs.mean()
    m4 = float(np.mean(centered**4))
    se = float(np.sqrt(max(m4 - value**2, 0.0) / n_cond))
    return McEstimate(value, se, total, n_cond)
