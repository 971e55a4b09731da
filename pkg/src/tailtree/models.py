"""Extremal tree models: a labeled tree plus one bivariate family per edge.

Three families are supported, each parameterizing the multiplicative
increment W attached to an edge (E[W] = 1 in all cases):

* Husler-Reiss with variogram parameter gamma > 0,
* logistic with dependence parameter theta in (0, 1),
* Dirichlet with shape parameters (alpha_u, alpha_v), both > 0, where
  alpha_u belongs to the smaller-labeled endpoint of the edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import EdgeModelMismatch, InvalidParameter, NegativeGamma, ParseError
from .trees import LabeledTree, tree_from_dict, tree_to_dict

__all__ = [
    "HuslerReiss",
    "Logistic",
    "Dirichlet",
    "EdgeDistribution",
    "ExtremalTreeModel",
    "model_to_dict",
    "model_from_dict",
]


@dataclass(frozen=True)
class HuslerReiss:
    """Husler-Reiss edge: W = exp(N), N ~ Normal(-gamma/2, gamma)."""

    gamma: float

    def __post_init__(self):
        g = float(self.gamma)
        if np.isnan(g) or g < 0:
            raise NegativeGamma(f"gamma must be > 0, got {self.gamma!r}")
        if g == 0 or np.isinf(g):
            raise InvalidParameter(f"gamma must be positive and finite, got {self.gamma!r}")
        object.__setattr__(self, "gamma", g)


@dataclass(frozen=True)
class Logistic:
    """Logistic edge with dependence parameter theta in (0, 1)."""

    theta: float

    def __post_init__(self):
        t = float(self.theta)
        if not (0.0 < t < 1.0):
            raise InvalidParameter(f"theta must lie in (0, 1), got {self.theta!r}")
        object.__setattr__(self, "theta", t)


@dataclass(frozen=True)
class Dirichlet:
    """Dirichlet edge; alpha_u sits at the smaller-labeled endpoint."""

    alpha_u: float
    alpha_v: float

    def __post_init__(self):
        au, av = float(self.alpha_u), float(self.alpha_v)
        if not (au > 0 and np.isfinite(au)) or not (av > 0 and np.isfinite(av)):
            raise InvalidParameter(
                f"alpha parameters must be positive finite, got ({self.alpha_u!r}, {self.alpha_v!r})"
            )
        object.__setattr__(self, "alpha_u", au)
        object.__setattr__(self, "alpha_v", av)


EdgeDistribution = Union[HuslerReiss, Logistic, Dirichlet]


class ExtremalTreeModel:
    """A labeled tree with one edge distribution per edge.

    ``edge_models`` must carry exactly one entry per tree edge, keyed by the
    normalized (min, max) node pair.
    """

    __slots__ = ("tree", "edge_models")

    tree: LabeledTree
    edge_models: Mapping[tuple[int, int], EdgeDistribution]

    def __init__(
        self,
        tree: LabeledTree,
        edge_models: Mapping[tuple[int, int] | Sequence[int], EdgeDistribution],
    ):
        normalized: dict[tuple[int, int], EdgeDistribution] = {}
        for key, dist in edge_models.items():
            u, v = int(key[0]), int(key[1])
            e = (min(u, v), max(u, v))
            if e in normalized:
                raise EdgeModelMismatch(f"edge {e} specified twice")
            if not isinstance(dist, (HuslerReiss, Logistic, Dirichlet)):
                raise InvalidParameter(f"unknown edge distribution {dist!r} for edge {e}")
            normalized[e] = dist
        tree_edges = set(tree.edges)
        missing = tree_edges - set(normalized)
        extra = set(normalized) - tree_edges
        if missing or extra:
            raise EdgeModelMismatch(
                f"edge_models must match tree edges exactly; missing {sorted(missing)}, extra {sorted(extra)}"
            )
        object.__setattr__(self, "tree", tree)
        object.__setattr__(self, "edge_models", dict(normalized))

    def __setattr__(self, *args):  # immutable by convention
        raise AttributeError("ExtremalTreeModel is immutable")

    @property
    def d(self) -> int:
        return self.tree.d

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtremalTreeModel):
            return NotImplemented
        return self.tree == other.tree and self.edge_models == other.edge_models

    def __hash__(self) -> int:
        return hash((self.tree, tuple(sorted(self.edge_models.items()))))

    def __repr__(self) -> str:
        fams = {e: type(m).__name__ for e, m in sorted(self.edge_models.items())}
        return f"ExtremalTreeModel(d={self.d}, edges={fams})"


# -- JSON --------------------------------------------------------------------

def _dist_to_dict(dist: EdgeDistribution) -> dict:
    if isinstance(dist, HuslerReiss):
        return {"family": "husler_reiss", "gamma": dist.gamma}
    if isinstance(dist, Logistic):
        return {"family": "logistic", "theta": dist.theta}
    if isinstance(dist, Dirichlet):
        return {"family": "dirichlet", "alpha_u": dist.alpha_u, "alpha_v": dist.alpha_v}
    raise InvalidParameter(f"unknown edge distribution {dist!r}")


def _dist_from_dict(obj: dict) -> EdgeDistribution:
    if not isinstance(obj, dict) or "family" not in obj:
        raise ParseError(f"edge model must be an object with a 'family' key, got {obj!r}")
    fam = obj["family"]
    try:
        if fam == "husler_reiss":
            return HuslerReiss(obj["gamma"])
        if fam == "logistic":
            return Logistic(obj["theta"])
        if fam == "dirichlet":
            return Dirichlet(obj["alpha_u"], obj["alpha_v"])
    except KeyError as exc:
        raise ParseError(f"edge model for family {fam!r} missing parameter {exc}") from exc
    raise ParseError(f"unknown edge family {fam!r}")


def model_to_dict(model: ExtremalTreeModel, names: Sequence[str] | None = None) -> dict:
    """JSON-ready dict: tree fields plus {"edge_models": {"u-v": {...}}}."""
    out = tree_to_dict(model.tree, names)
    out["edge_models"] = {
        f"{u}-{v}": _dist_to_dict(model.edge_models[(u, v)]) for u, v in model.tree.edges
    }
    return out


def model_from_dict(obj: dict) -> tuple[ExtremalTreeModel, list[str] | None]:
    """Inverse of :func:`model_to_dict`; returns (model, names)."""
    tree, names = tree_from_dict(obj)
    raw = obj.get("edge_models")
    if not isinstance(raw, dict):
        raise ParseError("model JSON needs an 'edge_models' object")
    edge_models: dict[tuple[int, int], EdgeDistribution] = {}
    for key, val in raw.items():
        try:
            u_s, v_s = str(key).split("-")
            e = (int(u_s), int(v_s))
        except ValueError as exc:
            raise ParseError(f"edge key {key!r} is not of the form 'u-v'") from exc
        edge_models[e] = _dist_from_dict(val)
    return ExtremalTreeModel(tree, edge_models), names
