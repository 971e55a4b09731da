"""Labeled trees on nodes 0..d-1: validation, paths, enumeration, random draws.

Edges are always stored normalized — each pair as (min, max), the list
sorted lexicographically — so equal trees compare equal structurally and
serialize to identical JSON.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    Disconnected,
    DuplicateEdge,
    InputError,
    InvalidNode,
    NotSymmetric,
    ParseError,
    SelfLoop,
    WrongEdgeCount,
)
from .rng import RandomStream, as_generator

__all__ = [
    "LabeledTree",
    "validate_tree",
    "path_edges",
    "random_tree",
    "tree_equal",
    "enumerate_labeled_trees",
    "prufer_decode",
    "WeightMatrix",
    "tree_to_dict",
    "tree_from_dict",
]

Edge = tuple[int, int]


@dataclass(frozen=True)
class LabeledTree:
    """An undirected labeled tree on nodes 0..d-1.

    Construction validates the tree axioms and raises a specific error for
    each violation: :class:`WrongEdgeCount`, :class:`SelfLoop`,
    :class:`DuplicateEdge`, :class:`InvalidNode`, :class:`Disconnected`.
    d = 1 (a single node, no edges) is permitted so degenerate
    one-dimensional models can be simulated.
    """

    d: int
    edges: tuple[Edge, ...]

    def __init__(self, d: int, edges: Iterable[Sequence[int]]):
        if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 1:
            raise InputError(f"d must be a positive integer, got {d!r}")
        norm: list[Edge] = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise SelfLoop(f"edge ({u}, {v}) joins a node to itself")
            if not (0 <= u < d and 0 <= v < d):
                raise InvalidNode(f"edge ({u}, {v}) uses a node outside [0, {d})")
            norm.append((min(u, v), max(u, v)))
        if len(norm) != d - 1:
            raise WrongEdgeCount(f"a tree on {d} nodes needs {d - 1} edges, got {len(norm)}")
        if len(set(norm)) != len(norm):
            seen: set[Edge] = set()
            for e in norm:
                if e in seen:
                    raise DuplicateEdge(f"edge {e} appears more than once")
                seen.add(e)
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "edges", tuple(sorted(norm)))
        # d-1 edges without duplicates connect all d nodes iff no cycle;
        # a BFS reaching everything certifies both at once.
        if d > 1 and len(self._bfs_order(0)) != d:
            raise Disconnected("edge set does not connect all nodes")

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbor tuple per node."""
        nbrs: list[list[int]] = [[] for _ in range(self.d)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(b)) for b in nbrs)

    def _bfs_order(self, root: int) -> list[int]:
        nbrs: list[list[int]] = [[] for _ in range(self.d)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        seen = [False] * self.d
        seen[root] = True
        order = [root]
        head = 0
        while head < len(order):
            for w in sorted(nbrs[order[head]]):
                if not seen[w]:
                    seen[w] = True
                    order.append(w)
            head += 1
        return order

    def rooted_parents(self, root: int) -> list[int]:
        """Parent index per node when rooted at ``root`` (root's parent is -1),
        discovered in BFS order with sorted neighbors (deterministic)."""
        _check_node(self.d, root)
        parent = [-1] * self.d
        seen = [False] * self.d
        seen[root] = True
        queue = [root]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for w in self.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = u
                    queue.append(w)
        return parent

    def rooted_order(self, root: int) -> list[int]:
        """Nodes in BFS order from ``root`` (deterministic)."""
        _check_node(self.d, root)
        return self._bfs_order(root)


def _check_node(d: int, m: int) -> None:
    if not (0 <= m < d):
        raise InvalidNode(f"node {m} outside [0, {d})")


def validate_tree(d: int, edges: Iterable[Sequence[int]]) -> LabeledTree:
    """Build a validated tree; alias for the LabeledTree constructor."""
    return LabeledTree(d, edges)


def path_edges(tree: LabeledTree, i: int, j: int) -> list[Edge]:
    """Directed edges along the unique path i -> j (empty if i == j).

    Each returned pair (a, b) is traversed from a to b.
    """
    _check_node(tree.d, i)
    _check_node(tree.d, j)
    if i == j:
        return []
    parent = tree.rooted_parents(i)
    path_nodes = [j]
    while path_nodes[-1] != i:
        path_nodes.append(parent[path_nodes[-1]])
    path_nodes.reverse()
    return [(path_nodes[t], path_nodes[t + 1]) for t in range(len(path_nodes) - 1)]


def tree_equal(a: LabeledTree, b: LabeledTree) -> bool:
    """Structural equality; raises DimensionMismatch on different d."""
    if a.d != b.d:
        raise DimensionMismatch(f"trees have different dimensions {a.d} and {b.d}")
    return a.edges == b.edges


def prufer_decode(seq: Sequence[int], d: int) -> LabeledTree:
    """Decode a Prüfer sequence of length d-2 into its labeled tree."""
    if d < 2:
        if len(seq):
            raise InputError("d = 1 admits only the empty sequence")
        return LabeledTree(1, [])
    if len(seq) != d - 2:
        raise InputError(f"Prüfer sequence for d={d} must have length {d - 2}")
    deg = [1] * d
    for s in seq:
        s = int(s)
        if not (0 <= s < d):
            raise InvalidNode(f"Prüfer symbol {s} outside [0, {d})")
        deg[s] += 1
    edges: list[Edge] = []
    ptr = 0
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    for s in seq:
        s = int(s)
        edges.append((leaf, s))
        deg[s] -= 1
        if deg[s] == 1 and s < ptr:
            leaf = s
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, d - 1))
    return LabeledTree(d, edges)


def enumerate_labeled_trees(d: int) -> list[LabeledTree]:
    """All d^(d-2) labeled trees on d nodes (Cayley), via Prüfer sequences."""
    if d == 1:
        return [LabeledTree(1, [])]
    if d == 2:
        return [LabeledTree(2, [(0, 1)])]
    return [prufer_decode(seq, d) for seq in itertools.product(range(d), repeat=d - 2)]


def random_tree(
    d: int,
    rng: RandomStream | np.random.Generator,
    mode: str = "sequential",
) -> LabeledTree:
    """Draw a random labeled tree on d nodes.

    mode="sequential" grows the tree by repeatedly drawing an unordered
    pair uniformly among all pairs whose addition creates no cycle (this
    law is *not* uniform over labeled trees for d >= 4).
    mode="uniform_spanning" decodes a uniform Prüfer sequence and is
    exactly uniform over all d^(d-2) labeled trees.
    """
    if d < 1:
        raise InputError(f"d must be >= 1, got {d}")
    gen = as_generator(rng)
    if mode == "uniform_spanning":
        if d < 3:
            return LabeledTree(d, [] if d == 1 else [(0, 1)])
        seq = gen.integers(0, d, size=d - 2)
        return prufer_decode([int(s) for s in seq], d)
    if mode != "sequential":
        raise InputError(f"unknown random_tree mode {mode!r}")
    comp = list(range(d))  # union-find with path compression

    def find(x: int) -> int:
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    all_pairs = [(u, v) for u in range(d) for v in range(u + 1, d)]
    edges: list[Edge] = []
    while len(edges) < d - 1:
        valid = [(u, v) for u, v in all_pairs if find(u) != find(v)]
        u, v = valid[int(gen.integers(0, len(valid)))]
        comp[find(u)] = find(v)
        edges.append((u, v))
    return LabeledTree(d, edges)


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Symmetric nonnegative edge-weight matrix with zero diagonal.

    +inf entries are allowed (they mark forbidden edges); NaN and negative
    entries are rejected, as is any asymmetry.
    """

    w: np.ndarray = field(repr=False)

    def __init__(self, w: np.ndarray):
        arr = np.array(w, dtype=float, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InputError(f"weight matrix must be square, got shape {arr.shape}")
        if np.isnan(arr).any():
            raise InputError("weight matrix contains NaN")
        if not np.array_equal(arr, arr.T):
            raise NotSymmetric("weight matrix is not symmetric")
        if np.diagonal(arr).any():
            raise InputError("weight matrix diagonal must be zero")
        off = arr[~np.eye(arr.shape[0], dtype=bool)]
        if (off < 0).any():
            raise InputError("weight matrix has negative entries")
        arr.setflags(write=False)
        object.__setattr__(self, "w", arr)

    @property
    def d(self) -> int:
        return self.w.shape[0]


# -- JSON --------------------------------------------------------------------

def tree_to_dict(tree: LabeledTree, names: Sequence[str] | None = None) -> dict:
    """JSON-ready dict: {"d", "edges" (u < v, sorted), "names"?}."""
    out: dict = {"d": tree.d, "edges": [[u, v] for u, v in tree.edges]}
    if names is not None:
        names = [str(x) for x in names]
        if len(names) != tree.d:
            raise DimensionMismatch(f"{len(names)} names for d={tree.d}")
        out["names"] = names
    return out


def tree_from_dict(obj: dict) -> tuple[LabeledTree, list[str] | None]:
    """Inverse of :func:`tree_to_dict`; returns (tree, names)."""
    if not isinstance(obj, dict) or "d" not in obj or "edges" not in obj:
        raise ParseError("tree JSON must be an object with keys 'd' and 'edges'")
    tree = LabeledTree(obj["d"], obj["edges"])
    names = obj.get("names")
    if names is not None:
        if not isinstance(names, list) or len(names) != tree.d:
            raise ParseError(f"'names' must list {tree.d} strings")
        names = [str(x) for x in names]
    return tree, names
