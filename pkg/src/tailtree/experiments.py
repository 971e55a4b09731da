"""Simulation studies: random models, recovery metrics, repetition
harness, and bootstrap edge stability.

Each repetition lives on its own derived random stream
(``RandomStream(seed).child(rep)``), and aggregation places results by
repetition index, so a run is bit-identical no matter how many worker
processes execute it.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegeneracyError, DimensionMismatch, InputError, InvalidParameter
from .estimators import (
    RankMatrix,
    default_k,
    k_from_tail_fraction,
    rank_transform,
)
from .learn import learn_tree_chi, learn_tree_gamma
from .models import Dirichlet, ExtremalTreeModel, HuslerReiss
from .rng import RandomStream, as_generator
from .sampling import IndependentNoise, NoiseSpec, TreeNoise, sample_domain_of_attraction
from .trees import LabeledTree, random_tree, tree_equal

__all__ = [
    "gen_model_m1",
    "gen_model_m2",
    "edge_error",
    "ExperimentConfig",
    "ExperimentRow",
    "ExperimentResult",
    "run_experiment",
    "EdgeStability",
    "bootstrap_stability",
]

logger = logging.getLogger(__name__)

METHODS = ("chi", "gamma-root", "gamma-combined")


def gen_model_m1(
    tree: LabeledTree,
    rng: RandomStream | np.random.Generator,
    gamma_low: float = 0.2,
    gamma_high: float = 1.0,
    fixed_gamma: float | None = None,
) -> ExtremalTreeModel:
    """Husler-Reiss model on a tree: each edge draws gamma uniformly from
    [gamma_low, gamma_high] (edges in sorted order), or uses
    ``fixed_gamma`` on every edge when given."""
    gen = as_generator(rng)
    edge_models = {}
    for e in tree.edges:
        g = fixed_gamma if fixed_gamma is not None else float(gen.uniform(gamma_low, gamma_high))
        edge_models[e] = HuslerReiss(g)
    return ExtremalTreeModel(tree, edge_models)


def gen_model_m2(
    tree: LabeledTree,
    rng: RandomStream | np.random.Generator,
    alpha_low: float = 1.0,
    alpha_high: float = 10.0,
) -> ExtremalTreeModel:
    """Dirichlet model on a tree: each edge draws both shape parameters
    uniformly from [alpha_low, alpha_high] (smaller endpoint's first,
    edges in sorted order)."""
    gen = as_generator(rng)
    edge_models = {}
    for e in tree.edges:
        a_u = float(gen.uniform(alpha_low, alpha_high))
        a_v = float(gen.uniform(alpha_low, alpha_high))
        edge_models[e] = Dirichlet(a_u, a_v)
    return ExtremalTreeModel(tree, edge_models)


def edge_error(true: LabeledTree, estimate: LabeledTree) -> float:
    """Fraction of true edges missed: 1 - |E_est ∩ E_true| / (d-1)."""
    if true.d != estimate.d:
        raise DimensionMismatch(f"trees have different dimensions {true.d} and {estimate.d}")
    if true.d < 2:
        raise InputError("edge_error needs d >= 2")
    hits = len(set(true.edges) & set(estimate.edges))
    return 1.0 - hits / (true.d - 1)


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of a recovery experiment.

    ``model`` is "m1" (Husler-Reiss, gamma ~ U[0.2, 1], or ``fixed_gamma``
    on every edge) or "m2" (Dirichlet, alpha ~ U[1, 10]); ``noise`` is
    "n1" (iid) or "n2" (an independent random Husler-Reiss tree, redrawn
    per repetition); ``k_rule`` is "n_pow" (floor(n^0.8)), "fixed", or
    "q_grid" (k = round(q*n) per grid point, data shared across the
    grid).
    """

    d: int
    n_list: tuple[int, ...]
    model: str = "m1"
    fixed_gamma: float | None = None
    noise: str = "n1"
    methods: tuple[str, ...] = ("gamma-combined",)
    root: int = 0
    weights: tuple[float, ...] | None = None
    k_rule: str = "n_pow"
    k_fixed: int | None = None
    q_grid: tuple[float, ...] | None = None
    repetitions: int = 100
    seed: int = 0
    tree_mode: str = "sequential"

    def __post_init__(self):
        if self.d < 2:
            raise InputError(f"d must be >= 2, got {self.d}")
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if not self.n_list or any(n < 2 for n in self.n_list):
            raise InputError(f"n_list must hold integers >= 2, got {self.n_list}")
        if self.model not in ("m1", "m2"):
            raise InvalidParameter(f"model must be 'm1' or 'm2', got {self.model!r}")
        if self.model == "m2" and self.fixed_gamma is not None:
            raise InvalidParameter("fixed_gamma only applies to model 'm1'")
        if self.noise not in ("n1", "n2"):
            raise InvalidParameter(f"noise must be 'n1' or 'n2', got {self.noise!r}")
        object.__setattr__(self, "methods", tuple(self.methods))
        for meth in self.methods:
            if meth not in METHODS:
                raise InvalidParameter(f"unknown method {meth!r}; choose from {METHODS}")
        if not self.methods:
            raise InputError("methods must not be empty")
        if not (0 <= self.root < self.d):
            raise InputError(f"root {self.root} outside [0, {self.d})")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.k_rule not in ("n_pow", "fixed", "q_grid"):
            raise InvalidParameter(f"unknown k_rule {self.k_rule!r}")
        if self.k_rule == "fixed" and (self.k_fixed is None or self.k_fixed < 2):
            raise InputError("k_rule 'fixed' needs k_fixed >= 2")
        if self.k_rule == "q_grid":
            if not self.q_grid:
                raise InputError("k_rule 'q_grid' needs a nonempty q_grid")
            object.__setattr__(self, "q_grid", tuple(float(q) for q in self.q_grid))
        if self.repetitions < 1:
            raise InputError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.tree_mode not in ("sequential", "uniform_spanning"):
            raise InvalidParameter(f"unknown tree_mode {self.tree_mode!r}")

    def cells(self, n: int) -> list[tuple[int, float]]:
        """(k, q) evaluation points for sample size n."""
        if self.k_rule == "fixed":
            k = min(self.k_fixed, n)
            return [(k, k / n)]
        if self.k_rule == "q_grid":
            return [(k_from_tail_fraction(q, n), q) for q in self.q_grid]
        k = default_k(n)
        return [(k, k / n)]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["n_list"] = list(self.n_list)
        out["methods"] = list(self.methods)
        out["weights"] = None if self.weights is None else list(self.weights)
        out["q_grid"] = None if self.q_grid is None else list(self.q_grid)
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise InputError("experiment config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(obj)
        for key in ("n_list", "methods", "weights", "q_grid"):
            if kwargs.get(key) is not None:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


def _learn_with_method(ranks: RankMatrix, k: int, method: str, config: ExperimentConfig):
    if method == "chi":
        return learn_tree_chi(ranks, k)
    if method == "gamma-root":
        return learn_tree_gamma(ranks, k, root=config.root)
    return learn_tree_gamma(ranks, k, weights=config.weights)


def _run_repetition(config: ExperimentConfig, rep: int) -> dict:
    """One repetition: draw tree/model/noise, then per (n, k, method) the
    edge error and exact-recovery flag (degenerate learns count as total
    failure).  Keys are (method, n, k, q)."""
    stream = RandomStream(config.seed).child(rep)
    tree = random_tree(config.d, stream.child(0), config.tree_mode)
    if config.model == "m1":
        model = gen_model_m1(tree, stream.child(1), fixed_gamma=config.fixed_gamma)
    else:
        model = gen_model_m2(tree, stream.child(1))
    noise: NoiseSpec
    if config.noise == "n1":
        noise = IndependentNoise()
    else:
        noise_tree = random_tree(config.d, stream.child(2), config.tree_mode)
        noise = TreeNoise(gen_model_m1(noise_tree, stream.child(3)))
    out: dict = {}
    for n_index, n in enumerate(config.n_list):
        x = sample_domain_of_attraction(model, noise, n, stream.child(4, n_index))
        ranks = rank_transform(x)
        for k, q in config.cells(n):
            for method in config.methods:
                try:
                    learned = _learn_with_method(ranks, k, method, config)
                    err = edge_error(tree, learned)
                    recovered = tree_equal(tree, learned)
                    failed = False
                except DegeneracyError:
                    err, recovered, failed = 1.0, False, True
                out[(method, n, k, q)] = (err, bool(recovered), failed)
    return out


@dataclass(frozen=True)
class ExperimentRow:
    method: str
    n: int
    k: int
    q: float
    err_mean: float
    err_se: float
    srr_mean: float
    srr_se: float
    reps: int
    failures: int = 0


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    rows: tuple[ExperimentRow, ...]

    def to_csv_text(self) -> str:
        lines = ["method,n,k,q,err_mean,err_se,srr_mean,srr_se,reps"]
        for r in self.rows:
            lines.append(
                f"{r.method},{r.n},{r.k},{r.q!r},{r.err_mean!r},{r.err_se!r},"
                f"{r.srr_mean!r},{r.srr_se!r},{r.reps}"
            )
        return "\n".join(lines) + "\n"


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run all repetitions and aggregate per (method, n, k, q) cell.

    ``workers`` > 1 distributes repetitions over processes; results are
    identical for any worker count because each repetition derives its
    own stream and lands in a slot indexed by repetition number.
    """
    reps = config.repetitions
    per_rep: list[dict | None] = [None] * reps
    if workers > 1 and reps > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rep, res in enumerate(pool.map(_rep_star, [(config, r) for r in range(reps)])):
                per_rep[rep] = res
    else:
        for rep in range(reps):
            per_rep[rep] = _run_repetition(config, rep)
    cells = list(per_rep[0].keys())
    rows = []
    for cell in cells:
        errs = np.array([per_rep[r][cell][0] for r in range(reps)])
        recs = np.array([per_rep[r][cell][1] for r in range(reps)], dtype=bool)
        fails = sum(per_rep[r][cell][2] for r in range(reps))
        err_mean = float(errs.mean())
        err_se = float(errs.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
        srr = 1.0 - float(recs.mean())
        srr_se = float(np.sqrt(srr * (1.0 - srr) / reps))
        method, n, k, q = cell
        rows.append(
            ExperimentRow(
                method=method, n=n, k=k, q=float(q),
                err_mean=err_mean, err_se=err_se,
                srr_mean=srr, srr_se=srr_se,
                reps=reps, failures=int(fails),
            )
        )
        if fails:
            logger.info("cell %s had %d degenerate repetitions", cell, fails)
    rows.sort(key=lambda r: (r.method, r.n, r.k, r.q))
    return ExperimentResult(config=config, rows=tuple(rows))


def _rep_star(args: tuple[ExperimentConfig, int]) -> dict:
    return _run_repetition(*args)


@dataclass(frozen=True, eq=False)
class EdgeStability:
    """Bootstrap edge frequencies: how often each pair was a learned tree
    edge across B resamples.  ``counts`` are integers; ``frequencies`` is
    counts / B, so its upper triangle sums to exactly d - 1 in exact
    arithmetic (sum of counts = B * (d - 1))."""

    d: int
    b_resamples: int
    k: int
    method: str
    counts: np.ndarray = field(repr=False)
    frequencies: np.ndarray = field(repr=False)


def _bootstrap_one(args) -> LabeledTree:
    values, k, method, root, weights, seed, path, b = args
    gen = RandomStream(seed, tuple(path) + (b,)).generator()
    idx = gen.integers(0, values.shape[0], size=values.shape[0])
    ranks = rank_transform(values[idx])
    if method == "chi":
        return learn_tree_chi(ranks, k)
    if method == "gamma-root":
        return learn_tree_gamma(ranks, k, root=root)
    return learn_tree_gamma(ranks, k, weights=weights)


def bootstrap_stability(
    data,
    k: int,
    b_resamples: int,
    rng: RandomStream,
    method: str = "gamma-combined",
    root: int = 0,
    weights: Sequence[float] | None = None,
    workers: int = 1,
) -> EdgeStability:
    """Edge-selection frequencies over B bootstrap resamples (rows drawn
    with replacement, ranks and the tree recomputed per resample).
    Degenerate resamples propagate their error — a dataset that cannot be
    re-learned is worth hearing about."""
    values = np.asarray(getattr(data, "values", data), dtype=float)
    if method not in METHODS:
        raise InvalidParameter(f"unknown method {method!r}; choose from {METHODS}")
    b_resamples = int(b_resamples)
    if b_resamples < 1:
        raise InputError(f"b_resamples must be >= 1, got {b_resamples}")
    if not isinstance(rng, RandomStream):
        raise InputError("bootstrap_stability needs a RandomStream for per-resample streams")
    d = values.shape[1]
    weights_t = None if weights is None else tuple(float(w) for w in weights)
    jobs = [
        (values, k, method, root, weights_t, rng.seed, rng.path, b)
        for b in range(b_resamples)
    ]
    if workers > 1 and b_resamples > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trees = list(pool.map(_bootstrap_one, jobs, chunksize=max(1, b_resamples // (4 * workers))))
    else:
        trees = [_bootstrap_one(job) for job in jobs]
    counts = np.zeros((d, d), dtype=np.int64)
    for t in trees:
        for u, v in t.edges:
            counts[u, v] += 1
            counts[v, u] += 1
    freq = counts / float(b_resamples)
    return EdgeStability(
        d=d, b_resamples=b_resamples, k=int(k), method=method,
        counts=counts, frequencies=freq,
    )
