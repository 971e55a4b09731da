"""End-to-end analysis of a raw data matrix.

Takes a CSV of observations, and produces a deterministic JSON report:
extremal-correlation stability curves, the learned tree at a chosen tail
fraction, bootstrap edge frequencies, a Husler-Reiss fit of the learned
tree, and the implied-vs-empirical extremal correlations.  The report is
a pure function of (input bytes, flags, seed) — no timestamps, no
environment leakage — so reruns are byte-identical.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .errors import (
    InputError,
    NonNumericCell,
    ParseError,
    TooFewColumns,
    TooFewRows,
)
from .estimators import (
    chi_matrix,
    k_from_tail_fraction,
    rank_transform,
)
from .experiments import bootstrap_stability
from .learn import fit_hr_tree, learn_tree_chi, learn_tree_gamma
from .rng import RandomStream
from .trees import tree_to_dict
from .variogram import variogram_to_dict

__all__ = [
    "DataMatrix",
    "ingest_csv",
    "write_data_csv",
    "DEFAULT_CURVE_LEVELS",
    "run_pipeline",
    "PipelineReport",
]

# Quantile levels for the chi stability curves: the tail fraction used by
# the estimator is 1 - level, so levels near 1 probe deeper into the tail.
DEFAULT_CURVE_LEVELS = tuple(round(0.80 + 0.01 * t, 2) for t in range(20)) + (0.995, 0.999)


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """A validated (n, d) matrix of finite observations with column names."""

    values: np.ndarray = field(repr=False)
    names: tuple[str, ...]

    def __init__(self, values: np.ndarray, names: Sequence[str] | None = None):
        arr = np.array(values, dtype=float, copy=True)
        if arr.ndim != 2:
            raise InputError(f"data must be 2-dimensional, got shape {arr.shape}")
        n, d = arr.shape
        if n < 2:
            raise TooFewRows(f"need at least 2 rows, got {n}")
        if d < 2:
            raise TooFewColumns(f"need at least 2 columns, got {d}")
        if not np.isfinite(arr).all():
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise InputError(f"non-finite value at row {bad[0] + 1}, column {bad[1] + 1}")
        if names is None:
            names = tuple(f"V{c}" for c in range(d))
        else:
            names = tuple(str(x) for x in names)
            if len(names) != d:
                raise InputError(f"{len(names)} names for {d} columns")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def ingest_csv(
    path,
    delimiter: str = ",",
    has_header: bool = True,
    absolute: bool = False,
) -> DataMatrix:
    """Read a numeric CSV into a DataMatrix.

    Raises ParseError/NonNumericCell with 1-based file coordinates for
    malformed content, TooFewRows/TooFewColumns for undersized input.
    ``absolute`` applies |x| entrywise (useful when the tails of interest
    are two-sided).  Blank lines are skipped.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        names: list[str] | None = None
        rows: list[list[float]] = []
        width: int | None = None
        for lineno, cells in enumerate(reader, start=1):
            if not cells or all(not c.strip() for c in cells):
                continue
            if names is None and has_header:
                names = [c.strip() for c in cells]
                width = len(names)
                continue
            if width is None:
                width = len(cells)
            if len(cells) != width:
                raise ParseError(
                    f"expected {width} columns, found {len(cells)}", row=lineno
                )
            parsed = []
            for cno, cell in enumerate(cells, start=1):
                try:
                    val = float(cell.strip())
                except ValueError:
                    raise NonNumericCell(
                        f"cannot parse {cell.strip()!r} as a number", row=lineno, col=cno
                    ) from None
                if not np.isfinite(val):
                    raise NonNumericCell(
                        f"non-finite value {cell.strip()!r}", row=lineno, col=cno
                    )
                parsed.append(val)
            rows.append(parsed)
    if len(rows) < 2:
        raise TooFewRows(f"need at least 2 data rows, got {len(rows)}")
    if width < 2:
        raise TooFewColumns(f"need at least 2 columns, got {width}")
    arr = np.asarray(rows, dtype=float)
    if absolute:
        arr = np.abs(arr)
    return DataMatrix(arr, names)


def write_data_csv(path, values: np.ndarray, names: Sequence[str]) -> None:
    """Write a data matrix as CSV with 17 significant digits (floats
    round-trip exactly)."""
    arr = np.asarray(values, dtype=float)
    header = ",".join(str(x) for x in names)
    np.savetxt(path, arr, fmt="%.17g", delimiter=",", header=header, comments="")


@dataclass(frozen=True, eq=False)
class PipelineReport:
    """Everything :func:`run_pipeline` produced, JSON-ready via to_dict."""

    n: int
    d: int
    names: tuple[str, ...]
    q: float
    k: int
    seed: int
    method: str
    tree: dict
    chi_curves: dict
    chi_empirical: list
    bootstrap: dict | None
    fit: dict | None
    chi_table: list | None

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "n": self.n,
            "d": self.d,
            "names": list(self.names),
            "q": self.q,
            "k": self.k,
            "seed": self.seed,
            "method": self.method,
            "tree": self.tree,
            "chi_curves": self.chi_curves,
            "chi_empirical": self.chi_empirical,
            "bootstrap": self.bootstrap,
            "fit": self.fit,
            "chi_table": self.chi_table,
        }


def _matrix_list(arr: np.ndarray) -> list:
    return [[float(x) for x in row] for row in arr]


def run_pipeline(
    data: DataMatrix,
    q: float = 0.05,
    b_resamples: int = 100,
    fit: bool = True,
    curve_levels: Sequence[float] | None = None,
    method: str = "gamma-combined",
    root: int = 0,
    seed: int = 0,
    workers: int = 1,
) -> PipelineReport:
    """Run the full analysis at tail fraction ``q`` (k = round(q*n)).

    The chi stability curves evaluate every pair at each quantile level in
    ``curve_levels`` (tail fraction 1 - level).  ``b_resamples`` = 0 skips
    the bootstrap; ``fit=False`` skips the Husler-Reiss fit and the
    implied-vs-empirical table that depends on it.
    """
    ranks = rank_transform(data)
    n, d = ranks.n, ranks.d
    k = k_from_tail_fraction(q, n)
    levels = DEFAULT_CURVE_LEVELS if curve_levels is None else tuple(float(x) for x in curve_levels)
    for lev in levels:
        if not (0.0 < lev < 1.0):
            raise InputError(f"curve levels must lie in (0, 1), got {lev}")

    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    curve_values: list[list[float]] = [[] for _ in pairs]
    curve_ks = []
    for lev in levels:
        k_lev = k_from_tail_fraction(1.0 - lev, n)
        curve_ks.append(k_lev)
        chi_lev = chi_matrix(ranks, k_lev)
        for p, (i, j) in enumerate(pairs):
            curve_values[p].append(float(chi_lev[i, j]))
    chi_curves = {
        "levels": [float(x) for x in levels],
        "tail_fractions": [round(1.0 - lev, 12) for lev in levels],
        "k": curve_ks,
        "pairs": [[i, j] for i, j in pairs],
        "values": curve_values,
    }

    if method == "chi":
        tree = learn_tree_chi(ranks, k)
    elif method == "gamma-root":
        tree = learn_tree_gamma(ranks, k, root=root)
    else:
        tree = learn_tree_gamma(ranks, k)

    chi_emp = chi_matrix(ranks, k)

    boot = None
    if b_resamples > 0:
        stab = bootstrap_stability(
            data, k, b_resamples, RandomStream(seed).child(0),
            method=method, root=root, workers=workers,
        )
        boot = {
            "b_resamples": b_resamples,
            "counts": [[int(x) for x in row] for row in stab.counts],
            "frequencies": _matrix_list(stab.frequencies),
            "tree_edge_frequencies": [
                [u, v, float(stab.frequencies[u, v])] for u, v in tree.edges
            ],
        }

    fit_dict = None
    chi_table = None
    if fit:
        fitted = fit_hr_tree(ranks, k)
        fit_dict = {
            "tree": tree_to_dict(fitted.tree, data.names),
            "edge_gamma": {f"{u}-{v}": fitted.edge_gamma[(u, v)] for u, v in fitted.tree.edges},
            "full_gamma": variogram_to_dict(fitted.full_gamma),
            "implied_chi": _matrix_list(fitted.implied_chi),
            "k": fitted.k,
            "n": fitted.n,
        }
        chi_table = [
            [i, j, data.names[i], data.names[j],
             float(chi_emp[i, j]), float(fitted.implied_chi[i, j])]
            for i, j in pairs
        ]

    return PipelineReport(
        n=n, d=d, names=data.names, q=float(q), k=k, seed=int(seed), method=method,
        tree=tree_to_dict(tree, data.names),
        chi_curves=chi_curves,
        chi_empirical=_matrix_list(chi_emp),
        bootstrap=boot,
        fit=fit_dict,
        chi_table=chi_table,
    )
