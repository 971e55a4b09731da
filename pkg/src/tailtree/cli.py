"""Command-line interface.

Subcommands mirror the library surface: simulate, estimate, learn,
chi-curve, fit-hr, bootstrap, experiment, pipeline.  Exit codes: 0 on
success, 2 for invalid input (bad files, bad parameters), 3 when the data
are too degenerate to answer (e.g. no finite-weight spanning tree).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DegeneracyError, InputError
from .estimators import (
    chi_matrix,
    default_k,
    gamma_hat_combined,
    gamma_hat_rooted,
    k_from_tail_fraction,
    rank_transform,
)
from .experiments import ExperimentConfig, bootstrap_stability, run_experiment
from .jsonio import canonical_json, load_json
from .learn import fit_hr_tree, learn_tree_chi, learn_tree_gamma
from .models import model_from_dict
from .pipeline import ingest_csv, run_pipeline, write_data_csv
from .rng import RandomStream
from .sampling import (
    IndependentNoise,
    TreeNoise,
    sample_domain_of_attraction,
    sample_max_stable,
    sample_y_rooted,
)
from .trees import tree_to_dict
from .variogram import variogram_to_dict


def _add_common(p: argparse.ArgumentParser, out_required: bool = False) -> None:
    p.add_argument("--seed", type=int, default=0, help="base random seed (default 0)")
    p.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--out", type=Path, required=out_required, default=None,
                   help="output path (default: stdout)")


def _add_csv_in(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", type=Path, required=True, help="input CSV path")
    p.add_argument("--delimiter", default=",", help="CSV delimiter (default ',')")
    p.add_argument("--no-header", action="store_true", help="input has no header row")
    p.add_argument("--abs", action="store_true", help="apply |x| entrywise on ingest")


def _add_k(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--k", type=int, default=None, help="tail sample size (default floor(n^0.8))")
    g.add_argument("--q", type=float, default=None, help="tail fraction; k = round(q*n)")


def _resolve_k(args, n: int) -> int:
    if args.k is not None:
        return args.k
    if args.q is not None:
        return k_from_tail_fraction(args.q, n)
    return default_k(n)


def _read_data(args):
    return ingest_csv(args.input, delimiter=args.delimiter,
                      has_header=not args.no_header, absolute=args.abs)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _load_model(path: Path):
    return model_from_dict(load_json(path))


def _cmd_simulate(args) -> int:
    model, names = _load_model(args.model)
    d = model.tree.d
    stream = RandomStream(args.seed)
    if args.kind == "max-stable":
        data = sample_max_stable(model, args.n, stream)
    elif args.kind == "y-rooted":
        data = sample_y_rooted(model, args.root, args.n, stream)
    else:  # doa
        if args.noise == "n2":
            if args.noise_model is None:
                raise InputError("--noise n2 requires --noise-model")
            noise_model, _ = _load_model(args.noise_model)
            noise = TreeNoise(noise_model)
        else:
            noise = IndependentNoise()
        data = sample_domain_of_attraction(model, noise, args.n, stream)
    if names is None:
        names = [f"V{c}" for c in range(d)]
    if args.out is None:
        import io

        buf = io.StringIO()
        write_data_csv(buf, data, names)
        sys.stdout.write(buf.getvalue())
    else:
        write_data_csv(args.out, data, names)
    return 0


def _cmd_estimate(args) -> int:
    data = _read_data(args)
    ranks = rank_transform(data)
    k = _resolve_k(args, ranks.n)
    if args.root == "combined":
        est = gamma_hat_combined(ranks, k)
    else:
        est = gamma_hat_rooted(ranks, int(args.root), k)
    report = est.to_dict()
    report["version"] = __version__
    _emit(canonical_json(report), args.out)
    return 0


def _parse_method(spec: str):
    """'chi' | 'gamma' | 'gamma-root=M' | 'gamma-weighted=FILE'."""
    if spec == "chi":
        return ("chi", None)
    if spec == "gamma":
        return ("gamma-combined", None)
    if spec.startswith("gamma-root="):
        return ("gamma-root", int(spec.split("=", 1)[1]))
    if spec.startswith("gamma-weighted="):
        path = spec.split("=", 1)[1]
        weights = load_json(path)
        if not isinstance(weights, list):
            raise InputError(f"weights file {path} must hold a JSON list")
        return ("gamma-combined", [float(w) for w in weights])
    raise InputError(
        f"unknown method {spec!r}; use chi | gamma | gamma-root=M | gamma-weighted=FILE"
    )


def _cmd_learn(args) -> int:
    data = _read_data(args)
    ranks = rank_transform(data)
    k = _resolve_k(args, ranks.n)
    method, extra = _parse_method(args.method)
    if method == "chi":
        tree = learn_tree_chi(ranks, k)
    elif method == "gamma-root":
        tree = learn_tree_gamma(ranks, k, root=extra)
    else:
        tree = learn_tree_gamma(ranks, k, weights=extra)
    report = tree_to_dict(tree, data.names)
    report["version"] = __version__
    report["k"] = k
    report["n"] = ranks.n
    report["method"] = args.method
    _emit(canonical_json(report), args.out)
    return 0


def _cmd_chi_curve(args) -> int:
    data = _read_data(args)
    ranks = rank_transform(data)
    n, d = ranks.n, ranks.d
    if args.levels:
        levels = [float(x) for x in args.levels.split(",")]
    else:
        from .pipeline import DEFAULT_CURVE_LEVELS

        levels = list(DEFAULT_CURVE_LEVELS)
    if args.pairs == "all":
        pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    else:
        pairs = []
        for tok in args.pairs.split(","):
            i_s, j_s = tok.split("-")
            pairs.append((int(i_s), int(j_s)))
    lines = ["i,j,name_i,name_j,level,tail_fraction,k,chi"]
    for lev in levels:
        if not (0.0 < lev < 1.0):
            raise InputError(f"levels must lie in (0, 1), got {lev}")
        q = 1.0 - lev
        k = k_from_tail_fraction(q, n)
        chi = chi_matrix(ranks, k)
        for i, j in pairs:
            lines.append(
                f"{i},{j},{data.names[i]},{data.names[j]},{lev!r},{round(q, 12)!r},{k},{float(chi[i, j])!r}"
            )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_fit_hr(args) -> int:
    data = _read_data(args)
    ranks = rank_transform(data)
    k = _resolve_k(args, ranks.n)
    fitted = fit_hr_tree(ranks, k)
    report = {
        "version": __version__,
        "tree": tree_to_dict(fitted.tree, data.names),
        "edge_gamma": {f"{u}-{v}": fitted.edge_gamma[(u, v)] for u, v in fitted.tree.edges},
        "full_gamma": variogram_to_dict(fitted.full_gamma),
        "implied_chi": [[float(x) for x in row] for row in fitted.implied_chi],
        "k": fitted.k,
        "n": fitted.n,
    }
    _emit(canonical_json(report), args.out)
    return 0


def _cmd_bootstrap(args) -> int:
    data = _read_data(args)
    ranks = rank_transform(data)
    k = _resolve_k(args, ranks.n)
    method, extra = _parse_method(args.method)
    stab = bootstrap_stability(
        data, k, args.resamples, RandomStream(args.seed),
        method=method,
        root=extra if method == "gamma-root" else 0,
        weights=extra if method == "gamma-combined" else None,
        workers=args.threads,
    )
    report = {
        "version": __version__,
        "d": stab.d,
        "n": ranks.n,
        "k": stab.k,
        "b_resamples": stab.b_resamples,
        "method": args.method,
        "seed": args.seed,
        "counts": [[int(x) for x in row] for row in stab.counts],
        "frequencies": [[float(x) for x in row] for row in stab.frequencies],
    }
    _emit(canonical_json(report), args.out)
    return 0


def _cmd_experiment(args) -> int:
    config = ExperimentConfig.from_dict(load_json(args.config))
    if args.seed != 0:
        from dataclasses import replace

        config = replace(config, seed=args.seed)
    result = run_experiment(config, workers=args.threads)
    _emit(result.to_csv_text(), args.out)
    return 0


def _cmd_pipeline(args) -> int:
    data = _read_data(args)
    report = run_pipeline(
        data,
        q=args.q,
        b_resamples=args.resamples,
        fit=not args.no_fit,
        method=_parse_method(args.method)[0],
        seed=args.seed,
        workers=args.threads,
    )
    _emit(canonical_json(report.to_dict()), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailtree",
        description="Tree graphical models for multivariate extremes",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate from a tree model")
    p.add_argument("--model", type=Path, required=True, help="model JSON path")
    p.add_argument("--n", type=int, required=True, help="number of samples")
    p.add_argument("--kind", choices=["doa", "max-stable", "y-rooted"], default="doa",
                   help="what to draw (default doa: max-stable plus noise)")
    p.add_argument("--root", type=int, default=0, help="conditioning node for y-rooted")
    p.add_argument("--noise", choices=["n1", "n2"], default="n1",
                   help="noise for doa: iid (n1) or tree noise (n2)")
    p.add_argument("--noise-model", type=Path, default=None,
                   help="model JSON for n2 noise")
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="estimate an extremal variogram matrix")
    _add_csv_in(p)
    p.add_argument("--root", default="combined",
                   help="conditioning node index, or 'combined' (default)")
    _add_k(p)
    _add_common(p)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("learn", help="learn the extremal tree structure")
    _add_csv_in(p)
    p.add_argument("--method", default="gamma",
                   help="chi | gamma | gamma-root=M | gamma-weighted=FILE (default gamma)")
    _add_k(p)
    _add_common(p)
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("chi-curve", help="extremal correlation stability curves")
    _add_csv_in(p)
    p.add_argument("--pairs", default="all",
                   help="comma-separated i-j pairs, or 'all' (default)")
    p.add_argument("--levels", default=None,
                   help="comma-separated quantile levels in (0,1); default 0.80..0.999")
    _add_common(p)
    p.set_defaults(func=_cmd_chi_curve)

    p = sub.add_parser("fit-hr", help="learn a tree and fit Husler-Reiss edges")
    _add_csv_in(p)
    _add_k(p)
    _add_common(p)
    p.set_defaults(func=_cmd_fit_hr)

    p = sub.add_parser("bootstrap", help="bootstrap edge-selection frequencies")
    _add_csv_in(p)
    p.add_argument("--resamples", "-B", type=int, default=100, dest="resamples",
                   help="number of bootstrap resamples (default 100)")
    p.add_argument("--method", default="gamma",
                   help="chi | gamma | gamma-root=M | gamma-weighted=FILE (default gamma)")
    _add_k(p)
    _add_common(p)
    p.set_defaults(func=_cmd_bootstrap)

    p = sub.add_parser("experiment", help="run a recovery experiment from a JSON config")
    p.add_argument("--config", type=Path, required=True, help="experiment config JSON")
    _add_common(p)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("pipeline", help="full analysis: curves, tree, bootstrap, fit")
    _add_csv_in(p)
    p.add_argument("--q", type=float, default=0.05, help="tail fraction (default 0.05)")
    p.add_argument("--resamples", "-B", type=int, default=100, dest="resamples",
                   help="bootstrap resamples; 0 disables (default 100)")
    p.add_argument("--no-fit", action="store_true", help="skip the Husler-Reiss fit")
    p.add_argument("--method", default="gamma",
                   help="chi | gamma | gamma-root=M | gamma-weighted=FILE (default gamma)")
    _add_common(p)
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegeneracyError as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
