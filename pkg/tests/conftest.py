"""Shared fixtures and the acceptance-summary terminal hook.

Tests in test_acceptance.py mark themselves with
``@pytest.mark.acceptance(num=..., title=...)`` and record a one-line
measurement summary through the ``record_criterion`` fixture; after the
run, one PASS/FAIL line per criterion is printed so the whole gate can
be read at a glance.
"""

from __future__ import annotations

import numpy as np
import pytest

import tailtree as tt

# criterion number -> (title, details, outcome)
_ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(num, title): acceptance-gate criterion test"
    )


@pytest.fixture
def record_criterion(request):
    """Register this test as a criterion and let it attach measurements."""
    marker = request.node.get_closest_marker("acceptance")
    num = marker.kwargs["num"]
    entry = _ACCEPTANCE.setdefault(
        num, {"title": marker.kwargs["title"], "details": "", "nodeid": request.node.nodeid}
    )

    def record(details: str) -> None:
        entry["details"] = details

    return record


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for entry in _ACCEPTANCE.values():
        if entry["nodeid"] == report.nodeid:
            entry["outcome"] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        entry = _ACCEPTANCE[num]
        outcome = entry.get("outcome", "NOT RUN")
        line = f"criterion {num:>2} [{entry['title']}]: {outcome}"
        if entry["details"]:
            line += f" — {entry['details']}"
        tr.write_line(line)


# ---------------------------------------------------------------------------
# small shared builders


@pytest.fixture(scope="session")
def chain3_hr():
    """Three-node Husler-Reiss chain 0-1-2 with unit edge variograms."""
    tree = tt.LabeledTree(3, [(0, 1), (1, 2)])
    return tt.ExtremalTreeModel(
        tree, {(0, 1): tt.HuslerReiss(1.0), (1, 2): tt.HuslerReiss(1.0)}
    )


@pytest.fixture(scope="session")
def mixed_tree_model():
    """d=6 tree with one edge of every family (plus two more HR/logistic)."""
    tree = tt.LabeledTree(6, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)])
    return tt.ExtremalTreeModel(
        tree,
        {
            (0, 1): tt.HuslerReiss(1.0),
            (1, 2): tt.Logistic(0.4),
            (1, 3): tt.Dirichlet(2.0, 5.0),
            (3, 4): tt.HuslerReiss(0.5),
            (3, 5): tt.Logistic(0.7),
        },
    )


def make_random_model(tree: tt.LabeledTree, family: str, gen: np.random.Generator):
    """Random edge parameterization of one family (or a cycling mix)."""
    edge_models = {}
    for idx, (a, b) in enumerate(sorted(tree.edges)):
        fam = family if family != "mixed" else ("hr", "logistic", "dirichlet")[idx % 3]
        if fam == "hr":
            edge_models[(a, b)] = tt.HuslerReiss(gen.uniform(0.2, 4.0))
        elif fam == "logistic":
            edge_models[(a, b)] = tt.Logistic(gen.uniform(0.1, 0.9))
        else:
            edge_models[(a, b)] = tt.Dirichlet(
                gen.uniform(0.5, 10.0), gen.uniform(0.5, 10.0)
            )
    return tt.ExtremalTreeModel(tree, edge_models)


@pytest.fixture(scope="session")
def random_model():
    return make_random_model
