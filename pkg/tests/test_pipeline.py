"""CSV ingestion and the end-to-end report: parse errors carry 1-based
file coordinates, reports are pure functions of (bytes, flags, seed)."""

import numpy as np
import pytest

import tailtree as tt
from tailtree import (
    DEFAULT_CURVE_LEVELS,
    DataMatrix,
    RandomStream,
    ingest_csv,
    run_pipeline,
    write_data_csv,
)


def write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestDataMatrix:
    def test_basic(self):
        dm = DataMatrix(np.arange(6.0).reshape(3, 2), ["a", "b"])
        assert dm.n == 3 and dm.d == 2 and dm.names == ("a", "b")

    def test_default_names(self):
        dm = DataMatrix(np.arange(6.0).reshape(2, 3))
        assert dm.names == ("V0", "V1", "V2")

    def test_values_immutable_and_copied(self):
        src = np.arange(4.0).reshape(2, 2)
        dm = DataMatrix(src)
        src[0, 0] = 99.0
        assert dm.values[0, 0] == 0.0
        with pytest.raises(ValueError):
            dm.values[0, 0] = 1.0

    def test_validation(self):
        with pytest.raises(tt.TooFewRows):
            DataMatrix(np.zeros((1, 3)))
        with pytest.raises(tt.TooFewColumns):
            DataMatrix(np.zeros((3, 1)))
        with pytest.raises(tt.InputError, match="row 2, column 1"):
            DataMatrix(np.array([[1.0, 2.0], [np.nan, 3.0]]))
        with pytest.raises(tt.InputError):
            DataMatrix(np.zeros((2, 2)), names=["only-one"])


class TestIngestCsv:
    def test_with_header(self, tmp_path):
        dm = ingest_csv(write(tmp_path, "x,y\n1,2\n3,4\n"))
        assert dm.names == ("x", "y")
        assert np.array_equal(dm.values, [[1.0, 2.0], [3.0, 4.0]])

    def test_without_header(self, tmp_path):
        dm = ingest_csv(write(tmp_path, "1,2\n3,4\n"), has_header=False)
        assert dm.names == ("V0", "V1")

    def test_custom_delimiter(self, tmp_path):
        dm = ingest_csv(write(tmp_path, "x\ty\n1\t2\n3\t4\n"), delimiter="\t")
        assert dm.values[1, 1] == 4.0

    def test_blank_lines_skipped(self, tmp_path):
        dm = ingest_csv(write(tmp_path, "x,y\n\n1,2\n\n3,4\n\n"))
        assert dm.n == 2

    def test_absolute_value_option(self, tmp_path):
        dm = ingest_csv(write(tmp_path, "x,y\n-1,2\n3,-4\n"), absolute=True)
        assert np.array_equal(dm.values, [[1.0, 2.0], [3.0, 4.0]])

    def test_non_numeric_cell_coordinates_account_for_header(self, tmp_path):
        path = write(tmp_path, "x,y\n1,2\n1,oops\n")
        with pytest.raises(tt.NonNumericCell, match=r"row 3, column 2"):
            ingest_csv(path)

    def test_non_finite_cell_rejected(self, tmp_path):
        with pytest.raises(tt.NonNumericCell, match=r"row 2, column 1"):
            ingest_csv(write(tmp_path, "x,y\ninf,2\n3,4\n"))

    def test_ragged_row_rejected_with_line_number(self, tmp_path):
        with pytest.raises(tt.ParseError, match=r"row 3"):
            ingest_csv(write(tmp_path, "x,y\n1,2\n1,2,3\n"))

    def test_too_few_rows(self, tmp_path):
        with pytest.raises(tt.TooFewRows):
            ingest_csv(write(tmp_path, "x,y\n1,2\n"))

    def test_too_few_columns(self, tmp_path):
        with pytest.raises(tt.TooFewColumns):
            ingest_csv(write(tmp_path, "x\n1\n2\n"))

    def test_round_trip_is_exact(self, tmp_path):
        values = np.random.default_rng(0).gumbel(size=(50, 3))
        path = tmp_path / "round.csv"
        write_data_csv(path, values, ["a", "b", "c"])
        back = ingest_csv(path)
        assert back.names == ("a", "b", "c")
        assert np.array_equal(back.values, values)


@pytest.fixture(scope="module")
def sample_data(mixed_tree_model):
    x = tt.sample_domain_of_attraction(
        mixed_tree_model, tt.IndependentNoise(), 3000, RandomStream(123)
    )
    return DataMatrix(x, [f"s{i}" for i in range(6)])


@pytest.fixture(scope="module")
def report(sample_data):
    return run_pipeline(sample_data, q=0.05, b_resamples=40, seed=9)


class TestRunPipeline:
    def test_version_is_first_key(self, report):
        d = report.to_dict()
        assert next(iter(d)) == "version"
        assert d["version"] == tt.__version__

    def test_header_fields(self, report, sample_data):
        assert report.n == 3000 and report.d == 6
        assert report.k == tt.k_from_tail_fraction(0.05, 3000)
        assert report.names == sample_data.names
        assert report.method == "gamma-combined"

    def test_learned_tree_matches_model(self, report, mixed_tree_model):
        edges = {tuple(e) for e in report.tree["edges"]}
        assert edges == set(mixed_tree_model.tree.edges)

    def test_chi_curves_block(self, report):
        curves = report.chi_curves
        assert curves["levels"] == list(DEFAULT_CURVE_LEVELS)
        assert len(curves["pairs"]) == 15
        assert all(len(v) == len(DEFAULT_CURVE_LEVELS) for v in curves["values"])
        assert curves["tail_fractions"][0] == pytest.approx(0.2)
        assert curves["k"][0] == tt.k_from_tail_fraction(0.2, 3000)
        flat = [x for vals in curves["values"] for x in vals]
        assert all(0.0 <= x <= 1.0 for x in flat)

    def test_bootstrap_block(self, report):
        boot = report.bootstrap
        assert boot["b_resamples"] == 40
        counts = np.array(boot["counts"])
        assert counts[np.triu_indices(6, 1)].sum() == 40 * 5
        for u, v, f in boot["tree_edge_frequencies"]:
            assert f == boot["frequencies"][u][v]

    def test_fit_block(self, report):
        fit = report.fit
        assert set(fit) == {"tree", "edge_gamma", "full_gamma", "implied_chi", "k", "n"}
        assert all("-" in key for key in fit["edge_gamma"])
        implied = np.array(fit["implied_chi"])
        assert np.all(np.diag(implied) == 1.0)

    def test_chi_table_pairs_names_and_values(self, report, sample_data):
        assert len(report.chi_table) == 15
        i, j, ni, nj, emp, imp = report.chi_table[0]
        assert (i, j) == (0, 1)
        assert (ni, nj) == ("s0", "s1")
        assert emp == report.chi_empirical[0][1]
        assert 0.0 < imp < 1.0

    def test_skip_flags(self, sample_data):
        rep = run_pipeline(sample_data, b_resamples=0, fit=False)
        assert rep.bootstrap is None and rep.fit is None and rep.chi_table is None

    def test_reruns_identical(self, sample_data):
        kwargs = dict(q=0.1, b_resamples=25, seed=4, curve_levels=(0.9, 0.95))
        a = tt.canonical_json(run_pipeline(sample_data, **kwargs).to_dict())
        b = tt.canonical_json(run_pipeline(sample_data, **kwargs).to_dict())
        assert a == b

    def test_workers_do_not_change_report(self, sample_data):
        kwargs = dict(q=0.1, b_resamples=25, seed=4, curve_levels=(0.9, 0.95))
        solo = run_pipeline(sample_data, workers=1, **kwargs)
        pooled = run_pipeline(sample_data, workers=3, **kwargs)
        assert tt.canonical_json(solo.to_dict()) == tt.canonical_json(pooled.to_dict())

    def test_seed_changes_bootstrap_only(self, sample_data):
        # q deep enough that resampled trees vary, so the seed shows up
        kwargs = dict(q=0.01, b_resamples=25, curve_levels=(0.9,))
        a = run_pipeline(sample_data, seed=1, **kwargs)
        b = run_pipeline(sample_data, seed=2, **kwargs)
        assert a.tree == b.tree
        assert a.chi_curves == b.chi_curves
        assert a.bootstrap != b.bootstrap

    def test_bad_curve_level_rejected(self, sample_data):
        with pytest.raises(tt.InputError):
            run_pipeline(sample_data, curve_levels=(0.5, 1.0))

    def test_chi_method_delegates_to_chi_learner(self, sample_data):
        rep = run_pipeline(sample_data, method="chi", b_resamples=0, fit=False)
        assert rep.method == "chi"
        ranks = tt.rank_transform(sample_data)
        expected = tt.learn_tree_chi(ranks, rep.k)
        assert {tuple(e) for e in rep.tree["edges"]} == set(expected.edges)
