"""Edge families and tree models: parameter domains, wiring, serialization."""

import math

import pytest

import tailtree as tt
from tailtree import (
    Dirichlet,
    EdgeModelMismatch,
    ExtremalTreeModel,
    HuslerReiss,
    InvalidParameter,
    LabeledTree,
    Logistic,
    NegativeGamma,
)


class TestHuslerReiss:
    def test_valid(self):
        assert HuslerReiss(0.5).gamma == 0.5

    def test_negative_gamma(self):
        with pytest.raises(NegativeGamma):
            HuslerReiss(-0.1)

    def test_zero_gamma_rejected(self):
        with pytest.raises(InvalidParameter):
            HuslerReiss(0.0)

    @pytest.mark.parametrize("bad", [math.inf, math.nan])
    def test_nonfinite(self, bad):
        with pytest.raises((InvalidParameter, NegativeGamma)):
            HuslerReiss(bad)


class TestLogistic:
    @pytest.mark.parametrize("theta", [0.01, 0.5, 0.99])
    def test_valid(self, theta):
        assert Logistic(theta).theta == theta

    @pytest.mark.parametrize("theta", [0.0, 1.0, -0.3, 1.5, math.nan])
    def test_out_of_range(self, theta):
        with pytest.raises(InvalidParameter):
            Logistic(theta)


class TestDirichlet:
    def test_valid(self):
        d = Dirichlet(2.0, 5.0)
        assert d.alpha_u == 2.0 and d.alpha_v == 5.0

    @pytest.mark.parametrize("au,av", [(0.0, 1.0), (1.0, -2.0), (math.nan, 1.0), (1.0, math.inf)])
    def test_invalid(self, au, av):
        with pytest.raises(InvalidParameter):
            Dirichlet(au, av)

    def test_asymmetric(self):
        # the two orientations are genuinely different distributions
        assert Dirichlet(1.0, 5.0) != Dirichlet(5.0, 1.0)


class TestExtremalTreeModel:
    def test_valid(self, chain3_hr):
        assert chain3_hr.tree.d == 3
        assert set(chain3_hr.edge_models) == {(0, 1), (1, 2)}

    def test_missing_edge(self):
        tree = LabeledTree(3, [(0, 1), (1, 2)])
        with pytest.raises(EdgeModelMismatch):
            ExtremalTreeModel(tree, {(0, 1): HuslerReiss(1.0)})

    def test_extra_edge(self):
        tree = LabeledTree(3, [(0, 1), (1, 2)])
        with pytest.raises(EdgeModelMismatch):
            ExtremalTreeModel(
                tree,
                {
                    (0, 1): HuslerReiss(1.0),
                    (1, 2): HuslerReiss(1.0),
                    (0, 2): HuslerReiss(1.0),
                },
            )

    def test_unordered_keys_accepted(self):
        tree = LabeledTree(2, [(0, 1)])
        m = ExtremalTreeModel(tree, {(1, 0): Logistic(0.5)})
        assert (0, 1) in m.edge_models

    def test_immutable(self, chain3_hr):
        with pytest.raises(AttributeError):
            chain3_hr.tree = LabeledTree(2, [(0, 1)])

    def test_hashable_and_eq(self):
        tree = LabeledTree(2, [(0, 1)])
        a = ExtremalTreeModel(tree, {(0, 1): HuslerReiss(2.0)})
        b = ExtremalTreeModel(tree, {(0, 1): HuslerReiss(2.0)})
        assert a == b and hash(a) == hash(b)


class TestSerialization:
    def test_round_trip_mixed(self, mixed_tree_model):
        d = tt.model_to_dict(mixed_tree_model)
        back, names = tt.model_from_dict(d)
        assert back == mixed_tree_model and names is None

    def test_family_tags(self, mixed_tree_model):
        d = tt.model_to_dict(mixed_tree_model)
        fams = {v["family"] for v in d["edge_models"].values()}
        assert fams == {"husler_reiss", "logistic", "dirichlet"}

    def test_bad_family_rejected(self):
        obj = {
            "d": 2,
            "edges": [[0, 1]],
            "edge_models": {"0-1": {"family": "gumbel", "theta": 0.5}},
        }
        with pytest.raises(tt.ParseError):
            tt.model_from_dict(obj)

    def test_edge_key_mismatch_rejected(self):
        obj = {
            "d": 2,
            "edges": [[0, 1]],
            "edge_models": {"0-2": {"family": "logistic", "theta": 0.5}},
        }
        with pytest.raises((tt.ParseError, EdgeModelMismatch, tt.InvalidNode)):
            tt.model_from_dict(obj)
