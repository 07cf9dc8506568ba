import math

import numpy as np
import pytest

from subsparse.classifier import (
    UnionModel,
    check_classification_condition,
    classification_probability_bound,
    classify,
    run_classification_experiment,
    sample_union_model,
)
from subsparse.conditions import dual_angle
from subsparse.errors import DomainError
from subsparse.geometry import Dictionary, dual_points
from subsparse.randomized import RandomModelParams, drc_probability_bound

I4 = np.eye(4)


def orthogonal_model():
    return UnionModel.from_dictionary(Dictionary(I4, groups=((0, 1), (2, 3))))


class TestModel:
    def test_derived(self):
        model = orthogonal_model()
        assert model.dims == [2, 2] and model.counts == [2, 2]
        assert model.densities == [1.0, 1.0] and model.proportions == [0.5, 0.5]

    def test_requires_groups(self):
        with pytest.raises(DomainError):
            UnionModel.from_dictionary(Dictionary(I4))

    def test_sampler(self):
        model = sample_union_model(12, [2, 3], [5, 7], seed=1)
        assert model.dims == [2, 3] and model.counts == [5, 7]
        again = sample_union_model(12, [2, 3], [5, 7], seed=1)
        assert np.array_equal(model.dictionary.atoms, again.dictionary.atoms)


class TestClassify:
    @pytest.mark.parametrize("method", ["bp", "omp"])
    def test_atom_query(self, method):
        out = classify(orthogonal_model(), I4[3], method)
        assert out.label == 1 and out.single_group and out.status == "ok"

    @pytest.mark.parametrize("method", ["bp", "omp"])
    def test_random_query_in_first_subspace(self, method):
        b = np.array([0.6, -0.8, 0.0, 0.0])
        out = classify(orthogonal_model(), b, method)
        assert out.label == 0 and out.single_group
        assert out.group_mass[1] == 0.0

    def test_scale_invariant(self):
        model = sample_union_model(15, [2, 2], [10, 10], seed=2)
        b = model.bases[1].basis @ np.array([0.3, 0.7])
        for method in ("bp", "omp"):
            assert classify(model, b, method).label == classify(model, 5.0 * b, method).label

    def test_errors(self):
        with pytest.raises(DomainError):
            classify(orthogonal_model(), np.zeros(4))
        with pytest.raises(DomainError):
            classify(orthogonal_model(), I4[0], "lasso")

    def test_infeasible_query(self):
        model = UnionModel.from_dictionary(Dictionary(I4[:, :2], groups=((0,), (1,))))
        out = classify(model, I4[3])
        assert out.status == "solver_failure" and out.label is None


class TestCondition:
    def test_orthogonal_holds(self):
        rep = check_classification_condition(orthogonal_model())
        assert rep.holds
        for g in rep.groups:
            assert g.gamma == pytest.approx(math.pi / 4)
            assert g.dist_to_others == pytest.approx(math.pi / 2)

    def test_duplicate_subspaces_fail(self):
        r = 1 / math.sqrt(2)
        A = np.column_stack([I4[0], I4[1], [r, r, 0, 0], [r, -r, 0, 0]])
        rep = check_classification_condition(
            UnionModel.from_dictionary(Dictionary(A, groups=((0, 1), (2, 3)))))
        assert not rep.holds
        assert all(g.dist_to_others == pytest.approx(0.0, abs=1e-7) for g in rep.groups)

    def test_matches_core_geometry(self):
        model = sample_union_model(20, [2, 3], [12, 15], seed=4)
        rep = check_classification_condition(model)
        for i, g in enumerate(rep.groups):
            dual = dual_points(model.group_atoms(i))
            assert g.gamma == dual.covering_radius
            assert g.dist_to_others == dual_angle(model.other_atoms(i), dual)

    def test_no_false_certificates(self):
        rng = np.random.default_rng(8)
        for _ in range(5):
            model = sample_union_model(30, [2, 2, 3], [20, 20, 30], int(rng.integers(2**32)))
            if check_classification_condition(model).holds:
                exp = run_classification_experiment(model, 10, seed=1)
                assert exp.all_correct_single_group


class TestBound:
    def test_single_group_reduction(self):
        # one group: the outlier weight total/s is 1, which is lambda = 1 in the DRC bound
        for D, d, s in ((50, 2, 200), (80, 3, 600)):
            got = classification_probability_bound(D, [d], [s])
            assert got == pytest.approx(drc_probability_bound(RandomModelParams(D, d, s, 1.0)),
                                        rel=1e-13)

    def test_monotone(self):
        base = classification_probability_bound(60, [2, 2], [400, 400])
        assert classification_probability_bound(60, [3, 2], [600, 400]) < base
        assert classification_probability_bound(60, [2, 2], [800, 800]) > base

    def test_domain(self):
        with pytest.raises(DomainError, match="group 1"):
            classification_probability_bound(50, [2, 6], [100, 100])
        with pytest.raises(DomainError, match="rho"):
            classification_probability_bound(50, [2, 2], [1, 100])


class TestExperiment:
    def test_counts(self):
        model = orthogonal_model()
        exp = run_classification_experiment(model, 3, seed=0)
        assert exp.total == 2 * 3 * 2 and exp.accuracy == 1.0
        assert len(exp.records) == exp.total
        assert exp.all_correct_single_group
