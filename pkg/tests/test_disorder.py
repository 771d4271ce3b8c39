"""
Düzensizlik servisi testleri: yasalar, örnekleyici modları, (P1)/(P2) denetimi
"""

import numpy as np
import pytest

from app.errors import SpecModelMismatchError, SupportViolationError
from app.models.disorder import DisorderMode, DisorderSpec, LawKind, LawSpec
from app.models.substitution import SubstitutionModel, laplacian_model
from app.services.disorder import (
    POTENTIAL_STREAM,
    DisorderAuditor,
    DisorderSampler,
    LawFactory,
    ancestor_pair,
    pick_disjoint_pair,
    stream_generator,
)
from app.services.substitution import TreeBuilder

U = np.linspace(0.0, 1.0, 1001, endpoint=False)


@pytest.fixture
def sampler():
    return DisorderSampler()


@pytest.fixture
def binary_tree(binary_model):
    return TreeBuilder().grow_tree(binary_model, 0, 5)


class TestLaws:
    @pytest.mark.parametrize(
        "spec, bound",
        [
            (LawSpec.create(LawKind.UNIFORM, width=0.5), 0.5),
            (LawSpec.create(LawKind.TWO_POINT, width=0.3), 0.3),
            (LawSpec.create(LawKind.TRUNCATED_NORMAL, sigma=2.0), 1.0),
        ],
    )
    def test_support(self, spec, bound):
        law = LawFactory.create(spec)
        values = law.ppf(U)
        assert law.kind is spec.kind
        assert np.all(np.abs(values) <= bound)
        assert np.all(np.abs(values) < 1.0)

    def test_two_point_values(self):
        values = LawFactory.create(LawSpec.create(LawKind.TWO_POINT, width=0.3)).ppf(U)
        assert set(np.unique(values)) == {-0.3, 0.3}

    def test_uniform_is_monotone(self):
        values = LawFactory.create(LawSpec.create(LawKind.UNIFORM, width=0.5)).ppf(U)
        assert values[0] == -0.5
        assert np.all(np.diff(values) > 0)

    @pytest.mark.parametrize(
        "spec",
        [
            LawSpec.create(LawKind.UNIFORM, width=1.0),
            LawSpec.create(LawKind.TWO_POINT, width=-0.1),
            LawSpec.create(LawKind.TRUNCATED_NORMAL, sigma=0.0),
        ],
    )
    def test_invalid_parameters(self, spec):
        with pytest.raises(SupportViolationError):
            LawFactory.create(spec)

    def test_missing_parameter(self):
        with pytest.raises(ValueError):
            LawFactory.create(LawSpec.create(LawKind.UNIFORM, sigma=0.2))


class TestDisorderSpec:
    def test_dict_form(self):
        spec = DisorderSpec(
            mode=DisorderMode.IID_BOTH,
            per_label=(LawSpec.create(LawKind.UNIFORM, width=0.5),),
            vertex_overrides={3: LawSpec.create(LawKind.TWO_POINT, width=0.2)},
        )
        data = spec.to_dict()
        assert data["mode"] == "iid_both"
        assert data["vertex_overrides"] == {"3": {"law": "two_point", "params": {"width": 0.2}}}
        assert DisorderSpec.from_dict(data) == spec

    def test_mode_flags(self):
        assert DisorderMode.IID_POTENTIAL.uses_potential_law
        assert not DisorderMode.IID_POTENTIAL.uses_hopping_law
        assert DisorderMode.EDGE_WEIGHT_LAPLACIAN.uses_hopping_law


class TestStreams:
    def test_independent_streams(self):
        first = stream_generator(7, (0, 1), 0).random(5)
        assert np.array_equal(first, stream_generator(7, (0, 1), 0).random(5))
        assert not np.array_equal(first, stream_generator(7, (0, 1), 1).random(5))
        assert not np.array_equal(first, stream_generator(7, (0, 2), 0).random(5))
        assert not np.array_equal(first, stream_generator(8, (0, 1), 0).random(5))


class TestSampler:
    def test_deterministic(self, sampler, binary_model, binary_tree):
        spec = DisorderSpec.uniform(DisorderMode.IID_BOTH, 0.5, 1)
        first = sampler.sample(spec, binary_model, binary_tree, seed=42, key=(0, 3))
        second = sampler.sample(spec, binary_model, binary_tree, seed=42, key=(0, 3))
        other = sampler.sample(spec, binary_model, binary_tree, seed=42, key=(0, 4))
        assert np.array_equal(first.v, second.v)
        assert np.array_equal(first.theta, second.theta)
        assert not np.array_equal(first.v, other.v)
        assert not np.array_equal(first.v, first.theta)

    def test_deeper_tree_extends_shallow(self, sampler, binary_model, binary_tree):
        spec = DisorderSpec.uniform(DisorderMode.IID_BOTH, 0.5, 1)
        shallow_tree = TreeBuilder().grow_tree(binary_model, 0, 3)
        shallow = sampler.sample(spec, binary_model, shallow_tree, seed=1)
        deep = sampler.sample(spec, binary_model, binary_tree, seed=1)
        assert np.array_equal(deep.v[: shallow_tree.size], shallow.v)

    def test_single_component_modes(self, sampler, binary_model, binary_tree):
        potential = sampler.sample(
            DisorderSpec.uniform(DisorderMode.IID_POTENTIAL, 0.5, 1), binary_model, binary_tree, seed=2
        )
        assert np.all(potential.theta == 0)
        assert np.all(np.abs(potential.v) <= 0.5) and np.any(potential.v != 0)

        hopping = sampler.sample(
            DisorderSpec.uniform(DisorderMode.IID_HOPPING, 0.5, 1), binary_model, binary_tree, seed=2
        )
        assert np.all(hopping.v == 0)
        assert np.any(hopping.theta != 0)

    def test_per_label_laws(self, sampler, two_label_model):
        spec = DisorderSpec(
            mode=DisorderMode.IID_POTENTIAL,
            per_label=(
                LawSpec.create(LawKind.TWO_POINT, width=0.1),
                LawSpec.create(LawKind.TWO_POINT, width=0.7),
            ),
        )
        tree = TreeBuilder().grow_tree(two_label_model, 0, 4)
        realization = sampler.sample(spec, two_label_model, tree, seed=3)
        expected = np.where(tree.labels == 0, 0.1, 0.7)
        assert np.allclose(np.abs(realization.v), expected)

    def test_label_count_mismatch(self, sampler, two_label_model):
        tree = TreeBuilder().grow_tree(two_label_model, 0, 2)
        with pytest.raises(SpecModelMismatchError):
            sampler.sample(DisorderSpec.uniform(DisorderMode.IID_BOTH, 0.5, 1), two_label_model, tree, seed=0)

    def test_correlated_decay_recursion(self, sampler, binary_model, binary_tree):
        spec = DisorderSpec.uniform(DisorderMode.CORRELATED_DECAY, 0.1, 1)
        realization = sampler.sample(spec, binary_model, binary_tree, seed=5, key=(0, 0))
        w = sampler.draw(spec, binary_tree, 5, (0, 0), POTENTIAL_STREAM)
        v = realization.v
        for x in range(binary_tree.size):
            children = list(binary_tree.children(x))
            assert v[x] == pytest.approx((w[x] + v[children].sum()) / 2.0, abs=1e-14)
        assert np.all(realization.theta == 0)

    def test_correlated_decay_support_violation(self, sampler, binary_model):
        tree = TreeBuilder().grow_tree(binary_model, 0, 12)
        spec = DisorderSpec(
            mode=DisorderMode.CORRELATED_DECAY,
            per_label=(LawSpec.create(LawKind.TWO_POINT, width=0.95),),
        )
        with pytest.raises(SupportViolationError):
            sampler.sample(spec, binary_model, tree, seed=6)

    def test_edge_weight_laplacian(self, sampler):
        model = laplacian_model([[2]])
        tree = TreeBuilder().grow_tree(model, 0, 4)
        spec = DisorderSpec.uniform(DisorderMode.EDGE_WEIGHT_LAPLACIAN, 0.3, 1)
        realization = sampler.sample(spec, model, tree, seed=7)
        theta = realization.theta
        assert theta[tree.root_id] == 0
        assert realization.root_vper_shift == 1.0
        for x in range(tree.size):
            children = list(tree.children(x))
            assert realization.v[x] == pytest.approx(theta[x] + theta[children].sum(), abs=1e-14)

    def test_edge_weight_laplacian_without_override(self, sampler):
        model = laplacian_model([[2]])
        tree = TreeBuilder().grow_tree(model, 0, 3)
        spec = DisorderSpec(
            mode=DisorderMode.EDGE_WEIGHT_LAPLACIAN,
            per_label=(LawSpec.create(LawKind.UNIFORM, width=0.3),),
            laplacian_root_override=False,
        )
        realization = sampler.sample(spec, model, tree, seed=7)
        assert realization.theta[tree.root_id] != 0
        assert realization.root_vper_shift == 0.0

    def test_laplacian_requires_degree_potential(self, sampler, binary_model, binary_tree):
        spec = DisorderSpec.uniform(DisorderMode.EDGE_WEIGHT_LAPLACIAN, 0.3, 1)
        with pytest.raises(SpecModelMismatchError):
            sampler.sample(spec, binary_model, binary_tree, seed=0)


class TestPairs:
    def test_disjoint_pair(self, binary_tree):
        assert pick_disjoint_pair(binary_tree) == (1, 2)
        assert ancestor_pair(binary_tree) == (0, 1)

    def test_no_pair_in_chain(self):
        model = SubstitutionModel.from_matrix([[0, 1], [1, 0]])
        tree = TreeBuilder().grow_tree(model, 0, 3)
        assert pick_disjoint_pair(tree) is None


class TestAuditor:
    N_TRIALS = 1000

    def test_iid_spec(self, binary_model):
        spec = DisorderSpec.uniform(DisorderMode.IID_BOTH, 0.5, 1)
        report = DisorderAuditor().check_p1_p2(spec, binary_model, self.N_TRIALS, seed=11)
        assert report.pair == (1, 2)
        assert report.ks_statistic_v < 0.1
        assert report.ks_statistic_theta < 0.1
        assert abs(report.correlation_v) < 0.2
        assert abs(report.ancestor_correlation) < 0.2
        assert report.correlation_threshold == pytest.approx(3.0 / np.sqrt(self.N_TRIALS))
        assert set(report.to_dict()) >= {"p1_passed", "p2_passed", "ancestor_correlation"}

    def test_correlated_decay_correlates_ancestors(self, binary_model):
        spec = DisorderSpec.uniform(DisorderMode.CORRELATED_DECAY, 0.05, 1)
        report = DisorderAuditor().check_p1_p2(spec, binary_model, self.N_TRIALS, seed=12)
        assert report.ancestor_correlated
        assert report.ks_statistic_v < 0.1

    def test_override_breaks_identical_distribution(self, binary_model):
        spec = DisorderSpec(
            mode=DisorderMode.IID_POTENTIAL,
            per_label=(LawSpec.create(LawKind.UNIFORM, width=0.5),),
            vertex_overrides={2: LawSpec.create(LawKind.TWO_POINT, width=0.9)},
        )
        report = DisorderAuditor().check_p1_p2(spec, binary_model, self.N_TRIALS, seed=13)
        assert not report.p2_passed
        assert not report.passed

    def test_requires_enough_trials(self, binary_model):
        with pytest.raises(ValueError):
            DisorderAuditor().check_p1_p2(
                DisorderSpec.uniform(DisorderMode.IID_BOTH, 0.5, 1), binary_model, 10, seed=0
            )
