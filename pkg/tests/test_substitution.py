"""
Yerine koyma servisi testleri
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.errors import NoM1StarWitnessError, PermutationLimitError, SizeLimitError
from app.models.substitution import SlotSide, SubstitutionModel, laplacian_model
from app.services.substitution import PermutationEnumerator, SubstitutionAnalyzer, TreeBuilder


@st.composite
def matrices(draw, max_size: int = 3, max_entry: int = 3):
    size = draw(st.integers(1, max_size))
    rows = draw(
        st.lists(
            st.lists(st.integers(0, max_entry), min_size=size, max_size=size),
            min_size=size,
            max_size=size,
        )
    )
    return SubstitutionModel.from_matrix(rows)


class TestValidate:
    def test_binary_tree_satisfies_everything(self, analyzer, binary_model):
        report = analyzer.validate(binary_model)
        assert report.to_dict() == {"m0": True, "m1": True, "m1star": True, "m2": True}
        assert report.is_valid

    def test_single_child_violates_m0(self, analyzer):
        report = analyzer.validate(SubstitutionModel.from_matrix([[1]]))
        assert not report.m0
        assert not report.is_valid
        assert "(M0) violated" in report.violations()

    def test_two_label_full_matrix(self, analyzer, two_label_model):
        assert analyzer.validate(two_label_model).is_valid

    def test_reducible_matrix(self, analyzer):
        report = analyzer.validate(SubstitutionModel.from_matrix([[1, 1], [0, 2]]))
        assert report.m1star
        assert not report.m2

    @given(matrices())
    @settings(max_examples=200, deadline=None)
    def test_m1_implies_m1star(self, model):
        report = SubstitutionAnalyzer().validate(model)
        if report.m1:
            assert report.m1star


class TestChooseOPrime:
    def test_single_label(self, analyzer, binary_model):
        assert analyzer.choose_o_prime(binary_model, 0) == 0

    def test_tie_break_smallest_index(self, analyzer, two_label_model):
        assert analyzer.choose_o_prime(two_label_model, 0) == 0
        assert analyzer.choose_o_prime(two_label_model, 1) == 0

    def test_forced_witness(self, analyzer):
        model = SubstitutionModel.from_matrix([[1, 1], [0, 2]])
        assert analyzer.choose_o_prime(model, 0) == 0
        assert analyzer.choose_o_prime(model, 1) == 1

    def test_missing_witness(self, analyzer):
        # satır 0 desteği {1, 2}; ne 1 ne 2 bu desteği kapsıyor
        model = SubstitutionModel.from_matrix([[0, 1, 1], [1, 1, 0], [1, 0, 1]])
        with pytest.raises(NoM1StarWitnessError):
            analyzer.choose_o_prime(model, 0)


class TestGrowTree:
    @pytest.mark.parametrize(
        "matrix, depth, expected",
        [([[2]], 3, 15), ([[1, 1], [1, 1]], 2, 7), ([[3]], 0, 1), ([[1, 1], [0, 2]], 0, 1)],
    )
    def test_vertex_counts(self, matrix, depth, expected):
        builder = TreeBuilder()
        model = SubstitutionModel.from_matrix(matrix)
        tree = builder.grow_tree(model, 0, depth)
        assert tree.size == expected
        assert builder.count_vertices(model, 0, depth) == expected

    @given(matrices(), st.integers(0, 5))
    @settings(max_examples=60, deadline=None)
    def test_children_reproduce_matrix(self, model, depth):
        builder = TreeBuilder(max_vertices=50_000)
        if builder.count_vertices(model, 0, depth) > builder.max_vertices:
            return
        tree = builder.grow_tree(model, 0, depth)
        assert tree.size == builder.count_vertices(model, 0, depth)
        for vertex in tree.vertices:
            if vertex.depth == depth:
                assert vertex.children == ()
                continue
            child_labels = [int(tree.labels[c]) for c in vertex.children]
            counts = np.bincount(child_labels, minlength=model.alphabet_size)
            assert counts.tolist() == list(model.matrix[vertex.label])
            assert child_labels == sorted(child_labels)
            assert all(tree.parents[c] == vertex.id for c in vertex.children)

    def test_size_limit(self, binary_model):
        with pytest.raises(SizeLimitError):
            TreeBuilder(max_vertices=100).grow_tree(binary_model, 0, 10)

    def test_negative_depth(self, binary_model):
        with pytest.raises(ValueError):
            TreeBuilder().grow_tree(binary_model, 0, -1)

    def test_tree_helpers(self, binary_model):
        tree = TreeBuilder().grow_tree(binary_model, 0, 3)
        assert list(tree.level(1)) == [1, 2]
        assert tree.depth_of(0) == 0
        assert tree.depth_of(6) == 2
        assert tree.is_leaf(14)
        assert tree.path_to_root(7) == [7, 3, 1, 0]
        assert sorted(tree.forward_tree(1)) == [1, 3, 4, 7, 8, 9, 10]
        assert tree.disjoint_forward_trees(1, 2)
        assert not tree.disjoint_forward_trees(1, 7)


class TestCherrySphere:
    def test_binary(self, analyzer, binary_model):
        sphere = analyzer.cherry_sphere(binary_model, 0)
        assert sphere.size == 3
        assert [slot.side for slot in sphere.slots] == [SlotSide.OUTER, SlotSide.INNER, SlotSide.INNER]
        assert sphere.labels.tolist() == [0, 0, 0]

    def test_two_label(self, analyzer, two_label_model):
        sphere = analyzer.cherry_sphere(two_label_model, 0)
        assert sphere.o_prime_label == 0
        assert sphere.outer_labels == [1]
        assert sphere.inner_labels == [0, 1]

    def test_ternary_size(self, analyzer, ternary_model):
        assert analyzer.cherry_sphere(ternary_model, 0).size == 5

    @given(matrices())
    @settings(max_examples=100, deadline=None)
    def test_inner_labels_cover_outer(self, model):
        analyzer = SubstitutionAnalyzer()
        report = analyzer.validate(model)
        if not (report.m0 and report.m1star):
            return
        for k in range(model.alphabet_size):
            sphere = analyzer.cherry_sphere(model, k)
            assert set(sphere.outer_labels) <= set(sphere.inner_labels)
            assert sphere.size == model.row_sums[k] - 1 + model.row_sums[sphere.o_prime_label]


class TestPermutations:
    def test_counts(self, analyzer, binary_model, two_label_model):
        enumerator = PermutationEnumerator()
        assert len(enumerator.enumerate_permutations(analyzer.cherry_sphere(binary_model, 0))) == 6
        assert len(enumerator.enumerate_permutations(analyzer.cherry_sphere(two_label_model, 0))) == 2

    def test_group_structure(self, analyzer, ternary_model):
        sphere = analyzer.cherry_sphere(ternary_model, 0)
        perms = PermutationEnumerator().enumerate_permutations(sphere)
        as_set = {perm.mapping for perm in perms}
        assert len(as_set) == len(perms) == 120
        for perm in perms[:10]:
            assert sorted(perm.mapping) == list(range(sphere.size))
            assert perm.inverse().mapping in as_set
            for other in perms[:10]:
                assert perm.compose(other).mapping in as_set

    def test_labels_preserved(self, analyzer, two_label_model):
        sphere = analyzer.cherry_sphere(two_label_model, 1)
        for perm in PermutationEnumerator().enumerate_permutations(sphere):
            for x in range(sphere.size):
                assert sphere.labels[perm(x)] == sphere.labels[x]

    def test_limit(self, analyzer, ternary_model):
        sphere = analyzer.cherry_sphere(ternary_model, 0)
        with pytest.raises(PermutationLimitError):
            PermutationEnumerator(max_count=100).enumerate_permutations(sphere)


def test_laplacian_model_potential():
    model = laplacian_model([[1, 1], [1, 2]])
    assert model.v_per == (-3.0, -4.0)
    assert model.norm_bound == pytest.approx(3 + 1 + 4)
