"""
Green fonksiyonu servisi testleri: çözücü, sürekleme, bantlar, P matrisi, yeniden köklendirme
"""

import numpy as np
import pytest

from app.errors import DegenerateError, InsufficientDepthError, InvalidZError
from app.models.green import GreenVector
from app.models.substitution import SubstitutionModel
from app.services.greens import (
    BandDetector,
    GreenSolver,
    TransitionBuilder,
    regular_tree_gamma,
    weights_p,
)
from app.services.substitution import SubstitutionAnalyzer, TreeBuilder

FAST_GRID = 0.05


class TestRegularTreeOracle:
    @pytest.mark.parametrize("k", [2, 3, 4])
    @pytest.mark.parametrize("eta", [1.0, 0.1, 0.01])
    def test_matches_closed_form(self, k, eta):
        solver = GreenSolver(tol=1e-14)
        model = SubstitutionModel.from_matrix([[k]])
        bound = 4 * np.sqrt(k)
        for energy in np.linspace(-bound, bound, 100):
            if eta >= 1.0:
                vector = solver.solve_gamma(model, complex(energy, eta))
            else:
                vector = solver.solve_gamma_boundary(model, float(energy), eta)
            expected = regular_tree_gamma(k, complex(energy, eta))
            assert abs(vector[0] - expected) <= 1e-10
            assert vector.imag[0] > 0

    def test_binary_at_i(self, solver, binary_model):
        vector = solver.solve_gamma(binary_model, 1j)
        assert vector[0] == pytest.approx(0.5j, abs=1e-12)
        assert vector.residual <= 1e-12

    def test_binary_near_real_axis(self, solver, binary_model):
        vector = solver.solve_gamma_boundary(binary_model, 0.0, 1e-6)
        assert vector[0] == pytest.approx(1j / np.sqrt(2), abs=1e-5)

    def test_oracle_band_edge(self):
        assert regular_tree_gamma(2, 2 * np.sqrt(2)) == pytest.approx(-1 / np.sqrt(2), abs=1e-6)


class TestSolver:
    def test_rejects_real_z(self, solver, binary_model):
        with pytest.raises(InvalidZError):
            solver.solve_gamma(binary_model, 0.5 + 0j)

    def test_residual_and_herglotz(self, solver):
        model = SubstitutionModel.from_matrix([[1, 2], [1, 1]])
        for z in (0.3 + 1j, -1.2 + 0.3j, 2.5 + 0.2j):
            vector = solver.solve_gamma(model, z)
            assert vector.residual <= solver.tol
            assert np.all(vector.imag > 0)

    def test_continuation_path_stays_in_upper_half_plane(self, solver, two_label_model):
        path = solver.continuation_path(two_label_model, 0.7, 1e-4)
        assert path[0].eta == 1.0
        assert path[-1].eta == pytest.approx(1e-4)
        for previous, current in zip(path, path[1:]):
            assert current.eta < previous.eta
            assert np.all(current.imag > 0)

    def test_symmetric_two_label_equals_binary(self, solver, binary_model, two_label_model):
        z = 0.4 + 0.3j
        binary = solver.solve_gamma(binary_model, z)
        two = solver.solve_gamma(two_label_model, z)
        assert np.allclose(two.values, binary[0], atol=1e-10)

    def test_real_axis_polish(self, solver, binary_model):
        vector = solver.solve_gamma_real(binary_model, 0.5)
        assert vector.eta == 0.0
        assert vector[0] == pytest.approx(regular_tree_gamma(2, 0.5), abs=1e-9)
        assert vector.residual <= 1e-10

    def test_green_table_columns(self, solver, two_label_model):
        df = solver.green_table(two_label_model, [-1.0, 0.0, 1.0], 0.1)
        assert list(df.columns) == ["E", "eta", "re_gamma_a", "im_gamma_a", "re_gamma_b", "im_gamma_b"]
        assert len(df) == 3
        assert (df["im_gamma_a"] > 0).all()


class TestBands:
    def test_binary_band(self, solver, binary_model):
        bands = BandDetector(solver).detect_bands(binary_model, grid_step=FAST_GRID)
        assert len(bands.intervals) == 1
        low, high = bands.intervals[0]
        assert low == pytest.approx(-2 * np.sqrt(2), abs=1e-2)
        assert high == pytest.approx(2 * np.sqrt(2), abs=1e-2)

    def test_ternary_band_symmetric(self, solver, ternary_model):
        bands = BandDetector(solver).detect_bands(ternary_model, grid_step=FAST_GRID)
        (low, high), = bands.intervals
        assert high == pytest.approx(2 * np.sqrt(3), abs=1e-2)
        assert low == pytest.approx(-high, abs=FAST_GRID / 20)

    def test_shifted_band_translates(self, solver, shifted_model):
        bands = BandDetector(solver).detect_bands(shifted_model, grid_step=FAST_GRID)
        (low, high), = bands.intervals
        assert low == pytest.approx(5 - 2 * np.sqrt(2), abs=1e-2)
        assert high == pytest.approx(5 + 2 * np.sqrt(2), abs=1e-2)
        assert bands.contains(5.0)
        assert not bands.contains(0.0)

    def test_threads_give_same_bands(self, solver, binary_model):
        single = BandDetector(solver, threads=1).detect_bands(binary_model, grid_step=0.1)
        multi = BandDetector(solver, threads=4).detect_bands(binary_model, grid_step=0.1)
        assert single.intervals == multi.intervals

    def test_invalid_grid_step(self, solver, binary_model):
        with pytest.raises(ValueError):
            BandDetector(solver).detect_bands(binary_model, grid_step=0.0)

    def test_scan_table(self, solver, binary_model):
        df = BandDetector(solver).scan_table(binary_model, grid_step=0.5)
        assert df["E"].iloc[0] == pytest.approx(-3.0)
        assert df["E"].iloc[-1] == pytest.approx(3.0)
        assert "im_gamma_0" in df.columns

    @pytest.mark.slow
    def test_binary_band_default_grid(self, solver, binary_model):
        bands = BandDetector(solver).detect_bands(binary_model)
        (low, high), = bands.intervals
        assert high == pytest.approx(2 * np.sqrt(2), abs=1e-2)
        assert low == pytest.approx(-2 * np.sqrt(2), abs=1e-2)


class TestTransitionMatrix:
    def test_weights_sum_to_one(self, solver, analyzer):
        model = SubstitutionModel.from_matrix([[1, 2], [1, 1]])
        gamma = solver.solve_gamma(model, 0.2 + 0.5j)
        for k in range(model.alphabet_size):
            p = weights_p(gamma, analyzer.cherry_sphere(model, k))
            assert p.sum() == pytest.approx(1.0, abs=1e-14)
            assert np.all(p > 0)

    def test_single_label(self, solver, binary_model):
        gamma = solver.solve_gamma(binary_model, 0.1 + 0.1j)
        pmatrix = TransitionBuilder().build_p_matrix(binary_model, gamma)
        assert pmatrix.entries.tolist() == [[pytest.approx(1.0)]]
        assert pmatrix.left_eigenvector.tolist() == [pytest.approx(1.0)]

    def test_two_label_stationary_vector(self, solver, two_label_model):
        gamma = solver.solve_gamma(two_label_model, 0.1 + 0.2j)
        pmatrix = TransitionBuilder().build_p_matrix(two_label_model, gamma)
        assert np.allclose(pmatrix.entries, [[0.25, 0.75], [0.25, 0.75]], atol=1e-10)
        assert np.allclose(pmatrix.left_eigenvector, [0.25, 0.75], atol=1e-10)

    def test_stochastic_and_invariant(self, solver):
        model = SubstitutionModel.from_matrix([[1, 2], [1, 1]])
        gamma = solver.solve_gamma(model, -0.5 + 0.3j)
        pmatrix = TransitionBuilder().build_p_matrix(model, gamma)
        assert np.allclose(pmatrix.row_sums, 1.0, atol=1e-13)
        u = pmatrix.left_eigenvector
        assert np.all(u > 0)
        assert u.sum() == pytest.approx(1.0)
        assert np.max(np.abs(pmatrix.entries.T @ u - u)) <= 1e-11

    def test_degenerate_gamma(self, binary_model):
        gamma = GreenVector(z=3.5 + 0j, values=np.array([-0.3 + 0j]))
        with pytest.raises(DegenerateError):
            TransitionBuilder().build_p_matrix(binary_model, gamma)


class TestReroot:
    def _direct_resolvent(self, model, tree, gamma):
        """Yapraklara Γ öz-enerjisi eklenmiş sonlu matrisin tersi"""
        size = tree.size
        matrix = np.zeros((size, size), dtype=complex)
        for x in range(1, size):
            parent = int(tree.parents[x])
            matrix[x, parent] = matrix[parent, x] = 1.0
        for x in range(size):
            label = int(tree.labels[x])
            matrix[x, x] = model.v_per[label]
            if tree.is_leaf(x):
                matrix[x, x] -= model.matrix_array[label] @ gamma.values
        return np.linalg.inv(matrix - gamma.z * np.eye(size))

    def test_root_is_gamma(self, solver, binary_model):
        tree = TreeBuilder().grow_tree(binary_model, 0, 3)
        gamma = solver.solve_gamma(binary_model, 0.3 + 0.4j)
        assert solver.reroot_green(binary_model, tree, 0, gamma) == pytest.approx(gamma[0], abs=1e-12)
        assert solver.full_green_at_root(binary_model, gamma) == gamma[0]

    @pytest.mark.parametrize("x0", [1, 2, 4])
    def test_matches_direct_resolvent(self, solver, x0):
        model = SubstitutionModel.from_matrix([[1, 2], [1, 1]], v_per=[0.3, -0.2])
        tree = TreeBuilder().grow_tree(model, 0, 3)
        gamma = solver.solve_gamma(model, -0.4 + 0.3j)
        resolvent = self._direct_resolvent(model, tree, gamma)
        assert solver.reroot_green(model, tree, x0, gamma) == pytest.approx(resolvent[x0, x0], abs=1e-10)

    def test_leaf_raises(self, solver, binary_model):
        tree = TreeBuilder().grow_tree(binary_model, 0, 2)
        gamma = solver.solve_gamma(binary_model, 1j)
        with pytest.raises(InsufficientDepthError):
            solver.reroot_green(binary_model, tree, tree.size - 1, gamma)


def test_analyzer_shared_by_transition_builder(two_label_model):
    builder = TransitionBuilder(SubstitutionAnalyzer())
    gamma = GreenSolver().solve_gamma(two_label_model, 1j)
    assert builder.build_p_matrix(two_label_model, gamma).entries.shape == (2, 2)
