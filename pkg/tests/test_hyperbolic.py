"""
Hiperbolik yarı metrik ve skaler eşitsizlik testleri
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.errors import DegenerateError, OutOfRangeError
from app.models.green import GreenVector
from app.services.greens import GreenSolver
from app.models.substitution import SubstitutionModel
from app.services.hyperbolic import (
    alq_delta,
    c0_bound,
    c_delta,
    eps1,
    eta1_inverse,
    euclidean_from_gamma,
    gamma,
    hyperbolic_distance,
    invisible_im_bound,
    jensen_delta,
    split_power_bound,
)

N_SAMPLES = 100_000


def _upper(rng, n, scale=3.0):
    """Üst yarı düzlemde log-dağılımlı örnekler"""
    return rng.uniform(-scale, scale, n) + 1j * np.exp(rng.uniform(-4, 2, n))


class TestGamma:
    def test_known_values(self):
        assert gamma(1j, 1j) == 0
        assert gamma(2j, 1j) == pytest.approx(0.5)
        assert gamma(1 + 1j, 1j) == pytest.approx(1.0)

    def test_distance_known_values(self):
        assert hyperbolic_distance(1j, 1j) == 0
        assert hyperbolic_distance(2j, 1j) == pytest.approx(np.log(2))

    def test_symmetric_and_vectorized(self):
        rng = np.random.default_rng(0)
        g, h = _upper(rng, 1000), _upper(rng, 1000)
        assert np.allclose(gamma(g, h), gamma(h, g))
        assert gamma(g, h).shape == (1000,)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(1)
        x, y, z = (_upper(rng, 10_000) for _ in range(3))
        lhs = hyperbolic_distance(x, z)
        rhs = hyperbolic_distance(x, y) + hyperbolic_distance(y, z)
        assert np.all(lhs <= rhs + 1e-9 * (1 + rhs))


class TestC0:
    def test_known_values(self):
        assert c0_bound(0.0, 0.7, 0.3, 0.2 + 1j) == 0
        assert c0_bound(0.1, 0.0, 0.0, 1j) == 0
        assert c0_bound(0.1, 0.5, 0.5, 1j) == pytest.approx(0.7745)

    def test_guarantee_at_known_point(self):
        rng = np.random.default_rng(2)
        h = 1j
        c0 = c0_bound(0.1, 0.5, 0.5, h)
        g = _upper(rng, N_SAMPLES)
        lhs = gamma((1 + 0.05) * g + 0.05, h)
        rhs = (1 + c0) * gamma(g, h) + c0
        assert np.all(lhs <= rhs * (1 + 1e-12))

    def test_guarantee_random(self):
        rng = np.random.default_rng(3)
        lam = rng.uniform(0, 0.5, N_SAMPLES)
        a = rng.uniform(-1, 1, N_SAMPLES)
        b = rng.uniform(-1, 1, N_SAMPLES)
        g, h = _upper(rng, N_SAMPLES), _upper(rng, N_SAMPLES)
        c0 = c0_bound(lam, a, b, h)
        lhs = gamma((1 + lam * a) * g + lam * b, h)
        rhs = (1 + c0) * gamma(g, h) + c0
        assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-12)


class TestJensen:
    def test_known_values(self):
        assert jensen_delta(2.0, 0.5, 0.0) == pytest.approx(0.25)
        assert jensen_delta(1.0, 0.3, 0.2) == 0
        assert jensen_delta(1.5, 0.0, 0.2) == 0
        assert jensen_delta(3.0, 1.0, 0.2) == 0

    @given(
        st.floats(1.0, 6.0),
        st.floats(0.0, 1.0),
        st.floats(1e-3, 1e3),
        st.floats(0.0, 1.0),
    )
    @settings(max_examples=500, deadline=None)
    def test_improved_jensen(self, p, lam, r, ratio):
        s = ratio * r
        delta = jensen_delta(p, lam, ratio)
        lhs = (lam * r + (1 - lam) * s) ** p
        rhs = (1 - delta) * (lam * r**p + (1 - lam) * s**p)
        assert lhs <= rhs * (1 + 1e-10) + 1e-300


class TestSplitPower:
    @given(st.floats(0.0, 1e3), st.floats(0.0, 1e3), st.floats(1.0, 5.0))
    @settings(max_examples=500, deadline=None)
    def test_bound(self, r, s, p):
        lhs, rhs = split_power_bound(r, s, p)
        assert lhs <= rhs * (1 + 1e-12)

    def test_vectorized(self):
        lhs, rhs = split_power_bound(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 2.0)
        assert lhs.tolist() == [0.0, 4.0]
        assert rhs.tolist() == [0.0, 6.0]


class TestMoebiusAndEuclid:
    def test_moebius_contraction(self):
        rng = np.random.default_rng(4)
        xi, zeta = _upper(rng, N_SAMPLES), _upper(rng, N_SAMPLES)
        z = rng.uniform(-3, 3, N_SAMPLES) + 1j * rng.uniform(0, 1, N_SAMPLES)
        lhs = gamma(-1 / (z + xi), -1 / (z + zeta))
        rhs = gamma(xi, zeta)
        assert np.all(lhs <= rhs * (1 + 1e-9) + 1e-12)

    def test_euclidean_bound(self):
        rng = np.random.default_rng(5)
        xi, zeta = _upper(rng, N_SAMPLES, 10.0), _upper(rng, N_SAMPLES, 10.0)
        assert np.all(np.abs(xi) <= euclidean_from_gamma(xi, zeta) * (1 + 1e-12))


class TestEps1:
    def test_constant_samples(self):
        assert eps1([0.3 + 0.25j, -0.1 + 0.25j]) == pytest.approx(0.25)

    def test_single_green_vector(self):
        vector = GreenVector(z=1j, values=np.array([0.5j, 0.1 + 0.3j]))
        assert eps1([vector]) == pytest.approx(0.3)

    def test_minimum_over_continuation_paths(self):
        solver = GreenSolver()
        model = SubstitutionModel.from_matrix([[2]])
        samples = []
        for energy in np.linspace(-1, 1, 11):
            samples.extend(solver.continuation_path(model, float(energy), 1e-4))
        expected = min(v.imag[0] for v in samples)
        assert eps1(samples) == pytest.approx(expected)
        assert eps1(samples) > 0

    def test_degenerate(self):
        with pytest.raises(DegenerateError):
            eps1([])
        with pytest.raises(DegenerateError):
            eps1([0.2 + 0j])


class TestEta1Inverse:
    def test_known_values(self):
        assert eta1_inverse(0.0, 0.4) == 0
        assert eta1_inverse(0.2, 0.4) == pytest.approx(0.5)
        assert eta1_inverse(0.4 * (1 - 1e-7), 0.4) > 1e6

    def test_out_of_range(self):
        with pytest.raises(OutOfRangeError):
            eta1_inverse(0.4, 0.4)
        with pytest.raises(OutOfRangeError):
            eta1_inverse(-0.1, 0.4)


class TestMargins:
    def test_invisible_bound_is_below_one(self):
        assert invisible_im_bound(1.0, 1.0, 1.0) == pytest.approx(1.0)
        assert invisible_im_bound(0.5, 0.5, 0.1) < 1.0

    def test_margins(self):
        assert alq_delta(0.5, 0.2, 2) == pytest.approx(0.05)
        assert c_delta(0.5, 0.2, 2.0) == pytest.approx(0.15)
