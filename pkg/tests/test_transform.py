import math

import numpy as np
import pytest

from meanzeros import Ball, Ellipsoid
from meanzeros.errors import NotEvenError, NotInRangeError
from meanzeros.harmonics import (
    even_degree_orders,
    project_circle_even,
    sph_harm_matrix,
    sphere_quadrature,
)
from meanzeros.transform import (
    HarmonicGauge,
    circle_multiplier,
    cosine_transform,
    inverse_cosine_transform,
    sphere_multiplier,
)

# frozen oracle values: (1/2pi) integral of |cos t| cos(2mt) over the circle,
# computed by piecewise Gauss-Legendre quadrature before the build
C0_DIM2 = 2.0 / math.pi
C2_DIM2 = 2.0 / (3.0 * math.pi)
C4_DIM2 = -2.0 / (15.0 * math.pi)


class TestMultipliers:
    def test_dim2_constants(self):
        assert circle_multiplier(0) == pytest.approx(C0_DIM2, abs=1e-13)
        assert circle_multiplier(2) == pytest.approx(C2_DIM2, abs=1e-13)
        assert circle_multiplier(4) == pytest.approx(C4_DIM2, abs=1e-13)

    def test_dim3_constants(self):
        assert sphere_multiplier(0) == pytest.approx(0.5, abs=1e-13)
        assert sphere_multiplier(2) == pytest.approx(1.0 / 8.0, abs=1e-13)
        assert sphere_multiplier(4) == pytest.approx(-1.0 / 48.0, abs=1e-13)

    def test_odd_frequency_rejected(self):
        with pytest.raises(NotEvenError):
            circle_multiplier(3)
        with pytest.raises(NotEvenError):
            sphere_multiplier(5)


class TestCosineTransform:
    def test_plane_constant_maps_half_pi_to_one(self):
        out = cosine_transform(HarmonicGauge.constant(2, math.pi / 2.0))
        u = np.array([[math.cos(0.3), math.sin(0.3)]])
        assert out.evaluate(u)[0] == pytest.approx(1.0, abs=1e-12)

    def test_sphere_constant_maps_two_to_one(self):
        out = cosine_transform(HarmonicGauge.constant(3, 2.0))
        u = np.array([[0.0, 0.6, 0.8]])
        assert out.evaluate(u)[0] == pytest.approx(1.0, abs=1e-12)

    def test_cos2theta_multiplier(self):
        gauge = HarmonicGauge(2, [[0.0, 0.0], [1.0, 0.0]])  # cos(2 theta)
        out = cosine_transform(gauge)
        theta = np.linspace(0.0, 2 * np.pi, 9)
        u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        assert np.allclose(out.evaluate(u), C2_DIM2 * np.cos(2 * theta), atol=1e-12)


class TestInverse:
    def test_plane_constant(self):
        out = inverse_cosine_transform(HarmonicGauge.constant(2, 1.0))
        u = np.array([[1.0, 0.0]])
        assert out.evaluate(u)[0] == pytest.approx(math.pi / 2.0, abs=1e-12)

    def test_disk_width_preimage(self):
        disk = Ball(1.0, 2)
        width = HarmonicGauge.from_function(2, lambda U: 2.0 * disk.support_many(U), 16)
        out = inverse_cosine_transform(width)
        u = np.array([[0.0, 1.0]])
        assert out.evaluate(u)[0] == pytest.approx(math.pi, abs=1e-10)

    @pytest.mark.parametrize("dim,bandwidth", [(2, 8), (3, 8)])
    def test_round_trip_random(self, dim, bandwidth):
        rng = np.random.default_rng(dim)
        for _ in range(50):
            if dim == 2:
                gauge = HarmonicGauge(2, rng.normal(size=(bandwidth // 2 + 1, 2)))
            else:
                gauge = HarmonicGauge(3, rng.normal(size=len(even_degree_orders(bandwidth))))
            back = cosine_transform(inverse_cosine_transform(gauge))
            assert np.abs(back.coeffs - gauge.coeffs).max() <= 1e-10
            forth = inverse_cosine_transform(cosine_transform(gauge))
            assert np.abs(forth.coeffs - gauge.coeffs).max() <= 1e-10


class TestRepresentation:
    def test_dense_circle_rejects_odd(self):
        with pytest.raises(NotEvenError):
            HarmonicGauge.from_dense_circle([[1, 0.5, 0.0]])

    def test_dense_circle_accepts_even(self):
        gauge = HarmonicGauge.from_dense_circle([[0, 1.0, 0.0], [4, 0.25, -0.5]])
        assert gauge.bandwidth == 4

    def test_expansion_matches_width(self):
        body = Ellipsoid(np.diag([4.0, 1.0]))
        gauge = HarmonicGauge.from_function(2, lambda U: 2.0 * body.support_many(U), 32)
        theta = np.linspace(0.0, np.pi, 13)
        U = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        assert np.abs(gauge.evaluate(U) - 2.0 * body.support_many(U)).max() <= 1e-9

    def test_sphere_expansion_matches_width(self):
        body = Ellipsoid(np.diag([4.0, 1.0, 1.0]))
        gauge = HarmonicGauge.from_function(3, lambda U: 2.0 * body.support_many(U), 16)
        rng = np.random.default_rng(5)
        U = rng.normal(size=(40, 3))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        assert np.abs(gauge.evaluate(U) - 2.0 * body.support_many(U)).max() <= 1e-4

    def test_evenness_enforced_by_representation(self):
        rng = np.random.default_rng(3)
        gauge = HarmonicGauge(2, rng.normal(size=(5, 2)))
        theta = rng.uniform(0.0, 2 * np.pi, 17)
        U = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        assert np.allclose(gauge.evaluate(U), gauge.evaluate(-U), atol=1e-14)

    def test_sphere_harmonics_orthonormal(self):
        U, W = sphere_quadrature(48, 96)
        Y = sph_harm_matrix(even_degree_orders(8), U)
        gram = (Y * W[:, None]).T @ Y
        assert np.abs(gram - np.eye(gram.shape[0])).max() <= 1e-10

    def test_project_circle_even_recovers_coefficients(self):
        coeffs = np.array([[0.3, 0.0], [0.2, -0.7], [0.0, 0.1]])
        fn = lambda t: (
            0.3 + 0.2 * np.cos(2 * t) - 0.7 * np.sin(2 * t) + 0.1 * np.sin(4 * t)
        )
        got = project_circle_even(fn, 4)
        assert np.abs(got - coeffs).max() <= 1e-12
