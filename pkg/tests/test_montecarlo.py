import math

import numpy as np
import pytest
from scipy import stats

from meanzeros.errors import UnreliableOracleError
from meanzeros.manifolds import Circle, Sphere2, TorusProduct
from meanzeros.montecarlo import (
    PairCounter,
    ZeroCountEstimate,
    count_zeros_1d,
    estimate,
    per_sample_counts,
    sample_unit,
)
from meanzeros.predictor import predict
from meanzeros.spaces import (
    custom_torus_space,
    eigenspace,
    linear_space,
    orthonormalize,
    space_from_descriptor,
)


class TestSampleUnit:
    def test_unit_norm(self):
        space = orthonormalize(eigenspace(Circle(), 4.0))
        rng = np.random.default_rng(0)
        for _ in range(100):
            assert np.linalg.norm(sample_unit(space, rng)) == pytest.approx(1.0, abs=1e-12)

    def test_angle_distribution_uniform(self):
        space = orthonormalize(eigenspace(Circle(), 1.0))
        rng = np.random.default_rng(1)
        angles = []
        for _ in range(10_000):
            c = sample_unit(space, rng)
            angles.append(math.atan2(c[1], c[0]) % (2 * math.pi))
        result = stats.kstest(np.array(angles) / (2 * math.pi), "uniform")
        assert result.pvalue > 0.01

    def test_fixed_seed_reproduces_draw(self):
        space = orthonormalize(eigenspace(Circle(), 4.0))
        a = sample_unit(space, np.random.default_rng(42))
        b = sample_unit(space, np.random.default_rng(42))
        assert np.array_equal(a, b)


class TestCountZeros1d:
    @pytest.mark.parametrize("k", [1, 2, 5])
    def test_pure_cosine(self, k):
        count, suspect = count_zeros_1d(lambda t: np.cos(k * t))
        assert count == 2 * k and not suspect

    def test_single_frequency_always_2k(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            a, b = rng.normal(size=2)
            if math.hypot(a, b) < 1e-6:
                continue
            count, suspect = count_zeros_1d(lambda t: a * np.cos(3 * t) + b * np.sin(3 * t))
            assert count == 6 and not suspect

    def test_constant_has_no_zeros(self):
        count, suspect = count_zeros_1d(lambda t: np.ones_like(t))
        assert count == 0 and not suspect

    def test_tangential_zero_flagged(self):
        count, suspect = count_zeros_1d(lambda t: np.cos(t) ** 2)
        assert suspect


class TestCountZeros2d:
    def test_two_great_circles(self):
        s2 = Sphere2()
        space = orthonormalize(eigenspace(s2, 2.0))
        counter = PairCounter(space, space)
        c_z = np.array([0.0, 1.0, 0.0])  # the harmonic proportional to z
        c_x = np.array([0.0, 0.0, 1.0])
        count, suspect = counter.count_pair(c_z, c_x)
        assert count == 2 and not suspect

    def test_identical_functions_suspect(self):
        s2 = Sphere2()
        space = orthonormalize(eigenspace(s2, 2.0))
        counter = PairCounter(space, space)
        c = np.array([0.3, -0.5, 0.81])
        c /= np.linalg.norm(c)
        count, suspect = counter.count_pair(c, c)
        assert suspect

    def test_torus_product_functions(self):
        t2 = TorusProduct(2)
        sp1 = orthonormalize(custom_torus_space(t2, [[1, 0]]))
        sp2 = orthonormalize(custom_torus_space(t2, [[0, 1]]))
        counter = PairCounter(sp1, sp2, grid=(64, 64))
        rng = np.random.default_rng(5)
        c1 = sample_unit(sp1, rng)
        c2 = sample_unit(sp2, rng)
        count, suspect = counter.count_pair(c1, c2)
        assert count == 4 and not suspect

    def test_torus_generic_pair(self):
        t2 = TorusProduct(2)
        space = orthonormalize(eigenspace(t2, 1.0))
        counter = PairCounter(space, space, grid=(64, 64))
        rng = np.random.default_rng(11)
        counts = []
        for _ in range(10):
            count, suspect = counter.count_pair(sample_unit(space, rng), sample_unit(space, rng))
            if not suspect:
                counts.append(count)
        assert counts and all(c % 2 == 0 for c in counts)


class TestEstimate:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_torus_linear_exact(self, n):
        manifold = TorusProduct(n)
        spaces = [orthonormalize(space_from_descriptor(manifold, "linear", i)) for i in range(n)]
        est = estimate(spaces, samples=40, seed=9)
        assert est.mean == 2.0**n
        assert est.stderr == 0.0
        assert est.histogram == {2**n: 40}
        assert est.suspect_samples == 0

    def test_circle_single_frequency_constant(self):
        space = orthonormalize(eigenspace(Circle(), 4.0))
        est = estimate([space], samples=60, seed=2)
        assert est.mean == 4.0
        assert est.stderr == 0.0

    def test_sphere_agrees_with_prediction(self):
        s2 = Sphere2()
        space = orthonormalize(eigenspace(s2, 6.0))
        est = estimate([space, space], samples=80, seed=21)
        predicted = predict([space, space]).value
        assert abs(predicted - est.mean) <= 3.0 * est.stderr

    def test_deterministic_per_sample_streams(self):
        space = orthonormalize(eigenspace(Circle(), 4.0))
        runs = [list(per_sample_counts([space], 10, seed=5)) for _ in range(2)]
        assert runs[0] == runs[1]

    def test_sign_flip_invariance(self):
        # zero sets of f and -f coincide: counts must match exactly
        s2 = Sphere2()
        space = orthonormalize(eigenspace(s2, 6.0))
        counter = PairCounter(space, space)
        rng = np.random.default_rng(17)
        for _ in range(5):
            c1, c2 = sample_unit(space, rng), sample_unit(space, rng)
            base = counter.count_pair(c1, c2)
            assert counter.count_pair(-c1, c2) == base
            assert counter.count_pair(c1, -c2) == base

    def test_unreliable_oracle_aborts(self):
        t2 = TorusProduct(2)
        space = orthonormalize(eigenspace(t2, 1.0))

        class AlwaysSuspect(PairCounter):
            def count_pair(self, c1, c2):
                return 0, True

        import meanzeros.montecarlo as mc

        original = mc.PairCounter
        mc.PairCounter = AlwaysSuspect
        try:
            with pytest.raises(UnreliableOracleError):
                estimate([space, space], samples=20, seed=1)
        finally:
            mc.PairCounter = original

    def test_estimate_report_round_trip(self):
        est = ZeroCountEstimate(
            samples=10, mean=4.0, stderr=0.0, seed=3, histogram={4: 10}, suspect_samples=0
        )
        data = est.to_dict()
        assert data["histogram"] == {"4": 10}
        assert est.suspect_rate == 0.0
