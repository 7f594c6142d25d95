import math

import numpy as np
import pytest

from meanzeros.constants import sphere_volume
from meanzeros.crofton import block_volume_measures, omega_mc, verify_crofton_product


class TestOmega:
    def test_curve_density_is_length_over_pi(self):
        # single block T_1 = R^2: a segment of length L meets L/pi hyperplanes
        for length in (1.0, 3.0):
            est, err = omega_mc([2], np.array([[length, 0.0]]), samples=200_000, seed=1)
            assert abs(est - length / math.pi) <= max(3.0 * err, 2e-3 * length)

    def test_curve_density_in_higher_block(self):
        # same constant for a 3-dimensional block (classical Crofton for curves)
        est, err = omega_mc([3], np.array([[0.0, 2.0, 0.0]]), samples=200_000, seed=2)
        assert abs(est - 2.0 / math.pi) <= max(3.0 * err, 2e-3)

    def test_unit_square_two_blocks(self):
        theta = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
        est, err = omega_mc([2, 2], theta, samples=300_000, seed=3)
        assert abs(est - 1.0 / math.pi**2) <= 3.0 * err + 1e-4

    def test_degenerate_parallelotope(self):
        theta = np.array([[1.0, 0.0, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0]])
        est, err = omega_mc([2, 2], theta, samples=2_000, seed=4)
        assert est == 0.0

    def test_classical_sphere_constant_n1(self):
        # omega on curves equals (2 / sigma_1) vol for the circle case
        est, err = omega_mc([2], np.array([[1.0, 0.0]]), samples=200_000, seed=5)
        assert abs(est - 2.0 / sphere_volume(1)) <= 3.0 * err + 1e-3


class TestCroftonProduct:
    def test_block_measures_have_expected_mass(self):
        measures = block_volume_measures([2, 2])
        assert len(measures) == 2
        assert measures[0].mass == pytest.approx(math.pi / 2.0)

    def test_n1_agreement(self):
        report = verify_crofton_product([2], np.array([[1.0, 0.0]]), samples=200_000, tol=0.02, seed=6)
        assert report["pass"], report

    def test_n2_agreement(self):
        theta = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
        report = verify_crofton_product([2, 2], theta, samples=250_000, tol=0.03, seed=7)
        assert report["pass"], report
        assert report["lhs"] == pytest.approx(1.0 / math.pi**2, rel=0.05)

    def test_degenerate_both_sides_zero(self):
        theta = np.array([[1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]])
        report = verify_crofton_product([2, 2], theta, samples=2_000, tol=0.02, seed=8)
        assert report["lhs"] == 0.0
        assert report["rhs"] == 0.0
        assert report["pass"]

    def test_mixed_block_dimensions(self):
        # circle factor times sphere factor: edges in separate blocks
        theta = np.zeros((2, 5))
        theta[0, 0] = 1.0
        theta[1, 2] = 1.0
        report = verify_crofton_product([2, 3], theta, samples=250_000, tol=0.03, seed=9)
        assert report["pass"], report
