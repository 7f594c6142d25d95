import math

import numpy as np
import pytest

from meanzeros.errors import BadEigenvalueError, DimensionMismatchError
from meanzeros.manifolds import Circle, Sphere2, TorusProduct
from meanzeros.predictor import gichev_closed_form, hodge_report, predict, upper_bound
from meanzeros.spaces import (
    custom_torus_space,
    eigenspace,
    linear_space,
    orthonormalize,
    space_from_descriptor,
)


def torus_linear_spaces(n):
    manifold = TorusProduct(n)
    return [orthonormalize(space_from_descriptor(manifold, "linear", i)) for i in range(n)]


class TestPredict:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_torus_linear(self, n):
        prediction = predict(torus_linear_spaces(n))
        assert prediction.value == pytest.approx(2.0**n, rel=1e-9)

    def test_circle_linear(self):
        space = orthonormalize(linear_space(Circle()))
        assert predict([space]).value == pytest.approx(2.0, abs=1e-9)

    def test_sphere_diagonal_linear(self):
        space = orthonormalize(linear_space(Sphere2()))
        assert predict([space, space]).value == pytest.approx(2.0, abs=1e-4)

    @pytest.mark.parametrize("l1,l2", [(1, 1), (1, 2), (2, 2), (3, 3)])
    def test_sphere_eigenspaces_match_closed_form(self, l1, l2):
        s2 = Sphere2()
        lam1, lam2 = l1 * (l1 + 1.0), l2 * (l2 + 1.0)
        spaces = [orthonormalize(eigenspace(s2, lam1)), orthonormalize(eigenspace(s2, lam2))]
        value = predict(spaces).value
        assert value == pytest.approx(math.sqrt(lam1 * lam2), rel=1e-9)
        assert value == pytest.approx(gichev_closed_form([lam1, lam2], 2, 4 * math.pi), rel=1e-9)

    def test_space_count_enforced(self):
        space = orthonormalize(linear_space(Circle()))
        with pytest.raises(DimensionMismatchError):
            predict([space, space])

    def test_scaling_invariance(self):
        # rescaling the scalar product leaves theta and the count unchanged
        circle = Circle()
        space = orthonormalize(eigenspace(circle, 4.0))
        scaled = space.__class__(
            manifold=space.manifold,
            basis=space.basis,
            label=space.label,
            coeff_matrix=3.7 * space.coeff_matrix,
            factor=space.factor,
            max_frequency=space.max_frequency,
            eigenvalue=space.eigenvalue,
        )
        assert predict([scaled]).value == pytest.approx(predict([space]).value, rel=1e-10)

    def test_quadrature_refinement_stable(self):
        s2 = Sphere2()
        spaces = [orthonormalize(eigenspace(s2, 6.0))] * 2
        base = predict(spaces).value
        refined = predict(spaces, refine=2).value
        assert abs(refined - base) / base < 1e-6

    def test_mixed_custom_spaces_on_torus(self):
        # one space per slot, irrational mixture: still a zonotope density
        t2 = TorusProduct(2)
        spaces = [
            orthonormalize(custom_torus_space(t2, [[1, 0]])),
            orthonormalize(custom_torus_space(t2, [[1, 1]])),
        ]
        # E_1 = segment [-e_1, e_1], E_2 = segment [-(1,1), (1,1)]:
        # V_2 = 2 |det| = 2, so the count is 2!/(2 pi)^2 * 2 * vol(T^2) = 4
        value = predict(spaces).value
        assert value == pytest.approx(4.0, rel=1e-9)


class TestClosedForms:
    def test_gichev_circle(self):
        assert gichev_closed_form([4.0], 1, 2 * math.pi) == pytest.approx(4.0)

    def test_gichev_sphere_pairs(self):
        assert gichev_closed_form([6.0, 6.0], 2, 4 * math.pi) == pytest.approx(6.0)
        assert gichev_closed_form([2.0, 6.0], 2, 4 * math.pi) == pytest.approx(math.sqrt(12.0))

    def test_gichev_rejects_bad_eigenvalue(self):
        with pytest.raises(BadEigenvalueError):
            gichev_closed_form([0.0, 1.0], 2, 4 * math.pi)

    def test_upper_bound_equals_gichev_for_equal_eigenvalues(self):
        for lam, n, vol in [(6.0, 2, 4 * math.pi), (9.0, 1, 2 * math.pi)]:
            assert upper_bound(lam, n, vol) == pytest.approx(
                gichev_closed_form([lam] * n, n, vol)
            )

    def test_upper_bound_values(self):
        assert upper_bound(6.0, 2, 4 * math.pi) == pytest.approx(6.0)
        assert upper_bound(9.0, 1, 2 * math.pi) == pytest.approx(6.0)

    @pytest.mark.parametrize("lam", [1.0, 2.0, 4.0, 5.0])
    def test_torus_prediction_below_bound(self, lam):
        t2 = TorusProduct(2)
        try:
            space = orthonormalize(eigenspace(t2, lam))
        except BadEigenvalueError:
            pytest.skip("not a torus eigenvalue")
        value = predict([space, space]).value
        assert value <= upper_bound(lam, 2, (2 * math.pi) ** 2) + 1e-9


class TestHodge:
    def test_sphere_isotropy_equality(self):
        s2 = Sphere2()
        spaces = [orthonormalize(eigenspace(s2, 2.0)), orthonormalize(eigenspace(s2, 6.0))]
        report = hodge_report(spaces)
        assert report["invariant"] and report["isotropy_irreducible"]
        assert report["pass"]
        assert report["equality"]["pairwise"] <= 1e-6

    def test_torus_segments_strict_inequality(self):
        report = hodge_report(torus_linear_spaces(2))
        assert report["invariant"]
        assert report["pairwise"]["holds"]
        assert report["pairwise"]["rhs"] == pytest.approx(0.0)
        assert report["n_fold"]["holds"]
        assert report["pass"]

    def test_identical_spaces_equality(self):
        t2 = TorusProduct(2)
        space = orthonormalize(eigenspace(t2, 1.0))
        report = hodge_report([space, space])
        assert report["pairwise"]["lhs"] == pytest.approx(report["pairwise"]["rhs"], rel=1e-12)

    def test_non_invariant_flagged(self):
        # cosine-only span is not translation invariant: G varies with x
        from meanzeros.spaces import ConstantFunction, FunctionSpace, TorusTrig

        t2 = TorusProduct(2)
        lopsided = FunctionSpace(
            t2,
            (
                TorusTrig([1, 0], "cos"),
                TorusTrig([0, 1], "cos"),
                ConstantFunction(1.0, t2.ambient_dim),
            ),
            label="cos-only",
        )
        spaces = [
            orthonormalize(lopsided),
            orthonormalize(custom_torus_space(t2, [[0, 1]])),
        ]
        report = hodge_report(spaces)
        assert report["flag"] == "not-invariant"
