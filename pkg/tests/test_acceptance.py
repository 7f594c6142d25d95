"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the summary
lines; the Monte Carlo criteria use fixed seeds, so the whole suite is
deterministic.
"""

import math
import time

import numpy as np
import pytest

from meanzeros import (
    Ball,
    DimensionalConstants,
    Ellipsoid,
    MinkowskiSum,
    Segment,
    ball_volume,
    check_alexandrov_fenchel,
    mixed_volume,
)
from meanzeros.crofton import verify_crofton_product
from meanzeros.harmonics import even_degree_orders
from meanzeros.identities import alesker_identity_residual, haar2_check
from meanzeros.manifolds import Circle, Sphere2, TorusProduct
from meanzeros.measures import Parallelotope, verify_product_identity
from meanzeros.montecarlo import estimate
from meanzeros.predictor import gichev_closed_form, predict, upper_bound
from meanzeros.spaces import eigenspace, linear_space, orthonormalize, space_from_descriptor
from meanzeros.transform import HarmonicGauge, cosine_transform, inverse_cosine_transform


def report(criterion, ok, detail):
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    assert ok, line


def test_criterion_01_torus_exactness():
    start = time.time()
    details = []
    for n in (1, 2, 3):
        manifold = TorusProduct(n)
        spaces = [
            orthonormalize(space_from_descriptor(manifold, "linear", i)) for i in range(n)
        ]
        value = predict(spaces).value
        assert abs(value - 2.0**n) <= 1e-6, (n, value)
        est = estimate(spaces, samples=100, seed=17 + n)
        assert est.mean == 2.0**n and est.stderr == 0.0, (n, est)
        details.append(f"T^{n}: predict {value:.9f}, simulate {est.mean} +- {est.stderr}")
    elapsed = time.time() - start
    report(1, elapsed < 30.0, "; ".join(details) + f"; {elapsed:.1f}s")


def test_criterion_02_sphere_crofton_constant():
    start = time.time()
    circle_value = predict([orthonormalize(linear_space(Circle()))]).value
    assert abs(circle_value - 2.0) <= 1e-9
    s2_space = orthonormalize(linear_space(Sphere2()))
    sphere_value = predict([s2_space, s2_space]).value
    assert abs(sphere_value - 2.0) <= 1e-4
    elapsed = time.time() - start
    report(2, elapsed < 30.0, f"S^1: {circle_value:.12f}, S^2 diagonal: {sphere_value:.9f}; {elapsed:.1f}s")


def test_criterion_03_gichev_cross_check():
    start = time.time()
    s2 = Sphere2()
    details = []
    for l1, l2 in [(1, 1), (1, 2), (2, 2), (3, 3)]:
        lam1, lam2 = l1 * (l1 + 1.0), l2 * (l2 + 1.0)
        spaces = [orthonormalize(eigenspace(s2, lam1)), orthonormalize(eigenspace(s2, lam2))]
        value = predict(spaces).value
        closed = gichev_closed_form([lam1, lam2], 2, 4 * math.pi)
        assert abs(value - closed) / closed <= 1e-5, (l1, l2, value, closed)
        est = estimate(spaces, samples=300, seed=100 + 10 * l1 + l2)
        gap = abs(value - est.mean)
        assert gap <= 3.0 * est.stderr + 1e-9, (l1, l2, value, est.mean, est.stderr)
        details.append(f"({l1},{l2}): {value:.4f} vs {est.mean:.4f}+-{est.stderr:.4f}")
    elapsed = time.time() - start
    report(3, elapsed < 600.0, "; ".join(details) + f"; {elapsed:.0f}s")


def test_criterion_04_mixed_volume_goldens():
    start = time.time()
    for n in (2, 3, 4):
        segs = [Segment(0.5 * np.eye(n)[i]) for i in range(n)]
        got = mixed_volume(segs)
        target = 1.0 / math.factorial(n)
        # exact zonotope path: allow a few ulps from the determinant
        assert abs(got - target) <= 4.0 * np.finfo(float).eps * target, (n, got)
    rng = np.random.default_rng(7)
    for n in (2, 3):
        radii = rng.uniform(0.5, 2.0, size=n)
        got = mixed_volume([Ball(r, n) for r in radii])
        expected = ball_volume(n) * np.prod(radii)
        assert abs(got - expected) <= 1e-9 * expected, (n, got, expected)
    failures = 0
    for n in (2, 3):
        gen = np.random.default_rng(40 + n)
        for _ in range(100):
            bodies = []
            for _ in range(n):
                M = gen.normal(size=(n, n))
                bodies.append(Ellipsoid(M @ M.T + 0.2 * np.eye(n)))
            if not check_alexandrov_fenchel(bodies, tol=1e-6)["holds"]:
                failures += 1
    elapsed = time.time() - start
    report(4, failures == 0 and elapsed < 60.0, f"segments + balls exact, AF failures {failures}/200; {elapsed:.1f}s")


def test_criterion_05_density_product_identity():
    start = time.time()
    square = Parallelotope.unit_cube(2)
    pairs = {
        "disk x disk": [Ball(1.0, 2), Ball(1.0, 2)],
        "ellipse x disk": [Ellipsoid(np.diag([4.0, 1.0])), Ball(1.0, 2)],
        "segment x segment": [Segment([0.5, 0.0]), Segment([0.0, 0.5])],
        "(disk+segment) x disk": [
            MinkowskiSum([(1.0, Ball(1.0, 2)), (1.0, Segment([0.5, 0.0]))]),
            Ball(1.0, 2),
        ],
    }
    details = []
    for name, bodies in pairs.items():
        rep = verify_product_identity(bodies, square, samples=1_000_000, tol=0.02, seed=23)
        assert rep["pass"], (name, rep)
        details.append(f"{name}: dev {rep['deviation']:.4f}")
    elapsed = time.time() - start
    report(5, elapsed < 300.0, "; ".join(details) + f"; {elapsed:.0f}s")


def test_criterion_06_alesker_haar2_residuals():
    start = time.time()
    rng = np.random.default_rng(3)
    worst2 = 0.0
    for _ in range(5):
        M = rng.normal(size=(2, 2))
        body = Ellipsoid(M @ M.T + 0.4 * np.eye(2))
        worst2 = max(worst2, alesker_identity_residual(body, bandwidth=32))
    assert worst2 <= 1e-6
    worst3 = 0.0
    for Q in (np.diag([4.0, 1.0, 1.0]), np.diag([2.0, 1.5, 1.0])):
        worst3 = max(worst3, alesker_identity_residual(Ellipsoid(Q), bandwidth=16))
        worst3 = max(worst3, haar2_check(Ellipsoid(Q), np.eye(3)[:2], bandwidth=16)["residual"])
    assert worst3 <= 1e-3
    elapsed = time.time() - start
    report(6, elapsed < 120.0, f"plane residual {worst2:.2e}, space residual {worst3:.2e}; {elapsed:.1f}s")


def test_criterion_07_crofton_product():
    start = time.time()
    rep1 = verify_crofton_product([2], np.array([[1.0, 0.0]]), samples=1_000_000, tol=0.02, seed=31)
    assert rep1["pass"], rep1
    theta = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
    rep2 = verify_crofton_product([2, 2], theta, samples=1_000_000, tol=0.02, seed=37)
    assert rep2["pass"], rep2
    elapsed = time.time() - start
    report(
        7,
        elapsed < 300.0,
        f"n=1 dev {rep1['deviation']:.4f}, n=2 dev {rep2['deviation']:.4f}; {elapsed:.0f}s",
    )


def test_criterion_08_constants_identity():
    worst = max(
        DimensionalConstants.for_dimension(n).identity_residual() for n in range(1, 7)
    )
    report(8, worst <= 1e-12, f"max residual {worst:.2e} over n=1..6")


def test_criterion_09_transform_round_trip():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(50):
        gauge2 = HarmonicGauge(2, rng.normal(size=(9, 2)))
        back2 = cosine_transform(inverse_cosine_transform(gauge2))
        worst = max(worst, float(np.abs(back2.coeffs - gauge2.coeffs).max()))
        gauge3 = HarmonicGauge(3, rng.normal(size=len(even_degree_orders(8))))
        back3 = inverse_cosine_transform(cosine_transform(gauge3))
        worst = max(worst, float(np.abs(back3.coeffs - gauge3.coeffs).max()))
    report(9, worst <= 1e-10, f"max round-trip error {worst:.2e} over 100 gauges")


def test_criterion_10_upper_bound():
    details = []
    circle = Circle()
    for k in (1, 2, 3):
        lam = float(k * k)
        value = predict([orthonormalize(eigenspace(circle, lam))]).value
        bound = upper_bound(lam, 1, 2 * math.pi)
        assert value <= bound + 1e-9
        assert abs(value - bound) <= 1e-6 * bound, (lam, value, bound)
    details.append("S^1 equality k=1..3")
    s2 = Sphere2()
    for l in (1, 2, 3):
        lam = l * (l + 1.0)
        space = orthonormalize(eigenspace(s2, lam))
        value = predict([space, space]).value
        bound = upper_bound(lam, 2, 4 * math.pi)
        assert value <= bound + 1e-9
        assert abs(value - bound) <= 1e-6 * bound, (lam, value, bound)
    details.append("S^2 equality l=1..3")
    for n, lams in ((2, (1.0, 2.0, 4.0, 5.0)), (3, (1.0, 2.0, 3.0))):
        torus = TorusProduct(n)
        for lam in lams:
            space = orthonormalize(eigenspace(torus, lam))
            value = predict([space] * n).value
            bound = upper_bound(lam, n, (2 * math.pi) ** n)
            assert value <= bound + 1e-9, (n, lam, value, bound)
        details.append(f"T^{n} bounded")
    report(10, True, "; ".join(details))
