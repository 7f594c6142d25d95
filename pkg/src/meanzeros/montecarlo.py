"""Empirical oracle: draw unit-norm functions and count their common zeros.

Samples are uniform on the unit sphere of each function space.  Zero
counting is exact up to the reliability checks: 1d counts come from sign
changes on a periodic grid refined by bisection; 2d counts seed Newton
iterations from every grid cell in which both functions change sign,
deduplicate and validate the converged roots, and recount on a doubled
grid.  Samples whose recount disagrees, or with a root failing the
transversality check, are flagged suspect and excluded from the mean
(their rate is reported, and an excessive rate aborts the run).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnreliableOracleError
from .manifolds import Circle, ProductManifold, Sphere2
from .spaces import FunctionSpace

_ROOT_TOL = 1e-10
_DEDUP_TOL = 1e-6
_COND_LIMIT = 1e8


@dataclass(frozen=True)
class ZeroCountEstimate:
    samples: int
    mean: float
    stderr: float
    seed: int
    histogram: dict
    suspect_samples: int

    @property
    def suspect_rate(self) -> float:
        return self.suspect_samples / self.samples if self.samples else 0.0

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "mean": self.mean,
            "stderr": self.stderr,
            "seed": self.seed,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "suspect_samples": self.suspect_samples,
        }


def sample_unit(space: FunctionSpace, rng) -> np.ndarray:
    """A uniform point on the unit sphere of the space (coefficient vector)."""
    c = rng.normal(size=space.size)
    return c / np.linalg.norm(c)


def count_zeros_1d(f, grid_size: int = 4096):
    """Sign-change roots of a smooth function on the circle.

    ``f`` maps an angle array to values.  Returns ``(count, suspect)``;
    tangential near-zeros (local minima of |f| below 1e-9 without a sign
    change) flag the sample suspect instead of failing.
    """
    theta = np.arange(grid_size + 1) * 2.0 * np.pi / grid_size
    v = f(theta)
    left, right = v[:-1], v[1:]
    bracket = left * right < 0.0
    lo = theta[:-1][bracket]
    hi = theta[1:][bracket]
    flo = left[bracket]
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        go_left = flo * fm <= 0.0
        hi = np.where(go_left, mid, hi)
        lo = np.where(go_left, lo, mid)
        flo = np.where(go_left, flo, fm)
        if np.all(hi - lo < 1e-12):
            break
    count = int(bracket.sum()) + int(np.count_nonzero(v[:-1] == 0.0))
    interior = v[1:-1]
    minima = (np.abs(interior) < 1e-9) & (
        np.abs(interior) <= np.abs(v[:-2])
    ) & (np.abs(interior) <= np.abs(v[2:]))
    tangential = minima & ~(bracket[:-1] | bracket[1:])
    return count, bool(np.any(tangential))


def _mixed_cells(V):
    """Cells of a corner grid where the function changes sign."""
    c00, c01 = V[:-1, :-1], V[:-1, 1:]
    c10, c11 = V[1:, :-1], V[1:, 1:]
    vmin = np.minimum(np.minimum(c00, c01), np.minimum(c10, c11))
    vmax = np.maximum(np.maximum(c00, c01), np.maximum(c10, c11))
    return (vmin <= 0.0) & (vmax >= 0.0)


class PairCounter:
    """Counts common zeros of coefficient pairs on a torus or the sphere.

    Basis values on the seed grids are precomputed once, so a counting
    call only costs two matrix-vector products plus the Newton polishing.
    """

    def __init__(self, space1: FunctionSpace, space2: FunctionSpace, grid=None, max_newton_iters: int = 30):
        manifold = space1.manifold
        self.space1, self.space2 = space1, space2
        self.manifold = manifold
        self.max_newton_iters = max_newton_iters
        self.spherical = isinstance(manifold, Sphere2)
        if self.spherical:
            base = grid or (192, 384)
        else:
            base = grid or (256, 256)
        needed = int(8 * max(space1.max_frequency, space2.max_frequency, 1.0))
        base = (max(base[0], needed), max(base[1], needed))
        self.grids = [base, (2 * base[0], 2 * base[1])]
        self._cache = [self._build_grid(g) for g in self.grids]

    def _build_grid(self, grid):
        n1, n2 = grid
        if self.spherical:
            a = np.linspace(0.0, np.pi, n1 + 1)
        else:
            a = np.arange(n1 + 1) * 2.0 * np.pi / n1
        b = np.arange(n2 + 1) * 2.0 * np.pi / n2
        A, B = np.meshgrid(a, b, indexing="ij")
        coords = np.stack([A.ravel(), B.ravel()], axis=1)
        points = self.manifold.embed(coords)
        return {
            "shape": (n1 + 1, n2 + 1),
            "coords": coords,
            "B1": self.space1.values(points),
            "B2": self.space2.values(points),
            "cells": (a, b),
        }

    def _newton_torus(self, seeds, c1, c2):
        x = seeds.copy()
        alive = np.ones(len(x), dtype=bool)
        for _ in range(self.max_newton_iters):
            points = self.manifold.embed(x)
            f = np.stack(
                [self.space1.evaluate(c1, points), self.space2.evaluate(c2, points)], axis=1
            )
            frames = self.manifold.frames(x)
            J = np.stack(
                [
                    np.einsum("m,kmN,kaN->ka", c1, self.space1.gradients(points), frames),
                    np.einsum("m,kmN,kaN->ka", c2, self.space2.gradients(points), frames),
                ],
                axis=1,
            )
            det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
            ok = np.abs(det) > 1e-300
            step = np.zeros_like(x)
            step[ok, 0] = (f[ok, 0] * J[ok, 1, 1] - f[ok, 1] * J[ok, 0, 1]) / det[ok]
            step[ok, 1] = (f[ok, 1] * J[ok, 0, 0] - f[ok, 0] * J[ok, 1, 0]) / det[ok]
            alive &= ok & (np.linalg.norm(step, axis=1) < 1.0)
            x[alive] -= step[alive]
            x %= 2.0 * np.pi
        return x, alive

    def _newton_sphere(self, seeds, c1, c2):
        x = self.manifold.embed(seeds)
        alive = np.ones(len(x), dtype=bool)
        for _ in range(self.max_newton_iters):
            f1 = self.space1.evaluate(c1, x)
            f2 = self.space2.evaluate(c2, x)
            g1 = np.einsum("m,kmN->kN", c1, self.space1.gradients(x))
            g2 = np.einsum("m,kmN->kN", c2, self.space2.gradients(x))
            A = np.stack([g1, g2, x], axis=1)
            rhs = np.stack([-f1, -f2, np.zeros_like(f1)], axis=1)
            det_ok = np.abs(np.linalg.det(A)) > 1e-300
            step = np.zeros_like(x)
            if det_ok.any():
                step[det_ok] = np.linalg.solve(A[det_ok], rhs[det_ok][..., None])[..., 0]
            alive &= det_ok & (np.linalg.norm(step, axis=1) < 1.0)
            x[alive] += step[alive]
            x /= np.linalg.norm(x, axis=1, keepdims=True)
        return x, alive

    def _dedup(self, roots):
        kept = []
        for r in roots:
            dup = False
            for q in kept:
                if self.spherical:
                    if np.linalg.norm(r - q) < _DEDUP_TOL:
                        dup = True
                        break
                else:
                    d = np.abs(r - q)
                    d = np.minimum(d, 2.0 * np.pi - d)
                    if np.linalg.norm(d) < _DEDUP_TOL:
                        dup = True
                        break
            if not dup:
                kept.append(r)
        return kept

    def _residuals(self, roots, c1, c2):
        points = roots if self.spherical else self.manifold.embed(roots)
        f1 = self.space1.evaluate(c1, points)
        f2 = self.space2.evaluate(c2, points)
        return np.maximum(np.abs(f1), np.abs(f2))

    def _transversal(self, root, c1, c2):
        """Condition check of the tangent-frame Jacobian at a root."""
        if self.spherical:
            point = root[None, :] / np.linalg.norm(root)
            ref = np.array([0.0, 0.0, 1.0]) if abs(point[0, 2]) < 0.9 else np.array([1.0, 0.0, 0.0])
            t1 = np.cross(point[0], ref)
            t1 /= np.linalg.norm(t1)
            frame = np.stack([t1, np.cross(point[0], t1)])
        else:
            point = self.manifold.embed(root[None, :])
            frame = self.manifold.frames(root[None, :])[0]
        g1 = np.einsum("m,mN,aN->a", c1, self.space1.gradients(point)[0], frame)
        g2 = np.einsum("m,mN,aN->a", c2, self.space2.gradients(point)[0], frame)
        sing = np.linalg.svd(np.stack([g1, g2]), compute_uv=False)
        return sing[-1] > 0.0 and sing[0] / sing[-1] <= _COND_LIMIT

    def _count_level(self, level, c1, c2):
        cache = self._cache[level]
        shape = cache["shape"]
        V1 = (cache["B1"] @ c1).reshape(shape)
        V2 = (cache["B2"] @ c2).reshape(shape)
        mixed = _mixed_cells(V1) & _mixed_cells(V2)
        rows, cols = np.nonzero(mixed)
        if len(rows) == 0:
            return 0, False
        a, b = cache["cells"]
        seeds = np.stack(
            [0.5 * (a[rows] + a[rows + 1]), 0.5 * (b[cols] + b[cols + 1])], axis=1
        )
        if self.spherical:
            roots, alive = self._newton_sphere(seeds, c1, c2)
        else:
            roots, alive = self._newton_torus(seeds, c1, c2)
        roots = roots[alive]
        if len(roots) == 0:
            return 0, False
        # non-converged seeds are plain Newton divergence, not evidence of
        # a degenerate sample; drop them before deduplication
        roots = roots[self._residuals(roots, c1, c2) < _ROOT_TOL]
        count = 0
        suspect = False
        for root in self._dedup(list(roots)):
            if self._transversal(root, c1, c2):
                count += 1
            else:
                suspect = True
        return count, suspect

    def count_pair(self, c1, c2):
        """Common-zero count with the doubled-grid stability check."""
        cache = self._cache[0]
        v1 = cache["B1"] @ c1
        v2 = cache["B2"] @ c2
        denom = np.linalg.norm(v1) * np.linalg.norm(v2)
        if denom > 0.0 and abs(float(v1 @ v2)) > (1.0 - 1e-10) * denom:
            return 0, True  # proportional functions: the zero set is not isolated
        count, suspect = self._count_level(0, c1, c2)
        refined, suspect_fine = self._count_level(1, c1, c2)
        if refined != count:
            return refined, True
        return count, suspect or suspect_fine


def count_zeros_2d(space1, space2, c1, c2, grid=None, max_newton_iters: int = 30):
    """One-shot common-zero count of two functions on T^2 or S^2."""
    counter = PairCounter(space1, space2, grid=grid, max_newton_iters=max_newton_iters)
    return counter.count_pair(np.asarray(c1, float), np.asarray(c2, float))


def _circle_restriction(space: FunctionSpace, manifold):
    """Evaluate a factor-bound torus space along its own circle factor."""
    factor = space.factor

    def values_on_circle(theta_arr, coeffs):
        points = np.zeros((len(theta_arr), manifold.ambient_dim))
        points[:, 0::2] = 1.0  # neutral angles for the other factors
        points[:, 2 * factor] = np.cos(theta_arr)
        points[:, 2 * factor + 1] = np.sin(theta_arr)
        return space.evaluate(coeffs, points)

    return values_on_circle


def per_sample_counts(spaces, samples: int, seed: int = 0, grid=None):
    """Yield (sample index, count, suspect) deterministically.

    Sample s draws its own generator from (seed, s), so the stream does
    not depend on scheduling or worker count.
    """
    spaces = list(spaces)
    manifold = spaces[0].manifold
    n = manifold.dim
    if len(spaces) != n:
        raise ValueError(f"need {n} spaces on {manifold.name}, got {len(spaces)}")
    factorized = (
        isinstance(manifold, ProductManifold)
        and all(isinstance(f, Circle) for f in manifold.factors)
        and sorted(s.factor for s in spaces if s.factor is not None) == list(range(n))
    )
    counter = None
    restrictions = None
    if n == 1:
        pass
    elif factorized:
        restrictions = [(_circle_restriction(sp, manifold), i) for i, sp in enumerate(spaces)]
    elif n == 2:
        counter = PairCounter(spaces[0], spaces[1], grid=grid)
    else:
        raise ValueError(
            "zero counting for n = 3 is supported only for factorized torus spaces"
        )
    for s in range(int(samples)):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(s,)))
        coeffs = [sample_unit(sp, rng) for sp in spaces]
        if n == 1:
            grid_1d = max(4096, 8 * int(spaces[0].max_frequency))
            count, suspect = count_zeros_1d(
                lambda th: spaces[0].evaluate(coeffs[0], manifold.embed(th[:, None])), grid_1d
            )
        elif factorized:
            count, suspect = 1, False
            for restriction, i in restrictions:
                grid_1d = max(4096, 8 * int(spaces[i].max_frequency))
                c_i, s_i = count_zeros_1d(lambda th: restriction(th, coeffs[i]), grid_1d)
                count *= c_i
                suspect = suspect or s_i
        else:
            count, suspect = counter.count_pair(coeffs[0], coeffs[1])
        yield s, count, suspect


def estimate(spaces, samples: int, seed: int = 0, grid=None) -> ZeroCountEstimate:
    """Monte Carlo mean of the common-zero count over unit-sphere draws.

    Suspect samples are excluded from the mean (their count is reported);
    a suspect rate above 5% raises :class:`UnreliableOracleError`.
    """
    counts = []
    suspects = 0
    for _, count, suspect in per_sample_counts(spaces, samples, seed=seed, grid=grid):
        if suspect:
            suspects += 1
        else:
            counts.append(count)
    total = int(samples)
    if suspects / total > 0.05:
        raise UnreliableOracleError(
            f"unreliable-oracle: {suspects}/{total} samples failed the reliability checks"
        )
    counts = np.array(counts, dtype=float)
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(len(counts))) if len(counts) > 1 else 0.0
    hist = {}
    for c in counts.astype(int):
        hist[int(c)] = hist.get(int(c), 0) + 1
    return ZeroCountEstimate(
        samples=total,
        mean=mean,
        stderr=stderr,
        seed=seed,
        histogram=hist,
        suspect_samples=suspects,
    )
