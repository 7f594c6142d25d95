"""Normal measures on affine hyperplanes and Monte Carlo density products.

A translation-invariant measure on affine hyperplanes of R^n is encoded
by an even distribution over normal directions together with Lebesgue
measure along the offset.  Hyperplanes are sampled as (direction u,
offset t uniform over the diameter of a bounding ball), so one hyperplane
draw representing the measure mu_{1,phi} carries the importance weight
phi(u) * 2R.

The product of k such measures evaluated on a k-dimensional region is
the product-measure mass of the k-tuples of hyperplanes whose common
intersection meets the region; the Monte Carlo estimator below draws the
k hyperplanes independently, solves for the intersection point inside
the region's carrier plane, and averages the weighted hit indicator.
Near-singular intersections (condition number above 1e12) are counted
separately and treated as misses; they occur with probability zero for
the continuous direction distributions used here.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import Ball, ConvexBody, Ellipsoid, MinkowskiSum, Segment, Zonotope, _primitives
from .constants import ball_volume, sphere_volume
from .errors import EmptyRegionError, NotSmoothError
from .gauges import dk_mixed
from .transform import HarmonicGauge, cosine_transform, inverse_cosine_transform

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class Parallelotope:
    """k-dimensional parallelotope base + [0,1]-combinations of edge rows."""

    base: np.ndarray
    edges: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        edges = np.atleast_2d(np.asarray(self.edges, dtype=float))
        if edges.shape[1] != base.shape[0]:
            raise EmptyRegionError("empty-region: edge/base dimension mismatch")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def centered(cls, edges) -> "Parallelotope":
        edges = np.atleast_2d(np.asarray(edges, dtype=float))
        return cls(-0.5 * edges.sum(axis=0), edges)

    @classmethod
    def unit_cube(cls, n: int, k: int | None = None) -> "Parallelotope":
        """Centered unit cube of dimension k inside R^n (k defaults to n)."""
        k = n if k is None else k
        return cls.centered(np.eye(n)[:k])

    @property
    def k(self) -> int:
        return self.edges.shape[0]

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    @property
    def center(self) -> np.ndarray:
        return self.base + 0.5 * self.edges.sum(axis=0)

    def circumradius(self) -> float:
        corners = self.vertices()
        return float(np.linalg.norm(corners - self.center, axis=1).max())

    def vertices(self) -> np.ndarray:
        k = self.k
        bits = ((np.arange(2**k)[:, None] >> np.arange(k)[None, :]) & 1).astype(float)
        return self.base[None, :] + bits @ self.edges

    def volume(self) -> float:
        G = self.edges @ self.edges.T
        return float(math.sqrt(max(np.linalg.det(G), 0.0)))

    def carrier_basis(self) -> np.ndarray:
        Q, _ = np.linalg.qr(self.edges.T)
        return Q.T


class _Component:
    mass: float

    def sample(self, rng, count):
        raise NotImplementedError


class _UniformGaugeComponent(_Component):
    """Continuous gauge sampled by uniform directions and signed weights."""

    def __init__(self, gauge_fn, dim, mass):
        self.gauge_fn = gauge_fn
        self.dim = dim
        self.mass = float(mass)

    def sample(self, rng, count):
        U = rng.normal(size=(count, self.dim))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        return U, np.asarray(self.gauge_fn(U), dtype=float)


class _AtomicComponent(_Component):
    """Discrete direction measure (segments and zonotopes)."""

    def __init__(self, directions, masses):
        self.directions = np.atleast_2d(np.asarray(directions, dtype=float))
        self.masses = np.asarray(masses, dtype=float)
        self.mass = float(np.abs(self.masses).sum())

    def sample(self, rng, count):
        p = np.abs(self.masses) / self.mass
        idx = rng.choice(len(p), size=count, p=p)
        return self.directions[idx], np.sign(self.masses[idx]) * self.mass


class _SubspaceComponent(_Component):
    """Constant gauge on the lines of an embedded coordinate subspace."""

    def __init__(self, frame, value):
        self.frame = np.atleast_2d(np.asarray(frame, dtype=float))
        self.value = float(value)
        self.mass = abs(self.value)

    def sample(self, rng, count):
        sub = rng.normal(size=(count, self.frame.shape[0]))
        sub /= np.linalg.norm(sub, axis=1, keepdims=True)
        return sub @ self.frame, np.full(count, self.value)


@dataclass(frozen=True)
class NormalMeasure1:
    """A (signed) normal measure on affine hyperplanes of R^dim."""

    dim: int
    components: tuple = field(repr=False)
    label: str = ""

    @property
    def mass(self) -> float:
        return sum(c.mass for c in self.components)

    def sample(self, rng, count):
        """Draw ``count`` directions with signed importance weights."""
        masses = np.array([c.mass for c in self.components])
        if masses.sum() == 0.0:
            return np.zeros((count, self.dim)), np.zeros(count)
        p = masses / masses.sum()
        picks = rng.choice(len(p), size=count, p=p)
        U = np.empty((count, self.dim))
        w = np.empty(count)
        for j, comp in enumerate(self.components):
            sel = picks == j
            if sel.any():
                Uj, wj = comp.sample(rng, int(sel.sum()))
                U[sel] = Uj
                w[sel] = wj / p[j]
        return U, w

    def gauge_values(self, U) -> np.ndarray:
        """The direction density phi at unit vectors (atoms excluded)."""
        out = np.zeros(np.atleast_2d(U).shape[0])
        for comp in self.components:
            if isinstance(comp, _UniformGaugeComponent):
                out += np.asarray(comp.gauge_fn(np.atleast_2d(U)), dtype=float)
        return out


def _mean_abs_gauge(gauge, dim):
    if dim == 2:
        th = np.arange(4096) * np.pi / 4096
        U = np.stack([np.cos(th), np.sin(th)], axis=1)
        return float(np.abs(gauge(U)).mean())
    from .harmonics import sphere_quadrature

    U, W = sphere_quadrature(48, 96)
    return float(np.sum(W * np.abs(gauge(U))) / (4.0 * np.pi))


def gauge_measure(gauge: HarmonicGauge, label: str = "") -> NormalMeasure1:
    """mu_{1,phi} for a band-limited gauge phi (possibly signed)."""
    mass = _mean_abs_gauge(gauge.evaluate, gauge.dim)
    comp = _UniformGaugeComponent(gauge.evaluate, gauge.dim, mass)
    return NormalMeasure1(dim=gauge.dim, components=(comp,), label=label)


def subspace_measure(frame, value, dim, label: str = "") -> NormalMeasure1:
    """Constant-gauge measure supported on lines of an embedded subspace.

    ``frame`` rows span the subspace orthonormally inside R^dim.
    """
    comp = _SubspaceComponent(np.asarray(frame, dtype=float), value)
    if comp.frame.shape[1] != dim:
        raise EmptyRegionError("empty-region: frame does not match ambient dimension")
    return NormalMeasure1(dim=dim, components=(comp,), label=label)


def body_measure(body: ConvexBody, bandwidth: int | None = None) -> NormalMeasure1:
    """The normal measure whose density is d_1(body).

    Smooth ellipsoid parts go through the inverse cosine transform;
    segment and zonotope parts become direction atoms with mass twice the
    generator length.  Flat higher-rank parts in R^3 are rejected.
    """
    dim = body.dim
    if dim not in (2, 3):
        raise NotSmoothError("not-smooth: measures are available in dimensions 2 and 3")
    if bandwidth is None:
        bandwidth = 64 if dim == 2 else 16
    components = []
    atoms, masses = [], []
    for kind, payload in _primitives([(1.0, body)]):
        if kind == "S":
            length = float(np.linalg.norm(payload))
            atoms.append(payload / length)
            masses.append(2.0 * length)
        else:
            Q = payload
            eigs = np.linalg.eigvalsh(Q)
            if eigs.min() <= 1e-12 * eigs.max():
                raise NotSmoothError("not-smooth: rank-deficient ellipsoid part in R^3")
            ell = Ellipsoid(Q)
            width = HarmonicGauge.from_function(dim, lambda U: 2.0 * ell.support_many(U), bandwidth)
            phi = inverse_cosine_transform(width)
            mass = _mean_abs_gauge(phi.evaluate, dim)
            components.append(_UniformGaugeComponent(phi.evaluate, dim, mass))
    if atoms:
        components.append(_AtomicComponent(np.array(atoms), np.array(masses)))
    return NormalMeasure1(dim=dim, components=tuple(components), label=type(body).__name__)


def _as_measure(factor):
    if isinstance(factor, NormalMeasure1):
        return factor
    if isinstance(factor, ConvexBody):
        return body_measure(factor)
    raise TypeError("factors must be NormalMeasure1 instances or convex bodies")


def density_product_mc(
    factors,
    region: Parallelotope,
    samples: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    chunk: int = 131072,
):
    """Estimate (mu_1 ... mu_k)(region) by independent hyperplane sampling.

    Returns ``(estimate, stderr, diagnostics)`` where diagnostics counts
    near-singular intersection solves (reported, treated as misses).
    Deterministic for a fixed ``(seed, workers)`` pair.
    """
    measures = [_as_measure(f) for f in factors]
    k = len(measures)
    if region.k != k:
        raise EmptyRegionError("empty-region: region dimension must equal the number of factors")
    n = region.dim
    if any(m.dim != n for m in measures):
        raise EmptyRegionError("empty-region: factor/region dimension mismatch")
    radius = region.circumradius()
    if not np.isfinite(radius) or radius <= 0.0:
        raise EmptyRegionError("empty-region: degenerate bounding ball")
    center = region.center
    base_offset = region.base - center

    total = int(samples)
    per_worker = [total // workers + (1 if i < total % workers else 0) for i in range(workers)]
    acc_sum = 0.0
    acc_sq = 0.0
    degenerate = 0
    for worker, count in enumerate(per_worker):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(worker,)))
        done = 0
        while done < count:
            m = min(chunk, count - done)
            weights = np.full(m, 1.0)
            M = np.empty((m, k, k))
            rhs = np.empty((m, k))
            for i, measure in enumerate(measures):
                U, w = measure.sample(rng, m)
                t = rng.uniform(-radius, radius, size=m)
                weights *= w * (2.0 * radius)
                M[:, i, :] = U @ region.edges.T
                rhs[:, i] = t - U @ base_offset
            sig = np.linalg.svd(M, compute_uv=False)
            good = sig[:, -1] > sig[:, 0] / _COND_LIMIT
            degenerate += int(m - good.sum())
            s = np.zeros((m, k))
            if good.any():
                s[good] = np.linalg.solve(M[good], rhs[good][..., None])[..., 0]
            hit = good & np.all((s >= 0.0) & (s <= 1.0), axis=1)
            vals = np.where(hit, weights, 0.0)
            acc_sum += float(vals.sum())
            acc_sq += float((vals**2).sum())
            done += m
    mean = acc_sum / total
    var = max(acc_sq / total - mean**2, 0.0)
    stderr = math.sqrt(var / total)
    return mean, stderr, {"degenerate": degenerate, "samples": total}


def verify_product_identity(
    bodies,
    region: Parallelotope,
    samples: int = 1_000_000,
    tol: float = 0.02,
    seed: int = 0,
    workers: int = 1,
) -> dict:
    """Monte Carlo check of d_1(A_1) ... d_1(A_k) = k! d_k(A_1, ..., A_k).

    The left side is the sampled product measure of the region; the right
    side evaluates the mixed projection density on the region's carrier.
    """
    bodies = list(bodies)
    k = len(bodies)
    lhs, stderr, diag = density_product_mc(bodies, region, samples=samples, seed=seed, workers=workers)
    carrier = region.carrier_basis()
    rhs = math.factorial(k) * dk_mixed(bodies).gauge(carrier) * region.volume()
    deviation = abs(lhs - rhs) / abs(rhs) if rhs != 0.0 else abs(lhs)
    return {
        "identity": "product",
        "lhs": lhs,
        "rhs": rhs,
        "stderr": stderr,
        "samples": diag["samples"],
        "degenerate": diag["degenerate"],
        "deviation": deviation,
        "pass": bool(deviation <= tol),
    }


def ball_gauge_preimage(radius: float, dim: int) -> float:
    """T_1^{-1} of the constant width 2r: pi*r in the plane, 4r in space."""
    if dim == 2:
        return math.pi * radius
    if dim == 3:
        return 4.0 * radius
    raise NotSmoothError("not-smooth: unsupported dimension")


def sphere_crofton_constant(m: int) -> float:
    """sigma_{m-1} / (2 v_{m-1}): the transform preimage of the unit gauge."""
    return sphere_volume(m - 1) / (2.0 * ball_volume(m - 1))
