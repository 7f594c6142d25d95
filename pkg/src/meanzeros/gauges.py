"""Translation-invariant k-densities of convex bodies.

A translation-invariant k-density factors as gauge(H) * vol_k, where the
gauge lives on the Grassmannian of k-subspaces.  For bodies the gauge of
interest is the mixed k-volume of orthogonal projections:

    d_k(A_1, ..., A_k)(H) = V_k(proj_H A_1, ..., proj_H A_k),

whose k = 1 case is the width function.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bodies import ConvexBody, mixed_volume, project_body, projection_volume
from .errors import DimensionMismatchError


@dataclass(frozen=True)
class GaugeDensity:
    """A k-density given by its gauge on orthonormal k-frames.

    ``fn`` maps an orthonormal (k, n) row basis of a subspace to the gauge
    value; evenness under sign flips of the rows is automatic for the
    body-derived gauges constructed here.
    """

    degree: int
    dim: int
    fn: Callable[[np.ndarray], float]
    bodies: tuple = field(default=(), repr=False)

    def gauge(self, basis) -> float:
        basis = np.atleast_2d(np.asarray(basis, dtype=float))
        if basis.shape != (self.degree, self.dim):
            raise DimensionMismatchError(
                f"dimension-mismatch: expected a ({self.degree}, {self.dim}) frame"
            )
        return float(self.fn(basis))

    def density(self, vectors) -> float:
        """Value on the parallelotope spanned by ``vectors`` (k, n) rows."""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        Q, R = np.linalg.qr(vectors.T)
        vol = abs(float(np.prod(np.diag(R))))
        if vol == 0.0:
            return 0.0
        return self.gauge(Q.T) * vol

    def __call__(self, basis):
        return self.gauge(basis)


def d1(body: ConvexBody) -> GaugeDensity:
    """Width-function density: gauge(H) = V_1(proj_H body) = 2 h(u)."""

    def width(basis):
        return 2.0 * body.support(basis[0])

    return GaugeDensity(degree=1, dim=body.dim, fn=width, bodies=(body,))


def dk_mixed(bodies) -> GaugeDensity:
    """Mixed projection density of k bodies in R^n.

    gauge(H) is the k-dimensional mixed volume of the projections of the
    bodies onto H; it is symmetric in the bodies and reduces to the width
    for a single body.
    """
    bodies = tuple(bodies)
    k = len(bodies)
    n = bodies[0].dim
    if any(b.dim != n for b in bodies):
        raise DimensionMismatchError("dimension-mismatch among bodies")
    if k > n:
        raise DimensionMismatchError("dimension-mismatch: more bodies than dimensions")
    if k == 1:
        return GaugeDensity(degree=1, dim=n, fn=lambda B: projection_volume(bodies[0], B), bodies=bodies)

    def gauge(basis):
        projected = [project_body(b, basis) for b in bodies]
        return mixed_volume(projected)

    return GaugeDensity(degree=k, dim=n, fn=gauge, bodies=bodies)


def euclidean_volume_density(n: int) -> GaugeDensity:
    """vol_n as a gauge density (gauge identically 1 on full frames)."""
    return GaugeDensity(degree=n, dim=n, fn=lambda B: 1.0)
