"""Centrally symmetric convex bodies in R^2..R^4.

Bodies are represented by their support functions.  Five variants are
supported: ellipsoids given by a PSD shape matrix Q (support
``sqrt(u' Q u)``), segments ``[-v, v]``, balls, zonotopes (Minkowski sums
of segments ``[-v_i, v_i]``), and formal Minkowski sums with nonnegative
coefficients.  Everything is centered at the origin and immutable.

Volumes come in three flavours: an exact/analytic engine (closed forms
for ellipsoids, balls and zonotopes, pairwise mixed-area algebra in the
plane, smooth support-function quadrature for sums of positive-definite
ellipsoids in R^3), a membership grid that integrates column extents of
the support-constraint polytope, and plain Monte Carlo rejection.  Mixed
volumes are obtained from volumes by polarization:

    V(A_1, ..., A_n) = 1/n! * sum_{S subset of {1..n}}
                       (-1)^(n - |S|) vol(sum_{i in S} A_i).

The membership grid tests ``x in K`` through ``max_u <x, u> - h(u) <= 0``
over a finite direction grid; this under-approximates the constraint set,
so the reported volume slightly over-estimates the body's.
"""

import itertools
import json
import math

import numpy as np
from scipy.special import ellipe, roots_legendre

from .constants import ball_volume
from .errors import AnalyticUnavailableError, BadFrameError, DimensionMismatchError
from .harmonics import sphere_quadrature

_PSD_TOL = 1e-10
_RANK_TOL = 1e-12


def _as_matrix(Q):
    Q = np.array(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ValueError("shape matrix must be square")
    if not np.allclose(Q, Q.T, atol=_PSD_TOL):
        raise ValueError("shape matrix must be symmetric")
    if np.linalg.eigvalsh(Q).min() < -_PSD_TOL * max(1.0, abs(Q).max()):
        raise ValueError("shape matrix must be positive semidefinite")
    Q = 0.5 * (Q + Q.T)
    Q.flags.writeable = False
    return Q


class ConvexBody:
    """Base class; concrete variants implement ``support_many``."""

    dim: int

    def support(self, u) -> float:
        """Support function h(u) = max_{x in K} <x, u>."""
        u = np.asarray(u, dtype=float)
        return float(self.support_many(u[None, :])[0])

    def support_many(self, U: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __add__(self, other):
        return MinkowskiSum([(1.0, self), (1.0, other)])

    def __rmul__(self, t: float):
        return MinkowskiSum([(float(t), self)])

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class Ellipsoid(ConvexBody):
    def __init__(self, Q):
        self.Q = _as_matrix(Q)
        self.dim = self.Q.shape[0]

    def support_many(self, U):
        return np.sqrt(np.maximum(np.einsum("ki,ij,kj->k", U, self.Q, U), 0.0))

    def semi_axes(self):
        return np.sqrt(np.maximum(np.linalg.eigvalsh(self.Q), 0.0))

    def to_dict(self):
        return {"type": "ellipsoid", "Q": self.Q.tolist()}

    def __repr__(self):
        return f"Ellipsoid(Q={self.Q.tolist()})"


class Segment(ConvexBody):
    """The segment [-v, v]; its length is 2|v|."""

    def __init__(self, v):
        v = np.array(v, dtype=float)
        if v.ndim != 1:
            raise ValueError("segment direction must be a vector")
        v.flags.writeable = False
        self.v = v
        self.dim = v.shape[0]

    def support_many(self, U):
        return np.abs(U @ self.v)

    def to_dict(self):
        return {"type": "segment", "v": self.v.tolist()}

    def __repr__(self):
        return f"Segment(v={self.v.tolist()})"


class Ball(ConvexBody):
    def __init__(self, radius: float, dim: int):
        if radius < 0:
            raise ValueError("radius must be >= 0")
        self.radius = float(radius)
        self.dim = int(dim)

    def support_many(self, U):
        return self.radius * np.linalg.norm(U, axis=1)

    def to_dict(self):
        return {"type": "ball", "r": self.radius, "dim": self.dim}

    def __repr__(self):
        return f"Ball(radius={self.radius}, dim={self.dim})"


class Zonotope(ConvexBody):
    """Minkowski sum of the segments [-v_i, v_i]."""

    def __init__(self, generators):
        V = np.array(generators, dtype=float)
        if V.ndim != 2 or V.shape[0] == 0:
            raise ValueError("zonotope needs a nonempty list of generators")
        V.flags.writeable = False
        self.generators = V
        self.dim = V.shape[1]

    def support_many(self, U):
        return np.abs(U @ self.generators.T).sum(axis=1)

    def to_dict(self):
        return {"type": "zonotope", "generators": self.generators.tolist()}

    def __repr__(self):
        return f"Zonotope(generators={self.generators.tolist()})"


class MinkowskiSum(ConvexBody):
    def __init__(self, parts):
        cleaned = []
        dim = None
        for coef, body in parts:
            coef = float(coef)
            if coef < 0:
                raise ValueError("Minkowski coefficients must be >= 0")
            if dim is None:
                dim = body.dim
            elif body.dim != dim:
                raise DimensionMismatchError("dimension-mismatch among summands")
            cleaned.append((coef, body))
        if dim is None:
            raise ValueError("empty Minkowski sum")
        self.parts = tuple(cleaned)
        self.dim = dim

    def support_many(self, U):
        out = np.zeros(U.shape[0])
        for coef, body in self.parts:
            if coef != 0.0:
                out += coef * body.support_many(U)
        return out

    def to_dict(self):
        return {
            "type": "minkowski_sum",
            "parts": [{"coef": c, "body": b.to_dict()} for c, b in self.parts],
        }

    def __repr__(self):
        return f"MinkowskiSum({list(self.parts)})"


def body_from_dict(data: dict) -> ConvexBody:
    kind = data["type"]
    if kind == "ellipsoid":
        return Ellipsoid(data["Q"])
    if kind == "segment":
        return Segment(data["v"])
    if kind == "ball":
        return Ball(data["r"], data["dim"])
    if kind == "zonotope":
        return Zonotope(data["generators"])
    if kind == "minkowski_sum":
        return MinkowskiSum([(p["coef"], body_from_dict(p["body"])) for p in data["parts"]])
    raise ValueError(f"unknown body type {kind!r}")


def body_from_json(text: str) -> ConvexBody:
    return body_from_dict(json.loads(text))


def support(body: ConvexBody, u) -> float:
    """Support function of ``body`` at direction ``u`` (zero allowed)."""
    return body.support(u)


# ---------------------------------------------------------------------------
# canonical decomposition: every body flattens to scaled primitive parts
# ("E", Q) with Q PSD of rank >= 2, or ("S", v) single segments.

def _flatten(body, coef, out):
    if coef == 0.0:
        return
    if isinstance(body, Ellipsoid):
        Q = coef**2 * body.Q
        w, vecs = np.linalg.eigh(Q)
        w = np.where(w < _RANK_TOL * max(1.0, w.max(initial=0.0)), 0.0, w)
        rank = int(np.count_nonzero(w))
        if rank == 0:
            return
        if rank == 1:
            i = int(np.argmax(w))
            out.append(("S", math.sqrt(w[i]) * vecs[:, i]))
        else:
            out.append(("E", Q))
    elif isinstance(body, Ball):
        if body.radius * coef > 0:
            out.append(("E", (coef * body.radius) ** 2 * np.eye(body.dim)))
    elif isinstance(body, Segment):
        if np.linalg.norm(body.v) > 0:
            out.append(("S", coef * body.v))
    elif isinstance(body, Zonotope):
        for v in body.generators:
            if np.linalg.norm(v) > 0:
                out.append(("S", coef * v))
    elif isinstance(body, MinkowskiSum):
        for c, part in body.parts:
            _flatten(part, coef * c, out)
    else:
        raise TypeError(f"unsupported body {type(body).__name__}")


def _primitives(bodies_with_coefs):
    out = []
    for coef, body in bodies_with_coefs:
        _flatten(body, float(coef), out)
    return out


def _is_ball_matrix(Q):
    r2 = np.trace(Q) / Q.shape[0]
    return np.allclose(Q, r2 * np.eye(Q.shape[0]), atol=1e-12 * max(1.0, r2)), math.sqrt(max(r2, 0.0))


def _zonotope_volume(segments, n):
    V = np.array(segments)
    if V.shape[0] < n:
        return 0.0
    total = 0.0
    for idx in itertools.combinations(range(V.shape[0]), n):
        total += abs(np.linalg.det(V[list(idx)]))
    return 2.0**n * total


# -- exact mixed areas of primitive pairs in the plane ----------------------

def _ellipse_perimeter_from_matrix(M):
    """Perimeter of the ellipse with shape matrix M (support sqrt(u'Mu))."""
    w = np.sort(np.maximum(np.linalg.eigvalsh(M), 0.0))[::-1]
    a, b = math.sqrt(w[0]), math.sqrt(w[1])
    if a == 0.0:
        return 0.0
    return 4.0 * a * float(ellipe(1.0 - (b / a) ** 2))


def _mixed_area_pair(p, q):
    """V_2 of two primitive parts; exact up to scipy's elliptic integral."""
    kind_p, kind_q = p[0], q[0]
    if kind_p == "S" and kind_q == "S":
        return 2.0 * abs(p[1][0] * q[1][1] - p[1][1] * q[1][0])
    if kind_p == "S" or kind_q == "S":
        v, Q = (p[1], q[1]) if kind_p == "S" else (q[1], p[1])
        norm = np.linalg.norm(v)
        if norm == 0.0:
            return 0.0
        perp = np.array([-v[1], v[0]]) / norm
        return 2.0 * norm * math.sqrt(max(perp @ Q @ perp, 0.0))
    Q1, Q2 = p[1], q[1]
    w, vecs = np.linalg.eigh(Q1)
    w = np.maximum(w, 0.0)
    if w.min() <= _RANK_TOL * w.max():
        # rank-deficient Q1 slipped through; treat as a segment
        i = int(np.argmax(w))
        return _mixed_area_pair(("S", math.sqrt(w[i]) * vecs[:, i]), q)
    root = vecs @ np.diag(np.sqrt(w)) @ vecs.T
    inv = vecs @ np.diag(1.0 / np.sqrt(w)) @ vecs.T
    M = inv @ Q2 @ inv
    return float(np.linalg.det(root)) * _ellipse_perimeter_from_matrix(M) / 2.0


def _plane_sum_volume(prims):
    vol = 0.0
    for part in prims:
        if part[0] == "E":
            vol += math.pi * math.sqrt(max(np.linalg.det(part[1]), 0.0))
    for i in range(len(prims)):
        for j in range(i + 1, len(prims)):
            vol += 2.0 * _mixed_area_pair(prims[i], prims[j])
    return vol


# -- smooth support-function quadrature in R^3 ------------------------------

def _smooth_sum_volume_3d(matrices, n_theta=96, n_phi=192):
    """vol(sum of PD ellipsoids) = 1/3 int_{S^2} h det(Hess h |_{u_perp}) du."""
    U, W = sphere_quadrature(n_theta, n_phi)
    h = np.zeros(U.shape[0])
    H = np.zeros((U.shape[0], 3, 3))
    for Q in matrices:
        Qu = U @ Q
        hj = np.sqrt(np.einsum("ki,ki->k", Qu, U))
        h += hj
        H += Q[None, :, :] / hj[:, None, None]
        H -= np.einsum("ki,kj->kij", Qu, Qu) / hj[:, None, None] ** 3
    ref = np.where(np.abs(U[:, 2:3]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    t1 = np.cross(U, ref)
    t1 /= np.linalg.norm(t1, axis=1, keepdims=True)
    t2 = np.cross(U, t1)
    m11 = np.einsum("ki,kij,kj->k", t1, H, t1)
    m22 = np.einsum("ki,kij,kj->k", t2, H, t2)
    m12 = np.einsum("ki,kij,kj->k", t1, H, t2)
    return float(np.sum(W * h * (m11 * m22 - m12**2)) / 3.0)


def _sum_volume_analytic(prims, n):
    segments = [p[1] for p in prims if p[0] == "S"]
    matrices = [p[1] for p in prims if p[0] == "E"]
    if not prims:
        return 0.0
    if not matrices:
        return _zonotope_volume(segments, n)
    if n == 1:
        return 2.0 * (sum(math.sqrt(Q[0, 0]) for Q in matrices) + sum(abs(v[0]) for v in segments))
    if not segments:
        if len(matrices) == 1:
            return ball_volume(n) * math.sqrt(max(np.linalg.det(matrices[0]), 0.0))
        flags = [_is_ball_matrix(Q) for Q in matrices]
        if all(f[0] for f in flags):
            return ball_volume(n) * sum(f[1] for f in flags) ** n
    if n == 2:
        return _plane_sum_volume(prims)
    if n == 3 and not segments:
        eigs = [np.linalg.eigvalsh(Q) for Q in matrices]
        if all(e.min() > _RANK_TOL * e.max() for e in eigs):
            return _smooth_sum_volume_3d(matrices)
    raise AnalyticUnavailableError(
        "analytic-unavailable: no closed form for this Minkowski sum in dimension %d" % n
    )


# -- membership grid --------------------------------------------------------

_DIRECTION_CACHE = {}


def support_directions(n, count):
    """A fixed grid of unit directions: uniform angles (n=2), Fibonacci (n=3)."""
    key = (n, count)
    if key in _DIRECTION_CACHE:
        return _DIRECTION_CACHE[key]
    if n == 2:
        th = np.arange(count) * np.pi / count  # antipodal pairs are redundant
        U = np.stack([np.cos(th), np.sin(th)], axis=1)
        U = np.concatenate([U, -U], axis=0)
    elif n == 3:
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(np.maximum(1.0 - z**2, 0.0))
        golden = np.pi * (3.0 - math.sqrt(5.0))
        U = np.stack([r * np.cos(golden * i), r * np.sin(golden * i), z], axis=1)
    else:
        rng = np.random.default_rng(1234 + n)
        U = rng.normal(size=(count, n))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        U = np.concatenate([U, -U], axis=0)
    U.flags.writeable = False
    _DIRECTION_CACHE[key] = U
    return U


def _membership_volume(body, resolution, n_directions=None):
    n = body.dim
    if n_directions is None:
        n_directions = 512 if n == 2 else 2048
    U = support_directions(n, n_directions)
    h = body.support_many(U)
    half = np.array([body.support(e) for e in np.eye(n)])
    if half.min() <= 0.0:
        return 0.0  # flat along a coordinate axis
    axis = n - 1  # integrate extents along the last coordinate
    base_dims = [i for i in range(n) if i != axis]
    grids = [np.linspace(-half[i], half[i], resolution) for i in base_dims]
    if n == 2:
        cols = grids[0][:, None]
    else:
        mesh = np.meshgrid(*grids, indexing="ij")
        cols = np.stack([m.ravel() for m in mesh], axis=1)
    cell = np.prod([g[1] - g[0] for g in grids]) if resolution > 1 else 0.0
    ua = U[:, axis]
    Ub = U[:, base_dims]
    pos = ua > 1e-12
    neg = ua < -1e-12
    volume = 0.0
    for start in range(0, cols.shape[0], 8192):
        block = cols[start : start + 8192]
        rhs = h[None, :] - block @ Ub.T
        hi = np.min(rhs[:, pos] / ua[None, pos], axis=1) if pos.any() else np.inf
        lo = np.max(rhs[:, neg] / ua[None, neg], axis=1) if neg.any() else -np.inf
        volume += float(np.sum(np.maximum(hi - lo, 0.0))) * cell
    return volume


def _montecarlo_volume(body, samples, seed=0, n_directions=None):
    n = body.dim
    if n_directions is None:
        n_directions = 512 if n == 2 else 2048
    U = support_directions(n, n_directions)
    h = body.support_many(U)
    half = np.array([body.support(e) for e in np.eye(n)])
    if half.min() == 0.0:
        return 0.0
    rng = np.random.default_rng(seed)
    hits = 0
    total = int(samples)
    for start in range(0, total, 65536):
        count = min(65536, total - start)
        X = rng.uniform(-half, half, size=(count, n))
        inside = np.all(X @ U.T <= h[None, :] + 1e-14, axis=1)
        hits += int(inside.sum())
    return hits / total * float(np.prod(2.0 * half))


def volume(
    body: ConvexBody,
    method: str = "analytic",
    resolution: int = 512,
    seed: int = 0,
    directions: int | None = None,
) -> float:
    """n-dimensional volume of ``body``.

    ``analytic`` uses exact formulas (plus deterministic spherical
    quadrature for sums of positive-definite ellipsoids in R^3) and raises
    :class:`AnalyticUnavailableError` for sums with no closed form;
    ``membership-grid`` integrates column extents of the support polytope
    over a direction grid (512 directions in the plane unless overridden);
    ``monte-carlo`` does rejection sampling in the bounding box.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    if body.dim < 1 or body.dim > 4:
        raise DimensionMismatchError("dimension-mismatch: supported ambient dimensions are 1..4")
    if method == "analytic":
        return _sum_volume_analytic(_primitives([(1.0, body)]), body.dim)
    if method == "membership-grid":
        return _membership_volume(body, resolution, n_directions=directions)
    if method == "monte-carlo":
        return _montecarlo_volume(body, max(resolution, 1) * 1000, seed=seed, n_directions=directions)
    raise ValueError(f"unknown volume method {method!r}")


def _subset_sum_volume(bodies, subset, method, resolution):
    if not subset:
        return 0.0
    prims = _primitives([(1.0, bodies[i]) for i in subset])
    if method == "analytic":
        return _sum_volume_analytic(prims, bodies[0].dim)
    return _membership_volume(MinkowskiSum([(1.0, bodies[i]) for i in subset]), resolution)


def mixed_volume(bodies, method: str = "auto", resolution: int = 512) -> float:
    """Mixed volume V(A_1, ..., A_n) of n bodies in R^n by polarization.

    ``method`` is ``analytic``, ``membership-grid`` or ``auto`` (analytic
    with a membership-grid fallback when some Minkowski sum has no closed
    form).
    """
    bodies = list(bodies)
    n = bodies[0].dim
    if any(b.dim != n for b in bodies):
        raise DimensionMismatchError("dimension-mismatch among bodies")
    if len(bodies) != n:
        raise DimensionMismatchError(f"dimension-mismatch: expected {n} bodies, got {len(bodies)}")
    for vol_method in ("analytic", "membership-grid") if method == "auto" else (method,):
        try:
            total = 0.0
            for size in range(1, n + 1):
                sign = (-1.0) ** (n - size)
                for subset in itertools.combinations(range(n), size):
                    total += sign * _subset_sum_volume(bodies, subset, vol_method, resolution)
            return total / math.factorial(n)
        except AnalyticUnavailableError:
            if method != "auto":
                raise
    raise AssertionError("unreachable")


def projection_volume(body: ConvexBody, basis) -> float:
    """k-volume of the orthogonal projection of ``body`` onto span(basis).

    ``basis`` holds k orthonormal rows; a Gram deviation above 1e-8 raises
    :class:`BadFrameError`.
    """
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    k, n = B.shape
    if n != body.dim:
        raise DimensionMismatchError("dimension-mismatch between body and frame")
    if k > n:
        raise BadFrameError("bad-frame: more vectors than ambient dimension")
    if np.abs(B @ B.T - np.eye(k)).max() > 1e-8:
        raise BadFrameError("bad-frame: basis is not orthonormal")
    projected = project_body(body, B)
    try:
        return _sum_volume_analytic(_primitives([(1.0, projected)]), k)
    except AnalyticUnavailableError:
        return _membership_volume(projected, 512)


def project_body(body: ConvexBody, B: np.ndarray) -> ConvexBody:
    """Image of ``body`` under x -> B x, expressed in the row basis of B."""
    if isinstance(body, Ellipsoid):
        return Ellipsoid(B @ body.Q @ B.T)
    if isinstance(body, Ball):
        return Ball(body.radius, B.shape[0])
    if isinstance(body, Segment):
        return Segment(B @ body.v)
    if isinstance(body, Zonotope):
        return Zonotope(body.generators @ B.T)
    if isinstance(body, MinkowskiSum):
        return MinkowskiSum([(c, project_body(p, B)) for c, p in body.parts])
    raise TypeError(f"unsupported body {type(body).__name__}")


def check_alexandrov_fenchel(bodies, tol: float = 1e-9, method: str = "auto") -> dict:
    """Check V(A_1..A_n)^2 >= V(..A_{n-1},A_{n-1}) * V(..A_n,A_n).

    Returns ``{"lhs", "rhs", "holds"}`` where ``holds`` allows a relative
    slack of ``tol``.
    """
    bodies = list(bodies)
    n = bodies[0].dim
    if len(bodies) != n:
        raise DimensionMismatchError("dimension-mismatch: need n bodies in R^n")
    v_mixed = mixed_volume(bodies, method=method)
    repeat_prev = bodies[: n - 2] + [bodies[n - 2], bodies[n - 2]] if n >= 2 else bodies
    repeat_last = bodies[: n - 2] + [bodies[n - 1], bodies[n - 1]] if n >= 2 else bodies
    lhs = v_mixed**2
    rhs = mixed_volume(repeat_prev, method=method) * mixed_volume(repeat_last, method=method)
    return {"lhs": lhs, "rhs": rhs, "holds": bool(lhs >= rhs - tol * (1.0 + abs(rhs)))}
