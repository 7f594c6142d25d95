"""Finite-dimensional Euclidean spaces of smooth functions on a manifold.

A function space holds a basis of ambient-coordinate functions (values
plus ambient gradients), the manifold they live on, and an optional
recombination matrix produced by orthonormalization.  The geometric
quantities derived from a space at a point x are

    theta(x)   unit evaluation vector (f_1(x), ..., f_m(x)) / |.|,
    G(x)       pull-back of the sphere metric under theta, in an
               orthonormal tangent frame,
    E(x)       the centered ellipsoid with shape matrix G(x).
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bodies import Ellipsoid
from .errors import BadEigenvalueError, DegenerateSpaceError, ValueConditionError
from .harmonics import real_sph_harm_with_grad
from .manifolds import Circle, Manifold, ProductManifold, Sphere2

_VALUE_EPS = 1e-14


class BasisFunction:
    def values(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def gradients(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class AmbientCoordinate(BasisFunction):
    def __init__(self, index: int, ambient_dim: int):
        self.index = index
        self.ambient_dim = ambient_dim

    def values(self, X):
        return X[:, self.index]

    def gradients(self, X):
        out = np.zeros_like(X)
        out[:, self.index] = 1.0
        return out

    def __repr__(self):
        return f"x[{self.index}]"


class ConstantFunction(BasisFunction):
    def __init__(self, value: float, ambient_dim: int):
        self.value = value
        self.ambient_dim = ambient_dim

    def values(self, X):
        return np.full(X.shape[0], self.value)

    def gradients(self, X):
        return np.zeros_like(X)

    def __repr__(self):
        return f"{self.value:g}"


class TorusTrig(BasisFunction):
    """cos/sin(k . angles) on a torus embedded block-wise in R^(2n).

    The angle of block i is atan2(y_i, x_i); gradients are taken of the
    natural ambient extension, which is tangent on the torus.
    """

    def __init__(self, freq, kind: str, blocks=None):
        self.freq = np.asarray(freq, dtype=float)
        if kind not in ("cos", "sin"):
            raise ValueError("kind must be 'cos' or 'sin'")
        self.kind = kind
        self.blocks = blocks

    def _angles(self, X):
        n = len(self.freq)
        return np.stack([np.arctan2(X[:, 2 * i + 1], X[:, 2 * i]) for i in range(n)], axis=1)

    def values(self, X):
        phase = self._angles(X) @ self.freq
        return np.cos(phase) if self.kind == "cos" else np.sin(phase)

    def gradients(self, X):
        phase = self._angles(X) @ self.freq
        outer = -np.sin(phase) if self.kind == "cos" else np.cos(phase)
        out = np.zeros_like(X)
        for i, k_i in enumerate(self.freq):
            if k_i == 0.0:
                continue
            x, y = X[:, 2 * i], X[:, 2 * i + 1]
            r2 = x**2 + y**2
            out[:, 2 * i] = -k_i * y / r2
            out[:, 2 * i + 1] = k_i * x / r2
        return outer[:, None] * out

    def __repr__(self):
        return f"{self.kind}({self.freq.astype(int).tolist()}.theta)"


class SphericalHarmonicFunction(BasisFunction):
    """Real orthonormal Y_{l,m}, extended 0-homogeneously off the sphere."""

    def __init__(self, l: int, m: int):
        self.l = l
        self.m = m

    def values(self, X):
        U = X / np.linalg.norm(X, axis=1, keepdims=True)
        v, _ = real_sph_harm_with_grad(self.l, self.m, U)
        return v

    def gradients(self, X):
        norms = np.linalg.norm(X, axis=1, keepdims=True)
        _, g = real_sph_harm_with_grad(self.l, self.m, X / norms)
        return g / norms

    def __repr__(self):
        return f"Y[{self.l},{self.m}]"


@dataclass(frozen=True)
class FunctionSpace:
    manifold: Manifold
    basis: tuple
    label: str = ""
    coeff_matrix: np.ndarray | None = None  # rows recombine the raw basis
    factor: int | None = None  # torus factor the space depends on, if any
    max_frequency: float = 1.0
    eigenvalue: float | None = None

    @property
    def size(self) -> int:
        if self.coeff_matrix is not None:
            return self.coeff_matrix.shape[0]
        return len(self.basis)

    def values(self, X) -> np.ndarray:
        """Basis values at ambient points, shape (npoints, m)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        raw = np.stack([f.values(X) for f in self.basis], axis=1)
        if self.coeff_matrix is not None:
            raw = raw @ self.coeff_matrix.T
        return raw

    def gradients(self, X) -> np.ndarray:
        """Ambient basis gradients, shape (npoints, m, N)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        raw = np.stack([f.gradients(X) for f in self.basis], axis=1)
        if self.coeff_matrix is not None:
            raw = np.einsum("af,kfN->kaN", self.coeff_matrix, raw)
        return raw

    def evaluate(self, coeffs, X) -> np.ndarray:
        """The member function sum_j c_j f_j at ambient points."""
        return self.values(X) @ np.asarray(coeffs, dtype=float)

    def gram(self) -> np.ndarray:
        """L2 Gram matrix of the (recombined) basis by quadrature."""
        _, points, weights = self.manifold.quadrature()
        V = self.values(points)
        return (V * weights[:, None]).T @ V


def orthonormalize(space: FunctionSpace, inner_product: str = "L2", gram=None) -> FunctionSpace:
    """Recombine the basis so the Gram matrix becomes the identity.

    ``inner_product`` is ``"L2"`` (Gram computed by quadrature) or
    ``"given-gram"`` (caller supplies the matrix).  A Gram matrix that is
    singular up to 1e-12 of its largest eigenvalue raises
    :class:`DegenerateSpaceError`.
    """
    if inner_product == "L2":
        G = space.gram()
    elif inner_product == "given-gram":
        if gram is None:
            raise ValueError("given-gram requires the gram argument")
        G = np.asarray(gram, dtype=float)
    else:
        raise ValueError("inner_product must be 'L2' or 'given-gram'")
    eigs = np.linalg.eigvalsh(G)
    if eigs.min() < 1e-12 * eigs.max():
        raise DegenerateSpaceError("degenerate-space: Gram matrix is numerically singular")
    L = np.linalg.cholesky(G)
    T = np.linalg.inv(L)
    combined = T if space.coeff_matrix is None else T @ space.coeff_matrix
    return replace(space, coeff_matrix=combined)


def theta(space: FunctionSpace, X) -> np.ndarray:
    """Unit evaluation vectors theta(x), shape (npoints, m)."""
    V = space.values(X)
    norms = np.linalg.norm(V, axis=1)
    if np.any(norms < _VALUE_EPS):
        bad = int(np.argmin(norms))
        raise ValueConditionError(
            f"value-condition-violated: all basis functions vanish near point index {bad}"
        )
    return V / norms[:, None]


def pullback_metric(space: FunctionSpace, X, frames=None, coords=None) -> np.ndarray:
    """Pull-back metric matrices G(x) in the orthonormal frame, (k, n, n).

    ``frames`` may be passed to avoid recomputing them; otherwise chart
    coordinates must be supplied so the manifold can provide frames.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if frames is None:
        if coords is None:
            raise ValueError("either frames or coords are required")
        frames = space.manifold.frames(coords)
    V = space.values(X)
    norms = np.linalg.norm(V, axis=1)
    if np.any(norms < _VALUE_EPS):
        raise ValueConditionError("value-condition-violated: theta is undefined at a node")
    th = V / norms[:, None]
    D = np.einsum("kmN,kaN->kma", space.gradients(X), frames)
    tangential = D - th[:, :, None] * np.einsum("km,kma->ka", th, D)[:, None, :]
    tangential /= norms[:, None, None]
    return np.einsum("kma,kmb->kab", tangential, tangential)


def f_ellipsoid(space: FunctionSpace, X, frames=None, coords=None) -> Ellipsoid:
    """The cotangent ellipsoid at a single point, in frame coordinates."""
    G = pullback_metric(space, X, frames=frames, coords=coords)
    if G.shape[0] != 1:
        raise ValueError("f_ellipsoid expects a single point")
    return Ellipsoid(G[0])


def finite_difference_audit(space: FunctionSpace, coords, h: float = 1e-5) -> float:
    """Max deviation between analytic and central-difference gradients.

    Differences are taken in chart coordinates and compared against the
    analytic ambient gradient contracted with the chart tangents; the
    deviation is relative to the gradient scale.
    """
    if not 1e-7 <= h <= 1e-3:
        raise ValueError("step size h must lie in [1e-7, 1e-3]")
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    manifold = space.manifold
    X = manifold.embed(coords)
    tangents = manifold.chart_tangents(coords)
    analytic = np.einsum("kmN,kaN->kma", space.gradients(X), tangents)
    worst = 0.0
    scale = max(1.0, float(np.abs(analytic).max()))
    for a in range(manifold.dim):
        step = np.zeros_like(coords)
        step[:, a] = h
        plus = space.values(manifold.embed(coords + step))
        minus = space.values(manifold.embed(coords - step))
        fd = (plus - minus) / (2.0 * h)
        worst = max(worst, float(np.abs(fd - analytic[:, :, a]).max()))
    return worst / scale


# ---------------------------------------------------------------------------
# constructors

def linear_space(manifold: Manifold, factor: int | None = None) -> FunctionSpace:
    """Restrictions of ambient linear coordinates.

    On a torus product, ``factor`` selects the coordinate plane of one
    circle factor (the natural space for that slot); elsewhere all
    ambient coordinates are used.
    """
    if isinstance(manifold, ProductManifold) and all(
        isinstance(f, Circle) for f in manifold.factors
    ):
        if factor is None:
            raise ValueError("linear spaces on a torus need the circle factor index")
        idx = [2 * factor, 2 * factor + 1]
        basis = [AmbientCoordinate(i, manifold.ambient_dim) for i in idx]
        return FunctionSpace(
            manifold, tuple(basis), label=f"linear[{factor}]", factor=factor, max_frequency=1.0,
            eigenvalue=1.0,
        )
    basis = [AmbientCoordinate(i, manifold.ambient_dim) for i in range(manifold.ambient_dim)]
    eig = {Circle: 1.0, Sphere2: 2.0}.get(type(manifold))
    return FunctionSpace(manifold, tuple(basis), label="linear", max_frequency=1.0, eigenvalue=eig)


def constant_space(manifold: Manifold) -> FunctionSpace:
    value = 1.0 / math.sqrt(manifold.volume())
    return FunctionSpace(
        manifold,
        (ConstantFunction(value, manifold.ambient_dim),),
        label="const",
        max_frequency=0.0,
        eigenvalue=0.0,
    )


def _torus_frequencies(n_factors: int, lam: float):
    """Integer frequency vectors with |k|^2 = lam, one per antipodal pair."""
    bound = int(math.isqrt(int(round(lam))) + 1)
    found = []
    for point in np.ndindex(*([2 * bound + 1] * n_factors)):
        k = np.array(point) - bound
        if abs(float(k @ k) - lam) > 1e-9:
            continue
        nonzero = k[k != 0]
        if len(nonzero) == 0 or nonzero[0] < 0:
            continue
        found.append(k)
    return found


def eigenspace(manifold: Manifold, lam: float) -> FunctionSpace:
    """The Laplace eigenspace H(lambda) for the supported manifolds."""
    if lam <= 0:
        raise BadEigenvalueError("bad-eigenvalue: lambda must be positive")
    if isinstance(manifold, Circle):
        k = math.sqrt(lam)
        if abs(k - round(k)) > 1e-9:
            raise BadEigenvalueError("bad-eigenvalue: circle eigenvalues are squares k^2")
        k = int(round(k))
        basis = (TorusTrig([k], "cos"), TorusTrig([k], "sin"))
        return FunctionSpace(
            manifold, basis, label=f"eig {lam:g}", factor=0, max_frequency=k, eigenvalue=float(lam)
        )
    if isinstance(manifold, Sphere2):
        l = (-1.0 + math.sqrt(1.0 + 4.0 * lam)) / 2.0
        if abs(l - round(l)) > 1e-9:
            raise BadEigenvalueError("bad-eigenvalue: sphere eigenvalues are l(l+1)")
        l = int(round(l))
        basis = tuple(SphericalHarmonicFunction(l, m) for m in range(-l, l + 1))
        return FunctionSpace(
            manifold, basis, label=f"eig {lam:g}", max_frequency=l, eigenvalue=float(lam)
        )
    if isinstance(manifold, ProductManifold) and all(
        isinstance(f, Circle) for f in manifold.factors
    ):
        freqs = _torus_frequencies(len(manifold.factors), lam)
        if not freqs:
            raise BadEigenvalueError("bad-eigenvalue: not a sum of squares for this torus")
        basis = []
        for k in freqs:
            basis.append(TorusTrig(k, "cos"))
            basis.append(TorusTrig(k, "sin"))
        support = {i for k in freqs for i in np.nonzero(k)[0]}
        factor = support.pop() if len(support) == 1 else None
        return FunctionSpace(
            manifold,
            tuple(basis),
            label=f"eig {lam:g}",
            factor=factor,
            max_frequency=float(max(np.abs(k).max() for k in freqs)),
            eigenvalue=float(lam),
        )
    raise BadEigenvalueError(f"bad-eigenvalue: eigenspaces unsupported on {manifold.name}")


def custom_torus_space(manifold: Manifold, freq_vectors) -> FunctionSpace:
    """span{cos(k.theta), sin(k.theta)} for the given frequency vectors."""
    if not (
        isinstance(manifold, ProductManifold)
        and all(isinstance(f, Circle) for f in manifold.factors)
    ):
        raise ValueError("custom trig spaces require a torus product")
    basis = []
    support = set()
    max_freq = 1.0
    for k in freq_vectors:
        k = np.asarray(k, dtype=float)
        if len(k) != len(manifold.factors):
            raise ValueError("frequency vector length must match the torus factors")
        basis.append(TorusTrig(k, "cos"))
        if np.any(k != 0):
            basis.append(TorusTrig(k, "sin"))
        support |= set(np.nonzero(k)[0].tolist())
        max_freq = max(max_freq, float(np.abs(k).max()))
    factor = support.pop() if len(support) == 1 else None
    label = "custom " + ";".join(str(np.asarray(k).astype(int).tolist()) for k in freq_vectors)
    return FunctionSpace(
        manifold, tuple(basis), label=label, factor=factor, max_frequency=max_freq
    )


def space_from_descriptor(manifold: Manifold, text: str, slot: int = 0) -> FunctionSpace:
    """Parse a space descriptor: ``linear``, ``linear <i>``, ``eig <lam>``,
    ``eig lambda=<lam>``, ``const``, or ``custom (k1,k2);(k1,k2)``."""
    text = text.strip()
    lowered = text.lower()
    if lowered.startswith("linear"):
        rest = lowered[len("linear") :].strip()
        factor = int(rest) if rest else None
        if isinstance(manifold, ProductManifold) and factor is None:
            factor = slot
        return linear_space(manifold, factor=factor)
    if lowered.startswith("eig"):
        rest = lowered[len("eig") :].strip()
        if rest.startswith("lambda="):
            rest = rest[len("lambda=") :]
        return eigenspace(manifold, float(rest))
    if lowered == "const":
        return constant_space(manifold)
    if lowered.startswith("custom"):
        rest = text[len("custom") :].strip()
        vectors = []
        for chunk in rest.split(";"):
            chunk = chunk.strip().strip("()")
            if chunk:
                vectors.append([float(c) for c in chunk.replace(",", " ").split()])
        return custom_torus_space(manifold, vectors)
    raise ValueError(
        f"unknown space descriptor {text!r}; supported: linear[ i], eig <lambda>, const, custom (..);(..)"
    )
