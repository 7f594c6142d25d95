"""Supported manifolds: circles, flat torus products, the round 2-sphere,
and products of spheres.

Every manifold carries a chart-coordinate quadrature rule, an embedding
into an ambient Euclidean space, orthonormal tangent frames, and the
chart tangent vectors d(embed)/d(coordinate) used by the derivative
audit.  All differential geometry downstream happens in the ambient
coordinates through these frames.
"""

import math

import numpy as np
from scipy.special import roots_legendre


class Manifold:
    name: str
    dim: int
    ambient_dim: int

    def volume(self) -> float:
        raise NotImplementedError

    def quadrature(self):
        """(coords (k, dim), ambient points (k, N), weights (k,))."""
        raise NotImplementedError

    def embed(self, coords) -> np.ndarray:
        raise NotImplementedError

    def frames(self, coords) -> np.ndarray:
        """Orthonormal tangent frames, shape (k, dim, N)."""
        raise NotImplementedError

    def chart_tangents(self, coords) -> np.ndarray:
        """d embed / d coordinate, shape (k, dim, N)."""
        raise NotImplementedError

    def refine(self, factor: int = 2) -> "Manifold":
        raise NotImplementedError

    def config(self) -> dict:
        raise NotImplementedError


class Circle(Manifold):
    """The unit circle in R^2 with arc-length parameter."""

    def __init__(self, nodes: int = 256):
        self.nodes = int(nodes)
        self.name = "circle"
        self.dim = 1
        self.ambient_dim = 2

    def volume(self):
        return 2.0 * math.pi

    def quadrature(self):
        t = np.arange(self.nodes) * 2.0 * math.pi / self.nodes
        coords = t[:, None]
        return coords, self.embed(coords), np.full(self.nodes, 2.0 * math.pi / self.nodes)

    def embed(self, coords):
        t = np.atleast_2d(coords)[:, 0]
        return np.stack([np.cos(t), np.sin(t)], axis=1)

    def frames(self, coords):
        t = np.atleast_2d(coords)[:, 0]
        return np.stack([-np.sin(t), np.cos(t)], axis=1)[:, None, :]

    chart_tangents = frames

    def refine(self, factor=2):
        return Circle(self.nodes * factor)

    def config(self):
        return {"type": "circle", "nodes": self.nodes}


class Sphere2(Manifold):
    """The round unit sphere in R^3; Gauss-Legendre x trapezoid quadrature."""

    def __init__(self, n_theta: int = 50, n_phi: int = 100):
        self.n_theta = int(n_theta)
        self.n_phi = int(n_phi)
        self.name = "s2"
        self.dim = 2
        self.ambient_dim = 3

    def volume(self):
        return 4.0 * math.pi

    def quadrature(self):
        x, w = roots_legendre(self.n_theta)
        theta = np.arccos(x)
        phi = np.arange(self.n_phi) * 2.0 * math.pi / self.n_phi
        T, P = np.meshgrid(theta, phi, indexing="ij")
        coords = np.stack([T.ravel(), P.ravel()], axis=1)
        weights = np.outer(w, np.full(self.n_phi, 2.0 * math.pi / self.n_phi)).ravel()
        return coords, self.embed(coords), weights

    def embed(self, coords):
        coords = np.atleast_2d(coords)
        th, ph = coords[:, 0], coords[:, 1]
        st = np.sin(th)
        return np.stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)], axis=1)

    def frames(self, coords):
        coords = np.atleast_2d(coords)
        th, ph = coords[:, 0], coords[:, 1]
        ct, st = np.cos(th), np.sin(th)
        cp, sp = np.cos(ph), np.sin(ph)
        e_theta = np.stack([ct * cp, ct * sp, -st], axis=1)
        e_phi = np.stack([-sp, cp, np.zeros_like(ph)], axis=1)
        return np.stack([e_theta, e_phi], axis=1)

    def chart_tangents(self, coords):
        frames = self.frames(coords)
        st = np.sin(np.atleast_2d(coords)[:, 0])
        out = frames.copy()
        out[:, 1, :] *= st[:, None]
        return out

    def refine(self, factor=2):
        return Sphere2(self.n_theta * factor, self.n_phi * factor)

    def config(self):
        return {"type": "s2", "n_theta": self.n_theta, "n_phi": self.n_phi}


class ProductManifold(Manifold):
    """Cartesian product with block embedding and product quadrature."""

    def __init__(self, factors, name=None):
        self.factors = tuple(factors)
        self.dim = sum(f.dim for f in self.factors)
        self.ambient_dim = sum(f.ambient_dim for f in self.factors)
        self.name = name or "x".join(f.name for f in self.factors)
        self._coord_slices = []
        self._ambient_slices = []
        c = a = 0
        for f in self.factors:
            self._coord_slices.append(slice(c, c + f.dim))
            self._ambient_slices.append(slice(a, a + f.ambient_dim))
            c += f.dim
            a += f.ambient_dim

    def volume(self):
        return float(np.prod([f.volume() for f in self.factors]))

    def quadrature(self):
        parts = [f.quadrature() for f in self.factors]
        coords_list = [p[0] for p in parts]
        weights_list = [p[2] for p in parts]
        sizes = [len(w) for w in weights_list]
        grids = np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij")
        idx = [g.ravel() for g in grids]
        coords = np.concatenate([coords_list[i][idx[i]] for i in range(len(parts))], axis=1)
        weights = np.ones(len(idx[0]))
        for i, w in enumerate(weights_list):
            weights = weights * w[idx[i]]
        return coords, self.embed(coords), weights

    def embed(self, coords):
        coords = np.atleast_2d(coords)
        blocks = [
            f.embed(coords[:, self._coord_slices[i]]) for i, f in enumerate(self.factors)
        ]
        return np.concatenate(blocks, axis=1)

    def _block_tangents(self, coords, getter):
        coords = np.atleast_2d(coords)
        k = coords.shape[0]
        out = np.zeros((k, self.dim, self.ambient_dim))
        row = 0
        for i, f in enumerate(self.factors):
            block = getter(f)(coords[:, self._coord_slices[i]])
            out[:, row : row + f.dim, self._ambient_slices[i]] = block
            row += f.dim
        return out

    def frames(self, coords):
        return self._block_tangents(coords, lambda f: f.frames)

    def chart_tangents(self, coords):
        return self._block_tangents(coords, lambda f: f.chart_tangents)

    def refine(self, factor=2):
        return ProductManifold([f.refine(factor) for f in self.factors], name=self.name)

    def config(self):
        return {"type": "product", "name": self.name, "factors": [f.config() for f in self.factors]}


class TorusProduct(ProductManifold):
    """Flat n-torus as a product of unit circles in R^(2n)."""

    def __init__(self, n_factors: int, nodes_per_factor: int | None = None):
        if nodes_per_factor is None:
            nodes_per_factor = {1: 256, 2: 64, 3: 24}.get(n_factors, 16)
        super().__init__(
            [Circle(nodes_per_factor) for _ in range(n_factors)], name=f"torus{n_factors}"
        )
        self.n_factors = n_factors
        self.nodes_per_factor = nodes_per_factor

    def refine(self, factor=2):
        return TorusProduct(self.n_factors, self.nodes_per_factor * factor)

    def config(self):
        return {"type": "torus", "factors": self.n_factors, "nodes": self.nodes_per_factor}


def product_of_spheres(dims, name=None) -> Manifold:
    """Product of unit spheres of the given dimensions (1 and 2 supported)."""
    factors = []
    for d in dims:
        if d == 1:
            factors.append(Circle())
        elif d == 2:
            factors.append(Sphere2())
        else:
            raise ValueError("sphere factors of dimension 1 and 2 are supported")
    if len(factors) == 1:
        return factors[0]
    return ProductManifold(factors, name=name)


def manifold_from_name(text: str) -> Manifold:
    """Build a manifold from a CLI descriptor such as ``torus2`` or ``s2``."""
    text = text.strip().lower()
    if text in ("circle", "s1", "torus1"):
        return Circle()
    if text == "s2":
        return Sphere2()
    if text.startswith("torus"):
        k = int(text[len("torus") :])
        if k < 1 or k > 4:
            raise ValueError("torus factors must be 1..4")
        return TorusProduct(k)
    if text.startswith("spheres"):
        dims = [int(c) for c in text[len("spheres") :].split("x") if c]
        return product_of_spheres(dims)
    raise ValueError(
        f"unknown manifold {text!r}; supported: circle (s1), s2, torus<N>, spheres<d>x<d>..."
    )
