"""The cosine transform on the line Grassmannian of R^2 and R^3.

With the Haar probability measure on Gr(1, V), the transform

    T(f)(G) = integral over Gr(1,V) of f(H) |cos(H, G)| dH

acts diagonally on even harmonics.  The multipliers are precomputed by
piecewise Gauss-Legendre quadrature (the integrands are smooth on each
piece, so the cached values are exact to machine precision) and the
transform and its inverse are coefficient-wise multiplications.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_legendre, roots_legendre

from .errors import NotEvenError, NotInRangeError
from .harmonics import (
    eval_circle_even,
    even_degree_orders,
    project_circle_even,
    project_sphere_even,
    sph_harm_matrix,
)

_MULTIPLIER_CACHE = {}


def _gauss(fn, a, b, order=120):
    x, w = roots_legendre(order)
    t = 0.5 * (b - a) * x + 0.5 * (b + a)
    return 0.5 * (b - a) * float(np.sum(w * fn(t)))


def circle_multiplier(freq: int) -> float:
    """Multiplier of cos/sin(freq * t) under the transform in the plane."""
    if freq % 2 != 0:
        raise NotEvenError("not-even: odd circle frequency")
    key = (2, freq)
    if key not in _MULTIPLIER_CACHE:
        fn = lambda t: np.abs(np.cos(t)) * np.cos(freq * t)
        val = _gauss(fn, -np.pi / 2, np.pi / 2) + _gauss(fn, np.pi / 2, 3 * np.pi / 2)
        _MULTIPLIER_CACHE[key] = val / (2.0 * np.pi)
    return _MULTIPLIER_CACHE[key]


def sphere_multiplier(degree: int) -> float:
    """Multiplier of degree-l spherical harmonics (Funk-Hecke)."""
    if degree % 2 != 0:
        raise NotEvenError("not-even: odd spherical-harmonic degree")
    key = (3, degree)
    if key not in _MULTIPLIER_CACHE:
        _MULTIPLIER_CACHE[key] = _gauss(lambda t: t * eval_legendre(degree, t), 0.0, 1.0)
    return _MULTIPLIER_CACHE[key]


@dataclass(frozen=True)
class HarmonicGauge:
    """A band-limited even gauge function on Gr(1, R^dim).

    For ``dim == 2`` the coefficients are an (m, 2) array over frequencies
    0, 2, ..., 2(m-1); for ``dim == 3`` a flat vector over the (l, m)
    pairs of :func:`even_degree_orders`.
    """

    dim: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float)
        if self.dim == 2:
            coeffs = np.atleast_2d(coeffs)
            if coeffs.shape[1] != 2:
                raise ValueError("plane gauge coefficients must have shape (m, 2)")
        elif self.dim == 3:
            coeffs = np.ravel(coeffs)
            n = len(even_degree_orders(self.bandwidth_for(len(coeffs))))
            if n != len(coeffs):
                raise ValueError("coefficient count does not match an even bandwidth")
        else:
            raise ValueError("gauge dimension must be 2 or 3")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    @staticmethod
    def bandwidth_for(n_coeffs: int) -> int:
        total, l = 0, 0
        while True:
            total += 2 * l + 1
            if total == n_coeffs:
                return l
            if total > n_coeffs:
                raise ValueError("coefficient count does not match an even bandwidth")
            l += 2

    @property
    def bandwidth(self) -> int:
        if self.dim == 2:
            return 2 * (self.coeffs.shape[0] - 1)
        return self.bandwidth_for(len(self.coeffs))

    @classmethod
    def constant(cls, dim: int, value: float, bandwidth: int = 0) -> "HarmonicGauge":
        if dim == 2:
            coeffs = np.zeros((bandwidth // 2 + 1, 2))
            coeffs[0, 0] = value
            return cls(2, coeffs)
        lm = even_degree_orders(bandwidth)
        coeffs = np.zeros(len(lm))
        coeffs[0] = value * np.sqrt(4.0 * np.pi)  # Y_00 = 1/sqrt(4 pi)
        return cls(3, coeffs)

    @classmethod
    def from_function(cls, dim: int, fn, bandwidth: int) -> "HarmonicGauge":
        """Expand a function of unit direction vectors (evenized first)."""
        if dim == 2:
            even_fn = lambda t: 0.5 * (
                fn(np.stack([np.cos(t), np.sin(t)], axis=1))
                + fn(-np.stack([np.cos(t), np.sin(t)], axis=1))
            )
            return cls(2, project_circle_even(even_fn, bandwidth))
        coeffs, _ = project_sphere_even(lambda U: 0.5 * (fn(U) + fn(-U)), bandwidth)
        return cls(3, coeffs)

    @classmethod
    def from_dense_circle(cls, dense, tol: float = 1e-12) -> "HarmonicGauge":
        """Build a plane gauge from (freq, cos, sin) rows over all frequencies.

        Rows with odd frequency and a coefficient above ``tol`` raise
        :class:`NotEvenError`.
        """
        dense = np.atleast_2d(np.asarray(dense, dtype=float))
        max_even = 0
        for freq, a, b in dense:
            if int(freq) % 2 == 1 and max(abs(a), abs(b)) > tol:
                raise NotEvenError(f"not-even: frequency {int(freq)} present")
            if int(freq) % 2 == 0:
                max_even = max(max_even, int(freq))
        coeffs = np.zeros((max_even // 2 + 1, 2))
        for freq, a, b in dense:
            if int(freq) % 2 == 0:
                coeffs[int(freq) // 2] += (a, b)
        return cls(2, coeffs)

    def evaluate(self, U: np.ndarray) -> np.ndarray:
        """Gauge values at unit direction vectors U (k, dim)."""
        U = np.atleast_2d(U)
        if self.dim == 2:
            return eval_circle_even(self.coeffs, np.arctan2(U[:, 1], U[:, 0]))
        return sph_harm_matrix(even_degree_orders(self.bandwidth), U) @ self.coeffs

    def __call__(self, U):
        return self.evaluate(U)

    def multipliers(self) -> np.ndarray:
        if self.dim == 2:
            return np.array([circle_multiplier(2 * j) for j in range(self.coeffs.shape[0])])
        return np.array([sphere_multiplier(l) for l, _ in even_degree_orders(self.bandwidth)])


def cosine_transform(gauge: HarmonicGauge) -> HarmonicGauge:
    """Coefficient-wise cosine transform; preserves the bandwidth."""
    mult = gauge.multipliers()
    if gauge.dim == 2:
        return HarmonicGauge(2, gauge.coeffs * mult[:, None])
    return HarmonicGauge(3, gauge.coeffs * mult)


def inverse_cosine_transform(gauge: HarmonicGauge) -> HarmonicGauge:
    """Coefficient-wise inverse; raises if a represented multiplier vanishes."""
    mult = gauge.multipliers()
    if np.any(np.abs(mult) < 1e-300):
        raise NotInRangeError("not-in-range: zero transform multiplier")
    if gauge.dim == 2:
        return HarmonicGauge(2, gauge.coeffs / mult[:, None])
    return HarmonicGauge(3, gauge.coeffs / mult)
