"""Volumes of unit spheres and balls.

``sphere_volume(p)`` is the p-dimensional Hausdorff measure of the unit
sphere S^p (so ``sphere_volume(1) == 2*pi`` and ``sphere_volume(2) == 4*pi``),
``ball_volume(p)`` the Lebesgue measure of the unit ball in R^p.  The two
satisfy ``ball_volume(n) * sphere_volume(n) == 2 * (2*pi)**n / n!``.
"""

import math
from dataclasses import dataclass


def sphere_volume(p: int) -> float:
    """Volume of the unit sphere S^p embedded in R^(p+1)."""
    if p < 0:
        raise ValueError("sphere dimension must be >= 0")
    return 2.0 * math.pi ** ((p + 1) / 2.0) / math.gamma((p + 1) / 2.0)


def ball_volume(p: int) -> float:
    """Volume of the unit ball in R^p (1.0 for p == 0)."""
    if p < 0:
        raise ValueError("ball dimension must be >= 0")
    return math.pi ** (p / 2.0) / math.gamma(p / 2.0 + 1.0)


@dataclass(frozen=True)
class DimensionalConstants:
    """Sphere and ball volumes for one dimension, with the product identity."""

    p: int
    sigma_p: float
    v_p: float

    @classmethod
    def for_dimension(cls, p: int) -> "DimensionalConstants":
        return cls(p=p, sigma_p=sphere_volume(p), v_p=ball_volume(p))

    def identity_residual(self) -> float:
        """|v_p * sigma_p - 2 (2 pi)^p / p!|, which is zero analytically."""
        target = 2.0 * (2.0 * math.pi) ** self.p / math.factorial(self.p)
        return abs(self.v_p * self.sigma_p - target)
