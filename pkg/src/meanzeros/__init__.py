"""Average zero counts of random function systems via convex geometry.

The package predicts the mean number of isolated common zeros of random
functions drawn from Euclidean function spaces on a manifold, by
integrating pointwise mixed volumes of the associated cotangent
ellipsoids, and double-checks the prediction (and the supporting density
identities) with independent Monte Carlo oracles.
"""

from .bodies import (
    Ball,
    ConvexBody,
    Ellipsoid,
    MinkowskiSum,
    Segment,
    Zonotope,
    body_from_dict,
    body_from_json,
    check_alexandrov_fenchel,
    mixed_volume,
    projection_volume,
    support,
    volume,
)
from .constants import DimensionalConstants, ball_volume, sphere_volume

__all__ = [
    "Ball",
    "ConvexBody",
    "DimensionalConstants",
    "Ellipsoid",
    "MinkowskiSum",
    "Segment",
    "Zonotope",
    "ball_volume",
    "body_from_dict",
    "body_from_json",
    "check_alexandrov_fenchel",
    "mixed_volume",
    "projection_volume",
    "sphere_volume",
    "support",
    "volume",
]
