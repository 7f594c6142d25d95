"""Quadrature checks of the width/brightness integral identities.

Both checks express the volume (or a projected volume) of a smooth
centrally symmetric body through the inverse cosine transform of its
width function.

Measure conventions: the cosine transform here is taken with the Haar
*probability* measure on Gr(1, V), while the classical statement of the
first identity integrates over the unit sphere with the unnormalized
surface measure and the transform T f = int_{S^{n-1}} f |cos| ds.  The
two transforms differ by the factor sigma_{n-1} (the sphere volume), so
T_sphere^{-1} h_A = T_1^{-1}(s_A) / (2 sigma_{n-1}) for a symmetric body
(s_A = 2 h_A).  All routines below fix that bridge once and integrate in
the normalized convention.
"""

import math

import numpy as np
from scipy.special import roots_legendre

from .bodies import Ellipsoid, _primitives, volume
from .constants import ball_volume, sphere_volume
from .errors import NotSmoothError
from .harmonics import sphere_quadrature
from .transform import HarmonicGauge, inverse_cosine_transform


def _smooth_ellipsoid(body):
    """The body as a single positive-definite ellipsoid, or raise."""
    prims = _primitives([(1.0, body)])
    if len(prims) != 1 or prims[0][0] != "E":
        raise NotSmoothError("not-smooth: a positive-definite ellipsoid is required")
    Q = prims[0][1]
    eigs = np.linalg.eigvalsh(Q)
    if eigs.min() <= 1e-12 * eigs.max():
        raise NotSmoothError("not-smooth: rank-deficient shape matrix")
    return Ellipsoid(Q)


def _width_preimage(body, bandwidth):
    gauge = HarmonicGauge.from_function(
        body.dim, lambda U: 2.0 * body.support_many(U), bandwidth
    )
    return inverse_cosine_transform(gauge)


def alesker_identity_residual(body, bandwidth: int | None = None, nodes: int = 256) -> float:
    """Relative residual of

        int_{S^{n-1}} T^{-1} h_A(x) V_{n-1}(proj_{x perp} A) dx = n/2 vol(A)

    for a smooth centered ellipsoid in R^2 or R^3 (sphere convention; see
    the module docstring for the bridge to the normalized transform).
    """
    body = _smooth_ellipsoid(body)
    n = body.dim
    if n not in (2, 3):
        raise NotSmoothError("not-smooth: supported dimensions are 2 and 3")
    if bandwidth is None:
        bandwidth = 32 if n == 2 else 16
    phi = _width_preimage(body, bandwidth)
    Q = body.Q
    if n == 2:
        th = np.arange(4 * nodes) * 2.0 * np.pi / (4 * nodes)
        X = np.stack([np.cos(th), np.sin(th)], axis=1)
        perp = np.stack([-X[:, 1], X[:, 0]], axis=1)
        brightness = 2.0 * body.support_many(perp)
        lhs = float(np.sum(phi.evaluate(X) * brightness)) * (2.0 * np.pi / len(th))
    else:
        U, W = sphere_quadrature(96, 192)
        # V_2 of the shadow on x^perp: pi sqrt(det of Q restricted to x^perp)
        ref = np.where(np.abs(U[:, 2:3]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
        t1 = np.cross(U, ref)
        t1 /= np.linalg.norm(t1, axis=1, keepdims=True)
        t2 = np.cross(U, t1)
        g11 = np.einsum("ki,ij,kj->k", t1, Q, t1)
        g22 = np.einsum("ki,ij,kj->k", t2, Q, t2)
        g12 = np.einsum("ki,ij,kj->k", t1, Q, t2)
        brightness = math.pi * np.sqrt(np.maximum(g11 * g22 - g12**2, 0.0))
        lhs = float(np.sum(W * phi.evaluate(U) * brightness))
    lhs /= 2.0 * sphere_volume(n - 1)  # bridge: phi = T_1^{-1}(2 h_A), sphere measure
    vol = volume(body)
    return abs(lhs - 0.5 * n * vol) / vol


def _plane_adapted_grid(subspace, n_theta=128, n_phi=256):
    """Spherical quadrature adapted to a 2-plane D in R^3.

    Gauss-Legendre in the polar angle measured from the plane normal
    (keeping the |cos(H, D)| factor smooth) times a phi trapezoid; returns
    world-coordinate nodes, weights, cos(H, D), and the unit direction of
    H^perp cap D for every node.
    """
    D = np.atleast_2d(np.asarray(subspace, dtype=float))
    d1, d2 = D
    normal = np.cross(d1, d2)
    normal /= np.linalg.norm(normal)
    x, w = roots_legendre(n_theta)
    theta = 0.5 * np.pi * (x + 1.0)
    w_theta = 0.5 * np.pi * w * np.sin(theta)
    phi = np.arange(n_phi) * 2.0 * np.pi / n_phi
    st, ct = np.sin(theta), np.cos(theta)
    U = (
        np.outer(st, np.cos(phi)).ravel()[:, None] * d1[None, :]
        + np.outer(st, np.sin(phi)).ravel()[:, None] * d2[None, :]
        + np.outer(ct, np.ones(n_phi)).ravel()[:, None] * normal[None, :]
    )
    W = np.outer(w_theta, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
    cos_hd = np.outer(st, np.ones(n_phi)).ravel()
    # H^perp cap D is the line of D orthogonal to the projection of u
    line = (
        -np.outer(st, np.sin(phi)).ravel()[:, None] * d1[None, :]
        + np.outer(st, np.cos(phi)).ravel()[:, None] * d2[None, :]
    )
    norms = np.linalg.norm(line, axis=1, keepdims=True)
    line = np.divide(line, norms, out=np.zeros_like(line), where=norms > 0)
    return U, W, cos_hd, line


def haar2_check(body, subspace, bandwidth: int = 16) -> dict:
    """Check the projected-volume identity on a 2-plane D in R^3:

        int T_1^{-1} s_A(H) cos(H, D) V_1(proj_{H perp cap D} A) dH
            = 2 V_2(proj_D A).

    Returns lhs, rhs and the relative residual.
    """
    body = _smooth_ellipsoid(body)
    if body.dim != 3:
        raise NotSmoothError("not-smooth: the check runs in R^3")
    D = np.atleast_2d(np.asarray(subspace, dtype=float))
    if D.shape != (2, 3) or np.abs(D @ D.T - np.eye(2)).max() > 1e-10:
        raise ValueError("subspace must be two orthonormal rows in R^3")
    phi = _width_preimage(body, bandwidth)
    U, W, cos_hd, line = _plane_adapted_grid(D)
    widths = 2.0 * body.support_many(line)
    lhs = float(np.sum(W * phi.evaluate(U) * cos_hd * widths)) / (4.0 * np.pi)
    from .bodies import projection_volume

    rhs = 2.0 * projection_volume(body, D)
    return {
        "identity": "haar2",
        "lhs": lhs,
        "rhs": rhs,
        "residual": abs(lhs - rhs) / abs(rhs),
    }
