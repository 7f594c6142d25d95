"""Even harmonic expansions on the circle and the 2-sphere.

Functions on the line Grassmannian of R^2 or R^3 are even functions on
the unit sphere.  In the plane they are stored as Fourier coefficients
of even frequencies; on the sphere as real spherical-harmonic
coefficients of even degrees.  The quadrature grid used throughout is
Gauss-Legendre in cos(theta) times a trapezoid rule in phi.
"""

import math

import numpy as np
from scipy.special import lpmv, roots_legendre

_SPHERE_GRID_CACHE = {}


def sphere_quadrature(n_theta: int = 64, n_phi: int = 128):
    """Nodes (k,3) and weights (k,) over S^2; the weights sum to 4*pi."""
    key = (n_theta, n_phi)
    if key not in _SPHERE_GRID_CACHE:
        x, w = roots_legendre(n_theta)
        phi = np.arange(n_phi) * 2.0 * np.pi / n_phi
        st = np.sqrt(1.0 - x**2)
        U = np.stack(
            [
                np.outer(st, np.cos(phi)).ravel(),
                np.outer(st, np.sin(phi)).ravel(),
                np.outer(x, np.ones(n_phi)).ravel(),
            ],
            axis=1,
        )
        W = np.outer(w, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
        U.flags.writeable = False
        W.flags.writeable = False
        _SPHERE_GRID_CACHE[key] = (U, W)
    return _SPHERE_GRID_CACHE[key]


# ---------------------------------------------------------------------------
# circle: even Fourier series  f(t) = sum_j a_j cos(2jt) + b_j sin(2jt)

def eval_circle_even(coeffs: np.ndarray, theta: np.ndarray) -> np.ndarray:
    coeffs = np.atleast_2d(coeffs)
    theta = np.asarray(theta, dtype=float)
    freqs = 2.0 * np.arange(coeffs.shape[0])
    angles = np.multiply.outer(theta, freqs)
    return np.cos(angles) @ coeffs[:, 0] + np.sin(angles) @ coeffs[:, 1]


def project_circle_even(fn, bandwidth: int, oversample: int = 8) -> np.ndarray:
    """Fourier coefficients (m, 2) of an even-pi-periodic function.

    ``fn`` maps an angle array to values; frequencies above ``bandwidth``
    are discarded (``bandwidth`` counts actual frequencies, so harmonics
    0, 2, ..., bandwidth are kept).
    """
    m = bandwidth // 2 + 1
    n = max(oversample * (bandwidth + 1), 256)
    theta = np.arange(n) * 2.0 * np.pi / n
    F = np.fft.rfft(fn(theta))
    coeffs = np.zeros((m, 2))
    coeffs[0, 0] = F[0].real / n
    for j in range(1, m):
        coeffs[j, 0] = 2.0 * F[2 * j].real / n
        coeffs[j, 1] = -2.0 * F[2 * j].imag / n
    return coeffs


# ---------------------------------------------------------------------------
# sphere: real orthonormal spherical harmonics of even degree

def even_degree_orders(bandwidth: int):
    """(l, m) pairs for even degrees l <= bandwidth."""
    return [(l, m) for l in range(0, bandwidth + 1, 2) for m in range(-l, l + 1)]


def _norm_constant(l, m):
    return math.sqrt((2 * l + 1) / (4.0 * math.pi) * math.factorial(l - m) / math.factorial(l + m))


def real_sph_harm(l: int, m: int, U: np.ndarray) -> np.ndarray:
    """Real orthonormal spherical harmonic at unit vectors U (k, 3)."""
    U = np.atleast_2d(U)
    ct = np.clip(U[:, 2], -1.0, 1.0)
    phi = np.arctan2(U[:, 1], U[:, 0])
    am = abs(m)
    P = lpmv(am, l, ct)
    K = _norm_constant(l, am)
    if m == 0:
        return K * P
    if m > 0:
        return math.sqrt(2.0) * K * P * np.cos(am * phi)
    return math.sqrt(2.0) * K * P * np.sin(am * phi)


def sph_harm_matrix(lm_pairs, U: np.ndarray) -> np.ndarray:
    """Matrix (npoints, ncoeffs) of real spherical harmonics."""
    U = np.atleast_2d(U)
    return np.stack([real_sph_harm(l, m, U) for l, m in lm_pairs], axis=1)


def project_sphere_even(fn, bandwidth: int, n_theta: int = 96, n_phi: int = 192):
    """Even-degree spherical-harmonic coefficients of ``fn`` on unit vectors."""
    U, W = sphere_quadrature(n_theta, n_phi)
    lm = even_degree_orders(bandwidth)
    values = fn(U)
    Y = sph_harm_matrix(lm, U)
    return (W * values) @ Y, lm


def real_sph_harm_with_grad(l: int, m: int, U: np.ndarray):
    """Values and ambient (tangential) gradients of a real spherical harmonic.

    The harmonic is extended 0-homogeneously, so the gradient at a unit
    vector is tangent to the sphere.
    """
    U = np.atleast_2d(U)
    ct = np.clip(U[:, 2], -1.0, 1.0)
    st = np.sqrt(np.maximum(1.0 - ct**2, 0.0))
    phi = np.arctan2(U[:, 1], U[:, 0])
    am = abs(m)
    K = _norm_constant(l, am)
    P = lpmv(am, l, ct)
    P_prev = lpmv(am, l - 1, ct) if l - 1 >= am else np.zeros_like(ct)
    st_safe = np.maximum(st, 1e-12)
    dP_dtheta = (l * ct * P - (l + am) * P_prev) / st_safe
    if m == 0:
        trig, dtrig = np.ones_like(phi), np.zeros_like(phi)
        scale = K
    elif m > 0:
        trig, dtrig = np.cos(am * phi), -am * np.sin(am * phi)
        scale = math.sqrt(2.0) * K
    else:
        trig, dtrig = np.sin(am * phi), am * np.cos(am * phi)
        scale = math.sqrt(2.0) * K
    values = scale * P * trig
    cp, sp = np.cos(phi), np.sin(phi)
    e_theta = np.stack([ct * cp, ct * sp, -st], axis=1)
    e_phi = np.stack([-sp, cp, np.zeros_like(phi)], axis=1)
    d_theta = scale * dP_dtheta * trig
    d_phi = scale * P * dtrig / st_safe
    return values, d_theta[:, None] * e_theta + d_phi[:, None] * e_phi
