"""Monte Carlo Crofton density for products of spheres.

For tangent blocks T = T_1 + ... + T_n (dim T_i = m_i) the incidence
density of the zero sets evaluates on a parallelotope with edges
theta_1, ..., theta_n as the average over unit vectors w_j in each block
of |det <theta_i|_j, w_j>|, normalized by the product of the sphere
volumes sigma_{m_i}.  The same number must come out as 1/pi^n times the
product of the per-block Euclidean 1-densities, which is estimated
independently through hyperplane sampling.
"""

import math

import numpy as np

from .constants import sphere_volume
from .measures import Parallelotope, density_product_mc, sphere_crofton_constant, subspace_measure


def _blocks(tangent_dims):
    offsets = np.cumsum([0] + list(tangent_dims))
    return [(int(offsets[i]), int(offsets[i + 1])) for i in range(len(tangent_dims))]


def omega_mc(tangent_dims, theta_edges, samples: int = 100_000, seed: int = 0, chunk: int = 262144):
    """Monte Carlo value of the Crofton density on the given parallelotope.

    ``theta_edges`` holds n edge vectors (rows) in R^(sum m_i); returns
    ``(estimate, stderr)``.
    """
    theta = np.atleast_2d(np.asarray(theta_edges, dtype=float))
    dims = list(tangent_dims)
    n = len(dims)
    if theta.shape != (n, sum(dims)):
        raise ValueError("theta must have one edge per tangent block")
    blocks = _blocks(dims)
    scale = np.prod([sphere_volume(m - 1) / sphere_volume(m) for m in dims])
    rng = np.random.default_rng(seed)
    total = int(samples)
    acc = 0.0
    acc_sq = 0.0
    done = 0
    while done < total:
        m = min(chunk, total - done)
        A = np.empty((m, n, n))
        for j, (lo, hi) in enumerate(blocks):
            w = rng.normal(size=(m, hi - lo))
            w /= np.linalg.norm(w, axis=1, keepdims=True)
            A[:, :, j] = w @ theta[:, lo:hi].T
        vals = np.abs(np.linalg.det(A))
        acc += float(vals.sum())
        acc_sq += float((vals**2).sum())
        done += m
    mean = acc / total * scale
    var = max(acc_sq / total - (acc / total) ** 2, 0.0)
    return mean, scale * math.sqrt(var / total)


def block_volume_measures(tangent_dims):
    """The per-block 1-density measures vol_{1,i} as hyperplane samplers."""
    dims = list(tangent_dims)
    total_dim = sum(dims)
    measures = []
    for j, (lo, hi) in enumerate(_blocks(dims)):
        frame = np.eye(total_dim)[lo:hi]
        measures.append(
            subspace_measure(frame, sphere_crofton_constant(dims[j]), total_dim, label=f"block{j}")
        )
    return measures


def verify_crofton_product(
    tangent_dims,
    theta_edges,
    samples: int = 1_000_000,
    tol: float = 0.02,
    seed: int = 0,
    workers: int = 1,
) -> dict:
    """Compare omega_mc with 1/pi^n times the sampled density product."""
    theta = np.atleast_2d(np.asarray(theta_edges, dtype=float))
    n = theta.shape[0]
    lhs, lhs_err = omega_mc(tangent_dims, theta, samples=samples, seed=seed)
    region = Parallelotope.centered(theta)
    degenerate = region.volume() == 0.0
    if degenerate:
        rhs, rhs_err, diag = 0.0, 0.0, {"degenerate": 0, "samples": samples}
    else:
        raw, rhs_err, diag = density_product_mc(
            block_volume_measures(tangent_dims), region, samples=samples, seed=seed + 1, workers=workers
        )
        rhs = raw / math.pi**n
        rhs_err /= math.pi**n
    scale = max(abs(lhs), abs(rhs), 1e-300)
    deviation = abs(lhs - rhs) / scale
    sigma = math.hypot(lhs_err, rhs_err)
    passed = deviation <= tol or abs(lhs - rhs) <= 3.0 * sigma
    return {
        "identity": "crofton-product",
        "lhs": lhs,
        "rhs": rhs,
        "stderr": sigma,
        "samples": diag["samples"],
        "deviation": deviation,
        "pass": bool(passed),
    }
