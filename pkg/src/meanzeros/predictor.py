"""Closed-form prediction of the average number of common zeros.

For n function spaces on an n-manifold the predicted mean count is

    n! / (2 pi)^n * integral over X of V_n(E_1(x), ..., E_n(x)) dx,

where E_i(x) is the cotangent ellipsoid of the i-th space and V_n the
mixed volume measured in the orthonormal frame.  The quadrature is the
manifold's own rule, and each node's mixed volume comes from the convex
core (analytic paths whenever every ellipsoid is representable, with a
membership-grid fallback otherwise).

Also provided: the closed form for isotropy-irreducible spaces, the
spectral upper bound, and a report for the mixed-volume (Hodge-type)
inequalities on invariant spaces.
"""

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .bodies import Ellipsoid, mixed_volume
from .constants import ball_volume, sphere_volume
from .errors import BadEigenvalueError, DimensionMismatchError
from .spaces import FunctionSpace, pullback_metric

_EIG_CONSTANT_TOL = 1e-8


@dataclass(frozen=True)
class Prediction:
    """Predicted mean zero count with per-node diagnostics."""

    value: float
    method: str
    nodes: int
    per_node: dict
    digest: str

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "nodes": self.nodes,
            "per_node_stats": self.per_node,
            "inputs": self.digest,
        }


def _inputs_digest(spaces) -> str:
    payload = {
        "manifold": spaces[0].manifold.config(),
        "spaces": [(s.label, s.size) for s in spaces],
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def node_metrics(spaces, refine: int = 1):
    """Pull-back matrices for every space at every quadrature node."""
    manifold = spaces[0].manifold
    if refine > 1:
        manifold = manifold.refine(refine)
    coords, points, weights = manifold.quadrature()
    frames = manifold.frames(coords)
    metrics = [pullback_metric(s, points, frames=frames) for s in spaces]
    return weights, metrics


def _node_densities(metrics, n) -> np.ndarray:
    """Mixed volumes V_n(E_1(x), ..., E_n(x)) for every quadrature node.

    Two vectorized exact shortcuts cover the homogeneous examples (all
    metrics rank one -> segments, all metrics round -> balls); anything
    else goes through polarization node by node.
    """
    k = metrics[0].shape[0]
    if n == 1:
        return 2.0 * np.sqrt(np.maximum(metrics[0][:, 0, 0], 0.0))
    eigs = [np.linalg.eigvalsh(G) for G in metrics]
    scale = max(1e-300, max(float(e.max()) for e in eigs))
    if all(e[:, :-1].max() <= 1e-12 * scale for e in eigs):
        # every ellipsoid degenerates to a segment [-v, v]
        vecs = np.empty((k, n, n))
        for i, G in enumerate(metrics):
            w, V = np.linalg.eigh(G)
            vecs[:, i, :] = np.sqrt(np.maximum(w[:, -1:], 0.0)) * V[:, :, -1]
        return 2.0**n / math.factorial(n) * np.abs(np.linalg.det(vecs))
    if all(np.abs(e - e.mean(axis=1, keepdims=True)).max() <= 1e-12 * scale for e in eigs):
        # every ellipsoid is a ball
        radii = np.stack([np.sqrt(np.maximum(e.mean(axis=1), 0.0)) for e in eigs])
        return ball_volume(n) * radii.prod(axis=0)
    densities = np.empty(k)
    for idx in range(k):
        bodies = [Ellipsoid(metric[idx]) for metric in metrics]
        densities[idx] = mixed_volume(bodies, method="auto")
    return densities


def predict(spaces, refine: int = 1) -> Prediction:
    """Mean number of isolated common zeros of unit-sphere samples.

    ``spaces`` must hold dim(X) orthonormalized spaces on one manifold;
    ``refine`` multiplies the quadrature resolution (used by the
    convergence checks).
    """
    spaces = list(spaces)
    manifold = spaces[0].manifold
    n = manifold.dim
    if len(spaces) != n:
        raise DimensionMismatchError(
            f"dimension-mismatch: {manifold.name} needs {n} spaces, got {len(spaces)}"
        )
    if any(s.manifold.config() != manifold.config() for s in spaces):
        raise DimensionMismatchError("dimension-mismatch: spaces live on different manifolds")
    weights, metrics = node_metrics(spaces, refine=refine)
    densities = _node_densities(metrics, n)
    value = math.factorial(n) / (2.0 * math.pi) ** n * float(weights @ densities)
    stats = {
        "min": float(densities.min()),
        "max": float(densities.max()),
        "mean": float(densities.mean()),
    }
    return Prediction(
        value=value,
        method="quadrature",
        nodes=len(weights),
        per_node=stats,
        digest=_inputs_digest(spaces),
    )


def gichev_closed_form(lambdas, n: int, vol_x: float) -> float:
    """2 / (sigma_n n^(n/2)) * sqrt(prod lambda) * vol(X)."""
    lambdas = list(lambdas)
    if len(lambdas) != n:
        raise DimensionMismatchError("dimension-mismatch: need n eigenvalues")
    if any(lam <= 0 for lam in lambdas):
        raise BadEigenvalueError("bad-eigenvalue: eigenvalues must be positive")
    product = math.prod(lambdas)
    return 2.0 / (sphere_volume(n) * n ** (n / 2.0)) * math.sqrt(product) * vol_x


def upper_bound(lam: float, n: int, vol_x: float) -> float:
    """Spectral bound 2 / (sigma_n n^(n/2)) * lambda^(n/2) * vol(X)."""
    if lam <= 0:
        raise BadEigenvalueError("bad-eigenvalue: lambda must be positive")
    return 2.0 / (sphere_volume(n) * n ** (n / 2.0)) * lam ** (n / 2.0) * vol_x


def _invariance_flags(metrics):
    """Eigenvalue constancy across nodes, and roundness, per space."""
    invariant = True
    isotropic = True
    for G in metrics:
        eigs = np.sort(np.linalg.eigvalsh(G), axis=1)
        spread = np.abs(eigs - eigs.mean(axis=0)).max()
        scale = max(1.0, float(np.abs(eigs).max()))
        if spread > _EIG_CONSTANT_TOL * scale:
            invariant = False
        mean_eigs = eigs.mean(axis=0)
        if np.abs(mean_eigs - mean_eigs.mean()).max() > 1e-8 * scale:
            isotropic = False
    return invariant, isotropic


def hodge_report(spaces) -> dict:
    """Mixed-volume inequalities for the predicted counts.

    Checks M(V_1..V_n)^2 >= M(..V_{n-1},V_{n-1}) M(..V_n,V_n) and the
    n-fold product inequality M^n >= prod M(V_i,..,V_i).  The guarantees
    hold for invariant spaces on a homogeneous space; non-invariant
    inputs are still evaluated but flagged ``not-invariant``.  For
    isotropy-irreducible geometry (all ellipsoids round) equality is
    asserted within 1e-6.
    """
    spaces = list(spaces)
    n = spaces[0].manifold.dim
    if len(spaces) != n:
        raise DimensionMismatchError("dimension-mismatch: need n spaces")
    _, metrics = node_metrics(spaces)
    invariant, isotropic = _invariance_flags(metrics)

    def m_of(slots):
        return predict([spaces[i] for i in slots]).value

    full = m_of(range(n))
    pair_lhs = full**2
    prev = list(range(n - 2)) + [n - 2, n - 2]
    last = list(range(n - 2)) + [n - 1, n - 1]
    pair_rhs = m_of(prev) * m_of(last)
    fold_lhs = full**n
    fold_rhs = math.prod(m_of([i] * n) for i in range(n))
    slack = 1e-9 * (1.0 + abs(pair_rhs))
    report = {
        "identity": "hodge",
        "invariant": bool(invariant),
        "isotropy_irreducible": bool(isotropic),
        "flag": None if invariant else "not-invariant",
        "pairwise": {"lhs": pair_lhs, "rhs": pair_rhs, "holds": bool(pair_lhs >= pair_rhs - slack)},
        "n_fold": {
            "lhs": fold_lhs,
            "rhs": fold_rhs,
            "holds": bool(fold_lhs >= fold_rhs - 1e-9 * (1.0 + abs(fold_rhs))),
        },
    }
    if isotropic:
        rel = abs(pair_lhs - pair_rhs) / max(abs(pair_rhs), 1e-300)
        rel_fold = abs(fold_lhs - fold_rhs) / max(abs(fold_rhs), 1e-300)
        report["equality"] = {"pairwise": rel, "n_fold": rel_fold, "holds": bool(max(rel, rel_fold) <= 1e-6)}
    report["pass"] = bool(
        report["pairwise"]["holds"]
        and report["n_fold"]["holds"]
        and report.get("equality", {}).get("holds", True)
    )
    return report
