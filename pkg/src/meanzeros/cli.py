"""Command-line entry point: reproducible runs with machine-readable reports.

Subcommands
-----------
predict    closed-form mean zero count for a manifold + spaces
simulate   Monte Carlo zero counting for the same inputs
compare    run both and test |predict - mean| <= 3 stderr + abs_tol
verify     one of the identity checks: product, alesker, haar2,
           crofton-product, af, hodge, constants
transform  apply or invert the cosine transform on coefficient lists

Options may come from flags or from an INI config file (section [run],
key = value); flags override the file.  Exit status: 0 on success, 2
when an identity or comparison check fails, 1 on input errors.
"""

import argparse
import configparser
import dataclasses
import io
import json
import math
import os
import sys
import time

import numpy as np

from .bodies import Ball, Ellipsoid, MinkowskiSum, Segment, Zonotope, check_alexandrov_fenchel
from .constants import DimensionalConstants
from .crofton import verify_crofton_product
from .errors import NotEvenError
from .identities import alesker_identity_residual, haar2_check
from .manifolds import manifold_from_name
from .measures import Parallelotope, verify_product_identity
from .montecarlo import ZeroCountEstimate, estimate
from .predictor import Prediction, hodge_report, predict
from .spaces import orthonormalize, space_from_descriptor
from .transform import HarmonicGauge, cosine_transform, inverse_cosine_transform

DEFAULT_WORKERS_ENV = "MEANZEROS_WORKERS"


@dataclasses.dataclass
class RunConfig:
    """Flat run description; round-trips through the INI format."""

    mode: str = "predict"
    manifold: str = ""
    spaces: str = ""
    samples: int = 1000
    seed: int = 0
    tol: float = 0.02
    workers: int = 0  # 0: use the environment default
    refine: int = 1
    identity: str = ""
    bodies: str = ""
    region: str = "unit-square"
    dims: str = ""
    dim: int = 2
    count: int = 100
    coeffs: str = ""
    invert: bool = False
    output: str = ""
    csv: str = ""

    def resolved_workers(self) -> int:
        if self.workers > 0:
            return self.workers
        return int(os.environ.get(DEFAULT_WORKERS_ENV, "1"))

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        parser["run"] = {
            f.name: str(getattr(self, f.name)) for f in dataclasses.fields(self)
        }
        out = io.StringIO()
        parser.write(out)
        return out.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "RunConfig":
        parser = configparser.ConfigParser()
        parser.read_string(text)
        if "run" not in parser:
            raise ValueError("config file needs a [run] section")
        section = parser["run"]
        kwargs = {}
        for f in dataclasses.fields(cls):
            if f.name not in section:
                continue
            raw = section[f.name]
            if f.type in (int, "int"):
                kwargs[f.name] = int(raw)
            elif f.type in (float, "float"):
                kwargs[f.name] = float(raw)
            elif f.type in (bool, "bool"):
                kwargs[f.name] = raw.strip().lower() in ("1", "true", "yes", "on")
            else:
                kwargs[f.name] = raw
        return cls(**kwargs)


def parse_body(text: str):
    """One body descriptor; '+' builds Minkowski sums.

    Vocabulary: ``disk [r]``, ``ball <r> <dim>``, ``ellipse <q11> <q22>``,
    ``ellipsoid <q1> <q2> <q3>`` (diagonal shape-matrix entries),
    ``segment <x> <y> [z]``, ``zonotope (x,y);(x,y);...``.
    """
    parts = []
    for chunk in text.split("+"):
        chunk = chunk.strip()
        kind = chunk.split()[0].lower() if chunk.split() else ""
        if not kind:
            raise ValueError("empty body descriptor")
        if kind == "zonotope":
            gens = [
                [float(x) for x in g.strip().strip("()").replace(",", " ").split()]
                for g in chunk[len("zonotope") :].strip().split(";")
            ]
            parts.append(Zonotope(gens))
            continue
        args = [float(t.strip("()")) for t in chunk.replace(",", " ").split()[1:]]
        if kind == "disk":
            parts.append(Ball(args[0] if args else 1.0, 2))
        elif kind == "ball":
            if len(args) != 2:
                raise ValueError("ball needs: ball <radius> <dim>")
            parts.append(Ball(args[0], int(args[1])))
        elif kind == "ellipse":
            parts.append(Ellipsoid(np.diag(args if args else [1.0, 1.0])))
        elif kind == "ellipsoid":
            parts.append(Ellipsoid(np.diag(args)))
        elif kind in ("segment", "seg"):
            parts.append(Segment(args))
        else:
            raise ValueError(
                f"unknown body {kind!r}; supported: disk, ball, ellipse, ellipsoid, segment, zonotope"
            )
    if len(parts) == 1:
        return parts[0]
    return MinkowskiSum([(1.0, p) for p in parts])


def parse_bodies(text: str):
    return [parse_body(chunk) for chunk in text.split(",") if chunk.strip()]


def parse_region(text: str) -> Parallelotope:
    tokens = text.strip().lower().split()
    if tokens[0] in ("unit-square", "unit-cube"):
        return Parallelotope.unit_cube(2)
    if tokens[0] == "square":
        side = float(tokens[1]) if len(tokens) > 1 else 1.0
        return Parallelotope.centered(side * np.eye(2))
    if tokens[0] == "segment":
        length = float(tokens[1]) if len(tokens) > 1 else 1.0
        return Parallelotope.centered(np.array([[length, 0.0]]))
    raise ValueError(f"unknown region {text!r}; supported: unit-square, square <s>, segment <l>")


def build_spaces(config: RunConfig):
    manifold = manifold_from_name(config.manifold)
    descriptors = [d.strip() for d in config.spaces.split(",") if d.strip()]
    if len(descriptors) != manifold.dim:
        raise ValueError(
            f"{manifold.name} needs {manifold.dim} spaces, got {len(descriptors)}"
        )
    return manifold, [
        orthonormalize(space_from_descriptor(manifold, d, slot=i))
        for i, d in enumerate(descriptors)
    ]


def report_compare(prediction: Prediction, est: ZeroCountEstimate, abs_tol: float = 1e-9) -> dict:
    """Verdict: |predicted - sampled mean| <= 3 stderr + abs_tol."""
    gap = abs(prediction.value - est.mean)
    allowed = 3.0 * est.stderr + abs_tol
    return {
        "identity": "predict-vs-simulate",
        "predicted": prediction.value,
        "mean": est.mean,
        "stderr": est.stderr,
        "gap": gap,
        "allowed": allowed,
        "pass": bool(gap <= allowed),
    }


def _parse_transform_coeffs(config: RunConfig) -> HarmonicGauge:
    rows = json.loads(config.coeffs)
    if config.dim == 2:
        return HarmonicGauge.from_dense_circle(rows)
    coeffs_map = {(int(l), int(m)): v for l, m, v in rows}
    bandwidth = max((l for l, _ in coeffs_map), default=0)
    if any(l % 2 for l, _ in coeffs_map):
        raise NotEvenError("not-even: odd spherical-harmonic degree in input")
    from .harmonics import even_degree_orders

    lm = even_degree_orders(bandwidth)
    return HarmonicGauge(3, [coeffs_map.get(pair, 0.0) for pair in lm])


def _transform_result(config: RunConfig) -> dict:
    gauge = _parse_transform_coeffs(config)
    out = inverse_cosine_transform(gauge) if config.invert else cosine_transform(gauge)
    if config.dim == 2:
        rows = [[2 * j, a, b] for j, (a, b) in enumerate(np.atleast_2d(out.coeffs))]
    else:
        from .harmonics import even_degree_orders

        rows = [
            [l, m, c] for (l, m), c in zip(even_degree_orders(out.bandwidth), out.coeffs)
        ]
    return {"dim": config.dim, "inverted": config.invert, "coeffs": rows, "pass": True}


def _verify_result(config: RunConfig) -> dict:
    identity = config.identity.strip().lower()
    workers = config.resolved_workers()
    if identity == "product":
        bodies = parse_bodies(config.bodies)
        region = parse_region(config.region)
        return verify_product_identity(
            bodies, region, samples=config.samples, tol=config.tol, seed=config.seed, workers=workers
        )
    if identity == "alesker":
        reports = []
        for body in parse_bodies(config.bodies):
            tol = config.tol if config.tol < 1.0 else (1e-6 if body.dim == 2 else 1e-3)
            residual = alesker_identity_residual(body)
            reports.append({"body": body.to_dict(), "residual": residual, "tol": tol, "pass": bool(residual <= tol)})
        return {"identity": "alesker", "checks": reports, "pass": all(r["pass"] for r in reports)}
    if identity == "haar2":
        bodies = parse_bodies(config.bodies)
        out = {"identity": "haar2", "checks": [], "pass": True}
        for body in bodies:
            rep = haar2_check(body, np.eye(3)[:2])
            tol = config.tol if config.tol < 1.0 else 1e-3
            ok = rep["residual"] <= tol
            out["checks"].append({**rep, "tol": tol, "pass": bool(ok)})
            out["pass"] = out["pass"] and ok
        return out
    if identity == "crofton-product":
        dims = [int(d) for d in config.dims.replace(",", " ").split()] or [2, 2]
        total = sum(dims)
        edges = np.zeros((len(dims), total))
        offset = 0
        for i, m in enumerate(dims):
            edges[i, offset] = 1.0
            offset += m
        return verify_crofton_product(
            dims, edges, samples=config.samples, tol=config.tol, seed=config.seed, workers=workers
        )
    if identity == "af":
        rng = np.random.default_rng(config.seed)
        n = config.dim
        failures = 0
        for _ in range(config.count):
            bodies = []
            for _ in range(n):
                M = rng.normal(size=(n, n))
                bodies.append(Ellipsoid(M @ M.T + 0.2 * np.eye(n)))
            if not check_alexandrov_fenchel(bodies, tol=1e-6)["holds"]:
                failures += 1
        return {
            "identity": "af",
            "dim": n,
            "checks": config.count,
            "failures": failures,
            "pass": failures == 0,
        }
    if identity == "hodge":
        _, spaces = build_spaces(config)
        return hodge_report(spaces)
    if identity == "constants":
        checks = []
        for p in range(1, 7):
            residual = DimensionalConstants.for_dimension(p).identity_residual()
            checks.append({"n": p, "residual": residual, "pass": bool(residual <= 1e-12)})
        return {"identity": "constants", "checks": checks, "pass": all(c["pass"] for c in checks)}
    raise ValueError(
        f"unknown identity {identity!r}; supported: product, alesker, haar2, crofton-product, af, hodge, constants"
    )


def run(config: RunConfig) -> tuple[int, dict]:
    """Execute a run; returns (exit status, report dict)."""
    report = {"mode": config.mode, "config": dataclasses.asdict(config)}
    status = 0
    if config.mode == "predict":
        _, spaces = build_spaces(config)
        report["prediction"] = predict(spaces, refine=config.refine).to_dict()
    elif config.mode == "simulate":
        _, spaces = build_spaces(config)
        est = estimate(spaces, samples=config.samples, seed=config.seed)
        report["estimate"] = est.to_dict()
        if config.csv:
            _write_sample_csv(config, spaces)
    elif config.mode == "compare":
        _, spaces = build_spaces(config)
        prediction = predict(spaces, refine=config.refine)
        est = estimate(spaces, samples=config.samples, seed=config.seed)
        verdict = report_compare(prediction, est)
        report["prediction"] = prediction.to_dict()
        report["estimate"] = est.to_dict()
        report["verdict"] = verdict
        status = 0 if verdict["pass"] else 2
    elif config.mode == "verify":
        result = _verify_result(config)
        report["result"] = result
        status = 0 if result.get("pass", False) else 2
    elif config.mode == "transform":
        report["result"] = _transform_result(config)
    else:
        raise ValueError(f"unknown mode {config.mode!r}")
    report["timestamp"] = time.time()
    return status, report


def _write_sample_csv(config: RunConfig, spaces):
    """Per-sample counts: one row (index, count, suspect) per sample."""
    from .montecarlo import per_sample_counts

    rows = ["sample,count,suspect"]
    for idx, count, suspect in per_sample_counts(spaces, config.samples, config.seed):
        rows.append(f"{idx},{count},{int(suspect)}")
    with open(config.csv, "w") as fh:
        fh.write("\n".join(rows) + "\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="meanzeros", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="mode", required=True)
    defs = RunConfig()

    def add_common(p):
        p.add_argument("--config", default="", help="INI config file ([run] section)")
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--output", default=None, help="write the JSON report here")

    for mode in ("predict", "simulate", "compare"):
        p = sub.add_parser(mode)
        add_common(p)
        p.add_argument("--manifold", default=None, help="circle, s2, torus2, torus3, ...")
        p.add_argument("--spaces", default=None, help='e.g. "linear, linear" or "eig 6, eig 6"')
        p.add_argument("--refine", type=int, default=None, help="quadrature refinement factor")
        if mode == "simulate":
            p.add_argument("--csv", default=None, help="per-sample CSV path")

    p = sub.add_parser("verify")
    add_common(p)
    p.add_argument("--identity", required=False, default=None,
                   help="product | alesker | haar2 | crofton-product | af | hodge | constants")
    p.add_argument("--bodies", default=None, help='e.g. "disk, disk" or "ellipse 4 1, disk"')
    p.add_argument("--region", default=None, help="unit-square | square <s> | segment <l>")
    p.add_argument("--dims", default=None, help='crofton tangent dims, e.g. "2,2"')
    p.add_argument("--dim", type=int, default=None, help="ambient dimension for af")
    p.add_argument("--count", type=int, default=None, help="number of af checks")
    p.add_argument("--manifold", default=None)
    p.add_argument("--spaces", default=None)

    p = sub.add_parser("transform")
    add_common(p)
    p.add_argument("--dim", type=int, default=None, help="2 (circle) or 3 (sphere)")
    p.add_argument("--coeffs", default=None, help="JSON rows: [freq, cos, sin] or [l, m, value]")
    p.add_argument("--invert", action="store_true", default=None)
    return parser


def _merge_config(args) -> RunConfig:
    if getattr(args, "config", ""):
        with open(args.config) as fh:
            config = RunConfig.from_ini(fh.read())
    else:
        config = RunConfig()
    config.mode = args.mode
    for f in dataclasses.fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None and f.name != "mode":
            setattr(config, f.name, value)
    return config


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _merge_config(args)
        status, report = run(config)
    except SystemExit:
        raise
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(report, sort_keys=True, indent=2, default=float)
    print(text)
    if config.output:
        with open(config.output, "w") as fh:
            fh.write(text + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
