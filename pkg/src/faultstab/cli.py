"""Command line: ``faultstab <subcommand> --config <path> [--out <dir>] [--threads N]``.

Exit codes: 0 success, 2 invalid configuration, 3 an acceptance threshold
was missed.  Each run writes one or more CSV tables and ``summary.json``
into the output directory.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import RNG_NAME, ConfigError, ExperimentConfig, load_config
from .fault_model import BumpDensity, SlipField
from .forward_op import CacheError, assemble, jacobian_fd_errors, read_operator_cache, write_operator_cache
from .jump_lab import (
    SECOND_ORDER,
    VARIANTS,
    halfspace_vs_freespace_jump,
    integral_identities,
    jump_estimate,
    radial_antiderivative_check,
)
from .kernels import LameParams, get_backend
from .results import ResultBundle, write_csv, write_summary
from .stability_lab import (
    AffineFunction,
    coefficient_identity_check,
    divergence_identity_check,
    lipschitz_scan,
    projector_lipschitz,
    rank_scan,
    residual_growth,
    transport_triviality,
)

log = logging.getLogger("faultstab")

EXIT_OK, EXIT_CONFIG, EXIT_THRESHOLD = 0, 2, 3


class Outcome:
    """What a subcommand produced: tables, summary entries and threshold checks."""

    def __init__(self):
        self.tables = {}
        self.summary = {}
        self.checks = {}

    def table(self, name, columns, rows):
        self.tables[name] = (tuple(columns), rows)

    def check(self, name, ok):
        self.checks[name] = bool(ok)


# ---- subcommands ----------------------------------------------------------------


def cmd_verify_integrals(cfg: ExperimentConfig, threads, out_dir):
    o = Outcome()
    c = cfg["integrals"]
    rows = integral_identities(R=c["radius"])
    o.table("integrals", ("name", "computed", "target", "abs_error"), rows)
    computed, exact = radial_antiderivative_check(0.1, c["radius"])
    o.summary["antiderivative"] = {"x3": 0.1, "computed": computed, "exact": exact, "abs_error": abs(computed - exact)}
    o.summary["max_abs_error"] = max(r[3] for r in rows)
    o.check("limits", all(r[3] <= c["tolerance"] for r in rows))
    o.check("antiderivative", abs(computed - exact) <= 1e-10)
    return o


def cmd_verify_jumps(cfg: ExperimentConfig, threads, out_dir):
    o = Outcome()
    c = cfg["jumps"]
    g = cfg.bump
    hs = c["h_sequence"]
    jobs = [(v, tuple(p)) for v in VARIANTS for p in c["points"]]

    def run(job):
        return jump_estimate(cfg.lame, job[0], g, job[1], hs)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(run, jobs))
    else:
        reports = [run(j) for j in jobs]
    for d in c["halfspace_depths"]:
        for p in c["points"]:
            reports.append(halfspace_vs_freespace_jump(cfg.lame, g, d, tuple(p), hs))
    rows = [list(r.row().values()) for r in reports]
    o.table("jumps", list(reports[0].row().keys()), rows)
    worst = {}
    ok = True
    for r in reports:
        tol = c["tolerance_second_order"] if r.variant == SECOND_ORDER else c["tolerance"]
        # relative error when the target is nonzero, absolute against the density scale otherwise
        err = r.rel_error if np.linalg.norm(r.target) > 0 else r.abs_error
        worst[r.variant] = max(worst.get(r.variant, 0.0), err)
        ok &= err <= tol and r.converged
    o.summary["worst_error_by_variant"] = worst
    kappa = cfg.lame.kappa
    # the lam/(lam+2mu) factor read off G_e1 with a purely tangential unit density
    unit = BumpDensity(g.center, g.radii, (1.0, 0.0, 0.0))
    rep = jump_estimate(cfg.lame, "G_e1", unit, tuple(g.center), hs)
    factor = float(rep.computed[2] / unit.scalar(*g.center))
    o.summary["kappa"] = {"computed": factor, "exact": kappa}
    o.check("jump_formulas", ok)
    o.check("kappa_3_digits", abs(factor - kappa) <= 5e-4 * abs(kappa))
    return o


def _cache_meta(cfg: ExperimentConfig, model, m):
    key = model.cache_key(m)
    geo = hashlib.sha256(json.dumps({k: key[k] for k in ("m", "rect", "quad", "basis", "lame")},
                                    sort_keys=True).encode()).hexdigest()
    return {"format": "FSTB", "geometry_hash": geo, "grid_hash": key["grid"], "shape_hint": key["basis"]}


def cmd_assemble(cfg: ExperimentConfig, threads, out_dir):
    o = Outcome()
    model = cfg.model()
    m0 = cfg["m0"]
    path = os.path.join(out_dir, "operator.fstb")
    meta = _cache_meta(cfg, model, m0)
    status = "miss"
    matrix = None
    if os.path.exists(path):
        try:
            matrix, _ = read_operator_cache(path, expect_meta=meta)
            status = "hit"
        except CacheError as exc:
            warnings.warn(f"operator cache {path} rejected ({exc}); re-assembling", stacklevel=1)
            status = "stale"
    if matrix is None:
        op = assemble(cfg.lame, model.geometry(m0), model.grid, model.quad, model.basis)
        matrix = op.matrix
        write_operator_cache(path, matrix, meta)
    w = np.sqrt(model.grid.data_weights)
    s = np.linalg.svd(w[:, None] * matrix, compute_uv=False)
    o.table("singular_values", ("index", "sigma", "sigma_over_sigma1"),
            [[i + 1, float(v), float(v / s[0])] for i, v in enumerate(s)])
    o.summary.update({
        "cache": status, "cache_path": os.path.abspath(path), "shape": list(matrix.shape),
        "matrix_sha256": hashlib.sha256(np.ascontiguousarray(matrix, dtype="<f8").tobytes()).hexdigest(),
    })
    o.check("finite", bool(np.all(np.isfinite(matrix))))
    return o


def cmd_jacobian_check(cfg: ExperimentConfig, threads, out_dir):
    o = Outcome()
    c = cfg["jacobian"]
    model = cfg.model()
    rng = cfg.rng(stream=2)
    ms = cfg.box.sample(rng, c["samples"], margin=max(c["steps"]))
    B = model.basis
    hs = [SlipField(B, rng.standard_normal((2, B.n1, B.n2))) for _ in range(c["samples"])]
    steps = sorted(c["steps"], reverse=True)

    def run(i):
        return jacobian_fd_errors(model, ms[i], hs[i], steps)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            errs = list(pool.map(run, range(len(ms))))
    else:
        errs = [run(i) for i in range(len(ms))]
    rows = []
    ok = True
    worst_err, worst_order = 0.0, np.inf
    for i, e in enumerate(errs):
        for k, name in enumerate("abd"):
            for j, t in enumerate(steps):
                order = np.nan
                if j > 0:
                    order = float(np.log(e[j - 1, k] / e[j, k]) / np.log(steps[j - 1] / steps[j]))
                rows.append([i, *map(float, ms[i]), name, t, float(e[j, k]), order])
            last = float(e[-1, k])
            worst_err = max(worst_err, last)
            if len(steps) > 1:
                order = float(np.log(e[-2, k] / e[-1, k]) / np.log(steps[-2] / steps[-1]))
                worst_order = min(worst_order, order)
                ok &= order >= c["min_order"]
            ok &= last <= c["tolerance"]
    o.table("jacobian", ("sample", "a", "b", "d", "coefficient", "t", "rel_error", "observed_order"), rows)
    o.summary.update({"max_rel_error_at_smallest_t": worst_err, "min_observed_order": worst_order,
                      "smallest_t": steps[-1]})
    o.check("jacobian_fd", ok)
    return o


def cmd_lipschitz_scan(cfg: ExperimentConfig, threads, out_dir):
    o = Outcome()
    c = cfg["lipschitz"]
    res = lipschitz_scan(cfg.model(), cfg.box, cfg.slip(), c["pairs"], rng=cfg.rng(stream=3),
                         near_fraction=c["near_fraction"], near_delta=c["near_delta"],
                         directions_per_base=c["directions_per_base"], threads=threads)
    o.table("lipschitz", res.columns, res.rows)
    o.summary.update(res.summary)
    o.check("positive_min_ratio", res.summary["min_ratio"] > 0)
    o.check("near_pairs_match_sigma_min", res.summary["max_rel_dev_min_near_vs_sigma_min"] <= c["tolerance"])
    return o


def cmd_rank_scan(cfg: ExperimentConfig, threads, out_dir):
    o = Outcome()
    c = cfg["rank"]
    res = rank_scan(cfg.model(), cfg.box, cfg.slip(), c["samples"], rng=cfg.rng(stream=4),
                    extra_points=c["extra_points"], threads=threads)
    o.table("rank", res.columns, res.rows)
    o.summary.update(res.summary)
    o.check("no_flags", res.summary["flags"] == 0)
    return o


def cmd_residual_growth(cfg: ExperimentConfig, threads, out_dir):
    o = Outcome()
    c = cfg["growth"]
    slip = cfg.slip()
    res = residual_growth(cfg.model(), cfg["m0"], slip, c["directions"], c["steps"], rank=c["rank"],
                          threads=threads)
    o.table("residual_growth", res.columns, res.rows)
    o.summary.update(res.summary)
    o.check("r0_vanishes", res.summary["r0_relative"] <= 1e-8)
    o.check("positive_slope", res.summary["min_slope"] > 0)
    o.check("linear_fit", res.summary["min_r2"] >= c["min_r2"])
    o.check("infimum_bound", res.summary["bound_violations"] == 0)
    return o


def cmd_projector_scan(cfg: ExperimentConfig, threads, out_dir):
    o = Outcome()
    c = cfg["projector"]
    model = cfg.model()
    rank = c["rank"] if c["rank"] is not None else 2 * model.basis.size
    res = projector_lipschitz(model, cfg["m0"], c["direction"], c["steps"], rank, min_gap=c["min_gap"],
                              threads=threads)
    o.table("projector", res.columns, res.rows)
    o.summary.update(res.summary)
    o.check("projector_bound", res.summary["max_distance"] <= 1.0 + 1e-12)
    return o


def cmd_transport_check(cfg: ExperimentConfig, threads, out_dir):
    o = Outcome()
    c = cfg["transport"]
    rows = []
    ok = True
    for i, case in enumerate(c["cases"]):
        f = AffineFunction(*case["f"])
        vals = [transport_triviality(f, case["tau"], case["alpha"], n) for n in c["grids"]]
        for n, v in zip(c["grids"], vals):
            rows.append([i, *case["f"], *case["tau"], case["alpha"], n, v])
        ratios = [b / a for a, b in zip(vals[:-1], vals[1:])]
        ok &= all(v > 0 for v in vals) and all(r >= c["min_ratio"] for r in ratios)
        o.summary[f"case{i}"] = {"sigma_min": vals, "refinement_ratios": ratios}
    o.table("transport", ("case", "f1", "f2", "f3", "tau1", "tau2", "alpha", "n", "sigma_min"), rows)
    o.check("transport_witness", ok)
    return o


def cmd_identity_check(cfg: ExperimentConfig, threads, out_dir):
    o = Outcome()
    c = cfg["identities"]
    rng = cfg.rng(stream=5)
    rows = []
    for i in range(c["draws"]):
        lam, mu = np.exp(rng.uniform(np.log(0.05), np.log(20.0), 2))
        coef = float(coefficient_identity_check(lam, mu))
        f = AffineFunction.random(rng)
        div, skipped = divergence_identity_check(LameParams(float(lam), float(mu)), f, rng=rng)
        rows.append([i, float(lam), float(mu), f.g1, f.g2, f.g3, coef, div, skipped])
    o.table("identities", ("draw", "lam", "mu", "f1", "f2", "f3", "coefficient_residual",
                           "divergence_residual", "skipped_points"), rows)
    cmax = max(r[6] for r in rows)
    dmax = max(r[7] for r in rows)
    o.summary.update({"max_coefficient_residual": cmax, "max_divergence_residual": dmax})
    o.check("coefficient_identity", cmax <= c["coefficient_tol"])
    o.check("divergence_identity", dmax <= c["divergence_tol"])
    return o


COMMANDS = {
    "verify-jumps": cmd_verify_jumps,
    "verify-integrals": cmd_verify_integrals,
    "assemble": cmd_assemble,
    "jacobian-check": cmd_jacobian_check,
    "lipschitz-scan": cmd_lipschitz_scan,
    "rank-scan": cmd_rank_scan,
    "residual-growth": cmd_residual_growth,
    "projector-scan": cmd_projector_scan,
    "transport-check": cmd_transport_check,
    "identity-check": cmd_identity_check,
}


def run(subcommand, cfg: ExperimentConfig, out_dir=None, threads=None) -> ResultBundle:
    """Execute one subcommand and write its CSV tables and summary."""
    if subcommand not in COMMANDS:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    out_dir = out_dir or os.path.join(cfg["output_dir"], subcommand)
    os.makedirs(out_dir, exist_ok=True)
    t0 = time.perf_counter()
    outcome = COMMANDS[subcommand](cfg, threads, out_dir)
    elapsed = time.perf_counter() - t0
    bundle = ResultBundle(out_dir)
    for name, (cols, rows) in outcome.tables.items():
        path = os.path.join(out_dir, f"{name}.csv")
        write_csv(path, cols, rows)
        bundle.csv_paths.append(path)
    bundle.passed = all(outcome.checks.values())
    bundle.summary = {
        "subcommand": subcommand,
        "version": __version__,
        "kernel_backend": get_backend(),
        "rng": {"name": RNG_NAME, "seed": cfg["seed"]},
        "config": cfg.raw,
        "config_sha256": cfg.digest(),
        "timings": {"wall_seconds": elapsed},
        "threads": threads or 1,
        "checks": outcome.checks,
        "passed": bundle.passed,
        "results": outcome.summary,
        "csv": [os.path.basename(p) for p in bundle.csv_paths],
    }
    write_summary(bundle.summary_path, bundle.summary)
    return bundle


def build_parser():
    parser = argparse.ArgumentParser(prog="faultstab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"faultstab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON experiment configuration (defaults when omitted)")
        p.add_argument("--out", help="output directory (default: <output_dir>/<subcommand>)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for sample-parallel scans")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig({})
        if args.threads < 1:
            raise ConfigError("--threads", "must be at least 1")
        bundle = run(args.subcommand, cfg, args.out, args.threads)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    status = "PASS" if bundle.passed else "FAIL"
    failed = [k for k, v in bundle.summary["checks"].items() if not v]
    print(f"{args.subcommand}: {status}  ({bundle.out_dir})" + (f"  failed: {', '.join(failed)}" if failed else ""))
    return EXIT_OK if bundle.passed else EXIT_THRESHOLD


if __name__ == "__main__":
    sys.exit(main())
