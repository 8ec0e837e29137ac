"""Experiment configuration: one JSON document per run.

Every field has a default, so ``{}`` is a valid configuration.  Validation
happens before any kernel runs and reports the offending field by its
dotted path.
"""
from __future__ import annotations

import copy
import hashlib
import json
import math

import numpy as np

from .fault_model import (
    AdmissibleSet,
    BumpDensity,
    GeometryError,
    ObservationGrid,
    Rect,
    SineBasis,
    SlipField,
    gradient_slip,
)
from .forward_op import ForwardModel, QuadratureRule
from .kernels import LameParams

__all__ = ["ConfigError", "ExperimentConfig", "DEFAULTS", "load_config", "make_rng"]

RNG_NAME = "Philox"

DEFAULTS = {
    "seed": 20240917,
    "output_dir": "runs",
    "lame": {"lam": 1.0, "mu": 1.0},
    "rect": [-1.0, 1.0, -1.0, 1.0],
    "window": [-3.0, 3.0, -3.0, 3.0],
    "grid": [13, 13],
    "quadrature": [24, 24],
    "basis": [3, 3],
    "admissible": {
        "lower": [0.1, -0.3, -3.0],
        "upper": [0.3, 0.3, -1.5],
        "depth_min": 0.5,
        "exclude_horizontal": True,
    },
    "slip": {"kind": "one-directional", "coefficients": None, "direction": [0.6, 0.8]},
    "m0": [0.2, -0.1, -2.0],
    "lipschitz": {"pairs": 200, "near_fraction": 0.5, "near_delta": 1e-4, "directions_per_base": 4,
                  "tolerance": 0.15},
    "rank": {"samples": 20, "extra_points": []},
    "growth": {
        "directions": [[0, 0, 1], [1, 0, 0], [0, 1, 0], [1, 1, 1], [1, -1, 0.5]],
        "steps": [0.0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1],
        "rank": None,
        "min_r2": 0.99,
    },
    "projector": {"direction": [1, 1, 1], "steps": [0.0, 0.001, 0.003, 0.01, 0.03, 0.1], "rank": None,
                  "min_gap": 10.0},
    "jacobian": {"samples": 10, "steps": [0.01, 0.001], "tolerance": 1e-5, "min_order": 1.9},
    "jumps": {
        "h_sequence": [0.016, 0.008, 0.004, 0.002, 0.001],
        "points": [[0.0, 0.0], [0.35, -0.2], [0.7, 0.3]],
        "bump": {"center": [0.0, 0.0], "radii": [1.0, 0.8], "amplitude": [0.3, -0.7, 0.5]},
        "tolerance": 1e-3,
        "tolerance_second_order": 1e-2,
        "halfspace_depths": [1.0, 2.0],
    },
    "integrals": {"radius": 1.0, "tolerance": 1e-6},
    "transport": {
        "grids": [64, 128],
        "cases": [
            {"f": [0.0, 0.0, 1.0], "tau": [1.0, 0.0], "alpha": 1.0},
            {"f": [1.0, 0.0, 0.0], "tau": [1.0, 0.0], "alpha": 0.0},
        ],
        "min_ratio": 0.5,
    },
    "identities": {"draws": 100, "coefficient_tol": 1e-12, "divergence_tol": 1e-8},
}


class ConfigError(ValueError):
    """Invalid configuration; ``field`` is the dotted path of the bad entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def _merge(base, override, path=""):
    out = copy.deepcopy(base)
    for key, val in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(where, "unknown field")
        if isinstance(base[key], dict) and key not in ("slip",):
            if not isinstance(val, dict):
                raise ConfigError(where, "expected an object")
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = val
    return out


def _num(cfg, path, *, positive=False, nonneg=False, integer=False):
    val = cfg
    for part in path.split("."):
        val = val[part]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(path, f"expected a finite number, got {val!r}")
    if integer and int(val) != val:
        raise ConfigError(path, f"expected an integer, got {val!r}")
    if positive and val <= 0:
        raise ConfigError(path, f"must be positive, got {val!r}")
    if nonneg and val < 0:
        raise ConfigError(path, f"must be nonnegative, got {val!r}")
    return int(val) if integer else float(val)


def _vec(cfg, path, n=None, *, positive=False, integer=False):
    val = cfg
    for part in path.split("."):
        val = val[part]
    if not isinstance(val, (list, tuple)) or (n is not None and len(val) != n):
        raise ConfigError(path, f"expected a list of {n if n is not None else 'some'} numbers, got {val!r}")
    out = []
    for i, v in enumerate(val):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"{path}[{i}]", f"expected a finite number, got {v!r}")
        if positive and v <= 0:
            raise ConfigError(f"{path}[{i}]", f"must be positive, got {v!r}")
        if integer and int(v) != v:
            raise ConfigError(f"{path}[{i}]", f"expected an integer, got {v!r}")
        out.append(int(v) if integer else float(v))
    return out


class ExperimentConfig:
    """Validated configuration with builders for the numerical objects."""

    def __init__(self, raw: dict | None = None):
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
        self.raw = _merge(DEFAULTS, raw)
        self._validate()

    # ---- validation ----
    def _validate(self):
        c = self.raw
        _num(c, "seed", nonneg=True, integer=True)
        if not isinstance(c["output_dir"], str) or not c["output_dir"]:
            raise ConfigError("output_dir", "expected a nonempty path string")
        self.lame = LameParams(_num(c, "lame.lam", positive=True), _num(c, "lame.mu", positive=True))
        r = _vec(c, "rect", 4)
        try:
            self.rect = Rect(*r)
        except (ValueError, GeometryError) as exc:
            raise ConfigError("rect", str(exc)) from exc
        w = _vec(c, "window", 4)
        if not (w[0] < w[1] and w[2] < w[3]):
            raise ConfigError("window", "bounds must satisfy x1min < x1max and x2min < x2max")
        g = _vec(c, "grid", 2, positive=True, integer=True)
        if min(g) < 2:
            raise ConfigError("grid", "need at least 2 points per direction")
        q = _vec(c, "quadrature", 2, positive=True, integer=True)
        if min(q) < 4:
            raise ConfigError("quadrature", "orders must be at least 4")
        _vec(c, "basis", 2, positive=True, integer=True)
        lo = _vec(c, "admissible.lower", 3)
        hi = _vec(c, "admissible.upper", 3)
        dmin = _num(c, "admissible.depth_min", positive=True)
        if not isinstance(c["admissible"]["exclude_horizontal"], bool):
            raise ConfigError("admissible.exclude_horizontal", "expected true or false")
        try:
            self.box = AdmissibleSet(tuple(lo), tuple(hi), dmin, self.rect, c["admissible"]["exclude_horizontal"])
        except GeometryError as exc:
            raise ConfigError("admissible", str(exc)) from exc
        m0 = _vec(c, "m0", 3)
        top = max(m0[0] * y1 + m0[1] * y2 + m0[2] for y1, y2 in self.rect.corners)
        if top > -dmin:
            raise ConfigError("m0", f"fault reaches y3={top:.6g}, above -depth_min={-dmin}")
        self._validate_slip()
        _num(c, "lipschitz.pairs", positive=True, integer=True)
        nf = _num(c, "lipschitz.near_fraction")
        if not 0 < nf <= 1:
            raise ConfigError("lipschitz.near_fraction", "must lie in (0, 1]")
        _num(c, "lipschitz.near_delta", positive=True)
        _num(c, "lipschitz.directions_per_base", nonneg=True, integer=True)
        _num(c, "lipschitz.tolerance", positive=True)
        _num(c, "rank.samples", nonneg=True, integer=True)
        for i, _ in enumerate(c["rank"]["extra_points"]):
            p = _vec({"p": c["rank"]["extra_points"][i]}, "p", 3)
            top = max(p[0] * y1 + p[1] * y2 + p[2] for y1, y2 in self.rect.corners)
            if top > -dmin:
                raise ConfigError(f"rank.extra_points[{i}]", f"fault reaches y3={top:.6g}, above -depth_min")
        for i, d in enumerate(c["growth"]["directions"]):
            v = _vec({"d": d}, "d", 3)
            if not any(v):
                raise ConfigError(f"growth.directions[{i}]", "direction must be nonzero")
        steps = _vec(c, "growth.steps")
        if any(t < 0 for t in steps):
            raise ConfigError("growth.steps", "steps must be nonnegative")
        if c["growth"]["rank"] is not None:
            _num(c, "growth.rank", positive=True, integer=True)
        _num(c, "growth.min_r2", positive=True)
        if not any(_vec(c, "projector.direction", 3)):
            raise ConfigError("projector.direction", "direction must be nonzero")
        if any(t < 0 for t in _vec(c, "projector.steps")):
            raise ConfigError("projector.steps", "steps must be nonnegative")
        if c["projector"]["rank"] is not None:
            _num(c, "projector.rank", positive=True, integer=True)
        _num(c, "projector.min_gap", positive=True)
        _num(c, "jacobian.samples", positive=True, integer=True)
        _vec(c, "jacobian.steps", positive=True)
        hs = _vec(c, "jumps.h_sequence", positive=True)
        if len(hs) < 3 or any(b >= a for a, b in zip(hs[:-1], hs[1:])):
            raise ConfigError("jumps.h_sequence", "need at least three strictly decreasing values")
        if hs[-1] < 1e-3:
            raise ConfigError("jumps.h_sequence", "smallest h must be at least 1e-3")
        for i, p in enumerate(c["jumps"]["points"]):
            _vec({"p": p}, "p", 2)
        center = tuple(_vec(c, "jumps.bump.center", 2))
        radii = tuple(_vec(c, "jumps.bump.radii", 2, positive=True))
        amplitude = tuple(_vec(c, "jumps.bump.amplitude", 3))
        try:
            self.bump = BumpDensity(center, radii, amplitude)
        except ValueError as exc:
            raise ConfigError("jumps.bump", str(exc)) from exc
        for key in ("tolerance", "tolerance_second_order"):
            _num(c, f"jumps.{key}", positive=True)
        _vec(c, "jumps.halfspace_depths", positive=True)
        _num(c, "integrals.radius", positive=True)
        _num(c, "integrals.tolerance", positive=True)
        grids = _vec(c, "transport.grids", positive=True, integer=True)
        if any(n < 4 for n in grids):
            raise ConfigError("transport.grids", "need at least 4 interior nodes")
        for i, case in enumerate(c["transport"]["cases"]):
            sub = {"c": case}
            if not any(_vec(sub, "c.tau", 2)):
                raise ConfigError(f"transport.cases[{i}].tau", "tau must be nonzero")
            if not any(_vec(sub, "c.f", 3)):
                raise ConfigError(f"transport.cases[{i}].f", "f must not vanish identically")
            _num(sub, "c.alpha")
        _num(c, "transport.min_ratio", positive=True)
        _num(c, "identities.draws", positive=True, integer=True)

    def _validate_slip(self):
        s = self.raw["slip"]
        if not isinstance(s, dict):
            raise ConfigError("slip", "expected an object")
        s = {**DEFAULTS["slip"], **s}
        unknown = set(s) - set(DEFAULTS["slip"])
        if unknown:
            raise ConfigError(f"slip.{sorted(unknown)[0]}", "unknown field")
        self.raw["slip"] = s
        if s["kind"] not in ("free", "one-directional", "gradient"):
            raise ConfigError("slip.kind", f"unknown slip kind {s['kind']!r}")
        n1, n2 = self.raw["basis"]
        if s["coefficients"] is not None:
            arr = np.asarray(s["coefficients"], dtype=float)
            want = (2, n1, n2) if s["kind"] == "free" else (n1, n2)
            if arr.shape != want:
                raise ConfigError("slip.coefficients", f"expected shape {want}, got {arr.shape}")
            if not np.all(np.isfinite(arr)) or not np.any(arr):
                raise ConfigError("slip.coefficients", "must be finite and not all zero")
        if s["kind"] == "one-directional":
            d = _vec(s, "direction", 2)
            if not any(d):
                raise ConfigError("slip.direction", "must be nonzero")

    # ---- builders ----
    def __getitem__(self, key):
        return self.raw[key]

    def rng(self, stream=0):
        return make_rng(self.raw["seed"], stream)

    def model(self) -> ForwardModel:
        c = self.raw
        grid = ObservationGrid.uniform(*c["window"], *c["grid"])
        quad = QuadratureRule.gauss_legendre(self.rect, *c["quadrature"])
        return ForwardModel(self.lame, grid, quad, self.basis(), c["admissible"]["depth_min"])

    def basis(self):
        return SineBasis(*self.raw["basis"], self.rect)

    def slip(self, kind=None) -> SlipField:
        """The configured slip; random coefficients (seeded) when none are given."""
        s = self.raw["slip"]
        kind = kind or s["kind"]
        B = self.basis()
        if s["coefficients"] is not None and kind == s["kind"]:
            coeffs = np.asarray(s["coefficients"], dtype=float)
        else:
            rng = self.rng(stream=1)
            free = rng.standard_normal((2, B.n1, B.n2))
            # decay keeps the slip smooth without favouring any single mode
            p = np.arange(1, B.n1 + 1)[:, None]
            q = np.arange(1, B.n2 + 1)[None, :]
            free = free / (p * q)
            coeffs = free if kind == "free" else free[0]
        if kind == "free":
            return SlipField(B, coeffs)
        if kind == "one-directional":
            return SlipField(B, coeffs, "one-directional", tuple(s["direction"]))
        return gradient_slip(B, coeffs)

    def canonical(self):
        return json.dumps(self.raw, sort_keys=True, separators=(",", ":"))

    def digest(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()


def make_rng(seed, stream=0):
    """Counter-based generator; ``stream`` selects an independent key."""
    return np.random.Generator(np.random.Philox(key=[int(seed), int(stream)]))


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from exc
    return ExperimentConfig(raw)
