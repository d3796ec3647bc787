"""Run configuration: JSON schema, loading, and construction of domain objects."""
from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any, Optional

import jsonschema
import numpy as np

from .domain import ConformalBackground, DomainError, QuarticInput, build_disk_background, build_torus_background
from .flat.geodesic import CurveClass
from .flat.surface import FlatSurface, build_flat_surface, builtin_surface
from .solver import SolverOptions

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


_complex = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}

SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "hitchin-lab/run-config/v1",
    "type": "object",
    "required": ["schema_version"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "domain": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "n"],
                    "properties": {
                        "kind": {"const": "torus"},
                        "lx": {"type": "number", "exclusiveMinimum": 0},
                        "ly": {"type": "number", "exclusiveMinimum": 0},
                        "n": {"type": "integer", "minimum": 8},
                        "sigma0": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "n"],
                    "properties": {
                        "kind": {"const": "disk"},
                        "rfrac": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.9},
                        "n": {"type": "integer", "minimum": 16},
                        "discrete_hyperbolic": {"type": "boolean"},
                    },
                },
            ]
        },
        "differential": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "value"],
                    "properties": {"kind": {"const": "constant"}, "value": _complex},
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "coefficients"],
                    "properties": {
                        "kind": {"const": "polynomial"},
                        "coefficients": {"type": "array", "items": _complex, "minItems": 1},
                        "scale": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
            ]
        },
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tolerance": {"type": "number", "exclusiveMinimum": 0},
                "max_iterations": {"type": "integer", "minimum": 1},
                "damping_floor": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "init": {"enum": ["sub", "super", "algebraic"]},
                "boundary": {"enum": ["algebraic", "subsolution"]},
            },
        },
        "t_list": {
            "type": "array",
            "items": {"type": "number", "exclusiveMinimum": 0},
            "minItems": 1,
        },
        "warm_start": {"type": "boolean"},
        "surface": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["builtin"],
                    "properties": {
                        "builtin": {"enum": ["octagon", "square-torus"]},
                        "side": {"type": "number", "exclusiveMinimum": 0},
                        "scale": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["polygons", "pairings"],
                    "properties": {
                        "polygons": {
                            "type": "array",
                            "minItems": 1,
                            "items": {
                                "type": "array",
                                "minItems": 3,
                                "items": {"type": "array", "items": {"type": "number"},
                                          "minItems": 2, "maxItems": 2},
                            },
                        },
                        "pairings": {
                            "type": "array",
                            "items": {"type": "array", "items": {"type": "integer"},
                                      "minItems": 3, "maxItems": 3},
                        },
                        "allow_punctures": {"type": "boolean"},
                        "scale": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
            ]
        },
        "saddle_length": {"type": "number", "exclusiveMinimum": 0},
        "curves": {
            "type": "array",
            "items": {
                "oneOf": [
                    {"type": "object", "additionalProperties": False, "required": ["torus"],
                     "properties": {"torus": {"type": "array", "items": {"type": "integer"},
                                              "minItems": 2, "maxItems": 2}}},
                    {"type": "object", "additionalProperties": False, "required": ["word"],
                     "properties": {"word": {"type": "array", "items": {"type": "integer", "minimum": 0},
                                             "minItems": 1}}},
                    {"type": "object", "additionalProperties": False, "required": ["edge_loop"],
                     "properties": {"edge_loop": {"type": "integer", "minimum": 0}}},
                ]
            },
        },
        "entropy": {
            "type": "object",
            "additionalProperties": False,
            "required": ["L"],
            "properties": {
                "L": {"type": "number", "exclusiveMinimum": 0},
                "start": {"type": "number", "exclusiveMinimum": 0},
                "step": {"type": "number", "exclusiveMinimum": 0},
                "tail_fraction": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "budget": {"type": "integer", "minimum": 1},
            },
        },
        "bessel": {
            "type": "object",
            "additionalProperties": False,
            "required": ["x"],
            "properties": {"x": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1}},
        },
        "decay": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "distance_near": {"type": "number", "exclusiveMinimum": 0},
                "distance_far": {"type": "number", "exclusiveMinimum": 0},
                "samples": {"type": "integer", "minimum": 4},
                "multipliers": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                                "minItems": 1},
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": {"type": "number", "exclusiveMinimum": 0},
        },
    },
}


_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def _leaf_error(errors):
    errors = list(errors)
    if not errors:
        return None
    exc = max(errors, key=jsonschema.exceptions.relevance)
    if exc.context:
        # inside oneOf, report from the branch that matched the discriminator, else the closest one
        branches: dict = {}
        for e in exc.context:
            branches.setdefault(e.schema_path[0], []).append(e)
        keyed = [b for b in branches.values()
                 if not any(e.validator == "const" and list(e.relative_path) == ["kind"] for e in b)]
        return _leaf_error(min(keyed or branches.values(), key=len))
    return exc


def validate(cfg: Any) -> dict:
    """Validate against the schema; raise :class:`ConfigError` naming the offending field."""
    exc = _leaf_error(_VALIDATOR.iter_errors(cfg))
    if exc is not None:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config field {where}: {exc.message}")
    return cfg


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return validate(cfg)


def _cplx(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)


def build_background(cfg: dict) -> ConformalBackground:
    d = cfg.get("domain")
    if d is None:
        raise ConfigError("config has no domain")
    try:
        if d["kind"] == "torus":
            return build_torus_background(d.get("lx", 1.0), d.get("ly", 1.0), d["n"], d.get("sigma0", 1.0))
        return build_disk_background(d.get("rfrac", 0.5), d["n"], d.get("discrete_hyperbolic", True))
    except DomainError as exc:
        raise ConfigError(f"domain: {exc}") from None


def build_quartic(cfg: dict, bg: ConformalBackground) -> QuarticInput:
    d = cfg.get("differential")
    if d is None:
        raise ConfigError("config has no differential")
    try:
        if d["kind"] == "constant":
            return QuarticInput.constant(bg, _cplx(d["value"]))
        coeffs = [_cplx(c) * d.get("scale", 1.0) for c in d["coefficients"]]
        return QuarticInput.polynomial(bg, coeffs)
    except DomainError as exc:
        raise ConfigError(f"differential: {exc}") from None


def solver_options(cfg: dict, tol: Optional[float] = None) -> SolverOptions:
    kw = dict(cfg.get("solver", {}))
    if tol is not None:
        kw["tolerance"] = float(tol)
    try:
        return SolverOptions(**kw)
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from None


def build_surface(cfg: dict) -> FlatSurface:
    s = cfg.get("surface")
    if s is None:
        raise ConfigError("config has no surface")
    try:
        if "builtin" in s:
            surf = builtin_surface(s["builtin"], side=s.get("side", 1.0))
        else:
            polys = [[complex(x, y) for x, y in p] for p in s["polygons"]]
            surf = build_flat_surface(polys, [tuple(p) for p in s["pairings"]],
                                      allow_punctures=s.get("allow_punctures", False))
    except ValueError as exc:
        raise ConfigError(f"surface: {exc}") from None
    if "scale" in s:
        surf = surf.scaled(s["scale"])
    return surf


def build_curves(cfg: dict, surface: FlatSurface) -> list[tuple[str, CurveClass]]:
    from .flat.geodesic import edge_loop_word
    out = []
    for c in cfg.get("curves", []):
        try:
            if "torus" in c:
                out.append((f"torus{tuple(c['torus'])}", CurveClass.from_torus(*c["torus"])))
            elif "word" in c:
                out.append((f"word{tuple(c['word'])}", CurveClass.from_word(c["word"])))
            else:
                out.append((f"edge_loop({c['edge_loop']})",
                            CurveClass.from_word(edge_loop_word(surface, c["edge_loop"]))))
        except ValueError as exc:
            raise ConfigError(f"curves: {exc}") from None
    return out


def entropy_cutoffs(cfg: dict) -> tuple[float, list[float]]:
    e = cfg.get("entropy")
    if e is None:
        raise ConfigError("config has no entropy block")
    L = float(e["L"])
    start = float(e.get("start", L / 8))
    step = float(e.get("step", (L - start) / 24))
    if start > L:
        raise ConfigError("entropy: start exceeds L")
    cut = list(np.arange(start, L + 0.5 * step, step))
    cut = [float(min(c, L)) for c in cut]
    return L, cut


def tolerance(cfg: dict, key: str, default: float) -> float:
    return float(cfg.get("tolerances", {}).get(key, default))


def with_defaults(cfg: Optional[dict]) -> dict:
    return copy.deepcopy(cfg) if cfg is not None else {"schema_version": SCHEMA_VERSION}
