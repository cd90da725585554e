"""Experiment configuration: TOML file validated against a JSON schema."""
import sys
from dataclasses import dataclass
from pathlib import Path

import jsonschema

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from fermiszego.errors import ValidationError
from fermiszego.potentials import PotentialSpec
from fermiszego.testfunctions import TestFunction


class ConfigError(ValidationError):
    pass


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_hbars = {"type": "array", "items": _pos, "minItems": 1}
_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_name = {"type": "string", "minLength": 1}

SCHEMA = {
    "type": "object",
    "required": ["name", "potential", "run"],
    "additionalProperties": False,
    "properties": {
        "name": _name,
        "seed": {"type": "integer", "minimum": 0},
        "potential": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["harmonic", "double_well", "quartic", "custom_polynomial"]},
                "coefficients": {"type": "array", "items": _num},
            },
        },
        "run": {
            "type": "object",
            "required": ["mu", "hbar"],
            "additionalProperties": False,
            "properties": {
                "mu": _num,
                "hbar": _hbars,
                "box": _pair,
                "grid_tol": _pos,
                "cap_margin": _pos,
            },
        },
        "test_functions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "kind", "parameters"],
                "additionalProperties": False,
                "properties": {
                    "name": _name,
                    "kind": {"enum": ["polynomial", "gaussian_bump"]},
                    "parameters": {"type": "array", "items": _num, "minItems": 1},
                },
            },
        },
        "spectrum": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "reference": {
                    "type": "object",
                    "required": ["box", "n", "hbar", "count"],
                    "additionalProperties": False,
                    "properties": {
                        "box": _pair,
                        "n": {"type": "integer", "minimum": 16},
                        "hbar": _pos,
                        "count": {"type": "integer", "minimum": 1},
                        "tolerance": _pos,
                        "max_seconds": _pos,
                    },
                },
                "rank_tolerance": _pos,
            },
        },
        "variance": {
            "type": "object",
            "additionalProperties": False,
            "required": ["test_function"],
            "properties": {
                "test_function": _name,
                "hbar": _hbars,
                "expected": _num,
                "route_tolerance": _pos,
                "relative_tolerance": _pos,
                "max_seconds": _pos,
            },
        },
        "clt": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "residual_functions": {"type": "array", "items": _name},
                "residual_threshold": _pos,
                "cumulant_function": _name,
                "eta_step": _pos,
                "kappa3_threshold": _pos,
                "kappa4_threshold": _pos,
                "upsilon_functions": {"type": "array", "items": _name},
                "upsilon_eta": {"type": "array", "items": _num},
                "upsilon_tolerance": _pos,
                "residual_hbar": _pos,
                "fixed_filling": {"type": "array", "items": _pos},
                "max_seconds": _pos,
            },
        },
        "toeplitz": {
            "type": "object",
            "additionalProperties": False,
            "required": ["test_function"],
            "properties": {
                "test_function": _name,
                "hbar": _hbars,
                "band": {"type": "integer", "minimum": 1},
                "window": _pos,
                "lambda_cap": _num,
                "threshold": _pos,
                "ratio_tolerance": _pos,
            },
        },
        "sample": {
            "type": "object",
            "additionalProperties": False,
            "required": ["test_function"],
            "properties": {
                "test_function": _name,
                "hbar": _pos,
                "n_samples": {"type": "integer", "minimum": 1000},
                "n_boot": {"type": "integer", "minimum": 10},
                "z_threshold": _pos,
                "counting_hbar": _pos,
                "probes": _pair,
                "counting_tolerance": _pos,
                "max_seconds": _pos,
            },
        },
        "szego": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "N": {"type": "array", "items": {"type": "integer", "minimum": 1},
                      "minItems": 1},
                "tolerance": _pos,
                "floor": _pos,
                "symbols": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["name", "kind"],
                        "additionalProperties": False,
                        "properties": {
                            "name": _name,
                            "kind": {"enum": ["cosine", "log"]},
                            "amplitude": _num,
                            "k": {"type": "integer", "minimum": 1},
                            "rho": {"type": "number", "exclusiveMinimum": 0,
                                    "exclusiveMaximum": 1},
                            "s": _num,
                            "limit": _num,
                        },
                    },
                },
                "dhk_n_max": {"type": "integer", "minimum": 2, "maximum": 7},
                "dhk_range": {"type": "integer", "minimum": 1},
                "max_seconds": _pos,
            },
        },
        "multicut": {
            "type": "object",
            "additionalProperties": False,
            "required": ["eps"],
            "properties": {
                "eps": _pos,
                "draws": {"type": "integer", "minimum": 1},
                "hbar": _hbars,
                "test_function": _name,
                "eta": _num,
                "pass_rate": _pos,
                "decomposition_tolerance": _pos,
                "variance_tolerance": _pos,
                "log_laplace_tolerance": _pos,
                "max_seconds": _pos,
            },
        },
    },
}


@dataclass
class ExperimentConfig:
    raw: dict
    path: Path

    @property
    def name(self):
        return self.raw["name"]

    @property
    def seed(self):
        return int(self.raw.get("seed", 0))

    @property
    def potential(self):
        p = self.raw["potential"]
        return PotentialSpec(p["kind"], tuple(p.get("coefficients", ())))

    @property
    def mu(self):
        return float(self.raw["run"]["mu"])

    @property
    def hbars(self):
        return [float(h) for h in self.raw["run"]["hbar"]]

    @property
    def box(self):
        b = self.raw["run"].get("box")
        return tuple(b) if b else None

    @property
    def grid_tol(self):
        return float(self.raw["run"].get("grid_tol", 0.05))

    @property
    def cap_margin(self):
        return float(self.raw["run"].get("cap_margin", 0.5))

    def section(self, name):
        return self.raw.get(name)

    def test_function(self, name):
        for tf in self.raw.get("test_functions", []):
            if tf["name"] == name:
                return TestFunction(tf["kind"], tuple(tf["parameters"]), name)
        raise ConfigError(f"unknown test function {name!r}")


def _decreasing(xs):
    return all(a > b for a, b in zip(xs, xs[1:]))


def _referenced_functions(raw):
    refs = []
    for sec in ("variance", "toeplitz", "sample", "multicut"):
        if sec in raw and "test_function" in raw[sec]:
            refs.append(raw[sec]["test_function"])
    clt = raw.get("clt", {})
    refs += clt.get("residual_functions", []) + clt.get("upsilon_functions", [])
    if "cumulant_function" in clt:
        refs.append(clt["cumulant_function"])
    return refs


def validate(raw, path="<memory>"):
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path)
        raise ConfigError(f"{path}: {loc or '<root>'}: {exc.message}") from None
    lists = [("run.hbar", raw["run"]["hbar"])]
    for sec in ("variance", "toeplitz", "multicut"):
        if sec in raw and "hbar" in raw[sec]:
            lists.append((f"{sec}.hbar", raw[sec]["hbar"]))
    for label, hs in lists:
        if not _decreasing(hs):
            raise ConfigError(f"{path}: {label} must be strictly decreasing, got {hs}")
    names = [tf["name"] for tf in raw.get("test_functions", [])]
    if len(set(names)) != len(names):
        raise ConfigError(f"{path}: duplicate test function names")
    for ref in _referenced_functions(raw):
        if ref not in names:
            raise ConfigError(f"{path}: unknown test function {ref!r}")
    box = raw["run"].get("box")
    if box and not box[0] < box[1]:
        raise ConfigError(f"{path}: run.box must be increasing")
    try:
        PotentialSpec(raw["potential"]["kind"], tuple(raw["potential"].get("coefficients", ())))
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return raw


def load_config(path):
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return ExperimentConfig(validate(raw, path), path)
