"""Run configuration: defaults, JSON schema validation, hashing, overrides."""

from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path

import jsonschema

__all__ = ["default_config", "fast_config", "full_config", "load_config",
           "validate_config", "apply_overrides", "config_hash", "CONFIG_SCHEMA"]


def _num(minimum=None, maximum=None, exclusive_min=None):
    out = {"type": "number"}
    if minimum is not None:
        out["minimum"] = minimum
    if maximum is not None:
        out["maximum"] = maximum
    if exclusive_min is not None:
        out["exclusiveMinimum"] = exclusive_min
    return out


CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "income": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                # persistence/dispersion of the skill process are not pinned
                # down by any published moment; see README on these defaults
                "rho_s": _num(0.0, 0.999),
                "sigma_s": _num(exclusive_min=0.0),
                "n_s": {"type": "integer", "minimum": 2},
                "width": _num(exclusive_min=0.0),
                "zeta": _num(0.0, 0.5),
                "iota": _num(exclusive_min=0.0, maximum=1.0),
            },
        },
        "preferences": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "beta": _num(exclusive_min=0.0, maximum=0.9999),
                "xi": _num(exclusive_min=0.0),
                "gamma": _num(exclusive_min=0.0),
                "varsigma": {"type": ["number", "null"]},
            },
        },
        "household": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "lam": _num(exclusive_min=0.0, maximum=1.0),
                "a_lower": {"type": ["number", "null"]},
                "R_bar": _num(0.0),
                "a_max_factor": _num(exclusive_min=0.0),
                "k_max_factor": _num(exclusive_min=0.0),
            },
        },
        "grids": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_a": {"type": "integer", "minimum": 10},
                "n_k": {"type": "integer", "minimum": 5},
                "n_extra": {"type": "integer", "minimum": 0, "maximum": 5},
            },
        },
        "technology": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "alpha": _num(exclusive_min=0.0, maximum=0.99),
                "delta0": _num(exclusive_min=0.0),
                "delta_ratio": _num(0.0),
                "phi_I": _num(0.0),
                "mu_ss": _num(exclusive_min=1.0),
            },
        },
        "nominal": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kappa_Y": _num(exclusive_min=0.0),
                "kappa_w": _num(exclusive_min=0.0),
                "eps_w": _num(exclusive_min=1.0),
                "wage_pc_form": {"enum": ["standard", "as_printed"]},
            },
        },
        "fiscal": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tau_w": _num(0.0, 1.0),
                "tau_p": _num(0.0, 1.0),
                "tau_Xi": _num(0.0, 1.0),
                "delta_B": _num(exclusive_min=0.0, maximum=1.0),
                "rho_tau": _num(0.0, 0.9999),
                "psi_B": _num(0.0),
                "b_target": _num(exclusive_min=0.0),
                "G_ss": {"type": ["number", "null"]},
            },
        },
        "monetary": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rho_R": _num(0.0, 0.9999),
                "theta_pi": _num(exclusive_min=1.0),
                "theta_y": _num(0.0),
                "elb_gap": _num(0.0),
            },
        },
        "liquidity": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "Psi": _num(0.0),
                "varphi": {"type": ["number", "null"]},
            },
        },
        "numerics": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "T": {"type": "integer", "minimum": 20},
                "tol_backward": _num(exclusive_min=0.0),
                "tol_dist": _num(exclusive_min=0.0),
                "tol_market": _num(exclusive_min=0.0),
                "fd_step": _num(exclusive_min=0.0),
            },
        },
    },
}


def default_config() -> dict:
    """Baseline parameterization (Tables 1-2 values where published)."""
    return {
        "income": {"rho_s": 0.98, "sigma_s": 0.12, "n_s": 17, "width": 3.0,
                   "zeta": 0.0005, "iota": 0.0625},
        "preferences": {"beta": 0.9838, "xi": 1.5, "gamma": 1.0, "varsigma": None},
        "household": {"lam": 0.0363, "a_lower": None, "R_bar": 0.0355,
                      "a_max_factor": 300.0, "k_max_factor": 600.0},
        "grids": {"n_a": 90, "n_k": 90, "n_extra": 5},
        "technology": {"alpha": 0.33, "delta0": 0.0175, "delta_ratio": 1.0,
                       "phi_I": 3.5, "mu_ss": 1.1},
        "nominal": {"kappa_Y": 0.06, "kappa_w": 0.015, "eps_w": 11.0,
                    "wage_pc_form": "standard"},
        "fiscal": {"tau_w": 0.2, "tau_p": 0.12, "tau_Xi": 0.24, "delta_B": 0.05,
                   "rho_tau": 0.94, "psi_B": 0.5, "b_target": 1.8, "G_ss": None},
        "monetary": {"rho_R": 0.8, "theta_pi": 1.5, "theta_y": 0.2, "elb_gap": 0.005},
        "liquidity": {"Psi": 0.005, "varphi": 0.0092},
        "numerics": {"T": 500, "tol_backward": 1e-10, "tol_dist": 1e-12,
                     "tol_market": 1e-8, "fd_step": 1e-5},
    }


def full_config() -> dict:
    return default_config()


def fast_config() -> dict:
    """Desk-scale configuration for property tests and quick experiments."""
    cfg = default_config()
    cfg["income"]["n_s"] = 6
    cfg["grids"].update(n_a=40, n_k=40)
    cfg["numerics"].update(T=150)
    return cfg


def validate_config(cfg: dict):
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError:
        validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
        msgs = [
            f"{'/'.join(str(p) for p in e.absolute_path) or '<root>'}: {e.message}"
            for e in validator.iter_errors(cfg)
        ]
        raise ValueError("invalid config:\n  " + "\n  ".join(sorted(msgs)))


def load_config(path: str | Path | None, preset: str = "full") -> dict:
    base = fast_config() if preset == "fast" else default_config()
    if path is not None:
        with open(path) as f:
            user = json.load(f)
        validate_config(user)
        base = _deep_merge(base, user)
    validate_config(base)
    return base


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = v
    return out


def apply_overrides(cfg: dict, assignments: list[str]) -> dict:
    """Apply `section.key=value` overrides (values parsed as JSON scalars)."""
    out = copy.deepcopy(cfg)
    for item in assignments:
        if "=" not in item:
            raise ValueError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        parts = key.split(".")
        node = out
        for p in parts[:-1]:
            if p not in node:
                raise ValueError(f"unknown config section {p!r} in {item!r}")
            node = node[p]
        if parts[-1] not in node:
            raise ValueError(f"unknown config key {key!r}")
        try:
            node[parts[-1]] = json.loads(raw)
        except json.JSONDecodeError:
            node[parts[-1]] = raw
    validate_config(out)
    return out


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
