"""Run configuration: flat TOML with dotted section keys.

Example::

    model.c1 = 1.0
    model.xi_modes = [[1, 1.0]]
    exponents.gamma = 0.8
    discretization.levels = [5, 6, 7, 8]
    monte_carlo.seed = "0x2a"

Unknown keys are rejected.
"""

import copy
import json
import os
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .analysis import BoundConstants
from .noise import parse_seed
from .scheme import InvalidParameters, ModelParams, initial_condition, validate_params

OUT_ENV = "BURGERS_SPDE_OUT"

DEFAULTS = {
    "model": {
        "c1": 1.0,
        "c0": 1.0,
        "kappa": 0.0,
        "T": 1.0,
        "xi_modes": [[1, 1.0]],
        "noise": True,
    },
    "exponents": {"gamma": 0.8, "varrho": 0.15, "chi": 0.0125, "q": 2.0},
    "discretization": {"levels": [5, 6, 7, 8], "n_max": 10},
    "monte_carlo": {"paths": 64, "seed": 0},
    "bounds": {
        "eta": 0.0,
        "beta": 1.0,
        "theta": None,
        "varphi": 0.75,
        "epsilon": 0.0,
        "slack": 1e-6,
    },
    "output": {"directory": None, "emit_trajectories": False},
}


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors) if not isinstance(errors, str) else [errors]
        super().__init__("; ".join(self.errors))


def _merge(raw):
    cfg = copy.deepcopy(DEFAULTS)
    errors = []
    for section, values in raw.items():
        if section not in cfg:
            errors.append(f"unknown section '{section}'")
            continue
        if not isinstance(values, dict):
            errors.append(f"'{section}' must be a table of keys")
            continue
        for key, val in values.items():
            if key not in cfg[section]:
                errors.append(f"unknown key '{section}.{key}'")
            else:
                cfg[section][key] = val
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path):
    """Read a TOML run config or the config echoed inside a run manifest."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        doc = json.loads(text)
        raw = doc.get("config", doc)
    else:
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return normalise(_merge(raw))


def normalise(cfg):
    """Type-check a merged config and validate model constraints."""
    errors = []
    cfg["monte_carlo"]["seed"] = parse_seed(cfg["monte_carlo"]["seed"])
    cfg["monte_carlo"]["paths"] = int(cfg["monte_carlo"]["paths"])
    levels = [int(v) for v in cfg["discretization"]["levels"]]
    n_max = int(cfg["discretization"]["n_max"])
    cfg["discretization"]["levels"] = levels
    cfg["discretization"]["n_max"] = n_max
    if not levels:
        errors.append("discretization.levels must be non-empty")
    elif sorted(set(levels)) != levels:
        errors.append("discretization.levels must be strictly increasing")
    elif levels[0] < 1 or levels[-1] > n_max - 2:
        errors.append(f"levels must lie in [1, n_max - 2] = [1, {n_max - 2}]")
    if cfg["monte_carlo"]["paths"] < 1:
        errors.append("monte_carlo.paths must be >= 1")
    cfg["model"]["xi_modes"] = [[int(k), float(c)] for k, c in cfg["model"]["xi_modes"]]
    try:
        validate_params(model_params(cfg))
    except InvalidParameters as exc:
        errors.extend(exc.errors)
    except ValueError as exc:
        errors.append(str(exc))
    try:
        bound_constants(cfg)
    except ValueError as exc:
        errors.append(str(exc))
    if errors:
        raise ConfigError(errors)
    return cfg


def model_params(cfg):
    m, e = cfg["model"], cfg["exponents"]
    return ModelParams(
        c1=float(m["c1"]),
        c0=float(m["c0"]),
        kappa=float(m["kappa"]),
        T=float(m["T"]),
        xi=initial_condition(m["xi_modes"]),
        gamma=float(e["gamma"]),
        varrho=float(e["varrho"]),
        chi=float(e["chi"]),
        q_moment=float(e["q"]),
    )


def bound_constants(cfg):
    b = cfg["bounds"]
    return BoundConstants(
        eta=float(b["eta"]),
        beta=float(b["beta"]),
        theta=None if b["theta"] is None else float(b["theta"]),
        epsilon=float(b["epsilon"]),
        varphi=float(b["varphi"]),
        slack=float(b["slack"]),
    )


def path_seeds(cfg, paths=None):
    """Per-path 64-bit seeds derived from the master seed."""
    n = cfg["monte_carlo"]["paths"] if paths is None else paths
    master = cfg["monte_carlo"]["seed"]
    return [
        int(np.random.SeedSequence(master, spawn_key=(i,)).generate_state(1, np.uint64)[0])
        for i in range(n)
    ]


def output_dir(cfg, override=None):
    if override:
        return Path(override)
    if cfg["output"]["directory"]:
        return Path(cfg["output"]["directory"])
    return Path(os.environ.get(OUT_ENV, "out"))


def to_jsonable(cfg):
    out = copy.deepcopy(cfg)
    out["monte_carlo"]["seed"] = str(cfg["monte_carlo"]["seed"])
    return out
