"""Run configuration: a single JSON document with per-command blocks.

CLI flags override config fields; the effective configuration is hashed
and the digest is stamped into every exported CSV, so a run is fully
reproducible from the config alone.  Unknown keys are rejected.
"""

import copy
import hashlib
import json

from .errors import ParameterError
from .params import ModelParams
from .stationary import DEFAULT_MULTISTART_SEED

DEFAULT_CONFIG = {
    "model": {
        "N": 4,
        "sigma": 1.0,
        "lambda_D": 0.0,
        "beta": 1.0,
        "hbar": 1.0,
        "eta": -12.0,
        "epsilon": None,
    },
    "spectrum": {},
    "stationary_sweep": {
        "families": [[2, 2], [1, 2], [2, 1], [1, 1]],
        "q_min": 1e-4,
        "q_max": 0.4999,
        "n_points": 1200,
    },
    "branches": {
        "eta_min": -13.0,
        "eta_max": 0.0,
        "include_family_curves": True,
    },
    "census": {
        "n_random": 600,
        "strategies": ["linear", "localized", "pairs", "family", "random"],
    },
    "bif_table": {
        "N_list": [2, 4, 6, 8],
        "sigma": 1.0,
    },
    "evolve": {
        "initial": {"kind": "eigenvector", "index": 1},
        "t_end": 20.0,
        "dt": None,
        "stride": 10,
        "order": 2,
    },
    "linear1d": {
        "V0": 5.0,
        "r": 1.0,
        "ell": 2.5,
        "hbar": 0.3,
        "n_points": 4000,
    },
    "output_path": "out",
    "seed": DEFAULT_MULTISTART_SEED,
    "threads": 1,
    "plot": True,
}


# sections replaced wholesale (their schema depends on a "kind" selector)
_FREE_FORM = {"evolve.initial"}


def _merge_checked(defaults, override, path=""):
    if not isinstance(override, dict):
        raise ParameterError(f"config section '{path or '<root>'}' must be an object")
    merged = copy.deepcopy(defaults)
    for key, value in override.items():
        if key not in defaults:
            raise ParameterError(f"unknown config key '{path + key}'")
        if isinstance(defaults[key], dict) and (path + key) not in _FREE_FORM:
            merged[key] = _merge_checked(defaults[key], value, path + key + ".")
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def load_config(path=None):
    """Defaults deep-merged with the JSON file at `path` (strict keys)."""
    if path is None:
        return copy.deepcopy(DEFAULT_CONFIG)
    with open(path) as fh:
        user = json.load(fh)
    return _merge_checked(DEFAULT_CONFIG, user)


def apply_overrides(config, out=None, seed=None, threads=None, plot=None):
    if out is not None:
        config["output_path"] = str(out)
    if seed is not None:
        config["seed"] = int(seed)
    if threads is not None:
        if threads < 1:
            raise ParameterError(f"--threads must be >= 1, got {threads}")
        config["threads"] = int(threads)
    if plot is not None:
        config["plot"] = bool(plot)
    return config


def config_digest(config):
    """Short stable hash of the effective configuration."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def model_params(config) -> ModelParams:
    m = config["model"]
    return ModelParams(
        N=int(m["N"]),
        sigma=float(m["sigma"]),
        lambda_D=float(m["lambda_D"]),
        beta=float(m["beta"]),
        hbar=float(m["hbar"]),
        eta=None if m.get("eta") is None else float(m["eta"]),
        epsilon=None if m.get("epsilon") is None else float(m["epsilon"]),
    )
