"""JSON experiment configuration: defaults, strict validation, overrides.

All frequencies in config files are plain Hz (converted to rad/s internally),
times in seconds. Unknown keys are rejected so typos cannot silently fall
back to defaults.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .compiler import GateErrorModel, GateTimes
from .dynamics import NoiseParams
from .hamiltonians import DeviceParams

TWO_PI = 2.0 * math.pi

EXPERIMENTS = ("fig2-heisenberg", "fig2-tfim", "fig3", "table1", "bounds")

# schema leaves: (default, validator) where validator(value) -> error or None
_MISSING = object()


def _typed(kind, lo=None, hi=None, choices=None, allow_none=False):
    def check(v):
        if v is None:
            return None if allow_none else "must not be null"
        if kind is float:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                return "must be a number"
            v = float(v)
        elif kind is int:
            if isinstance(v, bool) or not isinstance(v, int):
                return "must be an integer"
        elif kind is bool:
            if not isinstance(v, bool):
                return "must be a boolean"
        elif kind is str:
            if not isinstance(v, str):
                return "must be a string"
        if choices is not None and v not in choices:
            return f"must be one of {sorted(choices)}"
        if lo is not None and v < lo:
            return f"must be >= {lo}"
        if hi is not None and v > hi:
            return f"must be <= {hi}"
        return None

    return check


_SCHEMA = {
    "experiment": (_MISSING, _typed(str, choices=set(EXPERIMENTS))),
    "model": {
        "name": (None, _typed(str, choices={"heisenberg", "ising", "tfim"}, allow_none=True)),
        "n": (3, _typed(int, lo=2, hi=6)),
        "j": (6.4e6, _typed(float)),
        "b": (None, _typed(float, allow_none=True)),
        "boundary": (None, _typed(str, choices={"open", "periodic"}, allow_none=True)),
    },
    "protocol": {
        "theta_min": (0.0, _typed(float, lo=0.0, hi=math.pi)),
        "theta_max": (None, _typed(float, lo=0.0, hi=math.pi, allow_none=True)),
        "theta_points": (64, _typed(int, lo=1)),
        "theta_grid": (None, None),  # explicit list overrides min/max/points
        "l_list": (None, None),
        "epsilon": (0.01, _typed(float, lo=0.0, hi=0.999999)),
        "panels": (None, None),
    },
    "table1": {
        "n_list": (None, None),
        "theta": (math.pi / 4, _typed(float, lo=0.0)),
        "l": (1, _typed(int, lo=1)),
    },
    "device": {
        "omega1": (5.0e9, _typed(float, lo=1.0)),
        "alpha_r": (-0.1, _typed(float)),
        "omega_r": (7.5e9, _typed(float, lo=1.0)),
        "g0": (200.0e6, _typed(float, lo=0.0)),
        "levels_per_transmon": (3, _typed(int, lo=2)),
        "fock_cutoff": (5, _typed(int, lo=2)),
    },
    "noise": {
        "enabled": (True, _typed(bool)),
        "kappa": (10.0e3, _typed(float, lo=0.0)),
        "gamma_phi": (20.0e3, _typed(float, lo=0.0)),
        "gamma_minus": (20.0e3, _typed(float, lo=0.0)),
    },
    "integrator": {
        "dt": (2.0e-12, _typed(float, lo=1e-15)),
        "mode": ("propagator", _typed(str, choices={"propagator", "stepwise"})),
        "calibration": ("calibrated", _typed(str, choices={"calibrated", "formula", "rounded"})),
    },
    "gate_times": {
        "tau_s": (10.0e-9, _typed(float, lo=1e-12)),
        "j_rate": (6.4e6, _typed(float, lo=1.0)),
        "g_phi": (10.0e6, _typed(float, lo=1.0)),
    },
    "gate_errors": {
        "two_qubit": (0.05, _typed(float, lo=0.0, hi=0.999999)),
        "single_qubit": (0.01, _typed(float, lo=0.0, hi=0.999999)),
    },
    "initial_state": (None, _typed(str, choices={"up_down_up", "all_up", "all_down", "tilted_down"}, allow_none=True)),
    "output": {
        "dir": (None, _typed(str, allow_none=True)),
        "format": ("csv", _typed(str, choices={"csv", "json"})),
    },
}

_DEFAULT_PANELS = [
    {"l_list": [3, 5], "epsilon": 0.01},
    {"l_list": [2, 3], "epsilon": 0.05},
]


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class ExperimentConfig:
    """Fully-resolved configuration with typed accessors."""

    resolved: dict

    @property
    def experiment(self) -> str:
        return self.resolved["experiment"]

    def theta_grid(self) -> np.ndarray:
        p = self.resolved["protocol"]
        if p["theta_grid"] is not None:
            return np.asarray(p["theta_grid"], dtype=float)
        lo, hi, n = p["theta_min"], p["theta_max"], p["theta_points"]
        if n == 1:
            return np.array([lo])
        return np.linspace(lo, hi, n)

    def panels(self) -> list[dict]:
        return self.resolved["protocol"]["panels"]

    def l_list(self) -> list[int]:
        return self.resolved["protocol"]["l_list"]

    def model_boundary(self) -> str:
        return self.resolved["model"]["boundary"]

    def b_over_j(self) -> float:
        m = self.resolved["model"]
        b = m["j"] if m["b"] is None else m["b"]
        return b / m["j"]

    def device_params(self) -> DeviceParams:
        d = self.resolved["device"]
        return DeviceParams(
            n_transmons=2,
            levels_per_transmon=d["levels_per_transmon"],
            omega1=TWO_PI * d["omega1"],
            alpha_r=d["alpha_r"],
            omega_r=TWO_PI * d["omega_r"],
            g0=TWO_PI * d["g0"],
            fock_cutoff=d["fock_cutoff"],
        )

    def noise_params(self) -> NoiseParams:
        n = self.resolved["noise"]
        if not n["enabled"]:
            return NoiseParams(0.0, 0.0, 0.0)
        return NoiseParams(
            kappa=TWO_PI * n["kappa"],
            gamma_phi=TWO_PI * n["gamma_phi"],
            gamma_minus=TWO_PI * n["gamma_minus"],
        )

    def gate_times(self) -> GateTimes:
        g = self.resolved["gate_times"]
        return GateTimes(tau_s=g["tau_s"], j_rate=TWO_PI * g["j_rate"], g_phi=TWO_PI * g["g_phi"])

    def gate_errors(self) -> GateErrorModel:
        g = self.resolved["gate_errors"]
        return GateErrorModel(two_qubit_error=g["two_qubit"], single_qubit_error=g["single_qubit"])

    def initial_state_vector(self, n_sites: int) -> np.ndarray:
        name = self.resolved["initial_state"]
        return named_state(name, n_sites)

    def canonical_json(self) -> str:
        return json.dumps(self.resolved, sort_keys=True, separators=(",", ":"))

    def sha256(self) -> str:
        import hashlib

        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


def named_state(name: str, n_sites: int) -> np.ndarray:
    """Named fiducial states; spin up is basis index 0 on each site."""
    if name == "tilted_down":
        # (|up> + 2|down>)/sqrt(5) on qubit 1, |down> on qubit 2
        if n_sites != 2:
            raise ValueError("'tilted_down' initial state is a two-qubit state")
        return np.array([0.0, 1.0, 0.0, 2.0], dtype=complex) / math.sqrt(5.0)
    v = np.zeros(2**n_sites, dtype=complex)
    if name == "all_up":
        v[0] = 1.0
    elif name == "all_down":
        v[-1] = 1.0
    elif name == "up_down_up":
        idx = 0
        for k in range(n_sites):  # alternating pattern starting spin-up
            idx = 2 * idx + (k % 2)
        v[idx] = 1.0
    else:
        raise ValueError(f"unknown initial state {name!r}")
    return v


def _walk_unknown(data: dict, schema: dict, path: str, errors: list[str]) -> None:
    for key, val in data.items():
        here = f"{path}.{key}" if path else key
        if key not in schema:
            errors.append(f"{here}: unknown key")
            continue
        node = schema[key]
        if isinstance(node, dict):
            if not isinstance(val, dict):
                errors.append(f"{here}: must be an object")
            else:
                _walk_unknown(val, node, here, errors)


def _resolve(data: dict, schema: dict, path: str, errors: list[str]) -> dict:
    out = {}
    for key, node in schema.items():
        here = f"{path}.{key}" if path else key
        if isinstance(node, dict):
            sub = data.get(key, {})
            out[key] = _resolve(sub if isinstance(sub, dict) else {}, node, here, errors)
            continue
        default, check = node
        val = data.get(key, default)
        if val is _MISSING:
            errors.append(f"{here}: required key is missing")
            out[key] = None
            continue
        if check is not None:
            err = check(val)
            if err:
                errors.append(f"{here}: {err}")
        out[key] = val
    return out


def _validate_lists(cfg: dict, errors: list[str]) -> None:
    p = cfg["protocol"]
    grid = p["theta_grid"]
    if grid is not None:
        if not isinstance(grid, list) or not grid or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in grid
        ):
            errors.append("protocol.theta_grid: must be a nonempty list of numbers")
        else:
            if any(x < 0 or x > math.pi for x in grid):
                errors.append("protocol.theta_grid: values must lie in [0, pi]")
            if any(b < a for a, b in zip(grid, grid[1:])):
                errors.append("protocol.theta_grid: must be sorted ascending")
    if p["theta_max"] is not None and p["theta_max"] < p["theta_min"]:
        errors.append("protocol.theta_max: must be >= protocol.theta_min")
    if p["l_list"] is not None:
        if not isinstance(p["l_list"], list) or not p["l_list"] or not all(
            isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in p["l_list"]
        ):
            errors.append("protocol.l_list: must be a nonempty list of integers >= 1")
    if p["panels"] is not None:
        if not isinstance(p["panels"], list) or not p["panels"]:
            errors.append("protocol.panels: must be a nonempty list")
        else:
            for i, panel in enumerate(p["panels"]):
                if not isinstance(panel, dict) or set(panel) != {"l_list", "epsilon"}:
                    errors.append(f"protocol.panels[{i}]: needs exactly l_list and epsilon")
                    continue
                if not isinstance(panel["l_list"], list) or not all(
                    isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in panel["l_list"]
                ):
                    errors.append(f"protocol.panels[{i}].l_list: must be integers >= 1")
                eps = panel["epsilon"]
                if isinstance(eps, bool) or not isinstance(eps, (int, float)) or not 0 <= eps < 1:
                    errors.append(f"protocol.panels[{i}].epsilon: must lie in [0, 1)")
    t = cfg["table1"]
    if t["n_list"] is not None:
        if not isinstance(t["n_list"], list) or not t["n_list"] or not all(
            isinstance(x, int) and not isinstance(x, bool) and 2 <= x <= 6 for x in t["n_list"]
        ):
            errors.append("table1.n_list: must be a nonempty list of integers in [2, 6]")


def _apply_experiment_defaults(cfg: dict) -> None:
    exp = cfg["experiment"]
    p = cfg["protocol"]
    m = cfg["model"]
    if p["theta_max"] is None:
        p["theta_max"] = math.pi / 2 if exp == "fig3" else math.pi / 4
    if m["name"] is None:
        m["name"] = "tfim" if exp == "fig2-tfim" else "heisenberg"
    if m["boundary"] is None:
        m["boundary"] = "periodic" if m["name"] in ("ising", "tfim") else "open"
    if p["panels"] is None:
        p["panels"] = [dict(q) for q in _DEFAULT_PANELS]
    if p["l_list"] is None:
        p["l_list"] = [1, 2, 3, 5]
    if cfg["table1"]["n_list"] is None:
        cfg["table1"]["n_list"] = [2, 3, 4, 5, 6]
    if cfg["initial_state"] is None:
        cfg["initial_state"] = "tilted_down" if exp == "fig3" else "up_down_up"


def resolve_config(data: dict) -> ExperimentConfig:
    """Validate a raw config dict and fill every default."""
    errors: list[str] = []
    if not isinstance(data, dict):
        raise ConfigError(["config root must be a JSON object"])
    _walk_unknown(data, _SCHEMA, "", errors)
    cfg = _resolve(data, _SCHEMA, "", errors)
    if not errors:
        _validate_lists(cfg, errors)
    if errors:
        raise ConfigError(sorted(errors))
    _apply_experiment_defaults(cfg)
    return ExperimentConfig(cfg)


def validate_config(path) -> ExperimentConfig:
    """Load, validate and resolve a JSON config file; empty file means {}."""
    p = Path(path)
    if not p.exists():
        raise ConfigError([f"config file not found: {p}"])
    text = p.read_text()
    if text.strip() == "":
        data: dict = {}
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError([f"config parse error: {e}"]) from e
    return resolve_config(data)


def apply_override(data: dict, dotted: str, raw_value: str) -> None:
    """Apply a --set key=value override onto the raw config dict."""
    keys = dotted.split(".")
    try:
        value = json.loads(raw_value)
    except json.JSONDecodeError:
        value = raw_value
    node = data
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError([f"{dotted}: cannot override through a non-object"])
    node[keys[-1]] = value
