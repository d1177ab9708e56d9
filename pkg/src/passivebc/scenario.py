"""Scenario files: schema-validated JSON driving the CLI.

A scenario fixes the wave coefficients, the node flavor and contraction
parameter, the input signal, the initial state and the time grid.  The
format is strict: ``schema_version`` must equal 1 and unknown keys are
errors, so acceptance runs stay reproducible byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import wave1d
from .errors import ScenarioError
from .jet import transform_node
from .node import BoundaryNode, impedance_node, scattering_node
from .sim import InputSignal
from .wave1d import WaveCoefficients, WaveSystem

__all__ = ["Scenario", "load_scenario", "build_system", "build_node",
           "build_signal", "build_initial_state"]

SCHEMA_VERSION = 1

_TOP_KEYS = {
    "schema_version": True, "formulation": False, "N": True,
    "length": True, "coefficients": True, "P": True, "flavor": True,
    "beta": False, "input": True, "initial": True, "t_final": True,
    "dt": True, "seed": False, "out": False,
}
_FORMULATIONS = ("position-momentum", "strain-momentum")
_FLAVORS = ("impedance", "scattering")
_INPUT_KINDS = ("zero", "sine", "gauss_pulse")
_INITIAL_KINDS = ("zero", "standing_wave", "gauss")


@dataclass(frozen=True)
class Scenario:
    """Validated scenario contents."""

    formulation: str
    N: int
    length: float
    rho: np.ndarray
    T: np.ndarray
    a: np.ndarray
    b: np.ndarray
    P: np.ndarray
    flavor: str
    beta: float
    input: dict
    initial: dict
    t_final: float
    dt: float
    seed: int
    out: str | None


def _fail(msg: str) -> None:
    raise ScenarioError(msg)


def _expect_keys(mapping: dict, allowed: dict, where: str) -> None:
    unknown = set(mapping) - set(allowed)
    if unknown:
        _fail(f"unknown keys in {where}: {sorted(unknown)}")
    missing = [k for k, req in allowed.items() if req and k not in mapping]
    if missing:
        _fail(f"missing keys in {where}: {missing}")


def _positive_number(raw, name: str) -> float:
    if not isinstance(raw, (int, float)) or isinstance(raw, bool):
        _fail(f"{name} must be a number")
    if not raw > 0:
        _fail(f"{name} must be positive")
    return float(raw)


def _coefficient_array(raw, name: str, size: int) -> np.ndarray:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return np.full(size, float(raw))
    if isinstance(raw, list):
        arr = np.asarray(raw, dtype=float)
        if arr.shape != (size,):
            _fail(f"coefficient {name} must have length {size}")
        return arr
    _fail(f"coefficient {name} must be a number or a list")


def _parse_P(raw) -> np.ndarray:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return float(raw) * np.eye(2)
    if isinstance(raw, list) and len(raw) == 2 \
            and all(isinstance(r, list) and len(r) == 2 for r in raw):
        return np.asarray(raw, dtype=float)
    _fail("P must be a scalar or a 2x2 row-major matrix")


def _parse_input(raw) -> dict:
    if not isinstance(raw, dict) or "kind" not in raw:
        _fail("input must be an object with a 'kind' key")
    kind = raw["kind"]
    if kind not in _INPUT_KINDS:
        _fail(f"input kind must be one of {_INPUT_KINDS}")
    allowed = {"kind": True}
    if kind == "sine":
        allowed.update(amplitude=True, frequency=True,
                       channel_weights=True)
    elif kind == "gauss_pulse":
        allowed.update(amplitude=True, center=True, width=True,
                       channel_weights=True)
    _expect_keys(raw, allowed, "input")
    if kind != "zero":
        w = raw["channel_weights"]
        if not (isinstance(w, list) and len(w) == 2):
            _fail("input channel_weights must be a list of length 2")
    return dict(raw)


def _parse_initial(raw) -> dict:
    if not isinstance(raw, dict) or "kind" not in raw:
        _fail("initial must be an object with a 'kind' key")
    kind = raw["kind"]
    if kind not in _INITIAL_KINDS:
        _fail(f"initial kind must be one of {_INITIAL_KINDS}")
    allowed = {"kind": True}
    if kind == "standing_wave":
        allowed.update(k=True)
    elif kind == "gauss":
        allowed.update(center=True, width=True)
    _expect_keys(raw, allowed, "initial")
    return dict(raw)


def load_scenario(path: str | Path) -> Scenario:
    """Parse and validate a scenario file; raises ``ScenarioError``."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        _fail(f"cannot read scenario file {path}: {exc}")
    except json.JSONDecodeError as exc:
        _fail(f"scenario file {path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        _fail("scenario must be a JSON object")
    _expect_keys(raw, _TOP_KEYS, "scenario")
    if raw["schema_version"] != SCHEMA_VERSION:
        _fail(f"schema_version must be {SCHEMA_VERSION}")

    formulation = raw.get("formulation", "position-momentum")
    if formulation not in _FORMULATIONS:
        _fail(f"formulation must be one of {_FORMULATIONS}")
    flavor = raw["flavor"]
    if flavor not in _FLAVORS:
        _fail(f"flavor must be one of {_FLAVORS}")

    n = raw["N"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        _fail("N must be a positive integer")
    length = _positive_number(raw["length"], "length")

    coeffs = raw["coefficients"]
    if not isinstance(coeffs, dict):
        _fail("coefficients must be an object")
    _expect_keys(coeffs, {"rho": True, "T": True, "a": True, "b": True},
                 "coefficients")
    rho = _coefficient_array(coeffs["rho"], "rho", n + 1)
    t_arr = _coefficient_array(coeffs["T"], "T", n)
    a_arr = _coefficient_array(coeffs["a"], "a", n + 1)
    b_arr = _coefficient_array(coeffs["b"], "b", n + 1)

    beta = _positive_number(raw.get("beta", 1.0), "beta")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        _fail("seed must be an integer")
    out = raw.get("out")
    if out is not None and not isinstance(out, str):
        _fail("out must be a string path")

    return Scenario(formulation=formulation, N=n, length=length,
                    rho=rho, T=t_arr, a=a_arr, b=b_arr,
                    P=_parse_P(raw["P"]), flavor=flavor, beta=beta,
                    input=_parse_input(raw["input"]),
                    initial=_parse_initial(raw["initial"]),
                    t_final=_positive_number(raw["t_final"], "t_final"),
                    dt=_positive_number(raw["dt"], "dt"),
                    seed=seed, out=out)


def build_system(sc: Scenario) -> WaveSystem:
    coeffs = WaveCoefficients(sc.N, sc.length, sc.rho, sc.T, sc.a, sc.b)
    return wave1d.assemble(coeffs)


def build_node(sc: Scenario, sys: WaveSystem) -> BoundaryNode:
    """Node on the operator selected by the scenario formulation."""
    builder = impedance_node if sc.flavor == "impedance" else scattering_node
    node_a = builder(sys.op_A, sc.P, sys.M_map, sys.D_map)
    if sc.formulation == "position-momentum":
        return node_a
    return transform_node(sys.jet, node_a)


def build_signal(sc: Scenario) -> InputSignal:
    cfg = sc.input
    kind = cfg["kind"]
    if kind == "zero":
        return InputSignal.zero(2)
    weights = np.asarray(cfg["channel_weights"], dtype=float)
    if kind == "sine":
        return InputSignal("sine", weights=weights,
                           amplitude=float(cfg["amplitude"]),
                           frequency=float(cfg["frequency"]))
    return InputSignal("gauss_pulse", weights=weights,
                       amplitude=float(cfg["amplitude"]),
                       center=float(cfg["center"]),
                       width=float(cfg["width"]))


def build_initial_state(sc: Scenario, sys: WaveSystem) -> np.ndarray:
    """Initial core state in the position-momentum coordinates."""
    cfg = dict(sc.initial)
    kind = cfg.pop("kind")
    return wave1d.initial_state(sys, kind, **cfg)
