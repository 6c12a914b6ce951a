"""Scenario files: JSON schema, validation, and construction of runs.

A scenario selects a system by name plus parameter map, describes the
initial and boundary data (piecewise-constant breakpoints or a named
profile), and lists the accuracy and viscosity parameters to sweep:

    {
      "system": {"name": "p-system", "gamma": 2.0, "viscosity": "identity"},
      "initial": {"type": "steps", "breakpoints": [3.0],
                  "values": [[1.0, 0.0], [1.005, 0.02]]},
      "boundary": {"type": "constant", "value": [1.0, 0.0]},
      "delta": [0.01, 0.005],
      "epsilon": [0.01, 0.001],
      "t_end": 1.0,
      "sample_times": [0.5, 1.0],
      "seed": 1234
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .boundary import RELATION_VISCOUS, RELATION_STAR
from .systems import SystemDef, make_system
from .tracking import StepFunction


class ScenarioError(ValueError):
    """Scenario file failed to parse or validate."""


@dataclass(eq=False)
class Scenario:
    """Validated scenario ready for the harness."""

    system_spec: dict
    initial: StepFunction
    boundary: StepFunction
    deltas: list
    epsilons: list
    t_end: float
    sample_times: list
    seed: int
    relation: str = RELATION_VISCOUS
    out_dir: Optional[str] = None
    compare_viscosities: list = field(default_factory=list)
    options: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def build_system(self, viscosity_override=None) -> SystemDef:
        spec = dict(self.system_spec)
        if viscosity_override is not None:
            spec["viscosity"] = viscosity_override
        name = spec.pop("name")
        return make_system(name, **spec)


def _parse_datum(node, dim, what) -> StepFunction:
    if not isinstance(node, dict) or "type" not in node:
        raise ScenarioError(f"{what}: expected an object with a 'type' key")
    kind = node["type"]
    if kind == "constant":
        value = np.asarray(node["value"], dtype=float).reshape(-1)
        _check_dim(value, dim, what)
        return StepFunction(np.zeros(0), value[None, :])
    if kind == "steps":
        breaks = np.asarray(node.get("breakpoints", []), dtype=float)
        values = np.asarray(node["values"], dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if np.any(np.diff(breaks) <= 0):
            raise ScenarioError(f"{what}: breakpoints must be increasing")
        if values.shape[0] != breaks.size + 1:
            raise ScenarioError(
                f"{what}: need {breaks.size + 1} values for "
                f"{breaks.size} breakpoints, got {values.shape[0]}")
        _check_dim(values[0], dim, what)
        return StepFunction(breaks, values)
    if kind == "ramp":
        base = np.asarray(node["base"], dtype=float).reshape(-1)
        slope = np.asarray(node["slope"], dtype=float).reshape(-1)
        cap = float(node.get("cap", np.inf))
        _check_dim(base, dim, what)

        def profile(x):
            return base + slope * min(x, cap)

        profile.span = float(node.get("span", max(2.0 * cap, 1.0)))
        return profile    # quantized later by the tracker front end
    raise ScenarioError(f"{what}: unknown datum type {kind!r}")


def _check_dim(value, dim, what):
    if value.shape[-1] != dim:
        raise ScenarioError(
            f"{what}: state has {value.shape[-1]} components, "
            f"system has {dim}")


def load_scenario(source) -> Scenario:
    """Parse and validate a scenario from a path, JSON string, or dict."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        if path.exists():
            try:
                raw = json.loads(path.read_text())
            except json.JSONDecodeError as exc:
                raise ScenarioError(
                    f"{path}: line {exc.lineno}, column {exc.colno}: "
                    f"{exc.msg}") from None
        else:
            try:
                raw = json.loads(str(source))
            except json.JSONDecodeError:
                raise ScenarioError(
                    f"scenario {source!r}: no such file and not valid JSON"
                ) from None
    else:
        raw = dict(source)
    return scenario_from_dict(raw)


def scenario_from_dict(raw: dict) -> Scenario:
    if "system" not in raw:
        raise ScenarioError("scenario: missing 'system'")
    spec = dict(raw["system"])
    if "name" not in spec:
        raise ScenarioError("scenario: system needs a 'name'")
    try:
        sys = make_system(spec.pop("name"), **spec)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"scenario: bad system spec: {exc}") from None
    dim = sys.dimension

    initial = _parse_datum(raw.get("initial",
                                   {"type": "constant",
                                    "value": sys.ref_state.tolist()}),
                           dim, "initial")
    boundary = _parse_datum(raw.get("boundary",
                                    {"type": "constant",
                                     "value": sys.ref_state.tolist()}),
                            dim, "boundary")

    deltas = raw.get("delta", 1e-2)
    deltas = [float(d) for d in (deltas if isinstance(deltas, (list, tuple))
                                 else [deltas])]
    epsilons = raw.get("epsilon", [])
    epsilons = [float(e) for e in (epsilons
                                   if isinstance(epsilons, (list, tuple))
                                   else [epsilons])]
    if any(d <= 0 for d in deltas) or any(e <= 0 for e in epsilons):
        raise ScenarioError("scenario: delta and epsilon must be positive")

    relation = raw.get("relation", RELATION_VISCOUS)
    if relation not in (RELATION_VISCOUS, RELATION_STAR):
        raise ScenarioError(f"scenario: unknown relation {relation!r}")

    compare = raw.get("viscosity_matrices", [])

    return Scenario(
        system_spec=dict(raw["system"]),
        initial=initial,
        boundary=boundary,
        deltas=deltas,
        epsilons=epsilons,
        t_end=float(raw.get("t_end", 1.0)),
        sample_times=[float(t) for t in raw.get("sample_times",
                                                [raw.get("t_end", 1.0)])],
        seed=int(raw.get("seed", 0)),
        relation=relation,
        out_dir=raw.get("out_dir"),
        compare_viscosities=compare,
        options=dict(raw.get("options", {})),
        raw=raw,
    )


def parse_state(text: str, dim: Optional[int] = None) -> np.ndarray:
    """Parse a comma-separated state from the command line."""
    try:
        vals = np.asarray([float(p) for p in str(text).split(",")])
    except ValueError:
        raise ScenarioError(f"cannot parse state {text!r}") from None
    if dim is not None and vals.size != dim:
        raise ScenarioError(f"state {text!r} has {vals.size} components, "
                            f"expected {dim}")
    return vals


def parse_system_arg(text: str) -> SystemDef:
    """Build a system from a CLI argument: a catalogue name or inline JSON."""
    text = text.strip()
    if text.startswith("{"):
        spec = json.loads(text)
        name = spec.pop("name")
        return make_system(name, **spec)
    return make_system(text)
