"""Scenario configuration: YAML documents with strict schema validation.

Every key must be recognized (unknown keys are errors, not warnings), every
value must satisfy the invariant of its target type, and serialize() emits a
canonical document that parses back to an equal Scenario.
"""

from dataclasses import dataclass

import yaml

from balancebot.control import GainSet, LqrWeights, MotorModel, StateGain
from balancebot.errors import ConfigError
from balancebot.estimation import DifferentiatorConfig
from balancebot.plant import PlantParams, PlantState
from balancebot.sensors import NoiseConfig, SensorGeometry
from balancebot.simloop import ControllerSpec, ReferenceSource, Scenario


@dataclass(frozen=True)
class OutputOptions:
    """Trace emission knobs (CSV path and row thinning)."""

    trace: str = "trace.csv"
    downsample: int = 1

    def __post_init__(self):
        if not (isinstance(self.downsample, int) and self.downsample >= 1):
            raise ConfigError("output violates downsample >= 1")


@dataclass(frozen=True)
class ScalarDebugSystem:
    """One-state system for exercising the Riccati path end to end."""

    a: float = 0.0
    b: float = 1.0
    q: float = 1.0
    r: float = 1.0

    def __post_init__(self):
        if not self.r > 0:
            raise ConfigError("lqr_debug violates r > 0")
        if self.q < 0:
            raise ConfigError("lqr_debug violates q >= 0")


@dataclass(frozen=True)
class ConfigDocument:
    scenario: Scenario
    output: OutputOptions
    lqr_debug: ScalarDebugSystem = None


def _require_mapping(node, where):
    if not isinstance(node, dict):
        raise ConfigError(f"'{where}' must be a mapping, got {type(node).__name__}")
    for key in node:
        if not isinstance(key, str):
            raise ConfigError(f"non-string key {key!r} in '{where}'")
    return node


def _reject_unknown(node, allowed, where):
    unknown = [k for k in node if k not in allowed]
    if unknown:
        raise ConfigError(f"unknown key '{unknown[0]}' in '{where}'")


def _number(node, key, where):
    v = node[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"'{where}.{key}' must be a number, got {v!r}")
    return float(v)


def _integer(node, key, where):
    v = node[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"'{where}.{key}' must be an integer, got {v!r}")
    return v


def _number_list(value, length, where):
    if not isinstance(value, (list, tuple)) or len(value) != length:
        raise ConfigError(f"'{where}' must be a list of {length} numbers")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"'{where}' must contain only numbers, got {v!r}")
        out.append(float(v))
    return out


def _section(doc, name, builder, **kwargs):
    node = doc.get(name, {})
    if node is None:
        node = {}
    _require_mapping(node, name)
    return builder(node, name, **kwargs)


def _build_simple(node, where, cls, float_keys=(), int_keys=()):
    _reject_unknown(node, set(float_keys) | set(int_keys), where)
    kwargs = {}
    for key in float_keys:
        if key in node:
            kwargs[key] = _number(node, key, where)
    for key in int_keys:
        if key in node:
            kwargs[key] = _integer(node, key, where)
    return cls(**kwargs)


def _build_controller(node, where):
    _reject_unknown(node, {"type", "gains", "k", "weights"}, where)
    kwargs = {}
    if "type" in node:
        if not isinstance(node["type"], str):
            raise ConfigError(f"'{where}.type' must be a string")
        kwargs["type"] = node["type"]
    if "gains" in node:
        gains = _require_mapping(node["gains"], f"{where}.gains")
        kwargs["gains"] = _build_simple(
            gains, f"{where}.gains", GainSet, float_keys=("k_err", "k_d", "k_dd", "k_v")
        )
    if "k" in node:
        kwargs["k"] = StateGain(k=tuple(_number_list(node["k"], 4, f"{where}.k")))
    if "weights" in node:
        weights = _require_mapping(node["weights"], f"{where}.weights")
        _reject_unknown(weights, {"q_diag", "q", "r"}, f"{where}.weights")
        if "q_diag" in weights and "q" in weights:
            raise ConfigError(f"'{where}.weights' takes q_diag or q, not both")
        wkw = {}
        if "q_diag" in weights:
            diag = _number_list(weights["q_diag"], 4, f"{where}.weights.q_diag")
            wkw["Q"] = tuple(
                tuple(diag[i] if i == j else 0.0 for j in range(4)) for i in range(4)
            )
        if "q" in weights:
            rows = weights["q"]
            if not isinstance(rows, (list, tuple)) or len(rows) != 4:
                raise ConfigError(f"'{where}.weights.q' must be a 4x4 matrix")
            wkw["Q"] = tuple(
                tuple(_number_list(row, 4, f"{where}.weights.q")) for row in rows
            )
        if "r" in weights:
            wkw["R"] = _number(weights, "r", f"{where}.weights")
        kwargs["weights"] = LqrWeights(**wkw)
    return ControllerSpec(**kwargs)


def _build_reference(node, where):
    _reject_unknown(node, {"mode", "value", "schedule", "range"}, where)
    kwargs = {}
    if "mode" in node:
        if not isinstance(node["mode"], str):
            raise ConfigError(f"'{where}.mode' must be a string")
        kwargs["mode"] = node["mode"]
    if "value" in node:
        kwargs["value"] = _number(node, "value", where)
    if "range" in node:
        kwargs["range"] = _number(node, "range", where)
    if "schedule" in node:
        entries = node["schedule"]
        if not isinstance(entries, (list, tuple)):
            raise ConfigError(f"'{where}.schedule' must be a list of [t, value] pairs")
        kwargs["schedule"] = tuple(
            tuple(_number_list(entry, 2, f"{where}.schedule")) for entry in entries
        )
    return ReferenceSource(**kwargs)


def _build_estimator(node, where):
    _reject_unknown(node, {"alpha", "t_d", "sign"}, where)
    kwargs = {}
    if "alpha" in node:
        kwargs["alpha"] = _number(node, "alpha", where)
    if "t_d" in node:
        kwargs["t_d"] = _number(node, "t_d", where)
    if "sign" in node:
        kwargs["sign"] = _integer(node, "sign", where)
    return DifferentiatorConfig(**kwargs)


_TOP_KEYS = {
    "plant", "geometry", "noise", "motor", "controller", "estimator",
    "initial", "reference", "duration", "tick", "seed", "output", "lqr_debug",
}


def load_document(text: str) -> ConfigDocument:
    """Parse and validate a config document; empty text means all defaults."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        at = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"config is not valid YAML{at}: {exc}")
    if raw is None:
        raw = {}
    _require_mapping(raw, "config")
    _reject_unknown(raw, _TOP_KEYS, "config")

    plant = _section(raw, "plant", _build_simple, cls=PlantParams,
                     float_keys=("M", "m", "J", "l", "b", "g", "r"))
    geometry = _section(raw, "geometry", _build_simple, cls=SensorGeometry,
                        float_keys=("s", "q", "adc_range"),
                        int_keys=("N", "adc_levels"))
    noise = _section(raw, "noise", _build_simple, cls=NoiseConfig,
                     float_keys=("ir_sigma",))
    motor = _section(raw, "motor", _build_simple, cls=MotorModel,
                     float_keys=("f_max", "deadband", "backlash_angle"))
    controller = _section(raw, "controller", _build_controller)
    estimator = _section(raw, "estimator", _build_estimator)
    reference = _section(raw, "reference", _build_reference)

    scalar_kwargs = {}
    # an explicit initial section fully replaces the scenario default tilt
    if "initial" in raw:
        scalar_kwargs["initial"] = _section(
            raw, "initial", _build_simple, cls=PlantState,
            float_keys=("p", "theta", "p_dot", "theta_dot"),
        )
    for key, default in (("duration", 10.0), ("tick", 0.001)):
        if key in raw:
            scalar_kwargs[key] = _number(raw, key, "config")
    if "seed" in raw:
        scalar_kwargs["seed"] = _integer(raw, "seed", "config")

    scenario = Scenario(
        plant=plant, geometry=geometry, noise=noise, motor=motor,
        controller=controller, estimator=estimator,
        reference=reference, **scalar_kwargs,
    )

    out_node = _require_mapping(raw.get("output") or {}, "output")
    _reject_unknown(out_node, {"trace", "downsample"}, "output")
    out_kwargs = {}
    if "trace" in out_node:
        if not isinstance(out_node["trace"], str):
            raise ConfigError("'output.trace' must be a string path")
        out_kwargs["trace"] = out_node["trace"]
    if "downsample" in out_node:
        out_kwargs["downsample"] = _integer(out_node, "downsample", "output")
    output = OutputOptions(**out_kwargs)

    lqr_debug = None
    if "lqr_debug" in raw:
        dbg = _require_mapping(raw["lqr_debug"], "lqr_debug")
        _reject_unknown(dbg, {"a", "b", "q", "r"}, "lqr_debug")
        dbg_kwargs = {k: _number(dbg, k, "lqr_debug") for k in dbg}
        lqr_debug = ScalarDebugSystem(**dbg_kwargs)

    return ConfigDocument(scenario=scenario, output=output, lqr_debug=lqr_debug)


def parse_config(text: str) -> Scenario:
    """Parse a config document into its Scenario (defaults fill gaps)."""
    return load_document(text).scenario


def serialize(scenario: Scenario, output: OutputOptions = OutputOptions()) -> str:
    """Canonical full document; parse_config(serialize(s)) == s."""
    ctl = scenario.controller
    controller = {"type": ctl.type, "gains": vars(ctl.gains).copy()}
    if ctl.k is not None:
        controller["k"] = list(ctl.k.k)
    controller["weights"] = {
        "q": [list(row) for row in ctl.weights.Q],
        "r": ctl.weights.R,
    }
    doc = {
        "plant": {k: getattr(scenario.plant, k) for k in ("M", "m", "J", "l", "b", "g", "r")},
        "geometry": {k: getattr(scenario.geometry, k)
                     for k in ("s", "q", "N", "adc_levels", "adc_range")},
        "noise": {"ir_sigma": scenario.noise.ir_sigma},
        "motor": {k: getattr(scenario.motor, k)
                  for k in ("f_max", "deadband", "backlash_angle")},
        "controller": controller,
        "estimator": {k: getattr(scenario.estimator, k) for k in ("alpha", "t_d", "sign")},
        "initial": {k: getattr(scenario.initial, k)
                    for k in ("p", "theta", "p_dot", "theta_dot")},
        "reference": {
            "mode": scenario.reference.mode,
            "value": scenario.reference.value,
            "range": scenario.reference.range,
            **(
                {"schedule": [list(e) for e in scenario.reference.schedule]}
                if scenario.reference.schedule
                else {}
            ),
        },
        "duration": scenario.duration,
        "tick": scenario.tick,
        "seed": scenario.seed,
        "output": {"trace": output.trace, "downsample": output.downsample},
    }
    return yaml.safe_dump(doc, sort_keys=False)
