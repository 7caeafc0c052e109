"""YAML scenario documents: defaults, validation, round-trip stability."""

import pytest

from balancebot.config import (
    ConfigDocument,
    OutputOptions,
    ScalarDebugSystem,
    load_document,
    parse_config,
    serialize,
)
from balancebot.control import GainSet, LqrWeights
from balancebot.errors import ConfigError
from balancebot.plant import PlantState
from balancebot.simloop import ControllerSpec, ReferenceSource, Scenario


def test_empty_text_is_all_defaults():
    doc = load_document("")
    assert doc.scenario == Scenario()
    assert doc.output == OutputOptions()
    assert doc.lqr_debug is None


def test_defaults_document_values():
    sc = parse_config("")
    assert sc.plant.M == 1.0
    assert sc.geometry.N == 360
    assert sc.initial == PlantState(theta=0.05)
    assert sc.controller.type == "pd"
    assert sc.duration == 10.0
    assert sc.tick == 0.001
    assert sc.seed == 42


def test_explicit_initial_section_replaces_default_tilt():
    sc = parse_config("initial: {p: 0.1}")
    assert sc.initial == PlantState(p=0.1)  # theta falls back to 0, not 0.05


def test_partial_override():
    sc = parse_config("plant:\n  m: 0.7\nduration: 3.5\n")
    assert sc.plant.m == 0.7
    assert sc.plant.M == 1.0
    assert sc.duration == 3.5


def test_unknown_top_level_key_rejected():
    with pytest.raises(ConfigError, match="unknown key 'plnat'"):
        parse_config("plnat: {M: 1}")


def test_unknown_nested_key_rejected():
    with pytest.raises(ConfigError, match="unknown key 'mass'"):
        parse_config("plant: {mass: 1}")
    with pytest.raises(ConfigError, match="unknown key 'kp'"):
        parse_config("controller:\n  gains: {kp: 1}")
    with pytest.raises(ConfigError, match="unknown key 'jitter'"):
        parse_config("output: {jitter: 2}")


def test_type_errors_rejected():
    with pytest.raises(ConfigError):
        parse_config("plant: {M: hello}")
    with pytest.raises(ConfigError):
        parse_config("plant: [1, 2]")
    with pytest.raises(ConfigError):
        parse_config("seed: 1.5")
    with pytest.raises(ConfigError):
        parse_config("seed: true")  # bools are not integers here
    with pytest.raises(ConfigError):
        parse_config("geometry: {N: 360.5}")


def test_invariant_violations_cite_the_invariant():
    with pytest.raises(ConfigError, match="M > 0"):
        parse_config("plant: {M: -1}")
    with pytest.raises(ConfigError, match="duration > 0"):
        parse_config("duration: 0")
    with pytest.raises(ConfigError, match="R > 0"):
        parse_config("controller:\n  weights: {r: 0}")


def test_yaml_syntax_error_carries_position():
    with pytest.raises(ConfigError, match="line"):
        parse_config("plant: {M: 1\nbroken")


def test_non_mapping_document_rejected():
    with pytest.raises(ConfigError):
        parse_config("- a\n- b\n")


def test_controller_weights_forms():
    sc = parse_config("controller:\n  weights:\n    q_diag: [1, 10, 0.1, 0.1]\n    r: 2.0")
    assert sc.controller.weights.q_array()[1][1] == 10.0
    assert sc.controller.weights.R == 2.0
    with pytest.raises(ConfigError, match="not both"):
        parse_config(
            "controller:\n  weights:\n    q_diag: [1, 1, 1, 1]\n"
            "    q: [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]"
        )


def test_state_feedback_requires_k():
    with pytest.raises(ConfigError):
        parse_config("controller: {type: state_feedback}")
    sc = parse_config("controller:\n  type: state_feedback\n  k: [-1, 36.5, -2.2, 6.6]")
    assert sc.controller.k.k == (-1.0, 36.5, -2.2, 6.6)


def test_schedule_parsing():
    sc = parse_config(
        "reference:\n  mode: schedule\n  schedule:\n    - [0, 0]\n    - [2, 0.2]"
    )
    assert sc.reference.schedule == ((0.0, 0.0), (2.0, 0.2))


def test_round_trip_default_scenario():
    text = serialize(Scenario())
    assert load_document(text).scenario == Scenario()


def test_round_trip_preserves_custom_fields():
    sc = Scenario(
        controller=ControllerSpec(
            type="pd",
            gains=GainSet(k_err=-0.1, k_d=-3.3, k_dd=-0.5, k_v=0.07),
            weights=LqrWeights(R=2.5),
        ),
        reference=ReferenceSource(mode="schedule", schedule=((0.0, 0.0), (1.5, 0.3))),
        initial=PlantState(theta=-0.02, p_dot=0.1),
        duration=7.25,
        seed=1234,
    )
    out = OutputOptions(trace="x.csv", downsample=10)
    doc = load_document(serialize(sc, out))
    assert doc.scenario == sc
    assert doc.output == out


def test_serialize_is_stable():
    text = serialize(Scenario())
    again = serialize(load_document(text).scenario)
    assert text == again


def test_lqr_debug_section():
    doc = load_document("lqr_debug: {a: 1, b: 1, q: 1, r: 1}")
    assert doc.lqr_debug == ScalarDebugSystem(a=1.0, b=1.0, q=1.0, r=1.0)
    with pytest.raises(ConfigError, match="r > 0"):
        load_document("lqr_debug: {r: 0}")
    with pytest.raises(ConfigError, match="unknown key"):
        load_document("lqr_debug: {z: 1}")


def test_output_section():
    doc = load_document("output:\n  trace: out/run.csv\n  downsample: 50")
    assert doc.output == OutputOptions(trace="out/run.csv", downsample=50)
    with pytest.raises(ConfigError):
        load_document("output: {downsample: 0}")
