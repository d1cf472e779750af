import pytest

from swarmlink.config import (
    ConfigError,
    ScenarioConfig,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from swarmlink.topology import TopologyKind


def test_defaults_round_trip():
    cfg = ScenarioConfig()
    back = scenario_from_dict(scenario_to_dict(cfg))
    assert back == cfg


def test_file_round_trip(tmp_path):
    cfg = ScenarioConfig(seed=7)
    path = tmp_path / "scenario.json"
    save_scenario(cfg, path)
    assert load_scenario(path) == cfg


def test_unknown_top_level_key_rejected():
    with pytest.raises(ConfigError, match="unknown config keys"):
        scenario_from_dict({"topolgy": {}})


def test_unknown_section_key_rejected():
    with pytest.raises(ConfigError, match="plant"):
        scenario_from_dict({"plant": {"tua": 0.3}})


def test_omitted_damping_solves_critical():
    cfg = scenario_from_dict({"impedance": {"M": 1.9, "K": 20.88}})
    assert abs(cfg.impedance.zeta - 1.0) < 1e-9


def test_explicit_damping_kept():
    cfg = scenario_from_dict({"impedance": {"M": 1.9, "K": 20.88, "D": 12.6}})
    assert cfg.impedance.damping == 12.6


def test_topology_section_external_keys():
    cfg = scenario_from_dict(
        {"topology": {"kind": "ring", "drones": 4, "spacing_m": 0.25, "height_m": 0.5}}
    )
    assert cfg.topology.kind is TopologyKind.RING
    assert cfg.topology.drones == 4


def test_apf_radius_external_name():
    cfg = scenario_from_dict({"apf": {"radius_m": 0.7}})
    assert cfg.apf.radius == 0.7
    assert scenario_to_dict(cfg)["apf"]["radius_m"] == 0.7


def test_bad_hand_type_rejected():
    with pytest.raises(ConfigError):
        scenario_from_dict({"hand": {"type": "spiral"}})


def test_bad_plant_values_rejected():
    with pytest.raises(ConfigError):
        scenario_from_dict({"plant": {"tau": -1.0}})


def test_spawn_must_match_drone_count():
    with pytest.raises(ConfigError, match="spawn"):
        scenario_from_dict({"spawn": [[0, 0, 0]]})


def test_invalid_json_reported(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_scenario(path)


def test_drone_drone_override_round_trips():
    d = {
        "impedance": {"M": 1.9, "K": 20.88},
        "drone_drone_impedance": {"M": 1.0, "K": 4.0, "K_v": 1.5},
    }
    cfg = scenario_from_dict(d)
    assert cfg.drone_drone_impedance is not None
    assert cfg.drone_drone_impedance.velocity_gain == 1.5
    again = scenario_from_dict(scenario_to_dict(cfg))
    assert again == cfg
