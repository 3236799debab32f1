import json

import pytest

from llnsim.radio import ConstantLossUdgm
from llnsim.rpl import EnergyOf, EtxOf, Role
from llnsim.scenario import Scenario, ScenarioError, load_scenario


def base_doc(**overrides):
    doc = {
        "name": "six motes",
        "motes": [
            {"id": 1, "position": [0, 0], "role": "root"},
            {"id": 2, "position": [30, 0]},
            {"id": 3, "position": [60, 0], "role": "router"},
            {"id": 4, "position": [0, 30], "power_source": "battery", "battery_capacity": 500},
            {"id": 5, "position": [30, 30], "role": "leaf"},
            {"id": 6, "position": [60, 30], "node_status": {"available_memory": 4096, "cpu_load": 0.25}},
        ],
        "radio": {"model": "udgm_constant", "params": {"tx_range": 50, "interference_range": 100}},
        "traffic": {"interval_s": 60, "payload_bytes": 30},
        "duration_s": 600,
        "seed": 7,
    }
    doc.update(overrides)
    return doc


def load(doc):
    return load_scenario(json.dumps(doc))


def test_six_mote_document_loads():
    scenario = load(base_doc())
    assert len(scenario.motes) == 6
    assert scenario.root().id == 1
    assert scenario.mote(5).role is Role.LEAF
    assert scenario.mote(4).battery_capacity_mc == 500
    assert scenario.mote(4).mains is False
    assert scenario.mote(6).status.cpu_load == 0.25
    assert isinstance(scenario.radio_model(), ConstantLossUdgm)
    assert scenario.duration_us == 600_000_000
    assert scenario.seed == 7
    assert scenario.data_rate_bps == 250_000


def test_zero_duration_is_valid():
    scenario = load(base_doc(duration_s=0))
    assert scenario.duration_us == 0


def test_defaults_for_optional_sections():
    doc = base_doc()
    del doc["traffic"]
    del doc["name"]
    scenario = load(doc)
    assert scenario.traffic is None
    assert scenario.trickle.imin_ms == 4096
    assert scenario.energy.tx_mA == 17.7
    assert isinstance(scenario.objective_function(), EtxOf)


def test_energy_objective():
    scenario = load(base_doc(objective="energy"))
    assert isinstance(scenario.objective_function(), EnergyOf)


@pytest.mark.parametrize(
    "mutate, needle",
    [
        (lambda d: d["motes"].pop(0), "no root mote"),
        (lambda d: d["motes"].append({"id": 7, "position": [0, 0], "role": "root"}), "root motes"),
        (lambda d: d["motes"].append({"id": 2, "position": [1, 1]}), "duplicate"),
        (lambda d: d["motes"][1].update(position=[float("inf"), 0]), "finite"),
        (lambda d: d["motes"][3].update(battery_capacity=0), "battery_capacity"),
        (lambda d: d["motes"][1].update(battery_capacity=10), "only valid for battery"),
        (lambda d: d["motes"][1].update(role="gateway"), "role"),
        (lambda d: d.update(duration_s=-1), "duration_s"),
        (lambda d: d.update(seed=-1), "seed"),
        (lambda d: d.update(traffic={"interval_s": 0, "payload_bytes": 1}), "interval_s"),
        (lambda d: d.update(radio={"model": "warp", "params": {}}), "radio"),
        (lambda d: d.update(trickle={"imin_ms": 0}), "trickle"),
        (lambda d: d.update(energy={"tx_mA": -2}), "tx_mA"),
        (lambda d: d.update(objective="hops"), "objective"),
        (lambda d: d.update(bogus=1), "unknown keys"),
        (lambda d: d["motes"][0].update(colour="red"), "unknown keys"),
    ],
)
def test_invariant_violations_are_named(mutate, needle):
    doc = base_doc()
    mutate(doc)
    with pytest.raises(ScenarioError, match=needle):
        load(doc)


def test_parse_error_carries_position():
    with pytest.raises(ScenarioError, match=r"line \d+ column \d+"):
        load_scenario('{"motes": [,]}')


def test_non_object_document_rejected():
    with pytest.raises(ScenarioError):
        load_scenario("[1, 2]")


def test_scenario_is_frozen():
    scenario = load(base_doc())
    with pytest.raises(AttributeError):
        scenario.seed = 9
