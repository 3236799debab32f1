"""Scenario documents: the full declarative description of one simulation.

A scenario is a JSON object with top-level keys motes[], radio{model,
params}, traffic{interval_s, payload_bytes}, duration_s, seed,
trickle{imin_ms, doublings, k} and energy{off_mA, idle_listen_mA, rx_mA,
tx_mA}. Optional extras: objective (etx or energy), data_rate_bps and a
display name. Unknown keys are rejected so typos fail loudly instead of
silently running with defaults.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .metrics import CurrentTable
from .radio import model_from_config
from .rpl import EnergyOf, EtxOf, Role, TrickleParams

DEFAULT_DATA_RATE_BPS = 250_000
DEFAULT_SEED = 1

ROLES = {"root": Role.ROOT, "router": Role.ROUTER, "leaf": Role.LEAF}
POWER_SOURCES = ("mains", "battery")
OBJECTIVES = ("etx", "energy")


class ScenarioError(ValueError):
    """Malformed or invariant-violating scenario document."""


@dataclass(frozen=True)
class NodeStatusSpec:
    available_memory: int = 10_240
    cpu_load: float = 0.0


@dataclass(frozen=True)
class MoteSpec:
    id: int
    position: Tuple[float, float]
    role: Role = Role.ROUTER
    power_source: str = "mains"
    battery_capacity_mc: Optional[float] = None
    status: NodeStatusSpec = NodeStatusSpec()

    @property
    def mains(self) -> bool:
        return self.power_source == "mains"


@dataclass(frozen=True)
class TrafficSpec:
    interval_s: float
    payload_bytes: int


@dataclass(frozen=True)
class Scenario:
    motes: Tuple[MoteSpec, ...]
    radio_config: dict
    traffic: Optional[TrafficSpec]
    duration_s: float
    seed: int
    trickle: TrickleParams
    energy: CurrentTable
    objective: str = "etx"
    data_rate_bps: int = DEFAULT_DATA_RATE_BPS
    name: str = "scenario"

    @property
    def duration_us(self) -> int:
        return int(round(self.duration_s * 1_000_000))

    def radio_model(self):
        return model_from_config(self.radio_config)

    def objective_function(self):
        return EnergyOf() if self.objective == "energy" else EtxOf()

    def root(self) -> MoteSpec:
        return next(m for m in self.motes if m.role is Role.ROOT)

    def mote(self, mote_id: int) -> MoteSpec:
        for m in self.motes:
            if m.id == mote_id:
                return m
        raise KeyError(mote_id)


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ScenarioError(f"{where}: missing required key '{key}'")
    return obj[key]


def _reject_unknown(obj: dict, allowed, where: str) -> None:
    extra = set(obj) - set(allowed)
    if extra:
        raise ScenarioError(f"{where}: unknown keys {sorted(extra)}")


def _number(value, key: str, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}: '{key}' must be a number, got {value!r}")
    return float(value)


def _parse_mote(obj, index: int) -> MoteSpec:
    where = f"motes[{index}]"
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object")
    _reject_unknown(
        obj, ("id", "position", "role", "power_source", "battery_capacity", "node_status"), where
    )
    mote_id = _require(obj, "id", where)
    if not isinstance(mote_id, int) or isinstance(mote_id, bool) or mote_id <= 0:
        raise ScenarioError(f"{where}: id must be a positive integer, got {mote_id!r}")

    pos = _require(obj, "position", where)
    if not isinstance(pos, (list, tuple)) or len(pos) != 2:
        raise ScenarioError(f"{where}: position must be [x, y]")
    x = _number(pos[0], "position.x", where)
    y = _number(pos[1], "position.y", where)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ScenarioError(f"{where}: position must be finite")

    role_name = obj.get("role", "router")
    if role_name not in ROLES:
        raise ScenarioError(f"{where}: role must be one of {sorted(ROLES)}, got {role_name!r}")

    power = obj.get("power_source", "mains")
    if power not in POWER_SOURCES:
        raise ScenarioError(f"{where}: power_source must be one of {POWER_SOURCES}")
    capacity = obj.get("battery_capacity")
    if power == "battery":
        if capacity is None:
            raise ScenarioError(f"{where}: battery motes need battery_capacity (mC)")
        capacity = _number(capacity, "battery_capacity", where)
        if capacity <= 0:
            raise ScenarioError(f"{where}: battery_capacity must be > 0")
    elif capacity is not None:
        raise ScenarioError(f"{where}: battery_capacity is only valid for battery motes")

    status_obj = obj.get("node_status", {})
    _reject_unknown(status_obj, ("available_memory", "cpu_load"), f"{where}.node_status")
    memory = status_obj.get("available_memory", 10_240)
    if not isinstance(memory, int) or isinstance(memory, bool) or memory < 0:
        raise ScenarioError(f"{where}: available_memory must be a non-negative integer")
    cpu = _number(status_obj.get("cpu_load", 0.0), "cpu_load", where)
    if not 0.0 <= cpu <= 1.0:
        raise ScenarioError(f"{where}: cpu_load must lie in [0, 1]")

    return MoteSpec(
        id=mote_id,
        position=(x, y),
        role=ROLES[role_name],
        power_source=power,
        battery_capacity_mc=capacity,
        status=NodeStatusSpec(available_memory=memory, cpu_load=cpu),
    )


def parse_scenario(doc: dict) -> Scenario:
    """Validate a decoded scenario document."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    _reject_unknown(
        doc,
        (
            "motes", "radio", "traffic", "duration_s", "seed",
            "trickle", "energy", "objective", "data_rate_bps", "name",
        ),
        "scenario",
    )

    raw_motes = _require(doc, "motes", "scenario")
    if not isinstance(raw_motes, list) or not raw_motes:
        raise ScenarioError("scenario: motes must be a non-empty list")
    motes = tuple(_parse_mote(m, i) for i, m in enumerate(raw_motes))

    ids = [m.id for m in motes]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ScenarioError(f"scenario: duplicate mote ids {dupes}")
    roots = [m for m in motes if m.role is Role.ROOT]
    if not roots:
        raise ScenarioError("scenario: no root mote")
    if len(roots) > 1:
        raise ScenarioError(f"scenario: {len(roots)} root motes, expected exactly one")

    radio = _require(doc, "radio", "scenario")
    try:
        model_from_config(radio)
    except (ValueError, KeyError, TypeError) as exc:
        raise ScenarioError(f"scenario: bad radio config: {exc}") from exc

    traffic = None
    if "traffic" in doc:
        tobj = doc["traffic"]
        _reject_unknown(tobj, ("interval_s", "payload_bytes"), "traffic")
        interval = _number(_require(tobj, "interval_s", "traffic"), "interval_s", "traffic")
        if interval <= 0:
            raise ScenarioError("traffic: interval_s must be > 0")
        payload = _require(tobj, "payload_bytes", "traffic")
        if not isinstance(payload, int) or isinstance(payload, bool) or payload < 0:
            raise ScenarioError("traffic: payload_bytes must be a non-negative integer")
        traffic = TrafficSpec(interval_s=interval, payload_bytes=payload)

    duration = _number(_require(doc, "duration_s", "scenario"), "duration_s", "scenario")
    if duration < 0 or not math.isfinite(duration):
        raise ScenarioError("scenario: duration_s must be finite and >= 0")

    seed = doc.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ScenarioError("scenario: seed must be an unsigned 64-bit integer")

    tr = doc.get("trickle", {})
    _reject_unknown(tr, ("imin_ms", "doublings", "k"), "trickle")
    try:
        trickle = TrickleParams(
            imin_ms=tr.get("imin_ms", TrickleParams().imin_ms),
            doublings=tr.get("doublings", TrickleParams().doublings),
            k=tr.get("k", TrickleParams().k),
        )
    except ValueError as exc:
        raise ScenarioError(f"trickle: {exc}") from exc

    en = doc.get("energy", {})
    _reject_unknown(en, ("off_mA", "idle_listen_mA", "rx_mA", "tx_mA"), "energy")
    defaults = CurrentTable()
    currents = {}
    for key in ("off_mA", "idle_listen_mA", "rx_mA", "tx_mA"):
        value = _number(en.get(key, getattr(defaults, key)), key, "energy")
        if value < 0:
            raise ScenarioError(f"energy: {key} must be >= 0")
        currents[key] = value
    energy = CurrentTable(**currents)

    objective = doc.get("objective", "etx")
    if objective not in OBJECTIVES:
        raise ScenarioError(f"scenario: objective must be one of {OBJECTIVES}")

    rate = doc.get("data_rate_bps", DEFAULT_DATA_RATE_BPS)
    if not isinstance(rate, int) or isinstance(rate, bool) or rate <= 0:
        raise ScenarioError("scenario: data_rate_bps must be a positive integer")

    name = doc.get("name", "scenario")
    if not isinstance(name, str) or not name:
        raise ScenarioError("scenario: name must be a non-empty string")

    return Scenario(
        motes=motes,
        radio_config=radio,
        traffic=traffic,
        duration_s=duration,
        seed=seed,
        trickle=trickle,
        energy=energy,
        objective=objective,
        data_rate_bps=rate,
        name=name,
    )


def load_scenario(text: str) -> Scenario:
    """Parse scenario JSON text; errors carry the line and column."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_scenario(doc)


def load_scenario_file(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as handle:
        return load_scenario(handle.read())
