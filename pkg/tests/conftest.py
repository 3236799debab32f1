import json

import pytest

from llnsim.engine import Engine
from llnsim.scenario import load_scenario


def scenario_doc(motes, **overrides):
    doc = {
        "motes": motes,
        "radio": {"model": "udgm_constant", "params": {"tx_range": 50, "interference_range": 100}},
        "traffic": {"interval_s": 10, "payload_bytes": 30},
        "duration_s": 120,
        "seed": 42,
        "trickle": {"imin_ms": 1000, "doublings": 4, "k": 10},
    }
    doc.update(overrides)
    return doc


def mote(mote_id, x, y, **extra):
    spec = {"id": mote_id, "position": [x, y]}
    spec.update(extra)
    return spec


def build_engine(motes, **overrides):
    return Engine(load_scenario(json.dumps(scenario_doc(motes, **overrides))))


@pytest.fixture
def pair_engine():
    """Root and one router, lossless, well in range."""
    return build_engine([mote(1, 0, 0, role="root"), mote(2, 30, 0)])
