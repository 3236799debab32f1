"""Radio propagation models and collision arbitration.

Four interchangeable models decide what each transmission does to every
other mote: a constant-loss disk (inside the range circle every frame
arrives, in the surrounding annulus it only interferes), a distance-loss
disk with quadratic probability falloff and separate sender/receiver
success ratios, a directed edge table with per-link probability and
propagation delay, and a free-space path-loss model with a receiver
sensitivity threshold.

Every model exposes the same planning entry point used by the engine:
given the sender, the current mote positions, and the engine RNG it
returns one Outcome per other mote. RNG draws happen in a documented
order (sender gate first, then candidates by ascending mote id) so that a
seed fixes the entire plan. The pure per-distance/per-edge functions are
exported separately for direct property testing.

The quadratic falloff of the distance-loss disk, p(d) scaled by
success_ratio_rx and reaching zero exactly at tx_range, is a convention
of this simulator, as is the rule that a failed probability draw leaves
interference rather than silence (the energy still arrives, the decode
fails).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

SPEED_OF_LIGHT = 299_792_458.0

# reception states
RECEIVED = "received"
INTERFERED = "interfered"
SILENT = "silent"
DESTROYED = "destroyed"          # produced by collision arbitration only


@dataclass(frozen=True)
class Outcome:
    state: str
    delay_us: int = 0


def _check_probability(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must be a probability, got {p}")


def distance(a: Tuple[float, float], b: Tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


# ---------------------------------------------------------------------------
# constant-loss disk


@dataclass(frozen=True)
class ConstantLossUdgm:
    tx_range: float
    interference_range: float

    def __post_init__(self) -> None:
        if not 0 < self.tx_range <= self.interference_range:
            raise ValueError(
                f"need interference_range >= tx_range > 0, got {self}"
            )

    def plan(self, src: int, positions: Dict[int, Tuple[float, float]], rng) -> Dict[int, Outcome]:
        origin = positions[src]
        return {
            mote: Outcome(udgm_constant_outcome(self, distance(origin, pos)))
            for mote, pos in sorted(positions.items())
            if mote != src
        }


def udgm_constant_outcome(model: ConstantLossUdgm, d: float) -> str:
    """Deterministic disk rule; both boundaries are inclusive."""
    if d <= model.tx_range:
        return RECEIVED
    if d <= model.interference_range:
        return INTERFERED
    return SILENT


# ---------------------------------------------------------------------------
# distance-loss disk


@dataclass(frozen=True)
class DistanceLossUdgm:
    tx_range: float
    interference_range: float
    success_ratio_tx: float = 1.0
    success_ratio_rx: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.tx_range <= self.interference_range:
            raise ValueError(
                f"need interference_range >= tx_range > 0, got {self}"
            )
        _check_probability("success_ratio_tx", self.success_ratio_tx)
        _check_probability("success_ratio_rx", self.success_ratio_rx)

    def plan(self, src: int, positions: Dict[int, Tuple[float, float]], rng) -> Dict[int, Outcome]:
        origin = positions[src]
        # one sender-side gate per transmission, drawn before receiver draws
        tx_ok = rng.random() < self.success_ratio_tx
        out: Dict[int, Outcome] = {}
        for mote, pos in sorted(positions.items()):
            if mote == src:
                continue
            d = distance(origin, pos)
            if d <= self.tx_range:
                if tx_ok and rng.random() < udgm_distance_rx_probability(self, d):
                    out[mote] = Outcome(RECEIVED)
                else:
                    out[mote] = Outcome(INTERFERED)
            elif d <= self.interference_range:
                out[mote] = Outcome(INTERFERED)
            else:
                out[mote] = Outcome(SILENT)
        return out


def udgm_distance_rx_probability(model: DistanceLossUdgm, d: float) -> float:
    """Receiver-side delivery probability: quadratic falloff inside the disk."""
    if d >= model.tx_range:
        return 0.0
    return model.success_ratio_rx * max(0.0, 1.0 - (d / model.tx_range) ** 2)


# ---------------------------------------------------------------------------
# directed graph medium


@dataclass(frozen=True)
class DgrmEdge:
    src: int
    dst: int
    rx_probability: float
    delay_us: int = 0
    signal_dbm: float = 0.0

    def __post_init__(self) -> None:
        _check_probability("rx_probability", self.rx_probability)
        if self.delay_us < 0:
            raise ValueError(f"negative propagation delay: {self.delay_us}")


@dataclass(frozen=True)
class Dgrm:
    edges: Tuple[DgrmEdge, ...]
    _index: Dict[Tuple[int, int], DgrmEdge] = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        index = {}
        for edge in self.edges:
            key = (edge.src, edge.dst)
            if key in index:
                raise ValueError(f"duplicate edge {edge.src}->{edge.dst}")
            index[key] = edge
        object.__setattr__(self, "_index", index)

    def plan(self, src: int, positions: Dict[int, Tuple[float, float]], rng) -> Dict[int, Outcome]:
        out: Dict[int, Outcome] = {}
        for mote in sorted(positions):
            if mote == src:
                continue
            edge = dgrm_outcome(self, src, mote)
            if edge is None:
                out[mote] = Outcome(SILENT)
            elif rng.random() < edge.rx_probability:
                out[mote] = Outcome(RECEIVED, delay_us=edge.delay_us)
            else:
                out[mote] = Outcome(INTERFERED, delay_us=edge.delay_us)
        return out


def dgrm_outcome(model: Dgrm, src: int, dst: int) -> Optional[DgrmEdge]:
    """Edge record for a directed pair; None means out of reach."""
    return model._index.get((src, dst))


def dgrm_edges_from_text(text: str) -> Tuple[DgrmEdge, ...]:
    """One edge per line: src dst rx_probability delay_us signal_dBm."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ValueError(f"edge line {lineno}: expected 5 fields, got {len(parts)}")
        edges.append(
            DgrmEdge(
                src=int(parts[0]),
                dst=int(parts[1]),
                rx_probability=float(parts[2]),
                delay_us=int(parts[3]),
                signal_dbm=float(parts[4]),
            )
        )
    return tuple(edges)


# ---------------------------------------------------------------------------
# free-space path loss


@dataclass(frozen=True)
class FriisMrm:
    tx_power_dbm: float = 0.0
    frequency_hz: float = 2.4e9
    rx_sensitivity_dbm: float = -100.0

    def __post_init__(self) -> None:
        if self.frequency_hz <= 0:
            raise ValueError(f"frequency must be positive: {self.frequency_hz}")

    def plan(self, src: int, positions: Dict[int, Tuple[float, float]], rng) -> Dict[int, Outcome]:
        origin = positions[src]
        out: Dict[int, Outcome] = {}
        for mote, pos in sorted(positions.items()):
            if mote == src:
                continue
            d = distance(origin, pos)
            if d == 0.0:
                # coincident motes: boundless received power
                out[mote] = Outcome(RECEIVED)
            elif friis_rx_power(self, d) >= self.rx_sensitivity_dbm:
                out[mote] = Outcome(RECEIVED)
            else:
                out[mote] = Outcome(SILENT)
        return out


def friis_rx_power(model: FriisMrm, d: float) -> float:
    """Free-space received power in dBm; reception iff >= sensitivity."""
    if d <= 0:
        raise ValueError(f"free-space formula needs d > 0, got {d}")
    wavelength_term = SPEED_OF_LIGHT / (4.0 * math.pi * d * model.frequency_hz)
    return model.tx_power_dbm + 20.0 * math.log10(wavelength_term)


# ---------------------------------------------------------------------------
# collision arbitration


def overlaps(a_start: int, a_end: int, b_start: int, b_end: int) -> bool:
    """Strict interval overlap; frames that only touch do not collide."""
    return a_start < b_end and b_start < a_end


def arbitrate_collisions(slots) -> list:
    """Final state per reception slot at one receiver.

    slots: sequence of (start_us, end_us, state) with state received or
    interfered. Any time overlap between two slots destroys every received
    frame involved; interfered slots never deliver regardless.
    """
    final = []
    for i, (start, end, state) in enumerate(slots):
        if state == INTERFERED:
            final.append(INTERFERED)
            continue
        if state != RECEIVED:
            raise ValueError(f"slot state must be received/interfered: {state}")
        hit = any(
            overlaps(start, end, other[0], other[1])
            for j, other in enumerate(slots)
            if j != i
        )
        final.append(DESTROYED if hit else RECEIVED)
    return final


# ---------------------------------------------------------------------------
# scenario wiring

MODEL_NAMES = ("udgm_constant", "udgm_distance", "dgrm", "friis")


def model_from_config(config: dict):
    """Build a radio model from the scenario's radio section."""
    kind = config.get("model")
    params = dict(config.get("params", {}))
    if kind == "udgm_constant":
        model = ConstantLossUdgm(
            tx_range=float(params.pop("tx_range")),
            interference_range=float(params.pop("interference_range")),
        )
    elif kind == "udgm_distance":
        model = DistanceLossUdgm(
            tx_range=float(params.pop("tx_range")),
            interference_range=float(params.pop("interference_range")),
            success_ratio_tx=float(params.pop("success_ratio_tx", 1.0)),
            success_ratio_rx=float(params.pop("success_ratio_rx", 1.0)),
        )
    elif kind == "dgrm":
        edges = tuple(
            DgrmEdge(
                src=int(e["src"]),
                dst=int(e["dst"]),
                rx_probability=float(e["rx_probability"]),
                delay_us=int(e.get("delay_us", 0)),
                signal_dbm=float(e.get("signal_dbm", 0.0)),
            )
            for e in params.pop("edges")
        )
        model = Dgrm(edges=edges)
    elif kind == "friis":
        model = FriisMrm(
            tx_power_dbm=float(params.pop("tx_power_dbm", 0.0)),
            frequency_hz=float(params.pop("frequency_hz", 2.4e9)),
            rx_sensitivity_dbm=float(params.pop("rx_sensitivity_dbm", -100.0)),
        )
    else:
        raise ValueError(f"unknown radio model {kind!r}, expected one of {MODEL_NAMES}")
    if params:
        raise ValueError(f"unknown radio parameters for {kind}: {sorted(params)}")
    return model
