"""Deterministic discrete-event engine.

One integer-microsecond clock, one heap-ordered event queue, one seeded
RNG. Every piece of randomness (radio sampling, trickle fire points,
traffic phases) is drawn from that RNG in dispatch order, so a scenario
plus its seed fully determines the run: the serialized event trace is
byte-identical across repeats and reloads.

Events with equal fire times dispatch in scheduling order via a monotone
sequence number. Control commands from a live operator enter through a
thread-safe queue and are drained only at event boundaries, which keeps
the core single-threaded; pacing commands (start/pause/set_speed) touch
wall-clock behavior only and leave the trace untouched.

Transmissions occupy the channel for frame_bits/data_rate. At transmit
start the radio model plans a per-receiver outcome; receptions become
slots that resolve when their window closes, where overlap with any other
slot or with the receiver's own transmissions destroys the frame.
"""

from __future__ import annotations

import heapq
import itertools
import json
import random
import threading
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from . import metrics, radio, rpl, sixlowpan
from .scenario import Scenario

MAC_OVERHEAD_BYTES = 23          # 802.15.4 header with 64-bit addressing + FCS
DATA_HOP_LIMIT = 64
SENT = "sent"
DELIVERED = "delivered"
DROP_NO_ROUTE = "dropped-no-route"
DROP_COLLISION = "dropped-collision"
DROP_LOSS = "dropped-loss"
IN_FLIGHT = "in-flight-at-end"
TERMINAL_STATES = (DELIVERED, DROP_NO_ROUTE, DROP_COLLISION, DROP_LOSS, IN_FLIGHT)

CONTROL_TAGS = {
    rpl.DioMessage: "dio",
    rpl.DisMessage: "dis",
    rpl.DaoMessage: "dao",
    rpl.DaoAckMessage: "dao_ack",
}

CLOCK_EMIT_INTERVAL_US = 200_000
METRIC_EMIT_INTERVAL_US = 1_000_000


@dataclass(frozen=True)
class Frame:
    src: int
    dst: Optional[int]               # None = link-scope multicast
    size_bytes: int
    kind: str                        # control | data
    control: Optional[object] = None
    compressed: Optional[sixlowpan.CompressedHeader] = None
    payload_bytes: int = 0
    datagram_id: Optional[int] = None


@dataclass
class Slot:
    """One planned reception window at one receiver."""

    receiver: int
    start_us: int
    end_us: int
    planned: str                     # received | interfered
    frame: Frame
    tx_mote: int


class EngineError(ValueError):
    pass


class Engine:
    def __init__(self, scenario: Scenario) -> None:
        self.scenario = scenario
        self._observers: List[Callable[[dict], None]] = []
        self._commands: deque = deque()
        self._command_lock = threading.Lock()
        self.speed = 1.0
        self.running = False
        self._load()

    # -- setup ---------------------------------------------------------------

    def _load(self) -> None:
        sc = self.scenario
        self.now = 0
        self._queue: list = []
        self._seq = itertools.count()
        self.rng = random.Random(sc.seed)
        self.model = sc.radio_model()
        self.positions: Dict[int, Tuple[float, float]] = {
            m.id: m.position for m in sc.motes
        }
        self.addresses = {m.id: sixlowpan.address_from_mac(m.id) for m in sc.motes}
        self.root_id = sc.root().id
        self.root_address = self.addresses[self.root_id]

        self.accounts = {
            m.id: metrics.EnergyAccount(
                m.id, sc.energy, mains=m.mains, capacity_mc=m.battery_capacity_mc
            )
            for m in sc.motes
        }
        self.link_table = metrics.LinkTable()
        self.timeline: List[metrics.TimelineEvent] = []
        self.trace: List[dict] = []
        self.counters: Counter = Counter()
        self.origin_counters: Dict[int, Counter] = {}
        self.in_flight: Dict[int, int] = {}          # datagram id -> origin
        self._datagram_seq = itertools.count(1)

        of = sc.objective_function()
        status_of = self._node_status if isinstance(of, rpl.EnergyOf) else None
        self.nodes = {
            m.id: rpl.RplNode(
                mote_id=m.id,
                role=m.role,
                address=self.addresses[m.id],
                rng=self.rng,
                of=of,
                trickle_params=sc.trickle,
                status_of=status_of,
            )
            for m in sc.motes
        }

        self.dead_motes: set = set()
        self.failed_links: set = set()
        self._tx_queue: Dict[int, deque] = {m.id: deque() for m in sc.motes}
        self._tx_busy: Dict[int, bool] = {m.id: False for m in sc.motes}
        self._tx_intervals: Dict[int, List[Tuple[int, int]]] = {m.id: [] for m in sc.motes}
        self._slots: Dict[int, List[Slot]] = {m.id: [] for m in sc.motes}
        self._depletion_epoch: Counter = Counter()
        self._finalized = False
        self._notes: List[dict] = []
        self._last_clock_emit = -CLOCK_EMIT_INTERVAL_US
        self._last_metric_emit = -METRIC_EMIT_INTERVAL_US

        payload = sc.traffic.payload_bytes if sc.traffic else 0
        biggest = MAC_OVERHEAD_BYTES + sixlowpan.IPV6_HEADER_BYTES + 1 + payload
        self._airtime_bound = self._airtime_us(biggest) + 1

        # boot: radios on, routing started, traffic phased; ascending mote id
        for mote_id in sorted(self.positions):
            self._transition(mote_id, metrics.IDLE_LISTEN)
        for mote_id in sorted(self.nodes):
            self._process_actions(mote_id, self.nodes[mote_id].start(0))
        if sc.traffic is not None:
            interval_us = int(round(sc.traffic.interval_s * 1_000_000))
            for mote_id in sorted(self.nodes):
                if mote_id == self.root_id:
                    continue
                phase = 1 + self.rng.randrange(interval_us)
                self._schedule(phase, ("traffic", mote_id, interval_us))
        sweep_us = self.nodes[self.root_id].trickle.imax_us
        self._schedule(sweep_us, ("sweep", sweep_us))

    # -- event plumbing --------------------------------------------------------

    def _schedule(self, fire_at: int, payload: tuple) -> None:
        if fire_at < self.now:
            raise EngineError(f"cannot schedule into the past: {fire_at} < {self.now}")
        heapq.heappush(self._queue, (fire_at, next(self._seq), payload))

    def _drain_commands(self) -> None:
        while True:
            with self._command_lock:
                if not self._commands:
                    return
                cmd, reply = self._commands.popleft()
            result = self._apply_command_now(cmd)
            if reply is not None:
                reply(result)

    def step(self) -> Optional[dict]:
        """Fire the earliest due event; None when idle or past duration."""
        self._drain_commands()
        if not self._queue:
            return None
        fire_at, seq, payload = self._queue[0]
        if fire_at > self.scenario.duration_us:
            return None
        heapq.heappop(self._queue)
        self.now = fire_at
        self._notes = []
        kind, mote, detail = self._dispatch(payload)
        record = {"t_us": fire_at, "seq": seq, "kind": kind, "mote": mote, "detail": detail}
        if self._notes:
            record["detail"] = dict(detail, events=self._notes)
        self.trace.append(record)
        self._emit_cadence()
        return record

    def run_until(self, t_us: int) -> int:
        """Process every event with fire_at <= min(t_us, duration)."""
        cutoff = min(t_us, self.scenario.duration_us)
        fired = 0
        while True:
            self._drain_commands()
            if not self._queue or self._queue[0][0] > cutoff:
                return fired
            self.step()
            fired += 1

    def run(self) -> int:
        fired = self.run_until(self.scenario.duration_us)
        self.finalize()
        return fired

    def finalize(self) -> None:
        """Close the books at the duration cutoff; idempotent."""
        if self._finalized:
            return
        self._finalized = True
        end = self.scenario.duration_us
        for mote_id in sorted(self.accounts):
            events = self.accounts[mote_id].finalize(end)
            self.timeline.extend(events)
            for ev in events:
                self._emit("radio_event", ev.to_record())
        self.counters[IN_FLIGHT] = len(self.in_flight)
        for origin in self.in_flight.values():
            self.origin_counters[origin][IN_FLIGHT] += 1

    def reload(self) -> None:
        """Back to the loaded scenario: clock 0, fresh RNG, initial topology."""
        self.running = False
        self._load()
        self._emit("mote_state", self._motes_payload())
        self._emit("dodag_update", self._dodag_payload(None))

    # -- dispatch ----------------------------------------------------------------

    def _dispatch(self, payload: tuple) -> tuple:
        tag = payload[0]
        if tag == "timer":
            _, mote_id, kind, token = payload
            if not self._is_dead(mote_id):
                self._process_actions(mote_id, self.nodes[mote_id].on_timer(kind, token, self.now))
            return ("timer", mote_id, {"timer": kind})
        if tag == "tx_end":
            _, mote_id = payload
            self._transition(mote_id, metrics.IDLE_LISTEN)
            self._tx_busy[mote_id] = False
            queue = self._tx_queue[mote_id]
            if queue and not self._is_dead(mote_id):
                self._begin_tx(mote_id, queue.popleft())
            return ("timer", mote_id, {"timer": "tx_end"})
        if tag == "resolve":
            return self._resolve_slot(payload[1])
        if tag == "traffic":
            _, mote_id, interval_us = payload
            detail = self._generate_datagram(mote_id)
            if not self._is_dead(mote_id):
                self._schedule(self.now + interval_us, ("traffic", mote_id, interval_us))
            return ("traffic", mote_id, detail)
        if tag == "sweep":
            _, sweep_us = payload
            for mote_id in sorted(self.nodes):
                if not self._is_dead(mote_id):
                    self._process_actions(mote_id, self.nodes[mote_id].evict_stale(self.now))
            self._schedule(self.now + sweep_us, ("sweep", sweep_us))
            return ("timer", None, {"timer": "sweep"})
        if tag == "depletion":
            _, mote_id, epoch = payload
            if epoch == self._depletion_epoch[mote_id]:
                account = self.accounts[mote_id]
                self._transition(mote_id, account.state)
            return ("timer", mote_id, {"timer": "depletion"})
        if tag == "command":
            _, cmd = payload
            self._execute_command(cmd)
            return ("control-command", cmd.get("id"), {"command": cmd})
        raise EngineError(f"unknown event payload: {payload!r}")

    # -- radio pipeline ------------------------------------------------------------

    def _airtime_us(self, size_bytes: int) -> int:
        bits = size_bytes * 8
        return -(-bits * 1_000_000 // self.scenario.data_rate_bps)

    def _enqueue_tx(self, mote_id: int, frame: Frame) -> None:
        if self._is_dead(mote_id):
            self._drop_if_data(frame, DROP_NO_ROUTE)
            return
        if self._tx_busy[mote_id]:
            self._tx_queue[mote_id].append(frame)
        else:
            self._begin_tx(mote_id, frame)

    def _begin_tx(self, mote_id: int, frame: Frame) -> None:
        self._transition(mote_id, metrics.TX)
        if self._is_dead(mote_id):
            self._drop_if_data(frame, DROP_NO_ROUTE)
            return
        self._tx_busy[mote_id] = True
        airtime = self._airtime_us(frame.size_bytes)
        end = self.now + airtime
        intervals = self._tx_intervals[mote_id]
        intervals.append((self.now, end))
        self._prune_intervals(intervals)
        self._schedule(end, ("tx_end", mote_id))

        outcomes = self.model.plan(mote_id, self.positions, self.rng)
        slotted = set()
        for dst in sorted(outcomes):
            outcome = outcomes[dst]
            if outcome.state == radio.SILENT:
                continue
            if self._is_dead(dst) or (mote_id, dst) in self.failed_links:
                continue
            slot = Slot(
                receiver=dst,
                start_us=self.now + outcome.delay_us,
                end_us=end + outcome.delay_us,
                planned=outcome.state,
                frame=frame,
                tx_mote=mote_id,
            )
            self._slots[dst].append(slot)
            self._schedule(slot.end_us, ("resolve", slot))
            slotted.add(dst)
        if frame.kind == "data" and frame.dst not in slotted:
            # the addressed next hop never hears this frame
            self._finish_datagram(frame.datagram_id, DROP_LOSS)

    def _prune_intervals(self, intervals: List[Tuple[int, int]]) -> None:
        horizon = self.now - self._airtime_bound
        while intervals and intervals[0][1] <= horizon:
            intervals.pop(0)

    def _resolve_slot(self, slot: Slot) -> tuple:
        receiver = slot.receiver
        slots = self._slots[receiver]
        horizon = self.now - self._airtime_bound
        self._slots[receiver] = slots = [s for s in slots if s.end_us > horizon]

        detail = {
            "from": slot.tx_mote,
            "to": receiver,
            "frame": self._frame_tag(slot.frame),
            "dst": slot.frame.dst,
        }
        if self._is_dead(receiver):
            detail["delivered"] = False
            detail["cause"] = "receiver-off"
            if slot.frame.kind == "data" and slot.frame.dst == receiver:
                self._finish_datagram(slot.frame.datagram_id, DROP_LOSS)
            return ("frame-delivery", receiver, detail)

        cause = None
        if slot.planned == radio.INTERFERED:
            cause = "interference"
        elif any(
            s is not slot and radio.overlaps(slot.start_us, slot.end_us, s.start_us, s.end_us)
            for s in slots
        ):
            cause = "collision"
        elif any(
            radio.overlaps(slot.start_us, slot.end_us, a, b)
            for a, b in self._tx_intervals[receiver]
        ):
            cause = "half-duplex"
        delivered = cause is None

        self.link_table.observe(slot.tx_mote, receiver, delivered)
        if delivered:
            self._mark_reception(receiver, slot)
        else:
            ev = metrics.TimelineEvent(self.now, receiver, "interference")
            self.timeline.append(ev)
            self._emit("radio_event", ev.to_record())

        detail["delivered"] = delivered
        if cause:
            detail["cause"] = cause
        if delivered and not self._is_dead(receiver):
            if slot.frame.dst is None or slot.frame.dst == receiver:
                self._deliver_to_stack(receiver, slot.frame)
        elif not delivered and slot.frame.kind == "data" and slot.frame.dst == receiver:
            state = DROP_LOSS if cause == "interference" else DROP_COLLISION
            self._finish_datagram(slot.frame.datagram_id, state)
        return ("frame-delivery", receiver, detail)

    # -- stacks -------------------------------------------------------------------

    def _deliver_to_stack(self, receiver: int, frame: Frame) -> None:
        if frame.kind == "control":
            self._handle_control(receiver, frame)
        else:
            self._handle_data(receiver, frame)

    def _handle_control(self, receiver: int, frame: Frame) -> None:
        node = self.nodes[receiver]
        msg = frame.control
        if isinstance(msg, rpl.DioMessage):
            link_etx = self.link_table.live_etx(receiver, frame.src)
            actions = node.handle_dio(msg, link_etx, frame.src, self.now)
        elif isinstance(msg, rpl.DisMessage):
            actions = node.handle_dis(msg, frame.src, self.now)
        elif isinstance(msg, rpl.DaoMessage):
            actions = node.handle_dao(msg, frame.src, self.now)
        elif isinstance(msg, rpl.DaoAckMessage):
            actions = node.handle_dao_ack(msg, frame.src, self.now)
        else:
            raise EngineError(f"unknown control message: {msg!r}")
        self._process_actions(receiver, actions)

    def _handle_data(self, receiver: int, frame: Frame) -> None:
        ctx = sixlowpan.MacContext(
            src_mac=frame.src,
            dst_mac=receiver,
            frame_payload_length=frame.compressed.size + frame.payload_bytes,
        )
        header = sixlowpan.decompress(frame.compressed, ctx)
        if header.dst == self.addresses[receiver]:
            self._finish_datagram(frame.datagram_id, DELIVERED)
            return
        if header.hop_limit <= 1:
            self._finish_datagram(frame.datagram_id, DROP_NO_ROUTE)
            return
        next_hop = self.nodes[receiver].route_datagram(header.dst)
        if next_hop is None:
            self._finish_datagram(frame.datagram_id, DROP_NO_ROUTE)
            return
        forwarded = sixlowpan.Ipv6Header(
            traffic_class=header.traffic_class,
            flow_label=header.flow_label,
            payload_length=header.payload_length,
            next_header=header.next_header,
            hop_limit=header.hop_limit - 1,
            src=header.src,
            dst=header.dst,
        )
        self._enqueue_tx(
            receiver,
            self._data_frame(receiver, next_hop, forwarded, frame.payload_bytes, frame.datagram_id),
        )

    def _data_frame(
        self, sender: int, next_hop: int, header: sixlowpan.Ipv6Header,
        payload_bytes: int, datagram_id: int,
    ) -> Frame:
        probe = sixlowpan.MacContext(
            src_mac=sender, dst_mac=next_hop, frame_payload_length=payload_bytes
        )
        compressed = sixlowpan.compress(header, probe)
        return Frame(
            src=sender,
            dst=next_hop,
            size_bytes=MAC_OVERHEAD_BYTES + compressed.size + payload_bytes,
            kind="data",
            compressed=compressed,
            payload_bytes=payload_bytes,
            datagram_id=datagram_id,
        )

    def _generate_datagram(self, mote_id: int) -> dict:
        if self._is_dead(mote_id):
            return {"skipped": "dead"}
        datagram_id = next(self._datagram_seq)
        self.counters[SENT] += 1
        per_origin = self.origin_counters.setdefault(mote_id, Counter())
        per_origin[SENT] += 1
        payload = self.scenario.traffic.payload_bytes
        next_hop = self.nodes[mote_id].route_datagram(self.root_address)
        if next_hop is None:
            self.counters[DROP_NO_ROUTE] += 1
            per_origin[DROP_NO_ROUTE] += 1
            return {"datagram": datagram_id, "next_hop": None, "dropped": DROP_NO_ROUTE}
        self.in_flight[datagram_id] = mote_id
        header = sixlowpan.Ipv6Header(
            traffic_class=0,
            flow_label=0,
            payload_length=payload,
            next_header=sixlowpan.NEXT_HEADER_UDP,
            hop_limit=DATA_HOP_LIMIT,
            src=self.addresses[mote_id],
            dst=self.root_address,
        )
        self._enqueue_tx(mote_id, self._data_frame(mote_id, next_hop, header, payload, datagram_id))
        return {"datagram": datagram_id, "next_hop": next_hop}

    def _finish_datagram(self, datagram_id: Optional[int], state: str) -> None:
        if datagram_id is None or datagram_id not in self.in_flight:
            return
        origin = self.in_flight.pop(datagram_id)
        self.counters[state] += 1
        self.origin_counters[origin][state] += 1
        self._notes.append({"datagram": datagram_id, "outcome": state})

    def _drop_if_data(self, frame: Frame, state: str) -> None:
        if frame.kind == "data":
            self._finish_datagram(frame.datagram_id, state)

    # -- node action processing -----------------------------------------------------

    def _process_actions(self, mote_id: int, actions) -> None:
        for action in actions:
            if isinstance(action, rpl.SendControl):
                msg = action.msg
                size = MAC_OVERHEAD_BYTES + len(rpl.encode_control(msg))
                frame = Frame(
                    src=mote_id, dst=action.dst, size_bytes=size, kind="control", control=msg
                )
                self._enqueue_tx(mote_id, frame)
            elif isinstance(action, rpl.StartTimer):
                self._schedule(max(action.at_us, self.now), ("timer", mote_id, action.kind, action.token))
            elif isinstance(action, rpl.StateEvent):
                note = {"mote": mote_id, "state": action.kind}
                note.update(action.detail)
                self._notes.append(note)
                self._emit("dodag_update", self._dodag_payload(note))
                self._emit("mote_state", self._motes_payload(mote_id))
            else:
                raise EngineError(f"unknown node action: {action!r}")

    # -- energy ----------------------------------------------------------------------

    def _mark_reception(self, receiver: int, slot: Slot) -> None:
        account = self.accounts[receiver]
        if account.last_transition_us > slot.start_us:
            # a same-instant state change was booked first (touching
            # intervals do not collide); the span is already closed as idle
            was_dead = account.dead
            events = account.reclassify_idle_as_rx(slot.start_us, slot.end_us)
            self.timeline.extend(events)
            for ev in events:
                self._emit("radio_event", ev.to_record())
            if account.dead and not was_dead:
                self._on_death(receiver, "battery-depleted")
        else:
            self._transition(receiver, metrics.RX, at_us=slot.start_us)
            self._transition(receiver, metrics.IDLE_LISTEN)

    def _transition(self, mote_id: int, state: str, at_us: Optional[int] = None) -> None:
        account = self.accounts[mote_id]
        was_dead = account.dead
        events = account.transition(state, self.now if at_us is None else at_us)
        self.timeline.extend(events)
        for ev in events:
            self._emit("radio_event", ev.to_record())
        if account.dead and not was_dead:
            self._on_death(mote_id, "battery-depleted")
        elif not account.dead and not account.mains:
            self._arm_depletion(mote_id)

    def _arm_depletion(self, mote_id: int) -> None:
        account = self.accounts[mote_id]
        current = account.table.draw(account.state)
        self._depletion_epoch[mote_id] += 1
        if current <= 0.0:
            return
        eta = max(self.now, account.last_transition_us + int(account.power_now * 1e6 / current) + 1)
        if eta <= self.scenario.duration_us:
            self._schedule(eta, ("depletion", mote_id, self._depletion_epoch[mote_id]))

    def _on_death(self, mote_id: int, cause: str) -> None:
        if mote_id in self.dead_motes:
            return
        self.dead_motes.add(mote_id)
        self._depletion_epoch[mote_id] += 1
        for frame in self._tx_queue[mote_id]:
            self._drop_if_data(frame, DROP_NO_ROUTE)
        self._tx_queue[mote_id].clear()
        self._tx_busy[mote_id] = False
        self._notes.append({"mote": mote_id, "state": "died", "cause": cause})
        self._emit("mote_state", self._motes_payload(mote_id))

    def _is_dead(self, mote_id: int) -> bool:
        return mote_id in self.dead_motes

    def _node_status(self, mote_id: int) -> rpl.NodeStatus:
        spec = self.scenario.mote(mote_id)
        return rpl.NodeStatus(mains=spec.mains, ee=self.accounts[mote_id].ee_at(self.now))

    # -- control commands ---------------------------------------------------------------

    def submit(self, cmd: dict, reply: Optional[Callable[[dict], None]] = None) -> None:
        """Queue a command for the next event boundary; thread-safe."""
        with self._command_lock:
            self._commands.append((cmd, reply))

    def apply_command(self, cmd: dict) -> dict:
        """Validate and apply a command at the current boundary."""
        return self._apply_command_now(cmd)

    def _apply_command_now(self, cmd: dict) -> dict:
        name = cmd.get("cmd")
        try:
            if name == "start":
                self.running = True
            elif name == "pause":
                self.running = False
            elif name == "set_speed":
                factor = cmd.get("factor")
                if not isinstance(factor, (int, float)) or isinstance(factor, bool) or factor <= 0:
                    raise EngineError(f"speed factor must be positive, got {factor!r}")
                self.speed = float(factor)
            elif name == "reload":
                self.reload()
            elif name == "move_mote":
                self._validate_move(cmd)
                self._schedule(self.now, ("command", cmd))
            elif name == "inject_failure":
                self._validate_failure(cmd)
                self._schedule(self.now, ("command", cmd))
            elif name == "get_state":
                return {"ok": True, "state": self.snapshot()}
            else:
                raise EngineError(f"unknown command: {name!r}")
        except EngineError as exc:
            return {"ok": False, "error": str(exc)}
        return {"ok": True}

    def _validate_move(self, cmd: dict) -> None:
        mote_id = cmd.get("id")
        if mote_id not in self.positions:
            raise EngineError(f"unknown mote id: {mote_id!r}")
        pos = cmd.get("position")
        if (
            not isinstance(pos, (list, tuple)) or len(pos) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pos)
        ):
            raise EngineError(f"move_mote needs position [x, y], got {pos!r}")

    def _validate_failure(self, cmd: dict) -> None:
        if "mote" in cmd:
            if cmd["mote"] not in self.positions:
                raise EngineError(f"unknown mote id: {cmd['mote']!r}")
        elif "link" in cmd:
            link = cmd["link"]
            if (
                not isinstance(link, (list, tuple)) or len(link) != 2
                or any(m not in self.positions for m in link)
            ):
                raise EngineError(f"inject_failure link must name two motes, got {link!r}")
        else:
            raise EngineError("inject_failure needs 'mote' or 'link'")

    def _execute_command(self, cmd: dict) -> None:
        name = cmd["cmd"]
        if name == "move_mote":
            mote_id = cmd["id"]
            self.positions[mote_id] = (float(cmd["position"][0]), float(cmd["position"][1]))
            self._emit("mote_state", self._motes_payload(mote_id))
        elif name == "inject_failure":
            if "mote" in cmd:
                mote_id = cmd["mote"]
                self._transition(mote_id, metrics.OFF)
                self._on_death(mote_id, "injected-failure")
            else:
                a, b = cmd["link"]
                self.failed_links.add((a, b))
                self.failed_links.add((b, a))

    # -- observers and snapshots -----------------------------------------------------------

    def add_observer(self, fn: Callable[[dict], None]) -> None:
        self._observers.append(fn)

    def _emit(self, event: str, payload) -> None:
        if not self._observers:
            return
        frame = {"event": event, "t_us": self.now, "payload": payload}
        for fn in self._observers:
            fn(frame)

    def _emit_cadence(self) -> None:
        if not self._observers:
            return
        if self.now - self._last_clock_emit >= CLOCK_EMIT_INTERVAL_US:
            self._last_clock_emit = self.now
            self._emit("clock", {"now_us": self.now, "speed": self.speed})
        if self.now - self._last_metric_emit >= METRIC_EMIT_INTERVAL_US:
            self._last_metric_emit = self.now
            self._emit("metric_update", self._metrics_payload())

    def _motes_payload(self, only: Optional[int] = None) -> dict:
        motes = []
        for spec in self.scenario.motes:
            if only is not None and spec.id != only:
                continue
            node = self.nodes[spec.id]
            account = self.accounts[spec.id]
            motes.append(
                {
                    "id": spec.id,
                    "position": list(self.positions[spec.id]),
                    "role": spec.role.value,
                    "power_source": spec.power_source,
                    "rank": node.rank,
                    "parent": node.preferred_parent,
                    "joined": node.joined,
                    "dead": spec.id in self.dead_motes,
                    "ee": account.ee_at(self.now),
                }
            )
        return {"motes": motes}

    def _dodag_payload(self, change: Optional[dict]) -> dict:
        edges = [
            [node.mote_id, node.preferred_parent]
            for node in sorted(self.nodes.values(), key=lambda n: n.mote_id)
            if node.joined and node.preferred_parent is not None
        ]
        ranks = {
            str(node.mote_id): node.rank
            for node in sorted(self.nodes.values(), key=lambda n: n.mote_id)
        }
        payload = {"edges": edges, "ranks": ranks}
        if change:
            payload["change"] = change
        return payload

    def _metrics_payload(self) -> dict:
        per_mote = {}
        for mote_id in sorted(self.accounts):
            account = self.accounts[mote_id]
            per_mote[str(mote_id)] = {
                "ee": account.ee_at(self.now),
                "charge_mc": account.charge_drawn_mc,
                "dead": mote_id in self.dead_motes,
            }
        return {"motes": per_mote, "datagrams": dict(self.counters)}

    def snapshot(self) -> dict:
        state = {
            "t_us": self.now,
            "running": self.running,
            "speed": self.speed,
            "duration_us": self.scenario.duration_us,
            "name": self.scenario.name,
        }
        state.update(self._motes_payload())
        state["dodag"] = self._dodag_payload(None)
        state["datagrams"] = dict(self.counters)
        return state

    # -- misc ---------------------------------------------------------------------------

    @staticmethod
    def _frame_tag(frame: Frame) -> str:
        if frame.kind == "data":
            return "data"
        return CONTROL_TAGS[type(frame.control)]

    def trace_lines(self) -> List[str]:
        return [json.dumps(rec, sort_keys=True, separators=(",", ":")) for rec in self.trace]

    def next_event_at(self) -> Optional[int]:
        """Fire time of the next due event, honoring the duration cutoff."""
        self._drain_commands()
        if not self._queue:
            return None
        fire_at = self._queue[0][0]
        return fire_at if fire_at <= self.scenario.duration_us else None
