"""Per-mote routing state machine for DODAG construction and upkeep.

Each mote runs one `RplNode`. The node consumes decoded control messages
(DIO, DIS, DAO, DAO-ACK) plus timer wakeups and returns a list of actions
for the host to execute: frames to transmit, timers to arm, and state
events worth tracing. The node never touches the clock, the radio, or the
RNG stream directly, which keeps every transition a deterministic function
of (state, input, injected randomness) and makes the machine testable
without a simulator around it.

Routing model in brief: the root anchors the graph at rank 0 and announces
itself through trickle-timed DIO multicasts. A mote hearing a DIO admits
the sender as a candidate parent only when the advertised rank is strictly
below its own (loop avoidance), computes its own rank as the parent's rank
plus the link cost in rank units, and picks a preferred parent under the
configured objective function. Joined motes advertise themselves upward
with DAOs so that every hop, and finally the root, can store downward
routes; DAO-ACKs close the loop and unacknowledged DAOs are retransmitted.
Motes that lose every candidate parent fall silent, keep their last rank
so they never re-attach below a former descendant, and solicit fresh
announcements with periodic DIS messages. A version bump at the root
invalidates the whole graph and triggers a rebuild.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

ROOT_RANK = 0
INFINITE_RANK = 0xFFFF
RANK_UNIT = 128          # rank units per unit of link ETX

MOP_STORING = 2
DEFAULT_INSTANCE_ID = 0

DIS_PERIOD_US = 30_000_000       # unjoined motes solicit every 30 s
DAO_RETX_US = 2_000_000          # DAO-ACK wait before retransmit
DAO_MAX_RETX = 3
PARENT_STALE_INTERVALS = 3       # evict candidates silent for 3 * imax

# wire tags, first octet of every control message
TAG_DIS = 0x00
TAG_DIO = 0x01
TAG_DAO = 0x02
TAG_DAO_ACK = 0x03


class ControlError(ValueError):
    """Field overflow at construction or malformed bytes at decode."""


def _fit(name: str, value: int, bits: int) -> int:
    if not 0 <= value < (1 << bits):
        raise ControlError(f"{name} out of range for {bits}-bit field: {value}")
    return value


class Role(enum.Enum):
    ROOT = "root"
    ROUTER = "router"
    LEAF = "leaf"


# ---------------------------------------------------------------------------
# control messages and their wire codec


@dataclass(frozen=True)
class DioMessage:
    """Topology advertisement.

    Wire body after the tag octet: instance id, version, 2-octet rank,
    one packed octet (G | O | 3-bit MOP | 3-bit Prf), DTSN, flags,
    reserved, then the 128-bit root address.
    """

    version_number: int
    rank: int
    dodag_id: int
    rpl_instance_id: int = DEFAULT_INSTANCE_ID
    g_flag: bool = True
    o_flag: bool = False
    mop: int = MOP_STORING
    prf: int = 0
    dtsn: int = 0
    flags: int = 0
    reserved: int = 0

    def __post_init__(self) -> None:
        _fit("rpl_instance_id", self.rpl_instance_id, 8)
        _fit("version_number", self.version_number, 8)
        _fit("rank", self.rank, 16)
        _fit("mop", self.mop, 3)
        _fit("prf", self.prf, 3)
        _fit("dtsn", self.dtsn, 8)
        _fit("flags", self.flags, 8)
        _fit("reserved", self.reserved, 8)
        _fit("dodag_id", self.dodag_id, 128)


@dataclass(frozen=True)
class DisMessage:
    """Solicitation: ask neighbors to announce, optionally one graph only."""

    sender: int
    solicited_dodag_id: Optional[int] = None

    def __post_init__(self) -> None:
        _fit("sender", self.sender, 16)
        if self.solicited_dodag_id is not None:
            _fit("solicited_dodag_id", self.solicited_dodag_id, 128)


@dataclass(frozen=True)
class DaoMessage:
    """Downward-route advertisement, or retraction when withdraw is set."""

    sender: int
    target: int
    sequence: int
    withdraw: bool = False

    def __post_init__(self) -> None:
        _fit("sender", self.sender, 16)
        _fit("target", self.target, 128)
        _fit("sequence", self.sequence, 8)


@dataclass(frozen=True)
class DaoAckMessage:
    responder: int
    sequence: int

    def __post_init__(self) -> None:
        _fit("responder", self.responder, 16)
        _fit("sequence", self.sequence, 8)


ControlMessage = object  # any of the four dataclasses above


def encode_control(msg) -> bytes:
    """Serialize a control message; total size is fixed per message kind."""
    if isinstance(msg, DioMessage):
        packed = (
            (int(msg.g_flag) << 7)
            | (int(msg.o_flag) << 6)
            | (msg.mop << 3)
            | msg.prf
        )
        return (
            bytes((TAG_DIO, msg.rpl_instance_id, msg.version_number))
            + msg.rank.to_bytes(2, "big")
            + bytes((packed, msg.dtsn, msg.flags, msg.reserved))
            + msg.dodag_id.to_bytes(16, "big")
        )
    if isinstance(msg, DisMessage):
        head = bytes((TAG_DIS,)) + msg.sender.to_bytes(2, "big")
        if msg.solicited_dodag_id is None:
            return head + b"\x00"
        return head + b"\x01" + msg.solicited_dodag_id.to_bytes(16, "big")
    if isinstance(msg, DaoMessage):
        return (
            bytes((TAG_DAO,))
            + msg.sender.to_bytes(2, "big")
            + bytes((msg.sequence, int(msg.withdraw)))
            + msg.target.to_bytes(16, "big")
        )
    if isinstance(msg, DaoAckMessage):
        return (
            bytes((TAG_DAO_ACK,))
            + msg.responder.to_bytes(2, "big")
            + bytes((msg.sequence,))
        )
    raise ControlError(f"not a control message: {type(msg).__name__}")


def decode_control(data: bytes):
    """Inverse of encode_control; rejects truncation and trailing bytes."""
    if len(data) < 1:
        raise ControlError("truncated control message: empty buffer")
    tag = data[0]
    if tag == TAG_DIO:
        if len(data) != 25:
            raise ControlError(f"DIO must be 25 bytes, got {len(data)}")
        packed = data[5]
        return DioMessage(
            rpl_instance_id=data[1],
            version_number=data[2],
            rank=int.from_bytes(data[3:5], "big"),
            g_flag=bool(packed & 0x80),
            o_flag=bool(packed & 0x40),
            mop=(packed >> 3) & 0x7,
            prf=packed & 0x7,
            dtsn=data[6],
            flags=data[7],
            reserved=data[8],
            dodag_id=int.from_bytes(data[9:25], "big"),
        )
    if tag == TAG_DIS:
        if len(data) < 4:
            raise ControlError(f"truncated DIS: {len(data)} bytes")
        sender = int.from_bytes(data[1:3], "big")
        if data[3] == 0:
            if len(data) != 4:
                raise ControlError("unsolicited DIS carries trailing bytes")
            return DisMessage(sender=sender)
        if data[3] != 1 or len(data) != 20:
            raise ControlError("solicited DIS must be flag 1 plus 16 bytes")
        return DisMessage(
            sender=sender, solicited_dodag_id=int.from_bytes(data[4:20], "big")
        )
    if tag == TAG_DAO:
        if len(data) != 21:
            raise ControlError(f"DAO must be 21 bytes, got {len(data)}")
        if data[4] > 1:
            raise ControlError(f"DAO withdraw flag must be 0 or 1, got {data[4]}")
        return DaoMessage(
            sender=int.from_bytes(data[1:3], "big"),
            sequence=data[3],
            withdraw=bool(data[4]),
            target=int.from_bytes(data[5:21], "big"),
        )
    if tag == TAG_DAO_ACK:
        if len(data) != 4:
            raise ControlError(f"DAO-ACK must be 4 bytes, got {len(data)}")
        return DaoAckMessage(
            responder=int.from_bytes(data[1:3], "big"), sequence=data[3]
        )
    raise ControlError(f"unknown control message tag 0x{tag:02x}")


def version_is_newer(a: int, b: int) -> bool:
    """Serial-number order on 8 bits: a is newer than b iff 0 < a-b < 128."""
    return 0 < ((a - b) & 0xFF) < 128


# ---------------------------------------------------------------------------
# trickle timer


@dataclass(frozen=True)
class TrickleParams:
    imin_ms: int = 4096
    doublings: int = 8
    k: int = 10

    def __post_init__(self) -> None:
        if self.imin_ms < 1 or self.doublings < 0 or self.k < 1:
            raise ValueError(f"bad trickle parameters: {self}")


class TrickleTimer:
    """Adaptive announcement timer.

    Within each interval I a fire point t is drawn uniformly from
    [I/2, I); at t the host may emit iff fewer than k consistent messages
    were heard this interval. At the interval end I doubles up to
    imin * 2^doublings and a fresh interval starts. Hearing an
    inconsistency collapses I back to imin immediately.

    The host drives the timer by scheduling a wakeup at whatever time
    step() or hear_inconsistent() returns. `epoch` increments whenever
    previously handed-out wakeups become stale; the host tags scheduled
    wakeups with the epoch and drops mismatches.
    """

    def __init__(self, params: TrickleParams, rng) -> None:
        self.params = params
        self.rng = rng
        self.imin_us = params.imin_ms * 1000
        self.imax_us = self.imin_us * (1 << params.doublings)
        self.interval_us = self.imin_us
        self.c = 0
        self.t_fire_us = 0
        self.interval_end_us = 0
        self.epoch = 0
        self.running = False
        self._awaiting_fire = False

    def _new_interval(self, now_us: int) -> int:
        self.c = 0
        half = self.interval_us // 2
        self.t_fire_us = now_us + half + self.rng.randrange(self.interval_us - half)
        self.interval_end_us = now_us + self.interval_us
        self._awaiting_fire = True
        return self.t_fire_us

    def start(self, now_us: int) -> int:
        """Begin at imin; returns the first wakeup time."""
        self.epoch += 1
        self.running = True
        self.interval_us = self.imin_us
        return self._new_interval(now_us)

    def stop(self) -> None:
        self.epoch += 1
        self.running = False

    def step(self, now_us: int) -> tuple:
        """Handle a due wakeup; returns (emit_now, next_wakeup_us)."""
        if not self.running:
            return (False, None)
        if self._awaiting_fire:
            self._awaiting_fire = False
            return (self.c < self.params.k, self.interval_end_us)
        # interval end: double and redraw
        self.interval_us = min(self.interval_us * 2, self.imax_us)
        return (False, self._new_interval(now_us))

    def hear_consistent(self) -> None:
        self.c += 1

    def hear_inconsistent(self, now_us: int) -> Optional[int]:
        """Collapse to imin and restart; returns the new wakeup time."""
        if not self.running:
            return None
        self.epoch += 1
        self.interval_us = self.imin_us
        return self._new_interval(now_us)


# ---------------------------------------------------------------------------
# objective functions and rank arithmetic


@dataclass(frozen=True)
class EtxOf:
    """Minimize cumulative expected transmissions to the root."""


@dataclass(frozen=True)
class EnergyOf:
    """Prefer stable parents: mains power first, then highest energy left."""

    prefer_mains: bool = True


@dataclass(frozen=True)
class NodeStatus:
    """What an objective function may know about a neighbor's power state."""

    mains: bool
    ee: float                    # remaining / boot-time charge, 0..1


@dataclass
class Candidate:
    advertised_rank: int
    link_etx: float
    candidate_rank: int
    last_heard_us: int


def compute_rank(parent_advertised_rank: int, link_etx: float, of=None) -> int:
    """Own rank through a parent; INFINITE_RANK marks an unusable path."""
    if link_etx < 1.0:
        raise ValueError(f"link ETX below 1: {link_etx}")
    if parent_advertised_rank >= INFINITE_RANK:
        return INFINITE_RANK
    rank = parent_advertised_rank + round(link_etx * RANK_UNIT)
    return min(rank, INFINITE_RANK)


def select_parent(
    candidates: Dict[int, Candidate],
    of,
    status_of: Optional[Callable[[int], NodeStatus]] = None,
) -> int:
    """Pick the preferred parent id; deterministic, ties to the lowest id."""
    if not candidates:
        raise ValueError("empty candidate set")
    if isinstance(of, EnergyOf):
        if status_of is None:
            raise ValueError("EnergyOf needs a node status source")

        def key(item):
            mote_id, cand = item
            status = status_of(mote_id)
            head = (not status.mains,) if of.prefer_mains else ()
            return head + (-status.ee, cand.candidate_rank, mote_id)

    else:
        def key(item):
            mote_id, cand = item
            return (cand.candidate_rank, mote_id)

    return min(candidates.items(), key=key)[0]


# ---------------------------------------------------------------------------
# actions handed back to the host


@dataclass(frozen=True)
class SendControl:
    msg: object
    dst: Optional[int] = None        # None = link-scope multicast


@dataclass(frozen=True)
class StartTimer:
    kind: str                        # trickle | dis | dao_retx
    at_us: int
    token: int


@dataclass(frozen=True)
class StateEvent:
    kind: str
    detail: dict


class RplNode:
    """One mote's routing state; all methods return actions for the host."""

    def __init__(
        self,
        mote_id: int,
        role: Role,
        address: int,
        rng,
        of=EtxOf(),
        trickle_params: TrickleParams = TrickleParams(),
        status_of: Optional[Callable[[int], NodeStatus]] = None,
        instance_id: int = DEFAULT_INSTANCE_ID,
    ) -> None:
        self.mote_id = mote_id
        self.role = role
        self.address = address
        self.of = of
        self.status_of = status_of
        self.instance_id = instance_id
        self.trickle = TrickleTimer(trickle_params, rng)

        self.joined = role is Role.ROOT
        self.rank = ROOT_RANK if role is Role.ROOT else INFINITE_RANK
        # non-roots adopt whatever version they first hear
        self.version: Optional[int] = 0 if role is Role.ROOT else None
        self.dodag_id: Optional[int] = address if role is Role.ROOT else None
        self.parent_set: Dict[int, Candidate] = {}
        self.preferred_parent: Optional[int] = None
        self.routing_table: Dict[int, int] = {}       # target addr -> next hop id
        self.dtsn = 0
        self.dao_seq = 0
        # dao sequence -> (message, via mote id, retransmissions so far)
        self.pending_daos: Dict[int, list] = {}
        self.dao_seen: Dict[tuple, int] = {}          # (sender, target) -> last seq
        self.dis_epoch = 0
        self.counters: Counter = Counter()

    # -- lifecycle ----------------------------------------------------------

    def start(self, now_us: int) -> List:
        if self.role is Role.ROOT:
            wake = self.trickle.start(now_us)
            return [
                StateEvent("joined", {"rank": self.rank, "parent": None}),
                StartTimer("trickle", wake, self.trickle.epoch),
            ]
        return [StartTimer("dis", now_us + DIS_PERIOD_US, self.dis_epoch)]

    def make_dio(self) -> DioMessage:
        return DioMessage(
            rpl_instance_id=self.instance_id,
            version_number=self.version or 0,
            rank=self.rank,
            dodag_id=self.dodag_id or 0,
            dtsn=self.dtsn,
        )

    # -- message handlers ----------------------------------------------------

    def handle_dio(self, dio: DioMessage, link_etx: float, sender: int, now_us: int) -> List:
        if dio.rpl_instance_id != self.instance_id:
            self.counters["dio_unknown_instance"] += 1
            return []
        if self.role is Role.ROOT:
            # the root never reparents; other announcements only feed trickle
            if dio.version_number == self.version:
                self.trickle.hear_consistent()
            return []

        actions: List = []
        if self.version is None or version_is_newer(dio.version_number, self.version):
            # new graph version: forget membership and rebuild from this DIO
            rejoining = self.version is not None
            self.version = dio.version_number
            self.parent_set.clear()
            self.routing_table.clear()
            self.pending_daos.clear()
            self.dao_seen.clear()
            self.preferred_parent = None
            self.joined = False
            self.rank = INFINITE_RANK
            self.trickle.stop()
            # keep soliciting in case this DIO does not get us back in
            self.dis_epoch += 1
            actions.append(StartTimer("dis", now_us + DIS_PERIOD_US, self.dis_epoch))
            if rejoining:
                actions.append(StateEvent("repair", {"version": self.version}))
        elif version_is_newer(self.version, dio.version_number):
            # stale announcer; speed its catch-up, learn nothing from it
            actions.extend(self._trickle_reset(now_us))
            return actions

        self.dodag_id = dio.dodag_id

        # loop avoidance: never consider announcements at or above own rank;
        # the rank survives a detach, so a former child stays unacceptable
        usable = dio.rank < self.rank
        candidate_rank = compute_rank(dio.rank, link_etx) if usable else INFINITE_RANK
        if not usable or candidate_rank >= INFINITE_RANK:
            self.counters["dio_rank_rejected" if not usable else "dio_rank_overflow"] += 1
            was_joined = self.joined
            if self.parent_set.pop(sender, None) is not None:
                more, changed = self._reselect(now_us)
                actions.extend(more)
                if not changed and was_joined and self.role is not Role.LEAF:
                    self.trickle.hear_consistent()
            elif self.joined and self.role is not Role.LEAF:
                self.trickle.hear_consistent()
            return actions

        was_joined = self.joined
        self.parent_set[sender] = Candidate(
            advertised_rank=dio.rank,
            link_etx=link_etx,
            candidate_rank=candidate_rank,
            last_heard_us=now_us,
        )
        more, parent_changed = self._reselect(now_us)
        actions.extend(more)
        if not parent_changed and was_joined and self.role is not Role.LEAF:
            self.trickle.hear_consistent()
        return actions

    def handle_dis(self, dis: DisMessage, sender: int, now_us: int) -> List:
        if not self.joined or self.role is Role.LEAF:
            return []
        if dis.solicited_dodag_id is not None and dis.solicited_dodag_id != self.dodag_id:
            return []
        actions: List = [SendControl(self.make_dio(), dst=dis.sender)]
        actions.extend(self._trickle_reset(now_us))
        return actions

    def handle_dao(self, dao: DaoMessage, sender: int, now_us: int) -> List:
        if not self.joined:
            self.counters["dao_while_unjoined"] += 1
            return []
        if sender in self.parent_set or sender == self.preferred_parent:
            # an upward neighbor cannot be a child
            self.counters["dao_non_child"] += 1
            return []

        ack = SendControl(DaoAckMessage(self.mote_id, dao.sequence), dst=sender)
        seen_key = (sender, dao.target)
        if self.dao_seen.get(seen_key) == dao.sequence:
            return [ack]                      # duplicate: table untouched, re-ack
        self.dao_seen[seen_key] = dao.sequence

        actions: List = [ack]
        if dao.withdraw:
            if self.routing_table.get(dao.target) == sender:
                del self.routing_table[dao.target]
                actions.append(
                    StateEvent("route_removed", {"target": dao.target, "next_hop": sender})
                )
                if self.role is not Role.ROOT and self.preferred_parent is not None:
                    actions.extend(self._send_dao(dao.target, now_us, withdraw=True))
        else:
            self.routing_table[dao.target] = sender
            actions.append(
                StateEvent("route_installed", {"target": dao.target, "next_hop": sender})
            )
            if self.role is not Role.ROOT and self.preferred_parent is not None:
                actions.extend(self._send_dao(dao.target, now_us))
        return actions

    def handle_dao_ack(self, ack: DaoAckMessage, sender: int, now_us: int) -> List:
        self.pending_daos.pop(ack.sequence, None)
        return []

    # -- timers ---------------------------------------------------------------

    def on_timer(self, kind: str, token: int, now_us: int) -> List:
        if kind == "trickle":
            if token != self.trickle.epoch:
                return []
            emit, wake = self.trickle.step(now_us)
            if wake is None:
                return []
            actions: List = [StartTimer("trickle", wake, self.trickle.epoch)]
            if emit and self.joined and self.role is not Role.LEAF:
                actions.insert(0, SendControl(self.make_dio(), dst=None))
            return actions
        if kind == "dis":
            if token != self.dis_epoch or self.joined:
                return []
            return [
                SendControl(DisMessage(self.mote_id), dst=None),
                StartTimer("dis", now_us + DIS_PERIOD_US, self.dis_epoch),
            ]
        if kind == "dao_retx":
            entry = self.pending_daos.get(token)
            if entry is None:
                return []
            msg, via, retx = entry
            if retx >= DAO_MAX_RETX:
                del self.pending_daos[token]
                self.counters["dao_abandoned"] += 1
                return []
            entry[2] = retx + 1
            return [
                SendControl(msg, dst=via),
                StartTimer("dao_retx", now_us + DAO_RETX_US, token),
            ]
        raise ValueError(f"unknown timer kind: {kind}")

    def evict_stale(self, now_us: int) -> List:
        """Drop candidates not heard within the staleness window."""
        horizon = PARENT_STALE_INTERVALS * self.trickle.imax_us
        stale = [
            mote_id
            for mote_id, cand in self.parent_set.items()
            if now_us - cand.last_heard_us > horizon
        ]
        if not stale:
            return []
        for mote_id in stale:
            del self.parent_set[mote_id]
        self.counters["parents_evicted_stale"] += len(stale)
        return self._reselect(now_us)[0]

    # -- forwarding ------------------------------------------------------------

    def route_datagram(self, destination: int) -> Optional[int]:
        """Next hop for a destination address, or None when unroutable."""
        hop = self.routing_table.get(destination)
        if hop is not None:
            return hop
        if self.joined and self.preferred_parent is not None:
            return self.preferred_parent
        return None

    def global_repair(self, now_us: int) -> List:
        """Root only: bump the version so every mote rebuilds."""
        if self.role is not Role.ROOT:
            raise ValueError("global repair is a root operation")
        self.version = ((self.version or 0) + 1) & 0xFF
        self.routing_table.clear()
        self.dao_seen.clear()
        actions: List = [StateEvent("repair", {"version": self.version})]
        actions.extend(self._trickle_reset(now_us))
        return actions

    # -- internals ---------------------------------------------------------------

    def _trickle_reset(self, now_us: int) -> List:
        wake = self.trickle.hear_inconsistent(now_us)
        if wake is None:
            return []
        return [StartTimer("trickle", wake, self.trickle.epoch)]

    def _send_dao(self, target: int, now_us: int, withdraw: bool = False) -> List:
        self.dao_seq = (self.dao_seq + 1) & 0xFF
        msg = DaoMessage(
            sender=self.mote_id, target=target, sequence=self.dao_seq, withdraw=withdraw
        )
        via = self.preferred_parent
        self.pending_daos[self.dao_seq] = [msg, via, 0]
        return [
            SendControl(msg, dst=via),
            StartTimer("dao_retx", now_us + DAO_RETX_US, self.dao_seq),
        ]

    def _advertise_all(self, now_us: int) -> List:
        actions: List = []
        for target in [self.address] + sorted(self.routing_table):
            actions.extend(self._send_dao(target, now_us))
        return actions

    def _withdraw_all(self, old_parent: int, now_us: int) -> List:
        targets = [self.address] + sorted(self.routing_table)
        actions: List = []
        for target in targets:
            self.dao_seq = (self.dao_seq + 1) & 0xFF
            msg = DaoMessage(
                sender=self.mote_id, target=target, sequence=self.dao_seq, withdraw=True
            )
            self.pending_daos[self.dao_seq] = [msg, old_parent, 0]
            actions.append(SendControl(msg, dst=old_parent))
            actions.append(StartTimer("dao_retx", now_us + DAO_RETX_US, self.dao_seq))
        return actions

    def _detach(self, now_us: int) -> List:
        # rank stays sticky so former descendants remain unacceptable parents
        was_joined = self.joined
        self.joined = False
        self.preferred_parent = None
        self.pending_daos.clear()
        self.trickle.stop()
        if not was_joined:
            return []
        self.dis_epoch += 1
        return [
            StateEvent("left", {"rank": self.rank}),
            StartTimer("dis", now_us + DIS_PERIOD_US, self.dis_epoch),
        ]

    def _reselect(self, now_us: int) -> tuple:
        """Re-run parent selection; returns (actions, parent_changed)."""
        if not self.parent_set:
            changed = self.preferred_parent is not None
            return (self._detach(now_us), changed)

        old_parent = self.preferred_parent
        old_rank = self.rank
        was_joined = self.joined
        pick = select_parent(self.parent_set, self.of, self.status_of)
        self.preferred_parent = pick
        self.rank = self.parent_set[pick].candidate_rank
        self.joined = True
        # keep the admission invariant under the new rank
        for mote_id in [
            m for m, c in self.parent_set.items()
            if m != pick and c.advertised_rank >= self.rank
        ]:
            del self.parent_set[mote_id]

        actions: List = []
        if not was_joined:
            self.dis_epoch += 1
            actions.append(StateEvent("joined", {"rank": self.rank, "parent": pick}))
            if self.role is not Role.LEAF:
                actions.append(
                    StartTimer("trickle", self.trickle.start(now_us), self.trickle.epoch)
                )
            actions.extend(self._advertise_all(now_us))
            return (actions, True)
        if pick != old_parent:
            # advertisements aimed at the old parent are superseded
            for seq in [
                s for s, (msg, via, _) in self.pending_daos.items()
                if via == old_parent and not msg.withdraw
            ]:
                del self.pending_daos[seq]
            if old_parent is not None:
                actions.extend(self._withdraw_all(old_parent, now_us))
            actions.append(
                StateEvent("parent_changed", {"old": old_parent, "new": pick, "rank": self.rank})
            )
            actions.extend(self._advertise_all(now_us))
            if self.role is not Role.LEAF:
                # a parent switch is an inconsistency worth fast announcing
                actions.extend(self._trickle_reset(now_us))
            return (actions, True)
        if self.rank != old_rank:
            actions.append(StateEvent("rank_changed", {"rank": self.rank}))
        return (actions, False)


def dodag_dot(nodes) -> str:
    """Preferred-parent graph in DOT form, rank as the node label."""
    lines = ["digraph dodag {"]
    for node in sorted(nodes, key=lambda n: n.mote_id):
        rank = node.rank if node.rank != INFINITE_RANK else "inf"
        lines.append(f'  "{node.mote_id}" [label="{node.mote_id}\\nrank={rank}"];')
    for node in sorted(nodes, key=lambda n: n.mote_id):
        if node.preferred_parent is not None and node.joined:
            lines.append(f'  "{node.mote_id}" -> "{node.preferred_parent}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
