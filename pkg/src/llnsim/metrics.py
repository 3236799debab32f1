"""Energy accounting, link-quality estimation, and timeline events.

Energy is tracked as charge: each mote accrues time in one of four radio
states (off, idle_listen, rx, tx) and drains its battery by state duration
times the configured current draw. EE, the remaining-over-boot charge
ratio, is what the energy objective function reads, and a battery that
hits zero marks its mote dead with the radio forced off.

Link quality is per directed link: cumulative sent/received counts give
PRR and ETX for reports, while an exponentially smoothed delivery
estimate feeds routing live, where early decisions cannot wait for counts
to stabilize. Interference windows are charged as idle listening; only
frames actually delivered count as reception time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

OFF = "off"
IDLE_LISTEN = "idle_listen"
RX = "rx"
TX = "tx"
RADIO_STATES = (OFF, IDLE_LISTEN, RX, TX)

ETX_CEILING = 16.0
EWMA_ALPHA = 0.1
LIVE_ETX_DEFAULT = 2.0
LIVE_ETX_MIN_SAMPLES = 5

# timeline display classes, one per event kind
DISPLAY_CLASSES = {
    "radio_on": "gray",
    "radio_off": "white",
    "tx_start": "blue",
    "tx_end": "blue",
    "rx_start": "green",
    "rx_end": "green",
    "interference": "red",
}


@dataclass(frozen=True)
class TimelineEvent:
    t_us: int
    mote: int
    kind: str
    display: str = ""

    def __post_init__(self) -> None:
        if self.kind not in DISPLAY_CLASSES:
            raise ValueError(f"unknown timeline event kind: {self.kind}")
        object.__setattr__(self, "display", DISPLAY_CLASSES[self.kind])

    def to_record(self) -> dict:
        return {"t_us": self.t_us, "mote": self.mote, "kind": self.kind, "display": self.display}


@dataclass(frozen=True)
class CurrentTable:
    """State current draws in mA; scenario-configurable."""

    off_mA: float = 0.0
    idle_listen_mA: float = 20.0
    rx_mA: float = 20.0
    tx_mA: float = 17.7

    def draw(self, state: str) -> float:
        return {
            OFF: self.off_mA,
            IDLE_LISTEN: self.idle_listen_mA,
            RX: self.rx_mA,
            TX: self.tx_mA,
        }[state]


def _charge_mc(current_ma: float, duration_us: int) -> float:
    # mA times seconds gives millicoulombs
    return current_ma * duration_us / 1e6


class EnergyAccount:
    """Radio-state time and charge bookkeeping for one mote."""

    def __init__(
        self,
        mote: int,
        table: CurrentTable,
        mains: bool = False,
        capacity_mc: Optional[float] = None,
        start_us: int = 0,
    ) -> None:
        self.mote = mote
        self.table = table
        self.mains = mains
        self.power_max = float("inf") if mains else float(capacity_mc or 0.0)
        self.power_now = self.power_max
        self.state = OFF
        self.state_us: Dict[str, int] = {s: 0 for s in RADIO_STATES}
        self.last_transition_us = start_us
        self.charge_drawn_mc = 0.0
        self.dead = False

    def transition(self, new_state: str, t_us: int) -> List[TimelineEvent]:
        """Close the current state interval and enter new_state at t_us."""
        if new_state not in RADIO_STATES:
            raise ValueError(f"unknown radio state: {new_state}")
        if t_us < self.last_transition_us:
            raise ValueError(
                f"mote {self.mote}: transition at {t_us} before {self.last_transition_us}"
            )
        events: List[TimelineEvent] = []
        duration = t_us - self.last_transition_us
        events.extend(self._accrue(duration, t_us))
        self.last_transition_us = t_us
        if self.dead:
            return events          # depleted: stays off, request ignored
        old = self.state
        if old == new_state:
            return events
        if old == TX:
            events.append(TimelineEvent(t_us, self.mote, "tx_end"))
        elif old == RX:
            events.append(TimelineEvent(t_us, self.mote, "rx_end"))
        if old == OFF:
            events.append(TimelineEvent(t_us, self.mote, "radio_on"))
        if new_state == OFF:
            events.append(TimelineEvent(t_us, self.mote, "radio_off"))
        elif new_state == TX:
            events.append(TimelineEvent(t_us, self.mote, "tx_start"))
        elif new_state == RX:
            events.append(TimelineEvent(t_us, self.mote, "rx_start"))
        self.state = new_state
        return events

    def _accrue(self, duration: int, t_us: int) -> List[TimelineEvent]:
        """Charge the interval ending at t_us; handles mid-interval depletion."""
        if duration <= 0:
            return []
        current = self.table.draw(self.state)
        cost = _charge_mc(current, duration)
        if self.mains or cost <= self.power_now or current == 0.0:
            self.state_us[self.state] += duration
            if not self.mains:
                self.power_now -= cost
            self.charge_drawn_mc += cost
            return []
        # battery runs out partway through: split at the depletion instant
        alive_us = max(0, int(self.power_now * 1e6 / current))
        self.state_us[self.state] += alive_us
        self.charge_drawn_mc += self.power_now
        self.power_now = 0.0
        self.dead = True
        death_t = t_us - duration + alive_us
        events: List[TimelineEvent] = []
        if self.state == TX:
            events.append(TimelineEvent(death_t, self.mote, "tx_end"))
        elif self.state == RX:
            events.append(TimelineEvent(death_t, self.mote, "rx_end"))
        if self.state != OFF:
            events.append(TimelineEvent(death_t, self.mote, "radio_off"))
        self.state = OFF
        self.state_us[OFF] += duration - alive_us
        return events

    def reclassify_idle_as_rx(self, start_us: int, end_us: int) -> List[TimelineEvent]:
        """Re-label an already-closed idle span as reception.

        Needed when a reception window closes at the same instant a later
        state change was recorded first: the span was provisionally booked
        as idle listening. Returned events carry timestamps earlier than
        events already handed out; consumers order by time, not arrival.
        """
        if not start_us <= end_us <= self.last_transition_us:
            raise ValueError(
                f"mote {self.mote}: span [{start_us}, {end_us}] is not closed history"
            )
        duration = end_us - start_us
        if duration <= 0:
            return []
        if self.state_us[IDLE_LISTEN] < duration:
            raise ValueError(f"mote {self.mote}: span was not booked as idle listening")
        self.state_us[IDLE_LISTEN] -= duration
        self.state_us[RX] += duration
        delta = _charge_mc(self.table.rx_mA - self.table.idle_listen_mA, duration)
        self.charge_drawn_mc += delta
        if not self.mains and delta:
            self.power_now -= delta
            if self.power_now <= 0.0:
                self.power_now = 0.0
                self.dead = True
        return [
            TimelineEvent(start_us, self.mote, "rx_start"),
            TimelineEvent(end_us, self.mote, "rx_end"),
        ]

    def finalize(self, t_us: int) -> List[TimelineEvent]:
        """Close the open interval at the end of a run."""
        return self.transition(self.state, t_us)

    def ee(self) -> float:
        if self.mains:
            return 1.0
        if self.power_max <= 0:
            return 0.0
        return self.power_now / self.power_max

    def ee_at(self, t_us: int) -> float:
        """EE projected to t_us without recording a transition."""
        if self.mains:
            return 1.0
        if self.power_max <= 0:
            return 0.0
        pending = _charge_mc(self.table.draw(self.state), t_us - self.last_transition_us)
        return max(0.0, self.power_now - pending) / self.power_max

    def elapsed_us(self) -> int:
        return sum(self.state_us.values())

    def duty_cycle(self) -> float:
        elapsed = self.elapsed_us()
        if elapsed <= 0:
            raise ValueError("duty cycle needs elapsed time > 0")
        on = self.state_us[IDLE_LISTEN] + self.state_us[RX] + self.state_us[TX]
        return on / elapsed


def energy_estimate(account: EnergyAccount) -> float:
    """Remaining over boot-time charge; mains motes report 1."""
    return account.ee()


def duty_cycle(account: EnergyAccount) -> float:
    return account.duty_cycle()


# ---------------------------------------------------------------------------
# link statistics


class LinkStats:
    """Delivery counters for one directed link plus a live smoothed ETX."""

    __slots__ = ("sent", "received", "_ewma")

    def __init__(self) -> None:
        self.sent = 0
        self.received = 0
        self._ewma: Optional[float] = None

    def record(self, delivered: bool) -> None:
        self.sent += 1
        if delivered:
            self.received += 1
        x = 1.0 if delivered else 0.0
        if self._ewma is None:
            self._ewma = x
        else:
            # incremental form keeps an all-ones stream at exactly 1.0
            self._ewma += EWMA_ALPHA * (x - self._ewma)

    def live_etx(self) -> float:
        """Routing-facing estimate; constant until enough frames observed."""
        if self.sent < LIVE_ETX_MIN_SAMPLES:
            return LIVE_ETX_DEFAULT
        if not self._ewma or self._ewma <= 1.0 / ETX_CEILING:
            return ETX_CEILING
        return min(ETX_CEILING, 1.0 / self._ewma)


def prr(link: LinkStats) -> Optional[float]:
    """Cumulative delivery fraction; None when nothing was sent yet."""
    if link.sent == 0:
        return None
    return link.received / link.sent


def etx(link: LinkStats) -> Optional[float]:
    """Cumulative expected transmissions per delivery, capped at the ceiling."""
    fraction = prr(link)
    if fraction is None:
        return None
    if fraction == 0.0:
        return ETX_CEILING
    return min(ETX_CEILING, 1.0 / fraction)


class LinkTable:
    """All directed links observed during a run."""

    def __init__(self) -> None:
        self.links: Dict[Tuple[int, int], LinkStats] = {}

    def observe(self, src: int, dst: int, delivered: bool) -> None:
        stats = self.links.get((src, dst))
        if stats is None:
            stats = self.links[(src, dst)] = LinkStats()
        stats.record(delivered)

    def live_etx(self, src: int, dst: int) -> float:
        stats = self.links.get((src, dst))
        return stats.live_etx() if stats is not None else LIVE_ETX_DEFAULT

    def rows(self) -> List[tuple]:
        """(src, dst, sent, received, prr, etx) sorted by link, for reports."""
        out = []
        for (src, dst), stats in sorted(self.links.items()):
            out.append((src, dst, stats.sent, stats.received, prr(stats), etx(stats)))
        return out
