"""Run reports: delimited metric exports, graph dumps, and rendered figures.

Everything derived from the run is written next to each other in one
output directory: per-mote and per-link CSVs, a delivery summary, the
timeline and event-trace NDJSON streams, the preferred-parent graph in
DOT form, and three PNG figures (topology, per-mote timeline, energy).
The delimited outputs are byte-stable for a fixed scenario and seed.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import engine as engine_mod
from .metrics import IDLE_LISTEN, OFF, RX, TX
from .rpl import INFINITE_RANK, RANK_UNIT, Role, dodag_dot

DELIVERY_ROWS = (
    engine_mod.SENT,
    engine_mod.DELIVERED,
    engine_mod.DROP_NO_ROUTE,
    engine_mod.DROP_COLLISION,
    engine_mod.DROP_LOSS,
    engine_mod.IN_FLIGHT,
)

MOTE_COLUMNS = (
    "mote", "role", "power_source", "rank", "parent", "joined", "dead",
    "sent", "delivered", "charge_drawn_mc", "ee", "duty_cycle",
    "off_us", "idle_listen_us", "rx_us", "tx_us",
)

LINK_COLUMNS = ("src", "dst", "sent", "received", "prr", "etx")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def delivery_ratio(counters) -> float:
    sent = counters[engine_mod.SENT]
    return counters[engine_mod.DELIVERED] / sent if sent else 0.0


def mean_etx_to_root(engine) -> float:
    """Mean path cost, in ETX units, over joined non-root motes."""
    costs = [
        node.rank / RANK_UNIT
        for node in engine.nodes.values()
        if node.joined and node.role is not Role.ROOT and node.rank < INFINITE_RANK
    ]
    return sum(costs) / len(costs) if costs else 0.0


def dodag_depth(engine) -> int:
    depth = 0
    for node in engine.nodes.values():
        hops = 0
        cursor = node
        seen = set()
        while cursor.joined and cursor.preferred_parent is not None:
            if cursor.mote_id in seen:
                break
            seen.add(cursor.mote_id)
            hops += 1
            cursor = engine.nodes[cursor.preferred_parent]
        depth = max(depth, hops)
    return depth


def mote_rows(engine) -> List[list]:
    rows = []
    for spec in sorted(engine.scenario.motes, key=lambda m: m.id):
        node = engine.nodes[spec.id]
        account = engine.accounts[spec.id]
        origin = engine.origin_counters.get(spec.id, {})
        elapsed = account.elapsed_us()
        rows.append([
            spec.id,
            spec.role.value,
            spec.power_source,
            node.rank,
            node.preferred_parent,
            node.joined,
            spec.id in engine.dead_motes,
            origin.get(engine_mod.SENT, 0),
            origin.get(engine_mod.DELIVERED, 0),
            account.charge_drawn_mc,
            account.ee(),
            account.duty_cycle() if elapsed else 0.0,
            account.state_us[OFF],
            account.state_us[IDLE_LISTEN],
            account.state_us[RX],
            account.state_us[TX],
        ])
    return rows


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_reports(engine, out_dir) -> List[Path]:
    """Write all exports for a finished run; returns the created paths."""
    engine.finalize()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "motes.csv"
    _write_csv(path, MOTE_COLUMNS, mote_rows(engine))
    written.append(path)

    path = out / "links.csv"
    _write_csv(path, LINK_COLUMNS, engine.link_table.rows())
    written.append(path)

    path = out / "delivery.csv"
    rows = [[key, engine.counters[key]] for key in DELIVERY_ROWS]
    rows.append(["delivery_ratio", delivery_ratio(engine.counters)])
    _write_csv(path, ("metric", "value"), rows)
    written.append(path)

    path = out / "timeline.ndjson"
    events = sorted(engine.timeline, key=lambda ev: ev.t_us)
    with path.open("w", encoding="utf-8") as handle:
        for ev in events:
            handle.write(json.dumps(ev.to_record(), sort_keys=True, separators=(",", ":")))
            handle.write("\n")
    written.append(path)

    path = out / "trace.ndjson"
    with path.open("w", encoding="utf-8") as handle:
        for line in engine.trace_lines():
            handle.write(line)
            handle.write("\n")
    written.append(path)

    path = out / "dodag.dot"
    path.write_text(dodag_dot(engine.nodes.values()), encoding="utf-8")
    written.append(path)

    written.append(_topology_figure(engine, out / "topology.png"))
    written.append(_timeline_figure(engine, out / "timeline.png"))
    written.append(_energy_figure(engine, out / "energy.png"))
    return written


def summary_text(engine) -> str:
    sc = engine.scenario
    counters = engine.counters
    lines = [
        f"{sc.name}: {len(sc.motes)} motes, {sc.duration_s:g} s, seed {sc.seed}",
        (
            "datagrams: sent {sent} delivered {delivered} (ratio {ratio:.3f}) "
            "no-route {nr} collision {col} loss {loss} in-flight {fl}"
        ).format(
            sent=counters[engine_mod.SENT],
            delivered=counters[engine_mod.DELIVERED],
            ratio=delivery_ratio(counters),
            nr=counters[engine_mod.DROP_NO_ROUTE],
            col=counters[engine_mod.DROP_COLLISION],
            loss=counters[engine_mod.DROP_LOSS],
            fl=counters[engine_mod.IN_FLIGHT],
        ),
        f"mean ETX to root {mean_etx_to_root(engine):.3f}, dodag depth {dodag_depth(engine)}",
        "mote  role    rank  parent  duty%   charge_mC  ee",
    ]
    for row in mote_rows(engine):
        mote, role, _, rank, parent, joined, dead = row[:7]
        charge, ee, duty = row[9], row[10], row[11]
        rank_s = str(rank) if rank != INFINITE_RANK else "inf"
        parent_s = str(parent) if parent is not None else "-"
        flag = " dead" if dead else ("" if joined else " unjoined")
        lines.append(
            f"{mote:>4}  {role:<6}  {rank_s:>4}  {parent_s:>6}  "
            f"{100 * duty:5.1f}  {charge:>10.3f}  {ee:.3f}{flag}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# figures

ROLE_COLORS = {"root": "tab:green", "router": "gold", "leaf": "gold"}
STATE_COLORS = {"on": "0.7", "tx": "tab:blue", "rx": "tab:green", "interference": "tab:red"}


def _topology_figure(engine, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 6))
    for spec in engine.scenario.motes:
        x, y = engine.positions[spec.id]
        node = engine.nodes[spec.id]
        if node.joined and node.preferred_parent is not None:
            px, py = engine.positions[node.preferred_parent]
            ax.annotate(
                "", xy=(px, py), xytext=(x, y),
                arrowprops={"arrowstyle": "->", "color": "0.5", "lw": 1.2},
            )
    for spec in engine.scenario.motes:
        x, y = engine.positions[spec.id]
        ax.scatter([x], [y], s=220, c=ROLE_COLORS[spec.role.value], zorder=3, edgecolors="k")
        ax.annotate(str(spec.id), (x, y), ha="center", va="center", zorder=4, fontsize=9)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(f"{engine.scenario.name}: preferred-parent graph")
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _mote_spans(events):
    """Replay one mote's timeline into on/tx/rx spans and red ticks."""
    spans = {"on": [], "tx": [], "rx": []}
    ticks = []
    open_at = {}
    for ev in events:
        if ev.kind == "radio_on":
            open_at["on"] = ev.t_us
        elif ev.kind == "radio_off" and "on" in open_at:
            spans["on"].append((open_at.pop("on"), ev.t_us))
        elif ev.kind == "tx_start":
            open_at["tx"] = ev.t_us
        elif ev.kind == "tx_end" and "tx" in open_at:
            spans["tx"].append((open_at.pop("tx"), ev.t_us))
        elif ev.kind == "rx_start":
            open_at["rx"] = ev.t_us
        elif ev.kind == "rx_end" and "rx" in open_at:
            spans["rx"].append((open_at.pop("rx"), ev.t_us))
        elif ev.kind == "interference":
            ticks.append(ev.t_us)
    return spans, ticks


def _timeline_figure(engine, path: Path) -> Path:
    mote_ids = sorted(engine.positions)
    fig, ax = plt.subplots(figsize=(10, 0.5 * len(mote_ids) + 1.5))
    scale = 1e-6
    for row, mote_id in enumerate(mote_ids):
        events = sorted(
            (ev for ev in engine.timeline if ev.mote == mote_id), key=lambda ev: ev.t_us
        )
        spans, ticks = _mote_spans(events)
        for span_kind, height, offset in (("on", 0.8, 0.1), ("tx", 0.6, 0.2), ("rx", 0.6, 0.2)):
            bars = [
                (start * scale, (end - start) * scale) for start, end in spans[span_kind]
            ]
            if bars:
                ax.broken_barh(
                    bars, (row + offset, height), color=STATE_COLORS[span_kind], zorder=2
                )
        if ticks:
            ax.plot(
                [t * scale for t in ticks], [row + 0.5] * len(ticks),
                linestyle="none", marker="|", color=STATE_COLORS["interference"],
                markersize=12, zorder=3,
            )
    ax.set_yticks([row + 0.5 for row in range(len(mote_ids))])
    ax.set_yticklabels([str(m) for m in mote_ids])
    ax.set_xlabel("virtual time (s)")
    ax.set_ylabel("mote")
    ax.set_title("radio timeline: on (gray), tx (blue), rx (green), interference (red)")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _energy_figure(engine, path: Path) -> Path:
    mote_ids = sorted(engine.accounts)
    charge = [engine.accounts[m].charge_drawn_mc for m in mote_ids]
    ee = [engine.accounts[m].ee() for m in mote_ids]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.bar([str(m) for m in mote_ids], charge, color="tab:blue")
    ax1.set_xlabel("mote")
    ax1.set_ylabel("charge drawn (mC)")
    ax1.set_title("charge drawn")
    ax2.bar([str(m) for m in mote_ids], ee, color="tab:green")
    ax2.set_xlabel("mote")
    ax2.set_ylabel("EE (remaining / boot charge)")
    ax2.set_ylim(0, 1.05)
    ax2.set_title("energy estimate at end")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
