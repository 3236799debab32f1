// Metrics pane. Per-mote figures merged from mote_state and
// metric_update frames plus the datagram counters, and a filterable
// event log fed by ack, error and topology-change frames.

import { LogEntry, ViewState } from './state.js';
import { formatClock } from './controls.js';

export interface MetricRow {
  id: number;
  role: string;
  powerSource: string;
  rank: number;
  parent: number | null;
  joined: boolean;
  dead: boolean;
  ee: number;
  chargeMc: number | null;
}

const INFINITE_RANK = 0xffff;

export function metricsRows(state: ViewState): MetricRow[] {
  const rows: MetricRow[] = [];
  const ids = [...state.motes.keys()].sort((a, b) => a - b);
  for (const id of ids) {
    const mote = state.motes.get(id)!;
    const live = state.metrics.perMote[String(id)];
    rows.push({
      id,
      role: mote.role,
      powerSource: mote.power_source,
      rank: mote.rank,
      parent: mote.parent,
      joined: mote.joined,
      dead: live ? live.dead : mote.dead,
      ee: live ? live.ee : mote.ee,
      chargeMc: live ? live.charge_mc : null,
    });
  }
  return rows;
}

const DATAGRAM_ORDER = [
  'sent', 'delivered', 'dropped-no-route', 'dropped-collision', 'dropped-loss',
  'in-flight-at-end',
];

export function datagramSummary(state: ViewState): string {
  const counters = state.metrics.datagrams;
  const parts: string[] = [];
  for (const key of DATAGRAM_ORDER) {
    const value = counters[key];
    if (value !== undefined) parts.push(`${key} ${value}`);
  }
  for (const key of Object.keys(counters).sort()) {
    if (!DATAGRAM_ORDER.includes(key)) parts.push(`${key} ${counters[key]}`);
  }
  return parts.join('  ');
}

export interface LogFilter {
  source?: LogEntry['source'];
  mote?: number;
  contains?: string;
}

/** Oldest first; entries without a mote pass any mote filter. */
export function eventLog(state: ViewState, filter: LogFilter = {}): LogEntry[] {
  const out: LogEntry[] = [];
  for (const entry of state.log) {
    if (filter.source !== undefined && entry.source !== filter.source) continue;
    if (filter.mote !== undefined && entry.mote !== null && entry.mote !== filter.mote) continue;
    if (filter.contains !== undefined && !entry.text.includes(filter.contains)) continue;
    out.push(entry);
  }
  return out;
}

function formatRank(rank: number): string {
  return rank >= INFINITE_RANK ? 'inf' : String(rank);
}

/** Plain-text pane body, one line per row plus a short log tail. */
export function renderMetricsText(state: ViewState, logTail = 8): string[] {
  const lines: string[] = [formatClock(state)];
  const datagrams = datagramSummary(state);
  if (datagrams) lines.push(`datagrams: ${datagrams}`);

  const rows = metricsRows(state);
  if (rows.length > 0) {
    lines.push('mote  role    rank  parent  ee     charge');
    for (const row of rows) {
      const marker = row.dead ? ' dead' : (row.joined ? '' : ' searching');
      lines.push(
        String(row.id).padStart(4)
        + `  ${row.role.padEnd(6)}`
        + `  ${formatRank(row.rank).padStart(4)}`
        + `  ${String(row.parent ?? '-').padStart(6)}`
        + `  ${row.ee.toFixed(3)}`
        + `  ${row.chargeMc === null ? '-' : row.chargeMc.toFixed(1) + 'mC'}`
        + marker,
      );
    }
  }

  const filter: LogFilter = state.selected === null ? {} : { mote: state.selected };
  const entries = eventLog(state, filter);
  for (const entry of entries.slice(-logTail)) {
    lines.push(`[${(entry.tUs / 1e6).toFixed(2)}s] ${entry.source}: ${entry.text}`);
  }
  return lines;
}
