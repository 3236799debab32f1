// View state and the frame reducer. Rendering is a pure function of
// ViewState; this module is the only thing that mutates it. The server
// stays authoritative: a drag is previewed locally, sent as move_mote,
// then reconciled when the ack or the mote_state echo lands.

import { RollingBuffer } from './buffer.js';
import {
  MetricPayload,
  MoteMetrics,
  MoteStateEntry,
  RadioEventPayload,
  ServerFrame,
  StateSnapshot,
} from './protocol.js';

export type ConnectionStatus = 'connecting' | 'open' | 'closed';

export interface ClockState {
  nowUs: number;
  speed: number;
  running: boolean | null;   // null until the server has said either way
  finished: boolean;
}

/**
 * Band state a mote was left in by events already evicted from the
 * buffer. Each field holds the server's display class while the band is
 * active and null while it is not, so colors survive eviction verbatim.
 */
export interface TimelineBase {
  asOfUs: number;
  on: string | null;
  tx: string | null;
  rx: string | null;
}

/** Live radio occupancy, drives the transmission animation. */
export interface RadioActivity {
  on: boolean;
  txSinceUs: number | null;
  rxSinceUs: number | null;
}

export interface LogEntry {
  tUs: number;
  source: 'ack' | 'error' | 'dodag';
  text: string;
  mote: number | null;
}

export interface PendingMove {
  id: number;
  position: [number, number];
}

export interface ViewState {
  connection: ConnectionStatus;
  motes: Map<number, MoteStateEntry>;
  dodag: { edges: [number, number][]; ranks: Record<string, number> };
  events: RollingBuffer<RadioEventPayload>;
  timelineBase: Map<number, TimelineBase>;
  radio: Map<number, RadioActivity>;
  clock: ClockState;
  metrics: { perMote: Record<string, MoteMetrics>; datagrams: Record<string, number> };
  log: RollingBuffer<LogEntry>;
  selected: number | null;
  note: string;
  drag: PendingMove | null;      // pointer is still down
  pending: PendingMove | null;   // released and sent, not yet confirmed
}

export const DEFAULT_EVENT_CAPACITY = 100_000;
const LOG_CAPACITY = 1_000;

export function createViewState(eventCapacity: number = DEFAULT_EVENT_CAPACITY): ViewState {
  return {
    connection: 'connecting',
    motes: new Map(),
    dodag: { edges: [], ranks: {} },
    events: new RollingBuffer(eventCapacity),
    timelineBase: new Map(),
    radio: new Map(),
    clock: { nowUs: 0, speed: 1.0, running: null, finished: false },
    metrics: { perMote: {}, datagrams: {} },
    log: new RollingBuffer(LOG_CAPACITY),
    selected: null,
    note: '',
    drag: null,
    pending: null,
  };
}

export function setConnection(state: ViewState, status: ConnectionStatus): void {
  state.connection = status;
  if (status !== 'open') {
    state.drag = null;
    state.pending = null;
  }
}

export function selectMote(state: ViewState, id: number | null): void {
  state.selected = id;
}

export function setNote(state: ViewState, text: string): void {
  state.note = text;
}

export function applyFrame(state: ViewState, frame: ServerFrame): void {
  switch (frame.event) {
    case 'clock': {
      const p = frame.payload;
      if (p.now_us < state.clock.nowUs) {
        // time went backwards: the session was reloaded
        resetRun(state);
      }
      state.clock.nowUs = p.now_us;
      state.clock.speed = p.speed;
      if (p.running !== undefined) state.clock.running = p.running;
      if (p.finished) {
        state.clock.finished = true;
        state.clock.running = false;
      }
      break;
    }
    case 'mote_state': {
      // may carry a single mote (position echo, state change) or all of them
      for (const entry of frame.payload.motes) {
        state.motes.set(entry.id, entry);
        const pending = state.pending;
        if (pending && pending.id === entry.id
            && entry.position[0] === pending.position[0]
            && entry.position[1] === pending.position[1]) {
          state.pending = null;   // the move came back to us
        }
      }
      break;
    }
    case 'dodag_update': {
      state.dodag = { edges: frame.payload.edges, ranks: frame.payload.ranks };
      const change = frame.payload.change;
      if (change) {
        const mote = typeof change.mote === 'number' ? change.mote : null;
        pushLog(state, frame.t_us, 'dodag', describeChange(change), mote);
      }
      break;
    }
    case 'radio_event': {
      recordRadioEvent(state, frame.payload);
      break;
    }
    case 'metric_update': {
      applyMetrics(state, frame.payload);
      break;
    }
    case 'ack': {
      const p = frame.payload;
      if (p.cmd === 'start') state.clock.running = true;
      if (p.cmd === 'pause') state.clock.running = false;
      if (p.cmd === 'reload') {
        resetRun(state);
        state.clock.nowUs = 0;
        state.clock.running = false;
      }
      if (p.cmd === 'move_mote' && state.pending) {
        const mote = state.motes.get(state.pending.id);
        if (mote) mote.position = state.pending.position;
        state.pending = null;
      }
      if (p.state) applySnapshot(state, p.state);
      const extra = p.bytes !== undefined ? ` (${p.bytes} bytes)` : '';
      pushLog(state, frame.t_us, 'ack', `${p.cmd}${extra}`, null);
      break;
    }
    case 'error': {
      const p = frame.payload;
      if (p.cmd === 'move_mote') state.pending = null;   // snap back
      const prefix = p.cmd ? `${p.cmd}: ` : '';
      pushLog(state, frame.t_us, 'error', `${prefix}${p.message}`, null);
      break;
    }
  }
}

function applySnapshot(state: ViewState, snap: StateSnapshot): void {
  state.clock.nowUs = snap.t_us;
  state.clock.speed = snap.speed;
  state.clock.running = snap.running;
  state.motes.clear();
  for (const entry of snap.motes) state.motes.set(entry.id, entry);
  state.dodag = { edges: snap.dodag.edges, ranks: snap.dodag.ranks };
  state.metrics.datagrams = snap.datagrams;
}

function applyMetrics(state: ViewState, payload: MetricPayload): void {
  state.metrics = { perMote: payload.motes, datagrams: payload.datagrams };
}

function recordRadioEvent(state: ViewState, ev: RadioEventPayload): void {
  const evicted = state.events.push(ev);
  if (evicted) foldIntoBase(state, evicted);

  let live = state.radio.get(ev.mote);
  if (!live) {
    live = { on: false, txSinceUs: null, rxSinceUs: null };
    state.radio.set(ev.mote, live);
  }
  switch (ev.kind) {
    case 'radio_on': live.on = true; break;
    case 'radio_off': live.on = false; live.txSinceUs = null; live.rxSinceUs = null; break;
    case 'tx_start': live.txSinceUs = ev.t_us; break;
    case 'tx_end': live.txSinceUs = null; break;
    case 'rx_start': live.rxSinceUs = ev.t_us; break;
    case 'rx_end': live.rxSinceUs = null; break;
  }
}

function foldIntoBase(state: ViewState, ev: RadioEventPayload): void {
  let base = state.timelineBase.get(ev.mote);
  if (!base) {
    base = { asOfUs: 0, on: null, tx: null, rx: null };
    state.timelineBase.set(ev.mote, base);
  }
  base.asOfUs = ev.t_us;
  switch (ev.kind) {
    case 'radio_on': base.on = ev.display; break;
    case 'radio_off': base.on = null; break;
    case 'tx_start': base.tx = ev.display; break;
    case 'tx_end': base.tx = null; break;
    case 'rx_start': base.rx = ev.display; break;
    case 'rx_end': base.rx = null; break;
  }
}

/** Forget everything tied to the finished or replaced run. */
function resetRun(state: ViewState): void {
  state.events.clear();
  state.timelineBase.clear();
  state.radio.clear();
  state.metrics = { perMote: {}, datagrams: {} };
  state.drag = null;
  state.pending = null;
  state.clock.finished = false;
}

function pushLog(
  state: ViewState, tUs: number, source: LogEntry['source'], text: string,
  mote: number | null,
): void {
  state.log.push({ tUs, source, text, mote });
}

function describeChange(change: Record<string, unknown>): string {
  const parts: string[] = [];
  for (const [key, value] of Object.entries(change)) {
    if (key === 'mote') continue;
    parts.push(key === 'state' ? String(value) : `${key}=${value}`);
  }
  return parts.join(' ');
}

/** Mote position as drawn: live drag wins, then an unconfirmed move. */
export function displayedPosition(state: ViewState, id: number): [number, number] | null {
  if (state.drag && state.drag.id === id) return state.drag.position;
  if (state.pending && state.pending.id === id) return state.pending.position;
  const mote = state.motes.get(id);
  return mote ? mote.position : null;
}
