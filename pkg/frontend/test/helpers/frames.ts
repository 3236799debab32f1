// Server-frame builders so tests read like protocol transcripts.

import {
  AckPayload,
  ClockPayload,
  DodagPayload,
  ErrorPayload,
  MetricPayload,
  MoteStateEntry,
  ServerFrame,
} from '../../src/protocol';

export function mote(id: number, overrides: Partial<MoteStateEntry> = {}): MoteStateEntry {
  return {
    id,
    position: [id * 10, 0],
    role: id === 1 ? 'root' : 'router',
    power_source: 'mains',
    rank: id === 1 ? 0 : 128 * (id - 1),
    parent: id === 1 ? null : id - 1,
    joined: true,
    dead: false,
    ee: 1.0,
    ...overrides,
  };
}

export function clockFrame(tUs: number, payload: Partial<ClockPayload> = {}): ServerFrame {
  return { event: 'clock', t_us: tUs, payload: { now_us: tUs, speed: 1.0, ...payload } };
}

export function moteStateFrame(tUs: number, motes: MoteStateEntry[]): ServerFrame {
  return { event: 'mote_state', t_us: tUs, payload: { motes } };
}

export function dodagFrame(tUs: number, payload: DodagPayload): ServerFrame {
  return { event: 'dodag_update', t_us: tUs, payload };
}

export function metricFrame(tUs: number, payload: MetricPayload): ServerFrame {
  return { event: 'metric_update', t_us: tUs, payload };
}

const RADIO_DISPLAY: Record<string, string> = {
  radio_on: 'gray',
  radio_off: 'white',
  tx_start: 'blue',
  tx_end: 'blue',
  rx_start: 'green',
  rx_end: 'green',
  interference: 'red',
};

export function radioFrame(tUs: number, moteId: number, kind: string): ServerFrame {
  return {
    event: 'radio_event',
    t_us: tUs,
    payload: { t_us: tUs, mote: moteId, kind, display: RADIO_DISPLAY[kind] ?? 'black' },
  };
}

export function ackFrame(tUs: number, payload: AckPayload): ServerFrame {
  return { event: 'ack', t_us: tUs, payload };
}

export function errorFrame(tUs: number, payload: ErrorPayload): ServerFrame {
  return { event: 'error', t_us: tUs, payload };
}
