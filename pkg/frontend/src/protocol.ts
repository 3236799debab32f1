// Wire types for the llnsim live control protocol. One JSON object per
// line in both directions; the server wraps every event as
// {event, t_us, payload} and never sends anything else.

export type MoteRole = 'root' | 'router' | 'leaf';

export interface MoteStateEntry {
  id: number;
  position: [number, number];
  role: MoteRole;
  power_source: string;
  rank: number;
  parent: number | null;
  joined: boolean;
  dead: boolean;
  ee: number;
}

export interface ClockPayload {
  now_us: number;
  speed: number;
  running?: boolean;
  finished?: boolean;
}

export interface MoteStatePayload {
  motes: MoteStateEntry[];
}

export interface DodagPayload {
  edges: [number, number][];
  ranks: Record<string, number>;
  change?: Record<string, unknown>;
}

export interface MoteMetrics {
  ee: number;
  charge_mc: number;
  dead: boolean;
}

export interface MetricPayload {
  motes: Record<string, MoteMetrics>;
  datagrams: Record<string, number>;
}

// kind is one of radio_on/radio_off/tx_start/tx_end/rx_start/rx_end/
// interference; display carries the server-assigned color class verbatim.
export interface RadioEventPayload {
  t_us: number;
  mote: number;
  kind: string;
  display: string;
}

export interface AckPayload {
  cmd: string;
  state?: StateSnapshot;
  bytes?: number;
}

export interface ErrorPayload {
  message: string;
  cmd?: string;
}

// get_state acks carry the full engine snapshot.
export interface StateSnapshot {
  t_us: number;
  running: boolean;
  speed: number;
  duration_us: number;
  name: string;
  motes: MoteStateEntry[];
  dodag: DodagPayload;
  datagrams: Record<string, number>;
}

export type ServerFrame =
  | { event: 'clock'; t_us: number; payload: ClockPayload }
  | { event: 'mote_state'; t_us: number; payload: MoteStatePayload }
  | { event: 'dodag_update'; t_us: number; payload: DodagPayload }
  | { event: 'metric_update'; t_us: number; payload: MetricPayload }
  | { event: 'radio_event'; t_us: number; payload: RadioEventPayload }
  | { event: 'ack'; t_us: number; payload: AckPayload }
  | { event: 'error'; t_us: number; payload: ErrorPayload };

export type ServerEventName = ServerFrame['event'];

const EVENT_NAMES: ReadonlySet<string> = new Set([
  'clock', 'mote_state', 'dodag_update', 'metric_update',
  'radio_event', 'ack', 'error',
]);

export type Command =
  | { cmd: 'start' }
  | { cmd: 'pause' }
  | { cmd: 'reload' }
  | { cmd: 'set_speed'; factor: number }
  | { cmd: 'move_mote'; id: number; position: [number, number] }
  | { cmd: 'inject_failure'; mote?: number; link?: [number, number] }
  | { cmd: 'get_state' }
  | { cmd: 'save_note'; text: string };

export function startCommand(): Command {
  return { cmd: 'start' };
}

export function pauseCommand(): Command {
  return { cmd: 'pause' };
}

export function reloadCommand(): Command {
  return { cmd: 'reload' };
}

export function setSpeedCommand(factor: number): Command {
  return { cmd: 'set_speed', factor };
}

export function moveMoteCommand(id: number, position: [number, number]): Command {
  return { cmd: 'move_mote', id, position };
}

export function getStateCommand(): Command {
  return { cmd: 'get_state' };
}

export function saveNoteCommand(text: string): Command {
  return { cmd: 'save_note', text };
}

export function serializeCommand(cmd: Command): string {
  return JSON.stringify(cmd);
}

/** Parse one server line; null for anything that is not a protocol frame. */
export function parseFrame(line: string): ServerFrame | null {
  let value: unknown;
  try {
    value = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof value !== 'object' || value === null) return null;
  const frame = value as { event?: unknown; t_us?: unknown; payload?: unknown };
  if (typeof frame.event !== 'string' || !EVENT_NAMES.has(frame.event)) return null;
  if (typeof frame.t_us !== 'number') return null;
  if (typeof frame.payload !== 'object' || frame.payload === null) return null;
  return value as ServerFrame;
}
