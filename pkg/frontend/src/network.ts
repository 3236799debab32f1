// Network canvas. Motes are drawn at scaled positions, the sink in
// green and the sending motes in yellow; ongoing transmissions are
// animated along the links between the radios the server reports busy.
// Dragging a marker previews locally and emits move_mote on release
// with the drop point mapped back into scenario coordinates.

import { Command, moveMoteCommand } from './protocol.js';
import { displayedPosition, selectMote, ViewState } from './state.js';

export type Draw2D = Pick<CanvasRenderingContext2D,
  | 'fillStyle' | 'strokeStyle' | 'lineWidth' | 'globalAlpha'
  | 'font' | 'textAlign' | 'textBaseline'
  | 'beginPath' | 'moveTo' | 'lineTo' | 'arc' | 'closePath'
  | 'fill' | 'stroke' | 'fillRect' | 'fillText' | 'setLineDash'>;

export interface CanvasSize {
  width: number;
  height: number;
}

export interface Transform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export const ROLE_COLORS: Record<string, string> = {
  root: 'green',
  router: 'yellow',
  leaf: 'yellow',
};

const DEAD_COLOR = 'gray';
const EDGE_COLOR = '#b0bec5';
const TX_COLOR = 'blue';
const RX_COLOR = 'green';
const LABEL_COLOR = '#263238';
const BACKGROUND = '#ffffff';

const PADDING_PX = 28;
export const MOTE_RADIUS_PX = 9;
const HIT_RADIUS_PX = 12;
const DRAG_THRESHOLD_PX = 3;
const PULSE_PERIOD_US = 200_000;

/**
 * Fit the server-reported mote positions into the canvas, preserving
 * aspect ratio. Drag previews are excluded on purpose so the mapping
 * stays put for the whole gesture.
 */
export function networkTransform(state: ViewState, size: CanvasSize): Transform {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const mote of state.motes.values()) {
    const [x, y] = mote.position;
    if (x < minX) minX = x;
    if (x > maxX) maxX = x;
    if (y < minY) minY = y;
    if (y > maxY) maxY = y;
  }
  if (minX > maxX) {
    minX = 0; minY = 0; maxX = 1; maxY = 1;
  }
  const innerW = Math.max(size.width - 2 * PADDING_PX, 1);
  const innerH = Math.max(size.height - 2 * PADDING_PX, 1);
  const spanX = Math.max(maxX - minX, 1);
  const spanY = Math.max(maxY - minY, 1);
  const scale = Math.min(innerW / spanX, innerH / spanY);
  return {
    scale,
    offsetX: PADDING_PX + (innerW - (maxX - minX) * scale) / 2 - minX * scale,
    offsetY: PADDING_PX + (innerH - (maxY - minY) * scale) / 2 - minY * scale,
  };
}

export function worldToPixel(t: Transform, pos: [number, number]): [number, number] {
  return [pos[0] * t.scale + t.offsetX, pos[1] * t.scale + t.offsetY];
}

export function pixelToWorld(t: Transform, px: [number, number]): [number, number] {
  return [(px[0] - t.offsetX) / t.scale, (px[1] - t.offsetY) / t.scale];
}

export function renderNetwork(state: ViewState, ctx: Draw2D, size: CanvasSize): void {
  ctx.globalAlpha = 1;
  ctx.setLineDash([]);
  ctx.fillStyle = BACKGROUND;
  ctx.fillRect(0, 0, size.width, size.height);

  if (state.motes.size === 0) {
    ctx.fillStyle = LABEL_COLOR;
    ctx.font = '13px sans-serif';
    ctx.textAlign = 'center';
    ctx.textBaseline = 'middle';
    ctx.fillText('no motes yet: connect to a running simulation', size.width / 2, size.height / 2);
    drawDisconnectOverlay(state, ctx, size);
    return;
  }

  const t = networkTransform(state, size);
  drawDodagEdges(state, ctx, t);
  drawTransmissions(state, ctx, t);
  drawMotes(state, ctx, t);
  drawDisconnectOverlay(state, ctx, size);
}

function drawDodagEdges(state: ViewState, ctx: Draw2D, t: Transform): void {
  ctx.strokeStyle = EDGE_COLOR;
  ctx.lineWidth = 1.5;
  for (const [child, parent] of state.dodag.edges) {
    const from = displayedPosition(state, child);
    const to = displayedPosition(state, parent);
    if (!from || !to) continue;
    const [x0, y0] = worldToPixel(t, from);
    const [x1, y1] = worldToPixel(t, to);
    ctx.beginPath();
    ctx.moveTo(x0, y0);
    ctx.lineTo(x1, y1);
    ctx.stroke();
  }
}

/**
 * Every mote the server reports mid-transmission gets a pulse toward
 * every mote currently receiving. Pairing is visual only; delivery is
 * whatever the server later says it was.
 */
function drawTransmissions(state: ViewState, ctx: Draw2D, t: Transform): void {
  const txers: number[] = [];
  const rxers: number[] = [];
  for (const [id, live] of state.radio) {
    if (live.txSinceUs !== null) txers.push(id);
    if (live.rxSinceUs !== null) rxers.push(id);
  }
  if (txers.length === 0) return;
  const phase = (state.clock.nowUs % PULSE_PERIOD_US) / PULSE_PERIOD_US;

  for (const src of txers) {
    const from = displayedPosition(state, src);
    if (!from) continue;
    const [x0, y0] = worldToPixel(t, from);
    for (const dst of rxers) {
      if (dst === src) continue;
      const to = displayedPosition(state, dst);
      if (!to) continue;
      const [x1, y1] = worldToPixel(t, to);
      ctx.strokeStyle = TX_COLOR;
      ctx.lineWidth = 1;
      ctx.globalAlpha = 0.6;
      ctx.setLineDash([4, 4]);
      ctx.beginPath();
      ctx.moveTo(x0, y0);
      ctx.lineTo(x1, y1);
      ctx.stroke();
      ctx.setLineDash([]);
      ctx.globalAlpha = 1;
      ctx.fillStyle = TX_COLOR;
      ctx.beginPath();
      ctx.arc(x0 + (x1 - x0) * phase, y0 + (y1 - y0) * phase, 3, 0, Math.PI * 2);
      ctx.fill();
    }
    // halo on the busy radios even when nobody is listening
    ctx.globalAlpha = 0.9;
    ctx.strokeStyle = TX_COLOR;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(x0, y0, MOTE_RADIUS_PX + 4, 0, Math.PI * 2);
    ctx.stroke();
    ctx.globalAlpha = 1;
  }
  for (const dst of rxers) {
    const at = displayedPosition(state, dst);
    if (!at) continue;
    const [x, y] = worldToPixel(t, at);
    ctx.globalAlpha = 0.9;
    ctx.strokeStyle = RX_COLOR;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(x, y, MOTE_RADIUS_PX + 4, 0, Math.PI * 2);
    ctx.stroke();
    ctx.globalAlpha = 1;
  }
}

function drawMotes(state: ViewState, ctx: Draw2D, t: Transform): void {
  const ids = [...state.motes.keys()].sort((a, b) => a - b);
  for (const id of ids) {
    const mote = state.motes.get(id)!;
    const pos = displayedPosition(state, id);
    if (!pos) continue;
    const [x, y] = worldToPixel(t, pos);

    ctx.fillStyle = mote.dead ? DEAD_COLOR : (ROLE_COLORS[mote.role] ?? 'yellow');
    ctx.beginPath();
    ctx.arc(x, y, MOTE_RADIUS_PX, 0, Math.PI * 2);
    ctx.fill();

    ctx.strokeStyle = LABEL_COLOR;
    ctx.lineWidth = 1;
    ctx.setLineDash(mote.joined ? [] : [3, 2]);
    ctx.beginPath();
    ctx.arc(x, y, MOTE_RADIUS_PX, 0, Math.PI * 2);
    ctx.stroke();
    ctx.setLineDash([]);

    if (state.selected === id) {
      ctx.strokeStyle = 'orange';
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(x, y, MOTE_RADIUS_PX + 5, 0, Math.PI * 2);
      ctx.stroke();
    }

    ctx.fillStyle = LABEL_COLOR;
    ctx.font = '11px sans-serif';
    ctx.textAlign = 'center';
    ctx.textBaseline = 'top';
    ctx.fillText(String(id), x, y + MOTE_RADIUS_PX + 3);
  }
}

function drawDisconnectOverlay(state: ViewState, ctx: Draw2D, size: CanvasSize): void {
  if (state.connection === 'open') return;
  ctx.globalAlpha = 0.55;
  ctx.fillStyle = '#9e9e9e';
  ctx.fillRect(0, 0, size.width, size.height);
  ctx.globalAlpha = 1;
  ctx.fillStyle = LABEL_COLOR;
  ctx.font = 'bold 14px sans-serif';
  ctx.textAlign = 'center';
  ctx.textBaseline = 'middle';
  const label = state.connection === 'connecting'
    ? 'connecting...'
    : 'disconnected: click to reconnect';
  ctx.fillText(label, size.width / 2, size.height / 2);
}

export interface NetworkViewOptions {
  getSize: () => CanvasSize;
  send: (cmd: Command) => void;
  onReconnect?: () => void;
  markDirty?: () => void;
}

interface Grab {
  id: number;
  grabDxPx: number;
  grabDyPx: number;
  startPx: [number, number];
  moved: boolean;
}

/** Pointer handling for the network canvas, in canvas pixel coordinates. */
export class NetworkView {
  private grab: Grab | null = null;

  constructor(private readonly state: ViewState, private readonly opts: NetworkViewOptions) {}

  pointerDown(px: number, py: number): void {
    const state = this.state;
    if (state.connection !== 'open') {
      if (state.connection === 'closed') this.opts.onReconnect?.();
      return;
    }
    const hit = this.hitTest(px, py);
    if (hit === null) {
      selectMote(state, null);
      this.opts.markDirty?.();
      return;
    }
    selectMote(state, hit);
    const t = networkTransform(state, this.opts.getSize());
    const pos = displayedPosition(state, hit)!;
    const [mx, my] = worldToPixel(t, pos);
    this.grab = { id: hit, grabDxPx: px - mx, grabDyPx: py - my, startPx: [px, py], moved: false };
    this.opts.markDirty?.();
  }

  pointerMove(px: number, py: number): void {
    const grab = this.grab;
    if (!grab) return;
    if (Math.hypot(px - grab.startPx[0], py - grab.startPx[1]) > DRAG_THRESHOLD_PX) {
      grab.moved = true;
    }
    if (!grab.moved) return;
    this.state.drag = { id: grab.id, position: this.dropPosition(grab, px, py) };
    this.opts.markDirty?.();
  }

  pointerUp(px: number, py: number): void {
    const grab = this.grab;
    this.grab = null;
    if (!grab) return;
    this.state.drag = null;
    if (!grab.moved) {
      this.opts.markDirty?.();
      return;   // plain click, selection already done
    }
    const position = this.dropPosition(grab, px, py);
    this.state.pending = { id: grab.id, position };
    this.opts.send(moveMoteCommand(grab.id, position));
    this.opts.markDirty?.();
  }

  /** Nearest marker within reach, or null. */
  hitTest(px: number, py: number): number | null {
    const t = networkTransform(this.state, this.opts.getSize());
    let best: number | null = null;
    let bestDist = HIT_RADIUS_PX;
    for (const id of this.state.motes.keys()) {
      const pos = displayedPosition(this.state, id);
      if (!pos) continue;
      const [x, y] = worldToPixel(t, pos);
      const dist = Math.hypot(px - x, py - y);
      if (dist <= bestDist) {
        best = id;
        bestDist = dist;
      }
    }
    return best;
  }

  private dropPosition(grab: Grab, px: number, py: number): [number, number] {
    const t = networkTransform(this.state, this.opts.getSize());
    return pixelToWorld(t, [px - grab.grabDxPx, py - grab.grabDyPx]);
  }
}
