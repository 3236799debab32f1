// Per-mote radio timeline. One row per mote: white background while the
// radio is off, a band in the server's radio_on display class while it
// is on, bursts for tx and rx runs and a tick per interference event,
// all in the display class that came with the event. The window ends at
// the latest clock and scrolls with it.

import { Draw2D, CanvasSize } from './network.js';
import { TimelineBase, ViewState } from './state.js';

export interface Burst {
  fromUs: number;
  toUs: number;
  display: string;
}

export interface Tick {
  tUs: number;
  display: string;
}

export interface RowSegments {
  mote: number;
  band: Burst[];     // radio-on stretches
  bursts: Burst[];   // tx and rx runs
  ticks: Tick[];     // instantaneous marks
}

export interface TimelineOptions {
  spanUs?: number;
  gutterPx?: number;
}

const DEFAULT_SPAN_US = 20_000_000;
const GUTTER_PX = 34;
const AXIS_PX = 16;
const ROW_GAP_PX = 2;

interface Cursor {
  on: string | null;
  onFromUs: number;
  tx: string | null;
  txFromUs: number;
  rx: string | null;
  rxFromUs: number;
}

function cursorFromBase(base: TimelineBase | undefined, startUs: number): Cursor {
  return {
    on: base ? base.on : null,
    onFromUs: startUs,
    tx: base ? base.tx : null,
    txFromUs: startUs,
    rx: base ? base.rx : null,
    rxFromUs: startUs,
  };
}

/** Cut the buffered events into window-clipped row segments, oldest first. */
export function timelineRows(state: ViewState, startUs: number, endUs: number): RowSegments[] {
  const rows = new Map<number, RowSegments>();
  const cursors = new Map<number, Cursor>();

  const rowFor = (mote: number): RowSegments => {
    let row = rows.get(mote);
    if (!row) {
      row = { mote, band: [], bursts: [], ticks: [] };
      rows.set(mote, row);
    }
    return row;
  };
  const cursorFor = (mote: number): Cursor => {
    let cursor = cursors.get(mote);
    if (!cursor) {
      cursor = cursorFromBase(state.timelineBase.get(mote), startUs);
      cursors.set(mote, cursor);
    }
    return cursor;
  };
  for (const id of state.motes.keys()) {
    rowFor(id);
    cursorFor(id);
  }

  const closeRun = (
    row: RowSegments, into: Burst[], display: string | null, fromUs: number, atUs: number,
  ): void => {
    const clippedFrom = Math.max(fromUs, startUs);
    const clippedTo = Math.min(atUs, endUs);
    if (display !== null && clippedTo >= clippedFrom && clippedTo > startUs) {
      into.push({ fromUs: clippedFrom, toUs: clippedTo, display });
    }
  };

  for (const ev of state.events) {
    // only per-mote order is guaranteed, so skip rather than stop
    if (ev.t_us > endUs) continue;
    const row = rowFor(ev.mote);
    const cursor = cursorFor(ev.mote);
    switch (ev.kind) {
      case 'radio_on':
        cursor.on = ev.display;
        cursor.onFromUs = ev.t_us;
        break;
      case 'radio_off':
        closeRun(row, row.band, cursor.on, cursor.onFromUs, ev.t_us);
        cursor.on = null;
        break;
      case 'tx_start':
        cursor.tx = ev.display;
        cursor.txFromUs = ev.t_us;
        break;
      case 'tx_end':
        closeRun(row, row.bursts, cursor.tx, cursor.txFromUs, ev.t_us);
        cursor.tx = null;
        break;
      case 'rx_start':
        cursor.rx = ev.display;
        cursor.rxFromUs = ev.t_us;
        break;
      case 'rx_end':
        closeRun(row, row.bursts, cursor.rx, cursor.rxFromUs, ev.t_us);
        cursor.rx = null;
        break;
      default:
        // instantaneous kinds, interference today
        if (ev.t_us >= startUs) row.ticks.push({ tUs: ev.t_us, display: ev.display });
        break;
    }
  }

  // whatever is still running reaches the window edge
  for (const [mote, cursor] of cursors) {
    const row = rowFor(mote);
    closeRun(row, row.band, cursor.on, cursor.onFromUs, endUs);
    closeRun(row, row.bursts, cursor.tx, cursor.txFromUs, endUs);
    closeRun(row, row.bursts, cursor.rx, cursor.rxFromUs, endUs);
  }

  return [...rows.values()].sort((a, b) => a.mote - b.mote);
}

export function timelineWindow(state: ViewState, spanUs: number): [number, number] {
  const endUs = Math.max(state.clock.nowUs, spanUs);
  return [endUs - spanUs, endUs];
}

export function renderTimeline(
  state: ViewState, ctx: Draw2D, size: CanvasSize, options: TimelineOptions = {},
): void {
  const spanUs = options.spanUs ?? DEFAULT_SPAN_US;
  const gutter = options.gutterPx ?? GUTTER_PX;
  const [startUs, endUs] = timelineWindow(state, spanUs);
  const rows = timelineRows(state, startUs, endUs);

  ctx.globalAlpha = 1;
  ctx.setLineDash([]);
  ctx.fillStyle = '#eceff1';
  ctx.fillRect(0, 0, size.width, size.height);

  if (rows.length === 0) return;

  const plotW = Math.max(size.width - gutter, 1);
  const rowH = Math.max((size.height - AXIS_PX) / rows.length, 4);
  const xOf = (tUs: number): number => gutter + ((tUs - startUs) / (endUs - startUs)) * plotW;

  rows.forEach((row, index) => {
    const top = index * rowH;
    const bandTop = top + ROW_GAP_PX;
    const bandH = rowH - 2 * ROW_GAP_PX;

    // off is white; on-band, bursts and ticks carry server colors
    ctx.fillStyle = 'white';
    ctx.fillRect(gutter, bandTop, plotW, bandH);

    for (const span of row.band) {
      ctx.fillStyle = span.display;
      ctx.fillRect(xOf(span.fromUs), bandTop, widthOf(span, xOf), bandH);
    }
    const burstTop = bandTop + bandH * 0.2;
    const burstH = bandH * 0.6;
    for (const burst of row.bursts) {
      ctx.fillStyle = burst.display;
      ctx.fillRect(xOf(burst.fromUs), burstTop, widthOf(burst, xOf), burstH);
    }
    for (const tick of row.ticks) {
      ctx.fillStyle = tick.display;
      ctx.fillRect(xOf(tick.tUs) - 1, bandTop, 2, bandH);
    }

    ctx.fillStyle = '#263238';
    ctx.font = '11px sans-serif';
    ctx.textAlign = 'right';
    ctx.textBaseline = 'middle';
    ctx.fillText(String(row.mote), gutter - 5, top + rowH / 2);
  });

  ctx.fillStyle = '#546e7a';
  ctx.font = '10px sans-serif';
  ctx.textBaseline = 'top';
  ctx.textAlign = 'left';
  ctx.fillText(`${(startUs / 1e6).toFixed(1)}s`, gutter, size.height - AXIS_PX + 3);
  ctx.textAlign = 'right';
  ctx.fillText(`${(endUs / 1e6).toFixed(1)}s`, size.width - 2, size.height - AXIS_PX + 3);
}

function widthOf(burst: Burst, xOf: (tUs: number) => number): number {
  return Math.max(xOf(burst.toUs) - xOf(burst.fromUs), 1);
}
