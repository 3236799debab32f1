import { describe, expect, it } from 'vitest';

import {
  MOTE_RADIUS_PX,
  NetworkView,
  networkTransform,
  pixelToWorld,
  renderNetwork,
  worldToPixel,
} from '../src/network';
import { Command } from '../src/protocol';
import { applyFrame, createViewState, setConnection, ViewState } from '../src/state';
import { clockFrame, dodagFrame, mote, moteStateFrame, radioFrame } from './helpers/frames';
import { FakeCanvas } from './helpers/fakeCanvas';

const SIZE = { width: 400, height: 300 };

function sixMotes(): ViewState {
  const state = createViewState();
  setConnection(state, 'open');
  applyFrame(state, moteStateFrame(0, [
    mote(1, { position: [0, 0], role: 'root' }),
    mote(2, { position: [30, 0] }),
    mote(3, { position: [0, 30] }),
    mote(4, { position: [30, 30] }),
    mote(5, { position: [60, 0] }),
    mote(6, { position: [60, 30], role: 'leaf' }),
  ]));
  return state;
}

describe('coordinate mapping', () => {
  it('is a bijection between canvas and scenario space', () => {
    const state = sixMotes();
    const t = networkTransform(state, SIZE);
    for (const world of [[0, 0], [60, 30], [12.5, 7.25]] as [number, number][]) {
      const round = pixelToWorld(t, worldToPixel(t, world));
      expect(round[0]).toBeCloseTo(world[0], 9);
      expect(round[1]).toBeCloseTo(world[1], 9);
    }
  });

  it('keeps every mote inside the canvas', () => {
    const state = sixMotes();
    const t = networkTransform(state, SIZE);
    for (const m of state.motes.values()) {
      const [x, y] = worldToPixel(t, m.position);
      expect(x).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThanOrEqual(SIZE.width);
      expect(y).toBeGreaterThanOrEqual(0);
      expect(y).toBeLessThanOrEqual(SIZE.height);
    }
  });

  it('copes with a single mote', () => {
    const state = createViewState();
    setConnection(state, 'open');
    applyFrame(state, moteStateFrame(0, [mote(1, { position: [50, 50] })]));
    const t = networkTransform(state, SIZE);
    const [x, y] = worldToPixel(t, [50, 50]);
    expect(Number.isFinite(x)).toBe(true);
    expect(Number.isFinite(y)).toBe(true);
  });
});

describe('renderNetwork', () => {
  it('draws one green sink and five yellow senders', () => {
    const ctx = new FakeCanvas();
    renderNetwork(sixMotes(), ctx, SIZE);
    const markers = ctx.filledCircles().filter((c) => c.r === MOTE_RADIUS_PX);
    expect(markers.length).toBe(6);
    expect(markers.filter((c) => c.color === 'green').length).toBe(1);
    expect(markers.filter((c) => c.color === 'yellow').length).toBe(5);
  });

  it('grays out a dead mote', () => {
    const state = sixMotes();
    applyFrame(state, moteStateFrame(1, [mote(4, { position: [30, 30], dead: true })]));
    const ctx = new FakeCanvas();
    renderNetwork(state, ctx, SIZE);
    const markers = ctx.filledCircles().filter((c) => c.r === MOTE_RADIUS_PX);
    expect(markers.filter((c) => c.color === 'gray').length).toBe(1);
    expect(markers.filter((c) => c.color === 'yellow').length).toBe(4);
  });

  it('draws a line per dodag edge', () => {
    const state = sixMotes();
    applyFrame(state, dodagFrame(1, {
      edges: [[2, 1], [3, 1]],
      ranks: { '1': 0, '2': 128, '3': 128 },
    }));
    const ctx = new FakeCanvas();
    renderNetwork(state, ctx, SIZE);
    const edges = ctx.ops.filter((o) => o.op === 'strokeLine' && o.color === '#b0bec5');
    expect(edges.length).toBe(2);
  });

  it('animates a pulse between a transmitter and a receiver', () => {
    const state = sixMotes();
    applyFrame(state, clockFrame(50_000));
    applyFrame(state, radioFrame(49_000, 2, 'tx_start'));
    applyFrame(state, radioFrame(49_500, 3, 'rx_start'));
    const ctx = new FakeCanvas();
    renderNetwork(state, ctx, SIZE);

    const t = networkTransform(state, SIZE);
    const [x0, y0] = worldToPixel(t, [30, 0]);
    const [x1, y1] = worldToPixel(t, [0, 30]);
    const phase = 50_000 / 200_000;
    const dot = ctx.filledCircles().find((c) => c.r === 3 && c.color === 'blue');
    expect(dot).toBeDefined();
    expect(dot!.x).toBeCloseTo(x0 + (x1 - x0) * phase, 6);
    expect(dot!.y).toBeCloseTo(y0 + (y1 - y0) * phase, 6);

    const halos = ctx.ops.filter((o) => o.op === 'strokeArc' && o.args[2] === MOTE_RADIUS_PX + 4);
    expect(halos.some((h) => h.color === 'blue')).toBe(true);
    expect(halos.some((h) => h.color === 'green')).toBe(true);
  });

  it('shows a prompt on an empty state', () => {
    const state = createViewState();
    setConnection(state, 'open');
    const ctx = new FakeCanvas();
    renderNetwork(state, ctx, SIZE);
    expect(ctx.texts().some((t) => t.text.includes('no motes'))).toBe(true);
  });

  it('grays the canvas over and offers reconnect when the link drops', () => {
    const state = sixMotes();
    setConnection(state, 'closed');
    const ctx = new FakeCanvas();
    renderNetwork(state, ctx, SIZE);
    const overlay = ctx.rects().find(
      (r) => r.w === SIZE.width && r.h === SIZE.height && r.color === '#9e9e9e',
    );
    expect(overlay).toBeDefined();
    expect(ctx.texts().some((t) => t.text.includes('reconnect'))).toBe(true);
  });
});

describe('NetworkView pointer handling', () => {
  function makeView(state: ViewState) {
    const sent: Command[] = [];
    let reconnects = 0;
    const view = new NetworkView(state, {
      getSize: () => SIZE,
      send: (cmd) => { sent.push(cmd); },
      onReconnect: () => { reconnects += 1; },
    });
    return { view, sent, reconnects: () => reconnects };
  }

  it('drag-release emits move_mote with the drop point in scenario coordinates', () => {
    const state = sixMotes();
    const { view, sent } = makeView(state);
    const t = networkTransform(state, SIZE);
    const [px, py] = worldToPixel(t, [30, 0]);

    view.pointerDown(px, py);
    view.pointerMove(px + 30, py + 12);
    view.pointerUp(px + 30, py + 12);

    expect(sent.length).toBe(1);
    const cmd = sent[0]!;
    expect(cmd.cmd).toBe('move_mote');
    if (cmd.cmd !== 'move_mote') return;
    expect(cmd.id).toBe(2);
    const expected = pixelToWorld(t, [px + 30, py + 12]);
    expect(cmd.position[0]).toBeCloseTo(expected[0], 9);
    expect(cmd.position[1]).toBeCloseTo(expected[1], 9);
    expect(state.pending).toEqual({ id: 2, position: cmd.position });
    expect(state.drag).toBeNull();
  });

  it('previews the marker at the pointer during the drag', () => {
    const state = sixMotes();
    const { view } = makeView(state);
    const t = networkTransform(state, SIZE);
    const [px, py] = worldToPixel(t, [60, 30]);
    view.pointerDown(px, py);
    view.pointerMove(px - 40, py);
    expect(state.drag).not.toBeNull();
    expect(state.drag!.id).toBe(6);
    const preview = worldToPixel(t, state.drag!.position);
    expect(preview[0]).toBeCloseTo(px - 40, 6);
    expect(preview[1]).toBeCloseTo(py, 6);
    // the mapping ignores the preview, so mid-drag geometry stays put
    expect(networkTransform(state, SIZE)).toEqual(t);
  });

  it('a plain click only selects', () => {
    const state = sixMotes();
    const { view, sent } = makeView(state);
    const t = networkTransform(state, SIZE);
    const [px, py] = worldToPixel(t, [0, 30]);
    view.pointerDown(px + 2, py - 1);
    view.pointerUp(px + 2, py - 1);
    expect(sent.length).toBe(0);
    expect(state.selected).toBe(3);
    view.pointerDown(px + 200, py);   // empty space clears it
    expect(state.selected).toBeNull();
  });

  it('clicking a dropped connection asks to reconnect', () => {
    const state = sixMotes();
    setConnection(state, 'closed');
    const { view, sent, reconnects } = makeView(state);
    view.pointerDown(10, 10);
    expect(reconnects()).toBe(1);
    expect(sent.length).toBe(0);
  });
});
