import { describe, expect, it } from 'vitest';

import { ControlPanel, formatClock, NotesPanel } from '../src/controls';
import { Command, serializeCommand } from '../src/protocol';
import { applyFrame, createViewState } from '../src/state';
import { FakeButton, FakeField } from './helpers/elements';
import { ackFrame, clockFrame } from './helpers/frames';

function makePanel() {
  const els = {
    start: new FakeButton(),
    pause: new FakeButton(),
    reload: new FakeButton(),
    speed: new FakeField(),
    clock: { textContent: null as string | null },
  };
  const sent: string[] = [];
  const panel = new ControlPanel(els, (cmd: Command) => { sent.push(serializeCommand(cmd)); });
  return { els, sent, panel };
}

describe('ControlPanel', () => {
  it('buttons emit exactly the documented command frames', () => {
    const { els, sent } = makePanel();
    els.start.click();
    els.pause.click();
    els.reload.click();
    els.speed.value = '10';
    els.speed.fire('change');
    expect(sent.map((line) => JSON.parse(line))).toEqual([
      { cmd: 'start' },
      { cmd: 'pause' },
      { cmd: 'reload' },
      { cmd: 'set_speed', factor: 10 },
    ]);
  });

  it('swallows speeds the server would reject', () => {
    const { els, sent } = makePanel();
    for (const bad of ['0', '-2', 'abc', '']) {
      els.speed.value = bad;
      els.speed.fire('change');
    }
    expect(sent).toEqual([]);
  });

  it('the clock label shows the last server clock', () => {
    const { els, panel } = makePanel();
    const state = createViewState();
    applyFrame(state, clockFrame(2_500_000, { speed: 8, running: true }));
    panel.update(state);
    expect(els.clock.textContent).toBe('2.50s at 8x, running');
    // no further clock frames: the display stays frozen
    applyFrame(state, ackFrame(2_500_000, { cmd: 'pause' }));
    panel.update(state);
    expect(els.clock.textContent).toBe('2.50s at 8x, paused');
  });
});

describe('formatClock', () => {
  it('covers the lifecycle', () => {
    const state = createViewState();
    expect(formatClock(state)).toBe('0.00s at 1x, not started');
    applyFrame(state, clockFrame(500_000, { running: true }));
    expect(formatClock(state)).toBe('0.50s at 1x, running');
    applyFrame(state, clockFrame(30_000_000, { finished: true }));
    expect(formatClock(state)).toBe('30.00s at 1x, finished');
  });
});

describe('NotesPanel', () => {
  it('keeps the draft in state and saves on blur', () => {
    const field = new FakeField();
    const state = createViewState();
    const sent: string[] = [];
    new NotesPanel(field, state, (cmd) => { sent.push(serializeCommand(cmd)); });

    field.value = 'the sink drains mote 2 first';
    field.fire('input');
    expect(state.note).toBe('the sink drains mote 2 first');
    expect(sent).toEqual([]);

    field.fire('blur');
    expect(sent.map((line) => JSON.parse(line))).toEqual([
      { cmd: 'save_note', text: 'the sink drains mote 2 first' },
    ]);
  });
});
