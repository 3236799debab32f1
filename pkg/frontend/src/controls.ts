// Simulation control panel and notes pane. Buttons map one-to-one onto
// protocol commands. The clock label shows the last clock frame the
// server sent, so pausing freezes the display by itself.

import {
  Command,
  pauseCommand,
  reloadCommand,
  saveNoteCommand,
  setSpeedCommand,
  startCommand,
} from './protocol.js';
import { setNote, ViewState } from './state.js';

export interface ClickableLike {
  addEventListener(type: 'click', listener: () => void): void;
}

export interface FieldLike {
  value: string;
  addEventListener(type: string, listener: () => void): void;
}

export interface LabelLike {
  textContent: string | null;
}

export interface ControlElements {
  start: ClickableLike;
  pause: ClickableLike;
  reload: ClickableLike;
  speed: FieldLike;
  clock?: LabelLike;
}

export class ControlPanel {
  constructor(
    private readonly els: ControlElements,
    send: (cmd: Command) => void,
  ) {
    els.start.addEventListener('click', () => send(startCommand()));
    els.pause.addEventListener('click', () => send(pauseCommand()));
    els.reload.addEventListener('click', () => send(reloadCommand()));
    els.speed.addEventListener('change', () => {
      const factor = Number(els.speed.value);
      // the server would reject these anyway, save the round trip
      if (Number.isFinite(factor) && factor > 0) send(setSpeedCommand(factor));
    });
  }

  update(state: ViewState): void {
    if (this.els.clock) this.els.clock.textContent = formatClock(state);
  }
}

export function formatClock(state: ViewState): string {
  const seconds = (state.clock.nowUs / 1e6).toFixed(2);
  const speed = `${state.clock.speed}x`;
  let status = 'not started';
  if (state.clock.finished) status = 'finished';
  else if (state.clock.running === true) status = 'running';
  else if (state.clock.running === false) status = 'paused';
  return `${seconds}s at ${speed}, ${status}`;
}

/** Keeps the draft in view state; persists server-side when focus leaves. */
export class NotesPanel {
  constructor(field: FieldLike, state: ViewState, send: (cmd: Command) => void) {
    field.addEventListener('input', () => setNote(state, field.value));
    field.addEventListener('blur', () => {
      setNote(state, field.value);
      send(saveNoteCommand(field.value));
    });
  }
}
