/**
 * Top-level wiring for the operator console: one connection, one state
 * store, and the pane renderers scheduled on animation frames. Frames
 * are applied in arrival order; a render is queued at most once per
 * frame batch.
 */

import { ChannelFactory, Connection } from './connection.js';
import { ControlElements, ControlPanel, FieldLike, LabelLike, NotesPanel } from './controls.js';
import { renderMetricsText } from './metrics.js';
import { CanvasSize, Draw2D, NetworkView, renderNetwork } from './network.js';
import { Command } from './protocol.js';
import { applyFrame, createViewState, setConnection, ViewState } from './state.js';
import { renderTimeline } from './timeline.js';

export interface CanvasPane {
  ctx: Draw2D;
  getSize: () => CanvasSize;
}

export interface ConsoleOptions {
  channelFactory: ChannelFactory;
  network: CanvasPane;
  timeline?: CanvasPane & { spanUs?: number };
  controls?: ControlElements;
  notes?: FieldLike;
  metrics?: LabelLike;
  /** Render scheduler; defaults to requestAnimationFrame when present. */
  schedule?: (cb: () => void) => void;
  eventCapacity?: number;
}

export class OperatorConsole {
  readonly state: ViewState;
  readonly connection: Connection;
  readonly networkView: NetworkView;

  private readonly controlPanel: ControlPanel | null;
  private readonly schedule: (cb: () => void) => void;
  private dirty = false;

  constructor(private readonly opts: ConsoleOptions) {
    this.state = createViewState(opts.eventCapacity);
    this.schedule = opts.schedule ?? defaultSchedule;
    this.connection = new Connection(opts.channelFactory, {
      onFrame: (frame) => {
        applyFrame(this.state, frame);
        this.markDirty();
      },
      onStatus: (status) => {
        setConnection(this.state, status);
        this.markDirty();
      },
      onInvalidLine: (line) => {
        this.state.log.push({
          tUs: this.state.clock.nowUs,
          source: 'error',
          text: `unreadable server line: ${line.slice(0, 80)}`,
          mote: null,
        });
        this.markDirty();
      },
    });
    const send = (cmd: Command): boolean => this.connection.send(cmd);
    this.networkView = new NetworkView(this.state, {
      getSize: opts.network.getSize,
      send,
      onReconnect: () => this.connect(),
      markDirty: () => this.markDirty(),
    });
    this.controlPanel = opts.controls ? new ControlPanel(opts.controls, send) : null;
    if (opts.notes) new NotesPanel(opts.notes, this.state, send);
  }

  connect(): void {
    this.connection.connect();
    this.markDirty();
  }

  send(cmd: Command): boolean {
    return this.connection.send(cmd);
  }

  markDirty(): void {
    if (this.dirty) return;
    this.dirty = true;
    this.schedule(() => {
      this.dirty = false;
      this.renderAll();
    });
  }

  renderAll(): void {
    const { opts, state } = this;
    renderNetwork(state, opts.network.ctx, opts.network.getSize());
    if (opts.timeline) {
      renderTimeline(state, opts.timeline.ctx, opts.timeline.getSize(),
        { spanUs: opts.timeline.spanUs });
    }
    if (opts.metrics) opts.metrics.textContent = renderMetricsText(state).join('\n');
    this.controlPanel?.update(state);
  }
}

function defaultSchedule(cb: () => void): void {
  if (typeof requestAnimationFrame === 'function') {
    requestAnimationFrame(() => cb());
  } else {
    setTimeout(cb, 16);
  }
}
