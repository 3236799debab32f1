/**
 * Channel plumbing between the console and the simulator. The server
 * speaks newline-delimited JSON over a local stream; a LineChannel
 * moves whole lines in both directions and the Connection turns them
 * into protocol frames. Anything that does not parse as a frame is
 * reported and dropped, the session stays up.
 */

import { Command, parseFrame, serializeCommand, ServerFrame } from './protocol.js';
import { ConnectionStatus } from './state.js';

export interface LineChannel {
  send(line: string): void;
  close(): void;
  onLine: ((line: string) => void) | null;
  onOpen: (() => void) | null;
  onClose: (() => void) | null;
}

export type ChannelFactory = () => LineChannel;

export interface ConnectionHooks {
  onFrame: (frame: ServerFrame) => void;
  onStatus?: (status: ConnectionStatus) => void;
  onInvalidLine?: (line: string) => void;
}

export class Connection {
  private channel: LineChannel | null = null;
  private currentStatus: ConnectionStatus = 'closed';

  constructor(
    private readonly factory: ChannelFactory,
    private readonly hooks: ConnectionHooks,
  ) {}

  get status(): ConnectionStatus {
    return this.currentStatus;
  }

  connect(): void {
    if (this.channel) this.channel.close();
    const channel = this.factory();
    this.channel = channel;
    this.setStatus('connecting');
    channel.onOpen = () => this.setStatus('open');
    channel.onClose = () => {
      if (this.channel === channel) {
        this.channel = null;
        this.setStatus('closed');
      }
    };
    channel.onLine = (line) => {
      const frame = parseFrame(line);
      if (frame) {
        this.hooks.onFrame(frame);
      } else if (line.trim() !== '') {
        this.hooks.onInvalidLine?.(line);
      }
    };
  }

  /** False when there is nothing connected to take the command. */
  send(cmd: Command): boolean {
    if (this.currentStatus !== 'open' || !this.channel) return false;
    this.channel.send(serializeCommand(cmd));
    return true;
  }

  close(): void {
    if (this.channel) {
      const channel = this.channel;
      this.channel = null;
      channel.close();
    }
    this.setStatus('closed');
  }

  private setStatus(status: ConnectionStatus): void {
    if (status === this.currentStatus) return;
    this.currentStatus = status;
    this.hooks.onStatus?.(status);
  }
}

/**
 * Browser transport. A WebSocket relay in front of the simulator's TCP
 * port (any line-preserving one works) carries the same one-line-JSON
 * frames; messages may batch or split lines, so buffer and re-split.
 */
export class WebSocketChannel implements LineChannel {
  onLine: ((line: string) => void) | null = null;
  onOpen: (() => void) | null = null;
  onClose: (() => void) | null = null;

  private ws: WebSocket;
  private tail = '';
  private closed = false;

  constructor(url: string) {
    this.ws = new WebSocket(url);
    this.ws.onopen = () => this.onOpen?.();
    this.ws.onclose = () => this.signalClose();
    this.ws.onerror = () => this.signalClose();
    this.ws.onmessage = (msg) => {
      if (typeof msg.data === 'string') this.feed(msg.data);
    };
  }

  send(line: string): void {
    this.ws.send(line + '\n');
  }

  close(): void {
    this.ws.close();
    this.signalClose();
  }

  private feed(data: string): void {
    this.tail += data;
    let cut;
    while ((cut = this.tail.indexOf('\n')) >= 0) {
      const line = this.tail.slice(0, cut);
      this.tail = this.tail.slice(cut + 1);
      if (line !== '') this.onLine?.(line);
    }
  }

  private signalClose(): void {
    if (this.closed) return;
    this.closed = true;
    this.onClose?.();
  }
}
