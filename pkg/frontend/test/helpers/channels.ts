// Scriptable LineChannel for tests: push server lines in, capture
// client lines out.

import { LineChannel } from '../../src/connection';

export class ScriptedChannel implements LineChannel {
  onLine: ((line: string) => void) | null = null;
  onOpen: (() => void) | null = null;
  onClose: (() => void) | null = null;

  sent: string[] = [];
  closed = false;

  send(line: string): void {
    this.sent.push(line);
  }

  close(): void {
    this.closed = true;
  }

  open(): void {
    this.onOpen?.();
  }

  feed(line: string): void {
    this.onLine?.(line);
  }

  feedAll(lines: Iterable<string>): void {
    for (const line of lines) this.feed(line);
  }

  drop(): void {
    this.onClose?.();
  }

  /** Commands the console sent, parsed. */
  sentCommands(): unknown[] {
    return this.sent.map((line) => JSON.parse(line));
  }
}
