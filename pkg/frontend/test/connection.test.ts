import { describe, expect, it } from 'vitest';

import { Connection } from '../src/connection';
import { ServerFrame, startCommand } from '../src/protocol';
import { ConnectionStatus } from '../src/state';
import { ScriptedChannel } from './helpers/channels';

function makeConnection() {
  const channels: ScriptedChannel[] = [];
  const frames: ServerFrame[] = [];
  const statuses: ConnectionStatus[] = [];
  const invalid: string[] = [];
  const conn = new Connection(
    () => {
      const ch = new ScriptedChannel();
      channels.push(ch);
      return ch;
    },
    {
      onFrame: (f) => frames.push(f),
      onStatus: (s) => statuses.push(s),
      onInvalidLine: (line) => invalid.push(line),
    },
  );
  return { conn, channels, frames, statuses, invalid };
}

describe('Connection', () => {
  it('walks connecting, open, closed', () => {
    const { conn, channels, statuses } = makeConnection();
    conn.connect();
    expect(conn.status).toBe('connecting');
    channels[0]!.open();
    expect(conn.status).toBe('open');
    channels[0]!.drop();
    expect(conn.status).toBe('closed');
    expect(statuses).toEqual(['connecting', 'open', 'closed']);
  });

  it('delivers parsed frames and reports garbage without dying', () => {
    const { conn, channels, frames, invalid } = makeConnection();
    conn.connect();
    channels[0]!.open();
    channels[0]!.feed('{"event": "clock", "t_us": 3, "payload": {"now_us": 3, "speed": 1}}');
    channels[0]!.feed('garbage %%% not json');
    channels[0]!.feed('   ');
    channels[0]!.feed('{"event": "ack", "t_us": 3, "payload": {"cmd": "start"}}');
    expect(frames.map((f) => f.event)).toEqual(['clock', 'ack']);
    expect(invalid).toEqual(['garbage %%% not json']);
  });

  it('refuses to send while not open', () => {
    const { conn, channels } = makeConnection();
    expect(conn.send(startCommand())).toBe(false);
    conn.connect();
    expect(conn.send(startCommand())).toBe(false);
    channels[0]!.open();
    expect(conn.send(startCommand())).toBe(true);
    expect(channels[0]!.sentCommands()).toEqual([{ cmd: 'start' }]);
  });

  it('reconnect replaces the channel', () => {
    const { conn, channels } = makeConnection();
    conn.connect();
    channels[0]!.open();
    channels[0]!.drop();
    conn.connect();
    channels[1]!.open();
    expect(conn.status).toBe('open');
    expect(conn.send(startCommand())).toBe(true);
    expect(channels[0]!.sent).toEqual([]);
    expect(channels[1]!.sent.length).toBe(1);
  });

  it('a stale channel closing cannot knock out its replacement', () => {
    const { conn, channels } = makeConnection();
    conn.connect();
    channels[0]!.open();
    conn.connect();   // replaces before the first ever drops
    channels[1]!.open();
    channels[0]!.drop();
    expect(conn.status).toBe('open');
  });

  it('close is idempotent and final', () => {
    const { conn, channels } = makeConnection();
    conn.connect();
    channels[0]!.open();
    conn.close();
    conn.close();
    expect(conn.status).toBe('closed');
    expect(channels[0]!.closed).toBe(true);
    expect(conn.send(startCommand())).toBe(false);
  });
});
