// Browser entry point. Expects the markup in index.html and a
// line-preserving WebSocket relay in front of the simulator's TCP
// port, for example: websockify 9001 127.0.0.1:9000

import { WebSocketChannel } from './connection.js';
import { OperatorConsole } from './console.js';

interface Pane {
  canvas: HTMLCanvasElement;
  ctx: CanvasRenderingContext2D;
  getSize: () => { width: number; height: number };
}

function canvasPane(id: string): Pane {
  const canvas = document.getElementById(id) as HTMLCanvasElement | null;
  if (!canvas) throw new Error(`missing canvas #${id}`);
  const ctx = canvas.getContext('2d');
  if (!ctx) throw new Error(`canvas #${id} has no 2d context`);
  return { canvas, ctx, getSize: () => ({ width: canvas.width, height: canvas.height }) };
}

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function main(): void {
  const params = new URLSearchParams(window.location.search);
  const url = params.get('ws') ?? 'ws://127.0.0.1:9001/';

  const network = canvasPane('network');
  const timeline = canvasPane('timeline');

  const operator = new OperatorConsole({
    channelFactory: () => new WebSocketChannel(url),
    network,
    timeline,
    controls: {
      start: byId('start'),
      pause: byId('pause'),
      reload: byId('reload'),
      speed: byId('speed') as HTMLInputElement,
      clock: byId('clock'),
    },
    notes: byId('notes') as HTMLTextAreaElement,
    metrics: byId('metrics'),
  });

  const view = operator.networkView;
  const pos = (ev: MouseEvent): [number, number] => {
    const rect = network.canvas.getBoundingClientRect();
    return [ev.clientX - rect.left, ev.clientY - rect.top];
  };
  network.canvas.addEventListener('mousedown', (ev) => view.pointerDown(...pos(ev)));
  network.canvas.addEventListener('mousemove', (ev) => view.pointerMove(...pos(ev)));
  network.canvas.addEventListener('mouseup', (ev) => view.pointerUp(...pos(ev)));
  network.canvas.addEventListener('mouseleave', (ev) => view.pointerUp(...pos(ev)));

  operator.connect();
  operator.markDirty();
}

main();
