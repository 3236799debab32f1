// Recording stand-in for a 2D canvas context. Captures enough of every
// call to assert what was drawn where and in which color.

import { Draw2D } from '../../src/network';

export interface FilledCircle {
  x: number;
  y: number;
  r: number;
  color: string;
}

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
  color: string;
}

export interface Text {
  text: string;
  x: number;
  y: number;
  color: string;
}

export interface DrawOp {
  op: 'fillArc' | 'strokeArc' | 'fillRect' | 'strokeLine' | 'fillPath' | 'fillText';
  color: string;
  args: number[];
  text?: string;
  alpha: number;
}

interface PathPart {
  kind: 'move' | 'line' | 'arc';
  x: number;
  y: number;
  r?: number;
}

export class FakeCanvas implements Draw2D {
  fillStyle: string | CanvasGradient | CanvasPattern = '#000';
  strokeStyle: string | CanvasGradient | CanvasPattern = '#000';
  lineWidth = 1;
  globalAlpha = 1;
  font = '';
  textAlign: CanvasTextAlign = 'start';
  textBaseline: CanvasTextBaseline = 'alphabetic';

  ops: DrawOp[] = [];
  private path: PathPart[] = [];

  beginPath(): void {
    this.path = [];
  }

  moveTo(x: number, y: number): void {
    this.path.push({ kind: 'move', x, y });
  }

  lineTo(x: number, y: number): void {
    this.path.push({ kind: 'line', x, y });
  }

  arc(x: number, y: number, r: number): void {
    this.path.push({ kind: 'arc', x, y, r });
  }

  closePath(): void {}

  fill(): void {
    const arcs = this.path.filter((p) => p.kind === 'arc');
    if (arcs.length > 0) {
      for (const a of arcs) {
        this.record('fillArc', [a.x, a.y, a.r ?? 0], String(this.fillStyle));
      }
    } else {
      this.record('fillPath', this.path.flatMap((p) => [p.x, p.y]), String(this.fillStyle));
    }
  }

  stroke(): void {
    const arcs = this.path.filter((p) => p.kind === 'arc');
    for (const a of arcs) {
      this.record('strokeArc', [a.x, a.y, a.r ?? 0], String(this.strokeStyle));
    }
    const points = this.path.filter((p) => p.kind !== 'arc');
    if (points.length >= 2) {
      const first = points[0]!;
      const last = points[points.length - 1]!;
      this.record('strokeLine', [first.x, first.y, last.x, last.y], String(this.strokeStyle));
    }
  }

  fillRect(x: number, y: number, w: number, h: number): void {
    this.record('fillRect', [x, y, w, h], String(this.fillStyle));
  }

  fillText(text: string, x: number, y: number): void {
    this.ops.push({
      op: 'fillText', color: String(this.fillStyle), args: [x, y], text,
      alpha: this.globalAlpha,
    });
  }

  setLineDash(): void {}

  private record(op: DrawOp['op'], args: number[], color: string): void {
    this.ops.push({ op, color, args, alpha: this.globalAlpha });
  }

  // -- queries ----------------------------------------------------------

  filledCircles(): FilledCircle[] {
    return this.ops
      .filter((o) => o.op === 'fillArc')
      .map((o) => ({ x: o.args[0]!, y: o.args[1]!, r: o.args[2]!, color: o.color }));
  }

  rects(): Rect[] {
    return this.ops
      .filter((o) => o.op === 'fillRect')
      .map((o) => ({ x: o.args[0]!, y: o.args[1]!, w: o.args[2]!, h: o.args[3]!, color: o.color }));
  }

  texts(): Text[] {
    return this.ops
      .filter((o) => o.op === 'fillText')
      .map((o) => ({ text: o.text ?? '', x: o.args[0]!, y: o.args[1]!, color: o.color }));
  }

  clear(): void {
    this.ops = [];
  }
}
