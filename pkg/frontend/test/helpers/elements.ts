// Minimal stand-ins for the DOM elements the panels bind to.

export class FakeButton {
  private handlers: (() => void)[] = [];

  addEventListener(_type: 'click', listener: () => void): void {
    this.handlers.push(listener);
  }

  click(): void {
    for (const h of this.handlers) h();
  }
}

export class FakeField {
  value = '';
  private handlers = new Map<string, (() => void)[]>();

  addEventListener(type: string, listener: () => void): void {
    const list = this.handlers.get(type) ?? [];
    list.push(listener);
    this.handlers.set(type, list);
  }

  fire(type: string): void {
    for (const h of this.handlers.get(type) ?? []) h();
  }
}

export class FakeLabel {
  textContent: string | null = null;
}
