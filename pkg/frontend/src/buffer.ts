/** Bounded FIFO ring. push evicts and returns the oldest item when full. */
export class RollingBuffer<T> {
  private items: (T | undefined)[];
  private head = 0;
  private count = 0;

  constructor(readonly capacity: number) {
    if (capacity < 1 || !Number.isInteger(capacity)) {
      throw new Error(`capacity must be a positive integer, got ${capacity}`);
    }
    this.items = new Array(capacity);
  }

  get length(): number {
    return this.count;
  }

  push(item: T): T | undefined {
    const tail = (this.head + this.count) % this.capacity;
    if (this.count < this.capacity) {
      this.items[tail] = item;
      this.count += 1;
      return undefined;
    }
    const evicted = this.items[tail];
    this.items[tail] = item;
    this.head = (this.head + 1) % this.capacity;
    return evicted;
  }

  at(index: number): T {
    if (index < 0 || index >= this.count) {
      throw new RangeError(`index ${index} out of range 0..${this.count - 1}`);
    }
    return this.items[(this.head + index) % this.capacity] as T;
  }

  /** Oldest first. */
  *[Symbol.iterator](): Iterator<T> {
    for (let i = 0; i < this.count; i++) {
      yield this.items[(this.head + i) % this.capacity] as T;
    }
  }

  clear(): void {
    this.items = new Array(this.capacity);
    this.head = 0;
    this.count = 0;
  }
}
