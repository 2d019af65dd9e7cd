/** Client-side cursor over one round's queue.
 *
 * The server is the arbiter: on a submit conflict (409) the item is
 * dropped locally and the cursor moves on without touching anything
 * else, so a duplicate-submit race cannot corrupt local state.
 */

import type { QueueItem } from "./types.js";

export class QueueCursor {
  private items: QueueItem[];

  constructor(items: QueueItem[]) {
    this.items = [...items];
  }

  current(): QueueItem | null {
    return this.items.length > 0 ? this.items[0] : null;
  }

  remaining(): number {
    return this.items.length;
  }

  /** Drop the current item after a successful submit. */
  advance(): void {
    this.items.shift();
  }

  /** Drop a specific item (conflict path); no-op if already gone. */
  skip(sampleId: number): void {
    this.items = this.items.filter((item) => item.sample_id !== sampleId);
  }

  ids(): number[] {
    return this.items.map((item) => item.sample_id);
  }
}
