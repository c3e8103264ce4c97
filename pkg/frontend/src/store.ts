/** In-memory prompt queue fed by the live event stream.
 *
 * The stream has no replay, so the canonical refill is a pending-list
 * fetch on every (re)connect; events only keep the copy fresh between
 * fetches. Subscribers get one callback per net change.
 */

import type { PendingItem, ResolvedEvent } from "./types.js";

export class PromptQueue {
  private items = new Map<string, PendingItem>();
  private listeners = new Set<() => void>();

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Oldest first, same order the pending endpoint returns. */
  list(): PendingItem[] {
    return [...this.items.values()].sort((a, b) =>
      a.createdAt < b.createdAt ? -1 : a.createdAt > b.createdAt ? 1 : 0,
    );
  }

  get(id: string): PendingItem | undefined {
    return this.items.get(id);
  }

  get size(): number {
    return this.items.size;
  }

  replaceAll(items: PendingItem[]): void {
    this.items = new Map(items.map((item) => [item.id, item]));
    this.notify();
  }

  upsert(item: PendingItem): void {
    this.items.set(item.id, item);
    this.notify();
  }

  applyResolved(event: ResolvedEvent): void {
    if (this.items.delete(event.id)) this.notify();
  }
}
