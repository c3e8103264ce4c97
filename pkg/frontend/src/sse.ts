/** Live event subscription over server-sent events.
 *
 * The stream never replays missed events, so the contract with callers
 * is: onConnect fires on every successful (re)connect and the caller
 * refetches the pending list there. Reconnects back off exponentially
 * to a cap instead of hammering a proxy that just went away.
 */

import type { PendingItem, ResolvedEvent } from "./types.js";

export type LiveState = "connecting" | "open" | "retrying";

export interface EventSourceLike {
  addEventListener(type: string, listener: (ev: { data: string }) => void): void;
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export interface LiveHandlers {
  onConnect(): void;
  onPending(item: PendingItem): void;
  onResolved(event: ResolvedEvent): void;
  onStateChange?(state: LiveState): void;
}

export interface LiveOptions {
  factory?: EventSourceFactory;
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (id: unknown) => void;
  maxDelayMs?: number;
}

export interface LiveHandle {
  close(): void;
  state(): LiveState;
}

function parse<T>(data: string): T | null {
  try {
    return JSON.parse(data) as T;
  } catch {
    return null; // malformed frame: drop it, the next fetch reconciles
  }
}

export function subscribeLive(
  url: string,
  handlers: LiveHandlers,
  options: LiveOptions = {},
): LiveHandle {
  const factory: EventSourceFactory =
    options.factory ?? ((u) => new EventSource(u) as unknown as EventSourceLike);
  const setTimer = options.setTimer ?? ((fn: () => void, ms: number) => setTimeout(fn, ms));
  const clearTimer = options.clearTimer ?? ((id: unknown) => clearTimeout(id as number));
  const maxDelayMs = options.maxDelayMs ?? 30_000;

  let source: EventSourceLike | null = null;
  let timer: unknown = null;
  let closed = false;
  let attempt = 0;
  let state: LiveState = "connecting";

  const setState = (next: LiveState): void => {
    state = next;
    handlers.onStateChange?.(next);
  };

  const connect = (): void => {
    if (closed) return;
    source = factory(url);
    source.addEventListener("open", () => {
      if (closed) return;
      attempt = 0;
      setState("open");
      handlers.onConnect();
    });
    source.addEventListener("pending", (ev) => {
      const item = parse<PendingItem>(ev.data);
      if (item) handlers.onPending(item);
    });
    source.addEventListener("resolved", (ev) => {
      const event = parse<ResolvedEvent>(ev.data);
      if (event) handlers.onResolved(event);
    });
    source.addEventListener("error", () => {
      if (closed) return;
      source?.close();
      source = null;
      const delay = Math.min(maxDelayMs, 1000 * 2 ** attempt);
      attempt += 1;
      setState("retrying");
      timer = setTimer(connect, delay);
    });
  };

  connect();
  return {
    close(): void {
      closed = true;
      if (timer !== null) clearTimer(timer);
      source?.close();
    },
    state: () => state,
  };
}
