// Feedback submission with fire-and-forget retry.
//
// Duplicate submissions of the same rating are idempotent in the UI; a
// failed POST is queued and retried, and the pending state is observable
// so the UI can show a queued indicator.

import { postFeedback } from "./api.js";
import { FeedbackRequest } from "./types.js";

export type FeedbackState = "none" | "pending" | "stored";

type Transport = (request: FeedbackRequest) => Promise<void>;

export class FeedbackTracker {
  private states = new Map<string, { rating: "up" | "down"; state: FeedbackState }>();
  private queue: FeedbackRequest[] = [];
  private transport: Transport;
  onChange: (turnId: string) => void = () => {};

  constructor(transport: Transport = postFeedback) {
    this.transport = transport;
  }

  stateFor(turnId: string): { rating: "up" | "down" | null; state: FeedbackState } {
    const entry = this.states.get(turnId);
    return entry ? { rating: entry.rating, state: entry.state } : { rating: null, state: "none" };
  }

  pendingCount(): number {
    return this.queue.length;
  }

  async submit(turnId: string, rating: "up" | "down", comment?: string): Promise<void> {
    const existing = this.states.get(turnId);
    if (existing && existing.rating === rating && existing.state === "stored") {
      return; // already stored: duplicate clicks change nothing
    }
    this.states.set(turnId, { rating, state: "pending" });
    this.onChange(turnId);
    const request: FeedbackRequest = { turn_id: turnId, rating, comment };
    try {
      await this.transport(request);
      this.states.set(turnId, { rating, state: "stored" });
    } catch {
      this.queue.push(request);
    }
    this.onChange(turnId);
  }

  /** Retry everything queued; keeps still-failing entries queued. */
  async flush(): Promise<void> {
    const pending = this.queue;
    this.queue = [];
    for (const request of pending) {
      try {
        await this.transport(request);
        this.states.set(request.turn_id, { rating: request.rating, state: "stored" });
      } catch {
        this.queue.push(request);
      }
      this.onChange(request.turn_id);
    }
  }
}
