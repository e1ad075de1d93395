import { describe, expect, it, vi } from "vitest";

import { FeedbackTracker } from "../src/feedback.js";

describe("FeedbackTracker", () => {
  it("stores successful feedback and reports the state", async () => {
    const transport = vi.fn().mockResolvedValue(undefined);
    const tracker = new FeedbackTracker(transport);
    await tracker.submit("turn-1", "up");
    expect(tracker.stateFor("turn-1")).toEqual({ rating: "up", state: "stored" });
    expect(transport).toHaveBeenCalledTimes(1);
  });

  it("duplicate submits of the same rating are idempotent", async () => {
    const transport = vi.fn().mockResolvedValue(undefined);
    const tracker = new FeedbackTracker(transport);
    await tracker.submit("turn-1", "up");
    await tracker.submit("turn-1", "up");
    expect(transport).toHaveBeenCalledTimes(1);
  });

  it("changing the rating submits again", async () => {
    const transport = vi.fn().mockResolvedValue(undefined);
    const tracker = new FeedbackTracker(transport);
    await tracker.submit("turn-1", "up");
    await tracker.submit("turn-1", "down");
    expect(transport).toHaveBeenCalledTimes(2);
    expect(tracker.stateFor("turn-1").rating).toBe("down");
  });

  it("queues while offline and flushes once the transport recovers", async () => {
    let online = false;
    const transport = vi.fn().mockImplementation(() =>
      online ? Promise.resolve() : Promise.reject(new Error("offline")));
    const tracker = new FeedbackTracker(transport);
    await tracker.submit("turn-1", "up");
    expect(tracker.stateFor("turn-1").state).toBe("pending");
    expect(tracker.pendingCount()).toBe(1);
    await tracker.flush();                       // still offline: stays queued
    expect(tracker.pendingCount()).toBe(1);
    online = true;
    await tracker.flush();
    expect(tracker.pendingCount()).toBe(0);
    expect(tracker.stateFor("turn-1").state).toBe("stored");
  });

  it("notifies the change listener for UI refreshes", async () => {
    const transport = vi.fn().mockResolvedValue(undefined);
    const tracker = new FeedbackTracker(transport);
    const seen: string[] = [];
    tracker.onChange = (turnId) => seen.push(turnId);
    await tracker.submit("turn-9", "up");
    expect(seen).toEqual(["turn-9", "turn-9"]);  // pending, then stored
  });
});
