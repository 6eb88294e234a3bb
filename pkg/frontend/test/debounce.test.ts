import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { debounce } from "../src/debounce.js";

describe("debounce", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("fires once on the trailing edge with the last arguments", () => {
    const calls: string[] = [];
    const fn = debounce((x: string) => calls.push(x), 150);
    fn("a");
    vi.advanceTimersByTime(100);
    fn("b");
    vi.advanceTimersByTime(149);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(1);
    expect(calls).toEqual(["b"]);
  });

  it("cancel drops the pending call", () => {
    const calls: string[] = [];
    const fn = debounce((x: string) => calls.push(x), 150);
    fn("a");
    fn.cancel();
    vi.advanceTimersByTime(500);
    expect(calls).toEqual([]);
  });
});
