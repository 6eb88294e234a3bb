/** End-to-end loop against a real suggestion server.
 *
 * Opt-in: start `banglanext serve` on a trained bundle and run
 *   BANGLANEXT_SERVER=http://127.0.0.1:8080 npx vitest run test/live.test.ts
 * Skipped when the variable is unset so the default suite needs no server.
 */
import { describe, expect, it } from "vitest";

import { createApi } from "../src/api.js";
import { TypingAssistant } from "../src/assistant.js";
import { isTerminator, type EditorState } from "../src/state.js";

const base = process.env.BANGLANEXT_SERVER;

describe.skipIf(!base)("live server loop", () => {
  const api = createApi(base ?? "");

  const waitForSuggestions = (assistant: TypingAssistant, timeoutMs: number) =>
    new Promise<EditorState>((resolve, reject) => {
      const started = Date.now();
      const poll = () => {
        if (assistant.state.suggestions.length > 0) return resolve(assistant.state);
        if (Date.now() - started > timeoutMs) return reject(new Error("no suggestions in time"));
        setTimeout(poll, 10);
      };
      poll();
    });

  it("suggests khai for 'ami bhat' within 500 ms of typing", async () => {
    const assistant = new TypingAssistant(api, () => {}, { debounceMs: 150 });
    const t0 = Date.now();
    assistant.handleTextChange("ami bhat");
    const state = await waitForSuggestions(assistant, 500);
    expect(Date.now() - t0).toBeLessThan(500);
    expect(state.suggestions[0].token).toBe("khai");
  });

  it("accepting a chip updates the editor and triggers a fresh round", async () => {
    const assistant = new TypingAssistant(api, () => {}, { debounceMs: 150 });
    assistant.handleTextChange("ami bhat");
    await waitForSuggestions(assistant, 2000);
    assistant.acceptSuggestion(0);
    expect(assistant.state.committed).toBe("ami bhat khai ");
    expect(assistant.state.savedKeystrokes).toBe(3);
    const next = await waitForSuggestions(assistant, 2000);
    expect(next.suggestions.length).toBeGreaterThan(0);
    expect(next.suggestions[0].token).not.toBe("khai"); // a genuinely new round
  });

  it("completes the sentence with generated tokens marked", async () => {
    const assistant = new TypingAssistant(api, () => {}, { debounceMs: 150 });
    assistant.handleTextChange("ami bhat");
    await assistant.requestCompletion();
    const completion = assistant.state.completion;
    expect(completion).not.toBeNull();
    expect(completion!.tokens).toEqual(["ami", "bhat", "khai", "।"]);
    expect(completion!.prefixLength).toBe(2);
    expect(isTerminator(completion!.tokens.at(-1)!)).toBe(true);
    const generated = completion!.tokens.slice(completion!.prefixLength);
    expect(generated).toEqual(["khai", "।"]);
  });
});
