/** Controller tying the editor state to the suggestion server.
 *
 * Typing is debounced (150 ms by default) before a suggest request goes out;
 * accepting a chip refetches immediately. Responses that answer anything but
 * the newest request are dropped, so the editor is never blocked and chips
 * never show answers for text the user already changed.
 */

import type { Engine, SuggestApi } from "./api.js";
import { debounce } from "./debounce.js";
import * as model from "./state.js";

export interface AssistantOptions {
  engine?: Engine;
  k?: number;
  debounceMs?: number;
  /** complete() length cap forwarded to the server. */
  maxLen?: number;
}

export class TypingAssistant {
  private current: model.EditorState;
  private readonly debouncedFetch: ((text: string) => void) & { cancel: () => void };
  private readonly maxLen?: number;

  constructor(
    private readonly api: SuggestApi,
    private readonly onRender: (state: model.EditorState) => void,
    options: AssistantOptions = {},
  ) {
    this.current = model.initialState(options.engine ?? "neural", options.k ?? 5);
    this.maxLen = options.maxLen;
    this.debouncedFetch = debounce(
      (text: string) => this.fetchSuggestions(text),
      options.debounceMs ?? 150,
    );
  }

  get state(): model.EditorState {
    return this.current;
  }

  /** Editor content changed (user keystroke or programmatic set). */
  handleTextChange(text: string): void {
    this.apply(model.textChanged(this.current, text));
    if (text.trim() === "") {
      this.debouncedFetch.cancel();
      return;
    }
    this.debouncedFetch(text);
  }

  /** Accept a visible chip: insert it and immediately start the next round. */
  acceptSuggestion(index: number): void {
    const before = this.current;
    const after = model.suggestionAccepted(before, index);
    if (after === before) return;
    this.apply(after);
    this.debouncedFetch.cancel();
    this.fetchSuggestions(after.committed);
  }

  /** Ask the server to finish the current sentence. */
  async requestCompletion(): Promise<void> {
    const prefix = this.current.committed;
    if (prefix.trim() === "") return;
    const prefixLength = prefix.trim().split(/\s+/).length;
    this.apply(model.requestIssued(this.current));
    const seq = this.current.requestSeq;
    try {
      const resp = await this.api.complete(prefix, this.current.engine, this.maxLen);
      this.apply(
        model.completionArrived(
          this.current, seq, resp.tokens, prefixLength, resp.terminated_by, resp.steps,
        ),
      );
    } catch (err) {
      this.apply(model.requestFailed(this.current, seq, describe(err)));
    }
  }

  setEngine(engine: Engine): void {
    this.current = { ...this.current, engine };
    this.handleTextChange(this.current.committed);
  }

  private async fetchSuggestions(text: string): Promise<void> {
    if (text !== this.current.committed || text.trim() === "") return;
    this.apply(model.requestIssued(this.current));
    const seq = this.current.requestSeq;
    try {
      const resp = await this.api.suggest(text, this.current.k, this.current.engine);
      this.apply(model.suggestionsArrived(this.current, seq, resp.candidates));
    } catch (err) {
      this.apply(model.requestFailed(this.current, seq, describe(err)));
    }
  }

  private apply(next: model.EditorState): void {
    if (next === this.current) return;
    this.current = next;
    this.onRender(next);
  }
}

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
