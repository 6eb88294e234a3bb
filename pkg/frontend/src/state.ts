/** Editor state and its pure transitions.
 *
 * Every suggest request gets a monotonically increasing sequence number;
 * a response only lands if it answers the newest request, so suggestions
 * always correspond to the current committed text. The keystroke-savings
 * counter adds token length minus one click-equivalent per accepted chip.
 */

import type { Engine, Suggestion } from "./api.js";

export const TERMINATORS = ["।", "?", "!"];

export interface CompletionView {
  tokens: string[];
  /** How many leading tokens were the user's own prefix (rest is generated). */
  prefixLength: number;
  terminatedBy: string;
  steps: number;
}

export interface EditorState {
  committed: string;
  suggestions: Suggestion[];
  engine: Engine;
  k: number;
  requestInFlight: boolean;
  /** Sequence number of the newest issued suggest request. */
  requestSeq: number;
  /** Sequence number the rendered suggestions answer (-1 = none). */
  suggestionsSeq: number;
  savedKeystrokes: number;
  completion: CompletionView | null;
  error: string | null;
}

export function initialState(engine: Engine = "neural", k = 5): EditorState {
  return {
    committed: "",
    suggestions: [],
    engine,
    k,
    requestInFlight: false,
    requestSeq: 0,
    suggestionsSeq: -1,
    savedKeystrokes: 0,
    completion: null,
    error: null,
  };
}

/** User edited the text: stale chips and completion disappear immediately. */
export function textChanged(state: EditorState, text: string): EditorState {
  return {
    ...state,
    committed: text,
    suggestions: [],
    suggestionsSeq: -1,
    completion: null,
    error: null,
  };
}

/** Claim the next sequence number for an outgoing suggest request. */
export function requestIssued(state: EditorState): EditorState {
  return { ...state, requestSeq: state.requestSeq + 1, requestInFlight: true };
}

/** Apply a suggest response; stale sequence numbers are discarded. */
export function suggestionsArrived(
  state: EditorState,
  seq: number,
  suggestions: Suggestion[],
): EditorState {
  if (seq !== state.requestSeq) return state;
  return {
    ...state,
    suggestions,
    suggestionsSeq: seq,
    requestInFlight: false,
    error: null,
  };
}

export function requestFailed(state: EditorState, seq: number, message: string): EditorState {
  if (seq !== state.requestSeq) return state;
  return { ...state, requestInFlight: false, error: message };
}

/** Insert an accepted chip: token plus a trailing space, count the savings. */
export function suggestionAccepted(state: EditorState, index: number): EditorState {
  const chip = state.suggestions[index];
  if (!chip) return state;
  const base = state.committed.replace(/\s+$/, "");
  return {
    ...state,
    committed: (base ? base + " " : "") + chip.token + " ",
    suggestions: [],
    suggestionsSeq: -1,
    completion: null,
    savedKeystrokes: state.savedKeystrokes + Math.max(chip.token.length - 1, 0),
  };
}

export function completionArrived(
  state: EditorState,
  seq: number,
  tokens: string[],
  prefixLength: number,
  terminatedBy: string,
  steps: number,
): EditorState {
  if (seq !== state.requestSeq) return state;
  return {
    ...state,
    requestInFlight: false,
    completion: { tokens, prefixLength, terminatedBy, steps },
    error: null,
  };
}

export function isTerminator(token: string): boolean {
  return TERMINATORS.includes(token);
}
