/** Browser wiring: textarea editor, suggestion chips, completion view. */

import { createApi } from "./api.js";
import { TypingAssistant } from "./assistant.js";
import { isTerminator, type EditorState } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function main(): void {
  const editor = el<HTMLTextAreaElement>("editor");
  const chips = el<HTMLDivElement>("chips");
  const savings = el<HTMLSpanElement>("savings");
  const completeBtn = el<HTMLButtonElement>("complete-btn");
  const completionBox = el<HTMLDivElement>("completion");
  const engineSelect = el<HTMLSelectElement>("engine");
  const toast = el<HTMLDivElement>("toast");
  const health = el<HTMLSpanElement>("health");

  const api = createApi(window.location.origin);
  let toastTimer: ReturnType<typeof setTimeout> | null = null;

  const showToast = (message: string) => {
    toast.textContent = message;
    toast.classList.add("visible");
    if (toastTimer) clearTimeout(toastTimer);
    toastTimer = setTimeout(() => toast.classList.remove("visible"), 4000);
  };

  const render = (state: EditorState) => {
    chips.replaceChildren();
    state.suggestions.forEach((suggestion, index) => {
      const chip = document.createElement("button");
      chip.type = "button";
      chip.className = "chip" + (isTerminator(suggestion.token) ? " terminator" : "");
      chip.dataset.index = String(index);
      const word = document.createElement("span");
      word.className = "chip-token";
      word.textContent = suggestion.token;
      const prob = document.createElement("span");
      prob.className = "chip-prob";
      prob.textContent = suggestion.probability.toFixed(3);
      chip.append(word, prob);
      chip.addEventListener("click", () => accept(index));
      chips.append(chip);
    });

    savings.textContent = String(state.savedKeystrokes);
    completeBtn.disabled = state.committed.trim() === "";

    completionBox.replaceChildren();
    if (state.completion) {
      state.completion.tokens.forEach((token, i) => {
        const span = document.createElement("span");
        span.className = i < state.completion!.prefixLength ? "typed" : "generated";
        span.textContent = token;
        completionBox.append(span, document.createTextNode(" "));
      });
      if (state.completion.terminatedBy === "length-cap") {
        const badge = document.createElement("span");
        badge.className = "badge warn";
        badge.textContent = "length-cap";
        completionBox.append(badge);
      }
    }

    if (state.error) showToast(state.error);
  };

  const assistant = new TypingAssistant(api, render, { debounceMs: 150, k: 5 });

  const accept = (index: number) => {
    const chip = assistant.state.suggestions[index];
    assistant.acceptSuggestion(index);
    editor.value = assistant.state.committed;
    if (chip && isTerminator(chip.token)) {
      editor.classList.add("sentence-end");
      setTimeout(() => editor.classList.remove("sentence-end"), 600);
    }
    editor.focus();
  };

  editor.addEventListener("input", () => assistant.handleTextChange(editor.value));
  editor.addEventListener("keydown", (event) => {
    if (event.key === "Tab" && assistant.state.suggestions.length > 0) {
      event.preventDefault();
      accept(0);
    }
  });
  completeBtn.addEventListener("click", () => void assistant.requestCompletion());
  engineSelect.addEventListener("change", () =>
    assistant.setEngine(engineSelect.value as "neural" | "statistical"),
  );

  api
    .health()
    .then((h) => {
      health.textContent = `models ${h.bundle_orders.join(",")} · vocab ${h.vocab_size}`;
    })
    .catch(() => {
      health.textContent = "server unreachable";
      showToast("suggestion server unreachable");
    });
}

main();
