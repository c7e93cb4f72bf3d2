/**
 * Session state for the chat UI.
 *
 * All transitions are pure functions returning a new state, so the whole
 * conversation logic is testable without a DOM. Two invariants hold at
 * every step: at most one turn is pending, and turns are append-only
 * (completed turns are never reordered or rewritten).
 */

export type Lang = "auto" | "zh" | "en";

export interface Turn {
  readonly question: string;
  readonly answer: string;
  readonly cotUsed: boolean;
  readonly lang: Lang;
  readonly pending: boolean;
  readonly error: string | null;
}

export interface Settings {
  readonly gatewayUrl: string;
  readonly lang: Lang;
  readonly cot: boolean;
  readonly stream: boolean;
  /** Concatenate prior turns into the outgoing question. Off by default:
   *  the gateway is stateless and its canonical use sends bare questions. */
  readonly includeContext: boolean;
}

export interface ChatSessionState {
  readonly turns: readonly Turn[];
  readonly settings: Settings;
}

export const DEFAULT_SETTINGS: Settings = {
  gatewayUrl: "",
  lang: "auto",
  cot: true,
  stream: true,
  includeContext: false,
};

export function newSession(settings: Partial<Settings> = {}): ChatSessionState {
  return { turns: [], settings: { ...DEFAULT_SETTINGS, ...settings } };
}

export function updateSettings(
  state: ChatSessionState,
  patch: Partial<Settings>,
): ChatSessionState {
  return { ...state, settings: { ...state.settings, ...patch } };
}

export function pendingIndex(state: ChatSessionState): number {
  return state.turns.findIndex((t) => t.pending);
}

export function hasPending(state: ChatSessionState): boolean {
  return pendingIndex(state) >= 0;
}

/** Append a pending turn. Rejects empty questions and concurrent sends. */
export function beginTurn(state: ChatSessionState, question: string): ChatSessionState {
  if (!question.trim()) {
    throw new Error("question is empty");
  }
  if (hasPending(state)) {
    throw new Error("a turn is already pending");
  }
  const turn: Turn = {
    question,
    answer: "",
    cotUsed: state.settings.cot,
    lang: state.settings.lang,
    pending: true,
    error: null,
  };
  return { ...state, turns: [...state.turns, turn] };
}

function replacePending(
  state: ChatSessionState,
  update: (turn: Turn) => Turn,
): ChatSessionState {
  const index = pendingIndex(state);
  if (index < 0) {
    throw new Error("no pending turn");
  }
  const turns = state.turns.map((t, i) => (i === index ? update(t) : t));
  return { ...state, turns };
}

/** Append streamed text to the pending turn's answer. */
export function appendAnswer(state: ChatSessionState, chunk: string): ChatSessionState {
  return replacePending(state, (t) => ({ ...t, answer: t.answer + chunk }));
}

/** Finish the pending turn with its final answer text. */
export function resolveTurn(state: ChatSessionState, answer: string): ChatSessionState {
  return replacePending(state, (t) => ({ ...t, answer, pending: false, error: null }));
}

/** Mark the pending turn failed; the question stays so it can be retried. */
export function failTurn(state: ChatSessionState, message: string): ChatSessionState {
  return replacePending(state, (t) => ({ ...t, pending: false, error: message }));
}

/** A turn is retryable when it is the last one and it failed. */
export function canRetry(state: ChatSessionState): boolean {
  const last = state.turns[state.turns.length - 1];
  return last !== undefined && !last.pending && last.error !== null;
}

/** Re-pend the failed last turn, clearing its error and partial answer. */
export function retryTurn(state: ChatSessionState): ChatSessionState {
  if (!canRetry(state)) {
    throw new Error("nothing to retry");
  }
  const index = state.turns.length - 1;
  const turns = state.turns.map((t, i) =>
    i === index ? { ...t, pending: true, error: null, answer: "" } : t,
  );
  return { ...state, turns };
}

/** The question text to send, optionally prefixed with prior-turn context. */
export function outgoingQuestion(state: ChatSessionState, question: string): string {
  if (!state.settings.includeContext) {
    return question;
  }
  const history = state.turns
    .filter((t) => !t.pending && t.error === null)
    .map((t) => `Q: ${t.question}\nA: ${t.answer}`)
    .join("\n\n");
  return history ? `${history}\n\nQ: ${question}` : question;
}
