/**
 * Orchestrates one question/answer exchange against the gateway.
 *
 * The store is a tiny observable holding ChatSessionState; every mutation
 * goes through the pure transitions in state.ts, so the invariants (one
 * pending turn, append-only history) hold no matter how requests finish.
 */

import { GatewayClient } from "./gateway.js";
import {
  ChatSessionState,
  appendAnswer,
  beginTurn,
  canRetry,
  failTurn,
  hasPending,
  newSession,
  outgoingQuestion,
  resolveTurn,
  retryTurn,
  Settings,
  updateSettings,
} from "./state.js";

export type Listener = (state: ChatSessionState) => void;

export class SessionStore {
  private listeners: Listener[] = [];

  constructor(private state: ChatSessionState = newSession()) {}

  get(): ChatSessionState {
    return this.state;
  }

  set(next: ChatSessionState): void {
    this.state = next;
    for (const listener of this.listeners) {
      listener(next);
    }
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  patchSettings(patch: Partial<Settings>): void {
    this.set(updateSettings(this.state, patch));
  }
}

/** Send one question; resolves after the turn settles (ok or failed). */
export async function sendQuestion(
  store: SessionStore,
  gateway: GatewayClient,
  question: string,
): Promise<void> {
  const before = store.get();
  if (hasPending(before) || !question.trim()) {
    return;
  }
  const outgoing = outgoingQuestion(before, question);
  store.set(beginTurn(before, question));
  await runPendingTurn(store, gateway, outgoing);
}

/** Re-send the failed last turn without touching earlier history. */
export async function retryLastTurn(
  store: SessionStore,
  gateway: GatewayClient,
): Promise<void> {
  const before = store.get();
  if (!canRetry(before)) {
    return;
  }
  const failed = before.turns[before.turns.length - 1]!;
  const history = { ...before, turns: before.turns.slice(0, -1) };
  const outgoing = outgoingQuestion(history, failed.question);
  store.set(retryTurn(before));
  await runPendingTurn(store, gateway, outgoing);
}

async function runPendingTurn(
  store: SessionStore,
  gateway: GatewayClient,
  outgoing: string,
): Promise<void> {
  const settings = store.get().settings;
  try {
    const result = await gateway.ask(
      {
        question: outgoing,
        ...(settings.lang === "auto" ? {} : { lang: settings.lang }),
        cot: settings.cot,
        stream: settings.stream,
      },
      settings.stream ? (chunk) => store.set(appendAnswer(store.get(), chunk)) : undefined,
    );
    store.set(resolveTurn(store.get(), result.answer));
  } catch (error) {
    const message = error instanceof Error ? error.message : String(error);
    store.set(failTurn(store.get(), message));
  }
}
