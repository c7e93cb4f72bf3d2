/**
 * Pure state-to-HTML rendering. No DOM reads: given the same state the
 * markup is identical, which keeps the view testable as plain strings.
 *
 * Answers produced with the CoT scaffold arrive as numbered sections
 * ("1). ..." through "5). ..."); those render as distinct blocks so the
 * five-aspect structure is visible at a glance.
 */

import { ChatSessionState, Turn } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const SECTION_MARK = /(?:^|\n)\s*([1-5])\)[.)]?\s/;

/** Split a scaffolded answer into its numbered sections, if it has them. */
export function splitAspectSections(answer: string): string[] | null {
  const matches = [...answer.matchAll(new RegExp(SECTION_MARK.source, "g"))];
  if (matches.length < 2) {
    return null;
  }
  const numbers = matches.map((m) => Number(m[1]));
  const ascending = numbers.every((n, i) => i === 0 || n > numbers[i - 1]!);
  if (!ascending || numbers[0] !== 1) {
    return null;
  }
  const sections: string[] = [];
  for (let i = 0; i < matches.length; i++) {
    const start = matches[i]!.index!;
    const end = i + 1 < matches.length ? matches[i + 1]!.index! : answer.length;
    sections.push(answer.slice(start, end).trim());
  }
  return sections;
}

function renderAnswer(turn: Turn): string {
  if (turn.pending && !turn.answer) {
    return '<div class="answer pending">…</div>';
  }
  const sections = turn.pending ? null : splitAspectSections(turn.answer);
  if (sections) {
    const blocks = sections
      .map((section) => `<section class="aspect">${escapeHtml(section)}</section>`)
      .join("");
    return `<div class="answer structured">${blocks}</div>`;
  }
  return `<div class="answer">${escapeHtml(turn.answer)}</div>`;
}

function renderTurn(turn: Turn, index: number): string {
  const badges =
    `<span class="badge">${turn.cotUsed ? "cot" : "plain"}</span>` +
    `<span class="badge">${escapeHtml(turn.lang)}</span>`;
  const error = turn.error
    ? `<div class="error">${escapeHtml(turn.error)}` +
      `<button class="retry" data-turn="${index}">retry</button></div>`
    : "";
  return (
    `<article class="turn${turn.pending ? " pending" : ""}${turn.error ? " failed" : ""}">` +
    `<div class="question">${escapeHtml(turn.question)}${badges}</div>` +
    renderAnswer(turn) +
    error +
    `</article>`
  );
}

export function renderConversation(state: ChatSessionState): string {
  if (state.turns.length === 0) {
    return '<div class="empty">Ask a fusion question to get started.</div>';
  }
  return state.turns.map(renderTurn).join("");
}

export function renderSettings(state: ChatSessionState): string {
  const { lang, cot, stream, includeContext, gatewayUrl } = state.settings;
  const option = (value: string) =>
    `<option value="${value}"${value === lang ? " selected" : ""}>${value}</option>`;
  return (
    `<label>gateway <input id="gateway-url" value="${escapeHtml(gatewayUrl)}"></label>` +
    `<label>language <select id="lang">${option("auto")}${option("zh")}${option("en")}</select></label>` +
    `<label><input type="checkbox" id="cot"${cot ? " checked" : ""}> chain-of-thought</label>` +
    `<label><input type="checkbox" id="stream"${stream ? " checked" : ""}> stream</label>` +
    `<label><input type="checkbox" id="include-context"${includeContext ? " checked" : ""}>` +
    ` include prior turns in question (non-canonical)</label>`
  );
}
