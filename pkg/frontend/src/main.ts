/**
 * DOM bootstrap: wires the store, gateway client, and renderers to the
 * static page. All behavior lives in the imported pure modules; this file
 * only translates DOM events to store operations.
 */

import { retryLastTurn, sendQuestion, SessionStore } from "./controller.js";
import { GatewayClient } from "./gateway.js";
import { renderConversation, renderSettings } from "./render.js";
import { newSession } from "./state.js";

function gatewayUrlFromLocation(): string {
  const param = new URLSearchParams(window.location.search).get("gateway");
  if (param) {
    return param;
  }
  // served from the gateway's /ui mount: same origin is the gateway
  return window.location.origin;
}

function bootstrap(): void {
  const conversation = document.getElementById("conversation");
  const settingsPanel = document.getElementById("settings");
  const form = document.getElementById("ask-form") as HTMLFormElement | null;
  const input = document.getElementById("question") as HTMLTextAreaElement | null;
  if (!conversation || !settingsPanel || !form || !input) {
    throw new Error("chat page is missing required elements");
  }

  const store = new SessionStore(newSession({ gatewayUrl: gatewayUrlFromLocation() }));
  let gateway = new GatewayClient(store.get().settings.gatewayUrl);

  const redraw = () => {
    conversation.innerHTML = renderConversation(store.get());
    settingsPanel.innerHTML = renderSettings(store.get());
    conversation.scrollTop = conversation.scrollHeight;
    bindSettings();
  };

  function bindSettings(): void {
    const url = document.getElementById("gateway-url") as HTMLInputElement | null;
    url?.addEventListener("change", () => {
      store.patchSettings({ gatewayUrl: url.value });
      gateway = new GatewayClient(url.value);
    });
    const lang = document.getElementById("lang") as HTMLSelectElement | null;
    lang?.addEventListener("change", () => {
      store.patchSettings({ lang: lang.value as "auto" | "zh" | "en" });
    });
    for (const [id, key] of [
      ["cot", "cot"],
      ["stream", "stream"],
      ["include-context", "includeContext"],
    ] as const) {
      const box = document.getElementById(id) as HTMLInputElement | null;
      box?.addEventListener("change", () => {
        store.patchSettings({ [key]: box.checked });
      });
    }
  }

  store.subscribe(redraw);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const question = input.value;
    input.value = "";
    void sendQuestion(store, gateway, question);
  });

  conversation.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.classList.contains("retry")) {
      void retryLastTurn(store, gateway);
    }
  });

  redraw();
}

document.addEventListener("DOMContentLoaded", bootstrap);
