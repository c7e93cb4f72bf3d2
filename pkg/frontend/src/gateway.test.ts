import { describe, expect, it } from "vitest";

import { GatewayClient, GatewayError } from "./gateway.js";

interface Recorded {
  url: string;
  init?: RequestInit;
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function recordingFetch(
  responder: (url: string, init?: RequestInit) => Response,
): { requests: Recorded[]; fetch: (url: string, init?: RequestInit) => Promise<Response> } {
  const requests: Recorded[] = [];
  return {
    requests,
    fetch: (url, init) => {
      requests.push({ url, init });
      return Promise.resolve(responder(url, init));
    },
  };
}

describe("GatewayClient.ask", () => {
  it("posts the payload and maps the response", async () => {
    const { requests, fetch } = recordingFetch(() =>
      jsonResponse(200, { answer: "text", cot_used: true, message_count: 18 }),
    );
    const client = new GatewayClient("http://gw:8080/", fetch);
    const result = await client.ask({ question: "q?", cot: true, stream: false });
    expect(result).toEqual({ answer: "text", cotUsed: true, messageCount: 18 });
    expect(requests).toHaveLength(1);
    expect(requests[0]!.url).toBe("http://gw:8080/v1/ask");
    expect(requests[0]!.init?.method).toBe("POST");
    expect(JSON.parse(String(requests[0]!.init?.body))).toEqual({
      question: "q?",
      cot: true,
      stream: false,
    });
  });

  it("raises GatewayError with the upstream error text", async () => {
    const { fetch } = recordingFetch(() =>
      jsonResponse(502, { error: "upstream failure: RetriesExhausted" }),
    );
    const client = new GatewayClient("http://gw", fetch);
    await expect(
      client.ask({ question: "q?", cot: true, stream: false }),
    ).rejects.toThrowError(GatewayError);
    await expect(
      client.ask({ question: "q?", cot: true, stream: false }),
    ).rejects.toThrow("upstream failure: RetriesExhausted");
  });

  it("keeps a status-only message when the error body is not JSON", async () => {
    const { fetch } = recordingFetch(() => new Response("boom", { status: 503 }));
    const client = new GatewayClient("http://gw", fetch);
    await expect(
      client.ask({ question: "q?", cot: true, stream: false }),
    ).rejects.toThrow("gateway returned 503");
  });

  it("drains streaming bodies and strips the sentinel", async () => {
    const answer = "streamed 等离子体 answer ".repeat(10).trimEnd();
    const frames = [answer.slice(0, 30), answer.slice(30), "\n[DONE]\n"];
    const { fetch } = recordingFetch(
      () =>
        new Response(
          new ReadableStream<Uint8Array>({
            start(controller) {
              const encoder = new TextEncoder();
              for (const frame of frames) {
                controller.enqueue(encoder.encode(frame));
              }
              controller.close();
            },
          }),
          { status: 200 },
        ),
    );
    const client = new GatewayClient("http://gw", fetch);
    const chunks: string[] = [];
    const result = await client.ask(
      { question: "q?", cot: true, stream: true },
      (chunk) => chunks.push(chunk),
    );
    expect(result.answer).toBe(answer);
    expect(chunks.join("")).toBe(answer);
    expect(chunks.join("")).not.toContain("[DONE]");
  });

  it("handles a sentinel split across stream frames", async () => {
    const answer = "short";
    const raw = `${answer}\n[DONE]\n`;
    const frames = [raw.slice(0, 7), raw.slice(7, 10), raw.slice(10)];
    const { fetch } = recordingFetch(
      () =>
        new Response(
          new ReadableStream<Uint8Array>({
            start(controller) {
              const encoder = new TextEncoder();
              for (const frame of frames) {
                controller.enqueue(encoder.encode(frame));
              }
              controller.close();
            },
          }),
          { status: 200 },
        ),
    );
    const client = new GatewayClient("http://gw", fetch);
    const chunks: string[] = [];
    const result = await client.ask(
      { question: "q?", cot: true, stream: true },
      (chunk) => chunks.push(chunk),
    );
    expect(result.answer).toBe(answer);
    expect(chunks.join("")).toBe(answer);
  });
});

describe("GatewayClient.config", () => {
  it("maps the config body", async () => {
    const { fetch } = recordingFetch(() =>
      jsonResponse(200, {
        model_id: "demo",
        cot: { aspects: ["a", "b", "c", "d", "e"], exemplar_count: 8, inline: false },
        stream_supported: true,
      }),
    );
    const client = new GatewayClient("http://gw", fetch);
    const config = await client.config();
    expect(config.modelId).toBe("demo");
    expect(config.aspects).toHaveLength(5);
    expect(config.exemplarCount).toBe(8);
  });
});

describe("GatewayClient.healthy", () => {
  it("true on ok, false on 503 or network error", async () => {
    const ok = new GatewayClient(
      "http://gw",
      recordingFetch(() => jsonResponse(200, { status: "ok" })).fetch,
    );
    expect(await ok.healthy()).toBe(true);
    const degraded = new GatewayClient(
      "http://gw",
      recordingFetch(() => jsonResponse(503, { status: "degraded" })).fetch,
    );
    expect(await degraded.healthy()).toBe(false);
    const down = new GatewayClient("http://gw", () => Promise.reject(new Error("refused")));
    expect(await down.healthy()).toBe(false);
  });
});
