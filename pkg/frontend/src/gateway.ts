/**
 * Minimal HTTP client for the gateway's /v1/ask and /v1/config routes.
 *
 * fetch is injected so tests can record exactly what would go over the
 * wire. Streaming responses are chunked text ending with a "\n[DONE]\n"
 * sentinel; the sentinel never reaches callers.
 */

export const STREAM_SENTINEL = "[DONE]";

export interface AskPayload {
  question: string;
  lang?: "zh" | "en";
  cot: boolean;
  stream: boolean;
}

export interface AskResult {
  answer: string;
  cotUsed: boolean;
  messageCount: number;
}

export interface GatewayConfig {
  modelId: string;
  aspects: string[];
  exemplarCount: number;
}

export class GatewayError extends Error {
  constructor(
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "GatewayError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class GatewayClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/+$/, "") + path;
  }

  /**
   * Ask one question. With payload.stream, onChunk receives answer text
   * incrementally; the returned answer is always the complete text.
   */
  async ask(payload: AskPayload, onChunk?: (chunk: string) => void): Promise<AskResult> {
    const response = await this.fetchImpl(this.url("/v1/ask"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!response.ok) {
      let detail = `gateway returned ${response.status}`;
      try {
        const body = (await response.json()) as { error?: string };
        if (body.error) {
          detail = body.error;
        }
      } catch {
        // keep the status-only message
      }
      throw new GatewayError(detail, response.status);
    }
    if (payload.stream) {
      const text = await this.drainStream(response, onChunk);
      return { answer: text, cotUsed: payload.cot, messageCount: 0 };
    }
    const body = (await response.json()) as {
      answer: string;
      cot_used: boolean;
      message_count: number;
    };
    return {
      answer: body.answer,
      cotUsed: body.cot_used,
      messageCount: body.message_count,
    };
  }

  private async drainStream(
    response: Response,
    onChunk?: (chunk: string) => void,
  ): Promise<string> {
    const tail = `\n${STREAM_SENTINEL}\n`;
    let buffer = "";
    let emitted = 0;
    const push = (piece: string) => {
      buffer += piece;
      // hold back enough bytes that a sentinel split across chunks
      // never leaks into the visible answer
      const safe = Math.max(0, buffer.length - tail.length);
      const ready = buffer.slice(emitted, safe);
      if (ready && onChunk) {
        onChunk(ready);
      }
      emitted = Math.max(emitted, safe);
    };
    if (response.body) {
      const reader = response.body.getReader();
      const decoder = new TextDecoder();
      for (;;) {
        const { done, value } = await reader.read();
        if (done) {
          break;
        }
        push(decoder.decode(value, { stream: true }));
      }
      push(decoder.decode());
    } else {
      push(await response.text());
    }
    const answer = buffer.endsWith(tail) ? buffer.slice(0, -tail.length) : buffer;
    if (onChunk && answer.length > emitted) {
      onChunk(answer.slice(emitted));
    }
    return answer;
  }

  async config(): Promise<GatewayConfig> {
    const response = await this.fetchImpl(this.url("/v1/config"));
    if (!response.ok) {
      throw new GatewayError(`gateway returned ${response.status}`, response.status);
    }
    const body = (await response.json()) as {
      model_id: string;
      cot: { aspects: string[]; exemplar_count: number };
    };
    return {
      modelId: body.model_id,
      aspects: body.cot.aspects,
      exemplarCount: body.cot.exemplar_count,
    };
  }

  async healthy(): Promise<boolean> {
    try {
      const response = await this.fetchImpl(this.url("/healthz"));
      return response.ok;
    } catch {
      return false;
    }
  }
}
