// Typed client for the annotation server. Shapes mirror the server API
// exactly; nothing here reinterprets payloads.

export type LevelName = "original" | "central" | "summary" | "keywords";

export interface OriginalCell {
  text: string;
}

export interface ExtractiveCell {
  summary: string;
  sentence_indices: number[];
}

export interface AbstractiveCell {
  summary: string;
  source: "external" | "fallback";
}

export interface KeywordsCell {
  keywords: string[];
}

export type CardCell = OriginalCell | ExtractiveCell | AbstractiveCell | KeywordsCell;

export interface Card {
  index: number;
  content: CardCell;
}

export interface CardsResponse {
  revision: number;
  level: string;
  cards: Card[];
}

export interface SessionInfo {
  session_id: string;
  revision: number;
  paragraph_count: number;
}

export interface EditResponse {
  changed: number[];
  removed: number[];
  revision: number;
  paragraph_count: number;
}

export interface StatusResponse {
  pending: number;
  revision: number;
}

export type SpanTuple = [string, number, number, number]; // pid, sentence index, start, end

export interface MergeSuggestion {
  merged: string;
  retained: [string, number][];
  cut: [string, number][];
  retained_spans: SpanTuple[];
  cut_spans: SpanTuple[];
  source_hashes: [string, string];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  const body = await response.json();
  if (!response.ok) {
    const detail = body?.error ?? { code: "unknown", message: response.statusText };
    throw new ApiError(response.status, detail.code, detail.message);
  }
  return body as T;
}

function jsonInit(method: string, payload: unknown): RequestInit {
  return {
    method,
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  };
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  createSession(): Promise<SessionInfo> {
    return request(this.url("/api/session"), { method: "POST" });
  }

  putText(sessionId: string, text: string): Promise<EditResponse> {
    return request(this.url(`/api/session/${sessionId}/text`), jsonInit("PUT", { text }));
  }

  getText(sessionId: string): Promise<{ text: string; revision: number }> {
    return request(this.url(`/api/session/${sessionId}/text`));
  }

  getCards(sessionId: string, level: LevelName): Promise<CardsResponse> {
    const params = new URLSearchParams({ level });
    return request(this.url(`/api/session/${sessionId}/cards?${params}`));
  }

  getStatus(sessionId: string): Promise<StatusResponse> {
    return request(this.url(`/api/session/${sessionId}/status`));
  }

  reorder(
    sessionId: string,
    from: number,
    to: number,
  ): Promise<{ order: number[]; revision: number; text: string }> {
    return request(this.url(`/api/session/${sessionId}/reorder`), jsonInit("POST", { from, to }));
  }

  deleteCard(
    sessionId: string,
    index: number,
  ): Promise<{ revision: number; paragraph_count: number; text: string }> {
    return request(this.url(`/api/session/${sessionId}/card/${index}`), { method: "DELETE" });
  }

  mergePreview(sessionId: string, aIndex: number, bIndex: number): Promise<MergeSuggestion> {
    return request(
      this.url(`/api/session/${sessionId}/merge/preview`),
      jsonInit("POST", { a_index: aIndex, b_index: bIndex }),
    );
  }

  mergeAccept(
    sessionId: string,
    aIndex: number,
    bIndex: number,
    suggestion: MergeSuggestion,
  ): Promise<{ revision: number; paragraph_count: number; text: string }> {
    return request(
      this.url(`/api/session/${sessionId}/merge/accept`),
      jsonInit("POST", { a_index: aIndex, b_index: bIndex, suggestion }),
    );
  }
}
