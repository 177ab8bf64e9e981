import type {
  FramesPayload,
  LeaderboardRow,
  NextMotion,
  SessionInfo,
  SubmitOutcome,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Typed client for the annotation service; the UI talks to nothing else. */
export class ApiClient {
  private token: string | null = null;
  annotatorId: string | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async openSession(displayName: string, annotatorId?: string): Promise<SessionInfo> {
    const session = await this.request<SessionInfo>("POST", "/api/sessions", {
      display_name: displayName,
      annotator_id: annotatorId ?? null,
    });
    this.token = session.token;
    this.annotatorId = session.annotator_id;
    return session;
  }

  nextMotion(): Promise<NextMotion> {
    return this.request<NextMotion>("GET", "/api/next-motion");
  }

  async submitAnnotation(entryId: number, text: string): Promise<SubmitOutcome> {
    const response = await this.raw("POST", "/api/annotations", {
      entry_id: entryId,
      text,
    });
    if (response.status === 422) {
      return { kind: "rejected", rejection: await response.json() };
    }
    if (!response.ok) {
      throw new ApiError(response.status, await safeDetail(response));
    }
    return { kind: "accepted", result: await response.json() };
  }

  async skip(entryId: number): Promise<void> {
    const response = await this.raw("POST", "/api/skip", { entry_id: entryId });
    if (!response.ok) {
      throw new ApiError(response.status, await safeDetail(response));
    }
  }

  async report(entryId: number, note: string): Promise<void> {
    const response = await this.raw("POST", "/api/report", {
      entry_id: entryId,
      note,
    });
    if (!response.ok) {
      throw new ApiError(response.status, await safeDetail(response));
    }
  }

  frames(framesUrl: string, fps?: number): Promise<FramesPayload> {
    const query = fps ? `?fps=${fps}` : "";
    return this.request<FramesPayload>("GET", `${framesUrl}${query}`);
  }

  async leaderboard(): Promise<LeaderboardRow[]> {
    const body = await this.request<{ leaderboard: LeaderboardRow[] }>(
      "GET",
      "/api/leaderboard",
    );
    return body.leaderboard;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.raw(method, path, body);
    if (!response.ok) {
      throw new ApiError(response.status, await safeDetail(response));
    }
    return response.json() as Promise<T>;
  }

  private raw(method: string, path: string, body?: unknown): Promise<Response> {
    const headers: Record<string, string> = {};
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
    }
    if (this.token) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    return this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }
}

async function safeDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    return body.detail ?? body.message ?? `HTTP ${response.status}`;
  } catch {
    return `HTTP ${response.status}`;
  }
}
