// Typed client for the session service. Every figure shown anywhere in the
// UI comes out of these responses; nothing is recomputed on the client.

export type Protocol = 'P1' | 'P2' | 'P3' | 'P4';
export type Status = 'Active' | 'Armed' | 'Stopped' | 'ConsentRequired';
export type Action = 'Continue' | 'Armed' | 'Stop' | 'ConsentRequired';
export type Source =
  | 'odds-rule'
  | 'estimated-odds-rule'
  | 'threshold'
  | 'consent-policy'
  | null;

export type PlanFigures = {
  kind: 'plan';
  s: number;
  R: number;
  Q: number;
  V: number;
  curve: number[];
};

export type InferenceFigures = {
  kind: 'inference';
  k: number;
  S: number;
  p_hat: number;
  future_odds_sum: number | null;
  future_odds_finite: boolean;
  expected_further: number;
  prob_no_further: number;
  p_future_clamped: boolean;
};

export type RefusalFigures = {
  kind: 'refusal';
  at_time: number;
  integral_value: number;
  refuse_from_now: boolean;
  predictor: number;
  mean_health: number;
  prior_based: boolean;
};

export type Figures = PlanFigures | InferenceFigures | RefusalFigures | null;

export type SessionEvent = {
  seq: number;
  ts: number;
  kind: string;
  payload: Record<string, unknown>;
};

export type SessionView = {
  id: string;
  protocol: Protocol;
  status: Status;
  k: number;
  S: number;
  n: number | null;
  config: Record<string, unknown>;
  events: SessionEvent[];
  recommendation: { action: Action; source: Source; figures: Figures };
};

export type SessionSummary = {
  id: string;
  protocol: Protocol;
  status: Status;
  k: number;
  S: number;
};

export type Elicitation = { h_min: number; h_max: number; ranks: number[] };

export type CreateSessionBody = {
  protocol: Protocol;
  probs?: number[];
  h?: number[];
  elicitation?: Elicitation;
  alpha?: number;
  max_initial_failures?: number;
  bounds?: number[];
  rates?: number[];
  prior_mean_health?: number;
};

export type OutcomeBody = {
  outcome: '+' | '-';
  time?: number;
  h_observed?: number;
};

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === 'string' ? detail : JSON.stringify(detail));
    this.name = 'ApiError';
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export function newIdempotencyKey(): string {
  const c = globalThis.crypto as Crypto | undefined;
  if (c && typeof c.randomUUID === 'function') return c.randomUUID();
  return `key-${Date.now()}-${Math.random().toString(36).slice(2)}`;
}

export class Client {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly base: string,
    private readonly token?: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  private headers(extra?: Record<string, string>): Record<string, string> {
    const h: Record<string, string> = { 'content-type': 'application/json', ...extra };
    if (this.token) h['authorization'] = `Bearer ${this.token}`;
    return h;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    extra?: Record<string, string>,
  ): Promise<T> {
    const res = await this.fetchFn(`${this.base}${path}`, {
      method,
      headers: this.headers(extra),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await res.text();
    const data: unknown = text ? JSON.parse(text) : null;
    if (!res.ok) {
      const detail =
        data && typeof data === 'object' && 'detail' in data
          ? (data as { detail: unknown }).detail
          : data;
      throw new ApiError(res.status, detail);
    }
    return data as T;
  }

  healthz(): Promise<{ status: string }> {
    return this.request('GET', '/v1/healthz');
  }

  createSession(body: CreateSessionBody): Promise<SessionView> {
    return this.request('POST', '/v1/sessions', body);
  }

  getSession(id: string): Promise<SessionView> {
    return this.request('GET', `/v1/sessions/${id}`);
  }

  async listSessions(): Promise<SessionSummary[]> {
    const data = await this.request<{ sessions: SessionSummary[] }>(
      'GET',
      '/v1/sessions',
    );
    return data.sessions;
  }

  postOutcome(
    id: string,
    body: OutcomeBody,
    idempotencyKey: string,
  ): Promise<SessionView> {
    return this.request('POST', `/v1/sessions/${id}/outcomes`, body, {
      'idempotency-key': idempotencyKey,
    });
  }

  postConsent(id: string): Promise<SessionView> {
    return this.request('POST', `/v1/sessions/${id}/consent`);
  }
}
