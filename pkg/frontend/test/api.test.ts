import { describe, expect, it } from 'vitest';

import { ApiError, Client, type SessionView } from '../src/api.js';
import { initialState, SessionController, Store } from '../src/store.js';

type Call = { url: string; init: RequestInit };

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

function viewFixture(overrides: Partial<SessionView> = {}): SessionView {
  return {
    id: 's1',
    protocol: 'P1',
    status: 'Active',
    k: 0,
    S: 0,
    n: 7,
    config: {},
    events: [],
    recommendation: { action: 'Continue', source: 'odds-rule', figures: null },
    ...overrides,
  };
}

function scripted(steps: Array<(call: Call) => Response | Error>) {
  const calls: Call[] = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    const call = { url, init: init ?? {} };
    calls.push(call);
    const step = steps.shift();
    if (!step) throw new Error(`unexpected request: ${url}`);
    const result = step(call);
    if (result instanceof Error) throw result;
    return result;
  };
  return { calls, fetchFn };
}

function headerOf(call: Call, name: string): string | undefined {
  return (call.init.headers as Record<string, string>)[name];
}

describe('Client', () => {
  it('posts outcomes with the idempotency key header', async () => {
    const { calls, fetchFn } = scripted([() => jsonResponse(viewFixture(), 201)]);
    const client = new Client('http://x', undefined, fetchFn);
    await client.postOutcome('s1', { outcome: '+' }, 'key-7');
    expect(calls).toHaveLength(1);
    expect(calls[0]!.url).toBe('http://x/v1/sessions/s1/outcomes');
    expect(headerOf(calls[0]!, 'idempotency-key')).toBe('key-7');
    expect(JSON.parse(String(calls[0]!.init.body))).toEqual({ outcome: '+' });
  });

  it('sends the bearer token on every request when configured', async () => {
    const { calls, fetchFn } = scripted([() => jsonResponse({ sessions: [] })]);
    const client = new Client('http://x', 'sekrit', fetchFn);
    await client.listSessions();
    expect(headerOf(calls[0]!, 'authorization')).toBe('Bearer sekrit');
  });

  it('raises ApiError with the served detail on failures', async () => {
    const { fetchFn } = scripted([
      () => jsonResponse({ detail: 'probs[1] out of range' }, 422),
    ]);
    const client = new Client('http://x', undefined, fetchFn);
    const err = await client
      .createSession({ protocol: 'P1', probs: [0.5, 7] })
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(422);
    expect((err as ApiError).detail).toBe('probs[1] out of range');
  });
});

describe('SessionController', () => {
  it('refetches after every write and shows the GET payload', async () => {
    const posted = viewFixture({ k: 1 });
    const fetched = viewFixture({ k: 1, S: 1, status: 'Armed' });
    const { calls, fetchFn } = scripted([
      () => jsonResponse(posted, 201),
      () => jsonResponse(fetched, 200),
    ]);
    const state = new Store(initialState());
    state.patch({ session: viewFixture(), route: { page: 'session', id: 's1' } });
    const controller = new SessionController(new Client('http://x', undefined, fetchFn), state);
    await controller.record({ outcome: '+' });
    expect(calls.map((c) => c.init.method)).toEqual(['POST', 'GET']);
    expect(state.get().session).toEqual(fetched);
    expect(state.get().error).toBeNull();
  });

  it('retries a dropped connection once with the same key', async () => {
    const { calls, fetchFn } = scripted([
      () => new TypeError('fetch failed'),
      () => jsonResponse(viewFixture({ k: 1 }), 201),
      () => jsonResponse(viewFixture({ k: 1 }), 200),
    ]);
    const state = new Store(initialState());
    state.patch({ session: viewFixture(), route: { page: 'session', id: 's1' } });
    const controller = new SessionController(new Client('http://x', undefined, fetchFn), state);
    await controller.record({ outcome: '-' });
    expect(calls).toHaveLength(3);
    const firstKey = headerOf(calls[0]!, 'idempotency-key');
    expect(firstKey).toBeTruthy();
    expect(headerOf(calls[1]!, 'idempotency-key')).toBe(firstKey);
    expect(calls[2]!.init.method).toBe('GET');
    expect(state.get().error).toBeNull();
  });

  it('does not retry a rejected request and surfaces the detail', async () => {
    const { calls, fetchFn } = scripted([
      () => jsonResponse({ detail: 'session s1 is stopped' }, 409),
    ]);
    const state = new Store(initialState());
    state.patch({ session: viewFixture(), route: { page: 'session', id: 's1' } });
    const controller = new SessionController(new Client('http://x', undefined, fetchFn), state);
    await controller.record({ outcome: '+' });
    expect(calls).toHaveLength(1);
    expect(state.get().error).toBe('session s1 is stopped');
  });

  it('uses a fresh key for every distinct outcome', async () => {
    const { calls, fetchFn } = scripted([
      () => jsonResponse(viewFixture({ k: 1 }), 201),
      () => jsonResponse(viewFixture({ k: 1 }), 200),
      () => jsonResponse(viewFixture({ k: 2 }), 201),
      () => jsonResponse(viewFixture({ k: 2 }), 200),
    ]);
    const state = new Store(initialState());
    state.patch({ session: viewFixture(), route: { page: 'session', id: 's1' } });
    const controller = new SessionController(new Client('http://x', undefined, fetchFn), state);
    await controller.record({ outcome: '-' });
    await controller.record({ outcome: '-' });
    const keys = [calls[0]!, calls[2]!].map((c) => headerOf(c, 'idempotency-key'));
    expect(keys[0]).not.toBe(keys[1]);
  });
});
