// Minimal observable store plus the controller that owns all server writes.
// Invariant: after every write the session shown on screen is a fresh GET,
// never the client's guess about what the write did.

import {
  ApiError,
  Client,
  newIdempotencyKey,
  type CreateSessionBody,
  type OutcomeBody,
  type SessionSummary,
  type SessionView,
} from './api.js';

export type Route =
  | { page: 'wizard' }
  | { page: 'list' }
  | { page: 'session'; id: string };

export type AppState = {
  route: Route;
  session: SessionView | null;
  sessions: SessionSummary[];
  error: string | null;
  busy: boolean;
};

export type Listener = () => void;

export class Store<T> {
  private listeners = new Set<Listener>();

  constructor(private value: T) {}

  get(): T {
    return this.value;
  }

  set(next: T): void {
    this.value = next;
    for (const listener of this.listeners) listener();
  }

  patch(partial: Partial<T>): void {
    this.set({ ...this.value, ...partial });
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }
}

export function initialState(): AppState {
  return { route: { page: 'list' }, session: null, sessions: [], error: null, busy: false };
}

function message(err: unknown): string {
  if (err instanceof ApiError) {
    return typeof err.detail === 'string' ? err.detail : JSON.stringify(err.detail);
  }
  return err instanceof Error ? err.message : String(err);
}

export class SessionController {
  constructor(
    private readonly client: Client,
    readonly state: Store<AppState>,
  ) {}

  async refreshList(): Promise<void> {
    await this.run(async () => {
      const sessions = await this.client.listSessions();
      this.state.patch({ sessions });
    });
  }

  async open(id: string): Promise<void> {
    await this.run(async () => {
      const session = await this.client.getSession(id);
      this.state.patch({ session, route: { page: 'session', id } });
    });
  }

  async create(body: CreateSessionBody): Promise<void> {
    await this.run(async () => {
      const created = await this.client.createSession(body);
      // refetch-after-write: display what the server now holds
      const session = await this.client.getSession(created.id);
      this.state.patch({ session, route: { page: 'session', id: session.id } });
    });
  }

  async record(body: OutcomeBody): Promise<void> {
    const session = this.state.get().session;
    if (!session) return;
    await this.run(async () => {
      const key = newIdempotencyKey();
      try {
        await this.client.postOutcome(session.id, body, key);
      } catch (err) {
        // a dropped connection may or may not have been applied; the shared
        // key makes the retry safe either way
        if (err instanceof ApiError) throw err;
        await this.client.postOutcome(session.id, body, key);
      }
      const fresh = await this.client.getSession(session.id);
      this.state.patch({ session: fresh });
    });
  }

  async consent(): Promise<void> {
    const session = this.state.get().session;
    if (!session) return;
    await this.run(async () => {
      await this.client.postConsent(session.id);
      const fresh = await this.client.getSession(session.id);
      this.state.patch({ session: fresh });
    });
  }

  goToWizard(): void {
    this.state.patch({ route: { page: 'wizard' }, error: null });
  }

  async goToList(): Promise<void> {
    this.state.patch({ route: { page: 'list' }, session: null, error: null });
    await this.refreshList();
  }

  private async run(work: () => Promise<void>): Promise<void> {
    this.state.patch({ busy: true, error: null });
    try {
      await work();
      this.state.patch({ busy: false });
    } catch (err) {
      this.state.patch({ busy: false, error: message(err) });
    }
  }
}
