// App shell: routes between the session list, the wizard, and the live view.
// The service is the single source of truth; this file only wires events.

import { Client, type SessionSummary } from './api.js';
import { initialState, SessionController, Store, type AppState } from './store.js';
import { renderWizard } from './wizard.js';
import { renderSession } from './view.js';

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderList(
  root: HTMLElement,
  sessions: SessionSummary[],
  handlers: { onOpen(id: string): void; onNew(): void; onRefresh(): void },
): void {
  root.innerHTML = '';
  const page = el('div', 'session-list');
  const header = el('header', 'list-header');
  header.appendChild(el('h2', '', 'Sessions'));
  const newButton = document.createElement('button');
  newButton.className = 'new-session';
  newButton.textContent = 'New session';
  newButton.addEventListener('click', () => handlers.onNew());
  header.appendChild(newButton);
  const refresh = document.createElement('button');
  refresh.className = 'refresh';
  refresh.textContent = 'Refresh';
  refresh.addEventListener('click', () => handlers.onRefresh());
  header.appendChild(refresh);
  page.appendChild(header);

  if (sessions.length === 0) {
    page.appendChild(el('p', 'empty', 'No sessions yet.'));
  } else {
    const table = document.createElement('table');
    const head = document.createElement('tr');
    for (const column of ['id', 'protocol', 'status', 'treated', 'successes']) {
      head.appendChild(el('th', '', column));
    }
    table.appendChild(head);
    for (const summary of sessions) {
      const row = document.createElement('tr');
      row.className = 'session-row';
      const idCell = el('td', '');
      const link = document.createElement('a');
      link.href = `#/s/${summary.id}`;
      link.textContent = summary.id;
      link.addEventListener('click', (evt) => {
        evt.preventDefault();
        handlers.onOpen(summary.id);
      });
      idCell.appendChild(link);
      row.appendChild(idCell);
      row.appendChild(el('td', '', summary.protocol));
      row.appendChild(el('td', `status-${summary.status.toLowerCase()}`, summary.status));
      row.appendChild(el('td', '', String(summary.k)));
      row.appendChild(el('td', '', String(summary.S)));
      table.appendChild(row);
    }
    page.appendChild(table);
  }
  root.appendChild(page);
}

export function startApp(root: HTMLElement, client: Client): SessionController {
  const state = new Store<AppState>(initialState());
  const controller = new SessionController(client, state);

  function render(): void {
    const app = state.get();
    root.innerHTML = '';

    const shell = el('div', 'shell');
    const title = el('h1', 'title', 'Last-success stopping sessions');
    shell.appendChild(title);

    if (app.error) {
      shell.appendChild(el('p', 'app-error', app.error));
    }
    if (app.busy) {
      shell.appendChild(el('p', 'busy', 'working...'));
    }

    const body = el('div', 'body');
    if (app.route.page === 'wizard') {
      renderWizard(body, {
        onCreate: (createBody) => void controller.create(createBody),
        onCancel: () => void controller.goToList(),
      });
    } else if (app.route.page === 'session' && app.session) {
      renderSession(body, app.session, {
        onOutcome: (outcome, extra) => void controller.record({ outcome, ...extra }),
        onConsent: () => void controller.consent(),
        onBack: () => void controller.goToList(),
      });
    } else {
      renderList(body, app.sessions, {
        onOpen: (id) => void controller.open(id),
        onNew: () => controller.goToWizard(),
        onRefresh: () => void controller.refreshList(),
      });
    }
    shell.appendChild(body);
    root.appendChild(shell);
  }

  state.subscribe(render);
  render();
  void controller.refreshList();
  return controller;
}

function apiBase(): string {
  const params = new URLSearchParams(window.location.search);
  const fromQuery = params.get('api');
  if (fromQuery) {
    window.localStorage.setItem('lastsuccess-api', fromQuery);
    return fromQuery;
  }
  return window.localStorage.getItem('lastsuccess-api') ?? 'http://127.0.0.1:8000';
}

function tokenFromQuery(): string | undefined {
  const params = new URLSearchParams(window.location.search);
  const fromQuery = params.get('token');
  if (fromQuery) {
    window.localStorage.setItem('lastsuccess-token', fromQuery);
    return fromQuery;
  }
  return window.localStorage.getItem('lastsuccess-token') ?? undefined;
}

const mountPoint = document.getElementById('app');
if (mountPoint) {
  startApp(mountPoint, new Client(apiBase(), tokenFromQuery()));
}
