// Live session view: status, the current recommendation with its figures,
// outcome controls, and the event log. Pure rendering of a SessionView;
// state changes flow back through the handlers.

import type {
  InferenceFigures,
  PlanFigures,
  RefusalFigures,
  SessionView,
} from './api.js';
import {
  consentPromptText,
  describeSource,
  eventSummary,
  fixed,
  percent,
  stopBannerText,
} from './format.js';

export type ViewHandlers = {
  onOutcome(outcome: '+' | '-', extra?: { time?: number; h_observed?: number }): void;
  onConsent(): void;
  onBack(): void;
};

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function figureRow(dl: HTMLElement, label: string, value: string): void {
  dl.appendChild(el('dt', '', label));
  dl.appendChild(el('dd', '', value));
}

function renderPlanFigures(fig: PlanFigures): HTMLElement {
  const panel = el('section', 'figures plan-figures');
  panel.appendChild(el('h3', '', 'Plan'));
  const dl = el('dl', 'figure-list');
  figureRow(dl, 'Threshold s', String(fig.s));
  figureRow(dl, 'Suffix odds sum R', fixed(fig.R, 6));
  figureRow(dl, 'Suffix failure product Q', fixed(fig.Q, 6));
  figureRow(dl, 'Win probability V', `${percent(fig.V, 2)} (${fixed(fig.V, 6)})`);
  panel.appendChild(dl);
  const curve = el('div', 'curve');
  const peak = Math.max(...fig.curve);
  fig.curve.forEach((value, i) => {
    const bar = el('div', 'curve-bar');
    bar.style.height = `${Math.max(2, Math.round((56 * value) / (peak || 1)))}px`;
    bar.title = `s = ${i + 1}: ${percent(value, 2)}`;
    if (i + 1 === fig.s) bar.classList.add('curve-peak');
    curve.appendChild(bar);
  });
  panel.appendChild(curve);
  return panel;
}

function renderInferenceFigures(fig: InferenceFigures, alpha: number | null): HTMLElement {
  const panel = el('section', 'figures inference-figures');
  panel.appendChild(el('h3', '', 'Estimates after ' + fig.k + ' outcomes'));
  const dl = el('dl', 'figure-list');
  figureRow(dl, 'Successes S', String(fig.S));
  figureRow(dl, 'Estimated base rate', percent(fig.p_hat, 1));
  figureRow(
    dl,
    'Estimated future odds sum',
    fig.future_odds_finite ? fixed(fig.future_odds_sum ?? 0, 4) : 'unbounded',
  );
  figureRow(dl, 'Expected further successes', fixed(fig.expected_further, 2));
  const anyFurther = 1 - fig.prob_no_further;
  const chance = el('dd', 'chance-any-further', percent(anyFurther, 1));
  dl.appendChild(el('dt', '', 'Chance of another success'));
  if (alpha !== null) {
    chance.textContent += ` (agreed floor ${percent(alpha, 1)})`;
    if (anyFurther < alpha) chance.classList.add('below-floor');
  }
  dl.appendChild(chance);
  panel.appendChild(dl);
  if (fig.p_future_clamped) {
    panel.appendChild(
      el('p', 'note', 'Some per-patient estimates were capped at certainty.'),
    );
  }
  return panel;
}

function renderRefusalFigures(fig: RefusalFigures): HTMLElement {
  const panel = el('section', 'figures refusal-figures');
  panel.appendChild(el('h3', '', 'Remaining-odds integral'));
  const dl = el('dl', 'figure-list');
  figureRow(dl, 'Evaluated at time', fixed(fig.at_time, 3));
  figureRow(dl, 'Integral value', fixed(fig.integral_value, 4));
  figureRow(dl, 'Refuse new arrivals', fig.refuse_from_now ? 'yes' : 'not yet');
  figureRow(dl, 'Success predictor', fixed(fig.predictor, 4));
  figureRow(dl, 'Mean health', fixed(fig.mean_health, 4));
  panel.appendChild(dl);
  if (fig.prior_based) {
    panel.appendChild(el('p', 'note', 'Based on the prior; no arrivals yet.'));
  }
  return panel;
}

function renderBanner(view: SessionView, handlers: ViewHandlers): HTMLElement {
  const action = view.recommendation.action;
  if (view.status === 'Stopped') {
    return el('div', 'banner stop', stopBannerText(view));
  }
  if (view.status === 'ConsentRequired') {
    const dialog = el('div', 'banner consent');
    dialog.setAttribute('role', 'dialog');
    dialog.appendChild(el('p', 'consent-text', consentPromptText(view)));
    const button = document.createElement('button');
    button.className = 'consent-button';
    button.textContent = 'We agree: continue treating';
    button.addEventListener('click', () => handlers.onConsent());
    dialog.appendChild(button);
    return dialog;
  }
  if (action === 'Armed' || view.status === 'Armed') {
    return el(
      'div',
      'banner armed',
      'Armed: stop at the next success. ' + describeSource(view.recommendation.source),
    );
  }
  return el('div', 'banner continue', 'Continue treating.');
}

function renderControls(view: SessionView, handlers: ViewHandlers): HTMLElement {
  const controls = el('div', 'controls');
  const locked = view.status === 'Stopped';
  const needsConsent = view.status === 'ConsentRequired';

  let timeInput: HTMLInputElement | null = null;
  let hInput: HTMLInputElement | null = null;
  if (view.protocol === 'P4') {
    timeInput = document.createElement('input');
    timeInput.type = 'number';
    timeInput.step = 'any';
    timeInput.placeholder = 'arrival time';
    timeInput.className = 'time-input';
    hInput = document.createElement('input');
    hInput.type = 'number';
    hInput.step = 'any';
    hInput.placeholder = 'observed h';
    hInput.className = 'h-input';
    controls.appendChild(timeInput);
    controls.appendChild(hInput);
  }

  for (const outcome of ['+', '-'] as const) {
    const button = document.createElement('button');
    button.className = outcome === '+' ? 'outcome success' : 'outcome failure';
    button.textContent = outcome === '+' ? '+ success' : '- failure';
    button.disabled = locked || needsConsent;
    button.addEventListener('click', () => {
      const extra =
        view.protocol === 'P4'
          ? { time: Number(timeInput?.value), h_observed: Number(hInput?.value) }
          : undefined;
      handlers.onOutcome(outcome, extra);
    });
    controls.appendChild(button);
  }
  return controls;
}

export function renderSession(
  root: HTMLElement,
  view: SessionView,
  handlers: ViewHandlers,
): void {
  root.innerHTML = '';
  const page = el('div', 'session');

  const header = el('header', 'session-header');
  const back = document.createElement('button');
  back.className = 'back';
  back.textContent = 'Sessions';
  back.addEventListener('click', () => handlers.onBack());
  header.appendChild(back);
  header.appendChild(el('h2', '', `${view.protocol} session ${view.id}`));
  header.appendChild(el('span', `status status-${view.status.toLowerCase()}`, view.status));
  const n = view.n === null ? 'open-ended' : `of ${view.n}`;
  header.appendChild(
    el('span', 'progress', `${view.k} treated ${n}, ${view.S} successes`),
  );
  page.appendChild(header);

  page.appendChild(renderBanner(view, handlers));

  const fig = view.recommendation.figures;
  if (fig && fig.kind === 'plan') page.appendChild(renderPlanFigures(fig));
  if (fig && fig.kind === 'inference') {
    const alphaRaw = view.config['alpha'];
    const alpha = typeof alphaRaw === 'number' && alphaRaw > 0 ? alphaRaw : null;
    page.appendChild(renderInferenceFigures(fig, alpha));
  }
  if (fig && fig.kind === 'refusal') page.appendChild(renderRefusalFigures(fig));

  page.appendChild(renderControls(view, handlers));

  const log = el('section', 'events');
  log.appendChild(el('h3', '', 'Event log'));
  const table = document.createElement('table');
  const head = document.createElement('tr');
  for (const column of ['#', 'kind', 'details']) {
    head.appendChild(el('th', '', column));
  }
  table.appendChild(head);
  for (const event of view.events) {
    const row = document.createElement('tr');
    row.appendChild(el('td', '', String(event.seq)));
    row.appendChild(el('td', '', event.kind));
    row.appendChild(el('td', '', eventSummary(event.kind, event.payload)));
    table.appendChild(row);
  }
  log.appendChild(table);
  page.appendChild(log);

  root.appendChild(page);
}
