// Create-session form. Client-side checks are about form completeness and
// number parsing only; the service re-validates everything and is the
// authority on domains.

import type { CreateSessionBody, Protocol } from './api.js';
import { parseNumberList, percent, spreadPreview } from './format.js';

export type WizardHandlers = {
  onCreate(body: CreateSessionBody): void;
  onCancel(): void;
};

function field(labelText: string, input: HTMLElement, hint?: string): HTMLElement {
  const wrap = document.createElement('label');
  wrap.className = 'field';
  const span = document.createElement('span');
  span.textContent = labelText;
  wrap.appendChild(span);
  wrap.appendChild(input);
  if (hint) {
    const small = document.createElement('small');
    small.textContent = hint;
    wrap.appendChild(small);
  }
  return wrap;
}

function textInput(name: string, placeholder = ''): HTMLInputElement {
  const input = document.createElement('input');
  input.type = 'text';
  input.name = name;
  input.placeholder = placeholder;
  return input;
}

export function renderWizard(root: HTMLElement, handlers: WizardHandlers): void {
  root.innerHTML = '';
  const form = document.createElement('form');
  form.className = 'wizard';
  form.noValidate = true;

  const heading = document.createElement('h2');
  heading.textContent = 'New session';
  form.appendChild(heading);

  const protocolSelect = document.createElement('select');
  protocolSelect.name = 'protocol';
  for (const [value, label] of [
    ['P1', 'P1 - known success probabilities'],
    ['P2', 'P2 - health scores, estimated base rate'],
    ['P3', 'P3 - P2 plus an agreed floor'],
    ['P4', 'P4 - arrivals over a finite horizon'],
  ] as const) {
    const option = document.createElement('option');
    option.value = value;
    option.textContent = label;
    protocolSelect.appendChild(option);
  }
  form.appendChild(field('Protocol', protocolSelect));

  const probsInput = textInput('probs', '0.35, 0.1, 0.05, 0.3, 0.1, 0.15, 0.25');
  const probsField = field('Success probabilities', probsInput, 'one per patient, each in (0, 1)');

  const modeSelect = document.createElement('select');
  modeSelect.name = 'h-mode';
  for (const [value, label] of [
    ['direct', 'enter the scores directly'],
    ['spread', 'elicit by rank: fix h_min and h_max, spread the rest evenly'],
  ] as const) {
    const option = document.createElement('option');
    option.value = value;
    option.textContent = label;
    modeSelect.appendChild(option);
  }
  const modeField = field('Health scores', modeSelect);

  const hInput = textInput('h', '0.5, 0.5, 0.5, 0.5, 0.5, 0.5');
  const hField = field('Scores h_1..h_n', hInput, 'relative success chances, each in (0, 1)');

  const hMinInput = textInput('h-min', '0.4');
  const hMaxInput = textInput('h-max', '0.9');
  const countInput = textInput('rank-count', '5');
  const preview = document.createElement('small');
  preview.className = 'spread-preview';
  const spreadField = document.createElement('div');
  spreadField.className = 'spread';
  spreadField.appendChild(field('Least healthy h_min', hMinInput));
  spreadField.appendChild(field('Most healthy h_max', hMaxInput));
  spreadField.appendChild(field('Number of patients', countInput));
  spreadField.appendChild(preview);

  const alphaInput = textInput('alpha', '0.5');
  const alphaField = field(
    'Floor alpha',
    alphaInput,
    'stop once the estimated chance of another success drops below this',
  );

  const maxFailInput = textInput('max-initial-failures', '');
  const maxFailField = field(
    'Cap on the opening failure run (optional)',
    maxFailInput,
    'pre-agreed consent for at most this many initial failures',
  );

  const boundsInput = textInput('bounds', '0, 10');
  const boundsField = field('Intensity bounds', boundsInput, '0, u_1, ..., t');
  const ratesInput = textInput('rates', '1.0');
  const ratesField = field('Rates per piece', ratesInput, 'one fewer than bounds');
  const priorInput = textInput('prior-mean-health', '0.5');
  const priorField = field('Prior mean health', priorInput, 'used before the first arrival');

  const error = document.createElement('p');
  error.className = 'form-error';
  error.hidden = true;

  const actions = document.createElement('div');
  actions.className = 'actions';
  const submit = document.createElement('button');
  submit.type = 'submit';
  submit.textContent = 'Create session';
  const cancel = document.createElement('button');
  cancel.type = 'button';
  cancel.textContent = 'Back';
  cancel.addEventListener('click', () => handlers.onCancel());
  actions.appendChild(submit);
  actions.appendChild(cancel);

  form.appendChild(probsField);
  form.appendChild(modeField);
  form.appendChild(hField);
  form.appendChild(spreadField);
  form.appendChild(alphaField);
  form.appendChild(maxFailField);
  form.appendChild(boundsField);
  form.appendChild(ratesField);
  form.appendChild(priorField);
  form.appendChild(error);
  form.appendChild(actions);

  function refreshPreview(): void {
    try {
      const scores = spreadPreview(
        Number(hMinInput.value),
        Number(hMaxInput.value),
        Number(countInput.value),
      );
      preview.textContent = `preview: ${scores.map((s) => s.toFixed(3)).join(', ')}`;
    } catch {
      preview.textContent = '';
    }
  }

  function syncVisibility(): void {
    const protocol = protocolSelect.value as Protocol;
    const scoreBased = protocol === 'P2' || protocol === 'P3';
    probsField.hidden = protocol !== 'P1';
    modeField.hidden = !scoreBased;
    hField.hidden = !scoreBased || modeSelect.value !== 'direct';
    spreadField.hidden = !scoreBased || modeSelect.value !== 'spread';
    alphaField.hidden = protocol !== 'P3';
    maxFailField.hidden = !scoreBased;
    boundsField.hidden = protocol !== 'P4';
    ratesField.hidden = protocol !== 'P4';
    priorField.hidden = protocol !== 'P4';
    refreshPreview();
  }

  protocolSelect.addEventListener('change', syncVisibility);
  modeSelect.addEventListener('change', syncVisibility);
  for (const input of [hMinInput, hMaxInput, countInput]) {
    input.addEventListener('input', refreshPreview);
  }

  function buildBody(): CreateSessionBody {
    const protocol = protocolSelect.value as Protocol;
    if (protocol === 'P1') {
      if (!probsInput.value.trim()) throw new Error('enter the success probabilities');
      return { protocol, probs: parseNumberList(probsInput.value) };
    }
    if (protocol === 'P2' || protocol === 'P3') {
      const body: CreateSessionBody = { protocol };
      if (modeSelect.value === 'direct') {
        if (!hInput.value.trim()) throw new Error('enter the health scores');
        body.h = parseNumberList(hInput.value);
      } else {
        const count = Number(countInput.value);
        if (!Number.isInteger(count) || count < 1) {
          throw new Error('number of patients must be a positive integer');
        }
        body.elicitation = {
          h_min: Number(hMinInput.value),
          h_max: Number(hMaxInput.value),
          ranks: Array.from({ length: count }, (_, i) => i + 1),
        };
      }
      if (protocol === 'P3') {
        if (!alphaInput.value.trim()) throw new Error('enter the floor alpha');
        body.alpha = Number(alphaInput.value);
      }
      if (maxFailInput.value.trim()) {
        body.max_initial_failures = Number(maxFailInput.value);
      }
      return body;
    }
    if (!boundsInput.value.trim() || !ratesInput.value.trim()) {
      throw new Error('enter the intensity bounds and rates');
    }
    return {
      protocol,
      bounds: parseNumberList(boundsInput.value),
      rates: parseNumberList(ratesInput.value),
      prior_mean_health: Number(priorInput.value || '0.5'),
    };
  }

  form.addEventListener('submit', (evt) => {
    evt.preventDefault();
    error.hidden = true;
    try {
      handlers.onCreate(buildBody());
    } catch (err) {
      error.textContent = err instanceof Error ? err.message : String(err);
      error.hidden = false;
    }
  });

  syncVisibility();
  root.appendChild(form);
}

export function formatAlphaMark(alpha: number): string {
  return `agreed floor ${percent(alpha, 1)}`;
}
