// Pure display helpers. The only arithmetic allowed here is presentation:
// percentages of served figures and the rank-elicitation form preview.
// Decision figures themselves always come from the service.

import type { SessionView, Source } from './api.js';

export function percent(x: number, digits = 1): string {
  return `${(100 * x).toFixed(digits)}%`;
}

export function fixed(x: number, digits = 4): string {
  return x.toFixed(digits);
}

// Form preview of the rank elicitation: count scores spread evenly from
// hMin to hMax. The service recomputes the authoritative values when the
// session is created; this exists so the operator sees the spread while
// typing.
export function spreadPreview(hMin: number, hMax: number, count: number): number[] {
  if (!(count >= 1) || !Number.isInteger(count)) {
    throw new Error(`count must be a positive integer, got ${count}`);
  }
  if (!(hMin > 0 && hMax < 1 && hMin <= hMax)) {
    throw new Error(`need 0 < h_min <= h_max < 1, got ${hMin}..${hMax}`);
  }
  if (count === 1) return [(hMin + hMax) / 2];
  const step = (hMax - hMin) / (count - 1);
  return Array.from({ length: count }, (_, i) => hMin + i * step);
}

export function parseNumberList(text: string): number[] {
  const parts = text
    .split(/[\s,]+/)
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
  if (parts.length === 0) throw new Error('enter at least one number');
  return parts.map((part) => {
    const value = Number(part);
    if (!Number.isFinite(value)) throw new Error(`not a number: ${part}`);
    return value;
  });
}

export function describeSource(source: Source): string {
  switch (source) {
    case 'odds-rule':
      return 'threshold rule on the known odds';
    case 'estimated-odds-rule':
      return 'estimated future odds fell below 1';
    case 'threshold':
      return 'estimated chance of another success fell below the agreed floor';
    case 'consent-policy':
      return 'consent policy';
    default:
      return '';
  }
}

export function statusLabel(view: SessionView): string {
  return view.status;
}

// Terminal banner for a stopped session. For known-odds sessions the banner
// carries the plan values the operator acted on; for estimated sessions the
// last inference figures; all straight from the response.
export function stopBannerText(view: SessionView): string {
  const fig = view.recommendation.figures;
  const why = describeSource(view.recommendation.source);
  const tail = `${view.k} treated, ${view.S} success${view.S === 1 ? '' : 'es'}`;
  if (fig && fig.kind === 'plan') {
    return (
      `Stopped (${why}). Threshold s = ${fig.s}, ` +
      `win probability V = ${percent(fig.V, 2)} (${fixed(fig.V, 6)}). ${tail}.`
    );
  }
  if (fig && fig.kind === 'inference') {
    const sum = fig.future_odds_finite ? fixed(fig.future_odds_sum ?? 0, 4) : 'inf';
    return (
      `Stopped (${why}). Estimated future odds sum ${sum}, ` +
      `chance of another success ${percent(1 - fig.prob_no_further, 1)}. ${tail}.`
    );
  }
  if (fig && fig.kind === 'refusal') {
    return (
      `Stopped (${why}). Remaining odds integral ` +
      `${fixed(fig.integral_value, 4)} at t = ${fixed(fig.at_time, 3)}. ${tail}.`
    );
  }
  return `Stopped (${why}). ${tail}.`;
}

export function consentPromptText(view: SessionView): string {
  const fig = view.recommendation.figures;
  if (fig && fig.kind === 'inference') {
    return (
      'No success so far, so the engine has no estimate to stand on. ' +
      `After ${view.k} treated: continue only by explicit agreement.`
    );
  }
  return (
    'No success recorded yet, so the figures are not informative. ' +
    'Continue only by explicit agreement.'
  );
}

export function eventSummary(kind: string, payload: Record<string, unknown>): string {
  if (kind === 'outcome') {
    const parts = [`outcome ${String(payload['outcome'] ?? '?')}`];
    if (payload['time'] !== undefined && payload['time'] !== null) {
      parts.push(`t = ${String(payload['time'])}`);
    }
    if (payload['h_observed'] !== undefined && payload['h_observed'] !== null) {
      parts.push(`h = ${String(payload['h_observed'])}`);
    }
    return parts.join(', ');
  }
  if (kind === 'created') return 'session created';
  if (kind === 'consent') return 'consent granted';
  return kind;
}
