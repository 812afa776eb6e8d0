// HTML fragments for the detail pane. Kept DOM-free (string building only)
// so the contract tests can run under node.

import type { EventDetail, EventStatus, HazardTriangle } from './api.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

/**
 * The review card as a definition list. Row order is exactly the server's
 * card order — the backend owns the layout (it renders the same card in
 * CLI exports), the client must not reorder it.
 */
export function cardHtml(card: [string, string][]): string {
  const rows = card
    .map(
      ([label, value]) =>
        `<div class="card-row"><dt>${escapeHtml(label)}</dt><dd>${escapeHtml(value)}</dd></div>`,
    )
    .join('');
  return `<dl class="card">${rows}</dl>`;
}

/** Labels in display order; used by tests and by the column picker. */
export function cardLabels(detail: EventDetail): string[] {
  return detail.card.map(([label]) => label);
}

export function triangleHtml(triangle: HazardTriangle): string {
  const leg = (name: string, value: string) =>
    `<div class="leg"><span class="leg-name">${escapeHtml(name)}</span>` +
    `<span class="leg-value">${escapeHtml(value)}</span></div>`;
  return (
    '<div class="triangle">' +
    leg('Hazardous element', triangle.hazardous_element) +
    leg('Initiating mechanism', triangle.initiating_mechanism) +
    leg('Target', triangle.target) +
    '</div>'
  );
}

const STATUS_LABELS: Record<EventStatus, string> = {
  pending: 'Pending',
  hazardous: 'Hazardous',
  not_hazardous: 'Not hazardous',
  unsure: 'Unsure',
};

export function statusLabel(status: EventStatus): string {
  return STATUS_LABELS[status] ?? status;
}

export function statusBadgeHtml(status: EventStatus): string {
  return `<span class="badge badge-${status}">${escapeHtml(statusLabel(status))}</span>`;
}
