// Review-queue rules and pagination arithmetic, separated from the DOM so
// the verdict workflow is testable.

import type { Progress, Verdict } from './api.js';

/** Keyboard mapping for verdicts: h / n / u. */
export function verdictForKey(key: string): Verdict | null {
  switch (key) {
    case 'h':
      return 'hazardous';
    case 'n':
      return 'not_hazardous';
    case 'u':
      return 'unsure';
    default:
      return null;
  }
}

/**
 * Returns a user-facing blocker for a submission, or null when it may go
 * out. Mirrors the server rule so the reviewer gets feedback before the
 * round trip (the server still enforces it).
 */
export function submissionBlocker(verdict: Verdict | null, rationale: string): string | null {
  if (verdict === null) return 'pick a verdict first (h / n / u)';
  if (verdict === 'hazardous' && rationale.trim() === '') {
    return 'a hazardous verdict requires a rationale';
  }
  return null;
}

/** Clamp a selection index into a page of the given length. */
export function clampIndex(index: number, length: number): number {
  if (length <= 0) return 0;
  return Math.min(Math.max(index, 0), length - 1);
}

/**
 * Offset after paging by `direction` (+1 / -1). Stays on the current page
 * when there is nothing further in that direction.
 */
export function pagedOffset(offset: number, limit: number, total: number, direction: 1 | -1): number {
  const next = offset + direction * limit;
  if (next < 0) return 0;
  if (next >= total) return offset;
  return next;
}

export function pageDescription(offset: number, limit: number, total: number): string {
  if (total === 0) return 'no events';
  const first = offset + 1;
  const last = Math.min(offset + limit, total);
  return `${first}–${last} of ${total}`;
}

export function percentAssessed(progress: Progress): number {
  if (progress.relevant === 0) return 0;
  return Math.round((progress.assessed / progress.relevant) * 100);
}
