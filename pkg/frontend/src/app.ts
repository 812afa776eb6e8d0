// Review client: queue on the left, card + verdict form on the right,
// progress dashboard on top. Talks only to the hazident HTTP API.

import { ApiError, ReviewApi } from './api.js';
import type { EventDetail, EventPage, EventStatus, Progress, Verdict } from './api.js';
import { cardHtml, escapeHtml, statusBadgeHtml, statusLabel, triangleHtml } from './cards.js';
import {
  clampIndex,
  pagedOffset,
  pageDescription,
  percentAssessed,
  submissionBlocker,
  verdictForKey,
} from './queue.js';

const api = new ReviewApi('');

// State
let runId: string | null = null;
let page: EventPage | null = null;
let progress: Progress | null = null;
let detail: EventDetail | null = null;
let selectedIndex = 0;
let offset = 0;
let pendingVerdict: Verdict | null = null;
const limit = 50;

// DOM elements
const runSelect = document.getElementById('run-select') as HTMLSelectElement;
const modeSelect = document.getElementById('mode-filter') as HTMLSelectElement;
const statusSelect = document.getElementById('status-filter') as HTMLSelectElement;
const queueBody = document.getElementById('queue-body')!;
const pageInfo = document.getElementById('page-info')!;
const prevBtn = document.getElementById('prev-page') as HTMLButtonElement;
const nextBtn = document.getElementById('next-page') as HTMLButtonElement;
const detailPane = document.getElementById('detail')!;
const verdictButtons = Array.from(
  document.querySelectorAll<HTMLButtonElement>('button[data-verdict]'),
);
const rationaleInput = document.getElementById('rationale') as HTMLTextAreaElement;
const assessorInput = document.getElementById('assessor') as HTMLInputElement;
const submitBtn = document.getElementById('submit-verdict') as HTMLButtonElement;
const formError = document.getElementById('form-error')!;
const progressBar = document.getElementById('progress-bar')!;
const progressText = document.getElementById('progress-text')!;
const modeTable = document.getElementById('mode-table')!;

function selectedEventId(): string | null {
  if (!page || page.events.length === 0) return null;
  const row = page.events[clampIndex(selectedIndex, page.events.length)];
  return row ? row.id : null;
}

async function init(): Promise<void> {
  const runs = await api.listRuns();
  runSelect.innerHTML = runs
    .map(
      (run) =>
        `<option value="${escapeHtml(run.run_id)}">` +
        `${escapeHtml(run.config_name || run.run_id.slice(0, 12))} — ` +
        `${run.relevant_count} relevant</option>`,
    )
    .join('');
  if (runs.length === 0) {
    queueBody.innerHTML = '<tr><td colspan="5">no runs in the store</td></tr>';
    return;
  }
  runId = runs[0]!.run_id;
  runSelect.value = runId;
  await refreshProgress();
  populateFilters();
  await loadPage(0);
  setupListeners();
}

function populateFilters(): void {
  const modes = progress ? progress.by_mode : [];
  modeSelect.innerHTML =
    '<option value="">all modes</option>' +
    modes
      .map((m) => `<option value="${escapeHtml(m.mode)}">${escapeHtml(m.mode_name)}</option>`)
      .join('');
  const statuses: EventStatus[] = ['pending', 'hazardous', 'not_hazardous', 'unsure'];
  statusSelect.innerHTML =
    '<option value="">any status</option>' +
    statuses.map((s) => `<option value="${s}">${statusLabel(s)}</option>`).join('');
}

async function refreshProgress(): Promise<void> {
  if (!runId) return;
  progress = await api.progress(runId);
  const pct = percentAssessed(progress);
  progressBar.style.width = `${pct}%`;
  progressText.textContent =
    `${progress.assessed} of ${progress.relevant} assessed (${pct}%) — ` +
    `${progress.by_status.hazardous} hazardous, ` +
    `${progress.by_status.not_hazardous} not hazardous, ` +
    `${progress.by_status.unsure} unsure`;
  modeTable.innerHTML = progress.by_mode
    .map(
      (m) =>
        `<tr><td>${escapeHtml(m.mode_name)}</td><td>${m.relevant}</td>` +
        `<td>${m.assessed}</td><td>${m.hazardous}</td></tr>`,
    )
    .join('');
}

async function loadPage(newOffset: number): Promise<void> {
  if (!runId) return;
  offset = newOffset;
  page = await api.listEvents(runId, {
    offset,
    limit,
    mode: modeSelect.value || undefined,
    status: (statusSelect.value as EventStatus) || undefined,
  });
  selectedIndex = clampIndex(selectedIndex, page.events.length);
  renderQueue();
  pageInfo.textContent = pageDescription(page.offset, page.events.length, page.total);
  prevBtn.disabled = offset === 0;
  nextBtn.disabled = offset + limit >= page.total;
  await showSelected();
}

function renderQueue(): void {
  if (!page || page.events.length === 0) {
    queueBody.innerHTML = '<tr><td colspan="5">nothing matches the filter</td></tr>';
    detailPane.innerHTML = '';
    return;
  }
  queueBody.innerHTML = page.events
    .map((event, index) => {
      const classes = index === selectedIndex ? 'selected' : '';
      return (
        `<tr class="${classes}" data-index="${index}">` +
        `<td class="mono">${escapeHtml(event.id)}</td>` +
        `<td>${escapeHtml(event.skill_name ?? '—')}</td>` +
        `<td class="malf">${escapeHtml(event.malfunction ?? '(nominal)')}</td>` +
        `<td class="mono">${escapeHtml(event.scene_id)}</td>` +
        `<td>${statusBadgeHtml(event.status)}</td></tr>`
      );
    })
    .join('');
}

async function showSelected(): Promise<void> {
  const eventId = selectedEventId();
  if (!runId || !eventId) return;
  detail = await api.eventDetail(runId, eventId);
  const assessment = detail.assessment;
  detailPane.innerHTML =
    `<h2 class="mono">${escapeHtml(detail.event.id)}</h2>` +
    cardHtml(detail.card) +
    '<h3>Hazard triangle</h3>' +
    triangleHtml(detail.triangle) +
    (assessment
      ? `<p class="current">Current verdict: ${statusBadgeHtml(assessment.status)}` +
        (assessment.rationale ? ` — ${escapeHtml(assessment.rationale)}` : '') +
        (assessment.assessor ? ` <span class="assessor">(${escapeHtml(assessment.assessor)})</span>` : '') +
        '</p>'
      : '<p class="current">No verdict yet.</p>');
  pendingVerdict = assessment ? assessment.status : null;
  rationaleInput.value = assessment ? assessment.rationale : '';
  highlightVerdictButtons();
}

function highlightVerdictButtons(): void {
  for (const button of verdictButtons) {
    button.classList.toggle('active', button.dataset.verdict === pendingVerdict);
  }
}

async function submitVerdict(): Promise<void> {
  const eventId = selectedEventId();
  if (!runId || !eventId) return;
  const blocker = submissionBlocker(pendingVerdict, rationaleInput.value);
  if (blocker) {
    formError.textContent = blocker;
    return;
  }
  formError.textContent = '';
  try {
    await api.putAssessment(
      runId,
      eventId,
      pendingVerdict as Verdict,
      rationaleInput.value,
      assessorInput.value,
    );
  } catch (error) {
    formError.textContent =
      error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
    return;
  }
  await refreshProgress();
  // Reload the page in place (a status filter may have consumed the row),
  // then advance to the next event in the queue.
  const before = selectedIndex;
  await loadPage(offset);
  if (page && page.events.length > 0) {
    selectedIndex = clampIndex(before + 1, page.events.length);
    renderQueue();
    await showSelected();
  }
}

function setupListeners(): void {
  runSelect.addEventListener('change', async () => {
    runId = runSelect.value;
    selectedIndex = 0;
    await refreshProgress();
    populateFilters();
    await loadPage(0);
  });
  modeSelect.addEventListener('change', () => void loadPage(0));
  statusSelect.addEventListener('change', () => void loadPage(0));
  prevBtn.addEventListener('click', () => {
    if (page) void loadPage(pagedOffset(offset, limit, page.total, -1));
  });
  nextBtn.addEventListener('click', () => {
    if (page) void loadPage(pagedOffset(offset, limit, page.total, 1));
  });
  queueBody.addEventListener('click', (event) => {
    const row = (event.target as HTMLElement).closest('tr[data-index]');
    if (!row) return;
    selectedIndex = Number((row as HTMLElement).dataset.index);
    renderQueue();
    void showSelected();
  });
  for (const button of verdictButtons) {
    button.addEventListener('click', () => {
      pendingVerdict = button.dataset.verdict as Verdict;
      highlightVerdictButtons();
    });
  }
  submitBtn.addEventListener('click', () => void submitVerdict());
  document.addEventListener('keydown', (event) => {
    // Keyboard-first flow; keys are inert while typing a rationale.
    const typing = event.target instanceof HTMLTextAreaElement || event.target instanceof HTMLInputElement;
    if (typing) {
      if (event.key === 'Escape') (event.target as HTMLElement).blur();
      if (event.key === 'Enter' && event.target === rationaleInput && !event.shiftKey) {
        event.preventDefault();
        void submitVerdict();
      }
      return;
    }
    if (!page || page.events.length === 0) return;
    if (event.key === 'j' || event.key === 'ArrowDown') {
      selectedIndex = clampIndex(selectedIndex + 1, page.events.length);
      renderQueue();
      void showSelected();
    } else if (event.key === 'k' || event.key === 'ArrowUp') {
      selectedIndex = clampIndex(selectedIndex - 1, page.events.length);
      renderQueue();
      void showSelected();
    } else if (event.key === 'r') {
      event.preventDefault();
      rationaleInput.focus();
    } else if (event.key === 'Enter') {
      void submitVerdict();
    } else {
      const verdict = verdictForKey(event.key);
      if (verdict) {
        pendingVerdict = verdict;
        highlightVerdictButtons();
      }
    }
  });
}

void init().catch((error) => {
  document.body.innerHTML = `<pre class="fatal">${escapeHtml(String(error))}</pre>`;
});
