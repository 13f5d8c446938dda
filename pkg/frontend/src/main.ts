import { ApiError, Client } from "./api.js";
import { barListHtml, emptyFlags, parallelSvg, radarSvg, scatterSvg } from "./charts.js";
import { RankFlow } from "./rankflow.js";
import { tableHtml } from "./table.js";
import { OBJECTIVE_LABELS, OBJECTIVE_NAMES } from "./types.js";
import type { RankResponse, ReportDoc, RunSummary } from "./types.js";

const params = new URLSearchParams(location.search);
const client = new Client(params.get("service") ?? "");

const $ = (id: string) => document.getElementById(id) as HTMLElement;

interface AppState {
  runId: string | null;
  run: RunSummary | null;
  report: ReportDoc | null;
  ranking: RankResponse | null;
  flags: ReturnType<typeof emptyFlags>;
  chartMode: "scatter" | "parallel" | "table";
  excludeDiscarded: boolean;
  pollTimer: number | null;
}

const state: AppState = {
  runId: null,
  run: null,
  report: null,
  ranking: null,
  flags: emptyFlags(),
  chartMode: "scatter",
  excludeDiscarded: false,
  pollTimer: null,
};

const flow = new RankFlow(
  (req) => client.rank(state.runId!, req),
  (resp) => {
    state.ranking = resp;
    renderTable();
    note(`ranked by ${resp.scheme} weights`);
  },
  250,
  (fn, ms) => window.setTimeout(fn, ms),
  (h) => window.clearTimeout(h as number),
  (err) => note(errText(err), true),
);

function errText(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  return String(err);
}

function note(text: string, isError = false): void {
  const el = $("note");
  el.textContent = text;
  el.className = isError ? "note error" : "note";
}

// ---------------------------------------------------------------- run lifecycle

async function refreshRunList(): Promise<void> {
  try {
    const { run_ids } = await client.listRuns();
    const select = $("run-select") as HTMLSelectElement;
    select.innerHTML =
      `<option value="">— pick a run —</option>` +
      run_ids.map((id) => `<option value="${id}">${id}</option>`).join("");
    if (state.runId) select.value = state.runId;
  } catch (err) {
    note(errText(err), true);
  }
}

async function attachRun(runId: string): Promise<void> {
  state.runId = runId;
  state.report = null;
  state.ranking = null;
  state.flags = emptyFlags();
  location.hash = `run=${runId}`;
  if (state.pollTimer !== null) window.clearInterval(state.pollTimer);
  state.pollTimer = window.setInterval(pollStatus, 1000);
  await pollStatus();
}

async function pollStatus(): Promise<void> {
  if (!state.runId) return;
  try {
    const run = await client.getRun(state.runId);
    state.run = run;
    renderStatus();
    if (run.status === "Done") {
      if (state.pollTimer !== null) window.clearInterval(state.pollTimer);
      state.pollTimer = null;
      if (!state.report) await loadReport();
    } else if (run.status === "Failed") {
      if (state.pollTimer !== null) window.clearInterval(state.pollTimer);
      state.pollTimer = null;
      note(run.error ?? "run failed", true);
    }
  } catch (err) {
    note(errText(err), true);
  }
}

async function loadReport(): Promise<void> {
  if (!state.runId || !state.run) return;
  state.report = await client.getReport(state.runId);
  state.flags.discarded = new Set(state.run.discarded_solution_ids);
  state.flags.finalChoice = state.run.final_choice?.solution_id ?? null;
  state.ranking = {
    scheme: String(state.report.provenance["primary_scheme"] ?? "rstd"),
    weights: [],
    results: [...state.report.solutions]
      .sort((a, b) => a.rank - b.rank)
      .map((s) => ({ id: s.id, ps: s.ps, rank: s.rank })),
    excluded: [],
  };
  renderAll();
}

// ---------------------------------------------------------------- rendering

function renderStatus(): void {
  const run = state.run;
  if (!run) return;
  const { evaluations_done, max_evaluations } = run.progress;
  const pct = max_evaluations ? Math.round((100 * evaluations_done) / max_evaluations) : 0;
  $("status").innerHTML =
    `<span class="pill ${run.status.toLowerCase()}">${run.status}</span> ` +
    `<span>${run.classifier.toUpperCase()} · ${evaluations_done}/${max_evaluations} evaluations</span>` +
    `<span class="progress"><span class="progress-fill" style="width:${pct}%"></span></span>` +
    (run.solutions_count !== undefined ? `<span>${run.solutions_count} solutions</span>` : "");
}

function visibleSolutions() {
  return state.report ? state.report.solutions : [];
}

function renderCharts(): void {
  if (!state.report) return;
  const sols = visibleSolutions();
  const target = $("chart-area");
  if (state.chartMode === "scatter") {
    target.innerHTML =
      scatterSvg(sols, state.flags) +
      `<p class="hint">2-D projection of the objective space, colored by similarity cluster ` +
      `(k=${state.report.elbow.k}). Dimmed points are discarded.</p>`;
  } else if (state.chartMode === "parallel") {
    target.innerHTML =
      parallelSvg(sols, state.flags) +
      `<p class="hint">One line per solution; every axis is oriented so up is better.</p>`;
  } else {
    target.innerHTML = "";
  }
  document.querySelectorAll("#chart-tabs button").forEach((b) => {
    b.classList.toggle("active", (b as HTMLElement).dataset.mode === state.chartMode);
  });
}

function renderTable(): void {
  if (!state.report || !state.ranking) return;
  $("table-area").innerHTML = tableHtml(state.report.solutions, state.ranking.results, state.flags);
}

function renderWeights(): void {
  if (!state.report) return;
  const panel = $("sliders");
  panel.innerHTML = OBJECTIVE_NAMES.map(
    (name, j) =>
      `<label class="slider-row"><span>${OBJECTIVE_LABELS[name]}</span>` +
      `<input type="range" min="0" max="100" value="50" data-slider="${j}">` +
      `<span class="slider-value" id="slider-value-${j}">50</span></label>`,
  ).join("");
}

function sliderValues(): number[] {
  return Array.from(document.querySelectorAll<HTMLInputElement>("[data-slider]")).map((el) =>
    Number(el.value),
  );
}

function renderDetail(): void {
  if (!state.report) return;
  const id = state.flags.selected;
  const panel = $("detail");
  if (id === null) {
    panel.innerHTML = `<p class="hint">Select a solution to inspect its features.</p>`;
    return;
  }
  const report = state.report;
  const s = report.solutions.find((x) => x.id === id);
  if (!s) return;
  const names = report.provenance.feature_names;
  const selectedIdx = s.mask.map((bit, j) => (bit ? j : -1)).filter((j) => j >= 0);

  const freqBars = barListHtml(
    selectedIdx.map((j) => ({
      label: names[j],
      value: report.frequency[j],
      display: `${report.frequency[j]}/${report.solutions.length}`,
    })),
  );
  let contribution = "";
  if (report.contribution.solution_id === id) {
    contribution =
      `<h4>Contribution (score attribution, ${report.contribution.samples} draws)</h4>` +
      barListHtml(
        selectedIdx
          .filter((j) => report.contribution.values[j] > 0)
          .map((j) => ({
            label: names[j],
            value: report.contribution.values[j],
            display: report.contribution.values[j].toFixed(4),
          })),
      );
  } else {
    contribution = `<p class="hint">Contribution was computed for solution ${report.contribution.solution_id}.</p>`;
  }
  const discarded = state.flags.discarded.has(id);
  const isFinal = state.flags.finalChoice === id;
  panel.innerHTML =
    `<div class="detail-head"><h3>Solution ${id}</h3>` +
    (isFinal ? `<span class="badge">final</span>` : "") +
    (discarded ? `<span class="pill failed">discarded</span>` : "") +
    `</div>` +
    `<div class="detail-grid"><div>${radarSvg(s, report.solutions)}</div>` +
    `<div><h4>Selected features (${selectedIdx.length}) — frequency in front</h4>${freqBars}${contribution}</div></div>` +
    `<div class="detail-actions">` +
    `<button id="discard-btn" ${discarded ? "disabled" : ""}>Discard</button>` +
    `<input id="final-note" placeholder="note for the record" value="">` +
    `<button id="final-btn" ${discarded ? "disabled" : ""}>Commit as final choice</button>` +
    `<button id="export-btn" ${state.flags.finalChoice === null ? "disabled" : ""}>Export chosen features</button>` +
    `</div><p class="note error" id="detail-note"></p>`;

  $("discard-btn").addEventListener("click", () => discardSelected());
  $("final-btn").addEventListener("click", () => commitSelected());
  $("export-btn").addEventListener("click", () => exportChoice());
}

function renderAll(): void {
  renderStatus();
  renderCharts();
  renderTable();
  renderWeights();
  renderDetail();
}

// ---------------------------------------------------------------- actions

async function discardSelected(): Promise<void> {
  const id = state.flags.selected;
  if (id === null || !state.runId) return;
  try {
    const run = await client.discard(state.runId, [id]);
    state.run = run;
    state.flags.discarded = new Set(run.discarded_solution_ids);
    rerank();
    renderCharts();
    renderDetail();
  } catch (err) {
    $("detail-note").textContent = errText(err);
  }
}

async function commitSelected(): Promise<void> {
  const id = state.flags.selected;
  if (id === null || !state.runId) return;
  const noteText = ($("final-note") as HTMLInputElement).value;
  try {
    const run = await client.commitFinal(state.runId, id, noteText);
    state.run = run;
    state.flags.finalChoice = run.final_choice?.solution_id ?? null;
    renderTable();
    renderDetail();
    note(`final choice committed: solution ${id}`);
  } catch (err) {
    $("detail-note").textContent = errText(err);
  }
}

async function exportChoice(): Promise<void> {
  if (!state.runId) return;
  try {
    const doc = await client.exportChoice(state.runId);
    const blob = new Blob([JSON.stringify(doc, null, 2)], { type: "application/json" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = `${doc.run_id}-solution-${doc.solution_id}.json`;
    a.click();
    URL.revokeObjectURL(a.href);
  } catch (err) {
    $("detail-note").textContent = errText(err);
  }
}

function rerank(): void {
  const active = document.querySelector<HTMLElement>("#presets button.active");
  const scheme = active?.dataset.scheme;
  if (scheme) {
    void flow.requestNow({ scheme, exclude_discarded: state.excludeDiscarded });
  } else {
    flow.request({ custom_weights: sliderValues(), exclude_discarded: state.excludeDiscarded });
  }
}

// ---------------------------------------------------------------- wiring

function wire(): void {
  $("run-select").addEventListener("change", (ev) => {
    const id = (ev.target as HTMLSelectElement).value;
    if (id) void attachRun(id);
  });
  $("refresh-runs").addEventListener("click", () => void refreshRunList());

  $("launch-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    void launchRun();
  });

  document.querySelectorAll<HTMLElement>("#chart-tabs button").forEach((b) => {
    b.addEventListener("click", () => {
      state.chartMode = b.dataset.mode as AppState["chartMode"];
      renderCharts();
    });
  });

  document.querySelectorAll<HTMLElement>("#presets button").forEach((b) => {
    b.addEventListener("click", () => {
      document
        .querySelectorAll("#presets button")
        .forEach((x) => x.classList.toggle("active", x === b));
      void flow.requestNow({
        scheme: b.dataset.scheme!,
        exclude_discarded: state.excludeDiscarded,
      });
    });
  });

  $("sliders").addEventListener("input", (ev) => {
    const el = ev.target as HTMLInputElement;
    if (el.dataset.slider === undefined) return;
    $(`slider-value-${el.dataset.slider}`).textContent = el.value;
    document.querySelectorAll("#presets button").forEach((x) => x.classList.remove("active"));
    flow.request({ custom_weights: sliderValues(), exclude_discarded: state.excludeDiscarded });
  });

  ($("exclude-discarded") as HTMLInputElement).addEventListener("change", (ev) => {
    state.excludeDiscarded = (ev.target as HTMLInputElement).checked;
    rerank();
  });

  // linked hover + selection across charts and table
  for (const area of ["chart-area", "table-area"]) {
    $(area).addEventListener("mouseover", (ev) => setHover(idOf(ev), true));
    $(area).addEventListener("mouseout", (ev) => setHover(idOf(ev), false));
    $(area).addEventListener("click", (ev) => {
      const id = idOf(ev);
      if (id !== null) {
        state.flags.selected = id;
        renderCharts();
        renderTable();
        renderDetail();
      }
    });
  }
}

function idOf(ev: Event): number | null {
  const el = (ev.target as HTMLElement).closest("[data-id]");
  return el ? Number((el as HTMLElement).dataset.id) : null;
}

function setHover(id: number | null, on: boolean): void {
  if (id === null) return;
  state.flags.hovered = on ? id : null;
  document.querySelectorAll(`[data-id="${id}"]`).forEach((el) => el.classList.toggle("hot", on));
}

async function launchRun(): Promise<void> {
  const file = ($("csv-file") as HTMLInputElement).files?.[0];
  if (!file) {
    note("choose a CSV file first", true);
    return;
  }
  const get = (id: string) => ($(id) as HTMLInputElement).value;
  try {
    note("uploading dataset…");
    const ds = await client.uploadDataset(file, file.name, {
      target: get("target-col"),
      sensitive: get("sensitive-col"),
      positive_label: get("positive-label"),
      name: file.name,
    });
    note(`dataset ${ds.dataset_id}: ${ds.n} rows × ${ds.m} features; starting run…`);
    const { run_id } = await client.createRun({
      dataset_id: ds.dataset_id,
      classifier: get("classifier"),
      overrides: { seed: Number(get("seed") || 0) },
    });
    await refreshRunList();
    await attachRun(run_id);
  } catch (err) {
    note(errText(err), true);
  }
}

async function start(): Promise<void> {
  wire();
  await refreshRunList();
  const match = location.hash.match(/run=([\w-]+)/);
  if (match) {
    const select = $("run-select") as HTMLSelectElement;
    select.value = match[1];
    await attachRun(match[1]);
  }
}

void start();
