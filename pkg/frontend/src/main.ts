// DOM wiring: live recompute of the guideline and curves on edit, pinned
// snapshots feeding the comparison view, explicit-click simulation, and
// document export. All rendering goes through the pure view modules.

import { fetchGuideline, fetchOc, fetchSimulate, isAbort, ServiceError } from "./api.js";
import { compareScenarios, renderComparison, type Snapshot } from "./compare.js";
import { renderPowerCurves } from "./curves.js";
import {
  addMilestone,
  canSubmit,
  emptyForm,
  fromDocument,
  removeMilestone,
  toDocument,
  withField,
  type DesignFormState,
} from "./state.js";
import { renderErrorPanel, renderGuidelineView, renderSimulationView } from "./table.js";
import type { GuidelineArtifact, OcArtifact } from "./types.js";

const DEBOUNCE_MS = 300;

interface PinnedScenario extends Snapshot {
  oc: OcArtifact;
}

let state: DesignFormState = emptyForm();
let lastGuideline: GuidelineArtifact | null = null;
let lastOc: OcArtifact | null = null;
const pinned: PinnedScenario[] = [];
let timer: number | undefined;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

const PARAM_FIELDS: Array<[string, string, string]> = [
  // [withField path, document field path, label]
  ["deltaNull", "delta_null", "Harm margin delta_null"],
  ["deltaAlt", "delta_alt", "Benefit HR delta_alt"],
  ["gammaFa", "gamma_fa", "Final false-positive rate gamma_FA"],
  ["betaPa", "beta_pa", "False-negative rate beta_PA"],
  ["k", "k", "Allocation ratio k (test:control)"],
  ["probeHrs", "probe_hrs", "Probe HRs (comma separated)"],
];

const SCENARIO_FIELDS: Array<[string, string, string]> = [
  ["scenario.nPatients", "scenario.n_patients", "Patients"],
  ["scenario.accrualMonths", "scenario.accrual_months", "Accrual (months)"],
  [
    "scenario.controlMedianOsMonths",
    "scenario.control_median_os_months",
    "Control median OS (months)",
  ],
  ["scenario.trueOsHr", "scenario.true_os_hr", "True OS HR"],
  ["scenario.annualDropoutProb", "scenario.annual_dropout_prob", "Annual dropout"],
];

const SIM_FIELDS: Array<[string, string, string]> = [
  ["sim.reps", "sim.reps", "Replications"],
  ["sim.seed", "sim.seed", "Seed"],
];

function fieldRow([path, docPath, label]: [string, string, string], value: string): string {
  return (
    `<label>${label}` +
    `<input data-path="${path}" data-field="${docPath}" value="${value}">` +
    `<span class="field-error" data-for="${docPath}"></span></label>`
  );
}

function milestoneRows(): string {
  return state.milestones
    .map(
      (m, i) =>
        `<div class="milestone-row">` +
        `<input class="deaths" data-path="milestones[${i}].deaths" ` +
        `data-field="milestones[${i}].deaths" value="${m.deaths}" placeholder="deaths">` +
        `<label class="final"><input type="checkbox" data-path="milestones[${i}].final" ` +
        `${m.final ? "checked" : ""}>final</label>` +
        `<button type="button" class="remove" data-index="${i}">remove</button>` +
        `<span class="field-error" data-for="milestones[${i}].deaths"></span></div>`,
    )
    .join("");
}

function lookup(state: DesignFormState, path: string): string {
  switch (path) {
    case "deltaNull":
      return state.deltaNull;
    case "deltaAlt":
      return state.deltaAlt;
    case "gammaFa":
      return state.gammaFa;
    case "betaPa":
      return state.betaPa;
    case "k":
      return state.k;
    case "probeHrs":
      return state.probeHrs;
    case "scenario.nPatients":
      return state.scenario.nPatients;
    case "scenario.accrualMonths":
      return state.scenario.accrualMonths;
    case "scenario.controlMedianOsMonths":
      return state.scenario.controlMedianOsMonths;
    case "scenario.trueOsHr":
      return state.scenario.trueOsHr;
    case "scenario.annualDropoutProb":
      return state.scenario.annualDropoutProb;
    case "sim.reps":
      return state.sim.reps;
    case "sim.seed":
      return state.sim.seed;
    default:
      return "";
  }
}

function buildForm(): void {
  $("form").innerHTML =
    `<fieldset><legend>Design</legend>` +
    PARAM_FIELDS.map((f) => fieldRow(f, lookup(state, f[0]))).join("") +
    `</fieldset>` +
    `<fieldset><legend>Death milestones</legend>` +
    `<div id="milestones">${milestoneRows()}</div>` +
    `<button type="button" id="add-milestone">add milestone</button>` +
    `<span class="field-error" data-for="milestones"></span></fieldset>` +
    `<fieldset><legend>Trial scenario ` +
    `<input type="checkbox" data-path="scenario.enabled" ${state.scenario.enabled ? "checked" : ""}>` +
    `</legend><div id="scenario-fields" ${state.scenario.enabled ? "" : "hidden"}>` +
    SCENARIO_FIELDS.map((f) => fieldRow(f, lookup(state, f[0]))).join("") +
    `</div></fieldset>` +
    `<fieldset><legend>Simulation ` +
    `<input type="checkbox" data-path="sim.enabled" ${state.sim.enabled ? "checked" : ""}>` +
    `</legend><div id="sim-fields" ${state.sim.enabled ? "" : "hidden"}>` +
    SIM_FIELDS.map((f) => fieldRow(f, lookup(state, f[0]))).join("") +
    `</div></fieldset>`;
}

function showFieldErrors(serverError?: ServiceError): void {
  document.querySelectorAll<HTMLElement>(".field-error").forEach((span) => {
    const key = span.dataset["for"] ?? "";
    let message = state.errors[key] ?? "";
    if (!message && serverError && serverError.fieldPath === key) {
      message = serverError.message;
    }
    span.textContent = message;
  });
  $("service-error").innerHTML =
    serverError && !serverError.fieldPath
      ? renderErrorPanel({ code: serverError.code, message: serverError.message })
      : "";
}

function scheduleRecompute(): void {
  window.clearTimeout(timer);
  timer = window.setTimeout(() => void recompute(), DEBOUNCE_MS);
}

async function recompute(): Promise<void> {
  showFieldErrors();
  ($("simulate") as HTMLButtonElement).disabled = !(
    canSubmit(state) && state.scenario.enabled && state.sim.enabled
  );
  ($("pin") as HTMLButtonElement).disabled = true;
  ($("export") as HTMLButtonElement).disabled = !canSubmit(state);
  if (!canSubmit(state)) return;
  const doc = toDocument(state);
  try {
    const [guideline, oc] = await Promise.all([fetchGuideline(doc), fetchOc(doc)]);
    lastGuideline = guideline;
    lastOc = oc;
    $("guideline").innerHTML = renderGuidelineView(guideline);
    renderCurves();
    ($("pin") as HTMLButtonElement).disabled = false;
    showFieldErrors();
  } catch (err) {
    if (isAbort(err)) return;
    if (err instanceof ServiceError) showFieldErrors(err);
    else throw err;
  }
}

function renderCurves(): void {
  if (!lastOc) return;
  const overlay = pinned.length > 0 ? pinned[pinned.length - 1]!.oc : undefined;
  $("curves").innerHTML = renderPowerCurves(lastOc, overlay);
}

function renderCompare(): void {
  if (pinned.length < 2) {
    $("compare").innerHTML = `<p class="note">Pin two scenarios to compare them.</p>`;
    return;
  }
  const [a, b] = [pinned[0]!, pinned[1]!];
  $("compare").innerHTML = renderComparison(compareScenarios({ a, b }));
}

function pinCurrent(): void {
  if (!lastGuideline || !lastOc) return;
  const name = `scenario ${String.fromCharCode(65 + (pinned.length % 2))}`;
  if (pinned.length >= 2) pinned.shift();
  pinned.push({ name, artifact: lastGuideline, oc: lastOc });
  renderCompare();
  renderCurves();
}

async function runSimulation(): Promise<void> {
  if (!canSubmit(state)) return;
  const doc = toDocument(state);
  const button = $("simulate") as HTMLButtonElement;
  button.disabled = true;
  $("simulation").innerHTML =
    `<p class="progress">Running ${doc.sim?.reps ?? "?"} replications with seed ` +
    `${doc.sim?.seed ?? "?"}; this takes a few seconds.</p>`;
  try {
    const result = await fetchSimulate(doc);
    $("simulation").innerHTML = renderSimulationView(result);
  } catch (err) {
    if (isAbort(err)) return;
    if (err instanceof ServiceError) {
      $("simulation").innerHTML = renderErrorPanel({
        code: err.code,
        message: err.message,
        field_path: err.fieldPath,
      });
    } else {
      throw err;
    }
  } finally {
    button.disabled = false;
  }
}

function exportDocument(): void {
  if (!canSubmit(state)) return;
  const blob = new Blob([JSON.stringify(toDocument(state), null, 2) + "\n"], {
    type: "application/json",
  });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "design.json";
  a.click();
  URL.revokeObjectURL(a.href);
}

function importDocument(file: File): void {
  file.text().then((text) => {
    const raw = JSON.parse(text) as Record<string, unknown>;
    const doc = ("document" in raw && "tool" in raw ? raw["document"] : raw) as Parameters<
      typeof fromDocument
    >[0];
    state = fromDocument(doc);
    buildForm();
    showFieldErrors();
    scheduleRecompute();
  });
}

function onInput(event: Event): void {
  const target = event.target as HTMLInputElement;
  const path = target.dataset["path"];
  if (!path) return;
  const value = target.type === "checkbox" ? target.checked : target.value;
  state = withField(state, path, value);
  if (path === "scenario.enabled") $("scenario-fields").hidden = !state.scenario.enabled;
  if (path === "sim.enabled") $("sim-fields").hidden = !state.sim.enabled;
  showFieldErrors();
  scheduleRecompute();
}

function onClick(event: Event): void {
  const target = event.target as HTMLElement;
  if (target.id === "add-milestone") {
    state = addMilestone(state);
    $("milestones").innerHTML = milestoneRows();
    showFieldErrors();
    scheduleRecompute();
  } else if (target.classList.contains("remove")) {
    state = removeMilestone(state, Number(target.dataset["index"]));
    $("milestones").innerHTML = milestoneRows();
    showFieldErrors();
    scheduleRecompute();
  }
}

export function start(): void {
  buildForm();
  renderCompare();
  showFieldErrors();
  $("form").addEventListener("input", onInput);
  $("form").addEventListener("click", onClick);
  $("pin").addEventListener("click", pinCurrent);
  $("simulate").addEventListener("click", () => void runSimulation());
  $("export").addEventListener("click", exportDocument);
  ($("import") as HTMLInputElement).addEventListener("change", (e) => {
    const file = (e.target as HTMLInputElement).files?.[0];
    if (file) importDocument(file);
  });
}

start();
