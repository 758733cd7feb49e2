// Editable mirror of a design document with per-field validation.
// Bounds replicate the service's own checks so the submit gate only opens
// for documents the service will accept; error keys use the same field
// paths the service reports, letting server errors land on the same inputs.

import type { DesignDocument, MilestoneDoc } from "./types.js";

export interface MilestoneField {
  label: string;
  deaths: string;
  final: boolean;
}

export interface ScenarioForm {
  enabled: boolean;
  nPatients: string;
  accrualMonths: string;
  controlMedianOsMonths: string;
  trueOsHr: string;
  annualDropoutProb: string;
}

export interface SimForm {
  enabled: boolean;
  reps: string;
  seed: string;
}

export interface DesignFormState {
  version: string;
  deltaNull: string;
  deltaAlt: string;
  gammaFa: string;
  betaPa: string;
  k: string;
  milestones: MilestoneField[];
  /** Comma-separated probe HRs; empty means "use the service defaults". */
  probeHrs: string;
  scenario: ScenarioForm;
  sim: SimForm;
  errors: Record<string, string>;
}

const EMPTY_SCENARIO: ScenarioForm = {
  enabled: false,
  nPatients: "",
  accrualMonths: "",
  controlMedianOsMonths: "",
  trueOsHr: "",
  annualDropoutProb: "",
};

const EMPTY_SIM: SimForm = { enabled: false, reps: "", seed: "" };

export function emptyForm(): DesignFormState {
  const state: DesignFormState = {
    version: "1",
    deltaNull: "",
    deltaAlt: "",
    gammaFa: "",
    betaPa: "",
    k: "1",
    milestones: [{ label: "analysis-1", deaths: "", final: true }],
    probeHrs: "",
    scenario: { ...EMPTY_SCENARIO },
    sim: { ...EMPTY_SIM },
    errors: {},
  };
  state.errors = validate(state);
  return state;
}

function parseNumber(raw: string): number | null {
  const t = raw.trim();
  if (t === "") return null;
  const v = Number(t);
  return Number.isFinite(v) ? v : null;
}

function parsePositiveInt(raw: string): number | null {
  const t = raw.trim();
  if (!/^\d+$/.test(t)) return null;
  const v = Number(t);
  return v >= 1 && Number.isSafeInteger(v) ? v : null;
}

export function parseProbeList(raw: string): number[] | null {
  const parts = raw.split(/[\s,]+/).filter((p) => p !== "");
  const out: number[] = [];
  for (const p of parts) {
    const v = Number(p);
    if (!Number.isFinite(v) || v <= 0) return null;
    out.push(v);
  }
  return out;
}

export function validate(state: DesignFormState): Record<string, string> {
  const errors: Record<string, string> = {};

  const dn = parseNumber(state.deltaNull);
  if (dn === null) errors["delta_null"] = "must be a number";
  else if (dn <= 1) errors["delta_null"] = "must exceed 1";

  const da = parseNumber(state.deltaAlt);
  if (da === null) errors["delta_alt"] = "must be a number";
  else if (da <= 0) errors["delta_alt"] = "must be positive";
  else if (dn !== null && dn > 1 && da >= dn)
    errors["delta_alt"] = "must be below delta_null";

  for (const [key, raw] of [
    ["gamma_fa", state.gammaFa],
    ["beta_pa", state.betaPa],
  ] as const) {
    const v = parseNumber(raw);
    if (v === null) errors[key] = "must be a number";
    else if (v <= 0 || v >= 0.5) errors[key] = "must lie in (0, 0.5)";
  }

  const k = parseNumber(state.k);
  if (k === null) errors["k"] = "must be a number";
  else if (k <= 0) errors["k"] = "must be positive";

  if (state.milestones.length === 0) {
    errors["milestones"] = "need at least one milestone";
  } else {
    let prev = 0;
    state.milestones.forEach((m, i) => {
      const d = parsePositiveInt(m.deaths);
      if (d === null) {
        errors[`milestones[${i}].deaths`] = "must be a positive integer";
      } else if (d <= prev) {
        errors[`milestones[${i}].deaths`] = "must exceed the previous milestone";
      } else {
        prev = d;
      }
    });
    const finals = state.milestones.filter((m) => m.final).length;
    if (finals !== 1) errors["milestones"] = "exactly one milestone must be final";
    else if (!state.milestones[state.milestones.length - 1]!.final)
      errors["milestones"] = "the final analysis must come last";
  }

  if (parseProbeList(state.probeHrs) === null)
    errors["probe_hrs"] = "each probe must be a positive number";

  if (state.scenario.enabled) {
    const s = state.scenario;
    if (parsePositiveInt(s.nPatients) === null)
      errors["scenario.n_patients"] = "must be a positive integer";
    for (const [key, raw] of [
      ["scenario.accrual_months", s.accrualMonths],
      ["scenario.control_median_os_months", s.controlMedianOsMonths],
      ["scenario.true_os_hr", s.trueOsHr],
    ] as const) {
      const v = parseNumber(raw);
      if (v === null || v <= 0) errors[key] = "must be a positive number";
    }
    const drop = parseNumber(s.annualDropoutProb);
    if (drop === null || drop < 0 || drop >= 1)
      errors["scenario.annual_dropout_prob"] = "must lie in [0, 1)";
  }

  if (state.sim.enabled) {
    if (parsePositiveInt(state.sim.reps) === null)
      errors["sim.reps"] = "must be a positive integer";
    const seed = state.sim.seed.trim();
    if (!/^\d+$/.test(seed) || BigInt(seed) >= 1n << 64n)
      errors["sim.seed"] = "must be an integer in [0, 2^64)";
  }

  return errors;
}

export function canSubmit(state: DesignFormState): boolean {
  return Object.keys(state.errors).length === 0;
}

/** Return a copy of the state with one field changed and errors refreshed.
 * Paths: top-level keys, "milestones[i].deaths|label|final",
 * "scenario.<field>", "sim.<field>". */
export function withField(
  state: DesignFormState,
  path: string,
  value: string | boolean,
): DesignFormState {
  const next: DesignFormState = {
    ...state,
    milestones: state.milestones.map((m) => ({ ...m })),
    scenario: { ...state.scenario },
    sim: { ...state.sim },
  };
  const milestone = path.match(/^milestones\[(\d+)\]\.(\w+)$/);
  if (milestone) {
    const entry = next.milestones[Number(milestone[1])];
    if (entry) {
      if (milestone[2] === "final") entry.final = value === true || value === "true";
      else if (milestone[2] === "label") entry.label = String(value);
      else entry.deaths = String(value);
    }
  } else if (path.startsWith("scenario.")) {
    const key = path.slice("scenario.".length) as keyof ScenarioForm;
    if (key === "enabled") next.scenario.enabled = value === true || value === "true";
    else next.scenario[key] = String(value);
  } else if (path.startsWith("sim.")) {
    const key = path.slice("sim.".length) as keyof SimForm;
    if (key === "enabled") next.sim.enabled = value === true || value === "true";
    else next.sim[key] = String(value);
  } else {
    const key = path as "deltaNull" | "deltaAlt" | "gammaFa" | "betaPa" | "k" | "probeHrs";
    next[key] = String(value);
  }
  next.errors = validate(next);
  return next;
}

export function addMilestone(state: DesignFormState): DesignFormState {
  const next = withField(state, "k", state.k);
  for (const m of next.milestones) m.final = false;
  next.milestones.push({
    label: `analysis-${next.milestones.length + 1}`,
    deaths: "",
    final: true,
  });
  next.errors = validate(next);
  return next;
}

export function removeMilestone(state: DesignFormState, index: number): DesignFormState {
  const next = withField(state, "k", state.k);
  next.milestones.splice(index, 1);
  const last = next.milestones[next.milestones.length - 1];
  if (last && !next.milestones.some((m) => m.final)) last.final = true;
  next.errors = validate(next);
  return next;
}

/** Build the CLI-schema document. Call only when canSubmit(state) holds. */
export function toDocument(state: DesignFormState): DesignDocument {
  const doc: DesignDocument = {
    version: state.version,
    delta_null: Number(state.deltaNull),
    delta_alt: Number(state.deltaAlt),
    gamma_fa: Number(state.gammaFa),
    beta_pa: Number(state.betaPa),
    k: Number(state.k),
    milestones: state.milestones.map(
      (m): MilestoneDoc => ({
        label: m.label,
        deaths: Number(m.deaths),
        final: m.final,
      }),
    ),
  };
  const probes = parseProbeList(state.probeHrs);
  if (probes !== null && probes.length > 0) doc.probe_hrs = probes;
  if (state.scenario.enabled) {
    doc.scenario = {
      n_patients: Number(state.scenario.nPatients),
      accrual_months: Number(state.scenario.accrualMonths),
      control_median_os_months: Number(state.scenario.controlMedianOsMonths),
      true_os_hr: Number(state.scenario.trueOsHr),
      annual_dropout_prob: Number(state.scenario.annualDropoutProb),
    };
  }
  if (state.sim.enabled) {
    doc.sim = { reps: Number(state.sim.reps), seed: Number(state.sim.seed) };
  }
  return doc;
}

export function fromDocument(doc: DesignDocument): DesignFormState {
  const state: DesignFormState = {
    version: doc.version,
    deltaNull: String(doc.delta_null),
    deltaAlt: String(doc.delta_alt),
    gammaFa: String(doc.gamma_fa),
    betaPa: String(doc.beta_pa),
    k: String(doc.k),
    milestones: doc.milestones.map((m, i) => ({
      label: m.label ?? `analysis-${i + 1}`,
      deaths: String(m.deaths),
      final: m.final ?? i === doc.milestones.length - 1,
    })),
    probeHrs: (doc.probe_hrs ?? []).map(String).join(", "),
    scenario: doc.scenario
      ? {
          enabled: true,
          nPatients: String(doc.scenario.n_patients),
          accrualMonths: String(doc.scenario.accrual_months),
          controlMedianOsMonths: String(doc.scenario.control_median_os_months),
          trueOsHr: String(doc.scenario.true_os_hr),
          annualDropoutProb: String(doc.scenario.annual_dropout_prob),
        }
      : { ...EMPTY_SCENARIO },
    sim: doc.sim
      ? { enabled: true, reps: String(doc.sim.reps), seed: String(doc.sim.seed) }
      : { ...EMPTY_SIM },
    errors: {},
  };
  state.errors = validate(state);
  return state;
}
