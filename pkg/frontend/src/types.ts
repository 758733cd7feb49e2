// Shapes of the design document and the /api/v1/* artifact payloads.
// Field names match the service json byte for byte; every number shown in
// the UI is read from these payloads, never recomputed client-side.

export interface MilestoneDoc {
  label?: string;
  deaths: number;
  final?: boolean;
}

export interface ScenarioDoc {
  n_patients: number;
  accrual_months: number;
  control_median_os_months: number;
  true_os_hr: number;
  annual_dropout_prob: number;
}

export interface SimDoc {
  reps: number;
  seed: number;
}

export interface DesignDocument {
  version: string;
  delta_null: number;
  delta_alt: number;
  gamma_fa: number;
  beta_pa: number;
  k: number;
  milestones: MilestoneDoc[];
  probe_hrs?: number[];
  scenario?: ScenarioDoc;
  sim?: SimDoc;
}

export interface ToolBlock {
  name: string;
  version: string;
  input_digest: string;
}

export interface GuidelineRowPayload {
  label: string;
  deaths: number;
  final: boolean;
  threshold_hr: number;
  one_sided_fp_rate: number;
  ci_level_pct: number | null;
  positivity_probs: number[];
  warning_threshold_exceeds_margin: boolean;
}

export interface GuidelineArtifact {
  tool: ToolBlock;
  document: DesignDocument;
  guideline: {
    probes: number[];
    rows: GuidelineRowPayload[];
  };
}

export interface CurvePayload {
  label: string;
  deaths: number;
  final: boolean;
  threshold_hr: number;
  /** [true HR, positivity probability] pairs on a shared grid; probe HRs
   * and the curve's own threshold are exact grid points. */
  points: Array<[number, number]>;
}

export interface OcArtifact {
  tool: ToolBlock;
  document: DesignDocument;
  oc: {
    primary_deaths: number;
    final_deaths: number;
    primary_threshold_hr: number;
    final_threshold_hr: number;
    fp_final: number;
    fp_primary: number;
    beta_fa: number;
    probes: number[];
    fn_final: number[];
    fn_primary: number[];
    probes_outside_analytic_range: number[];
    curves: CurvePayload[];
  };
}

export interface DeathsArtifact {
  tool: ToolBlock;
  document: DesignDocument;
  timeline: Array<{ months: number; expected_deaths: number }>;
  milestones: Array<{
    label: string;
    deaths: number;
    reachable: boolean;
    calendar_months: number | null;
  }>;
}

export interface SimulateArtifact {
  tool: ToolBlock;
  document: DesignDocument;
  simulation: {
    reps: number;
    seed: number;
    milestones: Array<{
      label: string;
      deaths: number;
      threshold_hr: number;
      analytic_positivity: number;
      empirical_positivity: number;
      mc_std_err: number;
      agrees_within_3se: boolean;
      divergent_fits: number;
      unreachable_reps: number;
    }>;
  };
}

export interface ServiceErrorBody {
  code: string;
  message: string;
  field_path?: string;
}
