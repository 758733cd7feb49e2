// Guideline table rendering. Returns plain HTML strings so the view layer
// stays testable without a DOM; every cell is a formatted payload value.

import { fmt3, fmtHr, fmtPct } from "./format.js";
import type {
  GuidelineArtifact,
  GuidelineRowPayload,
  ServiceErrorBody,
  SimulateArtifact,
} from "./types.js";

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Displayed cell strings for one guideline row, in column order:
 * deaths, threshold, fp rate, CI level, one probability per probe. */
export function guidelineCells(row: GuidelineRowPayload): string[] {
  return [
    String(row.deaths),
    fmt3(row.threshold_hr),
    fmt3(row.one_sided_fp_rate),
    fmtPct(row.ci_level_pct),
    ...row.positivity_probs.map((p) => fmt3(p)),
  ];
}

export function renderGuidelineView(artifact: GuidelineArtifact): string {
  const probes = artifact.guideline.probes;
  const header = [
    "Deaths",
    "Threshold HR",
    "One-sided FP rate",
    "CI to rule out",
    ...probes.map((p) => `P(positive) at HR ${esc(fmtHr(p))}`),
  ];
  const head = `<tr>${header.map((h) => `<th>${h}</th>`).join("")}<th></th></tr>`;
  const body = artifact.guideline.rows
    .map((row) => {
      const cls = [
        row.final ? "final" : "interim",
        row.warning_threshold_exceeds_margin ? "warn" : "",
      ]
        .filter(Boolean)
        .join(" ");
      const cells = guidelineCells(row)
        .map((c) => `<td>${esc(c)}</td>`)
        .join("");
      const badge = row.warning_threshold_exceeds_margin
        ? `<td><span class="badge warn" title="threshold exceeds the harm margin">warning</span></td>`
        : "<td></td>";
      return `<tr class="${cls}" data-label="${esc(row.label)}">${cells}${badge}</tr>`;
    })
    .join("\n");
  return `<table class="guideline"><thead>${head}</thead><tbody>\n${body}\n</tbody></table>`;
}

export function renderSimulationView(artifact: SimulateArtifact): string {
  const sim = artifact.simulation;
  const head =
    "<tr><th>Deaths</th><th>Threshold HR</th><th>Analytic</th>" +
    "<th>Empirical</th><th>MC std err</th><th>Within 3 SE</th></tr>";
  const body = sim.milestones
    .map((m) => {
      const cells = [
        String(m.deaths),
        fmt3(m.threshold_hr),
        fmt3(m.analytic_positivity),
        fmt3(m.empirical_positivity),
        fmt3(m.mc_std_err),
        m.agrees_within_3se ? "yes" : "no",
      ];
      const cls = m.agrees_within_3se ? "agrees" : "disagrees";
      return `<tr class="${cls}">${cells.map((c) => `<td>${esc(c)}</td>`).join("")}</tr>`;
    })
    .join("\n");
  const meta = `<p class="sim-meta">${sim.reps} replications, seed ${sim.seed}</p>`;
  return `${meta}<table class="simulation"><thead>${head}</thead><tbody>\n${body}\n</tbody></table>`;
}

/** Inline panel for a service error; includes the field path when given. */
export function renderErrorPanel(err: ServiceErrorBody): string {
  const field = err.field_path ? ` <code>${esc(err.field_path)}</code>` : "";
  return `<div class="error" data-code="${esc(err.code)}">${esc(err.message)}${field}</div>`;
}
