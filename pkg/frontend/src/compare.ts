// Side-by-side comparison of two pinned guideline artifacts: parameter
// diffs plus per-milestone deltas, aligned by row position. Deltas are the
// one place the UI subtracts payload values; no statistical quantity is
// ever derived client-side.

import { fmt3, fmtDelta, fmtHr, fmtPct } from "./format.js";
import type { GuidelineArtifact } from "./types.js";

export interface Snapshot {
  name: string;
  artifact: GuidelineArtifact;
}

export interface ComparisonPair {
  a: Snapshot;
  b: Snapshot;
}

export interface ParamDiff {
  name: string;
  a: number;
  b: number;
  differs: boolean;
}

export interface CellDiff {
  a: number;
  b: number;
  delta: number;
}

export interface RowDiff {
  deathsA: number;
  deathsB: number;
  threshold: CellDiff;
  fpRate: CellDiff;
  /** Aligned with `sharedProbes`. */
  probs: CellDiff[];
}

export interface ComparisonResult {
  nameA: string;
  nameB: string;
  sameVersion: boolean;
  versionA: string;
  versionB: string;
  params: ParamDiff[];
  sharedProbes: number[];
  rows: RowDiff[];
  /** Milestones present in only one snapshot (plans of unequal length). */
  unpairedRows: number;
  /** Column keys ("threshold", "fp_rate", "prob[i]") whose per-row deltas
   * change sign across milestones. */
  signChangeColumns: string[];
}

function cell(a: number, b: number): CellDiff {
  return { a, b, delta: b - a };
}

export function compareScenarios(pair: ComparisonPair): ComparisonResult {
  const A = pair.a.artifact;
  const B = pair.b.artifact;
  const params: ParamDiff[] = (
    [
      ["delta_null", A.document.delta_null, B.document.delta_null],
      ["delta_alt", A.document.delta_alt, B.document.delta_alt],
      ["gamma_fa", A.document.gamma_fa, B.document.gamma_fa],
      ["beta_pa", A.document.beta_pa, B.document.beta_pa],
      ["k", A.document.k, B.document.k],
    ] as Array<[string, number, number]>
  ).map(([name, a, b]) => ({ name, a, b, differs: a !== b }));

  const sharedProbes = A.guideline.probes.filter((p) =>
    B.guideline.probes.includes(p),
  );
  const idxA = sharedProbes.map((p) => A.guideline.probes.indexOf(p));
  const idxB = sharedProbes.map((p) => B.guideline.probes.indexOf(p));

  const paired = Math.min(A.guideline.rows.length, B.guideline.rows.length);
  const rows: RowDiff[] = [];
  for (let i = 0; i < paired; i++) {
    const ra = A.guideline.rows[i]!;
    const rb = B.guideline.rows[i]!;
    rows.push({
      deathsA: ra.deaths,
      deathsB: rb.deaths,
      threshold: cell(ra.threshold_hr, rb.threshold_hr),
      fpRate: cell(ra.one_sided_fp_rate, rb.one_sided_fp_rate),
      probs: sharedProbes.map((_, j) =>
        cell(ra.positivity_probs[idxA[j]!]!, rb.positivity_probs[idxB[j]!]!),
      ),
    });
  }

  const columns: Array<[string, (r: RowDiff) => number]> = [
    ["threshold", (r) => r.threshold.delta],
    ["fp_rate", (r) => r.fpRate.delta],
    ...sharedProbes.map(
      (_, j): [string, (r: RowDiff) => number] => [`prob[${j}]`, (r) => r.probs[j]!.delta],
    ),
  ];
  const signChangeColumns = columns
    .filter(([, get]) => rows.some((r) => get(r) > 0) && rows.some((r) => get(r) < 0))
    .map(([name]) => name);

  return {
    nameA: pair.a.name,
    nameB: pair.b.name,
    sameVersion: A.tool.version === B.tool.version,
    versionA: A.tool.version,
    versionB: B.tool.version,
    params,
    sharedProbes,
    rows,
    unpairedRows: Math.abs(A.guideline.rows.length - B.guideline.rows.length),
    signChangeColumns,
  };
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function deltaClass(d: number): string {
  if (d > 0) return "delta-pos";
  if (d < 0) return "delta-neg";
  return "delta-zero";
}

function diffCell(c: CellDiff, column: string, flip: boolean, pct = false): string {
  const f = pct ? fmtPct : fmt3;
  const cls = [deltaClass(c.delta), flip && c.delta !== 0 ? "sign-flip" : ""]
    .filter(Boolean)
    .join(" ");
  return (
    `<td class="${cls}" data-column="${column}">` +
    `${f(c.a)} → ${f(c.b)} (${fmtDelta(c.delta)})</td>`
  );
}

export function renderComparison(result: ComparisonResult): string {
  const warning = result.sameVersion
    ? ""
    : `<div class="warning version-mismatch">Snapshots come from different service versions ` +
      `(${esc(result.versionA)} vs ${esc(result.versionB)}); numbers may not be comparable.</div>`;
  const paramRows = result.params
    .map(
      (p) =>
        `<tr class="${p.differs ? "differs" : "same"}"><td>${p.name}</td>` +
        `<td>${fmt3(p.a)}</td><td>${fmt3(p.b)}</td></tr>`,
    )
    .join("");
  const header =
    `<tr><th>Deaths</th><th>Threshold HR</th><th>FP rate</th>` +
    result.sharedProbes.map((p) => `<th>P at HR ${fmtHr(p)}</th>`).join("") +
    "</tr>";
  const body = result.rows
    .map((r) => {
      const deaths =
        r.deathsA === r.deathsB ? String(r.deathsA) : `${r.deathsA} / ${r.deathsB}`;
      const flip = (col: string) => result.signChangeColumns.includes(col);
      return (
        `<tr><td>${deaths}</td>` +
        diffCell(r.threshold, "threshold", flip("threshold")) +
        diffCell(r.fpRate, "fp_rate", flip("fp_rate")) +
        r.probs
          .map((c, j) => diffCell(c, `prob[${j}]`, flip(`prob[${j}]`)))
          .join("") +
        "</tr>"
      );
    })
    .join("\n");
  const unpaired = result.unpairedRows
    ? `<p class="note">${result.unpairedRows} milestone(s) without a counterpart were left out.</p>`
    : "";
  return (
    warning +
    `<h3>${esc(result.nameA)} vs ${esc(result.nameB)}</h3>` +
    `<table class="compare-params"><thead><tr><th>Parameter</th>` +
    `<th>${esc(result.nameA)}</th><th>${esc(result.nameB)}</th></tr></thead>` +
    `<tbody>${paramRows}</tbody></table>` +
    `<table class="compare-rows"><thead>${header}</thead><tbody>\n${body}\n</tbody></table>` +
    unpaired
  );
}
