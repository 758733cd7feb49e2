// Positivity-probability chart built as an SVG string. The x axis is the
// true HR on a log scale; curve y values come straight from payload grid
// points, so probed HRs and each threshold read out exactly.

import { fmtHr } from "./format.js";
import type { CurvePayload, OcArtifact } from "./types.js";

const W = 640;
const H = 360;
const PAD = { left: 52, right: 16, top: 16, bottom: 36 };

/** Exact grid lookup; null when the HR is not a grid point. */
export function curveValueAt(curve: CurvePayload, hr: number): number | null {
  for (const [h, p] of curve.points) {
    if (h === hr) return p;
  }
  return null;
}

interface Mapping {
  x: (hr: number) => number;
  y: (p: number) => number;
}

function mapping(curves: CurvePayload[]): Mapping | null {
  let lo = Infinity;
  let hi = -Infinity;
  for (const c of curves) {
    for (const [h] of c.points) {
      if (h < lo) lo = h;
      if (h > hi) hi = h;
    }
  }
  if (!(lo < hi)) return null;
  const logLo = Math.log(lo);
  const span = Math.log(hi) - logLo;
  return {
    x: (hr) => PAD.left + ((Math.log(hr) - logLo) / span) * (W - PAD.left - PAD.right),
    y: (p) => PAD.top + (1 - p) * (H - PAD.top - PAD.bottom),
  };
}

export function buildCurvePath(points: Array<[number, number]>, m: Mapping): string {
  return points
    .map(([h, p], i) => `${i === 0 ? "M" : "L"}${m.x(h).toFixed(2)},${m.y(p).toFixed(2)}`)
    .join(" ");
}

function referenceLine(hr: number, cls: string, label: string, m: Mapping): string {
  const x = m.x(hr).toFixed(2);
  return (
    `<line class="ref ${cls}" data-hr="${hr}" x1="${x}" y1="${PAD.top}" x2="${x}" y2="${H - PAD.bottom}"/>` +
    `<text class="ref-label ${cls}" x="${x}" y="${PAD.top + 10}">${label} ${fmtHr(hr)}</text>`
  );
}

function yAxis(m: Mapping): string {
  return [0, 0.25, 0.5, 0.75, 1]
    .map((p) => {
      const y = m.y(p).toFixed(2);
      return (
        `<line class="grid" x1="${PAD.left}" y1="${y}" x2="${W - PAD.right}" y2="${y}"/>` +
        `<text class="tick" x="${PAD.left - 6}" y="${y}">${p}</text>`
      );
    })
    .join("");
}

function curveGroup(curves: CurvePayload[], scenario: string, m: Mapping): string {
  return curves
    .map((c) => {
      const marker = curveValueAt(c, c.threshold_hr);
      const dot =
        marker === null
          ? ""
          : `<circle class="threshold-marker" data-deaths="${c.deaths}" data-p="${marker}" ` +
            `cx="${m.x(c.threshold_hr).toFixed(2)}" cy="${m.y(marker).toFixed(2)}" r="3"/>`;
      return (
        `<path class="curve scenario-${scenario}" data-deaths="${c.deaths}" data-label="${c.label}" ` +
        `fill="none" d="${buildCurvePath(c.points, m)}"/>` + dot
      );
    })
    .join("\n");
}

/** Chart of positivity probability against true HR, one curve per
 * milestone, with reference lines at the harm margin and the benefit HR.
 * A second artifact overlays its curves for side-by-side comparison. */
export function renderPowerCurves(primary: OcArtifact, overlay?: OcArtifact): string {
  const curves = primary.oc.curves.filter((c) => c.points.length > 0);
  const extra = overlay ? overlay.oc.curves.filter((c) => c.points.length > 0) : [];
  const m = mapping([...curves, ...extra]);
  if (m === null) {
    return `<div class="empty">No curve data to plot.</div>`;
  }
  const parts = [
    `<svg class="power-curves" viewBox="0 0 ${W} ${H}" role="img">`,
    yAxis(m),
    referenceLine(primary.document.delta_null, "ref-null", "delta_null", m),
    referenceLine(primary.document.delta_alt, "ref-alt", "delta_alt", m),
    curveGroup(curves, "a", m),
  ];
  if (overlay) {
    parts.push(curveGroup(extra, "b", m));
    if (overlay.document.delta_alt !== primary.document.delta_alt) {
      parts.push(referenceLine(overlay.document.delta_alt, "ref-alt-b", "delta_alt (b)", m));
    }
  }
  parts.push(`<text class="axis-label" x="${W / 2}" y="${H - 8}">true OS hazard ratio (log scale)</text>`);
  parts.push("</svg>");
  return parts.join("\n");
}
