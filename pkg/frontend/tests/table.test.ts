import { describe, expect, it } from "vitest";

import { fmt3, fmtPct } from "../src/format.js";
import { guidelineCells, renderErrorPanel, renderGuidelineView } from "../src/table.js";
import type { GuidelineArtifact } from "../src/types.js";
import t6json from "./fixtures/table6_guideline.json";

const T6 = t6json as unknown as GuidelineArtifact;

function cellTexts(html: string): string[][] {
  const rows = [...html.matchAll(/<tr class="[^"]*" data-label[^>]*>(.*?)<\/tr>/g)];
  return rows.map((r) => {
    const cells = [...r[1]!.matchAll(/<td>([^<]*)<\/td>/g)].map((m) => m[1]!);
    // drop the trailing badge column, which holds no number
    return cells.at(-1) === "" ? cells.slice(0, -1) : cells;
  });
}

describe("renderGuidelineView", () => {
  it("renders the pinned two-milestone fixture byte for byte", () => {
    const cells = cellTexts(renderGuidelineView(T6));
    expect(cells[0]).toEqual(["22", "1.209", "0.409", "18%", "0.900", "0.714"]);
    expect(cells[1]).toEqual(["34", "0.999", "0.200", "60%", "0.850", "0.558"]);
  });

  it("shows exactly the payload values after display formatting", () => {
    // parity by construction: every cell equals the formatter applied to
    // the corresponding payload number, nothing recomputed
    const cells = cellTexts(renderGuidelineView(T6));
    T6.guideline.rows.forEach((row, i) => {
      expect(cells[i]).toEqual([
        String(row.deaths),
        fmt3(row.threshold_hr),
        fmt3(row.one_sided_fp_rate),
        fmtPct(row.ci_level_pct),
        ...row.positivity_probs.map((p) => fmt3(p)),
      ]);
      expect(cells[i]).toEqual(guidelineCells(row));
    });
  });

  it("renders one probability column per probe", () => {
    const html = renderGuidelineView(T6);
    expect(html).toContain("P(positive) at HR 0.7");
    expect(html).toContain("P(positive) at HR 0.95");
  });

  it("renders a single-milestone payload as one row", () => {
    const single: GuidelineArtifact = {
      ...T6,
      guideline: { probes: T6.guideline.probes, rows: [T6.guideline.rows[1]!] },
    };
    expect(cellTexts(renderGuidelineView(single))).toHaveLength(1);
  });

  it("flags rows whose warning marker is set", () => {
    const flagged: GuidelineArtifact = JSON.parse(JSON.stringify(T6));
    flagged.guideline.rows[0]!.warning_threshold_exceeds_margin = true;
    flagged.guideline.rows[0]!.ci_level_pct = null;
    const html = renderGuidelineView(flagged);
    expect(html).toContain('class="interim warn"');
    expect(html).toContain('<span class="badge warn"');
    expect(cellTexts(html)[0]).toContain("n/a");
    // the unflagged fixture renders no badge
    expect(renderGuidelineView(T6)).not.toContain("badge warn");
  });
});

describe("renderErrorPanel", () => {
  it("surfaces code, message, and field path", () => {
    const html = renderErrorPanel({
      code: "invalid_value",
      message: "gamma_fa must be below 0.5, got 0.6",
      field_path: "gamma_fa",
    });
    expect(html).toContain('data-code="invalid_value"');
    expect(html).toContain("must be below 0.5");
    expect(html).toContain("<code>gamma_fa</code>");
  });

  it("escapes markup in messages", () => {
    const html = renderErrorPanel({ code: "x", message: "<script>" });
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});
