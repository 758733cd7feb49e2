"""Shared result payloads and their markdown/csv/json renderings.

Both front ends build payloads here, so an HTTP response body and the
corresponding CLI json artifact carry the same numbers by construction.
The json format embeds the resolved document plus an input digest and can
be fed back to the CLI in place of the original document; markdown and csv
render display strings (three decimals, round half up; whole percents for
CI levels) while json keeps full precision.
"""

import hashlib
import json
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from . import __version__
from .document import DocumentError, ResolvedDesign, document_dict
from .guideline import build_guideline
from .oc import analytic_oc, merged_hr_grid, power_curve
from .trial import UnreachableTargetError, calendar_time_for_deaths, empirical_oc, expected_deaths

FORMATS = ("md", "csv", "json")


@dataclass(frozen=True)
class TableArtifact:
    format: str
    content: str
    provenance: tuple[str, str]


def _display(x: float, places: str = "0.001") -> str:
    # numpy scalars confuse Decimal's repr parsing, so cast first
    return str(Decimal(repr(float(x))).quantize(Decimal(places), ROUND_HALF_UP))


def _display_pct(x: float | None) -> str:
    if x is None:
        return "n/a"
    return str(Decimal(repr(float(x))).quantize(Decimal("1"), ROUND_HALF_UP)) + "%"


def input_digest(resolved: ResolvedDesign) -> str:
    canonical = json.dumps(
        document_dict(resolved), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(canonical.encode()).hexdigest()


def _tool_block(resolved: ResolvedDesign) -> dict:
    return {"name": "osmon", "version": __version__, "input_digest": input_digest(resolved)}


def _require_scenario(resolved: ResolvedDesign):
    if resolved.scenario is None:
        raise DocumentError(
            "missing_field", "this command needs a scenario block", "scenario"
        )
    return resolved.scenario


def _require_sim(resolved: ResolvedDesign):
    if resolved.sim is None:
        raise DocumentError(
            "missing_field", "this command needs a sim block", "sim"
        )
    return resolved.sim


def guideline_payload(resolved: ResolvedDesign) -> dict:
    table = build_guideline(resolved.params, resolved.plan, resolved.probe_hrs)
    probes = [float(p) for p in table.probe_hrs]
    rows = [
        {
            "label": r.label,
            "deaths": r.deaths,
            "final": r.final,
            "threshold_hr": float(r.threshold_hr),
            "one_sided_fp_rate": float(r.one_sided_fp_rate),
            "ci_level_pct": None if r.ci_level_pct is None else float(r.ci_level_pct),
            "positivity_probs": [float(r.positivity_prob_under[p]) for p in table.probe_hrs],
            "warning_threshold_exceeds_margin": r.warning_threshold_exceeds_margin,
        }
        for r in table.rows
    ]
    return {
        "tool": _tool_block(resolved),
        "document": document_dict(resolved),
        "guideline": {"probes": probes, "rows": rows},
    }


def oc_payload(resolved: ResolvedDesign) -> dict:
    oc = analytic_oc(resolved.params, resolved.plan, resolved.probe_hrs)
    probes = [float(p) for p in oc.probes]
    # per-milestone positivity curves ride along so chart clients never do
    # statistical arithmetic; probes and row thresholds are exact grid
    # points, so each curve passes through (threshold, 0.5) in the data
    table = build_guideline(resolved.params, resolved.plan, resolved.probe_hrs)
    grid = merged_hr_grid(
        list(oc.probes)
        + [float(resolved.params.delta_null)]
        + [float(r.threshold_hr) for r in table.rows]
    )
    curves = [
        {
            "label": r.label,
            "deaths": r.deaths,
            "final": r.final,
            "threshold_hr": float(r.threshold_hr),
            "points": [
                [h, p]
                for h, p in power_curve(
                    r.threshold_hr, r.deaths, resolved.params.k, grid
                ).points
            ],
        }
        for r in table.rows
    ]
    return {
        "tool": _tool_block(resolved),
        "document": document_dict(resolved),
        "oc": {
            "primary_deaths": oc.primary_deaths,
            "final_deaths": oc.final_deaths,
            "primary_threshold_hr": float(oc.primary_threshold_hr),
            "final_threshold_hr": float(oc.final_threshold_hr),
            "fp_final": float(oc.fp_final),
            "fp_primary": float(oc.fp_primary),
            "beta_fa": float(oc.beta_fa),
            "probes": probes,
            "fn_final": [float(oc.fn_final[p]) for p in oc.probes],
            "fn_primary": [float(oc.fn_primary[p]) for p in oc.probes],
            "probes_outside_analytic_range": [
                float(p) for p in oc.probes_outside_analytic_range
            ],
            "curves": curves,
        },
    }


def deaths_payload(
    resolved: ResolvedDesign, horizon_months: float = 120.0, step_months: float = 6.0
) -> dict:
    scenario = _require_scenario(resolved)
    horizon = float(horizon_months)
    step = float(step_months)
    if not math.isfinite(horizon) or horizon <= 0.0:
        raise ValueError(f"horizon must be positive, got {horizon_months!r}")
    if not math.isfinite(step) or step <= 0.0 or step > horizon:
        raise ValueError(f"step must lie in (0, horizon], got {step_months!r}")
    grid = [i * step for i in range(int(horizon / step + 1e-9) + 1)]
    if grid[-1] < horizon - 1e-9:
        grid.append(horizon)
    timeline = [
        {"months": t, "expected_deaths": expected_deaths(scenario, t)} for t in grid
    ]
    milestones = []
    for m in resolved.plan.milestones:
        try:
            cal = calendar_time_for_deaths(scenario, m.deaths)
            milestones.append(
                {
                    "label": m.label,
                    "deaths": m.deaths,
                    "reachable": True,
                    "calendar_months": cal,
                }
            )
        except UnreachableTargetError:
            milestones.append(
                {
                    "label": m.label,
                    "deaths": m.deaths,
                    "reachable": False,
                    "calendar_months": None,
                }
            )
    return {
        "tool": _tool_block(resolved),
        "document": document_dict(resolved),
        "timeline": timeline,
        "milestones": milestones,
    }


def simulate_payload(
    resolved: ResolvedDesign, time_budget_s: float | None = None
) -> dict:
    scenario = _require_scenario(resolved)
    sim = _require_sim(resolved)
    oc = empirical_oc(
        scenario,
        resolved.params,
        resolved.plan,
        sim.reps,
        time_budget_s=time_budget_s,
    )
    milestones = [
        {
            "label": m.label,
            "deaths": m.deaths,
            "threshold_hr": float(m.threshold_hr),
            "analytic_positivity": float(m.analytic_positivity),
            "empirical_positivity": float(m.empirical_positivity),
            "mc_std_err": float(m.mc_std_err),
            "agrees_within_3se": m.agrees_within_3se,
            "divergent_fits": m.divergent_fits,
            "unreachable_reps": m.unreachable_reps,
        }
        for m in oc.milestones
    ]
    return {
        "tool": _tool_block(resolved),
        "document": document_dict(resolved),
        "simulation": {"reps": oc.reps, "seed": sim.seed, "milestones": milestones},
    }


def _md_table(header: list[str], rows: list[list[str]]) -> str:
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _csv_table(header: list[str], rows: list[list[str]]) -> str:
    return "\n".join([",".join(header)] + [",".join(r) for r in rows]) + "\n"


def _probe_name(p: float) -> str:
    return f"{p:g}"


def render_guideline(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    probes = payload["guideline"]["probes"]
    rows = [
        [
            str(r["deaths"]),
            _display(r["threshold_hr"]),
            _display(r["one_sided_fp_rate"]),
            _display_pct(r["ci_level_pct"]),
        ]
        + [_display(p) for p in r["positivity_probs"]]
        for r in payload["guideline"]["rows"]
    ]
    if fmt == "csv":
        header = ["deaths", "threshold", "fp_rate", "ci_level"] + [
            f"p_under_{_probe_name(p)}" for p in probes
        ]
        return _csv_table(header, rows)
    header = ["Deaths", "Threshold", "One-sided FP rate", "CI level"] + [
        f"P(est < thr) @ HR {_probe_name(p)}" for p in probes
    ]
    return _md_table(header, rows)


def render_oc(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    oc = payload["oc"]
    entries = [
        ("fp_final", _display(oc["fp_final"])),
        ("fp_primary", _display(oc["fp_primary"])),
        ("beta_fa", _display(oc["beta_fa"])),
    ]
    for p, v in zip(oc["probes"], oc["fn_final"]):
        entries.append((f"fn_final@{_probe_name(p)}", _display(v)))
    for p, v in zip(oc["probes"], oc["fn_primary"]):
        entries.append((f"fn_primary@{_probe_name(p)}", _display(v)))
    rows = [[name, value] for name, value in entries]
    if fmt == "csv":
        return _csv_table(["quantity", "value"], rows)
    return _md_table(["Quantity", "Value"], rows)


def render_deaths(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    time_rows = [
        [_display(t["months"], "0.1"), _display(t["expected_deaths"], "0.1")]
        for t in payload["timeline"]
    ]
    mile_rows = [
        [
            m["label"],
            str(m["deaths"]),
            _display(m["calendar_months"], "0.1") if m["reachable"] else "unreachable",
        ]
        for m in payload["milestones"]
    ]
    if fmt == "csv":
        head = _csv_table(["months", "expected_deaths"], time_rows)
        tail = _csv_table(["milestone", "deaths", "calendar_months"], mile_rows)
        return head + "\n" + tail
    head = _md_table(["Months", "Expected deaths"], time_rows)
    tail = _md_table(["Milestone", "Deaths", "Calendar months"], mile_rows)
    return head + "\n" + tail


def render_simulate(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    rows = [
        [
            m["label"],
            str(m["deaths"]),
            _display(m["threshold_hr"]),
            _display(m["analytic_positivity"], "0.0001"),
            _display(m["empirical_positivity"], "0.0001"),
            _display(m["mc_std_err"], "0.0001"),
            "pass" if m["agrees_within_3se"] else "fail",
            str(m["divergent_fits"]),
            str(m["unreachable_reps"]),
        ]
        for m in payload["simulation"]["milestones"]
    ]
    if fmt == "csv":
        header = [
            "milestone",
            "deaths",
            "threshold",
            "analytic",
            "empirical",
            "mc_std_err",
            "agrees_3se",
            "divergent_fits",
            "unreachable_reps",
        ]
        return _csv_table(header, rows)
    header = [
        "Milestone",
        "Deaths",
        "Threshold",
        "Analytic",
        "Empirical",
        "MC std err",
        "Agrees (3 SE)",
        "Divergent",
        "Unreachable",
    ]
    return _md_table(header, rows)


_RENDERERS = {
    "design": (guideline_payload, render_guideline),
    "oc": (oc_payload, render_oc),
    "deaths": (deaths_payload, render_deaths),
    "simulate": (simulate_payload, render_simulate),
}


def build_artifact(command: str, resolved: ResolvedDesign, fmt: str, **kw) -> TableArtifact:
    """Build the payload for a command and render it in one step."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    builder, renderer = _RENDERERS[command]
    payload = builder(resolved, **kw)
    return TableArtifact(
        format=fmt,
        content=renderer(payload, fmt),
        provenance=(__version__, payload["tool"]["input_digest"]),
    )
