"""Parsing and validation of the declarative design document that drives
the command-line and HTTP front ends.

Validation is hand-rolled so every failure carries a machine-usable code
and the json path of the offending field, and so the CLI and the service
reject exactly the same inputs with exactly the same diagnostics.
"""

from dataclasses import dataclass

from .guideline import AnalysisPlan, GuidelineParams, Milestone
from .oc import default_probe_hrs
from .stats import HazardRatio
from .trial import TrialScenario

_TOP_FIELDS = {
    "version",
    "delta_null",
    "delta_alt",
    "gamma_fa",
    "beta_pa",
    "k",
    "milestones",
    "probe_hrs",
    "scenario",
    "sim",
}
_MILESTONE_FIELDS = {"label", "deaths", "final"}
_SCENARIO_FIELDS = {
    "n_patients",
    "accrual_months",
    "control_median_os_months",
    "true_os_hr",
    "annual_dropout_prob",
}
_SIM_FIELDS = {"reps", "seed"}


class DocumentError(Exception):
    """A design document failed validation.

    Carries a stable ``code``, a human-readable ``message``, and the json
    ``field_path`` of the offending value (empty for document-level errors).
    """

    def __init__(self, code: str, message: str, field_path: str = ""):
        super().__init__(message)
        self.code = code
        self.message = message
        self.field_path = field_path


@dataclass(frozen=True)
class SimSettings:
    reps: int
    seed: int


@dataclass(frozen=True)
class ResolvedDesign:
    """A validated document with defaults applied, ready for the domain
    layer.  ``probe_hrs`` is the resolved extra-probe list (the design
    alternative is prepended automatically downstream)."""

    version: str
    params: GuidelineParams
    plan: AnalysisPlan
    probe_hrs: tuple[float, ...]
    scenario: TrialScenario | None
    sim: SimSettings | None


def _require(obj: dict, field: str, path: str):
    if field not in obj:
        where = f"{path}.{field}" if path else field
        raise DocumentError("missing_field", "required field is missing", where)
    return obj[field]


def _reject_unknown(obj: dict, allowed: set, path: str):
    for key in obj:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise DocumentError("unknown_field", "field is not part of the schema", where)


def _object(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise DocumentError("invalid_type", "expected a json object", path)
    return value


def _string(value, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise DocumentError("invalid_type", "expected a nonempty string", path)
    return value


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError("invalid_type", "expected a number", path)
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError("invalid_type", "expected an integer", path)
    return value


def _positive_int(value, path: str) -> int:
    v = _integer(value, path)
    if v <= 0:
        raise DocumentError("invalid_value", f"must be positive, got {v}", path)
    return v


def _parse_params(doc: dict) -> GuidelineParams:
    delta_null = _number(_require(doc, "delta_null", ""), "delta_null")
    delta_alt = _number(_require(doc, "delta_alt", ""), "delta_alt")
    gamma_fa = _number(_require(doc, "gamma_fa", ""), "gamma_fa")
    beta_pa = _number(_require(doc, "beta_pa", ""), "beta_pa")
    k = _number(doc.get("k", 1.0), "k")
    try:
        return GuidelineParams(delta_null, delta_alt, gamma_fa, beta_pa, k=k)
    except ValueError as exc:
        raise DocumentError("invalid_value", str(exc), _params_path(str(exc)))


def _params_path(message: str) -> str:
    # map the domain constructor's complaint back onto a field name
    for field in ("delta_null", "delta_alt", "gamma_fa", "beta_pa"):
        if field in message:
            return field
    if "allocation" in message:
        return "k"
    return ""


def _parse_plan(doc: dict) -> AnalysisPlan:
    raw = _require(doc, "milestones", "")
    if not isinstance(raw, list) or not raw:
        raise DocumentError("invalid_type", "expected a nonempty array", "milestones")
    entries = []
    any_final = any(
        isinstance(m, dict) and m.get("final") is True for m in raw
    )
    for i, item in enumerate(raw):
        path = f"milestones[{i}]"
        obj = _object(item, path)
        _reject_unknown(obj, _MILESTONE_FIELDS, path)
        deaths = _positive_int(_require(obj, "deaths", path), f"{path}.deaths")
        label = obj.get("label", f"analysis-{i + 1}")
        label = _string(label, f"{path}.label")
        final = obj.get("final", (not any_final) and i == len(raw) - 1)
        if not isinstance(final, bool):
            raise DocumentError("invalid_type", "expected a boolean", f"{path}.final")
        entries.append(Milestone(label=label, deaths=deaths, final=final))
    try:
        return AnalysisPlan(tuple(entries))
    except ValueError as exc:
        raise DocumentError("invalid_value", str(exc), "milestones")


def _parse_probes(doc: dict, params: GuidelineParams) -> tuple[float, ...]:
    if "probe_hrs" not in doc:
        return default_probe_hrs(params)
    raw = doc["probe_hrs"]
    if not isinstance(raw, list):
        raise DocumentError("invalid_type", "expected an array", "probe_hrs")
    probes = []
    for i, item in enumerate(raw):
        path = f"probe_hrs[{i}]"
        v = _number(item, path)
        try:
            probes.append(float(HazardRatio(v)))
        except ValueError as exc:
            raise DocumentError("invalid_value", str(exc), path)
    return tuple(probes)


def _parse_scenario(doc: dict, k: float, seed: int) -> TrialScenario | None:
    if "scenario" not in doc:
        return None
    obj = _object(doc["scenario"], "scenario")
    _reject_unknown(obj, _SCENARIO_FIELDS, "scenario")
    fields = {
        name: _number(_require(obj, name, "scenario"), f"scenario.{name}")
        for name in _SCENARIO_FIELDS
    }
    n_patients = _positive_int(
        obj["n_patients"], "scenario.n_patients"
    )
    try:
        return TrialScenario(
            n_patients=n_patients,
            accrual_months=fields["accrual_months"],
            control_median_os_months=fields["control_median_os_months"],
            true_os_hr=fields["true_os_hr"],
            k=k,
            annual_dropout_prob=fields["annual_dropout_prob"],
            rng_seed=seed,
        )
    except ValueError as exc:
        raise DocumentError("invalid_value", str(exc), _scenario_path(str(exc)))


def _scenario_path(message: str) -> str:
    for name in _SCENARIO_FIELDS:
        if name.replace("_", " ") in message or name in message:
            return f"scenario.{name}"
    return "scenario"


def _parse_sim(doc: dict) -> SimSettings | None:
    if "sim" not in doc:
        return None
    obj = _object(doc["sim"], "sim")
    _reject_unknown(obj, _SIM_FIELDS, "sim")
    reps = _positive_int(_require(obj, "reps", "sim"), "sim.reps")
    seed = _integer(_require(obj, "seed", "sim"), "sim.seed")
    if not 0 <= seed < 2**64:
        raise DocumentError(
            "invalid_value", f"seed must lie in [0, 2^64), got {seed}", "sim.seed"
        )
    return SimSettings(reps=reps, seed=seed)


def resolve_document(raw) -> ResolvedDesign:
    """Validate a parsed json document and apply defaults.

    Accepts either a bare design document or a json artifact produced by
    the CLI, which embeds the resolved document under a ``document`` key.
    """
    obj = _object(raw, "")
    if "document" in obj and "tool" in obj:
        obj = _object(obj["document"], "document")
    _reject_unknown(obj, _TOP_FIELDS, "")
    version = _string(_require(obj, "version", ""), "version")
    params = _parse_params(obj)
    plan = _parse_plan(obj)
    probes = _parse_probes(obj, params)
    sim = _parse_sim(obj)
    scenario = _parse_scenario(
        obj, float(params.k), sim.seed if sim is not None else 0
    )
    return ResolvedDesign(
        version=version,
        params=params,
        plan=plan,
        probe_hrs=probes,
        scenario=scenario,
        sim=sim,
    )


def document_dict(resolved: ResolvedDesign) -> dict:
    """Plain-dict echo of a resolved document.

    Feeding the result back through resolve_document reproduces the same
    resolution, which keeps rendering idempotent across re-ingestion.
    """
    out = {
        "version": resolved.version,
        "delta_null": float(resolved.params.delta_null),
        "delta_alt": float(resolved.params.delta_alt),
        "gamma_fa": float(resolved.params.gamma_fa),
        "beta_pa": float(resolved.params.beta_pa),
        "k": float(resolved.params.k),
        "milestones": [
            {"label": m.label, "deaths": m.deaths, "final": m.final}
            for m in resolved.plan.milestones
        ],
        "probe_hrs": [float(p) for p in resolved.probe_hrs],
    }
    if resolved.scenario is not None:
        s = resolved.scenario
        out["scenario"] = {
            "n_patients": s.n_patients,
            "accrual_months": float(s.accrual_months),
            "control_median_os_months": float(s.control_median_os_months),
            "true_os_hr": float(s.true_os_hr),
            "annual_dropout_prob": float(s.annual_dropout_prob),
        }
    if resolved.sim is not None:
        out["sim"] = {"reps": resolved.sim.reps, "seed": resolved.sim.seed}
    return out
