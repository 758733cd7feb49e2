"""Monte Carlo survival-trial engine.

Patients accrue uniformly, die with exponential hazards (control hazard
ln2/median, test hazard scaled by the true HR), and drop out with an
exponential hazard converted from an annual probability.  Analyses are
triggered by pooled death counts; estimation is delegated to the selected
backend (compiled extension or pure Python, identical semantics).

Determinism contract: every replication draws from its own generator seeded
by (rng_seed, replication index), and the draw order is fixed as arm
permutation, entry times, death times, dropout times.  Aggregation is pure
counting, so scheduling cannot change results.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import _backend
from ._trial_kernel_py import DIVERGED, NO_CONVERGENCE, NOT_REACHED, OK, ONE_ARM
from .guideline import (
    AnalysisPlan,
    GuidelineParams,
    final_threshold,
    positivity_probability,
    primary_threshold,
)
from .stats import HazardRatio

__all__ = [
    "UnreachableTargetError",
    "SimulationBudgetError",
    "TrialScenario",
    "PatientRecord",
    "PatientTable",
    "AnalysisSnapshot",
    "EstimateResult",
    "MilestoneOC",
    "EmpiricalOC",
    "generate_patients",
    "expected_deaths",
    "calendar_time_for_deaths",
    "simulate_trial",
    "estimate_log_hr",
    "empirical_oc",
]

# z for requiring milestone reachability in >= 99% of replications
_REACHABILITY_Z = 2.326

_REASONS = {
    OK: "",
    ONE_ARM: "all observed deaths in one arm",
    DIVERGED: "estimate diverged beyond |log HR| = log 50",
    NO_CONVERGENCE: "no convergence within iteration limit",
    NOT_REACHED: "milestone not reached",
}


class UnreachableTargetError(Exception):
    """A death-count target cannot be reached (dropout ceiling or shortfall)."""


class SimulationBudgetError(Exception):
    """A simulation exceeded its wall-clock budget before completing."""


@dataclass(frozen=True)
class TrialScenario:
    """Simulation inputs; hazards and arm sizes are derived properties."""

    n_patients: int
    accrual_months: float
    control_median_os_months: float
    true_os_hr: float
    k: float = 1.0
    annual_dropout_prob: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        n = int(self.n_patients)
        if n < 2:
            raise ValueError(f"need at least 2 patients, got {self.n_patients!r}")
        object.__setattr__(self, "n_patients", n)
        for name in ("accrual_months", "control_median_os_months"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "true_os_hr", float(HazardRatio(self.true_os_hr)))
        k = float(self.k)
        if not math.isfinite(k) or k <= 0.0:
            raise ValueError(f"allocation ratio must be positive, got {self.k!r}")
        object.__setattr__(self, "k", k)
        p = float(self.annual_dropout_prob)
        if not (0.0 <= p < 1.0):
            raise ValueError(
                f"annual dropout probability must lie in [0, 1), got {self.annual_dropout_prob!r}"
            )
        object.__setattr__(self, "annual_dropout_prob", p)
        seed = int(self.rng_seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.rng_seed!r}")
        object.__setattr__(self, "rng_seed", seed)

    @property
    def control_hazard(self) -> float:
        return math.log(2.0) / self.control_median_os_months

    @property
    def test_hazard(self) -> float:
        return self.control_hazard * self.true_os_hr

    @property
    def dropout_hazard(self) -> float:
        return -math.log1p(-self.annual_dropout_prob) / 12.0

    @property
    def arm_sizes(self) -> tuple[int, int]:
        """(n_test, n_control) under fixed-ratio k:1 randomization."""
        n_test = int(round(self.n_patients * self.k / (self.k + 1.0)))
        n_test = min(max(n_test, 1), self.n_patients - 1)
        return n_test, self.n_patients - n_test


@dataclass(frozen=True)
class PatientRecord:
    entry_time: float
    arm: str
    event_time: float
    dropout_time: float

    def __post_init__(self):
        if self.arm not in ("test", "control"):
            raise ValueError(f"arm must be 'test' or 'control', got {self.arm!r}")
        if self.entry_time < 0.0:
            raise ValueError(f"entry time must be nonnegative, got {self.entry_time}")
        if self.event_time <= 0.0 or self.dropout_time <= 0.0:
            raise ValueError("event and dropout times must be positive")


@dataclass(frozen=True)
class PatientTable:
    """Latent per-patient data for one replication, as aligned arrays."""

    entry: np.ndarray
    arm: np.ndarray
    death_time: np.ndarray
    dropout_time: np.ndarray

    def __len__(self) -> int:
        return self.entry.shape[0]

    def record(self, i: int) -> PatientRecord:
        return PatientRecord(
            entry_time=float(self.entry[i]),
            arm="test" if self.arm[i] else "control",
            event_time=float(self.death_time[i]),
            dropout_time=float(self.dropout_time[i]),
        )


@dataclass(frozen=True)
class AnalysisSnapshot:
    """Per-patient censored data at one event-triggered cutoff."""

    cutoff_months: float
    obs_months: np.ndarray
    event: np.ndarray
    arm: np.ndarray
    deaths: int

    def __post_init__(self):
        if self.deaths != int(self.event.sum()):
            raise ValueError("deaths must equal the number of event indicators")
        if self.obs_months.size and float(self.obs_months.min()) < 0.0:
            raise ValueError("observed times must be nonnegative")

    def records(self):
        """Yield (observed time, event indicator, arm) per patient."""
        for i in range(self.obs_months.shape[0]):
            yield (
                float(self.obs_months[i]),
                bool(self.event[i]),
                "test" if self.arm[i] else "control",
            )


@dataclass(frozen=True)
class EstimateResult:
    log_hr: float
    std_err: float
    converged: bool
    reason: str = ""


@dataclass(frozen=True)
class MilestoneOC:
    label: str
    deaths: int
    threshold_hr: float
    empirical_positivity: float
    mc_std_err: float
    analytic_positivity: float
    agrees_within_3se: bool
    divergent_fits: int
    unreachable_reps: int


@dataclass(frozen=True)
class EmpiricalOC:
    reps: int
    milestones: tuple[MilestoneOC, ...]


def generate_patients(scenario: TrialScenario, rep_index: int = 0) -> PatientTable:
    """Draw one replication's latent patient data.

    The generator is seeded from (scenario seed, rep_index) and the draw
    order is fixed; see the module docstring.
    """
    if rep_index < 0:
        raise ValueError(f"replication index must be nonnegative, got {rep_index}")
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([scenario.rng_seed, rep_index]))
    )
    n = scenario.n_patients
    n_test, _ = scenario.arm_sizes
    base = np.zeros(n, dtype=np.int8)
    base[:n_test] = 1
    arm = rng.permutation(base)
    entry = rng.uniform(0.0, scenario.accrual_months, n)
    hazard = np.where(arm == 1, scenario.test_hazard, scenario.control_hazard)
    death = rng.standard_exponential(n) / hazard
    mu = scenario.dropout_hazard
    if mu > 0.0:
        dropout = rng.standard_exponential(n) / mu
    else:
        dropout = np.full(n, np.inf)
    return PatientTable(entry=entry, arm=arm, death_time=death, dropout_time=dropout)


def _arm_expected_fraction(t: float, accrual: float, lam: float, mu: float) -> float:
    """P(observed dead by calendar t) for one patient of this arm."""
    if t <= 0.0:
        return 0.0
    nu = lam + mu
    w = lam / nu
    m = min(accrual, t)
    integral = m - (math.exp(-nu * (t - m)) - math.exp(-nu * t)) / nu
    return (w / accrual) * integral


def expected_deaths(scenario: TrialScenario, calendar_time: float) -> float:
    """Expected pooled death count by a calendar time, in closed form.

    Arms are weighted k/(k+1) and 1/(k+1); zero at time zero, approaching
    the dropout-limited ceiling as time grows.
    """
    t = float(calendar_time)
    if not math.isfinite(t) or t < 0.0:
        raise ValueError(f"calendar time must be nonnegative, got {calendar_time!r}")
    k = scenario.k
    a = scenario.accrual_months
    mu = scenario.dropout_hazard
    f_test = _arm_expected_fraction(t, a, scenario.test_hazard, mu)
    f_control = _arm_expected_fraction(t, a, scenario.control_hazard, mu)
    return scenario.n_patients * (k * f_test + f_control) / (k + 1.0)


def _expected_death_limit(scenario: TrialScenario) -> float:
    """Ceiling of expected_deaths as calendar time grows without bound."""
    mu = scenario.dropout_hazard
    k = scenario.k
    w_test = scenario.test_hazard / (scenario.test_hazard + mu)
    w_control = scenario.control_hazard / (scenario.control_hazard + mu)
    return scenario.n_patients * (k * w_test + w_control) / (k + 1.0)


def calendar_time_for_deaths(scenario: TrialScenario, target_deaths: float) -> float:
    """Bisection inverse of expected_deaths, to well under 0.01 months.

    Fractional targets are accepted so planning round trips through
    expected_deaths stay exact.
    """
    target = float(target_deaths)
    if not math.isfinite(target) or target < 1.0:
        raise ValueError(f"target death count must be >= 1, got {target_deaths!r}")
    limit = _expected_death_limit(scenario)
    if target >= limit * (1.0 - 1e-9):
        raise UnreachableTargetError(
            f"{target} deaths are never expected: the dropout-limited ceiling is {limit:.1f}"
        )
    lo = 0.0
    hi = max(scenario.accrual_months, 1.0)
    while expected_deaths(scenario, hi) < target:
        hi *= 2.0
        if hi > 1e8:
            raise UnreachableTargetError(
                f"{target} deaths are not expected within any practical horizon"
            )
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if expected_deaths(scenario, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _validate_reachability(scenario: TrialScenario, targets: list[int]) -> None:
    """Require each target reachable in >= 99% of replications.

    The ever-observed death count is a sum of independent Bernoulli draws
    with per-arm success probability hazard/(hazard + dropout hazard); a
    normal bound on that sum implements the check.
    """
    mu = scenario.dropout_hazard
    n_test, n_control = scenario.arm_sizes
    p_test = scenario.test_hazard / (scenario.test_hazard + mu)
    p_control = scenario.control_hazard / (scenario.control_hazard + mu)
    mean = n_test * p_test + n_control * p_control
    var = n_test * p_test * (1.0 - p_test) + n_control * p_control * (1.0 - p_control)
    bound = mean - _REACHABILITY_Z * math.sqrt(var)
    worst = max(targets)
    if worst > bound:
        raise UnreachableTargetError(
            f"milestone at {worst} deaths is not reachable in at least 99% of "
            f"replications (expected ever-observed deaths {mean:.1f}, 99% bound {bound:.1f})"
        )


def _snapshot_inputs(table: PatientTable, cutoff: float):
    """Censor latent data at a cutoff; event patients keep exact death times."""
    ev = (table.death_time <= table.dropout_time) & (
        table.entry + table.death_time <= cutoff
    )
    rest = np.minimum(table.dropout_time, cutoff - table.entry)
    np.maximum(rest, 0.0, out=rest)
    obs = np.where(ev, table.death_time, rest)
    return obs, ev


def simulate_trial(scenario: TrialScenario, plan: AnalysisPlan) -> list[AnalysisSnapshot]:
    """Run one replication and cut it at each milestone's L-th death time."""
    targets = [m.deaths for m in plan.milestones]
    _validate_reachability(scenario, targets)
    table = generate_patients(scenario, 0)
    observable = table.death_time <= table.dropout_time
    cal_deaths = np.sort(table.entry[observable] + table.death_time[observable])
    snapshots = []
    for milestone in plan.milestones:
        if milestone.deaths > cal_deaths.size:
            raise UnreachableTargetError(
                f"replication produced {cal_deaths.size} observable deaths; "
                f"milestone {milestone.label!r} at {milestone.deaths} was not reached"
            )
        cutoff = float(cal_deaths[milestone.deaths - 1])
        obs, ev = _snapshot_inputs(table, cutoff)
        snapshots.append(
            AnalysisSnapshot(
                cutoff_months=cutoff,
                obs_months=obs,
                event=ev,
                arm=table.arm,
                deaths=int(ev.sum()),
            )
        )
    return snapshots


def estimate_log_hr(snapshot: AnalysisSnapshot) -> EstimateResult:
    """Partial-likelihood log-HR for the snapshot's binary arm covariate."""
    log_hr, std_err, code = _backend.fit_snapshot(
        snapshot.obs_months, snapshot.event, snapshot.arm
    )
    return EstimateResult(
        log_hr=log_hr,
        std_err=std_err,
        converged=code == OK,
        reason=_REASONS[int(code)],
    )


def _csv_float(x: float) -> str:
    return repr(float(x))


def empirical_oc(
    scenario: TrialScenario,
    params: GuidelineParams,
    plan: AnalysisPlan,
    reps: int,
    csv_stream=None,
    time_budget_s: float | None = None,
) -> EmpiricalOC:
    """Estimate positivity probabilities by replication and compare with the
    asymptotic model.

    Divergent or degenerate fits count as not meeting the threshold and are
    reported separately; replications where a milestone is never reached are
    likewise counted as not met and reported.  Optionally streams one CSV row
    per (replication, milestone).
    """
    reps = int(reps)
    if reps < 100:
        raise ValueError(f"need at least 100 replications, got {reps}")
    if abs(params.k - scenario.k) > 1e-12:
        raise ValueError(
            f"allocation ratio mismatch: guideline k={params.k}, scenario k={scenario.k}"
        )
    milestones = plan.milestones
    targets = [m.deaths for m in milestones]
    _validate_reachability(scenario, targets)

    thresholds = np.array(
        [
            final_threshold(params, m.deaths)
            if m.final
            else primary_threshold(params, m.deaths)
            for m in milestones
        ]
    )
    # analytic counterpart under the scenario's true HR
    analytic = [
        positivity_probability(float(t), m.deaths, params.k, scenario.true_os_hr)
        for t, m in zip(thresholds, milestones)
    ]

    n_miles = len(milestones)
    met = np.zeros(n_miles, dtype=np.int64)
    divergent = np.zeros(n_miles, dtype=np.int64)
    unreachable = np.zeros(n_miles, dtype=np.int64)
    cutoffs = np.empty(n_miles, dtype=np.float64)
    reached = np.empty(n_miles, dtype=np.uint8)

    if csv_stream is not None:
        csv_stream.write(
            "rep,milestone,cutoff_months,deaths,log_hr,std_err,converged,met_threshold\n"
        )

    start = time.monotonic()
    for rep in range(reps):
        if time_budget_s is not None and rep % 128 == 0:
            if time.monotonic() - start > time_budget_s:
                raise SimulationBudgetError(
                    f"time budget of {time_budget_s:.1f}s exhausted after "
                    f"{rep} of {reps} replications"
                )
        table = generate_patients(scenario, rep)
        observable = table.death_time <= table.dropout_time
        cal_deaths = np.sort(table.entry[observable] + table.death_time[observable])
        for m, target in enumerate(targets):
            if target <= cal_deaths.size:
                reached[m] = 1
                cutoffs[m] = cal_deaths[target - 1]
            else:
                reached[m] = 0
                cutoffs[m] = math.nan
        fits = _backend.fit_milestones(
            table.entry, table.death_time, table.dropout_time, table.arm,
            cutoffs, reached,
        )
        for m, milestone in enumerate(milestones):
            log_hr = float(fits[m, 0])
            std_err = float(fits[m, 1])
            code = int(fits[m, 2])
            is_met = code == OK and math.exp(log_hr) < thresholds[m]
            if is_met:
                met[m] += 1
            if code == NOT_REACHED:
                unreachable[m] += 1
            elif code != OK:
                divergent[m] += 1
            if csv_stream is not None:
                deaths_seen = milestone.deaths if reached[m] else int(cal_deaths.size)
                csv_stream.write(
                    f"{rep},{milestone.label},{_csv_float(cutoffs[m])},{deaths_seen},"
                    f"{_csv_float(log_hr)},{_csv_float(std_err)},"
                    f"{'true' if code == OK else 'false'},{'true' if is_met else 'false'}\n"
                )

    rows = []
    for m, milestone in enumerate(milestones):
        p_hat = int(met[m]) / reps
        se = math.sqrt(p_hat * (1.0 - p_hat) / reps)
        rows.append(
            MilestoneOC(
                label=milestone.label,
                deaths=milestone.deaths,
                threshold_hr=float(thresholds[m]),
                empirical_positivity=p_hat,
                mc_std_err=se,
                analytic_positivity=float(analytic[m]),
                agrees_within_3se=abs(p_hat - analytic[m]) <= 3.0 * se,
                divergent_fits=int(divergent[m]),
                unreachable_reps=int(unreachable[m]),
            )
        )
    return EmpiricalOC(reps=reps, milestones=tuple(rows))
