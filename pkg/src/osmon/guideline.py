"""Construction of OS safety monitoring guidelines.

A guideline fixes, for each planned analysis, the hazard-ratio threshold an
observed estimate must fall below ("positivity") together with the implied
one-sided false-positive rate for ruling out the harm margin.  Non-final
analyses are powered at ``1 - beta_pa`` under the plausible-benefit HR; the
final analysis is pinned directly at the agreed false-positive rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .stats import HazardRatio, Probability, std_normal_cdf, std_normal_quantile

__all__ = [
    "GuidelineParams",
    "Milestone",
    "AnalysisPlan",
    "GuidelineRow",
    "MonitoringGuideline",
    "final_threshold",
    "primary_fp_rate",
    "primary_threshold",
    "ci_level_to_rule_out",
    "positivity_probability",
    "build_guideline",
    "t2dm_margin_and_threshold",
]


@dataclass(frozen=True)
class GuidelineParams:
    """The clinical design quadruple plus the allocation ratio.

    delta_null: smallest unacceptable detrimental OS HR (> 1).
    delta_alt: plausible benefit HR used to power positivity (< delta_null).
    gamma_fa: one-sided false-positive rate tolerated at the final analysis.
    beta_pa: false-negative rate targeted at non-final analyses.
    k: test:control allocation ratio.
    """

    delta_null: float
    delta_alt: float
    gamma_fa: float
    beta_pa: float
    k: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "delta_null", HazardRatio(self.delta_null))
        object.__setattr__(self, "delta_alt", HazardRatio(self.delta_alt))
        object.__setattr__(self, "gamma_fa", Probability(self.gamma_fa))
        object.__setattr__(self, "beta_pa", Probability(self.beta_pa))
        k = float(self.k)
        if not math.isfinite(k) or k <= 0.0:
            raise ValueError(f"allocation ratio must be positive, got {self.k!r}")
        object.__setattr__(self, "k", k)
        if self.delta_null <= 1.0:
            raise ValueError(f"delta_null must exceed 1, got {self.delta_null}")
        if self.delta_alt >= self.delta_null:
            raise ValueError(
                f"delta_alt must be below delta_null, got {self.delta_alt} >= {self.delta_null}"
            )
        if self.gamma_fa >= 0.5:
            raise ValueError(f"gamma_fa must be below 0.5, got {self.gamma_fa}")
        if self.beta_pa >= 0.5:
            raise ValueError(f"beta_pa must be below 0.5, got {self.beta_pa}")


@dataclass(frozen=True)
class Milestone:
    label: str
    deaths: int
    final: bool = False

    def __post_init__(self):
        if int(self.deaths) < 1:
            raise ValueError(f"milestone death count must be >= 1, got {self.deaths}")
        object.__setattr__(self, "deaths", int(self.deaths))


@dataclass(frozen=True)
class AnalysisPlan:
    """Ordered death-count milestones, the last of which is the final analysis."""

    milestones: tuple[Milestone, ...]

    def __post_init__(self):
        ms = tuple(self.milestones)
        if not ms:
            raise ValueError("analysis plan needs at least one milestone")
        finals = [m for m in ms if m.final]
        if len(finals) != 1:
            raise ValueError(f"exactly one milestone must be final, got {len(finals)}")
        if not ms[-1].final:
            raise ValueError("the final milestone must come last")
        deaths = [m.deaths for m in ms]
        if any(b <= a for a, b in zip(deaths, deaths[1:])):
            raise ValueError(f"milestone death counts must be strictly increasing: {deaths}")
        object.__setattr__(self, "milestones", ms)

    @classmethod
    def from_deaths(cls, deaths: list[int], labels: list[str] | None = None) -> "AnalysisPlan":
        """Plan whose last entry is the final analysis, with default labels."""
        if labels is None:
            labels = [f"analysis-{i + 1}" for i in range(len(deaths))]
        ms = [
            Milestone(label, d, final=(i == len(deaths) - 1))
            for i, (label, d) in enumerate(zip(labels, deaths))
        ]
        return cls(tuple(ms))

    @property
    def final(self) -> Milestone:
        return self.milestones[-1]


@dataclass(frozen=True)
class GuidelineRow:
    """One analysis of a monitoring guideline.

    ``ci_level_pct`` is None when the implied false-positive rate reaches 0.5,
    in which case no two-sided CI can express the criterion and
    ``warning_threshold_exceeds_margin`` is set.
    """

    label: str
    deaths: int
    final: bool
    threshold_hr: float
    one_sided_fp_rate: float
    ci_level_pct: float | None
    positivity_prob_under: dict[float, float]
    warning_threshold_exceeds_margin: bool


@dataclass(frozen=True)
class MonitoringGuideline:
    params: GuidelineParams
    plan: AnalysisPlan
    probe_hrs: tuple[float, ...]
    rows: tuple[GuidelineRow, ...] = field(default=())

    @property
    def final_row(self) -> GuidelineRow:
        return self.rows[-1]


def _threshold_from_rate(delta_null: float, gamma: float, deaths: int, k: float) -> float:
    return delta_null * math.exp(
        (k + 1.0) * std_normal_quantile(gamma) / math.sqrt(k * deaths)
    )


def final_threshold(params: GuidelineParams, l_fa: int) -> float:
    """HR below which the estimate rules out delta_null at level gamma_fa.

    Always below delta_null, approaching it as the death count grows.
    """
    l_fa = _check_deaths(l_fa)
    return _threshold_from_rate(params.delta_null, params.gamma_fa, l_fa, params.k)


def primary_fp_rate(params: GuidelineParams, l_pa: int) -> float:
    """One-sided false-positive rate implied at a non-final analysis.

    The positivity threshold at ``l_pa`` deaths is chosen so that it is met
    with probability 1 - beta_pa when the true HR is delta_alt; this is the
    resulting rate of falsely clearing delta_null.  May exceed 0.5 for very
    small death counts (flagged downstream rather than rejected).
    """
    l_pa = _check_deaths(l_pa)
    k = params.k
    drift = (
        math.sqrt(k * l_pa) * math.log(params.delta_null / params.delta_alt) / (k + 1.0)
    )
    return 1.0 - std_normal_cdf(drift - std_normal_quantile(1.0 - params.beta_pa))


def primary_threshold(params: GuidelineParams, l_pa: int) -> float:
    """Positivity threshold at a non-final analysis.

    Met with probability exactly 1 - beta_pa under delta_alt.  Algebraically
    this equals the final-analysis threshold formula evaluated at the implied
    rate; it is computed from the powering condition directly, which stays
    exact even when that rate underflows.
    """
    l_pa = _check_deaths(l_pa)
    k = params.k
    return params.delta_alt * math.exp(
        (k + 1.0) * std_normal_quantile(1.0 - params.beta_pa) / math.sqrt(k * l_pa)
    )


def ci_level_to_rule_out(gamma: float) -> float:
    """Two-sided CI level (percent) whose upper bound expresses a one-sided
    rule-out at rate ``gamma``."""
    gamma = Probability(gamma)
    if gamma >= 0.5:
        raise ValueError(
            f"no two-sided CI corresponds to a one-sided rate of {float(gamma)}; "
            "the positivity threshold exceeds the margin"
        )
    return (1.0 - 2.0 * gamma) * 100.0


def positivity_probability(threshold: float, deaths: int, k: float, true_hr: float) -> float:
    """Probability the log-HR estimate falls below log(threshold) when the
    true HR is ``true_hr``, under the asymptotic normal model with
    information k*deaths/(k+1)^2.  Exactly 0.5 at true_hr == threshold."""
    threshold = HazardRatio(threshold)
    true_hr = HazardRatio(true_hr)
    deaths = _check_deaths(deaths)
    k = float(k)
    if not math.isfinite(k) or k <= 0.0:
        raise ValueError(f"allocation ratio must be positive, got {k!r}")
    z = math.sqrt(k * deaths) / (k + 1.0) * math.log(threshold / true_hr)
    return std_normal_cdf(z)


def build_guideline(
    params: GuidelineParams,
    plan: AnalysisPlan,
    probe_hrs: list[float] | tuple[float, ...] = (),
) -> MonitoringGuideline:
    """Assemble the full guideline table for a plan.

    Non-final milestones are powered at 1 - beta_pa under delta_alt; the
    final milestone is pinned at gamma_fa.  delta_alt is always probed first,
    followed by the caller-supplied probe HRs in order (duplicates dropped).
    """
    probes: list[float] = [float(params.delta_alt)]
    for p in probe_hrs:
        p = float(HazardRatio(p))
        if all(abs(p - q) > 1e-12 for q in probes):
            probes.append(p)

    rows = []
    for m in plan.milestones:
        if m.final:
            gamma = float(params.gamma_fa)
            threshold = final_threshold(params, m.deaths)
        else:
            gamma = primary_fp_rate(params, m.deaths)
            threshold = primary_threshold(params, m.deaths)
        warn = threshold >= params.delta_null
        # computed inline: gamma can underflow to 0 for huge death counts,
        # which the validating public helper would reject
        ci = None if gamma >= 0.5 else (1.0 - 2.0 * gamma) * 100.0
        probs = {
            p: positivity_probability(threshold, m.deaths, params.k, p) for p in probes
        }
        rows.append(
            GuidelineRow(
                label=m.label,
                deaths=m.deaths,
                final=m.final,
                threshold_hr=threshold,
                one_sided_fp_rate=gamma,
                ci_level_pct=ci,
                positivity_prob_under=probs,
                warning_threshold_exceeds_margin=warn,
            )
        )
    return MonitoringGuideline(
        params=params, plan=plan, probe_hrs=tuple(probes), rows=tuple(rows)
    )


def t2dm_margin_and_threshold(
    l_pa: int,
    alpha: float = 0.025,
    power: float = 0.9,
    k: float = 1.0,
) -> tuple[float, float]:
    """Margin of detriment ruled out at one-sided ``alpha`` with the given
    power under HR = 1 at ``l_pa`` deaths, and the estimate threshold that
    achieves it.  This is the cardiovascular-safety precedent arithmetic."""
    l_pa = _check_deaths(l_pa)
    alpha = Probability(alpha)
    power = Probability(power)
    k = float(k)
    if not math.isfinite(k) or k <= 0.0:
        raise ValueError(f"allocation ratio must be positive, got {k!r}")
    scale = (k + 1.0) / math.sqrt(k * l_pa)
    margin = math.exp(
        (std_normal_quantile(1.0 - alpha) + std_normal_quantile(power)) * scale
    )
    threshold = math.exp(std_normal_quantile(power) * scale)
    return margin, threshold


def _check_deaths(deaths: int) -> int:
    d = int(deaths)
    if d < 1:
        raise ValueError(f"death count must be >= 1, got {deaths}")
    return d
