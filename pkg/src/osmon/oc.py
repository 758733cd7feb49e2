"""Operating characteristics of a monitoring guideline under the asymptotic
normal model: false-positivity and false-negativity at the primary and final
analyses, and positivity curves over a true-HR grid for plotting."""

import math
from dataclasses import dataclass

from .guideline import (
    AnalysisPlan,
    GuidelineParams,
    final_threshold,
    positivity_probability,
    primary_threshold,
)
from .stats import HazardRatio

# the asymptotic model is quoted as reliable for HRs within a factor of two
# of the null; beyond that the simulator is the authority
ANALYTIC_HR_RANGE = (0.5, 2.0)

_GRID_LO = 0.5
_GRID_HI = 2.0
_GRID_POINTS = 151


def hr_outside_analytic_range(hr: float) -> bool:
    """True when |log hr| exceeds log 2, where the normal approximation thins."""
    return abs(math.log(HazardRatio(hr))) > math.log(2.0) + 1e-12


def default_probe_hrs(params: GuidelineParams) -> tuple[float, ...]:
    """Probes reports show when none are requested: the design alternative,
    the incremental-benefit cases 0.95 and 1.0, and the unacceptable margin."""
    out = [float(params.delta_alt)]
    for p in (0.95, 1.0, float(params.delta_null)):
        if all(abs(p - q) > 1e-12 for q in out):
            out.append(p)
    return tuple(out)


def default_hr_grid(n_points: int = _GRID_POINTS) -> tuple[float, ...]:
    """Log-uniform grid over the range the asymptotic model covers."""
    if n_points < 2:
        raise ValueError(f"grid needs at least two points, got {n_points}")
    ratio = _GRID_HI / _GRID_LO
    return tuple(
        _GRID_LO * ratio ** (i / (n_points - 1)) for i in range(n_points)
    )


def merged_hr_grid(extra_hrs, n_points: int = _GRID_POINTS) -> tuple[float, ...]:
    """Default grid with the given HRs spliced in as exact grid points, so
    chart readouts at probed values need no interpolation."""
    vals = sorted(
        list(default_hr_grid(n_points)) + [float(HazardRatio(h)) for h in extra_hrs]
    )
    out = [vals[0]]
    for v in vals[1:]:
        if v - out[-1] > 1e-12:
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class OperatingCharacteristics:
    """False-positive and false-negative rates at the primary and final
    analyses.  The per-probe entries map each probed true HR to the
    probability the corresponding threshold is missed."""

    primary_deaths: int
    final_deaths: int
    primary_threshold_hr: float
    final_threshold_hr: float
    fp_final: float
    fn_final: dict[float, float]
    fp_primary: float
    fn_primary: dict[float, float]
    beta_fa: float
    probes_outside_analytic_range: tuple[float, ...]

    @property
    def probes(self) -> tuple[float, ...]:
        return tuple(self.fn_final.keys())


@dataclass(frozen=True)
class PowerCurve:
    """Positivity probability against true HR for one milestone threshold."""

    deaths: int
    threshold: float
    points: tuple[tuple[float, float], ...]


def _assemble_probes(params: GuidelineParams, probe_hrs) -> list[float]:
    probes: list[float] = [float(params.delta_alt)]
    for p in probe_hrs:
        p = float(HazardRatio(p))
        if all(abs(p - q) > 1e-12 for q in probes):
            probes.append(p)
    return probes


def analytic_oc(
    params: GuidelineParams,
    plan: AnalysisPlan,
    probe_hrs: list[float] | tuple[float, ...] = (),
    primary_deaths: int | None = None,
) -> OperatingCharacteristics:
    """Evaluate the guideline's operating characteristics.

    The primary analysis defaults to the last non-final milestone of the
    plan (the final milestone itself when the plan has no earlier one);
    pass ``primary_deaths`` to evaluate it at a different death count.
    delta_alt is always probed and listed first.
    """
    if primary_deaths is None:
        non_final = [m for m in plan.milestones if not m.final]
        primary_deaths = non_final[-1].deaths if non_final else plan.final.deaths
    probes = _assemble_probes(params, probe_hrs)

    l_fa = plan.final.deaths
    t_final = final_threshold(params, l_fa)
    t_primary = primary_threshold(params, primary_deaths)
    k = params.k

    fp_final = positivity_probability(t_final, l_fa, k, params.delta_null)
    fp_primary = positivity_probability(t_primary, primary_deaths, k, params.delta_null)
    fn_final = {
        p: 1.0 - positivity_probability(t_final, l_fa, k, p) for p in probes
    }
    fn_primary = {
        p: 1.0 - positivity_probability(t_primary, primary_deaths, k, p)
        for p in probes
    }
    return OperatingCharacteristics(
        primary_deaths=primary_deaths,
        final_deaths=l_fa,
        primary_threshold_hr=t_primary,
        final_threshold_hr=t_final,
        fp_final=fp_final,
        fn_final=fn_final,
        fp_primary=fp_primary,
        fn_primary=fn_primary,
        beta_fa=fn_final[probes[0]],
        probes_outside_analytic_range=tuple(
            p for p in probes if hr_outside_analytic_range(p)
        ),
    )


def power_curve(
    threshold: float,
    deaths: int,
    k: float = 1.0,
    hr_grid: list[float] | tuple[float, ...] | None = None,
) -> PowerCurve:
    """Positivity probability at each grid HR for one threshold.

    The default grid is log-uniform over HR 0.5 to 2.0, matching the
    symmetry of the asymptotic model in log HR.
    """
    threshold = float(HazardRatio(threshold))
    if hr_grid is None:
        hr_grid = default_hr_grid()
    grid = [float(HazardRatio(h)) for h in hr_grid]
    if not grid:
        raise ValueError("hr_grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("hr_grid must be strictly increasing")
    points = tuple(
        (h, positivity_probability(threshold, deaths, k, h)) for h in grid
    )
    return PowerCurve(deaths=int(deaths), threshold=threshold, points=points)
