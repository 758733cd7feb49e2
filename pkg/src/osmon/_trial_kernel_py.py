"""Pure-Python/numpy estimation backend.

Reference implementation of the fitting kernel; the compiled backend mirrors
these semantics operation for operation.  Partial-likelihood maximization for
a single binary covariate with Breslow tie handling: at each death time the
risk set is everyone whose observed time is >= that death time, and tied
deaths share one risk set.
"""

import math

import numpy as np

GRAD_TOL = 1e-8
MAX_ITER = 50
STEP_CAP = 2.0
LOG_HR_CAP = math.log(50.0)

# fit status codes shared by both backends
OK = 0
ONE_ARM = 1
DIVERGED = 2
NO_CONVERGENCE = 3
NOT_REACHED = 4


def _fit_counts(x_d, r0, r1):
    """Damped Newton solve of the score equation given per-death risk counts.

    x_d: arm of each death (0/1), ordered by death time.
    r0, r1: control/test at-risk counts at each death time.
    Returns (log_hr, std_err, code).
    """
    n_deaths = x_d.size
    sx = float(x_d.sum())
    if sx == 0.0 or sx == float(n_deaths):
        return math.nan, math.inf, ONE_ARM
    beta = 0.0
    info = 0.0
    code = NO_CONVERGENCE
    for _ in range(MAX_ITER):
        eb = math.exp(beta)
        w = r1 * eb
        p = w / (r0 + w)
        g = sx - float(p.sum())
        info = float((p * (1.0 - p)).sum())
        if abs(g) < GRAD_TOL:
            code = OK if info > 0.0 else ONE_ARM
            break
        if info <= 0.0:
            code = ONE_ARM
            break
        step = g / info
        if step > STEP_CAP:
            step = STEP_CAP
        elif step < -STEP_CAP:
            step = -STEP_CAP
        beta += step
        if abs(beta) > LOG_HR_CAP:
            code = DIVERGED
            break
    if code == OK:
        return beta, 1.0 / math.sqrt(info), OK
    if code == ONE_ARM:
        return math.nan, math.inf, ONE_ARM
    return beta, math.inf, code


def fit_snapshot(obs, event, arm):
    """Fit the log-HR from censored per-patient data.

    obs: observed follow-up times; event: death indicators; arm: 0/1.
    """
    obs = np.asarray(obs, dtype=np.float64)
    event = np.asarray(event, dtype=bool)
    arm = np.asarray(arm)
    t_d = obs[event]
    x_d = arm[event]
    order = np.argsort(t_d, kind="stable")
    t_d = t_d[order]
    x_d = x_d[order].astype(np.float64)
    obs0 = np.sort(obs[arm == 0])
    obs1 = np.sort(obs[arm == 1])
    r0 = (obs0.size - np.searchsorted(obs0, t_d, side="left")).astype(np.float64)
    r1 = (obs1.size - np.searchsorted(obs1, t_d, side="left")).astype(np.float64)
    return _fit_counts(x_d, r0, r1)


def fit_milestones(entry, tdeath, tdrop, arm, cutoffs, reached):
    """Censor the latent patient data at each milestone cutoff and fit.

    Returns an array of (log_hr, std_err, code) rows, one per milestone.
    Event patients keep their exact death time as the observed time so the
    triggering death is always inside its own risk set.
    """
    out = np.empty((len(cutoffs), 3), dtype=np.float64)
    for m in range(len(cutoffs)):
        if not reached[m]:
            out[m] = (math.nan, math.inf, NOT_REACHED)
            continue
        c = cutoffs[m]
        ev = (tdeath <= tdrop) & (entry + tdeath <= c)
        rest = np.minimum(tdrop, c - entry)
        np.maximum(rest, 0.0, out=rest)
        obs = np.where(ev, tdeath, rest)
        out[m] = fit_snapshot(obs, ev, arm)
    return out
