# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled estimation backend.

Mirrors _trial_kernel_py operation for operation: same censoring rules, same
risk-count definition (lower-bound binary search on sorted per-arm observed
times), and the same damped Newton iteration with identical constants.
"""

import numpy as np

from libc.math cimport exp, fabs, log, sqrt
from libc.stdlib cimport free, malloc, qsort

cdef double GRAD_TOL = 1e-8
cdef int MAX_ITER = 50
cdef double STEP_CAP = 2.0
cdef double LOG_HR_CAP = log(50.0)

cdef double NAN_VAL = float("nan")
cdef double INF_VAL = float("inf")

cdef int OK = 0
cdef int ONE_ARM = 1
cdef int DIVERGED = 2
cdef int NO_CONVERGENCE = 3
cdef int NOT_REACHED = 4


cdef struct DeathRec:
    double t
    double x


cdef int _cmp_double(const void* a, const void* b) noexcept nogil:
    cdef double da = (<const double*> a)[0]
    cdef double db = (<const double*> b)[0]
    if da < db:
        return -1
    if da > db:
        return 1
    return 0


cdef int _cmp_death(const void* a, const void* b) noexcept nogil:
    cdef double ta = (<const DeathRec*> a).t
    cdef double tb = (<const DeathRec*> b).t
    if ta < tb:
        return -1
    if ta > tb:
        return 1
    return 0


cdef int _lower_bound(const double* arr, int n, double v) noexcept nogil:
    cdef int lo = 0
    cdef int hi = n
    cdef int mid
    while lo < hi:
        mid = (lo + hi) // 2
        if arr[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef void _fit_core(DeathRec* deaths, int n_deaths,
                    const double* obs0, int n0,
                    const double* obs1, int n1,
                    double* res) noexcept nogil:
    """Risk counts plus Newton solve; res receives (log_hr, std_err, code)."""
    cdef double* r0
    cdef double* r1
    cdef int d, it
    cdef double sx = 0.0
    cdef double beta, eb, w, p, psum, g, info, step
    cdef int code

    for d in range(n_deaths):
        sx += deaths[d].x
    if sx == 0.0 or sx == <double> n_deaths:
        res[0] = NAN_VAL
        res[1] = INF_VAL
        res[2] = ONE_ARM
        return

    r0 = <double*> malloc(n_deaths * sizeof(double))
    r1 = <double*> malloc(n_deaths * sizeof(double))
    if r0 == NULL or r1 == NULL:
        if r0 != NULL:
            free(r0)
        if r1 != NULL:
            free(r1)
        res[0] = NAN_VAL
        res[1] = INF_VAL
        res[2] = NO_CONVERGENCE
        return
    for d in range(n_deaths):
        r0[d] = <double> (n0 - _lower_bound(obs0, n0, deaths[d].t))
        r1[d] = <double> (n1 - _lower_bound(obs1, n1, deaths[d].t))

    beta = 0.0
    info = 0.0
    code = NO_CONVERGENCE
    for it in range(MAX_ITER):
        eb = exp(beta)
        psum = 0.0
        info = 0.0
        for d in range(n_deaths):
            w = r1[d] * eb
            p = w / (r0[d] + w)
            psum += p
            info += p * (1.0 - p)
        g = sx - psum
        if fabs(g) < GRAD_TOL:
            if info > 0.0:
                code = OK
            else:
                code = ONE_ARM
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
        if fabs(beta) > LOG_HR_CAP:
            code = DIVERGED
            break
    free(r0)
    free(r1)

    if code == OK:
        res[0] = beta
        res[1] = 1.0 / sqrt(info)
        res[2] = OK
    elif code == ONE_ARM:
        res[0] = NAN_VAL
        res[1] = INF_VAL
        res[2] = ONE_ARM
    else:
        res[0] = beta
        res[1] = INF_VAL
        res[2] = code


cdef void _fit_censored(const double* obs, const unsigned char* ev,
                        const signed char* arm, int n,
                        DeathRec* deaths, double* obs0, double* obs1,
                        double* res) noexcept nogil:
    """Split censored data into per-arm pools and deaths, sort, then fit.

    deaths/obs0/obs1 are caller-provided scratch of capacity n each.
    """
    cdef int i
    cdef int n_deaths = 0
    cdef int n0 = 0
    cdef int n1 = 0
    for i in range(n):
        if arm[i] != 0:
            obs1[n1] = obs[i]
            n1 += 1
        else:
            obs0[n0] = obs[i]
            n0 += 1
        if ev[i] != 0:
            deaths[n_deaths].t = obs[i]
            deaths[n_deaths].x = 1.0 if arm[i] != 0 else 0.0
            n_deaths += 1
    qsort(deaths, n_deaths, sizeof(DeathRec), _cmp_death)
    qsort(obs0, n0, sizeof(double), _cmp_double)
    qsort(obs1, n1, sizeof(double), _cmp_double)
    _fit_core(deaths, n_deaths, obs0, n0, obs1, n1, res)


def fit_snapshot(obs, event, arm):
    """Fit the log-HR from censored per-patient data; returns (log_hr, std_err, code)."""
    cdef double[::1] obs_v = np.ascontiguousarray(obs, dtype=np.float64)
    cdef unsigned char[::1] ev_v = np.ascontiguousarray(event, dtype=np.uint8)
    cdef signed char[::1] arm_v = np.ascontiguousarray(arm, dtype=np.int8)
    cdef int n = obs_v.shape[0]
    cdef double res[3]
    cdef DeathRec* deaths = <DeathRec*> malloc(n * sizeof(DeathRec))
    cdef double* obs0 = <double*> malloc(n * sizeof(double))
    cdef double* obs1 = <double*> malloc(n * sizeof(double))
    if deaths == NULL or obs0 == NULL or obs1 == NULL:
        if deaths != NULL:
            free(deaths)
        if obs0 != NULL:
            free(obs0)
        if obs1 != NULL:
            free(obs1)
        raise MemoryError("could not allocate fit scratch buffers")
    with nogil:
        _fit_censored(&obs_v[0], &ev_v[0], &arm_v[0], n, deaths, obs0, obs1, res)
    free(deaths)
    free(obs0)
    free(obs1)
    return float(res[0]), float(res[1]), int(res[2])


def fit_milestones(entry, tdeath, tdrop, arm, cutoffs, reached):
    """Censor latent patient data at each cutoff and fit; returns an (m, 3) array."""
    cdef double[::1] e_v = np.ascontiguousarray(entry, dtype=np.float64)
    cdef double[::1] td_v = np.ascontiguousarray(tdeath, dtype=np.float64)
    cdef double[::1] dr_v = np.ascontiguousarray(tdrop, dtype=np.float64)
    cdef signed char[::1] arm_v = np.ascontiguousarray(arm, dtype=np.int8)
    cdef double[::1] c_v = np.ascontiguousarray(cutoffs, dtype=np.float64)
    cdef unsigned char[::1] reach_v = np.ascontiguousarray(reached, dtype=np.uint8)
    cdef int n = e_v.shape[0]
    cdef int n_miles = c_v.shape[0]
    out = np.empty((n_miles, 3), dtype=np.float64)
    cdef double[:, ::1] out_v = out
    cdef int m, i
    cdef double c, rest, ce
    cdef unsigned char is_ev
    cdef double* obs = <double*> malloc(n * sizeof(double))
    cdef unsigned char* ev = <unsigned char*> malloc(n * sizeof(unsigned char))
    cdef DeathRec* deaths = <DeathRec*> malloc(n * sizeof(DeathRec))
    cdef double* obs0 = <double*> malloc(n * sizeof(double))
    cdef double* obs1 = <double*> malloc(n * sizeof(double))
    if obs == NULL or ev == NULL or deaths == NULL or obs0 == NULL or obs1 == NULL:
        if obs != NULL:
            free(obs)
        if ev != NULL:
            free(ev)
        if deaths != NULL:
            free(deaths)
        if obs0 != NULL:
            free(obs0)
        if obs1 != NULL:
            free(obs1)
        raise MemoryError("could not allocate milestone scratch buffers")
    with nogil:
        for m in range(n_miles):
            if reach_v[m] == 0:
                out_v[m, 0] = NAN_VAL
                out_v[m, 1] = INF_VAL
                out_v[m, 2] = NOT_REACHED
                continue
            c = c_v[m]
            for i in range(n):
                is_ev = 1 if (td_v[i] <= dr_v[i] and e_v[i] + td_v[i] <= c) else 0
                ev[i] = is_ev
                if is_ev:
                    obs[i] = td_v[i]
                else:
                    rest = dr_v[i]
                    ce = c - e_v[i]
                    if ce < rest:
                        rest = ce
                    if rest < 0.0:
                        rest = 0.0
                    obs[i] = rest
            _fit_censored(obs, ev, &arm_v[0], n, deaths, obs0, obs1, &out_v[m, 0])
    free(obs)
    free(ev)
    free(deaths)
    free(obs0)
    free(obs1)
    return out
