"""Numerical primitives shared by the guideline and simulation layers.

Everything here is a pure function of its arguments.  The scalar domain
types are validating ``float`` subclasses, so they participate in ordinary
arithmetic once constructed.
"""

from __future__ import annotations

import math

from scipy.special import ndtr, ndtri


class Probability(float):
    """A probability strictly inside the open unit interval."""

    def __new__(cls, value) -> "Probability":
        v = float(value)
        if not math.isfinite(v) or not 0.0 < v < 1.0:
            raise ValueError(f"probability must lie strictly in (0, 1), got {value!r}")
        return super().__new__(cls, v)

    def __repr__(self) -> str:
        return f"Probability({float(self)!r})"


class HazardRatio(float):
    """A test/control relative risk of death; strictly positive and finite."""

    def __new__(cls, value) -> "HazardRatio":
        v = float(value)
        if not math.isfinite(v) or v <= 0.0:
            raise ValueError(f"hazard ratio must be a positive finite number, got {value!r}")
        return super().__new__(cls, v)

    def __repr__(self) -> str:
        return f"HazardRatio({float(self)!r})"


class InformationLevel(float):
    """Inverse asymptotic variance of a log-HR estimator; strictly positive."""

    def __new__(cls, value) -> "InformationLevel":
        v = float(value)
        if not math.isfinite(v) or v <= 0.0:
            raise ValueError(f"information level must be positive, got {value!r}")
        return super().__new__(cls, v)

    def __repr__(self) -> str:
        return f"InformationLevel({float(self)!r})"


def std_normal_cdf(z: float) -> float:
    """Standard normal CDF, accurate to well below 1e-10 absolute error."""
    z = float(z)
    if not math.isfinite(z):
        raise ValueError(f"argument must be finite, got {z!r}")
    return float(ndtr(z))


def std_normal_quantile(p: float) -> float:
    """Inverse of :func:`std_normal_cdf` on the open unit interval."""
    p = float(p)
    if not (0.0 < p < 1.0):
        raise ValueError(f"quantile argument must lie strictly in (0, 1), got {p!r}")
    return float(ndtri(p))


def fisher_information(k: float, deaths: int) -> InformationLevel:
    """Information carried by ``deaths`` pooled deaths under k:1 allocation.

    Equals k*deaths/(k+1)^2, which is invariant under k -> 1/k.
    """
    k = float(k)
    if not math.isfinite(k) or k <= 0.0:
        raise ValueError(f"allocation ratio must be positive, got {k!r}")
    deaths = int(deaths)
    if deaths < 1:
        raise ValueError(f"death count must be at least 1, got {deaths}")
    return InformationLevel(k * deaths / (k + 1.0) ** 2)


def required_deaths(
    delta_null: float,
    delta_alt: float,
    alpha: float,
    power: float,
    k: float = 1.0,
) -> int:
    """Smallest death count ruling out ``delta_null`` at one-sided level
    ``alpha`` with the given power when the true HR is ``delta_alt``.

    Returns the ceiling of the real-valued solution of
    ((k+1)^2/k) * ((z_{1-alpha} + z_{power}) / log(delta_null/delta_alt))^2.
    """
    delta_null = HazardRatio(delta_null)
    delta_alt = HazardRatio(delta_alt)
    alpha = Probability(alpha)
    power = Probability(power)
    if delta_alt >= delta_null:
        raise ValueError(
            f"delta_alt must be below delta_null, got {delta_alt} >= {delta_null}"
        )
    if alpha >= 0.5:
        raise ValueError(f"alpha must be below 0.5, got {alpha}")
    if power <= 0.5:
        raise ValueError(f"power must exceed 0.5, got {power}")
    k = float(k)
    if not math.isfinite(k) or k <= 0.0:
        raise ValueError(f"allocation ratio must be positive, got {k!r}")
    z_sum = std_normal_quantile(1.0 - alpha) + std_normal_quantile(power)
    log_ratio = math.log(delta_null / delta_alt)
    exact = ((k + 1.0) ** 2 / k) * (z_sum / log_ratio) ** 2
    return int(math.ceil(exact - 1e-12))
