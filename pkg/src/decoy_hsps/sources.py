"""Photon-number statistics of the triggered heralded source and of the
Poissonian coherent source used for comparison.

A heralded single photon source (HSPS) emits photon pairs; detecting one
mode ("trigger") post-selects the other. Conditioned on a trigger, the
heralded mode follows a thermal photon-number distribution reshaped by the
trigger detector's efficiency and dark counts. All infinite sums over the
thermal weights are geometric, so every quantity here has both a closed
form (production path) and a certified truncated series (test oracle).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

# Truncation policy for series oracles: stop once the analytic geometric
# tail bound drops below SERIES_TAIL_TOL, never summing more than
# SERIES_MAX_TERMS terms.
SERIES_TAIL_TOL = 1e-15
SERIES_MAX_TERMS = 500


@dataclass(frozen=True)
class HeraldedSourceParams:
    """Trigger-side parameters of a heralded single photon source.

    x: mean photon number of one mode before triggering.
    eta_a: trigger-detector efficiency, in [0, 1].
    d_a: trigger dark-count rate per pulse, in [0, 1).
    """

    x: float
    eta_a: float
    d_a: float

    def __post_init__(self):
        if self.x < 0:
            raise ValueError(f"mean photon number x must be >= 0, got {self.x}")
        if not 0.0 <= self.eta_a <= 1.0:
            raise ValueError(f"eta_a must be in [0, 1], got {self.eta_a}")
        if not 0.0 <= self.d_a < 1.0:
            raise ValueError(f"d_a must be in [0, 1), got {self.d_a}")


@dataclass(frozen=True)
class CoherentSourceParams:
    """Weak coherent pulse with Poissonian statistics of mean `mu`."""

    mu: float

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError(f"mean photon number mu must be >= 0, got {self.mu}")


def thermal_weight(n: int, x: float) -> float:
    """Unnormalized thermal weight x^n / (1+x)^(n+1) for n >= 1 photons.

    Evaluated in ratio form (x/(1+x))^n / (1+x) so large n cannot overflow.
    """
    if n < 1:
        raise ValueError(f"photon number n must be >= 1, got {n}")
    if x < 0:
        raise ValueError(f"intensity x must be >= 0, got {x}")
    if x == 0:
        return 0.0
    r = x / (1.0 + x)
    return r**n / (1.0 + x)


def thermal_geometric_sum(x: float, q: float) -> float:
    """Closed form of sum_{n>=1} thermal_weight(n, x) * q^n.

    Equals q*x / ((1+x) * (1+x - q*x)) for q in [0, 1]; this identity is
    the workhorse behind every closed-form yield and error-rate expression.
    """
    if x < 0:
        raise ValueError(f"intensity x must be >= 0, got {x}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"attenuation factor q must be in [0, 1], got {q}")
    return q * x / ((1.0 + x) * (1.0 + x - q * x))


def thermal_geometric_series(
    x: float,
    q: float,
    tol: float = SERIES_TAIL_TOL,
    max_terms: int = SERIES_MAX_TERMS,
) -> float:
    """Truncated-series evaluation of sum_{n>=1} thermal_weight(n, x) * q^n.

    Terms form a geometric sequence with ratio q*x/(1+x) < 1, so the exact
    remaining tail after each partial sum is known analytically; summation
    stops once that tail drops below `tol` (or at `max_terms`). Serves as
    the independent oracle for thermal_geometric_sum.
    """
    if x < 0:
        raise ValueError(f"intensity x must be >= 0, got {x}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"attenuation factor q must be in [0, 1], got {q}")
    r = q * x / (1.0 + x)
    if r == 0.0:
        return 0.0
    term = r / (1.0 + x)
    total = 0.0
    for _ in range(max_terms):
        total += term
        tail = term * r / (1.0 - r)
        if tail < tol:
            break
        term *= r
    return total


def at_least_one_probability(p: float, n: int) -> float:
    """Probability 1 - (1-p)^n that at least one of n tries succeeds.

    Uses expm1/log1p so tiny p keeps full relative precision and p = 0
    gives exactly 0.
    """
    if n < 0:
        raise ValueError(f"count n must be >= 0, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability p must be in [0, 1], got {p}")
    if p == 1.0:
        return 1.0 if n > 0 else 0.0
    return -math.expm1(n * math.log1p(-p))


def post_selection_probability(src: HeraldedSourceParams) -> float:
    """Probability that the trigger detector fires for a pulse of intensity x."""
    x = src.x
    return src.d_a / (1.0 + x) + x * src.eta_a / (1.0 + x * src.eta_a)


def triggered_distribution(n: int, src: HeraldedSourceParams) -> float:
    """Photon-number distribution of the heralded mode, conditioned on a trigger.

    n = 0 carries the dark-count-triggered vacuum mass; n >= 1 carries the
    thermal weight scaled by the trigger detector's chance of seeing at
    least one of the n partner photons.
    """
    if n < 0:
        raise ValueError(f"photon number n must be >= 0, got {n}")
    p_post = post_selection_probability(src)
    if p_post == 0.0:
        raise ValueError(
            "triggered distribution undefined: post-selection probability is zero "
            f"(x*eta_a = {src.x * src.eta_a}, d_a = {src.d_a})"
        )
    if n == 0:
        return src.d_a / ((1.0 + src.x) * p_post)
    return at_least_one_probability(src.eta_a, n) * thermal_weight(n, src.x) / p_post


def poisson_weight(n: int, mu: float) -> float:
    """Poisson probability of n photons at mean mu, e^(-mu) mu^n / n!."""
    if n < 0:
        raise ValueError(f"photon number n must be >= 0, got {n}")
    if mu < 0:
        raise ValueError(f"intensity mu must be >= 0, got {mu}")
    if mu == 0.0:
        return 1.0 if n == 0 else 0.0
    if n == 0:
        return math.exp(-mu)
    return math.exp(n * math.log(mu) - mu - math.lgamma(n + 1))
