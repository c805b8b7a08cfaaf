"""Per-distance signal-intensity optimization and distance sweeps.

The key rate at a fixed distance is a smooth, empirically unimodal
function of the signal intensity mu', so the optimizer scans a coarse
grid and then refines the best cell with a golden-section search. Every
evaluation is a pure function of the inputs; identical configurations
produce identical results bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .bounds import (
    KeyRatePoint,
    SecurityBounds,
    _rate_formula,
    compute_hsps_bounds,
    compute_wcs_bounds,
    ideal_rate_hsps,
    ideal_rate_wcs,
)
from .channel import ChannelParams
from .observables import (
    ObservedStatistics,
    forecast_observables,
    forecast_wcs_observables,
)

SOURCE_KINDS = ("hsps", "wcs")

# Two candidate rates closer than this are a tie; the smaller mu' wins.
RATE_TIE_TOL = 1e-15

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepConfig:
    """Everything a distance sweep needs, with materialized defaults.

    mu_prime_min/max bound the signal-intensity search; the coarse grid
    steps by mu_prime_coarse_step and the refinement resolves to 1e-4.
    sources selects which pipelines run; include_ideal adds the
    infinite-decoy benchmark to every point.
    """

    channel: ChannelParams = ChannelParams()
    mu: float = 0.05
    eta_a: float = 0.8
    d_a: float = 1e-5
    f_ec: float = 1.2
    mu_prime_min: float = 0.06
    mu_prime_max: float = 1.0
    mu_prime_coarse_step: float = 0.01
    dist_start_km: float = 0.0
    dist_stop_km: float = 180.0
    dist_step_km: float = 1.0
    sources: tuple[str, ...] = SOURCE_KINDS
    include_ideal: bool = True

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")
        if not 0.0 < self.eta_a <= 1.0:
            raise ValueError(f"eta_a must be in (0, 1], got {self.eta_a}")
        if not 0.0 <= self.d_a < 1.0:
            raise ValueError(f"d_a must be in [0, 1), got {self.d_a}")
        if self.f_ec < 1.0:
            raise ValueError(f"f_ec must be >= 1, got {self.f_ec}")
        if self.mu_prime_min <= self.mu:
            raise ValueError(
                f"mu_prime_min ({self.mu_prime_min}) must exceed mu ({self.mu})"
            )
        if self.mu_prime_max <= self.mu:
            raise ValueError(
                f"mu_prime_max ({self.mu_prime_max}) must exceed mu ({self.mu})"
            )
        if self.mu_prime_max < self.mu_prime_min:
            raise ValueError(
                f"mu_prime_max ({self.mu_prime_max}) must be >= mu_prime_min "
                f"({self.mu_prime_min})"
            )
        if self.mu_prime_coarse_step <= 0:
            raise ValueError(
                f"mu_prime_coarse_step must be > 0, got {self.mu_prime_coarse_step}"
            )
        if self.dist_step_km <= 0:
            raise ValueError(f"dist_step_km must be > 0, got {self.dist_step_km}")
        if self.dist_start_km < 0:
            raise ValueError(f"dist_start_km must be >= 0, got {self.dist_start_km}")
        if not self.sources:
            raise ValueError("at least one source kind must be selected")
        for kind in self.sources:
            if kind not in SOURCE_KINDS:
                raise ValueError(f"unknown source kind {kind!r}")


def distance_grid(cfg: SweepConfig) -> list[float]:
    """Grid distances start, start+step, ... up to and including stop."""
    if cfg.dist_stop_km < cfg.dist_start_km:
        return []
    span = cfg.dist_stop_km - cfg.dist_start_km
    count = int(math.floor(span / cfg.dist_step_km + 1e-9)) + 1
    return [cfg.dist_start_km + i * cfg.dist_step_km for i in range(count)]


def mu_prime_candidates(cfg: SweepConfig) -> list[float]:
    """Coarse search grid over [mu_prime_min, mu_prime_max]."""
    lo, hi, step = cfg.mu_prime_min, cfg.mu_prime_max, cfg.mu_prime_coarse_step
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    cands = [lo + i * step for i in range(count)]
    if cands[-1] < hi - 1e-12 * max(1.0, abs(hi)):
        cands.append(hi)
    return cands


def golden_section_maximize(fn, a: float, b: float, tol: float) -> tuple[float, float]:
    """Locate the maximum of a unimodal function on [a, b] to width tol."""
    if b < a:
        raise ValueError(f"invalid bracket [{a}, {b}]")
    if b - a <= tol:
        x = 0.5 * (a + b)
        return x, fn(x)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def maximize_over_mu_prime(rate_fn, cfg: SweepConfig, refine_tol: float = 1e-4) -> tuple[float, float]:
    """Coarse grid scan plus golden-section refinement of rate_fn(mu').

    Ties within RATE_TIE_TOL resolve to the smaller mu'; the returned rate
    is never below any coarse candidate that was examined.
    """
    cands = mu_prime_candidates(cfg)
    best_x = cands[0]
    best_f = rate_fn(best_x)
    for x in cands[1:]:
        fx = rate_fn(x)
        if fx > best_f + RATE_TIE_TOL:
            best_x, best_f = x, fx
    a = max(cfg.mu_prime_min, best_x - cfg.mu_prime_coarse_step)
    b = min(cfg.mu_prime_max, best_x + cfg.mu_prime_coarse_step)
    if b - a > refine_tol:
        xr, fr = golden_section_maximize(rate_fn, a, b, refine_tol)
        if fr > best_f + RATE_TIE_TOL:
            return xr, fr
        if abs(fr - best_f) <= RATE_TIE_TOL and xr < best_x:
            return xr, fr
    return best_x, best_f


def evaluate_hsps(
    cfg: SweepConfig, ch: ChannelParams, mu_prime: float
) -> tuple[ObservedStatistics, SecurityBounds, float, bool]:
    """Forecast, bound, and rate one triggered-source working point."""
    obs = forecast_observables(cfg.mu, mu_prime, cfg.eta_a, cfg.d_a, ch)
    bounds = compute_hsps_bounds(obs, cfg.mu, mu_prime, cfg.eta_a, cfg.d_a, e_0=ch.e_0)
    raw = _rate_formula(obs.ty_mu_prime, obs.e_mu_prime, bounds.delta1, bounds.e1_upper, cfg.f_ec)
    return obs, bounds, max(0.0, raw), bounds.feasible and raw >= 0.0


def evaluate_wcs(
    cfg: SweepConfig, ch: ChannelParams, mu_prime: float
) -> tuple[ObservedStatistics, SecurityBounds, float, bool]:
    """Forecast, bound, and rate one coherent-source working point."""
    obs = forecast_wcs_observables(cfg.mu, mu_prime, ch)
    bounds = compute_wcs_bounds(obs, cfg.mu, mu_prime, e_0=ch.e_0)
    raw = _rate_formula(obs.ty_mu_prime, obs.e_mu_prime, bounds.delta1, bounds.e1_upper, cfg.f_ec)
    return obs, bounds, max(0.0, raw), bounds.feasible and raw >= 0.0


def _rate_fn(cfg: SweepConfig, ch: ChannelParams, source_kind: str):
    if source_kind == "hsps":
        return lambda m: evaluate_hsps(cfg, ch, m)[2]
    if source_kind == "wcs":
        return lambda m: evaluate_wcs(cfg, ch, m)[2]
    raise ValueError(f"unknown source kind {source_kind!r}")


def _ideal_rate_fn(cfg: SweepConfig, ch: ChannelParams, source_kind: str):
    if source_kind == "hsps":
        return lambda m: ideal_rate_hsps(m, cfg.eta_a, cfg.d_a, ch, cfg.f_ec)
    if source_kind == "wcs":
        return lambda m: ideal_rate_wcs(m, ch, cfg.f_ec)
    raise ValueError(f"unknown source kind {source_kind!r}")


def optimize_mu_prime(
    cfg: SweepConfig, distance_km: float, source_kind: str = "hsps"
) -> tuple[float, float]:
    """Best signal intensity and rate at one distance.

    When no candidate achieves a positive rate the reported mu' is the
    smallest candidate with the rate pinned at 0.
    """
    ch = cfg.channel.at_distance(distance_km)
    return maximize_over_mu_prime(_rate_fn(cfg, ch, source_kind), cfg)


def optimal_ideal_rate(
    cfg: SweepConfig, distance_km: float, source_kind: str = "hsps"
) -> float:
    """Infinite-decoy benchmark rate, with its own mu' optimization."""
    ch = cfg.channel.at_distance(distance_km)
    return maximize_over_mu_prime(_ideal_rate_fn(cfg, ch, source_kind), cfg)[1]


def optimize_joint_intensities(
    cfg: SweepConfig,
    distance_km: float,
    mu_values,
    source_kind: str = "hsps",
) -> tuple[float, float, float]:
    """Exhaustive-grid joint optimization over (mu, mu') at one distance.

    The sweep itself keeps mu fixed; this optional mode scans the supplied
    decoy-intensity candidates, optimizing mu' for each, and returns the
    best (mu, mu', rate). Ties resolve to the smaller mu.
    """
    mu_values = list(mu_values)
    if not mu_values:
        raise ValueError("mu_values must contain at least one candidate")
    best = None
    for mu in sorted(mu_values):
        trial = replace(
            cfg,
            mu=mu,
            mu_prime_min=max(cfg.mu_prime_min, mu + cfg.mu_prime_coarse_step),
        )
        mu_prime, rate = optimize_mu_prime(trial, distance_km, source_kind)
        if best is None or rate > best[2] + RATE_TIE_TOL:
            best = (mu, mu_prime, rate)
    return best


def key_rate_point(cfg: SweepConfig, distance_km: float, source_kind: str) -> KeyRatePoint:
    """Fully evaluated sweep sample at one distance for one source kind."""
    ch = cfg.channel.at_distance(distance_km)
    mu_prime, _ = maximize_over_mu_prime(_rate_fn(cfg, ch, source_kind), cfg)
    if source_kind == "hsps":
        obs, bounds, rate, feasible = evaluate_hsps(cfg, ch, mu_prime)
    else:
        obs, bounds, rate, feasible = evaluate_wcs(cfg, ch, mu_prime)
    if cfg.include_ideal:
        ideal = maximize_over_mu_prime(_ideal_rate_fn(cfg, ch, source_kind), cfg)[1]
    else:
        ideal = float("nan")
    return KeyRatePoint(
        distance_km=distance_km,
        mu=cfg.mu,
        mu_prime=mu_prime,
        key_rate=rate,
        ideal_rate=ideal,
        source_kind=source_kind,
        bounds=bounds,
        observables=obs,
        feasible=feasible,
    )


def sweep_distances(cfg: SweepConfig) -> list[KeyRatePoint]:
    """One KeyRatePoint per grid distance per requested source kind."""
    points = []
    for distance in distance_grid(cfg):
        for kind in cfg.sources:
            points.append(key_rate_point(cfg, distance, kind))
    return points


def max_secure_distance(cfg: SweepConfig, source_kind: str = "hsps") -> float | None:
    """Largest distance with a positive optimized rate, or None.

    Scans the configured grid, then bisects between the last positive and
    first zero grid points down to 0.1 km. Returns the grid end when the
    rate is still positive there.
    """

    def rate_at(distance: float) -> float:
        return optimize_mu_prime(cfg, distance, source_kind)[1]

    last_positive = None
    first_zero_after = None
    for distance in distance_grid(cfg):
        if rate_at(distance) > 0.0:
            last_positive = distance
            first_zero_after = None
        elif last_positive is not None and first_zero_after is None:
            first_zero_after = distance
    if last_positive is None:
        return None
    if first_zero_after is None:
        return last_positive
    lo, hi = last_positive, first_zero_after
    while hi - lo > 0.1:
        mid = 0.5 * (lo + hi)
        if rate_at(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo
