"""Iterated rotation-number refinement driving the radius to a target.

The driver walks a decreasing schedule of radius targets

    rho_n = rho_infinity + G * (D + 1 - n) / (D + 1),   n = 1 .. D,

with rho_infinity = rho_hat(alpha_0) - G, and at each step replaces the
rotation number by a nearby one whose estimated radius sits on the
schedule, certifying three things per step: the new value's flanks stay
strictly below the previous level (one-sided continuity has teeth only on
an interval), consecutive Siegel series stay close in the derivative norm
at the limiting radius (budget delta * 2^-n), and the intervals nest.

Candidates live on a rational anchor's dip: for p/q close to alpha_n the
estimated radius falls off linearly in log distance, with slope 1/q per
log unit (measured 0.0694 per decade at q = 34, i.e. ln 10 / q).  The
step candidate is found by bisecting between the anchor (whose estimate
diverges — the small-divisor guard trips exactly there) and alpha_n.
Anchor choice trades three pressures: the dip must stay resolvable in
binary64 (q * total_dip <= ~30, or the offset from p/q underflows), the
resonant spike index q+1 must sit low enough for the coefficient window
to see it, and the flank bump at twice the offset (ln 2 / q) must stay
inside the step gap.  A single anchor that is feasible for the *whole*
schedule is preferred, because every alpha_n then keeps p/q among its
convergents and the intervals nest around the common anchor for free.
At the defaults (G = 0.75, q = 34 for the golden mean) the ladder is
feasible to depth ~5; beyond that the final offsets sink under float
resolution and the run stalls honestly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BracketFailureError,
    ConstructionStallError,
    NumericalError,
    PreconditionError,
    UnreliableRadiusError,
)
from .families import FamilySpec, get_family
from .linearize import siegel_series
from .qanorm import qa_distance, qa_norm
from .radius import (
    RadiusEstimate,
    RotationNumber,
    cf_convergents,
    cf_expand,
    golden_rotation,
    rho_coefficient,
    rho_radial,
)
from .series import derivative, evaluate

__all__ = [
    "ConstructionConfig",
    "StepReport",
    "ConstructionReport",
    "BoundaryReport",
    "find_alpha_with_rho",
    "run_construction",
    "boundary_report",
]

MIN_ANCHOR_Q = 5
MIN_OFFSET_EPS = 200.0  # offsets below this many float-gaps are unresolvable
CROSSCHECK_SLACK = 0.1  # tolerance for the one-sided radial cross-check


@dataclass(frozen=True)
class ConstructionConfig:
    family: str = "quadratic"
    alpha0: RotationNumber = field(default_factory=golden_rotation)
    depth: int = 3
    delta: float = 0.1
    eps0: float = 0.05
    total_drop: float = 0.75
    rho_infinity: float | None = None  # overrides total_drop when set
    schedule: tuple | None = None  # explicit targets; overrides the linear ramp
    tol_rho: float = 0.02
    n_series: int = 256
    norm_order: int = 1
    circle_samples: int = 512
    retry_budget: int = 8
    flank_samples: int = 16
    rho_estimator: str = "coefficient"

    def __post_init__(self):
        if self.depth < 1:
            raise PreconditionError("depth must be at least 1")
        if not (self.delta > 0 and self.eps0 > 0 and self.tol_rho > 0):
            raise PreconditionError("delta, eps0 and tol_rho must be positive")
        if self.total_drop <= 0:
            raise PreconditionError("total_drop must be positive")
        if self.n_series < 64:
            raise PreconditionError("construction needs series degree >= 64")
        if self.rho_estimator not in ("coefficient", "radial"):
            raise PreconditionError("rho_estimator must be 'coefficient' or 'radial'")
        if not 0 <= self.norm_order <= self.n_series:
            raise PreconditionError("norm_order out of range")
        if self.schedule is not None:
            vals = tuple(float(v) for v in self.schedule)
            if len(vals) != self.depth:
                raise PreconditionError("schedule length must equal depth")
            if any(b >= a for a, b in zip(vals, vals[1:])):
                raise PreconditionError("schedule must be strictly decreasing")
            object.__setattr__(self, "schedule", vals)


@dataclass(frozen=True)
class StepReport:
    n: int
    alpha: float
    anchor_p: int
    anchor_q: int
    offset: float
    target_rho: float
    achieved_rho: float
    eps: float
    norm_delta: float
    norm_budget: float
    flank_worst: float
    flank_level: float
    radial_value: float
    retries: int

    def describe(self) -> dict:
        return {
            "n": self.n, "alpha": self.alpha,
            "anchor": f"{self.anchor_p}/{self.anchor_q}", "offset": self.offset,
            "target_rho": self.target_rho, "achieved_rho": self.achieved_rho,
            "eps": self.eps, "norm_delta": self.norm_delta,
            "norm_budget": self.norm_budget, "flank_worst": self.flank_worst,
            "flank_level": self.flank_level, "radial_value": self.radial_value,
            "retries": self.retries,
        }


@dataclass(frozen=True)
class BoundaryReport:
    radius: float
    g_min: float
    g_max: float
    gprime_min: float
    gprime_max: float
    norm_value: float
    samples: int

    def describe(self) -> dict:
        return {
            "radius": self.radius, "g_min": self.g_min, "g_max": self.g_max,
            "gprime_min": self.gprime_min, "gprime_max": self.gprime_max,
            "norm_value": self.norm_value, "samples": self.samples,
        }


@dataclass(frozen=True)
class ConstructionReport:
    family: str
    alpha0: float
    rho0: float
    rho_infinity: float
    r_infinity: float
    schedule: tuple
    steps: tuple
    final_alpha: float
    total_distance: float
    boundary: BoundaryReport
    wall_time: float

    def describe(self) -> dict:
        return {
            "family": self.family, "alpha0": self.alpha0, "rho0": self.rho0,
            "rho_infinity": self.rho_infinity, "r_infinity": self.r_infinity,
            "schedule": list(self.schedule),
            "steps": [s.describe() for s in self.steps],
            "final_alpha": self.final_alpha,
            "total_distance": self.total_distance,
            "boundary": self.boundary.describe(),
            "wall_time": self.wall_time,
        }


def _estimate(
    family: FamilySpec, alpha: float, n: int, estimator: str
) -> RadiusEstimate:
    if estimator == "radial":
        return rho_radial(family, alpha, depth=12, n=min(n, 128))
    return rho_coefficient(family, alpha, n)


def find_alpha_with_rho(
    family: FamilySpec,
    target_rho: float,
    bracket_lo: float,
    bracket_hi: float,
    tol_rho: float = 0.02,
    n: int = 256,
    estimator: str = "coefficient",
    max_iter: int = 80,
) -> tuple[float, RadiusEstimate]:
    """Bisect [bracket_lo, bracket_hi] for alpha with rho_hat ~ target_rho.

    The lo end must estimate below the target and the hi end above it; a
    rational lo whose estimate breaks down on a small divisor counts as
    -infinity, which is the standard way to seed the bracket.  Bisection
    needs only the intermediate-value property, which the estimate has by
    continuity away from breakdown points; the landscape is not monotone
    (other rationals dent it), so the returned alpha is *a* crossing, not
    the closest one to either end.
    """
    if not bracket_lo < bracket_hi:
        raise PreconditionError("bracket must satisfy lo < hi")

    def eff(alpha: float) -> float:
        try:
            return _estimate(family, alpha, n, estimator).effective_rho
        except NumericalError:
            # breakdown, coefficient overflow, unusable sample run: all of
            # these happen exactly where the dip is effectively bottomless
            return -math.inf

    lo_val = eff(bracket_lo)
    hi_val = eff(bracket_hi)
    if not lo_val < target_rho:
        raise BracketFailureError(
            f"lo bracket estimates {lo_val:.4f}, not below target {target_rho:.4f}"
        )
    if not hi_val > target_rho:
        raise BracketFailureError(
            f"hi bracket estimates {hi_val:.4f}, not above target {target_rho:.4f}"
        )
    lo, hi = bracket_lo, bracket_hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            raise BracketFailureError("bracket exhausted float resolution")
        val = eff(mid)
        if abs(val - target_rho) <= tol_rho and math.isfinite(val):
            return mid, _estimate(family, mid, n, estimator)
        if val < target_rho:
            lo = mid
        else:
            hi = mid
    raise BracketFailureError(f"no crossing within {max_iter} bisection steps")


def _schedule(rho0: float, cfg: ConstructionConfig) -> list[float]:
    if cfg.schedule is not None:
        return list(cfg.schedule)
    d = cfg.depth
    drop = cfg.total_drop
    if cfg.rho_infinity is not None:
        drop = rho0 - cfg.rho_infinity
    return [rho0 - drop * n / (d + 1) for n in range(1, d + 1)]


def _anchor_ladder(alpha: float, cfg: ConstructionConfig) -> list[tuple[int, int]]:
    """Rational anchors (p, q) for dip candidates near alpha, best first.

    Preference goes to the largest denominator whose dip stays float-
    resolvable through the *final* schedule target; anchors feasible only
    for earlier steps follow, as retries.  The spike index must also stay
    visible to the coefficient window, and tiny denominators are dropped
    because their flank bump ln2/q would swallow the schedule gap.
    """
    final_dip = cfg.total_drop * cfg.depth / (cfg.depth + 1)
    eps_floor = MIN_OFFSET_EPS * math.ulp(alpha)
    whole, partial = [], []
    seen = set()
    for p, q in cf_convergents(cf_expand(alpha, 24)):
        if q in seen:
            continue
        seen.add(q)
        if not (MIN_ANCHOR_Q <= q <= cfg.n_series // 3 - 1):
            continue
        if abs(alpha - p / q) <= eps_floor:
            continue  # alpha sits numerically on this rational already
        s_final = math.exp(-q * final_dip) / (math.sqrt(5.0) * q * q)
        (whole if s_final >= eps_floor else partial).append((p, q))
    whole.sort(key=lambda pq: -pq[1])
    partial.sort(key=lambda pq: -pq[1])
    return whole + partial


def run_construction(cfg: ConstructionConfig) -> ConstructionReport:
    """Run the full schedule; raise ConstructionStallError (with the partial
    report attached) if some step exhausts its retry budget."""
    t_start = time.time()
    family = get_family(cfg.family)
    est0 = _estimate(family, cfg.alpha0.value, cfg.n_series, cfg.rho_estimator)
    if est0.diverging_to_minus_infinity or not est0.converged:
        raise PreconditionError(
            "base rotation number must have a converged, finite radius estimate"
        )
    rho0 = est0.rho_hat
    drop = cfg.total_drop
    if cfg.rho_infinity is not None:
        drop = rho0 - cfg.rho_infinity
        if drop <= 0:
            raise PreconditionError(
                f"rho_infinity {cfg.rho_infinity:.4f} is not below the base "
                f"estimate {rho0:.4f}"
            )
    rho_inf = rho0 - drop
    r_inf = math.exp(rho_inf)
    targets = _schedule(rho0, cfg)
    if any(not rho_inf < t < rho0 for t in targets):
        raise PreconditionError(
            "every schedule target must lie strictly between rho_infinity "
            f"({rho_inf:.4f}) and the base estimate ({rho0:.4f})"
        )

    alpha_n = cfg.alpha0.value
    eps_n = cfg.eps0
    levelrho_n = rho0
    g_n = siegel_series(family, alpha_n, cfg.n_series).g
    g_0 = g_n
    steps: list[StepReport] = []

    def stall(reason: str):
        partial = _final_report(
            cfg, family, rho0, rho_inf, r_inf, targets, steps,
            alpha_n, g_0, g_n, t_start,
        )
        raise ConstructionStallError(
            f"step {len(steps) + 1}: {reason}", partial_report=partial
        )

    for n, target in enumerate(targets, start=1):
        budget = cfg.delta * 2.0 ** (-(n - 1))
        retries = 0
        accepted = None
        reasons = []
        for p, q in _anchor_ladder(alpha_n, cfg):
            if retries >= cfg.retry_budget:
                break
            retries += 1
            anchor = p / q
            lo, hi = sorted((anchor, alpha_n))
            try:
                alpha_c, est_c = find_alpha_with_rho(
                    family, target, lo, hi, tol_rho=cfg.tol_rho,
                    n=cfg.n_series, estimator=cfg.rho_estimator,
                )
            except BracketFailureError as exc:
                reasons.append(f"{p}/{q}: {exc}")
                continue
            offset = abs(alpha_c - anchor)
            eps_c = offset
            # nesting
            if abs(alpha_c - alpha_n) + eps_c > eps_n:
                reasons.append(f"{p}/{q}: interval does not nest")
                continue
            # norm budget
            try:
                g_c = siegel_series(family, alpha_c, cfg.n_series).g
                delta_norm = qa_distance(
                    g_n, g_c, r_inf,
                    order_cap=cfg.norm_order, circle_samples=cfg.circle_samples,
                ).value
            except NumericalError as exc:
                reasons.append(f"{p}/{q}: {type(exc).__name__}: {exc}")
                continue
            if delta_norm > budget:
                reasons.append(f"{p}/{q}: norm delta {delta_norm:.3e} > {budget:.3e}")
                continue
            # flank scan, breakdowns count as -infinity
            worst = -math.inf
            for j in range(1, cfg.flank_samples + 1):
                for sgn in (1.0, -1.0):
                    beta = alpha_c + sgn * j * eps_c / cfg.flank_samples
                    if not 0.0 < beta < 1.0:
                        continue
                    try:
                        est_b = _estimate(family, beta, cfg.n_series, cfg.rho_estimator)
                        worst = max(worst, est_b.effective_rho)
                    except NumericalError:
                        continue  # effectively -infinity at this sample
            if not worst < levelrho_n:
                reasons.append(
                    f"{p}/{q}: flank reaches {worst:.4f}, not below {levelrho_n:.4f}"
                )
                continue
            # one-sided radial cross-check: the radial probe cannot resolve a
            # dip this narrow, so it must read at or above the coefficient
            # value; a reading *below* it would mean the two estimators
            # disagree about something the radial probe can actually see.
            radial_value = math.nan
            try:
                est_r = rho_radial(
                    family, alpha_c, depth=10, n=min(cfg.n_series, 128)
                )
                radial_value = est_r.effective_rho
            except NumericalError:
                pass
            if radial_value < est_c.rho_hat - CROSSCHECK_SLACK:
                reasons.append(
                    f"{p}/{q}: radial probe {radial_value:.4f} undercuts "
                    f"coefficient estimate {est_c.rho_hat:.4f}"
                )
                continue
            accepted = StepReport(
                n=n, alpha=alpha_c, anchor_p=p, anchor_q=q, offset=offset,
                target_rho=target, achieved_rho=est_c.rho_hat, eps=eps_c,
                norm_delta=delta_norm, norm_budget=budget,
                flank_worst=worst, flank_level=levelrho_n,
                radial_value=radial_value, retries=retries - 1,
            )
            alpha_n, eps_n, levelrho_n, g_n = alpha_c, eps_c, target, g_c
            break
        if accepted is None:
            stall("no anchor produced an acceptable candidate: " + "; ".join(reasons))
        steps.append(accepted)

    return _final_report(
        cfg, family, rho0, rho_inf, r_inf, targets, steps,
        alpha_n, g_0, g_n, t_start,
    )


def _final_report(cfg, family, rho0, rho_inf, r_inf, targets, steps,
                  alpha_n, g_0, g_n, t_start) -> ConstructionReport:
    try:
        total = qa_distance(g_0, g_n, r_inf, order_cap=cfg.norm_order,
                            circle_samples=cfg.circle_samples).value
    except UnreliableRadiusError:
        total = math.nan
    boundary = boundary_report(g_n, r_inf, circle_samples=cfg.circle_samples)
    return ConstructionReport(
        family=cfg.family,
        alpha0=cfg.alpha0.value,
        rho0=rho0,
        rho_infinity=rho_inf,
        r_infinity=r_inf,
        schedule=tuple(targets),
        steps=tuple(steps),
        final_alpha=alpha_n,
        total_distance=total,
        boundary=boundary,
        wall_time=time.time() - t_start,
    )


def boundary_report(g, radius: float, circle_samples: int = 512) -> BoundaryReport:
    """Geometry of the disc image at |w| = radius: range of |g| and |g'|
    over the circle, plus the derivative norm there.  gprime_min > 0 is the
    working injectivity indicator (g is normalized, g'(0) = 1)."""
    ws = radius * np.exp(2j * np.pi * np.arange(circle_samples) / circle_samples)
    gp = derivative(g, 1)
    gv = np.array([evaluate(g, w).value for w in ws])
    gpv = np.array([evaluate(gp, w).value for w in ws])
    try:
        norm_val = qa_norm(g, radius, order_cap=1, circle_samples=circle_samples).value
    except UnreliableRadiusError:
        norm_val = math.nan
    return BoundaryReport(
        radius=radius,
        g_min=float(np.min(np.abs(gv))),
        g_max=float(np.max(np.abs(gv))),
        gprime_min=float(np.min(np.abs(gpv))),
        gprime_max=float(np.max(np.abs(gpv))),
        norm_value=norm_val,
        samples=circle_samples,
    )
