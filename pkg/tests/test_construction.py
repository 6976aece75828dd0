import math

import pytest

from siegelnum import (
    ConstructionConfig,
    get_family,
    golden_rotation,
    qa_distance,
    rho_coefficient,
    run_construction,
    siegel_series,
)
from siegelnum.construction import find_alpha_with_rho
from siegelnum.errors import (
    BracketFailureError,
    ConstructionStallError,
    PreconditionError,
)

QUAD = get_family("quadratic")
DELTA = 0.1


@pytest.fixture(scope="module")
def report():
    return run_construction(ConstructionConfig(delta=DELTA))


def test_schedule_is_the_linear_ramp(report):
    drops = [report.rho0 - t for t in report.schedule]
    assert drops == pytest.approx([0.75 * n / 4 for n in (1, 2, 3)], abs=1e-12)
    assert report.rho_infinity == pytest.approx(report.rho0 - 0.75, abs=1e-12)
    assert report.r_infinity == pytest.approx(math.exp(report.rho_infinity))


def test_each_step_hits_its_target(report):
    for step, target in zip(report.steps, report.schedule):
        assert step.target_rho == target
        assert abs(step.achieved_rho - target) <= 0.02


def test_achieved_values_strictly_decrease(report):
    values = [s.achieved_rho for s in report.steps]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_intervals_nest(report):
    alpha_prev, eps_prev = report.alpha0, 0.05
    for step in report.steps:
        assert abs(step.alpha - alpha_prev) + step.eps <= eps_prev + 1e-15
        alpha_prev, eps_prev = step.alpha, step.eps


def test_norm_deltas_within_halving_budgets(report):
    for n, step in enumerate(report.steps, start=1):
        budget = DELTA * 2.0 ** (-(n - 1))
        assert step.norm_budget == pytest.approx(budget)
        assert step.norm_delta <= budget


def test_flanks_stay_below_previous_level(report):
    for step in report.steps:
        assert step.flank_worst < step.flank_level


def test_radial_crosscheck_recorded(report):
    for step in report.steps:
        assert math.isnan(step.radial_value) or (
            step.radial_value >= step.achieved_rho - 0.1
        )


def test_final_radius_consistency(report):
    est = rho_coefficient(QUAD, report.final_alpha, 256)
    assert est.rho_hat < report.schedule[-1] + 0.02
    assert est.rho_hat >= report.rho_infinity - 0.02


def test_cauchy_in_norm_across_all_pairs(report):
    alphas = [report.alpha0] + [s.alpha for s in report.steps]
    series = [siegel_series(QUAD, a, 256).g for a in alphas]
    for i in range(len(series)):
        for j in range(i + 1, len(series)):
            d = qa_distance(series[i], series[j], report.r_infinity, order_cap=1)
            assert d.value <= 2.0 ** (-min(i, j) + 1) * DELTA


def test_delta_ball_certificate(report):
    assert report.total_distance <= 2 * DELTA


def test_boundary_derivative_nonvanishing(report):
    assert report.boundary.gprime_min > 0
    assert report.boundary.g_max < 1.0  # image stays inside the unit disc
    assert report.boundary.radius == pytest.approx(report.r_infinity)


def test_describe_is_json_shaped(report):
    d = report.describe()
    assert len(d["steps"]) == 3
    assert set(d["steps"][0]) >= {"alpha", "anchor", "target_rho", "achieved_rho"}


def test_impossible_norm_budget_stalls_with_partial_report():
    cfg = ConstructionConfig(delta=1e-9, retry_budget=2, depth=1)
    with pytest.raises(ConstructionStallError) as exc:
        run_construction(cfg)
    partial = exc.value.partial_report
    assert partial is not None
    assert partial.steps == ()
    assert "norm delta" in str(exc.value)


def test_bracket_failure_when_target_unreachable():
    with pytest.raises(BracketFailureError):
        find_alpha_with_rho(QUAD, -1.0, 0.5, golden_rotation().value, n=128)


def test_bisection_lands_on_target():
    alpha, est = find_alpha_with_rho(
        QUAD, -1.6, 21 / 34, golden_rotation().value, tol_rho=0.05, n=128
    )
    assert 21 / 34 < alpha < golden_rotation().value
    assert abs(est.rho_hat - (-1.6)) <= 0.05


def test_rho_infinity_override():
    rep = run_construction(ConstructionConfig(depth=1, rho_infinity=-1.52))
    assert rep.rho_infinity == pytest.approx(-1.52)
    assert rep.schedule[0] == pytest.approx((rep.rho0 - 1.52) / 2)


def test_config_validation():
    with pytest.raises(PreconditionError):
        ConstructionConfig(depth=0)
    with pytest.raises(PreconditionError):
        ConstructionConfig(delta=-1.0)
    with pytest.raises(PreconditionError):
        ConstructionConfig(depth=2, schedule=(-1.3,))
    with pytest.raises(PreconditionError):
        ConstructionConfig(depth=2, schedule=(-1.4, -1.3))
    with pytest.raises(PreconditionError):
        ConstructionConfig(rho_estimator="psychic")
