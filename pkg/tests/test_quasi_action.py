import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qirigid.cayley import build_ball
from qirigid.errors import BallTooSmall, OutOfRange, PreconditionViolated
from qirigid.groups import make_model
from qirigid.qi import builtin_qi, verify_qi
from qirigid.quasi_action import (
    QuasiActionCtx,
    build_context,
    check_four_properties,
    derived_constants,
    pass_close_check,
    point_grid,
    star,
    translation_threshold,
)

from conftest import LINE_LIKE, context


@pytest.mark.parametrize(
    "args, expected",
    [((1, 0, 0), (1, 1, 2)), ((2, 1, 5), (7, 34, 60)), ((3, 4, 0), (25, 273, 306))],
)
def test_derived_constants(args, expected):
    c = derived_constants(*args)
    assert (c.l, c.n_threshold, c.lg) == expected


def test_derived_constants_reject_bad_input():
    with pytest.raises(PreconditionViolated):
        derived_constants(0.5, 0, 0)
    with pytest.raises(PreconditionViolated):
        derived_constants(1, -1, 0)


def test_translation_threshold_integers():
    # lambda = epsilon = 1: n = 6, threshold 1 + (1 + 1 + 2 + 6) = 11
    assert translation_threshold(1, 1, 6) == 11


def test_star_examples():
    z = context("int_gens:1")
    assert star(z, (1,), 0.0) == 1.0
    assert star(z, (0,), 7.3) == 7.0
    d = context("dihedral_inf")
    s = (0, 1)
    assert star(d, s, 5.0) == -5.0
    # oracle: s r^5 computed by the model
    assert d.qi(d.model.multiply(s, d.model.power((1, 0), 5))) == -5.0


def test_star_errors():
    z = context("int_gens:1")
    with pytest.raises(OutOfRange):
        star(z, (1,), z.x_max + 1)
    with pytest.raises(BallTooSmall):
        star(z, (z.ball.radius + 1,), 0.0)


def test_context_rejects_small_ball():
    model = make_model("int_gens:1")
    qi = builtin_qi(model)
    with pytest.raises(BallTooSmall):
        QuasiActionCtx(model, build_ball(model, 10), qi, 1, 1, x_max=20, w_max=2)
    cyc = make_model("cyclic:5")
    report = verify_qi(build_ball(cyc, 6), builtin_qi(cyc))
    with pytest.raises(BallTooSmall):
        build_context(cyc, builtin_qi(cyc), report, 5, 1)


@pytest.mark.parametrize("text", LINE_LIKE)
def test_four_properties_hold(text):
    ctx = context(text)
    report = check_four_properties(ctx, build_ball(ctx.model, 3).order, point_grid(20, 0.5))
    assert report.passed, report.violations[:3]
    assert all(v >= 0 for v in report.worst_slack.values())
    assert set(report.worst_slack) == {"1", "2", "3_lower", "3_upper", "4"}


def test_identity_worst_case_half():
    ctx = context("int_gens:1")
    report = check_four_properties(ctx, [(0,)], point_grid(20, 0.5))
    assert ctx.eps - report.worst_slack["2"] == 0.5


def test_violation_reported_with_wrong_constants():
    model = make_model("int_gens:2,3")
    qi = builtin_qi(model)
    ctx = QuasiActionCtx(model, build_ball(model, 60), qi, 1.0, 0.0, x_max=40, w_max=6)
    report = check_four_properties(ctx, build_ball(model, 1).order, point_grid(5, 0.5))
    assert not report.passed
    assert {v[0] for v in report.violations} >= {"2"}
    assert '"passed": false' in report.to_json(model.encode)


@pytest.mark.parametrize("text", LINE_LIKE)
def test_pass_close(text):
    ctx = context(text)
    for g in build_ball(ctx.model, 2).order:
        for a, b in [(-10.0, 10.0), (0.0, 3.0), (-7.5, -2.0)]:
            assert pass_close_check(ctx, g, a, b) <= ctx.l


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(LINE_LIKE), st.integers(0, 18), st.floats(-20, 20), st.floats(-20, 20))
def test_property_three_both_sides(text, gi, x, y):
    ctx = context(text)
    g = build_ball(ctx.model, 3).order[gi % len(build_ball(ctx.model, 3))]
    lam, eps = ctx.lam, ctx.eps
    d = abs(star(ctx, g, x) - star(ctx, g, y))
    assert abs(x - y) / lam**2 - eps / lam - eps <= d <= lam**2 * abs(x - y) + lam * eps + eps


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(LINE_LIKE), st.floats(-50, 50))
def test_identity_moves_points_boundedly(text, x):
    ctx = context(text)
    assert abs(star(ctx, ctx.model.identity(), x) - x) <= max(ctx.eps, ctx.density_k)


def test_constants_dict():
    ctx = context("dihedral_inf")
    c = ctx.constants_dict()
    assert c["l"] == ctx.lam**2 + ctx.lam * ctx.eps + ctx.eps
    assert c["n"] == c["n_threshold"] + 1
    assert math.isclose(ctx.lg_of((3, 0)), ctx.lam**2 * (ctx.lam**2 + ctx.lam * ctx.eps + 3 * ctx.eps + 3 + 1))
