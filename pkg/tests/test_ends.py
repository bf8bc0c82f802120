import pytest

from qirigid.cayley import build_ball
from qirigid.ends import EndSign, end_action, end_homomorphism_check, kernel_member, no_flip_check
from qirigid.errors import Inconclusive, PreconditionViolated
from qirigid.groups import make_model
from qirigid.qi import QiMap, verify_qi
from qirigid.quasi_action import QuasiActionCtx

from conftest import LINE_LIKE, context

P, F = EndSign.PRESERVES, EndSign.FLIPS


def wide(text):
    return context(text, 400.0, 12)


def test_sign_group_table():
    assert P * P is P and F * F is P and P * F is F and F * P is F


def test_examples():
    z = wide("int_gens:1")
    assert end_action(z, (1,)) is P
    assert end_action(z, (0,)) is P
    d = wide("dihedral_inf")
    assert end_action(d, (0, 1)) is F
    assert kernel_member(d, (1, 0)) and not kernel_member(d, (0, 1))
    assert kernel_member(z, (5,)) and kernel_member(d, (0, 0))


def test_dihedral_signs_follow_reflection_bit():
    d = wide("dihedral_inf")
    report = end_homomorphism_check(d, 2)
    for g, sign in report.signs.items():
        assert sign is (F if g[1] else P)
    assert report.passed and report.index == 2


@pytest.mark.parametrize("text, index", list(zip(LINE_LIKE, [1, 1, 2, 1])))
def test_homomorphism_on_b3(text, index):
    report = end_homomorphism_check(wide(text), 3)
    assert report.passed
    assert report.index == index
    assert report.kernel[0] == make_model(text).identity()
    if index == 1:
        assert len(report.kernel) == len(build_ball(make_model(text), 3))


@pytest.mark.parametrize("text", LINE_LIKE)
def test_inverse_has_same_sign(text):
    ctx = wide(text)
    for g in build_ball(ctx.model, 3).order:
        assert end_action(ctx, g) is end_action(ctx, ctx.model.inverse(g))


def test_product_factor_preserves():
    report = end_homomorphism_check(wide("product_int_cyclic:2"), 2)
    assert set(report.signs.values()) == {P}


def test_no_flip():
    z = wide("int_gens:1")
    n = z.n_threshold + 1
    assert no_flip_check(z, (3,), 0.0, n)
    with pytest.raises(PreconditionViolated):
        no_flip_check(z, (3,), 0.0, z.n_threshold)
    d = wide("dihedral_inf")
    assert no_flip_check(d, (2, 0), -10.0, d.n_threshold + 1)


def test_inconclusive_when_constants_fail():
    """A map that is not a quasi-isometry cannot give a clean probe."""
    model = make_model("int_gens:1")
    evens = QiMap(lambda a: a[0] if a[0] % 2 == 0 else 0, 1, 0, "evens")
    assert not verify_qi(build_ball(model, 6), evens).verified
    ctx = QuasiActionCtx(model, build_ball(model, 300), evens, 1.0, 1.0, x_max=100, w_max=4)
    with pytest.raises(Inconclusive):
        end_action(ctx, (1,))
