import json
import math

import pytest

from qirigid.cayley import build_ball
from qirigid.errors import BallTooSmall, Indeterminate, PreconditionViolated
from qirigid.groups import make_model
from qirigid.qi import builtin_qi, verify_qi
from qirigid.quasi_action import star, translation_threshold
from qirigid.rigidity import (
    INCONCLUSIVE,
    VIRTUALLY_Z,
    CertifyParams,
    brute_force_coset_count,
    certificate_from_json,
    certify_context,
    certify_virtually_z,
    coset_count,
    find_translation_element,
    infinite_order_check,
    orbit_csv,
    orbit_report,
    orbit_svg,
    quasi_density_constant,
    recheck_certificate,
)

from conftest import LINE_LIKE, certificate, context


def pipeline_context(text):
    model = make_model(text)
    qi = builtin_qi(model)
    return certify_context(model, qi, verify_qi(build_ball(model, 12), qi), CertifyParams())


def test_translation_element_integers():
    ctx = pipeline_context("int_gens:1")
    threshold = translation_threshold(ctx.lam, ctx.eps, ctx.n)
    assert threshold == 11
    assert find_translation_element(ctx) == (math.floor(threshold) + 1,)


def test_translation_element_dihedral():
    ctx = pipeline_context("dihedral_inf")
    threshold = translation_threshold(ctx.lam, ctx.eps, ctx.n)
    g = find_translation_element(ctx)
    # scan oracle: least m over the threshold, reflections excluded
    assert g == (math.floor(threshold) + 1, 0)


def test_finite_group_has_no_translation():
    cert = certify_virtually_z("cyclic:5")
    assert cert.verdict == INCONCLUSIVE and cert.failed_check == "quasi_action_context"
    ball = build_ball(make_model("cyclic:5"), 9)
    assert max(ball.dist.values()) == 2


def test_orbit_integers():
    ctx = context("int_gens:1")
    report = orbit_report(ctx, (7,), 5)
    assert report.positions == [7.0 * z for z in range(-5, 6)]
    assert report.min_gap == report.max_gap == 7 and report.monotone
    assert orbit_csv(report.positions, 5).splitlines()[:2] == ["z,position", "-5,-35.0"]


def test_orbit_dihedral_rotation():
    report = orbit_report(context("dihedral_inf"), (3, 0), 5)
    assert report.positions == [3.0 * z for z in range(-5, 6)] and report.monotone


def test_orbit_by_iteration_and_bookkeeping():
    """position(z+1) = g * position(z), and g^(z+1) * 0 stays within the accumulated error."""
    for text, g in [("int_gens:1", (5,)), ("dihedral_inf", (4, 0)), ("dihedral_inf", (2, 1)), ("int_gens:2,3", (7,))]:
        ctx = context(text, 200.0, 40)
        report = orbit_report(ctx, g, 4)
        for z in range(0, 4):
            assert report.position(z + 1) == star(ctx, g, report.position(z))
            gz = ctx.model.power(g, z + 1)
            err = abs(star(ctx, gz, 0.0) - report.position(z + 1))
            assert err <= (ctx.eps + ctx.lam * ctx.eps) * (abs(z) + 1)


def test_orbit_rejects_bad_zmax():
    with pytest.raises(PreconditionViolated):
        orbit_report(context("int_gens:1"), (1,), 0)


def test_infinite_order():
    assert infinite_order_check(context("int_gens:1"), (7,), 5)
    d = context("dihedral_inf", 400.0, 40)
    assert infinite_order_check(d, (36, 0), 5)
    assert not infinite_order_check(d, (7, 0), 5)  # below n = 35
    assert not infinite_order_check(context("int_gens:1"), (1,), 5)  # moves less than n per step
    cyc = build_ball(make_model("cyclic:5"), 6)
    assert not infinite_order_check(cyc, (1,), 5)
    assert infinite_order_check(build_ball(make_model("int_gens:1"), 4), (1,), 8)


def test_quasi_density_examples():
    z = build_ball(make_model("int_gens:1"), 80)
    assert quasi_density_constant(z, (7,), 8)[0] == 3
    assert quasi_density_constant(build_ball(make_model("int_gens:1"), 16), (1,), 8)[0] == 0
    with pytest.raises(PreconditionViolated):
        quasi_density_constant(z, (1,), 8)
    d = build_ball(make_model("dihedral_inf"), 14)
    assert quasi_density_constant(d, (1, 0), 8)[0] == 1
    with pytest.raises(BallTooSmall):
        quasi_density_constant(build_ball(make_model("int_gens:1"), 60), (7,), 8)


def test_coset_count_examples():
    z = build_ball(make_model("int_gens:1"), 80)
    assert coset_count(z, (7,), 3) == 7
    assert coset_count(z, (1,), 0) == 1
    dih = make_model("dihedral_inf")
    d = build_ball(dih, 30)
    k, _ = quasi_density_constant(d, (3, 0), 8)
    assert coset_count(d, (3, 0), k) == 6
    assert brute_force_coset_count(dih, (3, 0), k, 10) == 6
    assert brute_force_coset_count(make_model("int_gens:1"), (7,), 3, 5) == 7
    with pytest.raises(Indeterminate):
        coset_count(build_ball(make_model("int_gens:1"), 8), (7,), 3)


@pytest.mark.parametrize("text", LINE_LIKE)
def test_certify_line_like(text):
    cert = certificate(text)
    assert cert.verdict == VIRTUALLY_Z, cert.checks
    assert all(c["passed"] for c in cert.checks)
    assert cert.coset_count == cert.oracle_coset_count >= 1
    gaps = [b - a for a, b in zip(cert.orbit, cert.orbit[1:])]
    assert min(gaps) > cert.constants["n"] > cert.constants["epsilon"] * (1 + cert.constants["lambda"])
    assert recheck_certificate(cert.to_dict()) == []


def test_certified_indices():
    g = certificate("int_gens:1")
    assert g.index == g.g_word_length == 12
    d = certificate("dihedral_inf")
    m = int(d.g.split(";")[0])
    assert d.g.endswith(";0") and d.index == 2 * m


def test_straw_man_grid_inconclusive():
    cert = certificate("grid_2")
    assert cert.verdict == INCONCLUSIVE and cert.failed_check == "qi_verified"
    assert "lower" in cert.checks[0]["detail"]


def test_certificate_json_round_trip():
    cert = certificate("dihedral_inf")
    doc = json.loads(cert.to_json())
    assert doc["verdict"] == VIRTUALLY_Z and doc["index"] == doc["coset_count"]
    assert certificate_from_json(cert.to_json()).to_json() == cert.to_json()


def test_recheck_catches_tampering():
    doc = certificate("int_gens:1").to_dict()
    doc["coset_count"] = 11
    assert recheck_certificate(doc)
    doc = certificate("int_gens:1").to_dict()
    doc["quasi_density_k"] = 2.0
    assert recheck_certificate(doc)


def test_params_validation():
    with pytest.raises(PreconditionViolated):
        CertifyParams(z_max=1)
    with pytest.raises(PreconditionViolated):
        CertifyParams(grid_step=0)


def test_orbit_svg():
    svg = orbit_svg([-2.0, 0.0, 2.0], 1)
    assert svg.startswith("<svg") and svg.count("<circle") == 3 and "red" in svg
