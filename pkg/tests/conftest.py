import functools

import pytest

from qirigid.cayley import build_ball
from qirigid.groups import make_model
from qirigid.qi import builtin_qi, verify_qi
from qirigid.quasi_action import build_context

LINE_LIKE = ["int_gens:1", "int_gens:2,3", "dihedral_inf", "product_int_cyclic:2"]


@functools.lru_cache(maxsize=None)
def context(spec, x_max=60.0, w_max=8):
    """Small verified context shared across test modules."""
    model = make_model(spec)
    qi = builtin_qi(model)
    report = verify_qi(build_ball(model, 12), qi)
    return build_context(model, qi, report, x_max, w_max)


@functools.lru_cache(maxsize=None)
def certificate(spec):
    from qirigid.rigidity import certify_virtually_z

    return certify_virtually_z(spec)


@functools.lru_cache(maxsize=None)
def flow_verdict(spec):
    from qirigid.flow import detect_virtually_z_via_flow

    return detect_virtually_z_via_flow(spec)


@pytest.fixture(params=LINE_LIKE)
def line_spec(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance")
    for line in module.acceptance_lines():
        terminalreporter.write_line(line)
