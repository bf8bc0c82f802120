"""Command-line front end.

Exit codes: 0 certified or plain success, 2 inconclusive or negative
verdict, 1 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cayley import build_ball, count_ends, growth_report
from .errors import InvalidSpec, QiRigidError
from .flow import FLOW_VIRTUALLY_Z, FlowParams, detect_virtually_z_via_flow
from .groups import GroupSpec, make_model
from .qi import builtin_qi
from .rigidity import VIRTUALLY_Z, CertifyParams, certify_virtually_z, orbit_csv, orbit_svg

OK, NEGATIVE, ERROR = 0, 2, 1

CONFIG_KEYS = {"group", "qi", "radius", "zmax", "grid", "inner", "n", "max_vertices", "threads", "out"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ERROR, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qirigid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--group", help="kind:param,param, e.g. int_gens:2,3 or dihedral_inf")
        p.add_argument("--radius", type=_positive_int)
        p.add_argument("--out", help="output directory (default: current directory)")
        p.add_argument("--config", help="JSON file with the same fields as the flags")
        p.add_argument("--threads", type=_positive_int, help="accepted for compatibility; scans run serially")
        p.add_argument("--max-vertices", dest="max_vertices", type=_positive_int)
        return p

    common(sub.add_parser("ball", help="BFS ball as vertex and edge CSV"))
    common(sub.add_parser("growth", help="ball and sphere sizes with a growth class"))
    ends = common(sub.add_parser("ends", help="components outside B(inner) reaching the outer sphere"))
    ends.add_argument("--inner", type=int)
    cert = common(sub.add_parser("certify", help="run the quasi-isometry certificate pipeline"))
    cert.add_argument("--qi", help="built-in map name, or 'default'")
    cert.add_argument("--zmax", type=_positive_int)
    cert.add_argument("--grid", type=_positive_float, help="x-sampling step")
    fl = common(sub.add_parser("flow-detect", help="certify from linear growth via flows"))
    fl.add_argument("--qi", help=argparse.SUPPRESS)
    fl.add_argument("--zmax", type=_positive_int)
    fl.add_argument("-n", dest="n", type=_positive_int, help="largest sphere fingerprinted")
    return parser


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: top level must be an object")
    unknown = sorted(set(doc) - CONFIG_KEYS)
    if unknown:
        raise UsageError(f"{path}: unknown field(s) {unknown}")
    for key in ("radius", "zmax", "inner", "n", "max_vertices", "threads"):
        if key in doc and (not isinstance(doc[key], int) or isinstance(doc[key], bool) or doc[key] < 0):
            raise UsageError(f"{path}: field {key!r} must be a nonnegative integer")
    if "grid" in doc and (not isinstance(doc["grid"], (int, float)) or doc["grid"] <= 0):
        raise UsageError(f"{path}: field 'grid' must be a positive number")
    return doc


def resolve(args) -> dict:
    """Flags override config fields; returns a flat settings dict."""
    cfg = load_config(args.config) if args.config else {}
    settings = dict(cfg)
    for key, value in vars(args).items():
        if key not in ("command", "config") and value is not None:
            settings[key] = value
    if "group" not in settings:
        raise UsageError("--group is required (or a 'group' field in --config)")
    group = settings["group"]
    try:
        settings["group"] = GroupSpec.from_dict(group) if isinstance(group, dict) else GroupSpec.parse(str(group))
    except InvalidSpec as exc:
        raise UsageError(f"group: {exc}") from exc
    if args.command == "certify" and not settings.get("qi"):
        raise UsageError("certify needs --qi (a built-in map name or 'default')")
    if args.command == "flow-detect" and settings.get("qi"):
        raise UsageError("flow-detect takes no --qi: it works from the Cayley graph alone")
    return settings


def _write(out: Path, name: str, text: str):
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def cmd_ball(settings, out: Path) -> int:
    model = make_model(settings["group"])
    ball = build_ball(model, settings.get("radius", 5), **_cap(settings))
    _write(out, "vertices.csv", ball.vertices_csv())
    _write(out, "edges.csv", ball.edges_csv())
    print(_dump({"group": str(model.spec), "radius": ball.radius, "vertices": len(ball)}), end="")
    return OK


def cmd_growth(settings, out: Path) -> int:
    model = make_model(settings["group"])
    report = growth_report(build_ball(model, settings.get("radius", 8), **_cap(settings)))
    _write(out, "growth.json", report.to_json())
    print(report.to_json(), end="")
    return OK


def cmd_ends(settings, out: Path) -> int:
    model = make_model(settings["group"])
    radius = settings.get("radius", 6)
    inner = settings.get("inner", 2)
    doc = {"group": str(model.spec), "inner": inner, "radius": radius}
    doc["ends"] = count_ends(build_ball(model, radius, **_cap(settings)), inner)
    _write(out, "ends.json", _dump(doc))
    print(_dump(doc), end="")
    return OK


def cmd_certify(settings, out: Path) -> int:
    model = make_model(settings["group"])
    qi = builtin_qi(model, settings["qi"])
    kwargs = {}
    if "radius" in settings:
        kwargs["verify_radius"] = settings["radius"]
    if "zmax" in settings:
        kwargs["z_max"] = settings["zmax"]
    if "grid" in settings:
        kwargs["grid_step"] = settings["grid"]
    if "max_vertices" in settings:
        kwargs["max_vertices"] = settings["max_vertices"]
    cert = certify_virtually_z(model.spec, qi, CertifyParams(**kwargs))
    _write(out, "certificate.json", cert.to_json())
    if cert.orbit:
        _write(out, "orbit.csv", orbit_csv(cert.orbit, cert.z_max))
        _write(out, "orbit.svg", orbit_svg(cert.orbit, cert.z_max))
    summary = {"verdict": cert.verdict, "index": cert.index, "failed_check": cert.failed_check, "g": cert.g}
    print(_dump(summary), end="")
    return OK if cert.verdict == VIRTUALLY_Z else NEGATIVE


def cmd_flow_detect(settings, out: Path) -> int:
    kwargs = {}
    for key, field in (("radius", "radius"), ("zmax", "z_max"), ("n", "n_max"), ("max_vertices", "max_vertices")):
        if key in settings:
            kwargs[field] = settings[key]
    verdict = detect_virtually_z_via_flow(settings["group"], FlowParams(**kwargs))
    _write(out, "verdict.json", verdict.to_json())
    _write(out, "mincut_table.csv", verdict.mincut_csv())
    print(_dump({"verdict": verdict.verdict, "reason": verdict.reason, "index": verdict.index, "g": verdict.g}), end="")
    return OK if verdict.verdict == FLOW_VIRTUALLY_Z else NEGATIVE


def _cap(settings):
    return {"max_vertices": settings["max_vertices"]} if "max_vertices" in settings else {}


COMMANDS = {
    "ball": cmd_ball,
    "growth": cmd_growth,
    "ends": cmd_ends,
    "certify": cmd_certify,
    "flow-detect": cmd_flow_detect,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = resolve(args)
        out = Path(settings.get("out") or ".")
        return COMMANDS[args.command](settings, out)
    except UsageError as exc:
        print(f"qirigid {args.command}: {exc}", file=sys.stderr)
        return ERROR
    except QiRigidError as exc:
        print(f"qirigid {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
