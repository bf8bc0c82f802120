"""Translation elements, their orbits, and the virtually-Z certificate."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

from .cayley import DEFAULT_MAX_VERTICES, Ball, build_ball
from .ends import PROBE_POINTS, end_homomorphism_check, kernel_member
from .errors import (
    BallTooSmall,
    Inconclusive,
    Indeterminate,
    NotFound,
    OutOfRange,
    PreconditionViolated,
    QiRigidError,
)
from .groups import GroupModel, GroupSpec, Key, make_model
from .qi import QiMap, builtin_qi, verify_qi
from .quasi_action import (
    QuasiActionCtx,
    build_context,
    check_four_properties,
    far_interval_bound,
    no_flip_threshold,
    point_grid,
    star,
    translation_threshold,
)

VIRTUALLY_Z = "VirtuallyZ"
INCONCLUSIVE = "Inconclusive"


def find_translation_element(ctx: QuasiActionCtx) -> Key:
    """First ball element past the threshold length that preserves the ends and moves 0 right.

    Candidates are scanned by (word length, key) and only up to the context's
    element budget ``w_max``.
    """
    threshold = translation_threshold(ctx.lam, ctx.eps, ctx.n)
    first = math.floor(threshold) + 1
    for k in range(first, min(ctx.w_max, ctx.ball.radius) + 1):
        for g in ctx.ball.sphere(k):
            if star(ctx, g, 0.0) > 0 and kernel_member(ctx, g):
                return g
    raise NotFound(f"no end-preserving element of length in ({threshold:.3f}, {ctx.w_max}] moves 0 right")


@dataclass
class OrbitReport:
    g: Key
    z_max: int
    positions: list
    min_gap: float
    max_gap: float
    monotone: bool

    def position(self, z: int) -> float:
        return self.positions[z + self.z_max]

    def gaps(self) -> list:
        return [b - a for a, b in zip(self.positions, self.positions[1:])]


def orbit_report(ctx: QuasiActionCtx, g: Key, z_max: int) -> OrbitReport:
    """Positions g^z * 0 for |z| <= z_max, built by iterating g (and g^-1) from 0."""
    if z_max < 1:
        raise PreconditionViolated("z_max must be positive")
    g_inv = ctx.model._inv(g)
    up, down = [0.0], [0.0]
    try:
        for _ in range(z_max):
            up.append(star(ctx, g, up[-1]))
            down.append(star(ctx, g_inv, down[-1]))
    except OutOfRange as exc:
        raise BallTooSmall(f"orbit of {g} left the safe range: {exc}") from exc
    positions = down[:0:-1] + up
    gaps = [b - a for a, b in zip(positions, positions[1:])]
    return OrbitReport(
        g=g,
        z_max=z_max,
        positions=positions,
        min_gap=min(gaps),
        max_gap=max(gaps),
        monotone=all(d > 0 for d in gaps),
    )


def powers_nontrivial(model: GroupModel, g: Key, z_max: int) -> bool:
    e = model.identity()
    h = e
    for _ in range(z_max):
        h = model._mul(h, g)
        if h == e:
            return False
    return True


def infinite_order_check(ctx, g: Key, z_max: int, n: float | None = None) -> bool:
    """Finite evidence that g has infinite order.

    With a quasi-action context: g^z != e for 1 <= z <= z_max and the orbit
    satisfies |g^z * 0| >= |z| n (n defaults to the context's n).  Given a
    bare ``Ball`` instead, no line coordinate exists and the check is that
    the powers g^z, |z| <= z_max, are pairwise distinct.
    """
    if isinstance(ctx, Ball):
        return powers_nontrivial(ctx.model, g, 2 * z_max)
    if not powers_nontrivial(ctx.model, g, z_max):
        return False
    n = ctx.n if n is None else n
    orbit = orbit_report(ctx, g, z_max)
    return all(abs(orbit.position(z)) >= abs(z) * n for z in range(-z_max, z_max + 1))


def _power_list(model: GroupModel, g: Key, z_max: int) -> list[Key]:
    g_inv = model._inv(g)
    out = [model.identity()]
    up = down = model.identity()
    for _ in range(z_max):
        up = model._mul(up, g)
        down = model._mul(down, g_inv)
        out.extend((up, down))
    return out


def quasi_density_constant(ball: Ball, g: Key, z_max: int) -> tuple[float, int]:
    """max over v in B(R - M) of min over |z| <= z_max of d(v, g^z), with M = max |g^z|.

    Returns (k, region radius).  The restriction keeps every distance
    v^-1 g^z inside the ball, so each value is exact.
    """
    m = ball.model
    powers = _power_list(m, g, z_max)
    if any(p not in ball.dist for p in powers):
        raise BallTooSmall(f"powers of {g} up to {z_max} leave the ball")
    reach = max(ball.dist[p] for p in powers)
    region = ball.radius - reach
    if region < ball.dist[g]:
        raise BallTooSmall(f"restricted region B({region}) is smaller than one step of {g}")
    if region > reach:
        raise PreconditionViolated(f"region B({region}) extends past the orbit, whose powers reach only {reach}")
    c = ball.center
    dist = ball.dist
    best = 0
    for v in ball.ball_keys(region):
        cv = m._mul(c, m._inv(v))
        best = max(best, min(dist[m._mul(cv, p)] for p in powers))
    if region < ball.dist[g] + best:
        raise BallTooSmall(f"region B({region}) does not cover one period plus the density constant {best}")
    return float(best), region


def coset_count(ball: Ball, g: Key, k: float) -> int:
    """Right cosets <g>g' met by B(ceil k), found by greedy marking.

    Powers are enumerated outward until their length first exceeds
    R - ceil(k); every identification of two elements of B(ceil k) needs a
    power of length at most 2 ceil(k), so the count is exact when that is
    no larger.
    """
    m = ball.model
    kk = math.ceil(k)
    budget = ball.radius - kk
    if budget < 2 * kk:
        raise Indeterminate(f"ball radius {ball.radius} cannot decide cosets inside B({kk})")
    powers = []
    for step in (g, m._inv(g)):
        h = m.identity()
        while True:
            h = m._mul(h, step)
            if h not in ball.dist or ball.dist[h] > budget:
                break
            powers.append(h)
            if len(powers) > len(ball):
                raise Indeterminate(f"{g} looks torsion: its powers never leave the ball")
    members = set(ball.ball_keys(kk))
    marked = set()
    count = 0
    for a in ball.ball_keys(kk):
        if a in marked:
            continue
        count += 1
        marked.add(a)
        for p in powers:
            b = m._mul(p, a)
            if b in members:
                marked.add(b)
    return count


def brute_force_coset_count(model: GroupModel, g: Key, k: float, z_bound: int) -> int:
    """Independent count: partition B(ceil k) by the class {g^z a : |z| <= z_bound} it meets.

    Uses a fresh ball and ``model.power`` for every exponent, so it shares no
    enumeration code with ``coset_count``.
    """
    members = set(build_ball(model, math.ceil(k)).order)
    powers = [model.power(g, z) for z in range(-z_bound, z_bound + 1)]
    sig = {a: frozenset(b for b in (model.multiply(p, a) for p in powers) if b in members) for a in members}
    if any(sig[b] != s for s in sig.values() for b in s):
        raise Indeterminate("coset signatures overlap: z_bound too small to close the classes")
    return len(set(sig.values()))


def oracle_z_bound(lam: float, eps: float, n: float, k: float) -> int:
    """Exponents that can join two elements of B(ceil k).

    If g^z a = b with a, b in B(ceil k) then |g^z| <= 2 ceil(k), so
    |g^z * 0| <= lam 2 ceil(k) + 2 eps, while the orbit moves at least n per
    step.
    """
    return math.ceil((2 * lam * math.ceil(k) + 4 * eps) / n) + 2


@dataclass
class CertifyParams:
    verify_radius: int = 12
    verify_max_vertices: int = 2000
    z_max: int = 8
    grid_step: float = 0.5
    property_radius: int = 3
    property_extent: float = 20.0
    end_radius: int = 3
    search_slack: int = 4
    max_vertices: int = DEFAULT_MAX_VERTICES
    retries: int = 3

    def __post_init__(self):
        for name in ("verify_radius", "z_max", "property_radius", "end_radius", "max_vertices"):
            if getattr(self, name) < 1:
                raise PreconditionViolated(f"{name} must be positive")
        if self.grid_step <= 0 or self.property_extent <= 0:
            raise PreconditionViolated("grid_step and property_extent must be positive")
        if self.z_max < 2:
            raise PreconditionViolated("z_max must be at least 2 to bracket a full period")


@dataclass
class Certificate:
    group: dict
    qi: str
    params: dict
    constants: dict = field(default_factory=dict)
    g: str | None = None
    g_word_length: int | None = None
    z_max: int = 0
    orbit: list = field(default_factory=list)
    quasi_density_k: float | None = None
    density_ball_radius: int | None = None
    region_radius: int | None = None
    coset_count: int | None = None
    oracle_coset_count: int | None = None
    checks: list = field(default_factory=list)
    verdict: str = INCONCLUSIVE
    failed_check: str | None = None

    @property
    def index(self):
        return self.coset_count if self.verdict == VIRTUALLY_Z else None

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["index"] = self.index
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


class _Checks:
    def __init__(self, cert: Certificate):
        self.cert = cert

    def add(self, name, passed, detail=""):
        self.cert.checks.append({"name": name, "passed": bool(passed), "detail": detail})
        if not passed and self.cert.failed_check is None:
            self.cert.failed_check = name
        return passed


def _safe_range(lam, eps, density_k, w, params: CertifyParams) -> float:
    step = lam * w + eps + density_k + 1
    prop = params.property_extent + 2 * (lam * params.property_radius + eps + density_k + 1)
    end_w = 2 * max(params.end_radius, 1)
    ends = far_interval_bound(lam, eps, lam * end_w + eps + density_k + 1) + PROBE_POINTS + 1
    probe = far_interval_bound(lam, eps, step) + PROBE_POINTS + 1
    return max(prop, ends, probe, (params.z_max + 1) * step)


def certify_context(model, qi, report, params: CertifyParams) -> QuasiActionCtx:
    lam, eps = report.tight_lambda, report.effective_epsilon
    n = no_flip_threshold(lam, eps) + 1
    w = math.floor(translation_threshold(lam, eps, n)) + 1 + params.search_slack
    w = max(w, 2 * params.property_radius, 2 * params.end_radius)
    x_max = _safe_range(lam, eps, report.density_k, w, params)
    last = None
    for _ in range(params.retries):
        try:
            return build_context(model, qi, report, x_max, w, max_vertices=params.max_vertices)
        except BallTooSmall as exc:
            last = exc
            x_max *= 2
    raise last


def certify_virtually_z(spec, qi: QiMap | str | None = None, params: CertifyParams | None = None) -> Certificate:
    """Run the whole rigidity pipeline, recording every check in the certificate."""
    params = params or CertifyParams()
    model = make_model(spec)
    if not isinstance(qi, QiMap):
        qi = builtin_qi(model, qi)
    cert = Certificate(group=model.spec.to_dict(), qi=qi.name, params=asdict(params), z_max=params.z_max)
    checks = _Checks(cert)
    enc = model.encode
    try:
        _run(model, qi, params, cert, checks, enc)
    except QiRigidError as exc:
        checks.add(_next_stage(cert), False, f"{type(exc).__name__}: {exc}")
    if cert.failed_check is None and cert.checks:
        cert.verdict = VIRTUALLY_Z
    return cert


_STAGES = (
    "qi_verified",
    "quasi_action_context",
    "four_properties",
    "end_homomorphism",
    "translation_element",
    "orbit_monotone",
    "infinite_order",
    "quasi_density",
    "coset_count",
    "coset_oracle",
)


def _next_stage(cert: Certificate) -> str:
    done = {c["name"] for c in cert.checks}
    return next((s for s in _STAGES if s not in done), "pipeline")


def _run(model, qi, params, cert, checks, enc):
    # all-pairs verification is quadratic, so fast-growing groups stop at a smaller radius
    vball = build_ball(model, params.verify_radius, max_vertices=params.verify_max_vertices, truncate=True)
    report = verify_qi(vball, qi, params.grid_step)
    lam, eps = report.tight_lambda, report.effective_epsilon
    cert.constants = {
        "lambda": lam,
        "epsilon": eps,
        "tight_epsilon": report.tight_epsilon,
        "density_k": report.density_k,
        "verify_radius": vball.radius,
    }
    detail = f"{report.pairs_checked} pairs" if report.verified else f"{len(report.violations)} violations"
    if report.violations:
        a, b, which, slack = report.violations[0]
        detail += f"; first {which} at ({enc(a)}, {enc(b)}) slack {slack}"
    if not checks.add("qi_verified", report.verified, detail):
        return

    ctx = certify_context(model, qi, report, params)
    n = ctx.n
    threshold = translation_threshold(lam, eps, n)
    cert.constants.update(
        {"l": ctx.l, "n_threshold": ctx.n_threshold, "n": n, "translation_threshold": threshold}
    )
    checks.add(
        "quasi_action_context", True, f"ball radius {ctx.ball.radius}, safe range {ctx.x_max:g}, budget {ctx.w_max}"
    )

    elements = build_ball(model, params.property_radius).order
    grid = point_grid(params.property_extent, params.grid_step)
    props = check_four_properties(ctx, elements, grid)
    cert.constants["worst_slack"] = props.worst_slack
    if not checks.add("four_properties", props.passed, f"{len(props.violations)} violations"):
        return

    ends = end_homomorphism_check(ctx, params.end_radius)
    cert.constants["kernel_index"] = ends.index
    if not checks.add(
        "end_homomorphism", ends.passed, f"kernel index {ends.index}, {len(ends.homomorphism_violations)} violations"
    ):
        return

    g = find_translation_element(ctx)
    cert.g = enc(g)
    cert.g_word_length = ctx.ball.dist[g]
    checks.add("translation_element", True, f"|g| = {cert.g_word_length} > {threshold:g}")

    orbit = orbit_report(ctx, g, params.z_max)
    cert.orbit = orbit.positions
    cert.constants["n_prime"] = orbit.max_gap
    ok = orbit.monotone and orbit.min_gap > n and n > eps + lam * eps
    if not checks.add("orbit_monotone", ok, f"gaps in [{orbit.min_gap:g}, {orbit.max_gap:g}], n = {n:g}"):
        return
    if not checks.add("infinite_order", infinite_order_check(ctx, g, params.z_max), f"z_max {params.z_max}"):
        return

    width = ctx.ball.dist[g]
    reach = max(ctx.ball.dist.get(p, math.inf) for p in _power_list(model, g, params.z_max))
    if math.isinf(reach):
        reach = params.z_max * width
    dball = build_ball(model, reach + 2 * width, max_vertices=params.max_vertices)
    k, region = quasi_density_constant(dball, g, params.z_max)
    cert.quasi_density_k = k
    cert.density_ball_radius = dball.radius
    cert.region_radius = region
    checks.add("quasi_density", True, f"k = {k:g} on B({region})")

    count = coset_count(dball, g, k)
    cert.coset_count = count
    checks.add("coset_count", count >= 1, f"{count} cosets met by B({math.ceil(k)})")
    oracle = brute_force_coset_count(model, g, k, oracle_z_bound(lam, eps, n, k))
    cert.oracle_coset_count = oracle
    checks.add("coset_oracle", oracle == count, f"oracle {oracle}")


def certificate_from_json(text: str) -> Certificate:
    doc = json.loads(text)
    doc.pop("index", None)
    return Certificate(**doc)


def recheck_certificate(doc: dict) -> list[str]:
    """Re-derive the group-theoretic claims of a serialized certificate; returns failures."""
    problems = []
    if doc.get("verdict") != VIRTUALLY_Z:
        return ["verdict is not VirtuallyZ"]
    failed = [c["name"] for c in doc["checks"] if not c["passed"]]
    if failed:
        problems.append(f"failed checks recorded: {failed}")
    model = make_model(GroupSpec.from_dict(doc["group"]))
    g = model.decode(doc["g"])
    z_max = doc["z_max"]
    if not powers_nontrivial(model, g, z_max):
        problems.append("g has finite order within z_max")
    ball = build_ball(model, doc["density_ball_radius"])
    k, region = quasi_density_constant(ball, g, z_max)
    if region != doc["region_radius"] or k > doc["quasi_density_k"]:
        problems.append(f"density k recomputed as {k} on B({region})")
    if coset_count(ball, g, doc["quasi_density_k"]) != doc["coset_count"]:
        problems.append("coset count does not reproduce")
    positions = doc["orbit"]
    if any(b <= a for a, b in zip(positions, positions[1:])):
        problems.append("orbit is not strictly increasing")
    return problems


def orbit_csv(positions, z_max: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["z", "position"])
    for z, x in zip(range(-z_max, z_max + 1), positions):
        writer.writerow([z, repr(float(x))])
    return buf.getvalue()


def orbit_svg(positions, z_max: int, width: int = 800, height: int = 160) -> str:
    """Number line with the orbit points and a shaded band over every gap."""
    lo, hi = min(positions), max(positions)
    span = (hi - lo) or 1.0
    pad = 40

    def sx(x):
        return pad + (x - lo) / span * (width - 2 * pad)

    mid = height / 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<line x1="{pad / 2:.2f}" y1="{mid:.2f}" x2="{width - pad / 2:.2f}" y2="{mid:.2f}" stroke="black"/>',
    ]
    for j, (a, b) in enumerate(zip(positions, positions[1:])):
        fill = "#dde8f5" if j % 2 else "#f5e6d0"
        parts.append(
            f'<rect x="{sx(a):.2f}" y="{mid - 12:.2f}" width="{sx(b) - sx(a):.2f}" height="24" fill="{fill}"/>'
        )
        parts.append(
            f'<text x="{(sx(a) + sx(b)) / 2:.2f}" y="{mid - 18:.2f}" font-size="9" text-anchor="middle">{b - a:g}</text>'
        )
    for z, x in zip(range(-z_max, z_max + 1), positions):
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{mid:.2f}" r="3.5" fill="{"red" if z == 0 else "black"}"/>')
        parts.append(f'<text x="{sx(x):.2f}" y="{mid + 26:.2f}" font-size="9" text-anchor="middle">{z}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
