"""The induced map G x R -> R and the constants derived from it."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cayley import DEFAULT_MAX_VERTICES, Ball, build_ball
from .errors import BallTooSmall, OutOfRange, PreconditionViolated
from .groups import GroupModel, Key
from .qi import QiMap, QiReport, snapper


@dataclass(frozen=True)
class DerivedConstants:
    l: float
    n_threshold: float
    lg: float

    def to_dict(self):
        return {"l": self.l, "n_threshold": self.n_threshold, "lg": self.lg}


def pass_close_radius(lam: float, eps: float) -> float:
    return lam**2 + lam * eps + eps


def no_flip_threshold(lam: float, eps: float) -> float:
    return lam**2 * pass_close_radius(lam, eps) + lam * eps + lam**2 * eps


def far_interval_bound(lam: float, eps: float, d0: float) -> float:
    return lam**2 * (lam**2 + lam * eps + 3 * eps + d0 + 1)


def derived_constants(lam: float, eps: float, d0: float = 0.0) -> DerivedConstants:
    if lam < 1 or eps < 0 or d0 < 0:
        raise PreconditionViolated("need lambda >= 1, epsilon >= 0, d0 >= 0")
    return DerivedConstants(
        pass_close_radius(lam, eps), no_flip_threshold(lam, eps), far_interval_bound(lam, eps, d0)
    )


def translation_threshold(lam: float, eps: float, n: float) -> float:
    """Word length beyond which an end-preserving g moves 0 by more than n."""
    return lam * (eps + lam**2 * (eps / lam + lam * eps + 2 * eps + n))


@dataclass
class QuasiActionCtx:
    """Everything needed to evaluate g*x = phi(g . snap(x)).

    ``x_max`` bounds the points and ``w_max`` the word length of the elements
    the context promises to handle; construction checks the ball is large
    enough for both.
    """

    model: GroupModel
    ball: Ball
    qi: QiMap
    lam: float
    eps: float
    x_max: float
    w_max: int
    density_k: float = 0.0

    def __post_init__(self):
        self._snap = snapper(self.ball, self.qi)
        self.density_k = self._snap.density_k
        if self.lam < 1 or self.eps < 0:
            raise PreconditionViolated("need lambda >= 1 and epsilon >= 0")
        outer = self.ball.sphere(self.ball.radius)
        if not outer:
            raise BallTooSmall("ball has no outer sphere: the group looks finite at this radius")
        reach = min(abs(self.qi(v)) for v in outer) - self.lam - self.eps
        if reach < self.x_max + self.density_k:
            raise BallTooSmall(
                f"image of the outer sphere reaches only {reach:.3f} < {self.x_max + self.density_k:.3f}"
            )
        lo_idx = self._snap.index(-self.x_max - self.density_k)
        hi_idx = self._snap.index(self.x_max + self.density_k)
        deepest = max(self.ball.dist[t] for t in self._snap.targets[lo_idx : hi_idx + 1])
        if deepest + self.w_max > self.ball.radius:
            raise BallTooSmall(
                f"snap targets reach depth {deepest}; translates by length {self.w_max} leave radius {self.ball.radius}"
            )
        self.n = no_flip_threshold(self.lam, self.eps) + 1

    @property
    def l(self) -> float:
        return pass_close_radius(self.lam, self.eps)

    @property
    def n_threshold(self) -> float:
        return no_flip_threshold(self.lam, self.eps)

    def snap(self, x: float) -> Key:
        if abs(x) > self.x_max:
            raise OutOfRange(f"|x|={abs(x)} exceeds the safe range {self.x_max}")
        return self._snap.target(x)

    def lg_of(self, g: Key) -> float:
        return far_interval_bound(self.lam, self.eps, abs(star(self, g, 0.0)))

    def derived(self, g: Key | None = None) -> DerivedConstants:
        d0 = 0.0 if g is None else abs(star(self, g, 0.0))
        return derived_constants(self.lam, self.eps, d0)

    def constants_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "epsilon": self.eps,
            "density_k": self.density_k,
            "l": self.l,
            "n_threshold": self.n_threshold,
            "n": self.n,
        }


def build_context(
    model: GroupModel,
    qi: QiMap,
    report: QiReport,
    x_max: float,
    w_max: int,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> QuasiActionCtx:
    """Size a ball from the verified constants and wrap it in a context.

    The first guess uses the outer-sphere slope measured during verification;
    the radius doubles while the context still reports the ball too small.
    """
    lam, eps = report.tight_lambda, report.effective_epsilon
    if math.isinf(report.word_slope):
        raise BallTooSmall("the map does not leave a bounded set on the outer sphere; no safe range exists")
    radius = w_max + math.ceil(report.word_slope * (x_max + report.density_k + lam + eps)) + 2
    for _ in range(6):
        ball = build_ball(model, radius, max_vertices=max_vertices)
        try:
            return QuasiActionCtx(model, ball, qi, lam, eps, x_max, w_max)
        except BallTooSmall:
            radius *= 2
    raise BallTooSmall(f"no adequate ball up to radius {radius // 2}")


def star(ctx: QuasiActionCtx, g: Key, x: float) -> float:
    m = ctx.model
    v = m._mul(g, ctx.snap(x))
    if v not in ctx.ball.dist:
        raise BallTooSmall(f"{g} . snap({x}) leaves the ball")
    return ctx.qi(v)


@dataclass
class PropertyReport:
    worst_slack: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self, encode=str, max_violations=50) -> dict:
        return {
            "passed": self.passed,
            "constants": self.constants,
            "worst_slack": self.worst_slack,
            "samples": self.samples,
            "violation_count": len(self.violations),
            "violations": [
                {"property": p, "elements": [encode(e) for e in els], "points": list(pts), "slack": s}
                for p, els, pts, s in self.violations[:max_violations]
            ],
        }

    def to_json(self, encode=str) -> str:
        return json.dumps(self.to_dict(encode), sort_keys=True, indent=2) + "\n"


def point_grid(extent: float, step: float) -> list[float]:
    count = int(round(2 * extent / step))
    return [-extent + j * step for j in range(count + 1)]


def check_four_properties(ctx: QuasiActionCtx, elements, points) -> PropertyReport:
    """Scan the four quasi-action inequalities over all sampled g, h, x, y.

    (1) |(gh)*x - g*(h*x)| <= eps + lam*eps
    (2) |e*x - x| <= eps
    (3) |x-y|/lam^2 - eps/lam - eps <= |g*x - g*y| <= lam^2 |x-y| + lam*eps + eps
    (4) d(g . e, snap(g*0)) < lam
    Slack is bound minus observed value; negative slack is a violation.
    """
    m = ctx.model
    lam, eps = ctx.lam, ctx.eps
    elements = list(elements)
    xs = np.asarray(points, dtype=float)
    e = m.identity()
    violations = []
    worst = {}

    def record(prop, slack, els, pts):
        worst[prop] = min(worst.get(prop, math.inf), slack)
        if slack < 0:
            violations.append((prop, tuple(els), tuple(pts), slack))

    table = {g: np.array([star(ctx, g, x) for x in xs]) for g in elements}

    b1 = eps + lam * eps
    for g in elements:
        for h in elements:
            gh = m._mul(g, h)
            for x, hx in zip(xs, table[h]):
                lhs = star(ctx, gh, x)
                rhs = star(ctx, g, hx)
                record("1", b1 - abs(lhs - rhs), (g, h), (float(x),))

    ex = table[e] if e in table else np.array([star(ctx, e, x) for x in xs])
    for x, y in zip(xs, ex):
        record("2", eps - abs(y - x), (e,), (float(x),))

    dx = np.abs(xs[:, None] - xs[None, :])
    upper = lam**2 * dx + lam * eps + eps
    lower = dx / lam**2 - eps / lam - eps
    iu = np.triu_indices(len(xs), 1)
    for g in elements:
        gx = table[g]
        dg = np.abs(gx[:, None] - gx[None, :])
        for name, slack in (("3_upper", upper - dg), ("3_lower", dg - lower)):
            s = slack[iu]
            if not s.size:
                continue
            worst[name] = min(worst.get(name, math.inf), float(s.min()))
            for i, j in zip(*iu):
                if slack[i, j] < 0:
                    violations.append((name, (g,), (float(xs[i]), float(xs[j])), float(slack[i, j])))

    for g in elements:
        target = ctx.snap(star(ctx, g, 0.0))
        d = ctx.ball.dist[m._mul(m._mul(ctx.ball.center, m._inv(g)), target)]
        # strict inequality: zero slack already fails
        worst["4"] = min(worst.get("4", math.inf), lam - d)
        if lam - d <= 0:
            violations.append(("4", (g,), (0.0,), lam - d))

    return PropertyReport(
        worst_slack={k: float(v) for k, v in sorted(worst.items())},
        violations=violations,
        constants=ctx.constants_dict(),
        samples={"elements": len(elements), "points": len(xs)},
    )


def pass_close_check(ctx: QuasiActionCtx, g: Key, a: float, b: float, step: float = 0.25) -> float:
    """Largest distance from a point of [g*a, g*b] to the sampled image g*[a, b].

    The farthest point of the interval sits at an endpoint or midway between
    consecutive image values; it should never exceed the radius l.
    """
    ts = np.arange(a, b + step / 2, step)
    ys = np.sort(np.array([star(ctx, g, t) for t in ts]))
    lo, hi = sorted((star(ctx, g, a), star(ctx, g, b)))
    inside = ys[(ys >= lo) & (ys <= hi)]
    probes = np.concatenate(([lo, hi], (inside[:-1] + inside[1:]) / 2))
    return float(max(np.min(np.abs(ys - p)) for p in probes))
