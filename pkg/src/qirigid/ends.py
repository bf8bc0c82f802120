"""How elements act on the two ends of the line, and the resulting sign map."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from .cayley import build_ball
from .errors import BallTooSmall, Inconclusive, OutOfRange, PreconditionViolated
from .groups import Key
from .quasi_action import QuasiActionCtx, star

PROBE_POINTS = 11


class EndSign(enum.Enum):
    PRESERVES = "Preserves"
    FLIPS = "Flips"

    def __mul__(self, other: "EndSign") -> "EndSign":
        return EndSign.PRESERVES if self is other else EndSign.FLIPS


def probe_start(ctx: QuasiActionCtx, g: Key) -> float:
    return ctx.lg_of(g) + 1


def end_action(ctx: QuasiActionCtx, g: Key) -> EndSign:
    """Sign of g on {+inf, -inf}, read from 11 points just past the far-interval bound.

    Every probe must land on one side and farther than l from 0; anything else
    means the constants or the ball do not support a conclusion.
    """
    x0 = probe_start(ctx, g)
    try:
        values = [star(ctx, g, x0 + j) for j in range(PROBE_POINTS)]
    except (OutOfRange, BallTooSmall) as exc:
        raise Inconclusive(f"probe for {g} left the safe range: {exc}") from exc
    limit = ctx.l
    if any(abs(y) <= limit for y in values):
        raise Inconclusive(f"{g} sends a probe within {limit} of 0")
    if all(y > 0 for y in values):
        return EndSign.PRESERVES
    if all(y < 0 for y in values):
        return EndSign.FLIPS
    raise Inconclusive(f"probe signs disagree for {g}")


def kernel_member(ctx: QuasiActionCtx, g: Key) -> bool:
    return end_action(ctx, g) is EndSign.PRESERVES


def no_flip_check(ctx: QuasiActionCtx, g: Key, x: float, n: float) -> bool:
    if n <= ctx.n_threshold:
        raise PreconditionViolated(f"n={n} must exceed the threshold {ctx.n_threshold}")
    return star(ctx, g, x) < star(ctx, g, x + n)


@dataclass
class EndReport:
    radius: int
    signs: dict = field(default_factory=dict)
    homomorphism_violations: list = field(default_factory=list)
    kernel: list = field(default_factory=list)
    index: int = 1

    @property
    def passed(self) -> bool:
        return not self.homomorphism_violations

    def to_dict(self, encode=str) -> dict:
        return {
            "radius": self.radius,
            "signs": {encode(g): s.value for g, s in sorted(self.signs.items())},
            "homomorphism_violations": [[encode(g), encode(h)] for g, h in self.homomorphism_violations],
            "kernel": [encode(g) for g in self.kernel],
            "index": self.index,
        }

    def to_json(self, encode=str) -> str:
        return json.dumps(self.to_dict(encode), sort_keys=True, indent=2) + "\n"


def kernel_index(model, signs: dict) -> int:
    """1 or 2, after checking the flipping elements form a single kernel coset.

    Inside the ball: with any flipping element t, every flipping element
    sampled must be k*t with k a kernel element, whenever k*t is tested.
    """
    flips = [g for g, s in signs.items() if s is EndSign.FLIPS]
    if not flips:
        return 1
    t = min(flips)
    t_inv = model._inv(t)
    for g in flips:
        k = model._mul(g, t_inv)
        if k in signs and signs[k] is not EndSign.PRESERVES:
            raise Inconclusive(f"{g} and {t} flip but their quotient {k} does too")
    for g, s in signs.items():
        if s is EndSign.PRESERVES:
            h = model._mul(g, t)
            if h in signs and signs[h] is not EndSign.FLIPS:
                raise Inconclusive(f"{g} preserves but {h} = {g}{t} does not flip")
    return 2


def end_homomorphism_check(ctx: QuasiActionCtx, radius: int) -> EndReport:
    """Signs on B(radius) and the check sign(gh) = sign(g) sign(h) for every pair.

    Products reach B(2 radius), so their signs are evaluated as well.
    """
    m = ctx.model
    elements = build_ball(m, radius).order
    signs = {g: end_action(ctx, g) for g in elements}
    violations = []
    for g in elements:
        for h in elements:
            gh = m._mul(g, h)
            if gh not in signs:
                signs[gh] = end_action(ctx, gh)
            if signs[gh] is not signs[g] * signs[h]:
                violations.append((g, h))
    inner = {g: signs[g] for g in elements}
    return EndReport(
        radius=radius,
        signs=inner,
        homomorphism_violations=violations,
        kernel=[g for g in elements if signs[g] is EndSign.PRESERVES],
        index=kernel_index(m, signs),
    )
