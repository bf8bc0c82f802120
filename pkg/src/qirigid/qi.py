"""Candidate quasi-isometries to the real line and their empirical certification."""

from __future__ import annotations

import bisect
import json
import math
import weakref
from dataclasses import dataclass, field
from typing import Callable

from .cayley import Ball
from .errors import InvalidSpec, OutOfRange, PreconditionViolated
from .groups import GroupModel, Key


@dataclass(frozen=True, eq=False)
class QiMap:
    forward: Callable[[Key], float]
    claimed_lambda: float
    claimed_epsilon: float
    name: str = "custom"

    def __post_init__(self):
        if self.claimed_lambda < 1 or self.claimed_epsilon < 0:
            raise PreconditionViolated("claimed constants need lambda >= 1 and epsilon >= 0")

    def __call__(self, key):
        return float(self.forward(key))


# name -> (forward factory, claimed (lambda, epsilon) factory); first entry is the default
def _int_gens_qis(model):
    top = max(abs(g) for g in model.spec.params)
    return {"inclusion": (lambda a: a[0], (top, top - 1))}


def _projection_qis(model):
    if model.kind == "dihedral_inf":
        consts = (2, 1)
    else:
        half = model.spec.params[0] // 2
        consts = (half + 1, half)
    return {"projection": (lambda a: a[0], consts)}


def _grid_qis(model):
    return {"first_coordinate": (lambda a: a[0], (2, 2))}


def _cyclic_qis(model):
    return {"constant": (lambda a: 0, (1, model.spec.params[0] // 2))}


def _free_qis(model):
    return {"first_letter_exponent": (lambda a: model.exponent_sum(a, 1), (1, 1))}


def _bs12_qis(model):
    return {"height": (lambda a: a[0], (1, 1))}


_BUILTIN = {
    "int_gens": _int_gens_qis,
    "dihedral_inf": _projection_qis,
    "product_int_cyclic": _projection_qis,
    "grid_d": _grid_qis,
    "cyclic": _cyclic_qis,
    "free": _free_qis,
    "bs12": _bs12_qis,
}


def builtin_qi_names(model: GroupModel) -> list[str]:
    return list(_BUILTIN[model.kind](model))


def builtin_qi(model: GroupModel, name: str | None = None, claimed=None) -> QiMap:
    """The closed-form map shipped with ``model`` (its first one by default)."""
    table = _BUILTIN[model.kind](model)
    if name in (None, "default"):
        name = next(iter(table))
    if name not in table:
        raise InvalidSpec(f"{model.spec} has no built-in map {name!r}; choose from {sorted(table)}")
    forward, consts = table[name]
    lam, eps = claimed if claimed is not None else consts
    return QiMap(forward, float(lam), float(eps), name)


class Snapper:
    """Nearest-image quasi-inverse over the vertices of one ball.

    Among vertices whose image is closest to x, the one with the smaller word
    length wins, then the smaller key.
    """

    def __init__(self, ball: Ball, qi: QiMap):
        best: dict[float, tuple] = {}
        for v in ball.order:
            y = qi(v)
            cand = (ball.dist[v], v)
            if y not in best or cand < best[y]:
                best[y] = cand
        self.values = sorted(best)
        self.targets = [best[y][1] for y in self.values]
        gaps = [b - a for a, b in zip(self.values, self.values[1:])]
        self.density_k = max(gaps) / 2 if gaps else 0.0
        self.lo = self.values[0]
        self.hi = self.values[-1]
        self._best = best

    def index(self, x: float) -> int:
        vals = self.values
        i = bisect.bisect_left(vals, x)
        picks = []
        if i < len(vals):
            picks.append(i)
        if i > 0:
            picks.append(i - 1)
        return min(picks, key=lambda j: (abs(vals[j] - x), self._best[vals[j]]))

    def target(self, x: float) -> Key:
        return self.targets[self.index(x)]


_SNAPPERS: "weakref.WeakKeyDictionary[Ball, dict]" = weakref.WeakKeyDictionary()


def snapper(ball: Ball, qi: QiMap) -> Snapper:
    per_ball = _SNAPPERS.setdefault(ball, {})
    s = per_ball.get(id(qi))
    if s is None or s[0] is not qi:
        s = (qi, Snapper(ball, qi))
        per_ball[id(qi)] = s
    return s[1]


def quasi_inverse_eval(ball: Ball, qi: QiMap, x: float) -> Key:
    snap = snapper(ball, qi)
    margin = snap.density_k + qi.claimed_epsilon
    if x < snap.lo - margin or x > snap.hi + margin:
        raise OutOfRange(f"x={x} lies outside the image [{snap.lo}, {snap.hi}] by more than {margin}")
    return snap.target(x)


@dataclass
class QiReport:
    verified: bool
    tight_lambda: float
    tight_epsilon: float
    density_k: float
    violations: list = field(default_factory=list)
    inverse_epsilon: float = 0.0
    roundtrip_k: float = 0.0
    word_slope: float = math.inf
    pairs_checked: int = 0
    radius: int = 0

    @property
    def effective_epsilon(self) -> float:
        """Single constant covering every role the derivations give to epsilon."""
        return max(self.tight_epsilon, self.inverse_epsilon, self.density_k, self.roundtrip_k)

    def to_dict(self, encode=str, max_violations=50) -> dict:
        return {
            "verified": self.verified,
            "radius": self.radius,
            "pairs_checked": self.pairs_checked,
            "tight_lambda": self.tight_lambda,
            "tight_epsilon": self.tight_epsilon,
            "density_k": self.density_k,
            "inverse_epsilon": self.inverse_epsilon,
            "roundtrip_k": self.roundtrip_k,
            "effective_epsilon": self.effective_epsilon,
            "word_slope": None if math.isinf(self.word_slope) else self.word_slope,
            "violation_count": len(self.violations),
            "violations": [
                {"a": encode(a), "b": encode(b), "inequality": which, "slack": slack}
                for a, b, which, slack in self.violations[:max_violations]
            ],
        }

    def to_json(self, encode=str) -> str:
        return json.dumps(self.to_dict(encode), sort_keys=True, indent=2) + "\n"


def verify_qi(ball: Ball, qi: QiMap, grid_step: float = 0.5) -> QiReport:
    """Check both quasi-isometry inequalities on every pair of ball vertices.

    Besides the forward check this measures the constants of the snapping
    quasi-inverse (``inverse_epsilon`` at the claimed lambda), the round trip
    d(v, snap(phi(v))) and the image density, all on the inner half-ball where
    the snap is not distorted by the boundary.
    """
    if not len(ball):
        raise PreconditionViolated("empty ball")
    m = ball.model
    lam, eps = qi.claimed_lambda, qi.claimed_epsilon
    dist = ball.dist
    mul, inv = m._mul, m._inv
    center = ball.center
    verts = ball.order
    images = {v: qi(v) for v in verts}
    violations = []
    if images.get(m.identity(), 0.0) != 0.0:
        violations.append((m.identity(), m.identity(), "normalization", -abs(images[m.identity()])))
    need = 0.0
    pairs = 0
    for i, a in enumerate(verts):
        ia = mul(center, inv(a))
        ya = images[a]
        for b in verts[i + 1 :]:
            d = dist.get(mul(ia, b))
            if d is None:
                continue
            pairs += 1
            dy = abs(ya - images[b])
            lower = d / lam - dy
            upper = dy - lam * d
            need = max(need, lower, upper)
            if lower > eps:
                violations.append((a, b, "lower", eps - lower))
            if upper > eps:
                violations.append((a, b, "upper", eps - upper))
    violations.sort(key=lambda t: (t[0], t[1], t[2]))

    snap = snapper(ball, qi)
    inner = ball.ball_keys(ball.radius // 2)
    roundtrip = 0
    for v in inner:
        w = snap.target(images[v])
        roundtrip = max(roundtrip, dist[mul(mul(center, inv(v)), w)])
    inner_images = [images[v] for v in inner]
    lo, hi = min(inner_images), max(inner_images)
    xs = [lo + j * grid_step for j in range(int(math.floor((hi - lo) / grid_step)) + 1)]
    snaps = [snap.target(x) for x in xs]
    inv_eps = 0.0
    for i, (x, u) in enumerate(zip(xs, snaps)):
        iu = mul(center, inv(u))
        for y, w in zip(xs[i + 1 :], snaps[i + 1 :]):
            d = dist.get(mul(iu, w))
            if d is None:
                continue
            dx = y - x
            inv_eps = max(inv_eps, dx / lam - d, d - lam * dx)

    outer = ball.sphere(ball.radius)
    reach = min((abs(images[v]) for v in outer), default=0.0)
    slope = ball.radius / reach if reach > 0 else math.inf
    return QiReport(
        verified=not violations,
        tight_lambda=lam,
        tight_epsilon=max(need, 0.0),
        density_k=snap.density_k,
        violations=violations,
        inverse_epsilon=inv_eps,
        roundtrip_k=float(roundtrip),
        word_slope=slope,
        pairs_checked=pairs,
        radius=ball.radius,
    )
