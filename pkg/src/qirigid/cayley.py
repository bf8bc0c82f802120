"""Finite-radius Cayley balls and the statistics computed from them.

Edges join g and g*s for s in the generating set, so left multiplication is
an isometry of the word metric.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import deque
from dataclasses import dataclass

from .errors import Indeterminate, PreconditionViolated, ResourceLimit
from .groups import GroupModel, Key

DEFAULT_MAX_VERTICES = 10**6


class Ball:
    """Radius-R ball of a Cayley graph around ``center``.

    ``dist`` maps each key to its word distance from the center; ``order``
    lists keys sorted by (distance, key) and ``spheres[k]`` holds S(k) sorted
    by key.  Adjacency is recomputed from the model on demand.
    """

    def __init__(self, model: GroupModel, radius: int, center: Key, dist: dict, spheres: list):
        self.model = model
        self.radius = radius
        self.center = center
        self.dist = dist
        self.spheres = spheres
        self.order = [v for layer in spheres for v in layer]
        self.truncated = False
        self._adjacency = None

    def __len__(self):
        return len(self.dist)

    def __contains__(self, key):
        return key in self.dist

    def neighbors(self, v: Key) -> list[tuple[int, Key]]:
        mul = self.model._mul
        out = []
        for j, s in enumerate(self.model.generating_set()):
            w = mul(v, s)
            if w in self.dist:
                out.append((j, w))
        return out

    @property
    def adjacency(self) -> dict:
        if self._adjacency is None:
            self._adjacency = {v: self.neighbors(v) for v in self.order}
        return self._adjacency

    def sphere(self, k: int) -> list[Key]:
        if 0 <= k < len(self.spheres):
            return self.spheres[k]
        return []

    def ball_keys(self, k: int) -> list[Key]:
        return [v for layer in self.spheres[: k + 1] for v in layer]

    def edges_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["src_key", "gen_index", "dst_key"])
        enc = self.model.encode
        for v in self.order:
            for j, w in self.neighbors(v):
                writer.writerow([enc(v), j, enc(w)])
        return buf.getvalue()

    def vertices_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "dist"])
        for v in self.order:
            writer.writerow([self.model.encode(v), self.dist[v]])
        return buf.getvalue()


def build_ball(
    model: GroupModel,
    radius: int,
    center: Key | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    truncate: bool = False,
) -> Ball:
    """BFS the Cayley graph out to ``radius``.

    With ``truncate=True`` a cap overflow returns the last complete radius
    instead of raising ``ResourceLimit``; the result has ``truncated`` set.
    """
    if radius < 0:
        raise PreconditionViolated("radius must be nonnegative")
    center = model.identity() if center is None else center
    model._check(center)
    gens = model.generating_set()
    mul = model._mul
    dist = {center: 0}
    spheres = [[center]]
    for k in range(1, radius + 1):
        layer = []
        for v in spheres[-1]:
            for s in gens:
                w = mul(v, s)
                if w not in dist:
                    dist[w] = k
                    layer.append(w)
            if len(dist) > max_vertices:
                if truncate:
                    for w in layer:
                        del dist[w]
                    ball = Ball(model, k - 1, center, dist, spheres)
                    ball.truncated = True
                    return ball
                raise ResourceLimit(
                    f"ball of {model.spec} exceeds {max_vertices} vertices at radius {k}",
                    radius_completed=k - 1,
                )
        layer.sort()
        spheres.append(layer)
    return Ball(model, radius, center, dist, spheres)


def word_distance(ball: Ball, a: Key, b: Key) -> int:
    """Exact word distance d(a, b), read off the ball by left-invariance.

    d(a, b) = |a^-1 b| and the ball stores |c^-1 v| for v = c a^-1 b.  When
    that translate is outside the ball the distance exceeds the radius and
    cannot be certified.
    """
    m = ball.model
    if a not in ball.dist or b not in ball.dist:
        raise Indeterminate("both points must lie in the ball")
    t = m._mul(ball.center, m._mul(m._inv(a), b))
    d = ball.dist.get(t)
    if d is None:
        raise Indeterminate(f"d({a}, {b}) exceeds the ball radius {ball.radius}")
    return d


def restricted_bfs_distance(ball: Ball, a: Key, b: Key) -> int:
    """BFS from ``a`` inside the ball; exact when certified, else Indeterminate.

    The restricted distance r upper-bounds the true one, and a geodesic from
    the endpoint nearer the center stays in the ball when that endpoint's
    depth plus r is at most the radius.
    """
    if a not in ball.dist or b not in ball.dist:
        raise Indeterminate("both points must lie in the ball")
    seen = {a: 0}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        if v == b:
            break
        for _, w in ball.neighbors(v):
            if w not in seen:
                seen[w] = seen[v] + 1
                queue.append(w)
    if b not in seen:
        raise Indeterminate(f"{b} unreachable from {a} inside the ball")
    r = seen[b]
    if min(ball.dist[a], ball.dist[b]) + r > ball.radius:
        raise Indeterminate(f"restricted distance {r} between {a} and {b} not certified")
    return r


@dataclass(frozen=True)
class GrowthReport:
    sizes: tuple
    sphere_sizes: tuple
    classification: str
    liminf_sphere: int
    liminf_radius: int

    def to_dict(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "sphere_sizes": list(self.sphere_sizes),
            "classification": self.classification,
            "liminf_sphere": self.liminf_sphere,
            "liminf_radius": self.liminf_radius,
            "heuristic": True,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _window(radius):
    return range(math.ceil(radius / 2), radius + 1)


def classify_growth(sizes, sphere_sizes) -> str:
    """Finite-radius growth heuristic on the window [ceil(R/2), R].

    bounded: the last sphere is empty.  linear: sizes[k]/k varies by at most
    a factor 3 over the window and the spheres in its second half are no
    larger than the largest in its first half.  Otherwise superlinear.
    """
    radius = len(sizes) - 1
    if sphere_sizes[radius] == 0:
        return "bounded"
    ks = list(_window(radius))
    ratios = [sizes[k] / k for k in ks]
    half = (len(ks) + 1) // 2
    first = [sphere_sizes[k] for k in ks[:half]]
    second = [sphere_sizes[k] for k in ks[half:]] or first
    if max(ratios) / min(ratios) <= 3 and max(second) <= max(first):
        return "linear"
    return "superlinear"


def growth_report(ball: Ball) -> GrowthReport:
    if ball.radius < 4:
        raise PreconditionViolated("growth_report needs radius >= 4")
    sphere_sizes = [len(ball.sphere(k)) for k in range(ball.radius + 1)]
    sizes = []
    total = 0
    for s in sphere_sizes:
        total += s
        sizes.append(total)
    radius, size = liminf_sphere_bound(ball)
    return GrowthReport(
        tuple(sizes), tuple(sphere_sizes), classify_growth(sizes, sphere_sizes), size, radius
    )


def liminf_sphere_bound(ball: Ball) -> tuple[int, int]:
    """Smallest sphere on [ceil(R/2), R] as (radius, size); ties go to the smaller radius."""
    if ball.radius < 4:
        raise PreconditionViolated("liminf_sphere_bound needs radius >= 4")
    best = None
    for k in _window(ball.radius):
        size = len(ball.sphere(k))
        if best is None or size < best[1]:
            best = (k, size)
    return best


def count_ends(ball: Ball, inner: int) -> int:
    """Components of {v : dist(v) > inner} that reach the outer sphere."""
    if inner < 0 or inner > ball.radius - 2:
        raise PreconditionViolated(f"need 0 <= inner <= R - 2, got inner={inner}, R={ball.radius}")
    outside = [v for v in ball.order if ball.dist[v] > inner]
    seen = set()
    ends = 0
    for start in outside:
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        touches = False
        while queue:
            v = queue.popleft()
            if ball.dist[v] == ball.radius:
                touches = True
            for _, w in ball.neighbors(v):
                if w not in seen and ball.dist[w] > inner:
                    seen.add(w)
                    queue.append(w)
        ends += touches
    return ends
