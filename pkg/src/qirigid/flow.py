"""{0,1}-flows on directed Cayley balls and the repeat-and-lift detector.

A maximum flow from the identity to a far vertex crosses every sphere.  In
a group of linear growth the spheres stay small, so two of them carry
isomorphic flow patterns; gluing the segment between them turns the flow
into a cycle, and lifting the cycle gives an element of infinite order.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from collections import deque
from dataclasses import asdict, dataclass, field

from .cayley import Ball, build_ball, growth_report
from .errors import (
    InvalidFlow,
    LiftMismatch,
    NoCycle,
    NoRepeat,
    NotFlowPreserving,
    PreconditionViolated,
    QiRigidError,
    TooLarge,
)
from .groups import Key, make_model

DEFAULT_N = 8
BRUTE_FORCE_LIMIT = 14
PERMUTATION_LIMIT = math.factorial(8)


@dataclass
class FlowNetwork:
    """Directed multigraph on integer vertex ids; ``labels`` holds the original keys.

    Each edge is (src, dst, weight, tag).  ``origins`` optionally records, per
    edge, the ball edge it came from.  ``source``/``sink`` may be None for a
    circulation, in which case conservation is required everywhere.
    """

    labels: list
    edges: list
    source: int | None
    sink: int | None
    origins: list | None = None
    allow_loops: bool = False

    def __post_init__(self):
        n = len(self.labels)
        for a, b, w, _ in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise PreconditionViolated(f"edge ({a}, {b}) has an endpoint outside the vertex set")
            if w not in (0, 1):
                raise PreconditionViolated(f"weight {w} is not 0 or 1")
            if a == b and not self.allow_loops:
                raise PreconditionViolated(f"self-loop at {a}")

    def __len__(self):
        return len(self.labels)

    @classmethod
    def from_edges(cls, edges, source, sink) -> "FlowNetwork":
        """Build from (src_label, dst_label, weight) triples; vertices sorted by label."""
        labels = sorted({x for a, b, _ in edges for x in (a, b)} | {source, sink})
        index = {v: i for i, v in enumerate(labels)}
        return cls(labels, [(index[a], index[b], w, 0) for a, b, w in edges], index[source], index[sink])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["src", "dst", "weight"])
        for a, b, w, _ in self.edges:
            writer.writerow([self.labels[a], self.labels[b], w])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, source: str, sink: str) -> "FlowNetwork":
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls.from_edges([(r["src"], r["dst"], int(r["weight"])) for r in rows], source, sink)


@dataclass
class Flow:
    values: list

    def __getitem__(self, i):
        return self.values[i]


def _net_out(net: FlowNetwork, values) -> list[int]:
    out = [0] * len(net)
    for (a, b, _, _), f in zip(net.edges, values):
        out[a] += f
        out[b] -= f
    return out


def verify_flow(net: FlowNetwork, flow: Flow) -> bool:
    if len(flow.values) != len(net.edges):
        return False
    for (_, _, w, _), f in zip(net.edges, flow.values):
        if f not in (0, 1) or f > w:
            return False
    out = _net_out(net, flow.values)
    return all(x == 0 for i, x in enumerate(out) if i not in (net.source, net.sink))


def flow_magnitude(flow: Flow, net: FlowNetwork) -> int:
    """Net flow leaving the source, which must equal the net flow entering the sink."""
    if not verify_flow(net, flow):
        raise InvalidFlow("flow violates capacity or conservation")
    if net.source is None:
        return 0
    out = _net_out(net, flow.values)
    if net.sink is not None and out[net.source] != -out[net.sink]:
        raise InvalidFlow("source and sink totals disagree")
    return out[net.source]


def max_flow(net: FlowNetwork) -> Flow:
    """Edmonds-Karp on unit capacities, then circulation removal.

    Residual arcs are explored in edge order, so the result is a function of
    the network alone.
    """
    if net.source == net.sink:
        raise PreconditionViolated("source and sink must differ")
    n = len(net)
    f = [0] * len(net.edges)
    fwd = [[] for _ in range(n)]
    back = [[] for _ in range(n)]
    for i, (a, b, _, _) in enumerate(net.edges):
        fwd[a].append(i)
        back[b].append(i)
    s, t = net.source, net.sink
    while True:
        parent = {s: None}
        queue = deque([s])
        while queue and t not in parent:
            v = queue.popleft()
            for i in fwd[v]:
                b = net.edges[i][1]
                if b not in parent and f[i] < net.edges[i][2]:
                    parent[b] = (i, 1)
                    queue.append(b)
            for i in back[v]:
                a = net.edges[i][0]
                if a not in parent and f[i] > 0:
                    parent[a] = (i, -1)
                    queue.append(a)
        if t not in parent:
            break
        v = t
        while parent[v] is not None:
            i, d = parent[v]
            f[i] += d
            v = net.edges[i][0] if d == 1 else net.edges[i][1]
    return remove_circulations(net, Flow(f))


def remove_circulations(net: FlowNetwork, flow: Flow) -> Flow:
    """Cancel directed cycles of flow-carrying edges; the magnitude is unchanged."""
    f = list(flow.values)
    while True:
        cycle = _find_cycle(net, f)
        if cycle is None:
            return Flow(f)
        for i in cycle:
            f[i] = 0


def _find_cycle(net: FlowNetwork, f) -> list[int] | None:
    succ = [[] for _ in range(len(net))]
    for i, (a, b, _, _) in enumerate(net.edges):
        if f[i]:
            succ[a].append(i)
    state = [0] * len(net)  # 0 new, 1 on stack, 2 done
    for root in range(len(net)):
        if state[root] or not succ[root]:
            continue
        stack = [(root, iter(succ[root]))]
        path = []
        state[root] = 1
        while stack:
            v, it = stack[-1]
            i = next(it, None)
            if i is None:
                state[v] = 2
                stack.pop()
                if path:
                    path.pop()
                continue
            b = net.edges[i][1]
            if state[b] == 1:
                start = next(j for j, (u, _) in enumerate(stack) if u == b)
                return path[start:] + [i]
            if state[b] == 0:
                state[b] = 1
                path.append(i)
                stack.append((b, iter(succ[b])))
    return None


def brute_force_min_cut(net: FlowNetwork) -> int:
    n = len(net)
    if n > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"{n} vertices exceeds the brute-force limit {BRUTE_FORCE_LIMIT}")
    if net.source == net.sink:
        raise PreconditionViolated("source and sink must differ")
    others = [v for v in range(n) if v not in (net.source, net.sink)]
    best = None
    for mask in range(1 << len(others)):
        side = {net.source} | {v for j, v in enumerate(others) if mask >> j & 1}
        cut = sum(w for a, b, w, _ in net.edges if a in side and b not in side)
        best = cut if best is None else min(best, cut)
    return best


def ball_network(ball: Ball, sink: Key | None = None) -> FlowNetwork:
    """Every a -> a*s edge of the ball with weight 1, tagged by generator; sink defaults to min S(R)."""
    index = {v: i for i, v in enumerate(ball.order)}
    edges = []
    for v in ball.order:
        for j, w in ball.neighbors(v):
            edges.append((index[v], index[w], 1, j))
    if sink is None:
        sink = ball.sphere(ball.radius)[0]
    return FlowNetwork(list(ball.order), edges, index[ball.center], index[sink])


# ---------------------------------------------------------------- sections


@dataclass
class CrossSection:
    radius: int
    inner: list
    outer: list
    edges: list  # (src key, dst key, tag, weight, flow) by ball-network edge order

    @property
    def vertices(self) -> list:
        return self.inner + self.outer

    def net_outward(self, ball: Ball) -> int:
        return sum(
            (1 if ball.dist[b] > ball.dist[a] else -1 if ball.dist[b] < ball.dist[a] else 0) * f
            for a, b, _, _, f in self.edges
        )


def sphere_cross_section(ball: Ball, net: FlowNetwork, flow: Flow, k: int, n_max: int = DEFAULT_N) -> CrossSection:
    """S(k), its neighbours in S(k+1), and every network edge touching S(k) inside that set."""
    if not 0 <= k < ball.radius:
        raise PreconditionViolated(f"cross-sections need 0 <= k < R, got k={k}")
    inner = ball.sphere(k)
    if len(inner) > n_max:
        raise TooLarge(f"sphere S({k}) has {len(inner)} > {n_max} vertices")
    inner_set = set(inner)
    outer = sorted({w for v in inner for _, w in ball.neighbors(v) if ball.dist[w] == k + 1})
    keep = inner_set | set(outer)
    edges = []
    for i, (a, b, w, tag) in enumerate(net.edges):
        ka, kb = net.labels[a], net.labels[b]
        if (ka in inner_set and kb in keep) or (kb in inner_set and ka in keep):
            edges.append((ka, kb, tag, w, flow.values[i]))
    return CrossSection(k, list(inner), outer, edges)


@dataclass(frozen=True)
class Fingerprint:
    text: str
    order: tuple  # vertices listed in the canonical order

    def __eq__(self, other):
        return isinstance(other, Fingerprint) and self.text == other.text

    def __hash__(self):
        return hash(self.text)


def _refine(cs: CrossSection) -> dict:
    color = {v: 0 for v in cs.inner}
    color.update({v: 1 for v in cs.outer})
    while True:
        sig = {}
        for v in cs.vertices:
            around = []
            for a, b, tag, w, f in cs.edges:
                if a == v:
                    around.append((0, tag, w, f, color[b]))
                if b == v:
                    around.append((1, tag, w, f, color[a]))
            sig[v] = (color[v], tuple(sorted(around)))
        ranks = {s: r for r, s in enumerate(sorted(set(sig.values())))}
        new = {v: ranks[sig[v]] for v in cs.vertices}
        if len(set(new.values())) == len(set(color.values())):
            return new
        color = new


def fingerprint(cs: CrossSection) -> Fingerprint:
    """Minimal encoding over all vertex orders compatible with the refined colouring.

    Colours come from iterated neighbourhood refinement starting from the
    inner/outer layer split, so only orders inside each colour class remain
    to try; the minimum over them is a complete isomorphism invariant.
    """
    color = _refine(cs)
    classes = {}
    for v in cs.vertices:
        classes.setdefault(color[v], []).append(v)
    groups = [classes[c] for c in sorted(classes)]
    count = math.prod(math.factorial(len(g)) for g in groups)
    if count > PERMUTATION_LIMIT:
        raise TooLarge(f"cross-section at radius {cs.radius} needs {count} orderings")
    palette = tuple(c for c in sorted(classes) for _ in classes[c])
    best = None
    for choice in itertools.product(*(itertools.permutations(g) for g in groups)):
        order = tuple(v for part in choice for v in part)
        pos = {v: i for i, v in enumerate(order)}
        code = tuple(sorted((pos[a], pos[b], tag, w, f) for a, b, tag, w, f in cs.edges))
        if best is None or code < best[0]:
            best = (code, order)
    text = json.dumps([len(cs.inner), list(palette), [list(e) for e in best[0]]], separators=(",", ":"))
    return Fingerprint(text, best[1])


def section_isomorphism(cs1: CrossSection, fp1: Fingerprint, cs2: CrossSection, fp2: Fingerprint) -> dict:
    """Vertex map cs1 -> cs2 read off the canonical orders, checked edge by edge."""
    if fp1 != fp2:
        raise NotFlowPreserving("fingerprints differ")
    iso = dict(zip(fp1.order, fp2.order))
    image = sorted((iso[a], iso[b], tag, w, f) for a, b, tag, w, f in cs1.edges)
    if image != sorted(cs2.edges) or any(iso[v] not in set(cs2.inner) for v in cs1.inner):
        raise NotFlowPreserving(f"map between radii {cs1.radius} and {cs2.radius} does not preserve the flow")
    return iso


@dataclass
class Repeat:
    k1: int
    k2: int
    iso: dict  # S(k1) section vertex -> S(k2) section vertex
    scanned: list


def scan_sections(ball: Ball, net: FlowNetwork, flow: Flow, n_max: int = DEFAULT_N):
    """Fingerprint every interior radius 1..R-1; TooLarge radii are kept as strings."""
    out = {}
    for k in range(1, ball.radius):
        try:
            cs = sphere_cross_section(ball, net, flow, k, n_max)
            out[k] = (cs, fingerprint(cs))
        except TooLarge as exc:
            out[k] = str(exc)
    return out


def find_repeat(ball: Ball, net: FlowNetwork, flow: Flow, n_max: int = DEFAULT_N, sections=None) -> Repeat:
    """Smallest k2, then smallest k1 < k2, whose cross-sections share a fingerprint."""
    sections = scan_sections(ball, net, flow, n_max) if sections is None else sections
    scanned = [(k, v if isinstance(v, str) else len(v[0].inner)) for k, v in sorted(sections.items())]
    seen = {}
    for k2 in sorted(sections):
        entry = sections[k2]
        if isinstance(entry, str):
            continue
        cs2, fp2 = entry
        if fp2 in seen:
            k1 = seen[fp2]
            cs1, fp1 = sections[k1]
            return Repeat(k1, k2, section_isomorphism(cs1, fp1, cs2, fp2), scanned)
        seen[fp2] = k2
    raise NoRepeat(f"no two of the radii 1..{ball.radius - 1} share a fingerprint", scanned=scanned)


def quotient_segment(ball: Ball, net: FlowNetwork, flow: Flow, k1: int, k2: int, iso: dict):
    """Glue S(k2) onto S(k1) along ``iso`` and carry the flow over.

    Keeps vertices with k1 <= dist <= k2 and every network edge between
    them except those inside S(k2), which duplicate the S(k1) edges under
    the gluing.  Returns (network, flow) with no source or sink; the flow
    must be a circulation.
    """
    if k2 <= k1:
        raise PreconditionViolated("need k2 > k1")
    back = {}
    for a, b in iso.items():
        if ball.dist[a] == k1:
            back[b] = a
    if set(back) != set(ball.sphere(k2)):
        raise NotFlowPreserving(f"isomorphism does not carry S({k1}) onto S({k2})")
    members = [v for k in range(k1, k2) for v in ball.sphere(k)]
    index = {v: i for i, v in enumerate(members)}
    for v in ball.sphere(k2):
        index[v] = index[back[v]]
    edges, origins, values = [], [], []
    for i, (a, b, w, tag) in enumerate(net.edges):
        ka, kb = net.labels[a], net.labels[b]
        if ka not in index or kb not in index:
            continue
        if ball.dist[ka] == k2 and ball.dist[kb] == k2:
            continue
        edges.append((index[ka], index[kb], w, tag))
        origins.append((ka, kb))
        values.append(flow.values[i])
    q = FlowNetwork(members, edges, None, None, origins=origins, allow_loops=True)
    qf = Flow(values)
    if not verify_flow(q, qf):
        raise NotFlowPreserving("glued flow is not a circulation")
    return q, qf


def find_flow_cycle(q: FlowNetwork, qf: Flow) -> list[int]:
    """Directed cycle of flow-carrying edges, walked from the first vertex with outflow."""
    succ = {}
    for i, (a, _, _, _) in enumerate(q.edges):
        if qf.values[i]:
            succ.setdefault(a, i)
    if not succ:
        raise NoCycle("the flow is zero")
    v = min(succ)
    order = []
    where = {}
    while v not in where:
        if v not in succ:
            raise NoCycle(f"walk stopped at vertex {q.labels[v]} with no outflow")
        where[v] = len(order)
        order.append(succ[v])
        v = q.edges[succ[v]][1]
    return order[where[v]:]


def lift_cycle(ball: Ball, q: FlowNetwork, cycle: list[int], k1: int, k2: int, iso: dict):
    """Unroll a quotient cycle into a path of the ball; returns (x, y, g) with g x = y.

    The cycle is rotated to start just after a crossing of the glued sphere.
    Each later crossing restarts at the S(k1) copy of the reached S(k2)
    vertex, and the rest of the path is translated by the left
    multiplication that lines the copies up, so the lift stays a genuine
    path.  One crossing gives the plain g = y x^-1.
    """
    if not cycle:
        raise PreconditionViolated("empty cycle")
    m = ball.model
    edges = [q.origins[i] for i in cycle]
    jumps = [j for j in range(len(edges)) if edges[j][1] != edges[(j + 1) % len(edges)][0]]
    for j in jumps:
        y, nxt = edges[j][1], edges[(j + 1) % len(edges)][0]
        if ball.dist[y] != k2 or iso.get(nxt) != y:
            raise LiftMismatch(f"consecutive edges ({edges[j]}, {edges[(j + 1) % len(edges)]}) do not glue")
    if not jumps:
        raise LiftMismatch("cycle never crosses the glued sphere")
    start = (jumps[-1] + 1) % len(edges)
    edges = edges[start:] + edges[:start]
    x = edges[0][0]
    shift = m.identity()
    for j, (a, b) in enumerate(edges):
        if j + 1 < len(edges) and b != edges[j + 1][0]:
            shift = m._mul(shift, m._mul(b, m._inv(edges[j + 1][0])))
    y = m._mul(shift, edges[-1][1])
    return x, y, m._mul(y, m._inv(x))


def mincut_table(ball: Ball, ts=range(3, 9)) -> list[tuple[int, int]]:
    """Max flow from B(t), contracted to one source, to {dist >= 2t}, contracted to one sink."""
    rows = []
    for t in ts:
        if 2 * t > ball.radius:
            break
        mid = [v for v in ball.order if t < ball.dist[v] < 2 * t]
        index = {v: i + 2 for i, v in enumerate(mid)}

        def node(v):
            d = ball.dist[v]
            return 0 if d <= t else 1 if d >= 2 * t else index[v]

        edges = []
        for v in ball.order:
            for j, w in ball.neighbors(v):
                a, b = node(v), node(w)
                if a != b:
                    edges.append((a, b, 1, j))
        net = FlowNetwork(["B", "far"] + mid, edges, 0, 1)
        rows.append((t, flow_magnitude(max_flow(net), net)))
    return rows


FLOW_VIRTUALLY_Z = "VirtuallyZ"
NOT_LINEAR = "NotLinearGrowth"
FLOW_INCONCLUSIVE = "Inconclusive"


@dataclass
class FlowParams:
    radius: int = 16
    n_max: int = DEFAULT_N
    z_max: int = 8
    max_vertices: int = 10**5

    def __post_init__(self):
        if self.radius < 4 or self.n_max < 1 or self.z_max < 2 or self.max_vertices < 1:
            raise PreconditionViolated("need radius >= 4, n_max >= 1, z_max >= 2, max_vertices >= 1")


@dataclass
class FlowVerdict:
    group: dict
    params: dict
    verdict: str = FLOW_INCONCLUSIVE
    reason: str = ""
    radius: int = 0
    growth: dict = field(default_factory=dict)
    flow_magnitude: int | None = None
    sections: list = field(default_factory=list)
    mincut_table: list = field(default_factory=list)
    repeat: list | None = None
    cycle_length: int | None = None
    x: str | None = None
    y: str | None = None
    g: str | None = None
    quasi_density_k: float | None = None
    index: int | None = None
    oracle_index: int | None = None
    checks: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def mincut_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["distance", "maxflow"])
        writer.writerows(self.mincut_table)
        return buf.getvalue()


def detect_virtually_z_via_flow(spec, params: FlowParams | None = None) -> FlowVerdict:
    """Certify virtually Z from the Cayley graph alone, through flows and a lifted cycle."""
    from .rigidity import brute_force_coset_count, coset_count, infinite_order_check, quasi_density_constant

    params = params or FlowParams()
    model = make_model(spec)
    out = FlowVerdict(group=model.spec.to_dict(), params=asdict(params))
    enc = model.encode
    ball = build_ball(model, params.radius, max_vertices=params.max_vertices, truncate=True)
    out.radius = ball.radius
    if ball.radius < 4:
        out.reason = f"vertex cap reached at radius {ball.radius}"
        return out
    growth = growth_report(ball)
    out.growth = growth.to_dict()
    if growth.classification == "bounded":
        out.reason = f"bounded growth: the group is finite with {len(ball)} elements"
        return out
    net = ball_network(ball)
    flow = max_flow(net)
    out.flow_magnitude = flow_magnitude(flow, net)
    sections = scan_sections(ball, net, flow, params.n_max)
    out.sections = [
        {"radius": k, "status": v}
        if isinstance(v, str)
        else {"radius": k, "status": "ok", "size": len(v[0].inner), "fingerprint": v[1].text}
        for k, v in sorted(sections.items())
    ]
    out.mincut_table = [list(r) for r in mincut_table(ball)]
    if growth.classification == "superlinear":
        out.verdict = NOT_LINEAR
        too_large = sum(1 for v in sections.values() if isinstance(v, str))
        out.reason = f"superlinear growth; {too_large} of {len(sections)} cross-sections too large"
        return out
    try:
        rep = find_repeat(ball, net, flow, params.n_max, sections)
        out.repeat = [rep.k1, rep.k2]
        q, qf = quotient_segment(ball, net, flow, rep.k1, rep.k2, rep.iso)
        cycle = find_flow_cycle(q, qf)
        out.cycle_length = len(cycle)
        x, y, g = lift_cycle(ball, q, cycle, rep.k1, rep.k2, rep.iso)
        out.x, out.y, out.g = enc(x), enc(y), enc(g)
        ok = infinite_order_check(ball, g, params.z_max)
        out.checks.append({"name": "infinite_order", "passed": ok})
        if not ok:
            out.reason = f"lifted element {enc(g)} has finite order"
            return out
        width = max(ball.dist.get(g, params.radius), 1)
        pball = build_ball(model, params.z_max * width + 2 * width + 2, max_vertices=params.max_vertices * 10)
        reach = max(pball.dist[p] for p in _powers(model, g, params.z_max))
        dball = build_ball(model, reach + 2 * width + 2, max_vertices=params.max_vertices * 10)
        k, region = quasi_density_constant(dball, g, params.z_max)
        out.quasi_density_k = k
        out.checks.append({"name": "quasi_density", "passed": True, "region": region})
        out.index = coset_count(dball, g, k)
        out.checks.append({"name": "coset_count", "passed": out.index >= 1})
        inner = build_ball(model, 2 * math.ceil(k))
        out.oracle_index = brute_force_coset_count(model, g, k, len(inner))
        out.checks.append({"name": "coset_oracle", "passed": out.oracle_index == out.index})
    except QiRigidError as exc:
        out.reason = f"{type(exc).__name__}: {exc}"
        return out
    if all(c["passed"] for c in out.checks):
        out.verdict = FLOW_VIRTUALLY_Z
        out.reason = f"lifted {enc(g)} has infinite order and finite index {out.index}"
    return out


def _powers(model, g, z_max):
    g_inv = model._inv(g)
    up = down = model.identity()
    out = [up]
    for _ in range(z_max):
        up, down = model._mul(up, g), model._mul(down, g_inv)
        out += [up, down]
    return out
