"""Distance-threshold graphs, their components, and exit flows.

The r-neighbourhood graph has an edge {x,y} exactly when 0 < d(x,y) <= r
(the 1-skeleton of the usual scale-r complex; higher simplices are never
needed). A *flow* routes every point one step along a spanning tree
towards a designated exit vertex (the sink), which in a finite window is
the surrogate for a ray to infinity: sinks must sit on the frontier.

Both constructions are deterministic: the sink of a component is its
lexicographically smallest frontier vertex, the spanning tree is the
breadth-first tree from the sink with neighbour ties broken by smallest
point id.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigError, NotCoarselyUnbounded
from .jsonio import dump_json, format_rational, load_json, parse_rational
from .space import PointId, WindowSpace


@dataclass(frozen=True)
class RipsGraph:
    """Edge set at scale r plus its component partition."""

    r: Fraction
    n: int
    neighbors: tuple  # tuple[frozenset[PointId], ...]
    components: tuple  # tuple[frozenset[PointId], ...], sorted by min id

    def edge_count(self) -> int:
        return sum(len(nb) for nb in self.neighbors) // 2


def build_rips(space: WindowSpace, r) -> RipsGraph:
    """Exact-threshold neighbourhood graph of the window at scale r."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError(f"scale must be positive, got {r}")
    neighbors = []
    for x in range(space.n):
        nb = set(space.ball(x, r))
        nb.discard(x)
        neighbors.append(frozenset(nb))

    unseen = set(range(space.n))
    components = []
    while unseen:
        start = min(unseen)
        comp = {start}
        queue = deque([start])
        unseen.discard(start)
        while queue:
            u = queue.popleft()
            for v in neighbors[u]:
                if v in unseen:
                    unseen.discard(v)
                    comp.add(v)
                    queue.append(v)
        components.append(frozenset(comp))
    components.sort(key=min)
    return RipsGraph(r=r, n=space.n, neighbors=tuple(neighbors),
                     components=tuple(components))


@dataclass
class UnboundednessReport:
    """Which components reach the frontier; those that do not are the
    window's witnesses of bounded pieces."""

    passed: bool
    component_count: int
    bounded_components: list  # list[tuple[PointId, ...]]

    def to_json(self):
        return {
            "passed": self.passed,
            "components": self.component_count,
            "bounded_components": [list(c) for c in self.bounded_components],
        }


def check_components_reach_frontier(rips: RipsGraph, frontier) -> UnboundednessReport:
    frontier = frozenset(frontier)
    bounded = [
        tuple(sorted(c)) for c in rips.components if not (c & frontier)
    ]
    return UnboundednessReport(
        passed=not bounded,
        component_count=len(rips.components),
        bounded_components=bounded,
    )


def check_coarsely_unbounded(space: WindowSpace, rips: RipsGraph) -> UnboundednessReport:
    """Pass iff every component contains a frontier point."""
    return check_components_reach_frontier(rips, space.frontier)


@dataclass(frozen=True)
class FlowField:
    """One outgoing tree edge per non-sink vertex, oriented toward the sink.

    sigma[x] is the next vertex downstream of x; sinks have no image.
    depths[x] counts the sigma-steps from x to its sink.
    """

    sigma: dict  # PointId -> PointId, sinks absent
    sinks: frozenset
    r: Fraction
    n: int
    depths: dict = field(repr=False)  # PointId -> int

    def next(self, x: PointId) -> PointId:
        return self.sigma[x]

    def is_sink(self, x: PointId) -> bool:
        return x in self.sinks

    def depth(self, x: PointId) -> int:
        try:
            return self.depths[x]
        except KeyError:
            raise KeyError(f"point {x} is not covered by this flow") from None


def build_flow(space: WindowSpace, rips: RipsGraph) -> FlowField:
    """Breadth-first spanning tree per component, rooted at the sink.

    Sink = smallest frontier vertex of the component; BFS visits
    neighbours in increasing id order, and sigma maps each vertex to its
    BFS parent. Raises NotCoarselyUnbounded when a component has no
    frontier vertex to exit through.
    """
    return build_flow_from_parts(rips, space.frontier)


def build_flow_from_parts(rips: RipsGraph, frontier) -> FlowField:
    """build_flow when only the graph and the frontier are at hand (e.g.
    rebuilding from a serialized artifact)."""
    frontier = frozenset(frontier)
    report = check_components_reach_frontier(rips, frontier)
    if not report.passed:
        raise NotCoarselyUnbounded(report.bounded_components)

    sigma = {}
    depths = {}
    sinks = []
    for comp in rips.components:
        sink = min(comp & frontier)
        sinks.append(sink)
        depths[sink] = 0
        queue = deque([sink])
        seen = {sink}
        while queue:
            u = queue.popleft()
            for v in sorted(rips.neighbors[u]):
                if v not in seen:
                    seen.add(v)
                    sigma[v] = u
                    depths[v] = depths[u] + 1
                    queue.append(v)
    return FlowField(
        sigma=sigma, sinks=frozenset(sinks), r=rips.r, n=rips.n, depths=depths
    )


def sigma_depth(flow: FlowField, x: PointId) -> int:
    """Number of flow steps from x to its component's sink."""
    return flow.depth(x)


# -- serialization ---------------------------------------------------------


def rips_to_json(space: WindowSpace, rips: RipsGraph) -> dict:
    edges = []
    for x in range(rips.n):
        for y in rips.neighbors[x]:
            if x < y:
                edges.append([x, y])
    edges.sort()
    return {
        "r": format_rational(rips.r),
        "points": rips.n,
        "edges": edges,
        "components": [sorted(c) for c in rips.components],
        "frontier": sorted(space.frontier),
    }


def rips_from_json(doc: dict) -> tuple[RipsGraph, frozenset]:
    """Rebuild a RipsGraph (plus the frontier recorded alongside it)."""
    try:
        n = doc["points"]
        r = parse_rational(doc["r"])
        edge_list = doc["edges"]
        frontier = frozenset(doc["frontier"])
    except (KeyError, TypeError) as e:
        raise ConfigError(f"rips file missing field: {e}") from e
    neighbors = [set() for _ in range(n)]
    for x, y in edge_list:
        neighbors[x].add(y)
        neighbors[y].add(x)
    components = tuple(
        frozenset(c) for c in sorted(doc["components"], key=min)
    )
    return (
        RipsGraph(
            r=r, n=n,
            neighbors=tuple(frozenset(nb) for nb in neighbors),
            components=components,
        ),
        frontier,
    )


def flow_to_json(flow: FlowField) -> dict:
    return {
        "sigma": sorted([x, sx] for x, sx in flow.sigma.items()),
        "sinks": sorted(flow.sinks),
        "r": format_rational(flow.r),
        "points": flow.n,
    }


def flow_from_json(doc: dict) -> FlowField:
    try:
        sigma = {x: sx for x, sx in doc["sigma"]}
        sinks = frozenset(doc["sinks"])
        r = parse_rational(doc["r"])
        n = doc["points"]
    except (KeyError, TypeError) as e:
        raise ConfigError(f"flow file missing field: {e}") from e
    depths = {s: 0 for s in sinks}
    # resolve depths by chasing sigma; cycles mean a corrupt file
    for x in sigma:
        trail = []
        y = x
        while y not in depths:
            trail.append(y)
            if y not in sigma or len(trail) > n:
                raise ConfigError("flow file is corrupt: sigma orbit never reaches a sink")
            y = sigma[y]
        base = depths[y]
        for i, t in enumerate(reversed(trail), start=1):
            depths[t] = base + i
    return FlowField(sigma=sigma, sinks=sinks, r=r, n=n, depths=depths)


def save_rips(space: WindowSpace, rips: RipsGraph, path) -> None:
    dump_json(rips_to_json(space, rips), path)


def load_rips(path) -> tuple[RipsGraph, frozenset]:
    return rips_from_json(load_json(path))


def save_flow(flow: FlowField, path) -> None:
    dump_json(flow_to_json(flow), path)


def load_flow(path) -> FlowField:
    return flow_from_json(load_json(path))
