"""Finite-window models of discrete bounded-geometry metric spaces.

A window is a finite point set with an exact rational metric plus a
*frontier*: the points whose neighbourhoods were cut off when the
(conceptually infinite) space was truncated to a finite piece. Downstream
code uses frontier membership as the finite surrogate for "direction to
infinity": a neighbourhood-graph component that touches the frontier is
treated as unbounded, one that does not as genuinely bounded.

All distances are `fractions.Fraction` and every comparison is exact; no
floating point enters the metric layer. Generated spaces carry both an
adjacency structure (whose shortest-path metric is the normative one) and
a closed-form evaluator that agrees with it, so single distance queries
are O(1)-ish even on windows with thousands of points.

Point ids are dense integers 0..n-1.
"""

from __future__ import annotations

import heapq
import itertools
from collections import OrderedDict, deque
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .errors import ConfigError
from .jsonio import dump_json, format_rational, load_json, parse_rational

PointId = int

_ZERO = Fraction(0)
_ONE = Fraction(1)

# sources cached per space for BFS/Dijkstra-backed metrics
_DIST_CACHE_LIMIT = 64


class WindowSpace:
    """A finite metric window with a marked frontier.

    Exactly one of ``matrix`` / ``adjacency`` must be supplied as the
    normative metric; ``dist_fn`` is an optional exact closed form that
    must agree with it (generators provide both).
    """

    def __init__(
        self,
        n: int,
        *,
        frontier: Iterable[PointId] = (),
        label: str = "",
        matrix: Optional[Sequence[Sequence[Fraction]]] = None,
        adjacency: Optional[Sequence[Sequence[tuple[PointId, Fraction]]]] = None,
        dist_fn: Optional[Callable[[PointId, PointId], Fraction]] = None,
        meta: Optional[dict] = None,
    ):
        if n <= 0:
            raise ValueError(f"a window needs at least one point, got n={n}")
        if (matrix is None) == (adjacency is None):
            raise ValueError("supply exactly one of matrix= or adjacency=")
        self.n = n
        self.frontier = frozenset(frontier)
        self.label = label
        self.meta = meta or {}
        self._dist_fn = dist_fn
        self._row_cache: OrderedDict[int, list] = OrderedDict()
        self._frontier_dist: Optional[list] = None

        bad = [x for x in self.frontier if not (0 <= x < n)]
        if bad:
            raise ValueError(f"frontier ids outside 0..{n - 1}: {bad[:5]}")

        if matrix is not None:
            self._matrix = [[Fraction(v) for v in row] for row in matrix]
            self._adj = None
            self._check_matrix()
        else:
            self._matrix = None
            self._adj = [tuple(nbrs) for nbrs in adjacency]
            if len(self._adj) != n:
                raise ValueError("adjacency length != n")
            self._unit_weights = all(
                w == 1 for nbrs in self._adj for _, w in nbrs
            )
            if dist_fn is None:
                self._check_connected()

    def _check_matrix(self):
        m = self._matrix
        if len(m) != self.n or any(len(row) != self.n for row in m):
            raise ValueError("matrix must be n x n")
        for i in range(self.n):
            if m[i][i] != 0:
                raise ValueError(f"dist({i},{i}) != 0")
            for j in range(i + 1, self.n):
                if m[i][j] != m[j][i]:
                    raise ValueError(f"matrix not symmetric at ({i},{j})")
                if m[i][j] <= 0:
                    raise ValueError(f"dist({i},{j}) must be positive")

    def _check_connected(self):
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for y, _ in self._adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        if len(seen) != self.n:
            raise ValueError(
                "graph metric requires a connected graph; "
                f"only {len(seen)} of {self.n} points reachable from 0"
            )

    # -- metric queries ----------------------------------------------------

    def _check_point(self, x: PointId):
        if not (isinstance(x, int) and 0 <= x < self.n):
            raise KeyError(f"unknown point id {x!r}")

    def dist(self, x: PointId, y: PointId) -> Fraction:
        self._check_point(x)
        self._check_point(y)
        if self._dist_fn is not None:
            return self._dist_fn(x, y)
        if self._matrix is not None:
            return self._matrix[x][y]
        return self._dist_row(x)[y]

    def _dist_row(self, x: PointId) -> list:
        """Full shortest-path row from x (cached, adjacency spaces only)."""
        row = self._row_cache.get(x)
        if row is not None:
            self._row_cache.move_to_end(x)
            return row
        if self._unit_weights:
            row = [None] * self.n
            row[x] = _ZERO
            queue = deque([x])
            while queue:
                u = queue.popleft()
                du = row[u]
                for v, _ in self._adj[u]:
                    if row[v] is None:
                        row[v] = du + 1
                        queue.append(v)
        else:
            row = [None] * self.n
            heap = [(_ZERO, x)]
            while heap:
                du, u = heapq.heappop(heap)
                if row[u] is not None:
                    continue
                row[u] = du
                for v, w in self._adj[u]:
                    if row[v] is None:
                        heapq.heappush(heap, (du + w, v))
        self._row_cache[x] = row
        if len(self._row_cache) > _DIST_CACHE_LIMIT:
            self._row_cache.popitem(last=False)
        return row

    def ball(self, x: PointId, R) -> frozenset:
        """Closed ball {y : d(x,y) <= R}, computed with exact comparisons."""
        self._check_point(x)
        R = Fraction(R)
        if R < 0:
            raise ValueError(f"ball radius must be >= 0, got {R}")
        if self._adj is not None:
            return frozenset(self._explore(x, R))
        return frozenset(y for y in range(self.n) if self.dist(x, y) <= R)

    def _explore(self, x: PointId, R: Fraction):
        """Truncated Dijkstra over the adjacency; yields points with d <= R."""
        dist = {x: _ZERO}
        heap = [(_ZERO, x)]
        done = set()
        while heap:
            du, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            yield u
            for v, w in self._adj[u]:
                dv = du + w
                if dv <= R and dv < dist.get(v, dv + 1):
                    dist[v] = dv
                    heapq.heappush(heap, (dv, v))

    def frontier_distances(self) -> list:
        """Per-point exact distance to the frontier; None if frontier empty."""
        if not self.frontier:
            return [None] * self.n
        if self._frontier_dist is not None:
            return self._frontier_dist
        if self._adj is not None:
            row = [None] * self.n
            heap = [(_ZERO, f) for f in self.frontier]
            heapq.heapify(heap)
            while heap:
                du, u = heapq.heappop(heap)
                if row[u] is not None:
                    continue
                row[u] = du
                for v, w in self._adj[u]:
                    if row[v] is None:
                        heapq.heappush(heap, (du + w, v))
        else:
            row = [min(self.dist(x, f) for f in self.frontier) for x in range(self.n)]
        self._frontier_dist = row
        return row

    def interior_points(self, R) -> list[PointId]:
        """Points at distance > R from every frontier point (all, if none)."""
        R = Fraction(R)
        fd = self.frontier_distances()
        if not self.frontier:
            return list(range(self.n))
        return [x for x in range(self.n) if fd[x] > R]

    def degree(self, x: PointId) -> Optional[int]:
        return len(self._adj[x]) if self._adj is not None else None

    def __repr__(self):
        return f"WindowSpace(n={self.n}, label={self.label!r})"


# -- growth profile --------------------------------------------------------


class GrowthProfile:
    """Max ball cardinalities per radius, measured over interior points only.

    Interior means "further than R from the frontier", so the window
    reports the ball bound of the infinite model it truncates. A radius
    with no interior points maps to None.
    """

    def __init__(self, values: dict):
        self.values = dict(values)

    def __getitem__(self, R):
        return self.values[Fraction(R)]

    def to_json(self):
        return {
            format_rational(R): v
            for R, v in sorted(self.values.items())
        }


def growth_profile(space: WindowSpace, radii) -> GrowthProfile:
    values = {}
    for R in radii:
        R = Fraction(R)
        if R < 0:
            raise ValueError(f"radius must be >= 0, got {R}")
        interior = space.interior_points(R)
        if not interior:
            values[R] = None
            continue
        values[R] = max(len(space.ball(x, R)) for x in interior)
    return GrowthProfile(values)


# -- generators ------------------------------------------------------------


def grid_window(dim: int, low: int, high: int) -> WindowSpace:
    """Integer-grid window [low..high]^dim with the L1 shortest-path metric.

    Frontier = points with some coordinate at low or high (their full
    neighbourhood in the infinite grid is truncated).
    """
    if dim <= 0:
        raise ValueError(f"grid dimension must be positive, got {dim}")
    if high < low:
        raise ValueError(f"empty coordinate range [{low}..{high}]")
    axis = range(low, high + 1)
    coords = list(itertools.product(axis, repeat=dim))
    index = {c: i for i, c in enumerate(coords)}
    n = len(coords)

    adjacency = [[] for _ in range(n)]
    for c, i in index.items():
        for k in range(dim):
            up = list(c)
            up[k] += 1
            j = index.get(tuple(up))
            if j is not None:
                adjacency[i].append((j, _ONE))
                adjacency[j].append((i, _ONE))

    frontier = [
        i for c, i in index.items() if any(v == low or v == high for v in c)
    ]

    def dist_fn(x, y, coords=coords):
        cx, cy = coords[x], coords[y]
        return Fraction(sum(abs(a - b) for a, b in zip(cx, cy)))

    return WindowSpace(
        n,
        frontier=frontier,
        label=f"grid{dim}d[{low}..{high}]",
        adjacency=adjacency,
        dist_fn=dist_fn,
        meta={
            "kind": "grid",
            "dim": dim,
            "low": low,
            "high": high,
            "coords": coords,
            "coord_index": index,
        },
    )


def cycle_window(length: int) -> WindowSpace:
    """Cycle of the given length; empty frontier (a bounded, untruncated space)."""
    if length <= 0:
        raise ValueError(f"cycle length must be positive, got {length}")
    n = length
    adjacency = [[] for _ in range(n)]
    if n == 2:
        adjacency[0].append((1, _ONE))
        adjacency[1].append((0, _ONE))
    elif n > 2:
        for i in range(n):
            j = (i + 1) % n
            adjacency[i].append((j, _ONE))
            adjacency[j].append((i, _ONE))

    def dist_fn(x, y, L=n):
        k = abs(x - y)
        return Fraction(min(k, L - k))

    return WindowSpace(
        n,
        frontier=(),
        label=f"cycle({length})",
        adjacency=adjacency,
        dist_fn=dist_fn,
        meta={"kind": "cycle", "length": length},
    )


def _tree_from_child_counts(child_count, depth, label, kind, params):
    """Rooted tree window built level by level; ids in breadth-first order.

    ``child_count(level)`` gives the number of children of every vertex at
    that level; vertices at ``depth`` are leaves and form the frontier.
    """
    parents = [None]
    depths = [0]
    level = [0]
    for d in range(depth):
        nxt = []
        c = child_count(d)
        for v in level:
            for _ in range(c):
                parents.append(v)
                depths.append(d + 1)
                nxt.append(len(parents) - 1)
        level = nxt
    n = len(parents)
    children = [[] for _ in range(n)]
    adjacency = [[] for _ in range(n)]
    for v in range(1, n):
        p = parents[v]
        children[p].append(v)
        adjacency[p].append((v, _ONE))
        adjacency[v].append((p, _ONE))
    frontier = [v for v in range(n) if depths[v] == depth]

    def dist_fn(x, y, parents=parents, depths=depths):
        steps = 0
        while x != y:
            if depths[x] < depths[y]:
                x, y = y, x
            x = parents[x]
            steps += 1
        return Fraction(steps)

    meta = {
        "kind": kind,
        "parents": parents,
        "depths": depths,
        "children": children,
        "depth": depth,
        **params,
    }
    return WindowSpace(
        n,
        frontier=frontier,
        label=label,
        adjacency=adjacency,
        dist_fn=dist_fn,
        meta=meta,
    )


def tree_window(branching: int, depth: int) -> WindowSpace:
    """Rooted tree where every interior vertex has exactly `branching` children."""
    if branching <= 0 or depth < 0:
        raise ValueError(f"need branching >= 1 and depth >= 0, got {branching}, {depth}")
    return _tree_from_child_counts(
        lambda d: branching,
        depth,
        f"tree(b={branching},depth={depth})",
        "tree",
        {"branching": branching},
    )


def regular_tree_window(degree: int, depth: int) -> WindowSpace:
    """Window of the infinite degree-regular tree: the root keeps all `degree`
    neighbours, every deeper interior vertex has degree-1 children."""
    if degree < 2 or depth < 0:
        raise ValueError(f"need degree >= 2 and depth >= 0, got {degree}, {depth}")
    return _tree_from_child_counts(
        lambda d: degree if d == 0 else degree - 1,
        depth,
        f"regular_tree(k={degree},depth={depth})",
        "regular_tree",
        {"degree": degree},
    )


def disjoint_union(parts: Sequence[WindowSpace], spacing) -> WindowSpace:
    """Coarse disjoint union with declared inter-part spacing.

    Cross distances follow the convention
        d((i,x),(j,y)) = spacing[max(i,j)] + d_i(x, base_i) + d_j(base_j, y)
    with base_k the lowest-id point of part k. The spacing sequence must be
    positive and nondecreasing; under that constraint the convention is a
    genuine metric (it is the shortest-path metric of the part graphs plus
    one base-to-base edge of weight spacing[max(i,j)] per part pair).
    """
    if not parts:
        raise ValueError("disjoint union of zero parts")
    spacing = [Fraction(s) for s in spacing]
    if len(spacing) != len(parts):
        raise ValueError("need one spacing entry per part")
    if any(s <= 0 for s in spacing):
        raise ValueError("spacing entries must be positive")
    if any(a > b for a, b in zip(spacing, spacing[1:])):
        raise ValueError("spacing must be nondecreasing")

    offsets = []
    total = 0
    for p in parts:
        offsets.append(total)
        total += p.n
    n = total
    part_of = []
    for i, p in enumerate(parts):
        part_of.extend([i] * p.n)

    adjacency = [[] for _ in range(n)]
    have_adj = all(p._adj is not None for p in parts)
    if have_adj:
        for i, p in enumerate(parts):
            off = offsets[i]
            for x in range(p.n):
                adjacency[off + x].extend((off + y, w) for y, w in p._adj[x])
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                w = spacing[j]
                adjacency[offsets[i]].append((offsets[j], w))
                adjacency[offsets[j]].append((offsets[i], w))

    def dist_fn(x, y):
        i, j = part_of[x], part_of[y]
        if i == j:
            return parts[i].dist(x - offsets[i], y - offsets[i])
        return (
            spacing[max(i, j)]
            + parts[i].dist(x - offsets[i], 0)
            + parts[j].dist(y - offsets[j], 0)
        )

    frontier = [
        offsets[i] + f for i, p in enumerate(parts) for f in sorted(p.frontier)
    ]
    label = "union(" + ", ".join(p.label for p in parts) + ")"
    meta = {
        "kind": "union",
        "offsets": offsets,
        "sizes": [p.n for p in parts],
        "spacing": spacing,
        "parts": list(parts),
        "part_of": part_of,
    }
    if have_adj:
        return WindowSpace(
            n, frontier=frontier, label=label, adjacency=adjacency,
            dist_fn=dist_fn, meta=meta,
        )
    # matrix fallback for parts without adjacency
    matrix = [[dist_fn(x, y) for y in range(n)] for x in range(n)]
    return WindowSpace(
        n, frontier=frontier, label=label, matrix=matrix, dist_fn=dist_fn,
        meta=meta,
    )


def product_with_interval(base: WindowSpace, levels: int) -> WindowSpace:
    """Product of a window with the interval {0..levels-1}, sum metric:
    d((z,i),(z',i')) = d(z,z') + |i-i'|. Point (z,i) gets id z*levels + i."""
    if levels <= 0:
        raise ValueError(f"need at least one level, got {levels}")
    n = base.n * levels

    adjacency = None
    if base._adj is not None:
        adjacency = [[] for _ in range(n)]
        for z in range(base.n):
            for i in range(levels):
                v = z * levels + i
                if i + 1 < levels:
                    adjacency[v].append((v + 1, _ONE))
                    adjacency[v + 1].append((v, _ONE))
                for z2, w in base._adj[z]:
                    adjacency[v].append((z2 * levels + i, w))

    def dist_fn(x, y, L=levels):
        zx, ix = divmod(x, L)
        zy, iy = divmod(y, L)
        return base.dist(zx, zy) + abs(ix - iy)

    frontier = [
        z * levels + i for z in sorted(base.frontier) for i in range(levels)
    ]
    meta = {
        "kind": "product_interval",
        "levels": levels,
        "base": base,
    }
    if adjacency is not None:
        return WindowSpace(
            n, frontier=frontier, label=f"{base.label} x [0..{levels - 1}]",
            adjacency=adjacency, dist_fn=dist_fn, meta=meta,
        )
    matrix = [[dist_fn(x, y) for y in range(n)] for x in range(n)]
    return WindowSpace(
        n, frontier=frontier, label=f"{base.label} x [0..{levels - 1}]",
        matrix=matrix, dist_fn=dist_fn, meta=meta,
    )


def generate(spec: dict) -> WindowSpace:
    """Build a window from a generator descriptor (see the file-format docs)."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("generator spec must be a dict with a 'kind' key")
    kind = spec["kind"]
    try:
        if kind == "grid":
            return grid_window(spec.get("dim", 1), spec["low"], spec["high"])
        if kind == "cycle":
            return cycle_window(spec["length"])
        if kind == "tree":
            return tree_window(spec["branching"], spec["depth"])
        if kind == "regular_tree":
            return regular_tree_window(spec["degree"], spec["depth"])
        if kind == "union":
            parts = [generate(s) for s in spec["parts"]]
            spacing = [parse_rational(s) for s in spec["spacing"]]
            return disjoint_union(parts, spacing)
        if kind == "product":
            return product_with_interval(generate(spec["base"]), spec["levels"])
    except KeyError as e:
        raise ConfigError(f"generator spec for {kind!r} is missing {e}") from e
    except ValueError as e:
        raise ConfigError(str(e)) from e
    raise ConfigError(f"unknown generator kind {kind!r}")


def _generator_spec(space: WindowSpace) -> Optional[dict]:
    """Reconstruct the descriptor of a generated space, or None."""
    m = space.meta
    kind = m.get("kind")
    if kind == "grid":
        return {"kind": "grid", "dim": m["dim"], "low": m["low"], "high": m["high"]}
    if kind == "cycle":
        return {"kind": "cycle", "length": m["length"]}
    if kind == "tree":
        return {"kind": "tree", "branching": m["branching"], "depth": m["depth"]}
    if kind == "regular_tree":
        return {"kind": "regular_tree", "degree": m["degree"], "depth": m["depth"]}
    if kind == "union":
        parts = [_generator_spec(p) for p in m["parts"]]
        if any(p is None for p in parts):
            return None
        return {
            "kind": "union",
            "parts": parts,
            "spacing": [format_rational(s) for s in m["spacing"]],
        }
    if kind == "product_interval":
        base = _generator_spec(m["base"])
        if base is None:
            return None
        return {"kind": "product", "base": base, "levels": m["levels"]}
    return None


# -- serialization ---------------------------------------------------------


def space_to_json(space: WindowSpace) -> dict:
    if space._matrix is not None:
        metric = {
            "type": "matrix",
            "entries": [
                [format_rational(v) for v in row] for row in space._matrix
            ],
        }
    else:
        edges = []
        for x in range(space.n):
            for y, w in space._adj[x]:
                if x < y:
                    edges.append([x, y, format_rational(w)])
        metric = {"type": "graph", "edges": edges}
    doc = {
        "points": space.n,
        "metric": metric,
        "frontier": sorted(space.frontier),
        "label": space.label,
    }
    gen = _generator_spec(space)
    if gen is not None:
        doc["generator"] = gen
    return doc


def space_from_json(doc: dict) -> WindowSpace:
    try:
        n = doc["points"]
        metric = doc["metric"]
        frontier = doc["frontier"]
        label = doc.get("label", "")
    except (KeyError, TypeError) as e:
        raise ConfigError(f"space file missing field: {e}") from e

    gen = doc.get("generator")
    if gen is not None:
        space = generate(gen)
        if space.n != n or space.frontier != frozenset(frontier):
            raise ConfigError(
                "space file is inconsistent: stored points/frontier do not "
                "match its generator descriptor"
            )
        return space

    if metric.get("type") == "matrix":
        entries = [[parse_rational(v) for v in row] for row in metric["entries"]]
        try:
            return WindowSpace(n, frontier=frontier, label=label, matrix=entries)
        except ValueError as e:
            raise ConfigError(str(e)) from e
    if metric.get("type") == "graph":
        adjacency = [[] for _ in range(n)]
        for x, y, w in metric["edges"]:
            w = parse_rational(w)
            adjacency[x].append((y, w))
            adjacency[y].append((x, w))
        try:
            return WindowSpace(n, frontier=frontier, label=label, adjacency=adjacency)
        except ValueError as e:
            raise ConfigError(str(e)) from e
    raise ConfigError(f"unknown metric type {metric.get('type')!r}")


def save_space(space: WindowSpace, path) -> None:
    dump_json(space_to_json(space), path)


def load_space(path) -> WindowSpace:
    return space_from_json(load_json(path))
