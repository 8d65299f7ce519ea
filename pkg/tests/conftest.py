"""Shared helpers: independent brute-force oracles the tests check the
library against, and small space builders.

The oracles deliberately avoid the library's own code paths: distances
come from a fresh BFS / Floyd-Warshall pass, multiset counts from
expanded element lists, and set arithmetic from plain Python sets.
"""

from __future__ import annotations

import random
from collections import deque
from fractions import Fraction

import numpy as np
import pytest

from folnerflow import Chain, WindowSpace
from folnerflow.rips import FlowField


# -- independent metric oracles ----------------------------------------------


def bfs_all_pairs(adjacency_sets, n):
    """Unit-weight all-pairs distances as an int numpy matrix (-1 = unreachable)."""
    D = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        D[s, s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for v in adjacency_sets[u]:
                if D[s, v] < 0:
                    D[s, v] = D[s, u] + 1
                    q.append(v)
    return D


def space_adjacency_sets(space: WindowSpace):
    assert space._adj is not None, "oracle needs an adjacency-backed space"
    return [set(v for v, _w in nbrs) for nbrs in space._adj], space.n


def dist_matrix(space: WindowSpace) -> np.ndarray:
    """Exact distances via the space API, as numpy int64 (requires an
    integer-valued metric)."""
    D = np.zeros((space.n, space.n), dtype=np.int64)
    for x in range(space.n):
        for y in range(space.n):
            d = space.dist(x, y)
            assert d.denominator == 1
            D[x, y] = d.numerator
    return D


def assert_metric_axioms(D: np.ndarray):
    """Exhaustive triangle/symmetry/positivity check on an int matrix."""
    n = D.shape[0]
    assert (np.diag(D) == 0).all()
    assert (D == D.T).all()
    off = D + np.eye(n, dtype=np.int64)
    assert (off > 0).all()
    for y in range(n):
        via = D[:, y][:, None] + D[y, :][None, :]
        assert (D <= via).all(), f"triangle inequality fails through {y}"


# -- multiset / set oracles ----------------------------------------------------


def chain_as_multiset(c: Chain) -> set:
    """Expand a chain to explicit (point, copy-number) elements."""
    return {(x, i) for x, v in c.items() for i in range(v)}


def multiset_sym_diff(a: Chain, b: Chain) -> int:
    total = 0
    for x in set(a) | set(b):
        total += abs(a[x] - b[x])
    return total


def multiset_meet_size(a: Chain, b: Chain) -> int:
    return sum(min(a[x], b[x]) for x in set(a) & set(b))


def set_ratio(A: set, B: set):
    inter = len(A & B)
    if inter == 0:
        return float("inf")
    return Fraction(len(A ^ B), inter)


# -- random generators ----------------------------------------------------------


def random_chain(rng: random.Random, points, max_norm: int) -> Chain:
    """Random positive chain with l1 norm in [1, max_norm]."""
    norm = rng.randint(1, max_norm)
    w = {}
    for _ in range(norm):
        x = rng.choice(points)
        w[x] = w.get(x, 0) + 1
    return Chain(w)


def random_tree_space(rng: random.Random, n: int, spine: int) -> WindowSpace:
    """Random unit tree on n vertices whose vertex 0 ends a path of length
    `spine` (so mass up to `spine` can always drain without hitting the
    sink); frontier = {0}."""
    assert n >= spine + 1
    parent = [None] * n
    for v in range(1, spine + 1):
        parent[v] = v - 1
    for v in range(spine + 1, n):
        parent[v] = rng.randrange(spine, v)  # attach beyond the spine
    adjacency = [[] for _ in range(n)]
    for v in range(1, n):
        adjacency[v].append((parent[v], Fraction(1)))
        adjacency[parent[v]].append((v, Fraction(1)))
    return WindowSpace(n, frontier=[0], label=f"random-tree({n})", adjacency=adjacency)


def handmade_flow(sigma: dict, sinks, r=1, n=None) -> FlowField:
    """FlowField built directly from a sigma map (for pinned examples)."""
    sinks = frozenset(sinks)
    depths = {s: 0 for s in sinks}
    for x in sigma:
        trail = []
        y = x
        while y not in depths:
            trail.append(y)
            y = sigma[y]
        base = depths[y]
        for i, t in enumerate(reversed(trail), start=1):
            depths[t] = base + i
    if n is None:
        n = len(sigma) + len(sinks)
    return FlowField(sigma=dict(sigma), sinks=sinks, r=Fraction(r), n=n, depths=depths)


@pytest.fixture
def rng():
    return random.Random(0xF01)
