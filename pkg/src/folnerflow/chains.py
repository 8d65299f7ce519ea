"""Sparse positive integer 0-chains and indexed families over a window.

A chain assigns a positive integer weight to finitely many points (a
multiset of points); the algebra here is the pointwise lattice: meet,
join, truncated difference, l1 norm. A family {a_x} attaches one chain to
each index point, together with the parameters (R, epsilon, S, M) it
claims to satisfy:

  * for indices x, y at distance <= R, the symmetric-difference-to-
    intersection ratio ||a_x - a_y||_1 / ||a_x ^ a_y||_1 is < epsilon;
  * every chain is supported within distance S of its index;
  * weights count multiset levels 0..M (M = 0 means a plain set family).

All ratio comparisons are exact: values are Fractions, and a pair whose
meet vanishes gets the distinguished INFINITE_RATIO, which fails every
epsilon test.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError
from .jsonio import dump_json, format_rational, format_ratio, load_json, parse_rational
from .space import WindowSpace

#: distinguished ratio for pairs with empty intersection; fails every
#: epsilon comparison exactly (inf < eps is false for all finite eps).
INFINITE_RATIO = math.inf


class Chain(Mapping):
    """Immutable sparse map point -> positive integer; absent means 0."""

    __slots__ = ("_w", "_l1")

    def __init__(self, weights=None):
        w = {}
        if weights:
            for x, v in dict(weights).items():
                if not isinstance(v, int):
                    raise ValueError(f"chain weight at {x} must be an int, got {v!r}")
                if v < 0:
                    raise ValueError(f"chain weight at {x} is negative: {v}")
                if v > 0:
                    w[x] = v
        self._w = w
        self._l1 = sum(w.values())

    @classmethod
    def from_set(cls, points) -> "Chain":
        """Characteristic chain (0,1-valued) of a point set."""
        return cls({x: 1 for x in points})

    # Mapping interface: iteration runs over the support only, but lookup
    # of any point returns its weight, defaulting to 0.
    def __getitem__(self, x) -> int:
        return self._w.get(x, 0)

    def __iter__(self):
        return iter(self._w)

    def __len__(self):
        return len(self._w)

    def __contains__(self, x):
        return x in self._w

    def __eq__(self, other):
        if isinstance(other, Chain):
            return self._w == other._w
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._w.items()))

    def __bool__(self):
        return bool(self._w)

    def __repr__(self):
        inner = ", ".join(f"{x}: {v}" for x, v in sorted(self._w.items()))
        return "Chain({" + inner + "})"

    def l1(self) -> int:
        return self._l1

    def support(self) -> frozenset:
        return frozenset(self._w)

    def is_flat(self) -> bool:
        """True when 0,1-valued."""
        return all(v == 1 for v in self._w.values())

    def __le__(self, other: "Chain") -> bool:
        """Pointwise comparison."""
        return all(v <= other[x] for x, v in self._w.items())

    def meet(self, other: "Chain") -> "Chain":
        """Pointwise minimum."""
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        return Chain({x: min(v, big[x]) for x, v in small.items() if x in big})

    def join(self, other: "Chain") -> "Chain":
        """Pointwise maximum."""
        out = dict(self._w)
        for x, v in other.items():
            if v > out.get(x, 0):
                out[x] = v
        return Chain(out)

    def setminus(self, other: "Chain") -> "Chain":
        """Truncated difference: self - (self ^ other), never negative."""
        return Chain({x: v - other[x] for x, v in self._w.items() if v > other[x]})

    def scale(self, k: int) -> "Chain":
        if k < 0:
            raise ValueError("scale factor must be >= 0")
        return Chain({x: k * v for x, v in self._w.items()})

    def add(self, other: "Chain") -> "Chain":
        out = dict(self._w)
        for x, v in other.items():
            out[x] = out.get(x, 0) + v
        return Chain(out)


def l1_distance(a: Chain, b: Chain) -> int:
    """Sum of |a(x) - b(x)| over all points."""
    total = 0
    for x, v in a.items():
        total += abs(v - b[x])
    for x, v in b.items():
        if x not in a:
            total += v
    return total


def ratio(a: Chain, b: Chain):
    """||a-b||_1 / ||a^b||_1 as an exact Fraction; INFINITE_RATIO when the
    meet is empty. For 0,1-valued chains this is |A(+)B| / |A&B|."""
    den = a.meet(b).l1()
    if den == 0:
        return INFINITE_RATIO
    return Fraction(l1_distance(a, b), den)


def base_and_towers(a: Chain) -> tuple[Chain, Chain]:
    """Split a = base + towers: base is the 0,1 indicator of the support,
    towers carry the excess mass above height one."""
    base = Chain({x: 1 for x in a})
    towers = Chain({x: v - 1 for x, v in a.items() if v > 1})
    return base, towers


# -- families ---------------------------------------------------------------


@dataclass(frozen=True)
class FamilyParams:
    """Claimed parameters of an indexed family."""

    R: Fraction
    epsilon: Fraction
    S: Fraction
    M: int = 0

    def __post_init__(self):
        object.__setattr__(self, "R", Fraction(self.R))
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        object.__setattr__(self, "S", Fraction(self.S))
        if self.R < 0 or self.S < 0:
            raise ValueError("R and S must be >= 0")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.M < 0:
            raise ValueError("M must be >= 0")

    def to_json(self):
        return {
            "R": format_rational(self.R),
            "epsilon": format_rational(self.epsilon),
            "S": format_rational(self.S),
            "M": self.M,
        }

    @classmethod
    def from_json(cls, doc):
        try:
            return cls(
                R=parse_rational(doc["R"]),
                epsilon=parse_rational(doc["epsilon"]),
                S=parse_rational(doc["S"]),
                M=doc.get("M", 0),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"bad family params: {e}") from e


@dataclass
class IndexedFamily:
    """One chain per index point of a window.

    The index set may be a subset of the window (a core), e.g. when
    translates near the window edge would escape. A family whose chains
    are all 0,1-valued represents plain subsets A_x = supp a_x.
    """

    space: WindowSpace
    chains: dict  # PointId -> Chain
    params: FamilyParams

    def __post_init__(self):
        for x, c in self.chains.items():
            if not c:
                raise ValueError(f"family chain at index {x} is empty")

    def indices(self) -> list:
        return sorted(self.chains)

    def is_flat(self) -> bool:
        return all(c.is_flat() for c in self.chains.values())


@dataclass(frozen=True)
class MultisetFamily:
    """Family of finite subsets of (window) x {0..M}: the weighted input
    normal form, one set of (point, level) pairs per index."""

    sets: dict  # PointId -> frozenset[(PointId, int)]
    M: int
    params: FamilyParams

    def __post_init__(self):
        for x, s in self.sets.items():
            if not s:
                raise ValueError(f"multiset family entry at {x} is empty")
            for (_, n) in s:
                if not (0 <= n <= self.M):
                    raise ValueError(
                        f"entry at {x} has level {n} outside 0..{self.M}"
                    )


def family_from_multisets(space: WindowSpace, sets, params: FamilyParams) -> IndexedFamily:
    """Collapse levels: a_x(z) = number of (z, n) pairs in A_x.

    By construction ||a_x - a_y||_1 <= |A_x (+) A_y| and
    ||a_x ^ a_y||_1 >= |A_x & A_y| (each column of the level diagram
    contributes at least its overlap to the meet and at most its
    symmetric difference to the l1 distance).
    """
    chains = {}
    for x, s in sets.items():
        if not s:
            raise ValueError(f"empty set for index {x}")
        w = {}
        for (z, _n) in s:
            w[z] = w.get(z, 0) + 1
        chains[x] = Chain(w)
    return IndexedFamily(space=space, chains=chains, params=params)


# -- verification ------------------------------------------------------------


@dataclass
class FamilyReport:
    """Outcome of checking a family against its claimed parameters."""

    passed: bool
    pair_count: int
    worst_ratio: object  # Fraction | INFINITE_RATIO | None if no pairs
    worst_pair: object  # (x, y) | None
    max_support_radius: Fraction
    ratio_violations: list  # [(x, y, ratio)]
    support_violations: list  # [(x, measured_radius)]
    flat_violations: list  # [x]

    def to_json(self):
        return {
            "passed": self.passed,
            "pairs_checked": self.pair_count,
            "worst_ratio": None if self.worst_ratio is None else format_ratio(self.worst_ratio),
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "max_support_radius": format_rational(self.max_support_radius),
            "ratio_violations": [
                [x, y, format_ratio(q)] for x, y, q in self.ratio_violations
            ],
            "support_violations": [
                [x, format_rational(d)] for x, d in self.support_violations
            ],
            "flat_violations": list(self.flat_violations),
        }


def in_range_pairs(space: WindowSpace, indices, R):
    """Ordered pairs (x, y), x < y, of indices at distance <= R."""
    index_set = set(indices)
    R = Fraction(R)
    for x in sorted(index_set):
        for y in sorted(space.ball(x, R)):
            if y > x and y in index_set:
                yield x, y


def verify_family(fam: IndexedFamily, require_flat: bool = False) -> FamilyReport:
    """Exact check of the ratio condition at range R, the support-radius
    bound S, and (optionally) 0,1-valuedness. Violations are report
    entries, never exceptions; iteration order is fixed by point id so the
    report is deterministic."""
    space, params = fam.space, fam.params
    worst = None
    worst_pair = None
    pair_count = 0
    ratio_violations = []
    for x, y in in_range_pairs(space, fam.chains, params.R):
        q = ratio(fam.chains[x], fam.chains[y])
        pair_count += 1
        if worst is None or q > worst:
            worst, worst_pair = q, (x, y)
        if not (q < params.epsilon):
            ratio_violations.append((x, y, q))

    max_radius = Fraction(0)
    support_violations = []
    for x in fam.indices():
        radius = max(space.dist(x, z) for z in fam.chains[x].support())
        if radius > max_radius:
            max_radius = radius
        if radius > params.S:
            support_violations.append((x, radius))

    flat_violations = []
    if require_flat:
        flat_violations = [x for x in fam.indices() if not fam.chains[x].is_flat()]

    return FamilyReport(
        passed=not (ratio_violations or support_violations or flat_violations),
        pair_count=pair_count,
        worst_ratio=worst,
        worst_pair=worst_pair,
        max_support_radius=max_radius,
        ratio_violations=ratio_violations,
        support_violations=support_violations,
        flat_violations=flat_violations,
    )


# -- serialization ----------------------------------------------------------


def chain_to_json(c: Chain) -> dict:
    return {"weights": sorted([x, v] for x, v in c.items())}


def chain_from_json(doc) -> Chain:
    try:
        return Chain({x: v for x, v in doc["weights"]})
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad chain: {e}") from e


def family_to_json(fam: IndexedFamily) -> dict:
    return {
        "params": fam.params.to_json(),
        "chains": [[x, chain_to_json(fam.chains[x])] for x in fam.indices()],
    }


def family_from_json(doc, space: WindowSpace) -> IndexedFamily:
    try:
        params = FamilyParams.from_json(doc["params"])
        chains = {x: chain_from_json(c) for x, c in doc["chains"]}
    except (KeyError, TypeError) as e:
        raise ConfigError(f"bad family file: {e}") from e
    try:
        return IndexedFamily(space=space, chains=chains, params=params)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def multiset_family_to_json(fam: MultisetFamily) -> dict:
    return {
        "params": fam.params.to_json(),
        "M": fam.M,
        "sets": [
            [x, sorted([z, n] for z, n in fam.sets[x])]
            for x in sorted(fam.sets)
        ],
    }


def multiset_family_from_json(doc) -> MultisetFamily:
    try:
        params = FamilyParams.from_json(doc["params"])
        M = doc["M"]
        sets = {
            x: frozenset((z, n) for z, n in pairs) for x, pairs in doc["sets"]
        }
        return MultisetFamily(sets=sets, M=M, params=params)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad multiset family file: {e}") from e


def save_family(fam, path) -> None:
    doc = multiset_family_to_json(fam) if isinstance(fam, MultisetFamily) else family_to_json(fam)
    dump_json(doc, path)


def load_family(path, space: WindowSpace = None):
    """Load an indexed family (needs the space) or a multiset family
    (dispatches on whether the file stores "chains" or "sets")."""
    doc = load_json(path)
    if "sets" in doc:
        return multiset_family_from_json(doc)
    if space is None:
        raise ConfigError("loading an indexed family requires its window space")
    return family_from_json(doc, space)
