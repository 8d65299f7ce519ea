"""Worked constructions: boundaries and Folner witnesses, translate
families on group windows, transfer of families along coarse maps, and
box spaces of cyclic quotients.

Everything here is exact and deterministic. Searches that fail on a
finite window return None rather than claiming a negative: failure to
find a Folner set at one window size proves nothing about the infinite
model.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .chains import Chain, FamilyParams, IndexedFamily, ratio
from .errors import EmptyImage, TranslateEscapesWindow, WindowTooSmall
from .jsonio import format_rational, format_ratio
from .space import (
    PointId,
    WindowSpace,
    cycle_window,
    disjoint_union,
    product_with_interval,
)

_ZERO = Fraction(0)


# -- boundaries and Folner sets ---------------------------------------------


def boundary(space: WindowSpace, U, R) -> frozenset:
    """R-boundary: points outside U within distance R of U."""
    U = frozenset(U)
    for x in U:
        space._check_point(x)
    R = Fraction(R)
    out = set()
    for u in U:
        out.update(space.ball(u, R))
    return frozenset(out - U)


def foelner_search(space: WindowSpace, R, epsilon, *, max_radius=None):
    """Greedy ball-growing search for U with |boundary_R(U)| <= epsilon*|U|.

    Candidate sets are balls grown around each centre in id order; a
    witness must be *fully interior*, meaning every point of U is at
    distance > R from the frontier, so the measured boundary is the whole
    boundary of the infinite model. Returns the first witness found, or
    None when the window admits none at this size (which is not evidence
    of non-amenability).
    """
    R = Fraction(R)
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    frontier_dist = space.frontier_distances()

    def interior_ok(points):
        if not space.frontier:
            return True
        return all(frontier_dist[u] > R for u in points)

    if max_radius is None:
        max_radius = space.n  # balls stop growing once they swallow the window
    for center in range(space.n):
        if space.frontier and not (frontier_dist[center] > R):
            continue
        rho = 0
        while rho <= max_radius:
            U = space.ball(center, rho)
            if not interior_ok(U):
                break
            b = boundary(space, U, R)
            if len(b) <= epsilon * len(U):
                return frozenset(U)
            if len(U) == space.n:
                break
            rho += 1
    return None


# -- translate families on group windows -------------------------------------


def _grid_coords(space: WindowSpace):
    if space.meta.get("kind") != "grid":
        raise ValueError("translate families need a grid window (group structure)")
    return space.meta["coords"], space.meta["coord_index"]


def _as_vector(f, dim):
    if isinstance(f, int):
        f = (f,)
    f = tuple(f)
    if len(f) != dim:
        raise ValueError(f"translate vector {f} has wrong dimension (need {dim})")
    return f


def group_foelner_family(
    space: WindowSpace, F, R, epsilon, core=None
) -> IndexedFamily:
    """Family of translates A_x = x + F on a grid window.

    F is a set of integer vectors (plain ints in dimension one). The index
    core defaults to every x whose translate stays inside the window;
    passing an explicit core that escapes, or having no valid index at
    all, raises TranslateEscapesWindow. S is the largest distance from the
    origin to F.
    """
    coords, index = _grid_coords(space)
    dim = len(coords[0])
    F = [_as_vector(f, dim) for f in F]
    if not F:
        raise ValueError("translate set F is empty")
    S = max(Fraction(sum(abs(v) for v in f)) for f in F)

    def translate(x):
        cx = coords[x]
        pts = []
        for f in F:
            target = tuple(a + b for a, b in zip(cx, f))
            pid = index.get(target)
            if pid is None:
                return None
            pts.append(pid)
        return pts

    if core is None:
        chains = {}
        for x in range(space.n):
            pts = translate(x)
            if pts is not None:
                chains[x] = Chain.from_set(pts)
        if not chains:
            raise TranslateEscapesWindow(
                None, "no translate of F fits inside the window"
            )
    else:
        chains = {}
        for x in core:
            pts = translate(x)
            if pts is None:
                raise TranslateEscapesWindow(x)
            chains[x] = Chain.from_set(pts)

    params = FamilyParams(R=R, epsilon=epsilon, S=S, M=0)
    return IndexedFamily(space=space, chains=chains, params=params)


# -- transfer along coarse maps ----------------------------------------------


def _eval_table(table, t):
    """Step-function lookup: value at the largest tabulated distance <= t."""
    best = None
    for d, v in table:
        if d <= t:
            best = v
        else:
            break
    if best is None:
        raise ValueError(f"modulus table does not cover distance {t}")
    return best


def check_moduli(X: WindowSpace, f: dict, Y: WindowSpace, rho_minus, rho_plus):
    """Verify rho_-(d(x,x')) <= d(f x, f x') <= rho_+(d(x,x')) on all pairs.

    Tables are sorted (distance, bound) pairs read as step functions.
    Returns the list of violating pairs (empty when the moduli hold).
    """
    rho_minus = sorted((Fraction(d), Fraction(v)) for d, v in rho_minus)
    rho_plus = sorted((Fraction(d), Fraction(v)) for d, v in rho_plus)
    bad = []
    pts = sorted(f)
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            d = X.dist(x, y)
            dy = Y.dist(f[x], f[y])
            if not (_eval_table(rho_minus, d) <= dy <= _eval_table(rho_plus, d)):
                bad.append((x, y, d, dy))
    return bad


def pushforward_injective(
    fam: IndexedFamily, f: dict, target: WindowSpace, target_R=None
) -> IndexedFamily:
    """Push a family along an injective map into a denser target window.

    Every target point y borrows the family member of the domain point
    whose image is nearest to y (ties to the smallest image id), and takes
    its image: B_y = f(A_{x(y)}). The support radius of the result is
    measured exactly rather than estimated.
    """
    if not f:
        raise EmptyImage("the map has no points")
    values = list(f.values())
    if len(set(values)) != len(values):
        raise ValueError("map is not injective")
    image = {}
    for x in sorted(fam.chains):
        if x not in f:
            raise ValueError(f"map is undefined on family index {x}")
        image[f[x]] = x

    image_ids = sorted(image)
    chains = {}
    max_radius = _ZERO
    for y in range(target.n):
        best = min(image_ids, key=lambda w: (target.dist(y, w), w))
        x = image[best]
        pushed = Chain({f[z]: v for z, v in fam.chains[x].items()})
        chains[y] = pushed
        radius = max(target.dist(y, w) for w in pushed.support())
        if radius > max_radius:
            max_radius = radius

    params = FamilyParams(
        R=fam.params.R if target_R is None else Fraction(target_R),
        epsilon=fam.params.epsilon,
        S=max_radius,
        M=fam.params.M,
    )
    return IndexedFamily(space=target, chains=chains, params=params)


@dataclass
class CoarseMapModel:
    """A coarse equivalence f between two windows, normalized for transfer.

    Holds the section g of f (per image point, its smallest preimage),
    the sub-window Z = g(f(X)), the displacement bound S over
    d(x, g(f(x))), the S-ball cardinality bound M, and the injection
    iota: X -> Z x {0..M-1} sending x to (g(f(x)), k) where k numbers the
    points sharing that image in id order. Moduli tables bound the metric
    distortion of f both ways.
    """

    X: WindowSpace
    Y: WindowSpace
    f: dict  # PointId(X) -> PointId(Y)
    g: dict  # PointId(Y, image only) -> PointId(X)
    Z: list  # sorted PointIds of X forming g(f(X))
    S: Fraction
    M: int
    iota: dict  # PointId(X) -> (PointId(X) in Z, level)
    rho_minus: list
    rho_plus: list

    @classmethod
    def build(cls, X: WindowSpace, Y: WindowSpace, f: dict, rho_minus, rho_plus):
        if set(f) != set(range(X.n)):
            raise ValueError("f must be defined on every point of the domain")
        bad = check_moduli(X, f, Y, rho_minus, rho_plus)
        if bad:
            x, y, d, dy = bad[0]
            raise ValueError(
                f"moduli violated at pair ({x},{y}): d={d}, image distance={dy}"
            )
        g = {}
        for x in sorted(f, reverse=True):  # smallest preimage wins
            g[f[x]] = x
        gf = {x: g[f[x]] for x in range(X.n)}
        Z = sorted(set(gf.values()))
        S = max(X.dist(x, gf[x]) for x in range(X.n))
        M = max(len(X.ball(x, S)) for x in range(X.n))
        buckets = {}
        iota = {}
        for x in range(X.n):  # id order fixes the level assignment
            k = buckets.get(gf[x], 0)
            buckets[gf[x]] = k + 1
            iota[x] = (gf[x], k)
        if any(c > M for c in buckets.values()):
            raise ValueError("ball bound M too small for iota (metric inconsistency)")
        return cls(
            X=X, Y=Y, f=dict(f), g=g, Z=Z, S=S, M=M, iota=iota,
            rho_minus=sorted((Fraction(d), Fraction(v)) for d, v in rho_minus),
            rho_plus=sorted((Fraction(d), Fraction(v)) for d, v in rho_plus),
        )

    def product_injection(self):
        """The injection realized into an actual product window: builds
        Z x {0..M-1} (Z re-indexed densely) and returns (product space,
        map X -> product ids, map Z old-id -> new-id)."""
        z_index = {z: i for i, z in enumerate(self.Z)}
        sub = subspace(self.X, self.Z)
        prod = product_with_interval(sub, self.M)
        mapping = {
            x: z_index[z] * self.M + k for x, (z, k) in self.iota.items()
        }
        return prod, mapping, z_index


def subspace(space: WindowSpace, points) -> WindowSpace:
    """Metric restriction to a subset, re-indexed densely in id order."""
    points = sorted(set(points))
    for x in points:
        space._check_point(x)
    matrix = [[space.dist(x, y) for y in points] for x in points]
    frontier = [i for i, x in enumerate(points) if x in space.frontier]
    return WindowSpace(
        len(points),
        frontier=frontier,
        label=f"{space.label}|{len(points)}pts",
        matrix=matrix,
        meta={"kind": "subspace", "points": points},
    )


def project_family(product_space: WindowSpace, fam: IndexedFamily, levels=None) -> IndexedFamily:
    """Collapse a family on Z x {0..M-1} to one on Z.

    The projected member at z keeps the base points whose column meets
    A_(z,0): losing the level coordinate cannot grow the symmetric
    difference, and shrinks the intersection by a factor of at most M, so
    a family with ratios < epsilon/M projects to one with ratios <
    epsilon. Output epsilon is scaled accordingly.
    """
    meta = product_space.meta
    if meta.get("kind") != "product_interval":
        raise ValueError("project_family needs a product-with-interval window")
    M = meta["levels"] if levels is None else levels
    base = meta["base"]

    chains = {}
    for pid in sorted(fam.chains):
        z, i = divmod(pid, M)
        if i != 0:
            continue
        cols = {w for (w, _lvl) in
                ((divmod(q, M)) for q in fam.chains[pid].support())}
        chains[z] = Chain.from_set(cols)
    if not chains:
        raise ValueError("family has no index at level 0 to project")
    params = FamilyParams(
        R=fam.params.R,
        epsilon=fam.params.epsilon * M,
        S=fam.params.S,
        M=0,
    )
    return IndexedFamily(space=base, chains=chains, params=params)


# -- box spaces ---------------------------------------------------------------


@dataclass
class BoxSpaceModel:
    """Coarse union of the cyclic quotients of the integers by m^j.

    Box j (1-based) is a cycle of length m^j; the quotient map pi_j sends
    an integer g to the global id of (g mod m^j). Spacing between boxes is
    a strictly increasing schedule, so only finitely many box pairs sit
    within any fixed range of each other.
    """

    m: int
    boxes: int
    spacing: tuple
    space: WindowSpace
    offsets: tuple
    sizes: tuple

    def size(self, j: int) -> int:
        return self.sizes[j - 1]

    def pi(self, j: int, g: int) -> PointId:
        """Global id of the image of the integer g in box j."""
        return self.offsets[j - 1] + (g % self.sizes[j - 1])

    def box_of(self, pid: PointId) -> int:
        j = 0
        while j < self.boxes and pid >= self.offsets[j]:
            j += 1
        return j

    def box_points(self, j: int) -> range:
        return range(self.offsets[j - 1], self.offsets[j - 1] + self.sizes[j - 1])


def build_box_space(m: int, boxes: int, spacing=None) -> BoxSpaceModel:
    """Assemble the box-space window for quotient sizes m, m^2, ..., m^boxes."""
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    if boxes < 1:
        raise ValueError(f"need at least one box, got {boxes}")
    sizes = [m ** j for j in range(1, boxes + 1)]
    if spacing is None:
        spacing = [Fraction(s) for s in sizes]
    else:
        spacing = [Fraction(s) for s in spacing]
        if len(spacing) != boxes:
            raise ValueError("need one spacing entry per box")
        if any(a >= b for a, b in zip(spacing, spacing[1:])):
            raise ValueError("spacing schedule must be strictly increasing")
    parts = [cycle_window(s) for s in sizes]
    space = disjoint_union(parts, spacing)
    offsets = space.meta["offsets"]
    return BoxSpaceModel(
        m=m, boxes=boxes, spacing=tuple(spacing), space=space,
        offsets=tuple(offsets), sizes=tuple(sizes),
    )


@dataclass
class BoxFamilyReport:
    S: Fraction
    J: int
    injectivity_threshold: int  # least cycle length for faithful translate counting
    pairs_checked: int
    equalities_hold: bool
    equality_failures: list  # [(j, gbar, hbar)]
    worst_ratio: object
    worst_model_ratio: object  # worst |gF /\ hF| ratio in the integers

    def to_json(self):
        return {
            "S": format_rational(self.S),
            "J": self.J,
            "injectivity_threshold": self.injectivity_threshold,
            "pairs_checked": self.pairs_checked,
            "equalities_hold": self.equalities_hold,
            "equality_failures": [list(t) for t in self.equality_failures],
            "worst_ratio": None if self.worst_ratio is None
            else format_ratio(self.worst_ratio),
            "worst_model_ratio": None if self.worst_model_ratio is None
            else format_ratio(self.worst_model_ratio),
        }


def box_family(model: BoxSpaceModel, F, R, epsilon) -> tuple[IndexedFamily, BoxFamilyReport]:
    """Translate family on a box space from a Folner set F of the integers.

    Boxes deep enough that their cycle reproduces integer translate
    counting (length >= 2(R+2S)+1, with S = max(diam F, d(0,F))) get
    A_gbar = gbar + pi_j(F); the finitely many shallow boxes j <= J share
    the catch-all set of all their points. The report verifies, pair by
    pair, that deep-box symmetric differences and intersections equal
    their integer counterparts exactly.
    """
    F = sorted(set(int(f) for f in F))
    if not F:
        raise ValueError("Folner set F is empty")
    R = Fraction(R)
    epsilon = Fraction(epsilon)
    Fset = set(F)

    # Folner precondition for F in the integers, checked exactly
    worst_model = None
    r_int = int(R)
    for delta in range(0, r_int + 1):
        shifted = {f + delta for f in F}
        sym = len(Fset ^ shifted)
        inter = len(Fset & shifted)
        q = Fraction(sym, inter) if inter else None
        if q is None or not (q < epsilon):
            raise ValueError(
                f"F is not a Folner set at range {R}, epsilon {epsilon}: "
                f"shift {delta} gives ratio {q if q is not None else 'infinity'}"
            )
        if worst_model is None or q > worst_model:
            worst_model = q

    diam = Fraction(F[-1] - F[0])
    dist_to_zero = Fraction(min(abs(f) for f in F))
    S = max(diam, dist_to_zero)

    threshold = 2 * (int(R) + 2 * int(S)) + 1 if (R.denominator == 1 and S.denominator == 1) else None
    if threshold is None:
        # rational R or S: use the exact ceiling of 2(R+2S)+1
        need = 2 * (R + 2 * S) + 1
        threshold = -(-need.numerator // need.denominator)
    j_iso = 1
    while model.m ** j_iso < threshold:
        j_iso += 1
    J = j_iso - 1
    # boxes within range R of another box must all lie in the catch-all zone
    for j in range(1, model.boxes + 1):
        if model.spacing[j - 1] <= R:
            J = max(J, j)
    if model.boxes <= J:
        raise WindowTooSmall(
            f"need more than J={J} boxes to host translate families; got {model.boxes}"
        )

    catchall = [
        p for j in range(1, J + 1) for p in model.box_points(j)
    ]
    chains = {}
    for j in range(1, J + 1):
        cat_chain = Chain.from_set(catchall)
        for p in model.box_points(j):
            chains[p] = cat_chain
    for j in range(J + 1, model.boxes + 1):
        size = model.size(j)
        off = model.offsets[j - 1]
        for g in range(size):
            chains[off + g] = Chain.from_set(
                off + ((g + f) % size) for f in F
            )

    # exact equalities against the integer model, all in-range deep pairs
    pairs_checked = 0
    failures = []
    worst = Fraction(0) if chains else None
    for j in range(J + 1, model.boxes + 1):
        size = model.size(j)
        off = model.offsets[j - 1]
        for g in range(size):
            for delta in range(1, r_int + 1):
                h = (g + delta) % size
                A = chains[off + g].support()
                B = chains[off + h].support()
                shifted = {f + delta for f in F}
                ok = (
                    len(A ^ B) == len(Fset ^ shifted)
                    and len(A & B) == len(Fset & shifted)
                )
                pairs_checked += 1
                if not ok:
                    failures.append((j, g, h))
                q = ratio(chains[off + g], chains[off + h])
                if worst is None or q > worst:
                    worst = q

    max_radius = _ZERO
    for x, c in chains.items():
        radius = max(model.space.dist(x, z) for z in c.support())
        if radius > max_radius:
            max_radius = radius
    params = FamilyParams(R=R, epsilon=epsilon, S=max_radius, M=0)
    fam = IndexedFamily(space=model.space, chains=chains, params=params)

    report = BoxFamilyReport(
        S=S,
        J=J,
        injectivity_threshold=threshold,
        pairs_checked=pairs_checked,
        equalities_hold=not failures,
        equality_failures=failures,
        worst_ratio=worst,
        worst_model_ratio=worst_model,
    )
    return fam, report
