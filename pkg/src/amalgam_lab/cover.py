"""The degree-two cover of Pi(p, H) for dim V = 6 over GF(2).

Cover points are the points q of V with <p, q> nondegenerate; q maps to
<p, q> cap H.  For a base point x of Pi we write x^- = x and x^+ = x + p.
Every object X of Pi gets two lifts X_+ and X_- built from a partition
X_0 | X_1 of its point-shadow:  X_+ = X_0^+ | X_1^-  and  X_- = X_0^- | X_1^+.

Object ``2 * x + s`` of the cover is the lift of Pi-object ``x`` with sign
``s`` (0 for minus, 1 for plus).  Points of Pi come first, so cover point
``2 * b + s`` is the lift of Pi point ``b``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from .builders import GammaSpec, PiSpec, build_pi
from .fpgroups import evaluate, todd_coxeter
from .geometry import IncidenceGeometry, bfs_distances, bits, check_isomorphism, find_isomorphism, shadow_graph
from .homotopy import pi1_presentation
from .linalg import intersect
from .symplectic import perp, radical

SIGN = {0: "-", 1: "+"}


def _vec(u) -> tuple:
    return tuple(int(x) for x in u.rows[0])


@dataclass
class CoverGeometry:
    pi: IncidenceGeometry
    spec: PiSpec
    geometry: IncidenceGeometry
    partitions: list            # per Pi object: (X0, X1) as sorted tuples of Pi point indices
    shadows: list               # per cover object: frozenset of cover point ids

    def base(self, x: int) -> int:
        return x // 2

    def sign(self, x: int) -> int:
        return x % 2

    def psi(self, x: int) -> int:
        return x // 2

    def fiber(self, y: int) -> tuple:
        return (2 * y, 2 * y + 1)

    def signs_annex(self) -> list:
        return [{"id": x, "base": x // 2, "sign": SIGN[x % 2]} for x in range(len(self.geometry))]

    def to_json(self) -> dict:
        return self.geometry.to_json(signs=self.signs_annex())


def exceptional_spec() -> PiSpec:
    return PiSpec(GammaSpec(2, 6))


def partition_object(spec: PiSpec, pi: IncidenceGeometry, x: int) -> tuple:
    """The partition X_0 | X_1 of the point-shadow of Pi-object ``x``."""
    s = spec.space
    point_index = {_vec(pi.payload[b]): b for b in pi.objects_of_type(1)}
    shadow = sorted(bits(pi.adj[x] & pi.type_mask[1])) if pi.obj_types[x] != 1 else [x]
    t = pi.obj_types[x]
    X = pi.payload[x]
    vec = {b: np.array(_vec(pi.payload[b])) for b in shadow}
    if t == 1:
        return (x,), ()
    if t == 2:
        a, b = shadow
        if s.form(vec[a], vec[b]):
            return (a, b), ()
        return (a,), (b,)
    if t == 3:
        r = point_index[_vec(radical(s, X))]
        return (r,), tuple(b for b in shadow if b != r)
    if t == 4:
        p_perp = perp(s, spec.p)
        r = np.array(_vec(radical(s, intersect(X, p_perp))))
        pairs = {}
        for b in shadow:
            other = point_index[tuple(int(c) for c in (vec[b] + r) % 2)]
            pairs[min(b, other)] = (min(b, other), max(b, other))
        lines = sorted(pairs.values())
        if radical(s, X).dim == 0:
            p1 = shadow[0]
            x0, x1 = [p1], []
            for L in lines:
                if p1 in L:
                    x1.append(L[0] if L[1] == p1 else L[1])
                    continue
                perp_pts = [b for b in L if s.form(vec[b], vec[p1]) == 0]
                if len(perp_pts) != 1:
                    raise AssertionError("expected exactly one point of L_i perpendicular to p_1")
                x1.append(perp_pts[0])
                x0.append(L[0] if L[1] == perp_pts[0] else L[1])
            return tuple(sorted(x0)), tuple(sorted(x1))
        R = radical(s, X)
        x0 = [b for b in shadow if R.contains_vector(vec[b])]
        return tuple(sorted(x0)), tuple(b for b in shadow if b not in x0)
    raise ValueError(f"unexpected type {t}")


def signed_shadow(part, sign: int) -> frozenset:
    x0, x1 = part
    return frozenset([2 * b + sign for b in x0] + [2 * b + 1 - sign for b in x1])


def build_cover(spec: PiSpec | None = None) -> CoverGeometry:
    """Lift every Pi object twice; lifts are incident when their shadows are nested and their images are."""
    spec = spec or exceptional_spec()
    if spec.ambient.q != 2 or spec.ambient.n != 6:
        raise ValueError("the double cover is defined for dim V = 6 over GF(2) only")
    pi = build_pi(spec)
    parts = [partition_object(spec, pi, x) for x in range(len(pi))]
    shadows = []
    for x in range(len(pi)):
        shadows.append(signed_shadow(parts[x], 0))
        shadows.append(signed_shadow(parts[x], 1))
    n = 2 * len(pi)
    adj = [0] * n
    for x in range(len(pi)):
        for y in bits(pi.adj[x] >> (x + 1) << (x + 1)):
            for a in (2 * x, 2 * x + 1):
                for b in (2 * y, 2 * y + 1):
                    if shadows[a] <= shadows[b] or shadows[b] <= shadows[a]:
                        adj[a] |= 1 << b
                        adj[b] |= 1 << a
    payload = [pi.payload[x // 2] for x in range(n)]
    types = [pi.obj_types[x // 2] for x in range(n)]
    geom = IncidenceGeometry(pi.types, types, adj, payload, "Pi-bar(q=2, n=6)")
    return CoverGeometry(pi, spec, geom, parts, shadows)


# -- verification ------------------------------------------------------------

@dataclass
class CoverReport:
    fibers_ok: bool
    partitions_agree: bool
    incidence_characterized: bool
    co1: bool
    co2: bool
    co2_search: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.fibers_ok and self.partitions_agree and self.incidence_characterized
                and self.co1 and self.co2 and self.co2_search)

    def to_json(self) -> dict:
        return {"fibers": self.fibers_ok, "partitions_agree": self.partitions_agree,
                "incidence_characterized": self.incidence_characterized, "CO1": self.co1, "CO2": self.co2,
                "CO2_search": self.co2_search, "failures": self.failures[:20], "ok": self.ok}


def _check_fibers(cv: CoverGeometry, fails) -> bool:
    """The two lifts of X split the full preimage of X's shadow."""
    pi = cv.pi
    for x in range(len(pi)):
        shadow = [x] if pi.obj_types[x] == 1 else list(bits(pi.adj[x] & pi.type_mask[1]))
        full = {2 * b + e for b in shadow for e in (0, 1)}
        a, b = cv.shadows[2 * x], cv.shadows[2 * x + 1]
        if a & b or a | b != full or len(a) != len(shadow):
            fails.append(("fiber", x))
            return False
    return True


def _check_partitions(cv: CoverGeometry, fails) -> bool:
    """Lifts of Pi-incident objects are nested or disjoint."""
    pi = cv.pi
    for x in range(len(pi)):
        for y in bits(pi.adj[x] >> (x + 1) << (x + 1)):
            for a in (2 * x, 2 * x + 1):
                for b in (2 * y, 2 * y + 1):
                    A, B = cv.shadows[a], cv.shadows[b]
                    if not (A <= B or B <= A or not (A & B)):
                        fails.append(("partition", a, b))
                        return False
    return True


def _check_characterization(cv: CoverGeometry, fails) -> bool:
    """Incident iff images incident and shadows meet."""
    g, pi = cv.geometry, cv.pi
    for a in range(len(g)):
        for b in range(a + 1, len(g)):
            want = pi.incident(a // 2, b // 2) and bool(cv.shadows[a] & cv.shadows[b])
            if want != g.incident(a, b):
                fails.append(("incidence", a, b))
                return False
    return True


def check_co1(cv: CoverGeometry, fails=None) -> bool:
    """Every nonempty flag of Pi has exactly two preimage flags, and they are disjoint."""
    fails = [] if fails is None else fails
    g = cv.geometry
    for flag in cv.pi.iter_flags():
        if not flag:
            continue
        lifts = [c for c in itertools.product(*[(2 * y, 2 * y + 1) for y in flag]) if g.is_flag(c)]
        if len(lifts) != 2 or set(lifts[0]) & set(lifts[1]):
            fails.append(("CO1", flag))
            return False
    return True


def check_co2(cv: CoverGeometry, fails=None) -> bool:
    """For every nonempty cover flag, Psi restricted to its residue is an isomorphism onto the image residue."""
    fails = [] if fails is None else fails
    g, pi = cv.geometry, cv.pi
    for flag in g.iter_flags():
        if not flag:
            continue
        res = g.residue(flag)
        img = pi.residue(tuple(x // 2 for x in flag))
        where = {y: i for i, y in enumerate(img.parent)}
        try:
            iso = [where[x // 2] for x in res.parent]
        except KeyError:
            fails.append(("CO2", flag))
            return False
        if not check_isomorphism(res, img, iso):
            fails.append(("CO2", flag))
            return False
    return True


def check_co2_by_search(cv: CoverGeometry, fails=None) -> bool:
    """Independent route: an isomorphism between point residues exists (backtracking search)."""
    fails = [] if fails is None else fails
    g, pi = cv.geometry, cv.pi
    for x in g.objects_of_type(1):
        if find_isomorphism(g.residue((x,)), pi.residue((x // 2,))) is None:
            fails.append(("CO2-search", x))
            return False
    return True


def verify_2cover(cv: CoverGeometry) -> CoverReport:
    fails: list = []
    return CoverReport(_check_fibers(cv, fails), _check_partitions(cv, fails), _check_characterization(cv, fails),
                       check_co1(cv, fails), check_co2(cv, fails), check_co2_by_search(cv, fails), fails)


@dataclass
class DistanceReport:
    """Collinearity distances between cover points.

    ``max_distinct_base`` ranges over pairs lying over different base points;
    ``fiber_distances`` holds d(q^+, q^-) for every base point q.  No point is
    collinear with both lifts of the same base point (the residue of such a
    point would hold both lifts of one line), so every fiber pair is at
    distance at least 3, not only the lifts of Rad(H).
    """

    q_plus_minus: float
    max_distinct_base: float
    fiber_distances: dict           # base point -> d(q^+, q^-)
    rad_h: int

    @property
    def max_other(self) -> float:
        """Largest distance over all pairs except the two lifts of Rad(H)."""
        others = [d for b, d in self.fiber_distances.items() if b != self.rad_h]
        return max([self.max_distinct_base] + others)

    @property
    def ok(self) -> bool:
        """Rad(H) lifts at distance 3, every pair over distinct base points within 2."""
        return self.q_plus_minus == 3 and self.max_distinct_base <= 2

    @property
    def all_other_pairs_within_two(self) -> bool:
        return self.max_other <= 2

    def to_json(self) -> dict:
        return {"d(Q+,Q-)": self.q_plus_minus, "max_distinct_base": self.max_distinct_base,
                "max_other": self.max_other, "fiber_distances": sorted(set(self.fiber_distances.values())),
                "rad_H": self.rad_h, "ok": self.ok}


def cover_distances(cv: CoverGeometry) -> DistanceReport:
    """Collinearity distances in the cover."""
    g, pi, s = cv.geometry, cv.pi, cv.spec.space
    pts, adj = shadow_graph(g, 1, 2)
    local = {x: i for i, x in enumerate(pts)}
    dist = [bfs_distances(adj, i) for i in range(len(pts))]
    Q = radical(s, cv.spec.H)
    rad_h = next(b for b in pi.objects_of_type(1) if pi.payload[b] == Q)
    max_distinct = 0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if pts[i] // 2 != pts[j] // 2:
                max_distinct = max(max_distinct, dist[i][j])
    fib = {b: dist[local[2 * b]][local[2 * b + 1]] for b in pi.objects_of_type(1)}
    return DistanceReport(fib[rad_h], max_distinct, fib, rad_h)


# -- path lifting and the deck transformation -----------------------------

def lift_path(cv: CoverGeometry, path, start: int) -> list:
    """Unique lift of a path of Pi objects starting at the cover object ``start`` over ``path[0]``."""
    if start // 2 != path[0]:
        raise ValueError("start does not lie over the first object of the path")
    g = cv.geometry
    out = [start]
    for y in path[1:]:
        if not cv.pi.incident(out[-1] // 2, y):
            raise ValueError("path steps must be incidences")
        cand = [c for c in (2 * y, 2 * y + 1) if g.incident(out[-1], c)]
        if len(cand) != 1:
            raise AssertionError(f"path lift is not unique at {y}: {cand}")
        out.append(cand[0])
    return out


def random_closed_walk(g: IncidenceGeometry, start: int, length: int, rng: random.Random) -> list:
    path = [start]
    for _ in range(length):
        path.append(rng.choice(list(bits(g.adj[path[-1]]))))
    back = tree_path(g, path[-1], start)
    return path + back[1:]


def tree_path(g: IncidenceGeometry, a: int, b: int) -> list:
    """A shortest path from ``a`` to ``b`` in the incidence graph."""
    prev = {a: None}
    frontier = [a]
    while b not in prev:
        nxt = []
        for u in frontier:
            for v in bits(g.adj[u]):
                if v not in prev:
                    prev[v] = u
                    nxt.append(v)
        if not nxt:
            raise ValueError("objects lie in different components")
        frontier = nxt
    out = [b]
    while out[-1] != a:
        out.append(prev[out[-1]])
    return out[::-1]


@dataclass
class DeckReport:
    pi1_order: int
    generator_loop: list
    swaps_at: dict            # base object -> True if the lifted generator loop swaps the fiber
    random_agreement: int     # random loops whose lift closes iff their class is trivial
    random_total: int
    null_fixed: bool

    @property
    def ok(self) -> bool:
        return (self.pi1_order == 2 and all(self.swaps_at.values()) and self.null_fixed
                and self.random_agreement == self.random_total)

    def to_json(self) -> dict:
        return {"pi1_order": self.pi1_order, "swaps_at": {str(k): v for k, v in self.swaps_at.items()},
                "random_agreement": f"{self.random_agreement}/{self.random_total}",
                "null_fixed": self.null_fixed, "ok": self.ok}


def deck_regularity(cv: CoverGeometry, bases=None, samples: int = 100, seed: int = 0) -> DeckReport:
    """The nontrivial class of pi_1(Pi) swaps every fiber; random loops close iff their class is trivial."""
    pi = cv.pi
    pp = pi1_presentation(pi)
    table = todd_coxeter(pp.presentation, (), 100_000)
    if not table.complete:
        raise RuntimeError("coset enumeration for pi_1 did not complete")
    perms = table.permutations()

    def klass(word):
        img = evaluate(word, perms, lambda a, b: [b[i] for i in a], lambda a: [a.index(i) for i in range(len(a))],
                       list(range(table.index)))
        return img[0]

    # a loop in the nontrivial class: tree path to u, the edge u -> v, tree path back
    loop = None
    for (u, v), k in sorted(pp.edge_gen.items(), key=lambda kv: kv[1]):
        if perms[k - 1][0] != 0:
            loop = _tree_walk(pp.parent, pp.base, u) + _tree_walk(pp.parent, pp.base, v)[::-1]
            break
    if loop is None:
        raise AssertionError("no generator acts nontrivially")
    rng = random.Random(seed)
    if bases is None:
        bases = range(len(pi))
    swaps = {}
    for b in bases:
        to_b = tree_path(pi, pp.base, b)
        conj = to_b[::-1] + loop[1:] + to_b[1:]
        lifted = lift_path(cv, conj, 2 * b)
        swaps[b] = lifted[-1] == 2 * b + 1 and klass(pp.path_word(conj)) != 0
    agree = 0
    for _ in range(samples):
        start = rng.randrange(len(pi))
        walk = random_closed_walk(pi, start, rng.randrange(2, 12), rng)
        closes = lift_path(cv, walk, 2 * start)[-1] == 2 * start
        rebased = tree_path(pi, pp.base, start)
        word = pp.path_word(rebased + walk[1:] + rebased[::-1][1:])
        if closes == (klass(word) == 0):
            agree += 1
    # a null-homotopic loop: around a triangle of the incidence graph
    x = 0
    y = next(iter(bits(pi.adj[x])))
    z = next(iter(bits(pi.adj[x] & pi.adj[y])))
    null_fixed = lift_path(cv, [x, y, z, x], 2 * x)[-1] == 2 * x
    return DeckReport(table.index, loop, swaps, agree, samples, null_fixed)


def _tree_walk(parent, base, v) -> list:
    out = [v]
    while out[-1] != base:
        out.append(parent[out[-1]])
    return out[::-1]
