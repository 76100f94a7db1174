"""Builders for the symplectic quasi-Phan geometry Gamma(V) and the point residue model Pi(p, H)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import IncidenceGeometry, bits, check_isomorphism
from .linalg import Subspace, contains, enumerate_subspaces, intersect, normalize
from .symplectic import SympSpace, perp, radical

GAMMA_FIELDS = (2, 3, 5)


@dataclass(frozen=True)
class GammaSpec:
    """Ambient data for Gamma(V): field size ``q``, dimension ``n``, radical dimension ``d``."""

    q: int
    n: int
    d: int | None = None

    def __post_init__(self):
        if self.d is None:
            object.__setattr__(self, "d", self.n % 2)
        if self.q not in GAMMA_FIELDS:
            raise ValueError(f"q must be one of {GAMMA_FIELDS}, got {self.q}")
        if not 2 <= self.n <= 8:
            raise ValueError(f"n must lie in 2..8, got {self.n}")
        if self.d != self.n % 2:
            raise ValueError("a maximal-rank alternating form has radical dimension n mod 2")

    def space(self) -> SympSpace:
        return SympSpace.standard(self.q, self.n)


class PointIndex:
    """Bitset encoding of subspaces by the projective points they contain."""

    def __init__(self, p: int, n: int):
        self.p, self.n = p, n
        self.index: dict = {}

    def point(self, v) -> int:
        key = normalize(v, self.p)
        i = self.index.get(key)
        if i is None:
            i = self.index[key] = len(self.index)
        return i

    def mask(self, u: Subspace) -> int:
        m = 0
        for v in u.points():
            m |= 1 << self.point(v)
        return m


def _containment_candidates(objs, pidx, row_members):
    """For each object, the bitset of objects containing all of its basis rows."""
    out = []
    full = (1 << len(objs)) - 1
    for u in objs:
        m = full
        for r in u.rows:
            m &= row_members.get(pidx.point(r), 0)
        out.append(m)
    return out


def _member_index(objs, pidx):
    members: dict[int, int] = {}
    masks = []
    for k, u in enumerate(objs):
        pm = pidx.mask(u)
        masks.append(pm)
        for i in bits(pm):
            members[i] = members.get(i, 0) | (1 << k)
    return members, masks


def gamma_objects(s: SympSpace) -> list[Subspace]:
    """Subspaces U with 1 <= dim U <= n-1, dim Rad(U) <= 1 and U meeting Rad(V) trivially."""
    rad_v = radical(s, s.full())
    out = []
    for k in range(1, s.n):
        level = []
        for u in enumerate_subspaces(s.n, k, s.p):
            if rad_v.dim and intersect(u, rad_v).dim:
                continue
            if radical(s, u).dim <= 1:
                level.append(u)
        level.sort(key=lambda u: u.key)
        out.extend(level)
    return out


def build_gamma(spec: GammaSpec, include_ambient: bool = False) -> IncidenceGeometry:
    """Gamma(V) over types 1..n-1: X < Y incident iff X <= Y and X meets Rad(Y) trivially.

    ``include_ambient`` adds V itself as a single object of type n (used only to
    talk about the degenerate n = 2 case, where the only line is V).
    """
    s = spec.space()
    objs = gamma_objects(s)
    if include_ambient:
        if s.rad_dim:
            raise ValueError("the ambient space is only an object when nondegenerate")
        objs.append(s.full())
    types = list(range(1, s.n + (1 if include_ambient else 0)))
    rads = [radical(s, u) for u in objs]
    return _assemble(s, objs, rads, lambda y: rads[y], types, f"Gamma(q={spec.q}, n={spec.n})")


def _assemble(s, objs, rads, forbidden, types, name):
    """Incidence: X (smaller) incident to Y iff X <= Y and X meets ``forbidden(Y)`` trivially."""
    pidx = PointIndex(s.p, s.n)
    members, masks = _member_index(objs, pidx)
    cand = _containment_candidates(objs, pidx, members)
    adj = [0] * len(objs)
    for x, u in enumerate(objs):
        for y in bits(cand[x]):
            if objs[y].dim <= u.dim:
                continue
            f = forbidden(y)
            if f.dim and masks[x] & pidx.mask(f):
                continue
            adj[x] |= 1 << y
            adj[y] |= 1 << x
    return IncidenceGeometry(types, [u.dim for u in objs], adj, objs, name)


@dataclass(frozen=True)
class PiSpec:
    """A point ``p`` of V outside Rad(V) and a complement ``H`` of ``p`` containing Rad(V).

    Defaults: ``p = <h_1>`` and ``H`` the span of all other standard basis vectors.
    """

    ambient: GammaSpec
    p: Subspace | None = None
    H: Subspace | None = None
    _space: SympSpace = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        s = self.ambient.space()
        object.__setattr__(self, "_space", s)
        n = s.n
        if self.p is None:
            object.__setattr__(self, "p", s.subspace([s.unit(0)]))
        if self.H is None:
            object.__setattr__(self, "H", _default_complement(self.p))
        rad_v = radical(s, s.full())
        if self.p.dim != 1 or contains(rad_v, self.p):
            raise ValueError("p must be a 1-space outside Rad(V)")
        if self.H.dim != n - 1 or intersect(self.H, self.p).dim:
            raise ValueError("H must be a complement of p")
        if not contains(self.H, rad_v):
            raise ValueError("H must contain Rad(V)")

    @property
    def space(self) -> SympSpace:
        return self._space


def _subspaces_within(h: Subspace, k: int):
    b = h.basis
    for c in enumerate_subspaces(h.dim, k, h.p):
        yield Subspace.span((c.basis @ b) % h.p, h.p, h.ambient_dim)


def pi_objects(spec: PiSpec, literal: bool = False) -> list[Subspace]:
    """Objects of Pi(p, H), i.e. the subspaces ``X cap H`` for X in the residue of ``p``.

    Besides the radical conditions, an even-dimensional nondegenerate U must not
    lie inside p-perp (otherwise <U, p> has radical p and is not incident to p).
    ``literal=True`` drops that extra condition, for comparison only.
    """
    s = spec.space
    p_perp = perp(s, spec.p)
    rad_v = radical(s, s.full())
    out = []
    for k in range(1, spec.H.dim):
        level = []
        for u in _subspaces_within(spec.H, k):
            if rad_v.dim and contains(u, rad_v):
                continue
            r = radical(s, u)
            if k % 2:
                ok = r.dim == 1 and not contains(p_perp, r)
            else:
                ok = r.dim == 0 or (r.dim == 2 and not contains(p_perp, r))
                if ok and r.dim == 0 and not literal:
                    ok = not contains(p_perp, u)
            if ok:
                level.append(u)
        level.sort(key=lambda u: u.key)
        out.extend(level)
    return out


def build_pi(spec: PiSpec, literal: bool = False) -> IncidenceGeometry:
    """Pi(p, H) over types 1..n-2.

    U < W incident iff U <= W, and when dim W is even also U meets
    Rad(W cap p-perp) trivially.
    """
    s = spec.space
    objs = pi_objects(spec, literal)
    p_perp = perp(s, spec.p)
    zero = Subspace.zero(s.p, s.n)
    forb = [radical(s, intersect(w, p_perp)) if w.dim % 2 == 0 else zero for w in objs]
    types = list(range(1, spec.H.dim))
    return _assemble(s, objs, None, lambda y: forb[y], types, f"Pi(q={spec.ambient.q}, n={spec.ambient.n})")


@dataclass
class PhiWitness:
    """Explicit bijection Res_Gamma(p) -> Pi(p, H), X -> X cap H, with its certificate."""

    residue: IncidenceGeometry
    pi: IncidenceGeometry
    mapping: list[int]
    certified: bool


def residue_iso_phi(gamma: IncidenceGeometry, point: int, spec: PiSpec | None = None) -> PhiWitness:
    """Map the residue of the Gamma point ``point`` onto Pi(p, H) and certify it.

    ``spec`` defaults to p = the point itself and H = the standard complement
    when that is a valid choice.
    """
    if gamma.obj_types[point] != 1:
        raise ValueError("residue_iso_phi needs a type-1 object")
    p_sub = gamma.payload[point]
    n = p_sub.ambient_dim
    if spec is None:
        spec = PiSpec(GammaSpec(p_sub.p, n), p=p_sub, H=_default_complement(p_sub))
    elif spec.p != p_sub:
        raise ValueError("spec.p differs from the chosen point")
    res = gamma.residue((point,))
    pi = build_pi(spec)
    where = {u: i for i, u in enumerate(pi.payload)}
    mapping = []
    for x in res.payload:
        img = where.get(intersect(x, spec.H))
        if img is None:
            return PhiWitness(res, pi, mapping, False)
        mapping.append(img)
    type_map = {t: t - 1 for t in res.types}
    ok = len(res) == len(pi) and check_isomorphism(res, pi, mapping, type_map)
    return PhiWitness(res, pi, mapping, ok)


def _default_complement(p_sub: Subspace) -> Subspace:
    """Complement of ``p`` spanned by unit vectors, always containing the last coordinate."""
    n, q = p_sub.ambient_dim, p_sub.p
    v = np.array(p_sub.rows[0])
    pivot = int(np.nonzero(v)[0][0])
    units = [tuple(int(i == j) for j in range(n)) for i in range(n) if i != pivot]
    return Subspace.span(units, q, n)
