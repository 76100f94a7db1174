"""Buekenhout pre-geometries: flags, residues, shadows and the standard predicates.

Objects are indexed densely ``0..N-1``.  Incidence is stored as one Python int
per object used as a bitset of its incident objects (the object itself is not
included).  Flags are tuples of object indices.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

from .linalg import Subspace

GEOM_SCHEMA = "geom/1"


def bits(mask: int):
    """Indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class IncidenceGeometry:
    """Typed objects with a symmetric incidence relation.

    Parameters
    ----------
    types : sequence
        The type set in its (string) order.
    obj_types : sequence
        Type of each object.
    adj : sequence of int
        Bitset of incident objects for each object.
    payload : sequence, optional
        Per-object data, e.g. the :class:`Subspace` an object stands for.
    """

    def __init__(self, types, obj_types, adj, payload=None, name=""):
        self.types = tuple(types)
        self.obj_types = list(obj_types)
        self.adj = [int(a) for a in adj]
        self.payload = list(payload) if payload is not None else None
        self.name = name
        self.parent = None
        if len(self.adj) != len(self.obj_types):
            raise ValueError("adjacency and type lists differ in length")
        pos = {t: i for i, t in enumerate(self.types)}
        self.type_pos = pos
        self.type_mask = {t: 0 for t in self.types}
        for i, t in enumerate(self.obj_types):
            if t not in pos:
                raise ValueError(f"object {i} has unknown type {t!r}")
            self.type_mask[t] |= 1 << i
        for i, a in enumerate(self.adj):
            if a >> i & 1:
                raise ValueError("adjacency rows must not contain the object itself")
            if a & self.type_mask[self.obj_types[i]]:
                raise ValueError(f"object {i} is incident to an object of its own type")

    def __len__(self):
        return len(self.obj_types)

    def __repr__(self):
        counts = ", ".join(str(popcount(self.type_mask[t])) for t in self.types)
        return f"IncidenceGeometry({self.name or 'unnamed'}; types={self.types}; counts=({counts}))"

    @property
    def all_mask(self) -> int:
        return (1 << len(self)) - 1

    @property
    def rank(self) -> int:
        return sum(1 for t in self.types if self.type_mask[t])

    def type_counts(self) -> tuple[int, ...]:
        return tuple(popcount(self.type_mask[t]) for t in self.types)

    def objects_of_type(self, t) -> list[int]:
        return list(bits(self.type_mask[t]))

    def incident(self, i: int, j: int) -> bool:
        return i == j or bool(self.adj[i] >> j & 1)

    def num_incidences(self) -> int:
        return sum(popcount(a) for a in self.adj) // 2

    def is_flag(self, objs) -> bool:
        objs = list(objs)
        if len({self.obj_types[x] for x in objs}) != len(objs):
            return False
        return all(self.adj[a] >> b & 1 for k, a in enumerate(objs) for b in objs[k + 1:])

    def flag_type(self, objs) -> frozenset:
        return frozenset(self.obj_types[x] for x in objs)

    def residue_mask(self, flag) -> int:
        m = self.all_mask
        for x in flag:
            m &= self.adj[x]
        return m

    def induced(self, mask: int, types=None, name="") -> "IncidenceGeometry":
        """Sub-geometry on the objects of ``mask``; ``parent`` maps back to our indices."""
        idx = list(bits(mask))
        local = {g: i for i, g in enumerate(idx)}
        adj = []
        for g in idx:
            row = 0
            for h in bits(self.adj[g] & mask):
                row |= 1 << local[h]
            adj.append(row)
        if types is None:
            present = {self.obj_types[g] for g in idx}
            types = [t for t in self.types if t in present]
        payload = [self.payload[g] for g in idx] if self.payload is not None else None
        sub = IncidenceGeometry(types, [self.obj_types[g] for g in idx], adj, payload, name)
        sub.parent = idx
        return sub

    def residue(self, flag) -> "IncidenceGeometry":
        flag = tuple(flag)
        if not self.is_flag(flag):
            raise ValueError(f"{flag} is not a flag")
        used = self.flag_type(flag)
        cotype = [t for t in self.types if t not in used]
        return self.induced(self.residue_mask(flag), cotype, name=f"Res({flag})")

    def iter_flags(self, types=None):
        """Yield every flag whose type is exactly ``types`` (default: every flag, empty included).

        Objects in a yielded flag are ordered by type.
        """
        if types is not None:
            order = sorted(types, key=self.type_pos.__getitem__)
            yield from self._flags_of_type(order, 0, (), self.all_mask)
            return
        stack = [((), self.all_mask, -1)]
        while stack:
            flag, res, last = stack.pop()
            yield flag
            for k in range(len(self.types) - 1, last, -1):
                for x in reversed(list(bits(res & self.type_mask[self.types[k]]))):
                    stack.append((flag + (x,), res & self.adj[x], k))

    def _flags_of_type(self, order, k, flag, res):
        if k == len(order):
            yield flag
            return
        for x in bits(res & self.type_mask[order[k]]):
            yield from self._flags_of_type(order, k + 1, flag + (x,), res & self.adj[x])

    def count_flags(self, types) -> int:
        order = sorted(types, key=self.type_pos.__getitem__)
        if not order:
            return 1

        def rec(k, res):
            cand = res & self.type_mask[order[k]]
            if k == len(order) - 1:
                return popcount(cand)
            return sum(rec(k + 1, res & self.adj[x]) for x in bits(cand))

        return rec(0, self.all_mask)

    def chambers(self):
        return self.iter_flags(self.types)

    def connected(self, mask: int | None = None) -> bool:
        """Connectivity of the incidence graph induced on ``mask`` (default: everything)."""
        if mask is None:
            mask = self.all_mask
        if not mask:
            return True
        start = mask & -mask
        seen = start
        frontier = start
        adj = self.adj
        while frontier:
            nxt = 0
            for i in bits(frontier):
                nxt |= adj[i]
            nxt &= mask & ~seen
            seen |= nxt
            frontier = nxt
        return seen == mask

    def to_json(self, signs=None) -> dict:
        objects = []
        for i, t in enumerate(self.obj_types):
            entry = {"id": i, "type": t}
            pl = self.payload[i] if self.payload is not None else None
            if isinstance(pl, Subspace):
                entry["basis_rows"] = [list(r) for r in pl.rows]
            elif pl is not None:
                entry["basis_rows"] = pl_rows(pl)
            objects.append(entry)
        edges = [[i, j] for i, a in enumerate(self.adj) for j in bits(a >> (i + 1) << (i + 1))]
        out = {"schema": GEOM_SCHEMA, "types": list(self.types), "objects": objects, "edges": edges}
        if signs is not None:
            out["signs"] = signs
        return out

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json(**kw), sort_keys=True)

    @classmethod
    def from_json(cls, data) -> "IncidenceGeometry":
        if isinstance(data, str):
            data = json.loads(data)
        if data.get("schema") != GEOM_SCHEMA:
            raise ValueError(f"unknown geometry schema {data.get('schema')!r}")
        objs = sorted(data["objects"], key=lambda o: o["id"])
        adj = [0] * len(objs)
        for i, j in data["edges"]:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        payload = [o.get("basis_rows") for o in objs]
        return cls(data["types"], [o["type"] for o in objs], adj, payload)


def pl_rows(pl):
    """Best-effort JSON rendering of a non-subspace payload."""
    if isinstance(pl, (list, tuple)):
        return [list(x) if isinstance(x, (list, tuple)) else x for x in pl]
    return pl


def disjoint_union(g1: IncidenceGeometry, g2: IncidenceGeometry) -> IncidenceGeometry:
    n1 = len(g1)
    adj = list(g1.adj) + [a << n1 for a in g2.adj]
    types = list(g1.types) + [t for t in g2.types if t not in g1.types]
    return IncidenceGeometry(types, g1.obj_types + g2.obj_types, adj)


def direct_sum(g1: IncidenceGeometry, g2: IncidenceGeometry) -> IncidenceGeometry:
    """Geometry over the disjoint union of type sets; objects of different factors are incident."""
    if set(g1.types) & set(g2.types):
        raise ValueError("factors must have disjoint type sets")
    n1, n2 = len(g1), len(g2)
    m1, m2 = (1 << n1) - 1, ((1 << n2) - 1) << n1
    adj = [a | m2 for a in g1.adj] + [(a << n1) | m1 for a in g2.adj]
    return IncidenceGeometry(list(g1.types) + list(g2.types), g1.obj_types + g2.obj_types, adj)


def is_transversal(g: IncidenceGeometry) -> bool:
    """Every flag lies in a chamber.

    Equivalent to: every flag with empty residue is a chamber.  Flags are
    enumerated exhaustively in type order.
    """
    full = len(g.types)
    for t in g.types:
        if not g.type_mask[t]:
            return False
    stack = [(0, g.all_mask, -1)]
    while stack:
        size, res, last = stack.pop()
        if not res and size != full:
            return False
        for k in range(last + 1, full):
            for x in bits(res & g.type_mask[g.types[k]]):
                stack.append((size + 1, res & g.adj[x], k))
    return True


def is_residually_connected(g: IncidenceGeometry) -> bool:
    """Every residue of rank at least 2 (the geometry itself included) is connected."""
    full = len(g.types)
    stack = [(0, g.all_mask, -1)]
    while stack:
        size, res, last = stack.pop()
        if full - size < 2:
            continue
        if not g.connected(res):
            return False
        for k in range(last + 1, full):
            for x in bits(res & g.type_mask[g.types[k]]):
                stack.append((size + 1, res & g.adj[x], k))
    return True


def has_string_diagram(g: IncidenceGeometry) -> bool:
    """For types i < j < k: X (type i) and Z (type k) both incident to Y (type j) forces X inc Z."""
    ts = g.types
    for jpos in range(1, len(ts) - 1):
        lower = 0
        for t in ts[:jpos]:
            lower |= g.type_mask[t]
        upper = 0
        for t in ts[jpos + 1:]:
            upper |= g.type_mask[t]
        for y in bits(g.type_mask[ts[jpos]]):
            nz = g.adj[y] & upper
            for x in bits(g.adj[y] & lower):
                if nz & ~g.adj[x]:
                    return False
    return True


def shadow_graph(g: IncidenceGeometry, point_type, line_type) -> tuple[list[int], list[int]]:
    """Collinearity graph on objects of ``point_type``.

    Returns ``(points, adj)`` where ``points`` are geometry indices and ``adj``
    holds bitsets over positions in ``points``.
    """
    if not g.type_mask.get(point_type) or not g.type_mask.get(line_type):
        raise ValueError("both types must be present")
    points = g.objects_of_type(point_type)
    local = {x: i for i, x in enumerate(points)}
    adj = [0] * len(points)
    pmask = g.type_mask[point_type]
    for line in bits(g.type_mask[line_type]):
        on = [local[x] for x in bits(g.adj[line] & pmask)]
        m = 0
        for i in on:
            m |= 1 << i
        for i in on:
            adj[i] |= m & ~(1 << i)
    return points, adj


def bfs_distances(adj: list[int], source: int) -> list[float]:
    dist = [math.inf] * len(adj)
    dist[source] = 0
    seen = 1 << source
    frontier = 1 << source
    d = 0
    while frontier:
        d += 1
        nxt = 0
        for i in bits(frontier):
            nxt |= adj[i]
        nxt &= ~seen
        for i in bits(nxt):
            dist[i] = d
        seen |= nxt
        frontier = nxt
    return dist


def diameter(adj: list[int]) -> float:
    """Graph diameter by BFS from every vertex; ``math.inf`` when disconnected."""
    best = 0
    for s in range(len(adj)):
        d = max(bfs_distances(adj, s), default=0)
        if d == math.inf:
            return math.inf
        best = max(best, d)
    return best


def _signature(g: IncidenceGeometry, i: int) -> tuple:
    return (g.type_pos[g.obj_types[i]],) + tuple(popcount(g.adj[i] & g.type_mask[t]) for t in g.types)


def find_isomorphism(g1: IncidenceGeometry, g2: IncidenceGeometry, type_map=None) -> list[int] | None:
    """Exact type-preserving isomorphism search by backtracking.

    ``type_map`` sends types of ``g1`` to types of ``g2``; by default types are
    matched by their position in the type order.  Returns ``iso`` with
    ``iso[i]`` the image of object ``i``, or ``None``.
    """
    if type_map is None:
        if len(g1.types) != len(g2.types):
            return None
        type_map = dict(zip(g1.types, g2.types))
    if len(g1) != len(g2):
        return None
    n = len(g1)
    if n == 0:
        return []
    sig1 = [(type_map[g1.obj_types[i]],) + _signature(g1, i)[1:] for i in range(n)]
    sig2 = [(g2.obj_types[i],) + tuple(popcount(g2.adj[i] & g2.type_mask[type_map[t]]) for t in g1.types)
            for i in range(n)]
    if sorted(map(repr, sig1)) != sorted(map(repr, sig2)):
        return None
    by_sig: dict = {}
    for j in range(n):
        by_sig.setdefault(sig2[j], []).append(j)

    # order g1's objects so each new one is adjacent to something already placed
    order = []
    placed = 0
    remaining = set(range(n))
    while remaining:
        start = min(remaining, key=lambda i: (len(by_sig[sig1[i]]), -popcount(g1.adj[i])))
        queue = deque([start])
        placed |= 1 << start
        remaining.discard(start)
        while queue:
            x = queue.popleft()
            order.append(x)
            nbrs = sorted(bits(g1.adj[x] & ~placed), key=lambda i: len(by_sig[sig1[i]]))
            for y in nbrs:
                placed |= 1 << y
                remaining.discard(y)
                queue.append(y)

    iso = [-1] * n
    used = [False] * n

    def consistent(x, y):
        a1, a2 = g1.adj[x], g2.adj[y]
        for k in range(depth_index[x]):
            u = order[k]
            if (a1 >> u & 1) != (a2 >> iso[u] & 1):
                return False
        return True

    depth_index = {x: k for k, x in enumerate(order)}

    def rec(k):
        if k == n:
            return True
        x = order[k]
        prev = [order[j] for j in range(k) if g1.adj[x] >> order[j] & 1]
        if prev:
            cand_mask = g2.all_mask
            for u in prev:
                cand_mask &= g2.adj[iso[u]]
            cands = [y for y in bits(cand_mask) if sig2[y] == sig1[x]]
        else:
            cands = by_sig[sig1[x]]
        for y in cands:
            if used[y] or not consistent(x, y):
                continue
            iso[x] = y
            used[y] = True
            if rec(k + 1):
                return True
            used[y] = False
            iso[x] = -1
        return False

    import sys

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * n + 100))
    try:
        found = rec(0)
    finally:
        sys.setrecursionlimit(limit)
    return list(iso) if found else None


def check_isomorphism(g1: IncidenceGeometry, g2: IncidenceGeometry, iso, type_map=None) -> bool:
    """Verify that ``iso`` is a bijection preserving type (via ``type_map``) and incidence both ways."""
    if len(iso) != len(g1) or sorted(iso) != list(range(len(g2))):
        return False
    if type_map is None:
        type_map = dict(zip(g1.types, g2.types))
    for i, j in enumerate(iso):
        if type_map[g1.obj_types[i]] != g2.obj_types[j]:
            return False
    for i in range(len(g1)):
        img = 0
        for k in bits(g1.adj[i]):
            img |= 1 << iso[k]
        if img != g2.adj[iso[i]]:
            return False
    return True


@dataclass
class GeometryReport:
    """Outcome of the standard predicate suite on one geometry."""

    name: str
    type_counts: tuple
    transversal: bool
    string_diagram: bool
    residually_connected: bool
    point_diameter: float

    def ok(self, expected_diameter=None) -> bool:
        good = self.transversal and self.string_diagram and self.residually_connected
        if expected_diameter is not None:
            good = good and self.point_diameter == expected_diameter
        return good


def check_geometry(g: IncidenceGeometry) -> GeometryReport:
    diam = math.nan
    if len(g.types) >= 2:
        _, adj = shadow_graph(g, g.types[0], g.types[1])
        diam = diameter(adj)
    return GeometryReport(g.name, g.type_counts(), is_transversal(g), has_string_diagram(g),
                          is_residually_connected(g), diam)
