"""Fundamental groups of incidence geometries.

Closed paths in the incidence graph modulo insertion or removal of 2- and
3-cycles.  With a spanning tree collapsed, the group is generated by the
non-tree edges subject to one relator per 3-element flag.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

from .fpgroups import (AbelianInvariants, Presentation, abelianization, cyclic_reduce, todd_coxeter,
                       tietze_simplify)
from .geometry import IncidenceGeometry, bits

TRIVIAL = "trivial"
NONTRIVIAL = "nontrivial"
INCONCLUSIVE = "inconclusive"


@dataclass
class Pi1Presentation:
    """Presentation of pi_1(g, base) with its spanning tree and edge labelling.

    ``edge_gen[(u, v)]`` (u < v) is the generator of a non-tree edge, oriented
    from ``u`` to ``v``.
    """

    base: int
    parent: list
    edge_gen: dict
    presentation: Presentation
    triangles: int

    def edge_letter(self, u: int, v: int) -> int:
        """Signed generator for traversing u -> v, 0 on tree edges."""
        if u < v:
            return self.edge_gen.get((u, v), 0)
        g = self.edge_gen.get((v, u), 0)
        return -g

    def path_word(self, path) -> tuple:
        """Word of a closed path given as a list of objects."""
        out = []
        for a, b in zip(path, path[1:]):
            l = self.edge_letter(a, b)
            if l:
                out.append(l)
        return cyclic_reduce(tuple(out))


def spanning_tree(g: IncidenceGeometry, base: int) -> list[int]:
    """BFS parents (``-1`` at the base) visiting neighbours in index order."""
    parent = [-2] * len(g)
    parent[base] = -1
    queue = deque([base])
    seen = 1 << base
    while queue:
        u = queue.popleft()
        new = g.adj[u] & ~seen
        seen |= new
        for v in bits(new):
            parent[v] = u
            queue.append(v)
    if any(p == -2 for p in parent):
        raise ValueError("geometry is not connected")
    return parent


def triangles(g: IncidenceGeometry):
    """All 3-element flags (u < v < w), found by intersecting neighbour bitsets along each edge."""
    for u in range(len(g)):
        higher_u = g.adj[u] >> (u + 1) << (u + 1)
        for v in bits(higher_u):
            common = g.adj[u] & g.adj[v]
            common = common >> (v + 1) << (v + 1)
            for w in bits(common):
                yield u, v, w


def pi1_presentation(g: IncidenceGeometry, base: int = 0) -> Pi1Presentation:
    if len(g) == 0:
        raise ValueError("empty geometry")
    parent = spanning_tree(g, base)
    tree = {(min(v, p), max(v, p)) for v, p in enumerate(parent) if p >= 0}
    edge_gen: dict = {}
    for u in range(len(g)):
        for v in bits(g.adj[u] >> (u + 1) << (u + 1)):
            if (u, v) not in tree:
                edge_gen[(u, v)] = len(edge_gen) + 1

    def letter(a, b):
        if a < b:
            return edge_gen.get((a, b), 0)
        return -edge_gen.get((b, a), 0)

    rels = []
    count = 0
    for u, v, w in triangles(g):
        count += 1
        r = tuple(l for l in (letter(u, v), letter(v, w), letter(w, u)) if l)
        if r:
            rels.append(r)
    return Pi1Presentation(base, parent, edge_gen, Presentation(len(edge_gen), tuple(rels)), count)


@dataclass
class Pi1Verdict:
    status: str
    order: int | None
    abelian: AbelianInvariants | None
    simplified: Presentation
    cosets_used: int = 0
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "order": self.order,
            "abelian_torsion": list(self.abelian.torsion) if self.abelian else None,
            "abelian_free_rank": self.abelian.free_rank if self.abelian else None,
            "simplified_gens": self.simplified.ngens,
            "simplified_relators": len(self.simplified.relators),
            "cosets_used": self.cosets_used,
            "seconds": round(self.seconds, 3),
            "notes": self.notes,
        }


def certify_trivial(pp: Pi1Presentation | Presentation, max_cosets: int = 1_000_000) -> Pi1Verdict:
    """Decide triviality: Tietze to the empty presentation, else abelianization, else enumeration."""
    t0 = time.perf_counter()
    pres = pp.presentation if isinstance(pp, Pi1Presentation) else pp
    simp = tietze_simplify(pres)
    if simp.ngens == 0:
        return Pi1Verdict(TRIVIAL, 1, AbelianInvariants((), 0), simp, 0, time.perf_counter() - t0,
                          ["tietze reached the empty presentation"])
    ab = abelianization(simp)
    table = todd_coxeter(simp, (), max_cosets)
    secs = time.perf_counter() - t0
    if table.complete:
        status = TRIVIAL if table.index == 1 else NONTRIVIAL
        return Pi1Verdict(status, table.index, ab, simp, table.max_live, secs, ["coset enumeration completed"])
    if not ab.trivial:
        return Pi1Verdict(NONTRIVIAL, None, ab, simp, table.max_live, secs,
                          ["nonzero abelianization; enumeration hit the budget"])
    return Pi1Verdict(INCONCLUSIVE, None, ab, simp, table.max_live, secs, ["enumeration hit the budget"])


def pi1_order(pp: Pi1Presentation | Presentation, max_cosets: int = 1_000_000) -> int | None:
    """Exact order of pi_1 when enumeration over the trivial subgroup completes, else ``None``."""
    return certify_trivial(pp, max_cosets).order
