"""Permutation groups with a deterministic Schreier-Sims stabilizer chain.

A permutation is a numpy int array ``g`` with ``g[i]`` the image of ``i``.
Products are read left to right: ``mul(g, h)`` applies ``g`` first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def identity(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.int32)


def mul(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Apply ``g`` then ``h``."""
    return h[g]


def inverse(g: np.ndarray) -> np.ndarray:
    out = np.empty_like(g)
    out[g] = np.arange(len(g), dtype=g.dtype)
    return out


def is_identity(g: np.ndarray) -> bool:
    return bool(np.all(g == np.arange(len(g))))


def orbit(point: int, gens) -> list[int]:
    seen = {point}
    out = [point]
    for x in out:
        for g in gens:
            y = int(g[x])
            if y not in seen:
                seen.add(y)
                out.append(y)
    return out


def orbit_sizes(gens, degree: int) -> np.ndarray:
    """Size of the orbit of every point, via union-find over generator edges."""
    parent = list(range(degree))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x in np.nonzero(g != np.arange(degree))[0]:
            a, b = find(int(x)), find(int(g[x]))
            if a != b:
                parent[max(a, b)] = min(a, b)
    roots = np.array([find(x) for x in range(degree)])
    counts = np.bincount(roots, minlength=degree)
    return counts[roots]


@dataclass
class _Level:
    base_point: int
    gens: list
    transversal: dict = field(default_factory=dict)   # beta -> u with u[base] = beta
    inv_transversal: dict = field(default_factory=dict)

    def rebuild(self, degree: int):
        """Extend the orbit; existing transversal entries are kept so Schreier checks stay valid."""
        b = self.base_point
        if not self.transversal:
            ident = identity(degree)
            self.transversal = {b: ident}
            self.inv_transversal = {b: ident}
        queue = list(self.transversal)
        for beta in queue:
            u = self.transversal[beta]
            for g in self.gens:
                gamma = int(g[beta])
                if gamma not in self.transversal:
                    w = mul(u, g)
                    self.transversal[gamma] = w
                    self.inv_transversal[gamma] = inverse(w)
                    queue.append(gamma)

    @property
    def orbit_size(self) -> int:
        return len(self.transversal)


class PermGroup:
    """Group generated by permutations of ``0..degree-1`` with a stabilizer chain.

    ``base_prefix`` forces the first base points (even when their basic orbits
    are trivial); the subgroup fixing them pointwise is then available as
    :meth:`prefix_stabilizer`.
    """

    def __init__(self, gens, degree: int | None = None, base_prefix=(), candidate_points=None):
        gens = [np.asarray(g, dtype=np.int32) for g in gens]
        if degree is None:
            if not gens:
                raise ValueError("degree is required when there are no generators")
            degree = len(gens[0])
        self.degree = degree
        self.gens = [g for g in gens if not is_identity(g)]
        self.base_prefix = tuple(int(b) for b in base_prefix)
        self.candidates = None if candidate_points is None else np.asarray(candidate_points)
        self.levels: list[_Level] = []
        self._build()

    # -- construction ------------------------------------------------------
    def _new_base_point(self, h: np.ndarray, gens) -> int:
        moved = np.nonzero(h != np.arange(self.degree))[0]
        if self.candidates is not None:
            c = np.intersect1d(moved, self.candidates)
            if len(c):
                moved = c
        sizes = orbit_sizes(gens, self.degree) if gens else None
        if sizes is None:
            return int(moved[0])
        best = moved[np.argmax(sizes[moved])]
        return int(best)

    def _sift(self, g: np.ndarray, start: int):
        for i in range(start, len(self.levels)):
            lev = self.levels[i]
            beta = int(g[lev.base_point])
            uinv = lev.inv_transversal.get(beta)
            if uinv is None:
                return g, i
            g = mul(g, uinv)
        return g, len(self.levels)

    def _build(self):
        for b in self.base_prefix:
            self.levels.append(_Level(b, []))
            self.levels[-1].rebuild(self.degree)
        for g in self.gens:
            self._insert(g, 0)
        for lev in self.levels:
            lev.rebuild(self.degree)
        i = len(self.levels) - 1
        checked: list[set] = [set() for _ in self.levels]
        while i >= 0:
            lev = self.levels[i]
            restart = False
            for beta in list(lev.transversal):
                u = lev.transversal[beta]
                for k, s in enumerate(lev.gens):
                    if (beta, k) in checked[i]:
                        continue
                    checked[i].add((beta, k))
                    gamma = int(s[beta])
                    sch = mul(mul(u, s), lev.inv_transversal[gamma])
                    h, j = self._sift(sch, i + 1)
                    if is_identity(h):
                        continue
                    self._add_strong(h, i + 1)
                    while len(checked) < len(self.levels):
                        checked.append(set())
                    i = min(len(self.levels) - 1, j)
                    restart = True
                    break
                if restart:
                    break
            if not restart:
                i -= 1

    def _insert(self, g: np.ndarray, start: int):
        h, j = self._sift(g, start)
        if not is_identity(h):
            self._add_strong(h, start)

    def _add_strong(self, h: np.ndarray, start: int):
        """Add ``h`` (which fixes the base points before ``start``) to levels ``start..``."""
        k = start
        while True:
            if k == len(self.levels):
                gens_here = [h]
                self.levels.append(_Level(self._new_base_point(h, gens_here), []))
            lev = self.levels[k]
            lev.gens.append(h)
            lev.rebuild(self.degree)
            if int(h[lev.base_point]) != lev.base_point:
                break
            k += 1

    # -- queries -----------------------------------------------------------
    @property
    def base(self) -> list[int]:
        return [lev.base_point for lev in self.levels]

    def order(self) -> int:
        out = 1
        for lev in self.levels:
            out *= lev.orbit_size
        return out

    def contains(self, g) -> bool:
        h, _ = self._sift(np.asarray(g, dtype=np.int32), 0)
        return is_identity(h)

    def strong_generators(self, level: int = 0) -> list:
        if level >= len(self.levels):
            return []
        return list(self.levels[level].gens)

    def prefix_stabilizer(self) -> "PermGroup":
        """Pointwise stabilizer of the forced base prefix, as a new group."""
        k = len(self.base_prefix)
        gens = self.strong_generators(k)
        return PermGroup(gens, self.degree, candidate_points=self.candidates)

    def prefix_stabilizer_order(self) -> int:
        out = 1
        for lev in self.levels[len(self.base_prefix):]:
            out *= lev.orbit_size
        return out

    def elements(self, limit: int = 2_000_000):
        """Enumerate all elements (only for small groups)."""
        if self.order() > limit:
            raise ValueError("group too large to enumerate")
        elems = [identity(self.degree)]
        for lev in reversed(self.levels):
            reps = list(lev.transversal.values())
            elems = [mul(e, u) for u in reps for e in elems]
        return elems

    def orbit(self, point: int) -> list[int]:
        return orbit(point, self.gens)

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return all(other.contains(g) for g in self.gens)

    def commutes_with(self, other: "PermGroup") -> bool:
        return all(np.array_equal(mul(a, b), mul(b, a)) for a in self.gens for b in other.gens)


def generated(groups, degree: int, candidate_points=None) -> PermGroup:
    gens = [g for G in groups for g in G.gens]
    return PermGroup(gens, degree, candidate_points=candidate_points)


def stabilizer(G: PermGroup, points, candidate_points=None) -> PermGroup:
    """Pointwise stabilizer of ``points`` in ``G``."""
    chain = PermGroup(G.gens, G.degree, base_prefix=points,
                      candidate_points=G.candidates if candidate_points is None else candidate_points)
    return chain.prefix_stabilizer()
