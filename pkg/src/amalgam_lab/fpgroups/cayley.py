"""Presentations of small concrete groups from their Cayley graphs, and word factorization."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .coset import todd_coxeter
from .presentation import Presentation, canonical_cyclic, cyclic_reduce, free_reduce, invert
from .tietze import tietze_simplify


def _default_key(x):
    tb = getattr(x, "tobytes", None)
    return tb() if tb is not None else x


def element_inverse(g, mul, identity, key=_default_key, limit=1_000_000):
    """Inverse of ``g`` in a finite group, as its last nontrivial power."""
    ident = key(identity)
    prev, cur = identity, g
    for _ in range(limit):
        if key(cur) == ident:
            return prev
        prev, cur = cur, mul(cur, g)
    raise ValueError("element order exceeds limit")


@dataclass
class CayleyGraph:
    """Right Cayley graph of the group generated by ``gens``.

    ``elements[0]`` is the identity, ``right[k][i]`` is the index of
    ``elements[i] * gens[k]`` and ``words[i]`` is a shortest word (letters
    ``+-(k+1)``) for ``elements[i]``.
    """

    gens: list
    elements: list
    index: dict
    right: list
    words: list
    key: object = field(repr=False, default=_default_key)

    @property
    def order(self) -> int:
        return len(self.elements)

    def locate(self, element) -> int:
        i = self.index.get(self.key(element))
        if i is None:
            raise ValueError("element is not in the generated group")
        return i

    def word(self, element):
        return self.words[self.locate(element)]

    def multiply_index(self, i: int, word) -> int:
        """Index of ``elements[i] * word`` using only right multiplications."""
        for x in word:
            if x > 0:
                i = self.right[x - 1][i]
            else:
                i = self.right_inv[-x - 1][i]
        return i

    @property
    def right_inv(self):
        if not hasattr(self, "_right_inv"):
            inv = []
            for perm in self.right:
                r = [0] * len(perm)
                for a, b in enumerate(perm):
                    r[b] = a
                inv.append(r)
            self._right_inv = inv
        return self._right_inv


def cayley_graph(gens, mul, identity, key=_default_key, max_order: int = 2_000_000) -> CayleyGraph:
    """Close ``gens`` under multiplication by breadth-first search from the identity."""
    gens = list(gens)
    invs = [element_inverse(g, mul, identity, key) for g in gens]
    elements = [identity]
    index = {key(identity): 0}
    words = [()]
    queue = deque([0])
    letters = [(k + 1, g) for k, g in enumerate(gens)] + [(-(k + 1), h) for k, h in enumerate(invs)]
    while queue:
        i = queue.popleft()
        e = elements[i]
        for letter, g in letters:
            f = mul(e, g)
            kf = key(f)
            if kf not in index:
                if len(elements) >= max_order:
                    raise ValueError(f"group order exceeds {max_order}")
                index[kf] = len(elements)
                elements.append(f)
                words.append(words[i] + (letter,))
                queue.append(len(elements) - 1)
    right = [[index[key(mul(e, g))] for e in elements] for g in gens]
    return CayleyGraph(gens, elements, index, right, words, key)


def cayley_relators(cg: CayleyGraph) -> list:
    """One relator per non-tree edge: word(e) g word(e g)^-1, deduplicated and sorted by length."""
    seen = set()
    out = []
    for k, perm in enumerate(cg.right):
        for i, j in enumerate(perm):
            r = cyclic_reduce(cg.words[i] + (k + 1,) + invert(cg.words[j]))
            if not r:
                continue
            c = canonical_cyclic(r)
            if c not in seen:
                seen.add(c)
                out.append(c)
    out.sort(key=lambda r: (len(r), r))
    return out


def certify_presentation(pres: Presentation, order: int, max_cosets: int | None = None,
                         strategy: str = "hlt") -> bool:
    """True iff enumeration over the trivial subgroup gives exactly ``order`` cosets.

    HLT is the default here: with many long Cayley relators it beats Felsch by
    a wide margin.
    """
    t = todd_coxeter(pres, (), max_cosets or max(16 * order, 4096), strategy)
    return t.complete and t.index == order


def presentation_from_cayley(cg: CayleyGraph, keep_generators: bool = True, start: int = 4) -> Presentation:
    """Shortest certified prefix of the sorted Cayley relators, then simplified and re-certified.

    With ``keep_generators`` the generators stay the given ones (only relators
    are simplified), which is what amalgam members need.
    """
    rels = cayley_relators(cg)
    ngens = len(cg.gens)
    order = cg.order
    k = min(start, len(rels))
    trial_budget = 2 * order + 64
    while True:
        pres = Presentation(ngens, tuple(rels[:k]))
        budget = trial_budget if k < len(rels) else None
        if certify_presentation(pres, order, budget):
            break
        if k == len(rels):  # pragma: no cover - the full Cayley presentation always works
            raise AssertionError("Cayley presentation failed to certify")
        k = min(2 * k, len(rels))
    pres = _prune(pres, order)
    if keep_generators:
        simp = Presentation(ngens, tuple(_shorten_only(pres.relators)))
    else:
        simp = tietze_simplify(pres)
    if certify_presentation(simp, order):
        return simp
    return pres  # pragma: no cover - simplification never changes the group


def _prune(pres: Presentation, order: int) -> Presentation:
    """Drop relators one at a time (longest first) while the presentation still certifies.

    Trials run on a tight coset budget; a trial that runs out simply keeps the relator.
    """
    rels = list(pres.relators)
    if len(rels) > 64:
        return pres
    budget = 2 * order + 64
    for r in sorted(rels, key=len, reverse=True):
        trial = [s for s in rels if s != r]
        if certify_presentation(Presentation(pres.ngens, tuple(trial)), order, budget):
            rels = trial
    return Presentation(pres.ngens, tuple(rels))


def _shorten_only(rels):
    from .tietze import _dedupe, _shorten_by_substrings

    rels = _dedupe(rels)
    rels, _ = _shorten_by_substrings(list(rels))
    return sorted(_dedupe(rels), key=lambda r: (len(r), r))


def presentation_from_group(gens, mul, identity, key=_default_key, keep_generators: bool = True):
    """Certified presentation of the group generated by ``gens``; returns ``(presentation, cayley_graph)``."""
    cg = cayley_graph(gens, mul, identity, key)
    return presentation_from_cayley(cg, keep_generators), cg


def presentation_from_table(table, gens) -> Presentation:
    """Same, for a group given by its multiplication table (``table[a][b] = a*b``) with identity 0."""
    if any(table[0][b] != b for b in range(len(table))):
        raise ValueError("element 0 must be the identity")
    cg = cayley_graph(list(gens), lambda a, b: table[a][b], 0, key=lambda x: x)
    if cg.order != len(table):
        raise ValueError("chosen generators do not generate the group")
    return presentation_from_cayley(cg)


def factorize(target, gens, mul, identity, key=_default_key, max_radius: int = 64):
    """A word in ``gens`` evaluating to ``target``, by bidirectional breadth-first search.

    Raises ``ValueError`` when no word of length ``<= 2 * max_radius`` exists.
    """
    gens = list(gens)
    invs = [element_inverse(g, mul, identity, key) for g in gens]
    letters = [(k + 1, g) for k, g in enumerate(gens)] + [(-(k + 1), h) for k, h in enumerate(invs)]
    if key(target) == key(identity):
        return ()
    fwd = {key(identity): ()}
    bwd = {key(target): ()}  # target * w = x  <=>  target = x * w^-1
    ffront = [identity]
    bfront = [target]
    for _ in range(max_radius):
        for front, seen, other, forward in ((ffront, fwd, bwd, True), (bfront, bwd, fwd, False)):
            nxt = []
            for e in front:
                w = seen[key(e)]
                for letter, g in letters:
                    f = mul(e, g)
                    kf = key(f)
                    if kf in seen:
                        continue
                    seen[kf] = w + (letter,)
                    nxt.append(f)
                    if kf in other:
                        u, v = (seen[kf], other[kf]) if forward else (other[kf], seen[kf])
                        return free_reduce(u + invert(v))
            front[:] = nxt
        if not ffront and not bfront:
            break
    raise ValueError("target not reached; it may not lie in the generated group")
