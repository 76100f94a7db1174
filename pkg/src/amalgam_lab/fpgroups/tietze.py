"""Tietze transformations: generator elimination and relator shortening."""

from __future__ import annotations

from .presentation import Presentation, canonical_cyclic, cyclic_reduce, free_reduce, invert


class _SignedUnionFind:
    """Generators identified up to inversion: ``find(g) = (root, sign)`` or ``(0, 1)`` for trivial."""

    def __init__(self, n: int):
        self.parent = list(range(n + 1))
        self.sign = [1] * (n + 1)

    def find(self, g: int):
        s = 1
        path = []
        while self.parent[g] != g:
            path.append(g)
            s *= self.sign[g]
            g = self.parent[g]
        root = g
        # path compression
        acc = s
        for h in path:
            hs = self.sign[h]
            self.parent[h] = root
            self.sign[h] = acc
            acc *= hs
        return root, s

    def letter(self, x: int) -> int:
        r, s = self.find(abs(x))
        if r == 0:
            return 0
        return r * s * (1 if x > 0 else -1)

    def union(self, x: int, y: int) -> bool:
        """Impose letter ``x`` == letter ``y`` (either may be 0 for the identity)."""
        rx, sx = (0, 1) if x == 0 else self.find(abs(x))
        ry, sy = (0, 1) if y == 0 else self.find(abs(y))
        sx *= 1 if x >= 0 else -1
        sy *= 1 if y >= 0 else -1
        if rx == ry:
            return False  # either consistent or an involution relation; kept as a relator
        if ry < rx:
            rx, ry, sx, sy = ry, rx, sy, sx
        # keep the smaller root (0, the identity, is smallest) and attach ry under it
        self.parent[ry] = rx
        self.sign[ry] = sx * sy
        return True


def _rewrite(w, uf: _SignedUnionFind):
    return cyclic_reduce(tuple(l for l in (uf.letter(x) for x in w) if l))


def collapse_short_relators(pres: Presentation) -> tuple[Presentation, list]:
    """Eliminate generators through relators of length 1 and 2, to a fixpoint.

    Returns the reduced presentation and, for every original generator, its
    value as a word in the new generators.
    """
    n = pres.ngens
    uf = _SignedUnionFind(n)
    rels = [cyclic_reduce(r) for r in pres.relators]
    changed = True
    while changed:
        changed = False
        keep = []
        for r in rels:
            w = _rewrite(r, uf)
            if not w:
                continue
            if len(w) == 1:
                changed |= uf.union(w[0], 0)
                continue
            if len(w) == 2 and abs(w[0]) != abs(w[1]):
                changed |= uf.union(w[0], -w[1])
                continue
            keep.append(w)
        rels = keep
    roots = sorted({uf.find(g)[0] for g in range(1, n + 1)} - {0})
    renum = {r: k + 1 for k, r in enumerate(roots)}

    def tr(x):
        l = uf.letter(x)
        if not l:
            return ()
        return (renum[abs(l)] * (1 if l > 0 else -1),)

    new_rels = []
    seen = set()
    for r in rels:
        w = _rewrite(r, uf)
        w = tuple(y for x in w for y in tr(x))
        w = cyclic_reduce(w)
        if w:
            c = canonical_cyclic(w)
            if c not in seen:
                seen.add(c)
                new_rels.append(c)
    values = [tr(g) for g in range(1, n + 1)]
    return Presentation(len(roots), tuple(new_rels)), values


def _dedupe(rels):
    out, seen = [], set()
    for r in rels:
        r = cyclic_reduce(r)
        if not r:
            continue
        c = canonical_cyclic(r)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def _substitute(w, g: int, expr):
    inv_expr = invert(expr)
    out = []
    for x in w:
        if x == g:
            out.extend(expr)
        elif x == -g:
            out.extend(inv_expr)
        else:
            out.append(x)
    return cyclic_reduce(free_reduce(out))


def _elimination_candidate(rels, ngens, budget):
    """Pick (relator index, generator, expression) with the smallest length growth."""
    counts = [0] * (ngens + 1)
    for r in rels:
        for x in r:
            counts[abs(x)] += 1
    total = sum(len(r) for r in rels)
    best = None
    for idx, r in enumerate(rels):
        occ: dict[int, int] = {}
        for x in r:
            occ[abs(x)] = occ.get(abs(x), 0) + 1
        for g, c in occ.items():
            if c != 1:
                continue
            others = counts[g] - 1
            growth = others * (len(r) - 2) - len(r)
            if total + growth > budget:
                continue
            key = (growth, len(r), idx, g)
            if best is None or key < best[0]:
                best = (key, idx, g)
    if best is None:
        return None
    _, idx, g = best
    r = rels[idx]
    k = next(i for i, x in enumerate(r) if abs(x) == g)
    rot = r[k:] + r[:k]
    rest = rot[1:]
    expr = invert(rest) if rot[0] == g else tuple(rest)
    return idx, g, expr


def _drop_generator(rels, ngens, g):
    def ren(x):
        a = abs(x)
        a = a - 1 if a > g else a
        return a if x > 0 else -a

    return [tuple(ren(x) for x in r) for r in rels], ngens - 1


def _shorten_by_substrings(rels, max_pairs=200_000):
    """Replace a long piece of one relator inside another by the shorter complement."""
    rels = sorted(rels, key=len)
    changed = False
    pairs = 0
    for i, r in enumerate(rels):
        lr = len(r)
        if lr < 2 or lr > 60:
            continue
        # pieces u of (cyclic) r with len(u) > lr/2, and the replacement complement^-1
        pieces = {}
        for v in (r, invert(r)):
            doubled = v + v
            for start in range(lr):
                for length in range(lr // 2 + 1, lr + 1):
                    u = doubled[start:start + length]
                    comp = doubled[start + length:start + lr]
                    pieces.setdefault(u, invert(comp))
        for j in range(len(rels)):
            if j == i or len(rels[j]) < lr:
                continue
            pairs += 1
            if pairs > max_pairs:
                return rels, changed
            s = rels[j]
            ls = len(s)
            doubled = s + s
            done = False
            for length in range(min(lr, ls), lr // 2, -1):
                for start in range(ls):
                    u = doubled[start:start + length]
                    rep = pieces.get(u)
                    if rep is None or len(rep) >= length:
                        continue
                    rest = doubled[start + length:start + ls]
                    new = cyclic_reduce(tuple(rep) + tuple(rest))
                    if len(new) < ls:
                        rels[j] = new
                        changed = True
                        done = True
                        break
                if done:
                    break
    return rels, changed


def tietze_simplify(pres: Presentation, budget: int | None = None, substring_limit: int = 400) -> Presentation:
    """Simplify a presentation without changing the group.

    Steps, repeated to a fixpoint: collapse length-1 and length-2 relators,
    eliminate a generator occurring once in some relator (least length growth
    first, never pushing total relator length past ``budget``), drop duplicate
    relators up to rotation and inversion, and shorten relators by substituting
    long common pieces.  The substring pass only runs when at most
    ``substring_limit`` relators remain.
    """
    pres, _ = collapse_short_relators(pres)
    if budget is None:
        budget = max(2 * pres.total_length, 2000)
    rels = _dedupe(pres.relators)
    ngens = pres.ngens
    while True:
        progressed = False
        while True:
            cand = _elimination_candidate(rels, ngens, budget)
            if cand is None:
                break
            idx, g, expr = cand
            rels = [_substitute(r, g, expr) for k, r in enumerate(rels) if k != idx]
            rels, ngens = _drop_generator(rels, ngens, g)
            rels = _dedupe(rels)
            progressed = True
        if len(rels) <= substring_limit:
            rels, changed = _shorten_by_substrings(rels)
            if changed:
                rels = _dedupe(rels)
                progressed = True
        if not progressed:
            break
    rels.sort(key=lambda r: (len(r), r))
    return Presentation(ngens, tuple(rels))
