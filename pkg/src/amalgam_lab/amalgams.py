"""Amalgams of concrete matrix groups and verification of their universal completions.

An amalgam is a family of groups indexed by a poset, with injective
homomorphisms for comparable pairs.  Here every member is a subgroup of
GL_n(p) and every inclusion is the identity on matrices, so the universal
completion is presented by the member multiplication rules together with the
identification of each element with its images.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .action import SpAction, parabolic, slim_generators
from .fpgroups import Presentation, factorize, presentation_from_group, todd_coxeter
from .linalg import mat_inv
from .matgroups import MatrixGroup, mat_key
from .permgroups import PermGroup
from .symplectic import SympSpace, sp_order

MANIFEST_SCHEMA = "amalgam/1"
YES, NO, INCONCLUSIVE = "yes", "no", "inconclusive"


@dataclass
class Amalgam:
    """Members indexed by name; ``below[x]`` lists the members directly contained in ``x``."""

    name: str
    p: int
    n: int
    members: dict
    below: dict
    asserted: bool = True

    def order(self, x: str) -> int:
        return self.members[x].order

    def up_closure(self) -> dict:
        """x -> set of all members strictly below x."""
        out = {}
        for x in self.members:
            seen, stack = set(), list(self.below.get(x, ()))
            while stack:
                y = stack.pop()
                if y not in seen:
                    seen.add(y)
                    stack.extend(self.below.get(y, ()))
            out[x] = seen
        return out

    def inclusions(self) -> list:
        return sorted((small, big) for big, smalls in self.up_closure().items() for small in smalls)

    def maximal(self) -> list:
        inside = {y for ys in self.below.values() for y in ys}
        return [x for x in self.members if x not in inside]

    def minimal(self) -> list:
        return [x for x in self.members if not self.below.get(x)]

    def rank_order(self) -> list:
        """Members listed so that everything below a member comes first."""
        done, out = set(), []

        def visit(x):
            if x in done:
                return
            for y in self.below.get(x, ()):
                visit(y)
            done.add(x)
            out.append(x)

        for x in self.members:
            visit(x)
        return out


@dataclass
class CoherenceReport:
    injective: dict          # (small, big) -> bool
    composition: dict        # (a, b, c) -> bool

    @property
    def ok(self) -> bool:
        return all(self.injective.values()) and all(self.composition.values())


def check_coherence(a: Amalgam) -> CoherenceReport:
    """Each inclusion is an injective homomorphism and inclusions compose along chains.

    The maps are the identity on matrices, so the homomorphism property is the
    statement that every element of the smaller member lies in the larger one.
    Composition is compared element by element on every chain a < b < c.
    """
    inj = {}
    for small, big in a.inclusions():
        inj[(small, big)] = a.members[small].keys() <= a.members[big].keys()
    comp = {}
    clos = a.up_closure()
    for c, below_c in clos.items():
        for b in below_c:
            for x in clos[b]:
                via = {mat_key(e) for e in a.members[x].elements if a.members[b].contains(e)}
                direct = {mat_key(e) for e in a.members[x].elements if a.members[c].contains(e)}
                comp[(x, b, c)] = via == direct == a.members[x].keys()
    return CoherenceReport(inj, comp)


# -- builders --------------------------------------------------------------

def build_slim_amalgam(s: SympSpace) -> Amalgam:
    """The slim amalgam: S_j, M_i and the rank-2 groups S_jl, M_ik, Q_ij as matrix groups."""
    q, n = s.p, s.n
    if q not in (2, 3) or n not in (4, 6) or not s.is_standard or s.rad_dim:
        raise ValueError("slim amalgam supports q in {2, 3} and a nondegenerate space of dimension 4 or 6")
    r = n // 2
    gens = slim_generators(q, n)
    members, below = {}, {}
    for j in range(1, r + 1):
        members[f"S{j}"] = MatrixGroup(gens[f"S{j}"], q, n, f"S{j}")
    for i in range(1, r):
        members[f"M{i}"] = MatrixGroup(gens[f"M{i}"], q, n, f"M{i}")
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            members[f"S{i}{j}"] = MatrixGroup(gens[f"S{i}"] + gens[f"S{j}"], q, n, f"S{i}{j}")
            below[f"S{i}{j}"] = [f"S{i}", f"S{j}"]
    for i in range(1, r):
        for k in range(i + 1, r):
            members[f"M{i}{k}"] = MatrixGroup(gens[f"M{i}"] + gens[f"M{k}"], q, n, f"M{i}{k}")
            below[f"M{i}{k}"] = [f"M{i}", f"M{k}"]
    for i in range(1, r):
        for j in range(1, r + 1):
            members[f"Q{i}{j}"] = MatrixGroup(gens[f"M{i}"] + gens[f"S{j}"], q, n, f"Q{i}{j}")
            below[f"Q{i}{j}"] = [f"M{i}", f"S{j}"]
    return Amalgam(f"A_pi(2n={n}, q={q})", q, n, members, below, asserted=q >= 3)


def _matrix_member(act: SpAction, G: PermGroup, name: str) -> MatrixGroup:
    mats = [act.matrix_of(g) for g in G.gens] or [np.eye(act.s.n, dtype=np.int64)]
    return MatrixGroup(mats, act.s.p, act.s.n, name)


def build_parabolic_amalgam(act: SpAction, max_rank: int | None = 2, maximal: bool = False) -> Amalgam:
    """Parabolic amalgams of the flag-transitive action on Gamma.

    ``maximal=False``: all P_J with |J| <= max_rank.  ``maximal=True``: the
    maximal parabolics P_{I - {t}} glued along their pairwise intersections
    P_{I - {t, u}}.
    """
    types = list(act.gamma.types)
    if maximal:
        top = [tuple(t for t in types if t != u) for u in types]
        glue = sorted({tuple(sorted(set(a) & set(b))) for a, b in itertools.combinations(top, 2)})
        index = sorted(set(top) | set(glue), key=lambda J: (len(J), J))
    else:
        index = [J for k in range(0, max_rank + 1) for J in itertools.combinations(types, k)]
    members, below = {}, {}
    for J in index:
        name = "P" + ("".join(map(str, J)) or "0")
        members[name] = _matrix_member(act, parabolic(act, J), name)
    names = {J: "P" + ("".join(map(str, J)) or "0") for J in index}
    for J in index:
        # immediate predecessors among the chosen index sets
        subs = [K for K in index if set(K) < set(J)]
        direct = [K for K in subs if not any(set(K) < set(L) for L in subs)]
        if direct:
            below[names[J]] = [names[K] for K in direct]
    q, n = act.s.p, act.s.n
    kind = "maximal parabolics" if maximal else f"parabolics |J|<={max_rank}"
    return Amalgam(f"{kind} (2n={n}, q={q})", q, n, members, below, asserted=True)


# -- completion presentation -------------------------------------------------

@dataclass
class CompletionPresentation:
    """Presentation of the universal completion with the matrix value of every generator."""

    presentation: Presentation
    images: list                 # generator k+1 -> matrix
    member_gens: dict            # member name -> tuple of generator symbols (1-based)
    identifications: list        # (small, big, small symbol, word in big's symbols)
    mode: str

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "ngens": self.presentation.ngens,
            "relators": [list(r) for r in self.presentation.relators],
            "member_gens": {k: list(v) for k, v in self.member_gens.items()},
            "identifications": [[s, b, x, list(w)] for s, b, x, w in self.identifications],
        }


def _extend_generators(G: MatrixGroup, start: list) -> list:
    """``start`` plus greedily chosen elements of G until they generate G."""
    gens = list(start)
    have = MatrixGroup(gens, G.p, G.n).keys() if gens else {mat_key(np.eye(G.n, dtype=np.int64))}
    for e in G.elements:
        if len(have) == G.order:
            break
        if mat_key(e) in have:
            continue
        gens.append(e)
        have = MatrixGroup(gens, G.p, G.n).keys()
    return gens


def _member_relators(G: MatrixGroup, mats: list, symbols: list) -> list:
    """Certified presentation of G on ``mats``, rewritten to the global ``symbols``."""
    pres, _ = presentation_from_group(mats, G.mul, G.identity, mat_key)
    out = []
    for r in pres.relators:
        out.append(tuple(symbols[abs(x) - 1] * (1 if x > 0 else -1) for x in r))
    return out


def completion_presentation(a: Amalgam, shared: bool = True) -> CompletionPresentation:
    """Presentation of the universal completion of ``a``.

    ``shared=True``: members inherit the generator symbols of the members below
    them (extended greedily when those do not generate), so identifications
    are built into the symbols.  ``shared=False``: every member gets its own
    symbols and each generator of a smaller member is identified, via a word
    found by factorization, with an element of every member containing it.
    """
    images: list = []
    member_gens: dict = {}
    relators: list = []
    idents: list = []

    def new_symbol(m):
        images.append(np.asarray(m) % a.p)
        return len(images)

    clos = a.up_closure()
    for x in a.rank_order():
        G = a.members[x]
        if shared:
            syms: list = []
            for y in a.below.get(x, ()):
                for k in member_gens[y]:
                    if k not in syms:
                        syms.append(k)
            base = [images[k - 1] for k in syms]
            gens = _extend_generators(G, base)
            syms = syms + [new_symbol(m) for m in gens[len(base):]]
            for y in a.below.get(x, ()):
                for k in member_gens[y]:
                    idents.append((y, x, k, (k,)))
        else:
            gens = _extend_generators(G, [])
            syms = [new_symbol(m) for m in gens]
        member_gens[x] = tuple(syms)
        relators.extend(_member_relators(G, [images[k - 1] for k in syms], syms))
    if not shared:
        for big, smalls in clos.items():
            G = a.members[big]
            big_syms = member_gens[big]
            big_mats = [images[k - 1] for k in big_syms]
            for small in sorted(smalls):
                for k in member_gens[small]:
                    w = factorize(images[k - 1], big_mats, G.mul, G.identity, mat_key)
                    word = tuple(big_syms[abs(x) - 1] * (1 if x > 0 else -1) for x in w)
                    idents.append((small, big, k, word))
                    relators.append((-k,) + word)
    pres = Presentation(len(images), tuple(relators))
    return CompletionPresentation(pres, images, member_gens, idents, "shared" if shared else "explicit")


# -- verification -------------------------------------------------------------

def _evaluates_to_identity(word, images, p: int) -> bool:
    invs = [mat_inv(m, p) for m in images]
    n = images[0].shape[0] if images else 0
    out = np.eye(n, dtype=np.int64)
    for x in word:
        out = (out @ (images[x - 1] if x > 0 else invs[-x - 1])) % p
    return bool(np.array_equal(out, np.eye(n, dtype=np.int64)))


def vector_permutation(g, p: int, n: int) -> np.ndarray:
    """Action of a matrix on the nonzero vectors of GF(p)^n (indexed by base-p code minus one)."""
    vecs = np.array(list(itertools.product(range(p), repeat=n))[1:], dtype=np.int64)[:, ::-1]
    weights = p ** np.arange(n, dtype=np.int64)
    img = (vecs @ (np.asarray(g) % p).T) % p
    return (img @ weights - 1).astype(np.int32)


@dataclass
class CompletionVerdict:
    amalgam: str
    relators_killed: bool
    generated_order: int
    target_order: int
    relative_to: str
    member_order: int
    index: int | None
    completion_order: int | None
    iso: str
    asserted: bool
    cosets_used: int
    seconds: float
    ngens: int
    nrelators: int
    notes: list = field(default_factory=list)

    @property
    def surjective(self) -> bool:
        return self.relators_killed and self.generated_order == self.target_order

    @property
    def verified(self) -> bool:
        return self.iso == YES

    def to_json(self) -> dict:
        return {
            "amalgam": self.amalgam, "relators_killed": self.relators_killed,
            "generated_order": self.generated_order, "target_order": self.target_order,
            "surjective": self.surjective, "relative_to": self.relative_to, "member_order": self.member_order,
            "index": self.index, "completion_order": self.completion_order, "iso": self.iso,
            "asserted": self.asserted, "cosets_used": self.cosets_used, "seconds": round(self.seconds, 3),
            "ngens": self.ngens, "nrelators": self.nrelators, "notes": self.notes,
        }


def verify_completion(a: Amalgam, target: SympSpace | None = None, max_cosets: int = 200_000,
                      relative_to: str | None = None, cp: CompletionPresentation | None = None,
                      strategy: str = "felsch") -> CompletionVerdict:
    """Compare the universal completion of ``a`` with Sp(V).

    1. every relator evaluates to the identity matrix (so the completion maps onto <members>);
    2. <members> has order |Sp(V)| (Schreier-Sims on nonzero vectors);
    3. coset enumeration relative to member X gives the index, and the
       completion order is index * |X| (X injects because its matrices do);
    4. iso = yes iff that order equals |Sp(V)|.
    """
    t0 = time.perf_counter()
    target = target or SympSpace.standard(a.p, a.n)
    target_order = sp_order(target.p, target.n // 2)
    cp = cp or completion_presentation(a)
    pres = cp.presentation
    killed = all(_evaluates_to_identity(r, cp.images, a.p) for r in pres.relators)
    perms = [vector_permutation(g, a.p, a.n) for g in cp.images]
    gen_order = PermGroup(perms, a.p ** a.n - 1).order()
    if relative_to is None:
        relative_to = max(sorted(a.members), key=lambda x: a.members[x].order)
    X = a.members[relative_to]
    subgroup = [(k,) for k in cp.member_gens[relative_to]]
    table = todd_coxeter(pres, subgroup, max_cosets, strategy)
    notes = []
    if table.complete:
        index = table.index
        order = index * X.order
        iso = YES if (order == target_order and killed and gen_order == target_order) else NO
    else:
        index, order, iso = None, None, INCONCLUSIVE
        notes.append(f"coset enumeration exceeded {max_cosets} live cosets")
    if not a.asserted:
        notes.append("outside the |F| >= 3 hypothesis; reported, not asserted")
    return CompletionVerdict(a.name, killed, gen_order, target_order, relative_to, X.order, index, order, iso,
                             a.asserted, table.max_live, time.perf_counter() - t0, pres.ngens, len(pres.relators),
                             notes)


def manifest(a: Amalgam, cp: CompletionPresentation | None = None, verdict: CompletionVerdict | None = None) -> dict:
    """JSON-ready description: members with orders and generator matrices, identifications, verdict."""
    out = {
        "schema": MANIFEST_SCHEMA,
        "name": a.name, "p": a.p, "n": a.n, "asserted": a.asserted,
        "members": [{"name": x, "order": a.members[x].order,
                     "generators": [g.tolist() for g in a.members[x].gens],
                     "below": list(a.below.get(x, ()))} for x in a.members],
    }
    if cp is not None:
        out["completion"] = cp.to_json()
        out["generator_matrices"] = [m.tolist() for m in cp.images]
    if verdict is not None:
        out["verdict"] = verdict.to_json()
    return out
