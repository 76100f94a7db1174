"""Alternating forms of maximal rank, radicals, hyperbolic bases and Sp generators."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .linalg import PrimeField, Subspace, all_vectors, intersect, nullspace, rank, subspace_sum


def standard_gram(n: int, p: int) -> np.ndarray:
    """Block-diagonal Gram matrix of 2x2 blocks ``[[0, 1], [-1, 0]]``.

    For odd ``n`` the last row and column are zero (a 1-dimensional radical).
    """
    s = np.zeros((n, n), dtype=np.int64)
    for i in range(0, n - 1, 2):
        s[i, i + 1] = 1
        s[i + 1, i] = p - 1
    return s


@dataclass(frozen=True, eq=False)
class SympSpace:
    """GF(p)^n with an alternating bilinear form of radical dimension at most 1."""

    field: PrimeField
    gram: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.array(self.gram, dtype=np.int64) % self.field.p
        object.__setattr__(self, "gram", g)
        if g.shape[0] != g.shape[1]:
            raise ValueError("Gram matrix must be square")
        if np.any(np.diag(g)) or np.any((g + g.T) % self.field.p):
            raise ValueError("Gram matrix is not alternating")
        if self.n - rank(g, self.field.p) > 1:
            raise ValueError("form must have radical dimension at most 1")

    @classmethod
    def standard(cls, p: int, n: int) -> "SympSpace":
        return cls(PrimeField(p), standard_gram(n, p))

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def n(self) -> int:
        return self.gram.shape[0]

    @cached_property
    def rad_dim(self) -> int:
        return self.n - rank(self.gram, self.p)

    @cached_property
    def is_standard(self) -> bool:
        return np.array_equal(self.gram, standard_gram(self.n, self.p))

    @cached_property
    def _gram_entries(self):
        return tuple((i, j, int(self.gram[i, j])) for i in range(self.n) for j in range(self.n) if self.gram[i, j])

    def form(self, x, y) -> int:
        return sum(a * x[i] * y[j] for i, j, a in self._gram_entries) % self.p

    def full(self) -> Subspace:
        return Subspace.full(self.p, self.n)

    def subspace(self, vectors) -> Subspace:
        return Subspace.span(vectors, self.p, self.n)

    def induced(self, u: Subspace) -> "SympSpace":
        """The form restricted to ``u``, in the coordinates of u's RREF basis.

        Only valid when the restriction still has radical dimension <= 1.
        """
        b = u.basis
        return SympSpace(self.field, (b @ self.gram @ b.T) % self.p)

    def unit(self, i: int) -> tuple[int, ...]:
        return tuple(int(i == j) for j in range(self.n))


def perp(s: SympSpace, u: Subspace) -> Subspace:
    """``{v : s(u, v) = 0 for all u in U}``."""
    if u.dim == 0:
        return s.full()
    return Subspace.span(nullspace((u.basis @ s.gram) % s.p, s.p), s.p, s.n)


def radical(s: SympSpace, u: Subspace) -> Subspace:
    return intersect(u, perp(s, u))


def form_rank(s: SympSpace, u: Subspace) -> int:
    return u.dim - radical(s, u).dim


@dataclass(frozen=True)
class HyperbolicBasis:
    """Vectors ``e_1..e_{r+d}`` and ``f_1..f_r`` with s(e_i, f_j) = delta_ij.

    The trailing ``d`` e-vectors span the radical of the space they span.
    """

    e: tuple[tuple[int, ...], ...] = ()
    f: tuple[tuple[int, ...], ...] = ()

    @property
    def r(self) -> int:
        return len(self.f)

    @property
    def d(self) -> int:
        return len(self.e) - len(self.f)

    def h(self) -> list[tuple[int, ...]]:
        """Interleaved ordering e_1, f_1, e_2, f_2, ..., followed by the radical part."""
        out = []
        for i, e in enumerate(self.e):
            out.append(e)
            if i < self.r:
                out.append(self.f[i])
        return out

    def vectors(self) -> list[tuple[int, ...]]:
        return list(self.e) + list(self.f)


def check_hyperbolic(s: SympSpace, hb: HyperbolicBasis, u: Subspace | None = None) -> bool:
    """Re-verify the hyperbolic basis conditions by Gram evaluation."""
    r = hb.r
    vecs = hb.vectors()
    span = s.subspace(vecs)
    if span.dim != len(vecs):
        return False
    if u is not None and span != u:
        return False
    for i in range(r):
        for j in range(r):
            if s.form(hb.e[i], hb.e[j]) or s.form(hb.f[i], hb.f[j]):
                return False
            if s.form(hb.e[i], hb.f[j]) != (1 if i == j else 0):
                return False
    rad = radical(s, span)
    if rad.dim != hb.d or s.subspace(hb.e[r:]) != rad:
        return False
    return True


def _first(vectors, pred):
    for v in vectors:
        if pred(v):
            return v
    return None


def hyperbolic_extend(s: SympSpace, u: Subspace, partial: HyperbolicBasis | None = None) -> HyperbolicBasis:
    """Extend a hyperbolic basis of W <= U (with W meeting Rad(U) trivially) to one of U.

    Partners are chosen as the first valid vector of U in lexicographic order of
    coordinates, so the output is deterministic.
    """
    partial = partial or HyperbolicBasis()
    vecs = partial.vectors()
    w = s.subspace(vecs)
    rad_u = radical(s, u)
    if w.dim != len(vecs) or any(not u.contains_vector(v) for v in vecs):
        raise ValueError("partial basis must be independent and lie in U")
    if subspace_sum(w, rad_u).dim != w.dim + rad_u.dim:
        raise ValueError("partial basis must span a subspace meeting Rad(U) trivially")
    if not check_hyperbolic(s, partial):
        raise ValueError("partial is not a hyperbolic basis of its span")

    u_vecs = [v for v in u.vectors() if any(v)]
    es = list(partial.e[: partial.r])
    fs = list(partial.f)
    singles = list(partial.e[partial.r:])
    # give the radical vectors of W partners inside U
    for k, e in enumerate(singles):
        others = es + fs + singles[:k] + singles[k + 1:]
        f = _first(u_vecs, lambda v: s.form(e, v) == 1 and all(s.form(o, v) == 0 for o in others))
        if f is None:  # pragma: no cover - excluded by Witt's theorem
            raise ValueError("no hyperbolic partner found")
        es.append(e)
        fs.append(f)
    target_r = form_rank(s, u) // 2
    while len(fs) < target_r:
        rest = intersect(u, perp(s, s.subspace(es + fs)))
        rest_rad = radical(s, rest)
        rest_vecs = [v for v in rest.vectors() if any(v)]
        e = _first(rest_vecs, lambda v: not rest_rad.contains_vector(v))
        f = _first(rest_vecs, lambda v: s.form(e, v) == 1)
        es.append(e)
        fs.append(f)
    es.extend(rad_u.rows)
    return HyperbolicBasis(tuple(es), tuple(fs))


def standard_hyperbolic_basis(s: SympSpace) -> HyperbolicBasis:
    """Unit vectors for the standard form, otherwise the deterministic extension of the empty basis."""
    if s.is_standard:
        r = s.n // 2
        e = tuple(s.unit(2 * i) for i in range(r)) + ((s.unit(s.n - 1),) if s.n % 2 else ())
        f = tuple(s.unit(2 * i + 1) for i in range(r))
        return HyperbolicBasis(e, f)
    return hyperbolic_extend(s, s.full())


def chamber_from_basis(s: SympSpace, hb: HyperbolicBasis) -> tuple[Subspace, ...]:
    h = hb.h()
    return tuple(s.subspace(h[:l]) for l in range(1, s.n))


def standard_chamber(s: SympSpace) -> tuple[Subspace, ...]:
    """``C_l = <h_1, ..., h_l>`` for l = 1..n-1, from the standard hyperbolic basis."""
    return chamber_from_basis(s, standard_hyperbolic_basis(s))


def is_isometry(s: SympSpace, g) -> bool:
    g = np.asarray(g, dtype=np.int64) % s.p
    if g.shape != (s.n, s.n) or rank(g, s.p) != s.n:
        return False
    return np.array_equal((g.T @ s.gram @ g) % s.p, s.gram)


def transvection(s: SympSpace, v, a: int = 1) -> np.ndarray:
    """Matrix of x -> x + a s(x, v) v."""
    v = np.asarray(v, dtype=np.int64)
    return (np.eye(s.n, dtype=np.int64) + a * np.outer(v, v @ s.gram.T)) % s.p


def sp_generators(s: SympSpace) -> list[np.ndarray]:
    """Symplectic transvections generating Sp(V) for nondegenerate V.

    Uses t_{e_i}, t_{f_i} for each hyperbolic pair and t_{f_i + e_{i+1}} to link
    consecutive pairs.
    """
    if s.rad_dim:
        raise ValueError("sp_generators needs a nondegenerate form")
    hb = standard_hyperbolic_basis(s)
    vecs = []
    for i in range(hb.r):
        vecs.append(hb.e[i])
        vecs.append(hb.f[i])
        if i + 1 < hb.r:
            vecs.append(tuple((a + b) % s.p for a, b in zip(hb.f[i], hb.e[i + 1])))
    return [transvection(s, v) for v in vecs]


def sp_order(q: int, r: int) -> int:
    """|Sp_{2r}(q)| = q^{r^2} prod_{i=1}^{r} (q^{2i} - 1)."""
    out = q ** (r * r)
    for i in range(1, r + 1):
        out *= q ** (2 * i) - 1
    return out


def vectors_of(s: SympSpace):
    return all_vectors(s.n, s.p)
