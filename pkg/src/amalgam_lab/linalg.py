"""Exact linear algebra over small prime fields.

Vectors are tuples of ints in ``[0, p)``.  Matrices are numpy integer arrays
reduced mod ``p``.  A :class:`Subspace` is stored by the nonzero rows of its
reduced row echelon form, which makes equality and hashing canonical.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

SUPPORTED_PRIMES = (2, 3, 5, 7)


class PrimeField:
    """The field GF(p) for one of the supported small primes."""

    def __init__(self, p: int):
        if p not in SUPPORTED_PRIMES:
            raise ValueError(f"unsupported field size {p}; expected one of {SUPPORTED_PRIMES}")
        self.p = p
        self.elements = tuple(range(p))
        self.add_table = np.array([[(a + b) % p for b in range(p)] for a in range(p)])
        self.mul_table = np.array([[(a * b) % p for b in range(p)] for a in range(p)])
        self._inv = {a: pow(a, p - 2, p) for a in range(1, p)}

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self._inv[a % self.p]

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"


def as_matrix(m, p: int) -> np.ndarray:
    a = np.array(m, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else np.zeros((0, 0), dtype=np.int64)
    return a % p


def rref(m, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form of ``m`` over GF(p).

    Returns the reduced matrix (same shape, zero rows at the bottom) and the
    tuple of pivot columns.
    """
    a = as_matrix(m, p).copy()
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * pow(int(a[r, c]), p - 2, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        if col.any():
            a = (a - np.outer(col, a[r])) % p
        pivots.append(c)
        r += 1
    return a, tuple(pivots)


def rank(m, p: int) -> int:
    return len(rref(m, p)[1])


def nullspace(m, p: int) -> list[tuple[int, ...]]:
    """Basis of ``{x : m x = 0}`` over GF(p)."""
    a = as_matrix(m, p)
    ncols = a.shape[1]
    red, pivots = rref(a, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = int(-red[i, f]) % p
        basis.append(tuple(v))
    return basis


def mat_inv(m, p: int) -> np.ndarray:
    a = as_matrix(m, p)
    n = a.shape[0]
    red, pivots = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != tuple(range(n)):
        raise ValueError("matrix is singular")
    return red[:, n:]


def all_vectors(n: int, p: int):
    """All vectors of GF(p)^n in lexicographic order."""
    return itertools.product(range(p), repeat=n)


def normalize(v, p: int) -> tuple[int, ...]:
    """Scale a nonzero vector so its first nonzero entry is 1."""
    for x in v:
        if x % p:
            s = pow(int(x), p - 2, p)
            return tuple((s * y) % p for y in v)
    raise ValueError("zero vector has no projective point")


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of GF(p)^n in canonical (RREF) form."""

    p: int
    ambient_dim: int
    rows: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, vectors, p: int, n: int) -> "Subspace":
        vectors = [tuple(int(x) % p for x in v) for v in vectors]
        if not vectors:
            return cls(p, n, ())
        for v in vectors:
            if len(v) != n:
                raise ValueError(f"vector {v} is not in GF({p})^{n}")
        red, piv = rref(vectors, p)
        return cls(p, n, tuple(tuple(int(x) for x in red[i]) for i in range(len(piv))))

    @classmethod
    def zero(cls, p: int, n: int) -> "Subspace":
        return cls(p, n, ())

    @classmethod
    def full(cls, p: int, n: int) -> "Subspace":
        return cls(p, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @cached_property
    def key(self) -> bytes:
        return bytes([self.ambient_dim, self.dim]) + bytes(x for r in self.rows for x in r)

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, x in enumerate(r) if x) for r in self.rows)

    @property
    def basis(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.ambient_dim), dtype=np.int64)
        return np.array(self.rows, dtype=np.int64)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.p == other.p and self.key == other.key

    def __hash__(self):
        return hash((self.p, self.key))

    def __lt__(self, other):
        return (self.dim, self.key) < (other.dim, other.key)

    def __repr__(self):
        return f"Subspace(GF({self.p})^{self.ambient_dim}, rows={list(self.rows)})"

    def contains_vector(self, v) -> bool:
        """Membership test by reducing ``v`` against the RREF rows."""
        p = self.p
        w = [int(x) % p for x in v]
        for r, c in zip(self.rows, self.pivots):
            a = w[c]
            if a:
                w = [(x - a * y) % p for x, y in zip(w, r)]
        return not any(w)

    def vectors(self):
        """Every vector of the subspace, including zero."""
        p, n = self.p, self.ambient_dim
        for coeffs in itertools.product(range(p), repeat=self.dim):
            v = [0] * n
            for a, r in zip(coeffs, self.rows):
                if a:
                    for i, x in enumerate(r):
                        v[i] = (v[i] + a * x) % p
            yield tuple(v)

    def points(self) -> list[tuple[int, ...]]:
        """Normalized representatives of the 1-spaces of this subspace."""
        p = self.p
        out = []
        for coeffs in itertools.product(range(p), repeat=self.dim):
            first = next((a for a in coeffs if a), 0)
            if first != 1:
                continue
            v = [0] * self.ambient_dim
            for a, r in zip(coeffs, self.rows):
                if a:
                    for i, x in enumerate(r):
                        v[i] = (v[i] + a * x) % p
            out.append(tuple(v))
        return out

    def image(self, g) -> "Subspace":
        """Image under the matrix ``g`` acting on column vectors."""
        if not self.rows:
            return self
        g = np.asarray(g, dtype=np.int64)
        return Subspace.span((self.basis @ g.T) % self.p, self.p, self.ambient_dim)


def _check_ambient(u: Subspace, w: Subspace):
    if u.p != w.p or u.ambient_dim != w.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")


def subspace_sum(u: Subspace, w: Subspace) -> Subspace:
    _check_ambient(u, w)
    return Subspace.span(u.rows + w.rows, u.p, u.ambient_dim)


def intersect(u: Subspace, w: Subspace) -> Subspace:
    _check_ambient(u, w)
    p, n = u.p, u.ambient_dim
    if u.dim == 0 or w.dim == 0:
        return Subspace.zero(p, n)
    # x = a.U = b.W  <=>  (a, b) in the left kernel of [U; -W]
    stacked = np.vstack([u.basis, (-w.basis) % p])
    kernel = nullspace(stacked.T, p)
    vecs = [(np.array(k[: u.dim], dtype=np.int64) @ u.basis) % p for k in kernel]
    return Subspace.span(vecs, p, n)


def contains(u: Subspace, w: Subspace) -> bool:
    """True iff ``w`` is a subspace of ``u``."""
    _check_ambient(u, w)
    return all(u.contains_vector(r) for r in w.rows)


def meets_trivially(u: Subspace, w: Subspace) -> bool:
    _check_ambient(u, w)
    if u.dim + w.dim > u.ambient_dim:
        return False
    return subspace_sum(u, w).dim == u.dim + w.dim


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def enumerate_subspaces(n: int, k: int, p: int):
    """Yield every k-dimensional subspace of GF(p)^n, one RREF pivot pattern at a time."""
    if k == 0:
        yield Subspace.zero(p, n)
        return
    for pivots in itertools.combinations(range(n), k):
        free = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
        for vals in itertools.product(range(p), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, c), a in zip(free, vals):
                rows[i][c] = a
            yield Subspace(p, n, tuple(tuple(r) for r in rows))
