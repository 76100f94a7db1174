"""Finite matrix groups over GF(p), enumerated by closure."""

from __future__ import annotations

import numpy as np

from .fpgroups.cayley import CayleyGraph, cayley_graph
from .linalg import mat_inv


def mat_key(m: np.ndarray) -> bytes:
    return np.ascontiguousarray(m, dtype=np.int64).tobytes()


def block_embed(block, n: int, start: int) -> np.ndarray:
    """Identity of size ``n`` with ``block`` placed on the diagonal at ``start``."""
    block = np.asarray(block, dtype=np.int64)
    g = np.eye(n, dtype=np.int64)
    k = block.shape[0]
    g[start:start + k, start:start + k] = block
    return g


class MatrixGroup:
    """The group generated by ``gens`` (invertible n x n matrices mod p), fully enumerated."""

    def __init__(self, gens, p: int, n: int | None = None, name: str = ""):
        gens = [np.asarray(g, dtype=np.int64) % p for g in gens]
        if n is None:
            n = gens[0].shape[0]
        self.p, self.n, self.name = p, n, name
        self.gens = gens
        self.identity = np.eye(n, dtype=np.int64)
        self.cayley: CayleyGraph = cayley_graph(gens, self.mul, self.identity, mat_key)

    def mul(self, a, b):
        return (a @ b) % self.p

    def inv(self, a):
        return mat_inv(a, self.p)

    @property
    def order(self) -> int:
        return self.cayley.order

    @property
    def elements(self) -> list:
        return self.cayley.elements

    def keys(self) -> set:
        return set(self.cayley.index)

    def contains(self, m) -> bool:
        return mat_key(np.asarray(m, dtype=np.int64) % self.p) in self.cayley.index

    def contains_group(self, other: "MatrixGroup") -> bool:
        return all(self.contains(g) for g in other.gens)

    def equals(self, other: "MatrixGroup") -> bool:
        return self.order == other.order and self.contains_group(other)

    def is_abelian(self) -> bool:
        return all(np.array_equal(self.mul(a, b), self.mul(b, a)) for a in self.gens for b in self.gens)

    def center(self) -> list:
        return [z for z in self.elements
                if all(np.array_equal(self.mul(z, g), self.mul(g, z)) for g in self.gens)]

    def commutator(self, a, b):
        return self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))

    def derived_subgroup(self) -> "MatrixGroup":
        """[G, G] generated by all commutators (meant for small groups)."""
        comms = {}
        for a in self.elements:
            for b in self.elements:
                c = self.commutator(a, b)
                comms.setdefault(mat_key(c), c)
        gens = list(comms.values()) or [self.identity]
        return MatrixGroup(gens, self.p, self.n)

    def element_orders(self) -> list[int]:
        out = []
        for g in self.elements:
            k, h = 1, g
            while not np.array_equal(h, self.identity):
                h = self.mul(h, g)
                k += 1
            out.append(k)
        return out

    def exponent_is_prime(self) -> bool:
        return all(o in (1, self.p) for o in self.element_orders())

    def intersection_keys(self, other: "MatrixGroup") -> set:
        return self.keys() & other.keys()

    def __repr__(self):
        return f"MatrixGroup({self.name or 'unnamed'}, order={self.order})"


def subgroup_from_elements(elements, p: int, n: int) -> MatrixGroup:
    """Group generated by a set of matrices, keeping a small greedy generating set."""
    gens = greedy_generators(elements, p, n)
    return MatrixGroup(gens or [np.eye(n, dtype=np.int64)], p, n)


def greedy_generators(elements, p: int, n: int) -> list:
    """Pick elements in order, keeping one only when it enlarges the generated group."""
    target = {mat_key(np.asarray(e) % p) for e in elements}
    gens: list = []
    have = {mat_key(np.eye(n, dtype=np.int64))}
    for e in elements:
        k = mat_key(np.asarray(e) % p)
        if k in have:
            continue
        gens.append(np.asarray(e) % p)
        have = set(MatrixGroup(gens, p, n).cayley.index)
        if target <= have:
            break
    return gens


def sl2_generators(p: int) -> list:
    return [np.array([[1, 1], [0, 1]], dtype=np.int64), np.array([[1, 0], [1, 1]], dtype=np.int64)]
