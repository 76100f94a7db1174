"""Words and finite presentations.

A word is a tuple of nonzero ints: ``i`` stands for generator ``i`` (1-based)
and ``-i`` for its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

Word = tuple


def free_reduce(w) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(w) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i:j + 1]


def invert(w) -> Word:
    return tuple(-x for x in reversed(w))


def concat(*words) -> Word:
    out: tuple = ()
    for w in words:
        out = out + tuple(w)
    return free_reduce(out)


def power(w, k: int) -> Word:
    if k < 0:
        return power(invert(w), -k)
    return free_reduce(tuple(w) * k)


def commutator(a, b) -> Word:
    """[a, b] = a^-1 b^-1 a b."""
    return concat(invert(a), invert(b), a, b)


def canonical_cyclic(w) -> Word:
    """Lexicographically least cyclic rotation of ``w`` or of its inverse.

    Two cyclically reduced relators define the same normal closure generator
    when their canonical forms agree.
    """
    w = cyclic_reduce(w)
    if not w:
        return w
    best = None
    for v in (w, invert(w)):
        for k in range(len(v)):
            r = v[k:] + v[:k]
            if best is None or r < best:
                best = r
    return best


def exponent_sums(w, ngens: int) -> list[int]:
    row = [0] * ngens
    for x in w:
        row[abs(x) - 1] += 1 if x > 0 else -1
    return row


def evaluate(w, images, mul, inv, identity):
    """Evaluate ``w`` in a concrete group given generator ``images`` and the group operations."""
    out = identity
    for x in w:
        g = images[abs(x) - 1]
        out = mul(out, g if x > 0 else inv(g))
    return out


@dataclass(frozen=True)
class Presentation:
    """Generators ``1..ngens`` and a tuple of freely reduced, nonempty relators."""

    ngens: int
    relators: tuple = ()

    def __post_init__(self):
        rels = []
        for r in self.relators:
            r = free_reduce(r)
            for x in r:
                if not isinstance(x, int) or x == 0 or abs(x) > self.ngens:
                    raise ValueError(f"letter {x!r} out of range for {self.ngens} generators")
            if r:
                rels.append(r)
        object.__setattr__(self, "relators", tuple(rels))

    @property
    def total_length(self) -> int:
        return sum(len(r) for r in self.relators)

    def to_text(self) -> str:
        lines = [f"gens {self.ngens}"]
        lines.extend(" ".join(str(x) for x in r) for r in self.relators)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Presentation":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("gens "):
            raise ValueError("presentation text must start with 'gens k'")
        k = int(lines[0].split()[1])
        rels = [tuple(int(t) for t in line.split()) for line in lines[1:] if line.strip()]
        return cls(k, tuple(rels))

    def add_relators(self, extra) -> "Presentation":
        return Presentation(self.ngens, self.relators + tuple(tuple(r) for r in extra))

    def __str__(self):
        return f"<{self.ngens} gens | {len(self.relators)} relators, length {self.total_length}>"
