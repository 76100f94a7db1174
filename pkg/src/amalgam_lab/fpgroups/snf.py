"""Smith normal form over the integers and abelian invariants of presentations."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .presentation import Presentation, exponent_sums


def smith_diagonal(matrix) -> list[int]:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix.

    Plain elimination with row and column operations on Python ints; pivots are
    chosen of least absolute value so entries stay small.
    """
    a = [list(map(int, row)) for row in matrix]
    if not a or not a[0]:
        return []
    m, n = len(a), len(a[0])
    diag = []
    t = 0
    while t < min(m, n):
        # least nonzero pivot in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            piv = a[t][t]
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // piv
                    if q:
                        rt = a[t]
                        a[i] = [x - q * y for x, y in zip(a[i], rt)]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // piv
                    if q:
                        for row in a:
                            row[j] -= q * row[t]
                    if a[t][j]:
                        done = False
            if done:
                # divisibility of the remaining block by the pivot
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if a[i][j] % piv:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad])]
                continue
            # move the smallest nonzero entry of row/column t into the pivot
            cands = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
            cands += [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
            _, i, j = min(cands)
            if i != t:
                a[t], a[i] = a[i], a[t]
            if j != t:
                for row in a:
                    row[t], row[j] = row[j], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    # normalize to a divisibility chain (already is, but be defensive)
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            g = gcd(diag[i], diag[j])
            l = diag[i] * diag[j] // g if g else 0
            diag[i], diag[j] = g, l
    return diag


@dataclass(frozen=True)
class AbelianInvariants:
    torsion: tuple
    free_rank: int

    @property
    def trivial(self) -> bool:
        return not self.torsion and self.free_rank == 0

    @property
    def order(self) -> int | None:
        """Order of the abelianization, ``None`` when infinite."""
        if self.free_rank:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out


def abelian_invariants(matrix, ncols: int) -> AbelianInvariants:
    diag = smith_diagonal(matrix) if matrix else []
    return AbelianInvariants(tuple(d for d in diag if d > 1), ncols - len(diag))


def abelianization(pres: Presentation) -> AbelianInvariants:
    """Torsion coefficients and free rank of G/[G, G] from the relator exponent matrix."""
    rows = [exponent_sums(r, pres.ngens) for r in pres.relators]
    return abelian_invariants(rows, pres.ngens)
