from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
import pytest

from amalgam_lab.builders import GammaSpec, PiSpec, build_gamma, build_pi


# -- cached geometries shared by several test modules --------------------------

@lru_cache(maxsize=None)
def gamma(q: int, n: int):
    return build_gamma(GammaSpec(q, n))


@lru_cache(maxsize=None)
def pi_geometry(q: int, n: int):
    return build_pi(PiSpec(GammaSpec(q, n)))


@lru_cache(maxsize=None)
def action(q: int, n: int):
    from amalgam_lab.action import build_action

    return build_action(q, n)


@lru_cache(maxsize=None)
def cover():
    from amalgam_lab.cover import build_cover

    return build_cover()


# -- independent oracles ---------------------------------------------------------

def span_set(vectors, p: int, n: int) -> frozenset:
    """All vectors in the span, by closing under addition and scaling."""
    out = {tuple([0] * n)}
    for v in vectors:
        v = tuple(int(x) % p for x in v)
        new = set(out)
        for w in out:
            for a in range(1, p):
                new.add(tuple((x + a * y) % p for x, y in zip(w, v)))
        out = new
    return frozenset(out)


def naive_rank(rows, p: int) -> int:
    """Row rank by repeated elimination on a list copy, without pivot bookkeeping."""
    rows = [[int(x) % p for x in r] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in rows if r[c]), None)
        if piv is None:
            continue
        rows.remove(piv)
        inv = pow(piv[c], p - 2, p)
        piv = [(x * inv) % p for x in piv]
        rows = [[(x - r[c] * y) % p for x, y in zip(r, piv)] for r in rows]
        rank += 1
    return rank


def form_value(gram, x, y, p: int) -> int:
    return int(np.asarray(x) @ gram @ np.asarray(y)) % p


@lru_cache(maxsize=None)
def brute_gamma_objects(q: int, n: int) -> list:
    """Gamma objects as (vector set, radical vector set), straight from the definitions."""
    from amalgam_lab.symplectic import standard_gram

    gram = standard_gram(n, q)
    vecs = [v for v in itertools.product(range(q), repeat=n)]
    rad_v = {v for v in vecs if all(form_value(gram, v, w, q) == 0 for w in vecs)}
    nonzero = [v for v in vecs if any(v)]
    level = {span_set([v], q, n) for v in nonzero}
    spaces = set(level)
    for _ in range(2, n):
        level = {span_set(list(s) + [v], q, n) for s in level for v in nonzero if v not in s}
        spaces |= level
    out = []
    for s in spaces:
        rad = frozenset(u for u in s if all(form_value(gram, u, w, q) == 0 for w in s))
        if len(rad) > q:
            continue
        if any(any(u) and u in rad_v for u in s):
            continue
        out.append((s, rad))
    return out


def brute_dim(space, q: int) -> int:
    return round(np.log(len(space)) / np.log(q))


def brute_gamma_counts(q: int, n: int) -> tuple:
    counts = [0] * (n - 1)
    for s, _ in brute_gamma_objects(q, n):
        counts[brute_dim(s, q) - 1] += 1
    return tuple(counts)


def brute_chamber_count(q: int, n: int) -> int:
    """Chains X_1 < ... < X_{n-1} with X_i inside X_{i+1} and meeting Rad(X_{i+1}) only in 0."""
    objs = brute_gamma_objects(q, n)
    by_dim = [[] for _ in range(n)]
    for s, rad in objs:
        by_dim[brute_dim(s, q)].append((s, rad))
    zero = {tuple([0] * n)}
    # ways[k][i]: chains ending at object i of dimension k
    ways = {i: 1 for i in range(len(by_dim[1]))}
    for k in range(2, n):
        nxt = {}
        for j, (y, rad_y) in enumerate(by_dim[k]):
            total = 0
            for i, (x, _) in enumerate(by_dim[k - 1]):
                if x <= y and (x & rad_y) <= zero:
                    total += ways[i]
            nxt[j] = total
        ways = nxt
    return sum(ways.values())


def closure(gens, mul, key):
    """Brute-force closure of a generating set under multiplication."""
    gens = list(gens)
    seen = {key(g): g for g in gens}
    frontier = list(gens)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = mul(a, g)
                k = key(c)
                if k not in seen:
                    seen[k] = c
                    nxt.append(c)
        frontier = nxt
    return list(seen.values())


def perm_mul(a, b):
    """Apply ``a`` then ``b`` (tuples)."""
    return tuple(b[i] for i in a)


def perm_closure(gens) -> list:
    return closure([tuple(g) for g in gens], perm_mul, lambda x: x)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240501)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
