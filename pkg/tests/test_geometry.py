import math

import pytest

from amalgam_lab.builders import GammaSpec, build_gamma
from amalgam_lab.geometry import (IncidenceGeometry, bfs_distances, check_geometry, check_isomorphism, diameter,
                                  direct_sum, disjoint_union, find_isomorphism, has_string_diagram,
                                  is_residually_connected, is_transversal, shadow_graph)

from conftest import gamma, pi_geometry


def _geom(types, obj_types, edges):
    adj = [0] * len(obj_types)
    for i, j in edges:
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    return IncidenceGeometry(types, obj_types, adj)


def _chamber_geom():
    """One object of each of three types, all incident."""
    return _geom([1, 2, 3], [1, 2, 3], [(0, 1), (0, 2), (1, 2)])


def test_constructor_validation():
    with pytest.raises(ValueError):
        _geom([1, 2], [1, 1], [(0, 1)])  # same-type incidence
    with pytest.raises(ValueError):
        IncidenceGeometry([1], [2], [0])
    with pytest.raises(ValueError):
        IncidenceGeometry([1], [1], [1])


def test_transversal_examples():
    assert is_transversal(_geom([1], [1, 1], []))
    assert is_transversal(_chamber_geom())
    assert is_transversal(gamma(2, 4))
    lonely = _geom([1, 2], [1, 2, 1], [(0, 1)])  # object 2 sees nothing of type 2
    assert not is_transversal(lonely)


def test_residue_basics():
    g = gamma(2, 4)
    r = g.residue(())
    assert len(r) == len(g) and r.types == g.types
    chamber = next(g.chambers())
    assert len(g.residue(chamber)) == 0
    with pytest.raises(ValueError):
        g.residue((0, 1))  # two points never form a flag


def test_residue_of_residue_is_residue_of_union():
    g = gamma(2, 6)
    for chamber in list(g.chambers())[:3]:
        f1, f2 = chamber[:2], chamber[3:]
        r1 = g.residue(f1)
        local = {x: i for i, x in enumerate(r1.parent)}
        rr = r1.residue(tuple(local[x] for x in f2))
        direct = g.residue(f1 + f2)
        assert sorted(r1.parent[i] for i in rr.parent) == direct.parent
        assert rr.types == direct.types


def test_noncontiguous_cotype_residue_is_a_product():
    g = gamma(2, 6)
    for flag_type in ([3], [2, 4]):
        flag = next(g.iter_flags(flag_type))
        res = g.residue(flag)
        # split cotype into maximal runs of consecutive types
        runs, cur = [], []
        for t in res.types:
            if cur and t != cur[-1] + 1:
                runs.append(cur)
                cur = []
            cur.append(t)
        runs.append(cur)
        assert len(runs) >= 2
        for a in range(len(runs)):
            for b in range(a + 1, len(runs)):
                for x in range(len(res)):
                    if res.obj_types[x] not in runs[a]:
                        continue
                    for y in range(len(res)):
                        if res.obj_types[y] in runs[b]:
                            assert res.incident(x, y)


def test_residual_connectedness_examples():
    assert is_residually_connected(gamma(2, 4))
    assert is_residually_connected(gamma(3, 4))
    two = disjoint_union(_chamber_geom(), _chamber_geom())
    assert not is_residually_connected(two)
    assert not two.connected()


def test_string_diagram_examples():
    rank2 = _geom([1, 2], [1, 2, 1, 2], [(0, 1), (2, 3)])
    assert has_string_diagram(rank2)
    assert has_string_diagram(gamma(2, 4))
    # X(1) - Y(2) - Z(3) with X and Z not incident
    bad = _geom([1, 2, 3], [1, 2, 3], [(0, 1), (1, 2)])
    assert not has_string_diagram(bad)


def test_shadow_diameters():
    _, adj = shadow_graph(gamma(2, 4), 1, 2)
    assert diameter(adj) == 2
    plane = build_gamma(GammaSpec(2, 2), include_ambient=True)
    _, adj = shadow_graph(plane, 1, 2)
    assert diameter(adj) == 1
    pi = pi_geometry(2, 6)
    pts, adj = shadow_graph(pi, 1, 2)
    full = (1 << len(pts)) - 1
    assert all(a | (1 << i) == full for i, a in enumerate(adj))  # complete graph
    assert diameter(adj) == 1
    with pytest.raises(ValueError):
        shadow_graph(pi, 1, 9)


def test_bfs_disconnected_is_infinite():
    adj = [0b10, 0b01, 0]
    assert bfs_distances(adj, 0) == [0, 1, math.inf]
    assert diameter(adj) == math.inf


def test_flag_counts_and_iteration():
    g = gamma(2, 4)
    for types in ([1], [1, 2], [1, 3], [1, 2, 3]):
        assert g.count_flags(types) == sum(1 for _ in g.iter_flags(types))
    assert g.count_flags([1, 2, 3]) == 180
    every = list(g.iter_flags())
    assert () in every and all(g.is_flag(f) for f in every)


def test_direct_sum_and_union():
    a = _geom(["a"], ["a", "a"], [])
    b = _geom(["b"], ["b"], [])
    s = direct_sum(a, b)
    assert s.incident(0, 2) and s.incident(1, 2) and not s.incident(0, 1)
    with pytest.raises(ValueError):
        direct_sum(a, a)


def test_json_roundtrip():
    g = gamma(2, 4)
    text = g.dumps()
    h = IncidenceGeometry.from_json(text)
    assert h.adj == g.adj and h.obj_types == g.obj_types
    assert h.dumps() == text
    data = g.to_json()
    assert data["schema"] == "geom/1"
    keys = [(o["type"], o["basis_rows"]) for o in data["objects"]]
    assert keys == sorted(keys)
    with pytest.raises(ValueError):
        IncidenceGeometry.from_json({"schema": "other"})


def test_isomorphism_search_finds_relabelling(rng):
    g = gamma(2, 4)
    perm = [int(x) for x in rng.permutation(len(g))]
    inv = [0] * len(g)
    for i, j in enumerate(perm):
        inv[j] = i
    adj = [0] * len(g)
    for i in range(len(g)):
        for j in range(len(g)):
            if g.adj[i] >> j & 1:
                adj[perm[i]] |= 1 << perm[j]
    h = IncidenceGeometry(g.types, [g.obj_types[inv[k]] for k in range(len(g))], adj)
    iso = find_isomorphism(g, h)
    assert iso is not None and check_isomorphism(g, h, iso)


def test_isomorphism_search_rejects_nonisomorphic():
    path = _geom([1, 2], [1, 2, 1, 2], [(0, 1), (1, 2), (2, 3)])
    split = _geom([1, 2], [1, 2, 1, 2], [(0, 1), (2, 3), (0, 3)])
    assert find_isomorphism(path, split) is not None  # both are paths of length 3
    other_path = _geom([1, 2], [1, 2, 1, 2], [(0, 1), (0, 3), (2, 1)])
    cyc = _geom([1, 2], [1, 2, 1, 2], [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert find_isomorphism(other_path, cyc) is None
    assert not check_isomorphism(path, split, [0, 1, 2, 3])


@pytest.mark.parametrize("q,n", [(2, 4), (3, 4), (2, 6)])
def test_check_geometry_suite(q, n):
    rep = check_geometry(gamma(q, n))
    assert rep.ok(expected_diameter=2)
