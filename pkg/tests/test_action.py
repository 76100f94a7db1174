import itertools

import numpy as np
import pytest

from amalgam_lab.action import (action_on_gamma, borel, check_flag_transitivity, flag_orbit, flag_stabilizer,
                                group_matrices, kernel_order, m_pi, object_action_order, parabolic,
                                parabolic_names, preserves_incidence, q_minus_elements, slim_groups,
                                sp_order_check, verify_parabolic_structure, verify_slim_structure,
                                vector_stabilizer_sp4)
from amalgam_lab.builders import GammaSpec
from amalgam_lab.symplectic import SympSpace, sp_order

from conftest import action, closure, gamma

INSTANCES = [(2, 4), (3, 4), (2, 6)]


def _hyperbolic_basis_count(q, n):
    """Independent |Sp_n(q)|: ordered choices of e_1, then f_1, then recursion in the perp."""
    return 1 if n == 0 else (q ** n - 1) * q ** (n - 1) * _hyperbolic_basis_count(q, n - 2)


def test_identity_and_minus_identity():
    act = action(3, 4)
    ident = act.perm_of(np.eye(4, dtype=int))
    assert np.array_equal(ident, np.arange(act.degree))
    minus = act.perm_of(-np.eye(4, dtype=int))
    assert np.array_equal(act.object_perm(minus), np.arange(len(act.gamma)))
    assert not np.array_equal(minus[:act.nvec], np.arange(act.nvec))


def test_non_isometry_rejected():
    spec = GammaSpec(2, 4)
    with pytest.raises(ValueError):
        action_on_gamma(spec.space(), gamma(2, 4), gens=[np.diag([1, 1, 1, 1]) + np.eye(4, k=1, dtype=int)])


def test_generators_preserve_incidence_and_random_perm_does_not(rng):
    act = action(2, 4)
    for p in act.perms:
        assert preserves_incidence(act.gamma, act.object_perm(p))
    shuffled = rng.permutation(len(act.gamma))
    assert not preserves_incidence(act.gamma, shuffled)


@pytest.mark.parametrize("q,n,order", [(2, 4, 720), (3, 4, 51840), (2, 6, 1451520)])
def test_group_order(q, n, order):
    act = action(q, n)
    assert act.group.order() == order == sp_order(q, n // 2) == _hyperbolic_basis_count(q, n)
    assert sp_order_check(act).ok


@pytest.mark.parametrize("q,n,b,k", [(2, 4, 4, 1), (3, 4, 36, 2), (2, 6, 8, 1)])
def test_borel_and_kernel(q, n, b, k):
    act = action(q, n)
    assert borel(act).order() == b == (q * (q - 1)) ** (n // 2)
    assert kernel_order(act) == k
    assert object_action_order(act) * k == act.group.order()


@pytest.mark.parametrize("q,n", INSTANCES)
def test_flag_transitivity(q, n):
    act = action(q, n)
    rep = check_flag_transitivity(act)
    assert rep.ok
    assert len(rep.per_type) == 2 ** (n - 1) - 1
    chambers = {(2, 4): 180, (3, 4): 1440, (2, 6): 181440}[(q, n)]
    assert rep.per_type[tuple(act.gamma.types)] == (chambers, chambers)


def test_flag_orbits_by_direct_search():
    act = action(2, 4)
    for k in range(1, 4):
        for J in itertools.combinations(act.gamma.types, k):
            assert flag_orbit(act, act.chamber_flag(J)) == act.gamma.count_flags(J)
    act3 = action(3, 4)
    assert flag_orbit(act3, act3.chamber) == 1440


def test_point_stabilizer_order():
    act = action(2, 4)
    p = act.gamma.objects_of_type(1)[0]
    assert flag_stabilizer(act, (p,)).order() == 48 == 720 // 15


@pytest.mark.parametrize("q,n", INSTANCES)
def test_orbit_stabilizer_random_objects(q, n, rng):
    act = action(q, n)
    order = act.group.order()
    for x in rng.choice(len(act.gamma), size=20, replace=False):
        x = int(x)
        orb = act.group.orbit(act.obj_point(x))
        stab = flag_stabilizer(act, (x,)).order()
        assert len(orb) * stab == order
        assert len(orb) == len(act.gamma.objects_of_type(act.gamma.obj_types[x]))


def test_borel_structure_gf3():
    """Each 2x2 block [[a, b], [0, 1/a]] over GF(3) contains -I, so B is C_6 x C_6 (abelian)."""
    act = action(3, 4)
    mats = group_matrices(act, borel(act))
    counts = {}
    ident = np.eye(4, dtype=np.int64)
    for m in mats:
        k, x = 1, m % 3
        while not np.array_equal(x, ident):
            x = (x @ m) % 3
            k += 1
        counts[k] = counts.get(k, 0) + 1
    assert counts == {1: 1, 2: 3, 3: 8, 6: 24}
    assert all(np.array_equal((a @ b) % 3, (b @ a) % 3) for a in mats for b in mats)
    for m in mats:  # upper triangular 2x2 blocks on the diagonal, zero elsewhere
        assert not m[0, 2:].any() and not m[2, :2].any() and m[1, 0] == 0 and m[3, 2] == 0


def test_parabolic_orders_match_flag_census():
    act = action(3, 4)
    order = act.group.order()
    for name, J in parabolic_names(2).items():
        keep = [t for t in act.gamma.types if t not in J]
        assert parabolic(act, J).order() == order // act.gamma.count_flags(keep), name


def test_parabolic_structure_gf3():
    act = action(3, 4)
    rep = verify_parabolic_structure(act)
    assert rep.asserted and rep.ok, rep.failures
    got = {c.name: c.got for c in rep.checks}
    assert got["|S1|"] == 144 == 24 * 6
    assert got["|M1|"] == 108
    assert got["Q11 = <M1, S1>"] == got["|Q11|"]


@pytest.mark.parametrize("q,n", [(2, 4), (2, 6)])
def test_parabolic_structure_gf2_is_reported_only(q, n):
    rep = verify_parabolic_structure(action(q, n))
    assert not rep.asserted
    assert rep.notes
    assert rep.to_json()["checks"]


@pytest.mark.parametrize("q,n", [(2, 4), (3, 4), (2, 6), (3, 6)])
def test_slim_structure(q, n):
    rep = verify_slim_structure(SympSpace.standard(q, n))
    assert rep.ok, rep.failures


def test_slim_orders_examples():
    g3 = slim_groups(3, 4)
    assert g3["Q11"].order == 648 == 27 * 24
    assert {k: g3[k].order for k in ("S1", "S2", "M1", "S12", "Q11", "Q12")} == {
        "S1": 24, "S2": 24, "M1": 27, "S12": 576, "Q11": 648, "Q12": 648}
    assert slim_groups(2, 6)["M12"].order == 32


def test_slim_intersections_gf3_n6():
    g = slim_groups(3, 6)
    a = g["S2"].intersection_keys(g["M2"])
    b = g["S2"].intersection_keys(g["M1"])
    c = g["M2"].intersection_keys(g["M1"])
    assert a == b == c and len(a) == 3


def test_m_pi_group_is_elementary_abelian_by_closure():
    mul = lambda x, y: (x @ y) % 3
    gens = [m_pi(3, 1, 0, 0), m_pi(3, 0, 1, 0), m_pi(3, 0, 0, 1)]
    elems = closure(gens, mul, lambda m: m.tobytes())
    assert len(elems) == 27
    assert all(np.array_equal(mul(a, b), mul(b, a)) for a in elems[:10] for b in elems)


def test_q_minus_matches_vector_stabilizer():
    for q in (2, 3):
        qm = {m.tobytes() for m in q_minus_elements(q)}
        st = {(m % q).astype(np.int64).tobytes() for m in vector_stabilizer_sp4(q)}
        assert qm == st
        assert len(qm) == q ** 3 * q * (q * q - 1)


def test_slim_structure_rejects_odd_dimension():
    with pytest.raises(ValueError):
        verify_slim_structure(SympSpace.standard(2, 5))
