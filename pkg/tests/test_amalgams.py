import json

import numpy as np
import pytest

from amalgam_lab.amalgams import (INCONCLUSIVE, MANIFEST_SCHEMA, NO, YES, Amalgam, build_parabolic_amalgam,
                                  build_slim_amalgam, check_coherence, completion_presentation, manifest,
                                  vector_permutation, verify_completion)
from amalgam_lab.fpgroups import group_order
from amalgam_lab.symplectic import SympSpace

from conftest import action


def _slim(q, n):
    return build_slim_amalgam(SympSpace.standard(q, n))


def test_maximal_parabolics_gf2():
    a = build_parabolic_amalgam(action(2, 4), maximal=True)
    assert {x: a.order(x) for x in a.members} == {"P1": 12, "P2": 8, "P3": 12, "P12": 48, "P13": 36, "P23": 48}
    assert sorted(a.maximal()) == ["P12", "P13", "P23"]
    assert check_coherence(a).ok
    v = verify_completion(a)
    assert v.iso == YES and v.completion_order == 720 and v.index == 15


def test_maximal_parabolic_completion_by_full_enumeration():
    """Second route: enumerate cosets of the trivial subgroup, i.e. count the whole completion."""
    a = build_parabolic_amalgam(action(2, 4), maximal=True)
    assert group_order(completion_presentation(a).presentation, max_cosets=50_000) == 720


def test_slim_amalgam_gf3_orders_and_coherence():
    a = _slim(3, 4)
    assert {x: a.order(x) for x in a.members} == {
        "S1": 24, "S2": 24, "M1": 27, "S12": 576, "Q11": 648, "Q12": 648}
    assert a.below == {"S12": ["S1", "S2"], "Q11": ["M1", "S1"], "Q12": ["M1", "S2"]}
    rep = check_coherence(a)
    assert rep.ok and len(rep.injective) == 6
    assert a.asserted


@pytest.mark.parametrize("relative_to,index", [("Q11", 80), ("S12", 90)])
def test_slim_completion_gf3(relative_to, index):
    v = verify_completion(_slim(3, 4), relative_to=relative_to)
    assert v.relators_killed and v.surjective
    assert v.index == index and v.completion_order == 51840
    assert v.iso == YES and v.verified


def test_slim_completion_explicit_identifications():
    a = _slim(3, 4)
    cp = completion_presentation(a, shared=False)
    assert cp.mode == "explicit"
    # every generator of a smaller member is tied to a word in each larger member
    assert {(s, b) for s, b, _, _ in cp.identifications} == set(a.inclusions())
    v = verify_completion(a, cp=cp)
    assert v.iso == YES and v.completion_order == 51840


def test_shared_symbols_realise_inclusions():
    a = _slim(3, 4)
    cp = completion_presentation(a)
    for small, big in a.inclusions():
        assert set(cp.member_gens[small]) <= set(cp.member_gens[big])
    for k, m in enumerate(cp.images, start=1):
        owners = [x for x, syms in cp.member_gens.items() if k in syms]
        assert all(a.members[x].contains(m) for x in owners)


def test_rank_two_parabolics_gf3():
    a = build_parabolic_amalgam(action(3, 4), max_rank=2)
    assert len(a.members) == 1 + 3 + 3
    assert a.order("P0") == 36
    v = verify_completion(a)
    assert v.iso == YES and v.completion_order == 51840


def test_slim_gf2_reported_not_asserted():
    a = _slim(2, 4)
    assert {x: a.order(x) for x in a.members} == {"S1": 6, "S2": 6, "M1": 8, "S12": 36, "Q11": 48, "Q12": 48}
    assert not a.asserted
    v = verify_completion(a)
    assert not v.asserted and v.notes
    assert v.completion_order == 720


def test_slim_member_count_n6():
    a = _slim(2, 6)
    # S1..S3, M1, M2, S_jl (3), M12, Q_ij (2 x 3)
    assert len(a.members) == 3 + 2 + 3 + 1 + 6
    assert check_coherence(a).ok


def test_too_small_amalgam_is_not_sp():
    a = _slim(3, 4)
    sub = Amalgam("S-only", 3, 4, {x: a.members[x] for x in ("S1", "S2", "S12")}, {"S12": ["S1", "S2"]})
    v = verify_completion(sub)
    assert v.completion_order == 576 and v.iso == NO and not v.surjective


def test_tiny_budget_is_inconclusive():
    v = verify_completion(_slim(3, 4), max_cosets=20)
    assert v.iso == INCONCLUSIVE and v.completion_order is None and v.notes


def test_manifest_schema():
    a = _slim(3, 4)
    cp = completion_presentation(a)
    v = verify_completion(a, cp=cp)
    m = json.loads(json.dumps(manifest(a, cp, v)))
    assert m["schema"] == MANIFEST_SCHEMA == "amalgam/1"
    assert {x["name"] for x in m["members"]} == set(a.members)
    assert m["verdict"]["iso"] == YES
    assert len(m["generator_matrices"]) == m["completion"]["ngens"]


def test_vector_permutation_matches_direct_action(rng):
    p, n = 3, 4
    g = np.array([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 2], [0, 0, 0, 1]])
    perm = vector_permutation(g, p, n)
    assert sorted(perm) == list(range(p ** n - 1))
    for code in rng.integers(1, p ** n, size=20):
        v = np.array([(int(code) // p ** i) % p for i in range(n)])
        w = (g @ v) % p
        assert perm[int(code) - 1] == int(sum(int(x) * p ** i for i, x in enumerate(w))) - 1


def test_slim_rejects_unsupported():
    with pytest.raises(ValueError):
        build_slim_amalgam(SympSpace.standard(5, 4))
