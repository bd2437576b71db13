import random

import pytest

from bpqs.bks import (
    BKSInstance,
    EmptyParty,
    LocalStrategy,
    bks_admissible,
    bks_instance,
    verify_local_strategy,
)
from bpqs.catalog import Context, builtin

from gen import abstract_bks, float_orth_table, geometric_bks, table_orth
from oracles import brute_bks_admissible

COMP = Context.from_rays([(1, 0, 0), (0, 1, 0), (0, 0, 1)], "z")


def test_shared_basis_same_pick():
    res = bks_admissible(([COMP], [COMP]))
    assert res.admissible
    s = res.strategy
    assert s.alice_choice == s.bob_choice
    assert verify_local_strategy(([COMP], [COMP]), s)
    assert not verify_local_strategy(([COMP], [COMP]), LocalStrategy((0,), (1,)))


@pytest.mark.parametrize("name", ["magic-square-scenario", "qutrit-scenario"])
def test_builtin_scenarios_are_bks(name):
    res = bks_admissible(builtin(name))
    assert res.is_bks_set
    assert res.strategy is None


def test_empty_party():
    with pytest.raises(EmptyParty):
        bks_admissible(([COMP], []))


def test_no_intra_party_constraint():
    # Alice's two contexts are orthogonal to each other element-wise except
    # for shared rays, yet with no Bob constraint anything goes.
    other = Context.from_rays([(1, 1, 0), (1, -1, 0), (0, 0, 1)], "w")
    res = bks_admissible(([COMP, other], [COMP]))
    assert res.admissible
    assert verify_local_strategy(([COMP, other], [COMP]), res.strategy)


def test_agrees_with_brute_force_abstract():
    rng = random.Random(17)
    seen = set()
    for _ in range(150):
        inst = abstract_bks(rng)
        expect = brute_bks_admissible(inst.alice_sizes, inst.bob_sizes, table_orth(inst))
        res = bks_admissible(inst)
        assert res.admissible == expect
        if res.admissible:
            assert verify_local_strategy(inst, res.strategy)
        seen.add(expect)
    assert seen == {True, False}


def test_agrees_with_brute_force_geometric():
    rng = random.Random(23)
    seen = set()
    for _ in range(80):
        alice, bob = geometric_bks(rng)
        expect = brute_bks_admissible(
            [len(c) for c in alice], [len(c) for c in bob], float_orth_table(alice, bob)
        )
        assert bks_admissible((alice, bob)).admissible == expect
        seen.add(expect)
    assert True in seen


def _swap(inst: BKSInstance) -> BKSInstance:
    return BKSInstance(inst.bob_sizes, inst.alice_sizes, inst.allowed_rev())


def test_invariance_under_context_permutation_and_swap():
    rng = random.Random(31)
    for _ in range(60):
        alice, bob = geometric_bks(rng)
        base = bks_admissible((alice, bob)).admissible
        a2, b2 = alice[:], bob[:]
        rng.shuffle(a2)
        rng.shuffle(b2)
        assert bks_admissible((a2, b2)).admissible == base
        assert bks_admissible((bob, alice)).admissible == base
    sc = builtin("magic-square-scenario")
    assert not bks_admissible((sc.bob_contexts, sc.alice_contexts)).admissible
    for _ in range(60):
        inst = abstract_bks(rng)
        assert bks_admissible(_swap(inst)).admissible == bks_admissible(inst).admissible


def test_swap_of_table_is_transpose():
    sc = builtin("qutrit-scenario")
    inst = bks_instance(sc)
    assert bks_instance((sc.bob_contexts, sc.alice_contexts)) == _swap(inst)


def test_monotonicity_on_sub_scenarios():
    rng = random.Random(37)
    for name in ["magic-square-scenario", "qutrit-scenario"]:
        sc = builtin(name)
        for _ in range(25):
            xs = sorted(rng.sample(range(sc.n_x), rng.randint(1, sc.n_x)))
            ys = sorted(rng.sample(range(sc.n_y), rng.randint(1, sc.n_y)))
            sub = sc.sub_scenario(xs, ys)
            res = bks_admissible(sub)
            if res.admissible:
                xs2 = [x for x in xs if rng.random() < 0.7] or xs[:1]
                ys2 = [y for y in ys if rng.random() < 0.7] or ys[:1]
                keep_x = [xs.index(x) for x in xs2]
                keep_y = [ys.index(y) for y in ys2]
                # restricting a witness gives a witness for the smaller pair
                s = LocalStrategy(
                    tuple(res.strategy.alice_choice[i] for i in keep_x),
                    tuple(res.strategy.bob_choice[j] for j in keep_y),
                )
                smaller = sc.sub_scenario(xs2, ys2)
                assert verify_local_strategy(smaller, s)
                assert bks_admissible(smaller).admissible
