import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import additive_profile, additive_profiles
from fairsplit.bundles import MinimalBundleFamily, is_acceptable, minimal_bundles
from fairsplit.experiments import random_separable_table_profile
from fairsplit.model import ObjectSet, ObjectUniverse, PreferenceModel, Profile
from fairsplit.oracle import Split, classify_split, enumerate_ef_splits
from fairsplit.trace import Accepted, ComplementPair, ContestedPile, GenerationPick, ProposalSelected, TieBroken, Undercut
from fairsplit.undercut import (
    InternalInvariantViolation,
    Outcome,
    TieError,
    generation_phase,
    original_undercut,
    propose,
    rank_bundles,
    respond,
    run,
    run_core,
    simplified_undercut,
)


def fmt(profile, s):
    return profile.universe.format(s)


# -- generation phase --------------------------------------------------------


def test_generation_counterexample(counterexample):
    g = generation_phase(counterexample)
    u = counterexample.universe
    assert fmt(counterexample, g.alloc1) == "{a}"
    assert fmt(counterexample, g.alloc2) == "{b}"
    assert fmt(counterexample, g.pile) == "{c,d}"
    picks = [e for e in g.trace if isinstance(e, GenerationPick)]
    assert picks == [GenerationPick(1, u.index("a")), GenerationPick(2, u.index("b"))]
    assert g.trace[-1] == ContestedPile(u.set("cd"))


def test_generation_disjoint_tops():
    p = additive_profile([2, 1], [1, 2])
    g = generation_phase(p)
    assert (fmt(p, g.alloc1), fmt(p, g.alloc2), len(g.pile)) == ("{a}", "{b}", 0)


def test_generation_identical_preferences():
    p = additive_profile([2, 1], [2, 1])
    g = generation_phase(p)
    assert fmt(p, g.pile) == "{a,b}"
    assert len(g.alloc1) == len(g.alloc2) == 0


def test_generation_ties():
    p = additive_profile([3, 3, 1], [1, 2, 3])
    with pytest.raises(TieError) as err:
        generation_phase(p)
    assert err.value.agent == 1 and err.value.objects.members() == (0, 1)
    g = generation_phase(p, tie_break="index")
    assert TieBroken(1, p.universe.set("ab"), 0) in g.trace
    # round 1: a (tie broken) and c; round 2: both name b
    assert (fmt(p, g.alloc1), fmt(p, g.alloc2), fmt(p, g.pile)) == ("{a}", "{c}", "{b}")


@given(additive_profiles(max_n=8, hi=5))
def test_generation_partitions_universe(p):
    g = generation_phase(p, tie_break="index")
    assert g.alloc1.mask | g.alloc2.mask | g.pile.mask == (1 << p.n) - 1
    assert not (g.alloc1.mask & g.alloc2.mask or g.alloc1.mask & g.pile.mask or g.alloc2.mask & g.pile.mask)
    assert len(g.alloc1) == len(g.alloc2)


def test_generation_ignores_claims(counterexample):
    assert generation_phase(counterexample.with_claims((3, 1))) == generation_phase(counterexample)


# -- propose -----------------------------------------------------------------


def _family(universe, agent, sets, ground=None):
    ground = ground or universe.full()
    return MinimalBundleFamily(agent, ground, tuple(universe.set(s) for s in sets))


def test_propose_families_differ():
    u = ObjectUniverse(("a", "b", "c", "d"))
    u1, u2 = PreferenceModel.additive([4, 3, 2, 1]), PreferenceModel.additive([1, 4, 3, 2])
    mb1 = _family(u, 1, ["ad", "bc"])
    mb2 = _family(u, 2, ["bc"])
    # {a,d} and {b,c} tie at 5 for agent 1; canonical order puts {a,d} first
    assert propose(mb1, mb2, u1, u2) == ProposalSelected(1, u.set("ad"))


def test_propose_scan_skips_shared_bundles(counterexample):
    u = counterexample.universe
    full = u.full()
    mb1 = minimal_bundles(counterexample.prefs[0], full, agent=1)
    mb2 = minimal_bundles(counterexample.prefs[1], full, agent=2)
    p1, p2 = counterexample.prefs
    assert propose(mb1, mb2, p1, p2, first=1) == ProposalSelected(1, u.set("ad"))
    # agent 2's cheapest bundle {a,b} is shared, then agent 1's {a,d} at the same rank
    assert propose(mb1, mb2, p1, p2, first=2) == ProposalSelected(1, u.set("ad"))
    # descending ranks: {a,b} (7) shared, {b,c} (7) shared, then {a,c} (6)
    assert propose(mb1, mb2, p1, p2, first=1, order="descending") == ProposalSelected(1, u.set("ac"))


def test_propose_equal_families_without_complement_pair():
    u = ObjectUniverse(("c", "d"))
    f = _family(u, 1, ["c"])
    assert propose(f, _family(u, 2, ["c"]), PreferenceModel.additive([2, 1]), PreferenceModel.additive([3, 2])) is None


def test_propose_complement_pair():
    p = additive_profile([1, 1], [1, 1])
    full = p.universe.full()
    mb1 = minimal_bundles(p.prefs[0], full, agent=1)
    mb2 = minimal_bundles(p.prefs[1], full, agent=2)
    assert propose(mb1, mb2, *p.prefs) == ComplementPair(p.universe.set("a"))


def test_propose_rejects_mismatched_grounds():
    u = ObjectUniverse(("a", "b"))
    pref = PreferenceModel.additive([1, 1])
    with pytest.raises(ValueError):
        propose(_family(u, 1, ["a"]), _family(u, 2, ["a"], ground=u.set("a")), pref, pref)


def test_rank_bundles_orders(counterexample):
    u = counterexample.universe
    fam = minimal_bundles(counterexample.prefs[0], u.full())
    asc = [fmt(counterexample, b) for b in rank_bundles(fam, counterexample.prefs[0])]
    desc = [fmt(counterexample, b) for b in rank_bundles(fam, counterexample.prefs[0], "descending")]
    assert asc == ["{a,d}", "{b,c}", "{a,c}", "{a,b}"]
    assert desc == ["{a,b}", "{a,c}", "{a,d}", "{b,c}"]


# -- respond -----------------------------------------------------------------


def test_respond_accepts(counterexample):
    u = counterexample.universe
    assert respond(counterexample, u.full(), 1, u.set("ad")) == Accepted(2)


def test_respond_accepts_at_indifference():
    p = additive_profile([3, 1, 2], [1, 1, 2])
    u = p.universe
    # agent 2: {c} is worth 2, {a,b} is worth 2
    assert respond(p, u.full(), 1, u.set("ab")) == Accepted(2)


def test_respond_undercuts():
    p = additive_profile([3, 2, 2], [4, 3, 1])
    u = p.universe
    full = u.full()
    # agent 1 proposes {a,b}: agent 2 values it 7 against 1, and {a} (4 >= 4) is acceptable
    assert respond(p, full, 1, u.set("ab")) == Undercut(2, u.set("a"))
    assert classify_split(p, Split(u.set("bc"), u.set("a"))).verdict == "ef_nontrivial"


def test_respond_without_acceptable_subset_raises():
    # off-contract call: {a} is in agent 2's family, so nothing below it is acceptable
    p = additive_profile([1, 1], [5, 1])
    u = p.universe
    with pytest.raises(InternalInvariantViolation):
        respond(p, u.full(), 1, u.set("a"))


# -- whole procedures --------------------------------------------------------


def test_simplified_counterexample(counterexample):
    o = simplified_undercut(counterexample)
    assert o.classification == "ef_nontrivial"
    assert (fmt(counterexample, o.split.to_agent1), fmt(counterexample, o.split.to_agent2)) == ("{a,d}", "{b,c}")
    assert o.proposer == 1


def test_run_core_counterexample(counterexample):
    o = run_core(counterexample, counterexample.universe.full())
    assert o.classification == "ef_nontrivial"
    assert fmt(counterexample, o.split.to_agent1) == "{a,d}"


def test_single_object_no_ef():
    p = additive_profile([3], [5])
    assert simplified_undercut(p).classification == "no_ef_exists"
    assert run_core(p, p.universe.full()).classification == "no_ef_exists"


def test_symmetric_two_objects_trivial():
    p = additive_profile([1, 1], [1, 1])
    o = simplified_undercut(p)
    assert o.classification == "ef_trivial"
    assert {fmt(p, o.split.to_agent1), fmt(p, o.split.to_agent2)} == {"{a}", "{b}"}
    assert o.proposer is None


def test_original_counterexample_deadlocks(counterexample):
    o = original_undercut(counterexample)
    assert o.classification == "deadlock" and o.split is None
    assert ContestedPile(counterexample.universe.set("cd")) in o.trace


def test_original_empty_pile():
    p = additive_profile([2, 1], [1, 2])
    o = original_undercut(p)
    assert o.classification == "ef_nontrivial"
    assert (fmt(p, o.split.to_agent1), fmt(p, o.split.to_agent2)) == ("{a}", "{b}")


def test_original_identical_preferences_deadlock():
    p = additive_profile([2, 1], [2, 1])
    o = original_undercut(p)
    assert o.classification == "deadlock"
    assert enumerate_ef_splits(p) == []


def test_original_example1(example1):
    # h takes d1, w takes c, d2 alone is contested and nobody can split it
    o = original_undercut(example1)
    assert o.classification == "deadlock"
    assert ContestedPile(example1.universe.set(["d2"])) in o.trace


def test_run_dispatch(counterexample):
    assert run(counterexample, "original").classification == "deadlock"
    with pytest.raises(ValueError):
        run(counterexample, "other")
    with pytest.raises(ValueError):
        simplified_undercut(counterexample, first=3)
    with pytest.raises(ValueError):
        simplified_undercut(counterexample, order="random")


def test_outcome_invariant():
    with pytest.raises(ValueError):
        Outcome(None, "ef_trivial", None, ())
    with pytest.raises(ValueError):
        Outcome(None, "maybe", None, ())


def test_not_all_desirable_noted():
    p = additive_profile([0, 2], [1, 1])
    o = simplified_undercut(p)
    assert any(type(e).__name__ == "Note" for e in o.trace)


def test_run_core_on_pile(counterexample):
    o = run_core(counterexample, counterexample.universe.set("cd"))
    assert o.classification == "no_ef_exists"
    with pytest.raises(ValueError):
        run_core(counterexample, counterexample.universe.empty())


def test_unequal_claims_guard_never_returns_non_ef_split():
    p = Profile(
        ObjectUniverse(("house", "car", "boat", "piano", "art")),
        (PreferenceModel.additive([9, 4, 3, 2, 6]), PreferenceModel.additive([8, 5, 1, 4, 2])),
        (2, 1),
    )
    o = simplified_undercut(p)
    assert o.classification == "deadlock"
    assert isinstance(o.trace[-3], Undercut)


# -- properties --------------------------------------------------------------


@given(additive_profiles(max_n=7))
@settings(max_examples=200)
def test_outcomes_agree_with_oracle(p):
    efs = enumerate_ef_splits(p)
    for first in (1, 2):
        o = simplified_undercut(p, first)
        assert o.found == bool(efs)
        if o.found:
            assert classify_split(p, o.split).verdict == o.classification


@given(additive_profiles(max_n=7, hi=5))
@settings(max_examples=200)
def test_first_agent_symmetry(p):
    assert simplified_undercut(p, 1).classification == simplified_undercut(p, 2).classification


@given(additive_profiles(max_n=6), st.sampled_from(["ascending", "descending"]))
def test_determinism(p, order):
    assert simplified_undercut(p, order=order) == simplified_undercut(p, order=order)
    assert original_undercut(p, tie_break="index") == original_undercut(p, tie_break="index")


@given(additive_profiles(max_n=7))
@settings(max_examples=150)
def test_nontrivial_for_some_order_iff_families_differ(p):
    full = p.universe.full()
    differ = not minimal_bundles(p.prefs[0], full).same_sets(minimal_bundles(p.prefs[1], full))
    got = any(simplified_undercut(p, f).classification == "ef_nontrivial" for f in (1, 2))
    assert got == differ


def _undercut_checks(p):
    """Every proposal the core can reach, for both first agents."""
    full = p.universe.full()
    mb = {a: minimal_bundles(p.pref(a), full, agent=a) for a in (1, 2)}
    for proposer in (1, 2):
        for s in mb[proposer]:
            if s in mb[3 - proposer]:
                continue
            reply = respond(p, full, proposer, s)
            if isinstance(reply, Undercut):
                t = reply.bundle
                assert t.issubset(s) and t != s
                assert is_acceptable(p.pref(3 - proposer), t, full)
                side1 = full - t if proposer == 1 else t
                assert classify_split(p, Split(side1, full - side1)).verdict != "not_ef"


@given(additive_profiles(max_n=7))
@settings(max_examples=200)
def test_undercut_availability_and_proposer_protection_additive(p):
    _undercut_checks(p)


@given(st.integers(0, 2**31), st.integers(2, 5))
@settings(max_examples=100)
def test_undercut_availability_separable_tables(seed, n):
    _undercut_checks(random_separable_table_profile(n, seed))


def test_original_found_implies_simplified_found():
    from fairsplit.experiments import profile_seed, random_additive_profile

    for i in range(300):
        p = random_additive_profile(2 + i % 6, seed=profile_seed(5, i))
        if original_undercut(p, tie_break="index").found:
            assert simplified_undercut(p).found
