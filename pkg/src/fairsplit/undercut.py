"""The undercut procedure for two agents, with and without the generation phase.

``original_undercut`` first hands out uncontested top objects one round at a
time and runs the minimal-bundle core on whatever both agents named in the
same round. ``simplified_undercut`` skips that phase and runs the core on
the whole universe.

The core: both agents compute minimal bundles over the ground set. If the
families differ, a bundle owned by one agent but not the other becomes the
proposal and the other agent accepts the complement or undercuts by taking
an acceptable proper subset of it. If the families coincide, a bundle whose
complement is also in the family gives a trivial split; otherwise no
envy-free split exists (for separable preferences).
"""

from __future__ import annotations

from dataclasses import dataclass

from .bundles import MinimalBundleFamily, is_acceptable, minimal_bundles
from .model import ObjectSet, PreferenceModel, Profile, all_desirable, canonical_key, other, submasks
from .oracle import Split, _relation, _verdict, classify_split
from .trace import (
    Accepted,
    ComplementPair,
    Contested,
    ContestedPile,
    GenerationPick,
    MinimalBundlesComputed,
    Note,
    ProposalSelected,
    Start,
    TieBroken,
    Trace,
    Undercut,
    Verdict,
)

EF_CLASSES = ("ef_trivial", "ef_nontrivial")
CLASSIFICATIONS = EF_CLASSES + ("no_ef_exists", "deadlock")
BUNDLE_ORDERS = ("ascending", "descending")

# propose() results reuse the trace events they are logged as
TrivialSplitFound = ComplementPair


class TieError(ValueError):
    def __init__(self, agent: int, objects: ObjectSet):
        self.agent = agent
        self.objects = objects
        super().__init__(f"agent {agent} has tied top objects {objects.members()} in the generation phase")


class InternalInvariantViolation(RuntimeError):
    pass


class ReplayError(ValueError):
    pass


@dataclass(frozen=True)
class Outcome:
    """Result of a procedure run.

    ``split`` is present exactly when ``classification`` is ``ef_trivial`` or
    ``ef_nontrivial``. For ``run_core`` on a proper ground set the split
    covers that ground set only.
    """

    split: Split | None
    classification: str
    proposer: int | None
    trace: Trace

    def __post_init__(self):
        if self.classification not in CLASSIFICATIONS:
            raise ValueError(f"unknown classification {self.classification!r}")
        if (self.split is not None) != (self.classification in EF_CLASSES):
            raise ValueError("a split is present exactly for envy-free classifications")

    @property
    def found(self) -> bool:
        return self.split is not None


@dataclass(frozen=True)
class GenerationResult:
    alloc1: ObjectSet
    alloc2: ObjectSet
    pile: ObjectSet
    trace: Trace


def _named_object(pref: PreferenceModel, pool: list[int], agent: int, tie_break: str, events: list):
    best = max(pref.singleton(i) for i in pool)
    tied = [i for i in pool if pref.singleton(i) == best]
    if len(tied) > 1:
        tied_set = ObjectSet.of(tied, pref.n)
        if tie_break == "strict":
            raise TieError(agent, tied_set)
        events.append(TieBroken(agent, tied_set, tied[0]))
    return tied[0]


def generation_phase(profile: Profile, tie_break: str = "strict") -> GenerationResult:
    """Round-by-round top-object picks; objects named by both agents go to the pile.

    Claims play no role here. ``tie_break="index"`` resolves a tie among an
    agent's top remaining objects in favour of the smallest index and logs it.
    """
    if tie_break not in ("strict", "index"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    n = profile.n
    pool = list(range(n))
    alloc = [0, 0]
    pile = 0
    events: list = []
    while pool:
        n1 = _named_object(profile.prefs[0], pool, 1, tie_break, events)
        n2 = _named_object(profile.prefs[1], pool, 2, tie_break, events)
        if n1 == n2:
            events.append(Contested(n1))
            pile |= 1 << n1
            pool.remove(n1)
        else:
            events += [GenerationPick(1, n1), GenerationPick(2, n2)]
            alloc[0] |= 1 << n1
            alloc[1] |= 1 << n2
            pool.remove(n1)
            pool.remove(n2)
    events.append(ContestedPile(ObjectSet(pile, n)))
    return GenerationResult(ObjectSet(alloc[0], n), ObjectSet(alloc[1], n), ObjectSet(pile, n), tuple(events))


def rank_bundles(family: MinimalBundleFamily, pref: PreferenceModel, order: str = "ascending") -> list[ObjectSet]:
    """The family sorted by the owner's utility, ties broken canonically."""
    if order not in BUNDLE_ORDERS:
        raise ValueError(f"unknown bundle order {order!r}")
    sign = 1 if order == "ascending" else -1
    return sorted(family.bundles, key=lambda b: (sign * pref.utility(b), b.canonical_key()))


def propose(
    mb1: MinimalBundleFamily,
    mb2: MinimalBundleFamily,
    pref1: PreferenceModel,
    pref2: PreferenceModel,
    first: int = 1,
    order: str = "ascending",
) -> ProposalSelected | ComplementPair | None:
    """Pick the proposal, a trivial split, or nothing.

    When the families differ, rank positions are scanned in turn, ``first``
    agent before the other at each position, and the first bundle missing
    from the other agent's family is proposed by its owner. When they
    coincide, the canonically first bundle whose complement is also in the
    family is returned as ``ComplementPair``; ``None`` means no proposal.
    """
    if mb1.ground != mb2.ground:
        raise ValueError("families were computed over different ground sets")
    fams = {1: mb1, 2: mb2}
    if not mb1.same_sets(mb2):
        ranked = {1: rank_bundles(mb1, pref1, order), 2: rank_bundles(mb2, pref2, order)}
        depth = max(len(mb1), len(mb2))
        for k in range(depth):
            for agent in (first, other(first)):
                if k < len(ranked[agent]):
                    b = ranked[agent][k]
                    if b not in fams[other(agent)]:
                        return ProposalSelected(agent, b)
        raise InternalInvariantViolation("families differ but every bundle is shared")
    ground = mb1.ground
    masks = mb1.masks()
    for b in mb1.bundles:
        if (ground.mask & ~b.mask) in masks:
            return ComplementPair(b)
    return None


def respond(profile: Profile, ground: ObjectSet, proposer: int, s: ObjectSet) -> Accepted | Undercut:
    """The other agent accepts ``ground - s`` or takes its best acceptable proper subset of ``s``."""
    responder = other(proposer)
    pref = profile.pref(responder)
    claims = profile.claims_for(responder)
    if is_acceptable(pref, ground - s, ground, claims):
        return Accepted(responder)
    best = None
    for t in submasks(s.mask):
        if t == s.mask:
            continue
        ts = ObjectSet(t, s.n)
        if is_acceptable(pref, ts, ground, claims):
            key = (-pref.utility(ts), canonical_key(t))
            if best is None or key < best[0]:
                best = (key, ts)
    if best is None:
        raise InternalInvariantViolation(
            f"agent {responder} rejects the proposal but has no acceptable proper subset of it"
        )
    return Undercut(responder, best[1])


def classify_within(profile: Profile, split: Split) -> str:
    """Envy verdict of a split of ``split.ground`` rather than the whole universe."""
    rel = []
    for agent in (1, 2):
        own, oth = profile.claims_for(agent)
        pref = profile.pref(agent)
        rel.append(_relation(own, oth, pref.utility(split.side(agent)), pref.utility(split.side(other(agent)))))
    return _verdict(*rel)


def _core(profile: Profile, ground: ObjectSet, first: int, order: str, events: list):
    """Run the minimal-bundle core, logging to ``events``.

    Returns ``(split of ground or None, proposer, status)`` where status is a
    verdict over the ground, ``"no_proposal"`` or ``"stalled"``.
    """
    fams = {}
    for agent in (1, 2):
        fams[agent] = minimal_bundles(profile.pref(agent), ground, profile.claims_for(agent), agent=agent)
        events.append(MinimalBundlesComputed(agent, fams[agent].bundles))
    choice = propose(fams[1], fams[2], profile.prefs[0], profile.prefs[1], first, order)
    if choice is None:
        return None, None, "no_proposal"
    events.append(choice)
    if isinstance(choice, ComplementPair):
        split = Split.of(choice.bundle, ground)
        proposer = None
    else:
        proposer, s = choice.proposer, choice.bundle
        try:
            reply = respond(profile, ground, proposer, s)
        except InternalInvariantViolation:
            if profile.claims[0] == profile.claims[1]:
                raise
            events.append(Note("responder can neither accept nor undercut under unequal claims"))
            return None, proposer, "stalled"
        events.append(reply)
        if isinstance(reply, Accepted):
            mine = s
        else:
            mine = ground - reply.bundle
        split = Split.of(mine, ground) if proposer == 1 else Split.of(ground - mine, ground)
    verdict = classify_within(profile, split)
    if verdict == "not_ef":
        events.append(Note("resulting split is not envy-free"))
        return None, proposer, "stalled"
    return split, proposer, verdict


def _check_args(first: int, order: str):
    if first not in (1, 2):
        raise ValueError(f"first must be 1 or 2, got {first!r}")
    if order not in BUNDLE_ORDERS:
        raise ValueError(f"unknown bundle order {order!r}")


def run_core(profile: Profile, ground: ObjectSet, first: int = 1, order: str = "ascending") -> Outcome:
    if len(ground) == 0:
        raise ValueError("ground set must be non-empty")
    _check_args(first, order)
    events: list = [Start("core", first), ContestedPile(ground)]
    split, proposer, status = _core(profile, ground, first, order, events)
    if split is None:
        verdict = "no_ef_exists" if status == "no_proposal" else "deadlock"
        proposer = None
    else:
        verdict = status
    events.append(Verdict(verdict))
    return Outcome(split, verdict, proposer, tuple(events))


def simplified_undercut(profile: Profile, first: int = 1, order: str = "ascending") -> Outcome:
    """Run the core with the whole universe as the contested pile."""
    _check_args(first, order)
    events: list = [Start("simplified", first)]
    for agent in (1, 2):
        rep = all_desirable(profile.pref(agent))
        if not rep.holds:
            events.append(Note(f"agent {agent} does not value object {profile.universe.names[rep.witness['object']]}"))
    ground = profile.universe.full()
    events.append(ContestedPile(ground))
    split, proposer, status = _core(profile, ground, first, order, events)
    if split is None:
        verdict = "no_ef_exists" if status == "no_proposal" else "deadlock"
        proposer = None
    else:
        verdict = status
    events.append(Verdict(verdict))
    return Outcome(split, verdict, proposer, tuple(events))


def original_undercut(
    profile: Profile, first: int = 1, tie_break: str = "strict", order: str = "ascending"
) -> Outcome:
    """Generation phase, then the core on the contested pile.

    Ends in ``deadlock`` when the core finds nothing on the pile or the
    merged split of the universe is not envy-free.
    """
    _check_args(first, order)
    gen = generation_phase(profile, tie_break)
    events: list = [Start("original", first), *gen.trace]
    proposer = None
    if len(gen.pile) == 0:
        split = Split(gen.alloc1, gen.alloc2)
    else:
        core_split, proposer, _ = _core(profile, gen.pile, first, order, events)
        if core_split is None:
            events.append(Verdict("deadlock"))
            return Outcome(None, "deadlock", None, tuple(events))
        split = Split(gen.alloc1 | core_split.to_agent1, gen.alloc2 | core_split.to_agent2)
    verdict = classify_split(profile, split).verdict
    if verdict == "not_ef":
        events += [Note("final split is not envy-free"), Verdict("deadlock")]
        return Outcome(None, "deadlock", None, tuple(events))
    events.append(Verdict(verdict))
    return Outcome(split, verdict, proposer, tuple(events))


def run(
    profile: Profile,
    procedure: str = "simplified",
    first: int = 1,
    tie_break: str = "strict",
    order: str = "ascending",
) -> Outcome:
    if procedure == "simplified":
        return simplified_undercut(profile, first, order)
    if procedure == "original":
        return original_undercut(profile, first, tie_break, order)
    raise ValueError(f"unknown procedure {procedure!r}")


def replay(profile: Profile, trace: Trace) -> Outcome:
    """Rebuild the outcome a trace describes and check it against ``profile``.

    Minimal-bundle families are recomputed and must match, undercut and
    accept steps must be legal responses, and the final verdict must agree
    with a direct envy check of the reconstructed split.
    """
    trace = tuple(trace)
    if not trace or not isinstance(trace[0], Start):
        raise ReplayError("trace must begin with START")
    if not isinstance(trace[-1], Verdict):
        raise ReplayError("trace must end with VERDICT")
    procedure = trace[0].procedure
    verdict = trace[-1].classification
    if verdict not in CLASSIFICATIONS:
        raise ReplayError(f"unknown verdict {verdict!r}")
    n = profile.n
    alloc = {1: 0, 2: 0}
    ground = None
    side1 = None
    proposer = None
    pending = None
    for ev in trace[1:-1]:
        if isinstance(ev, GenerationPick):
            alloc[ev.agent] |= 1 << ev.obj
        elif isinstance(ev, ContestedPile):
            ground = ev.pile
        elif isinstance(ev, MinimalBundlesComputed):
            if ground is None:
                raise ReplayError("minimal bundles logged before the pile")
            fam = minimal_bundles(profile.pref(ev.agent), ground, profile.claims_for(ev.agent), agent=ev.agent)
            if fam.bundles != ev.bundles:
                raise ReplayError(f"minimal bundles of agent {ev.agent} do not match the profile")
        elif isinstance(ev, ComplementPair):
            side1 = ev.bundle
        elif isinstance(ev, ProposalSelected):
            proposer, pending = ev.proposer, ev.bundle
        elif isinstance(ev, (Accepted, Undercut)):
            if pending is None or ground is None:
                raise ReplayError("response without a proposal")
            expected = respond(profile, ground, proposer, pending)
            if expected != ev:
                raise ReplayError(f"logged response {ev} differs from the legal response {expected}")
            mine = pending if isinstance(ev, Accepted) else ground - ev.bundle
            side1 = mine if proposer == 1 else ground - mine
    if verdict not in EF_CLASSES:
        return Outcome(None, verdict, None, trace)
    if ground is None:
        raise ReplayError("trace has no PILE event")
    if side1 is None:
        if len(ground):
            raise ReplayError("envy-free verdict without a split in the trace")
        side1 = ground
    core = Split.of(side1, ground)
    if procedure == "core":
        split = core
        check = classify_within(profile, split)
    else:
        split = Split(ObjectSet(alloc[1], n) | core.to_agent1, ObjectSet(alloc[2], n) | core.to_agent2)
        check = classify_split(profile, split).verdict
    if check != verdict:
        raise ReplayError(f"trace claims {verdict} but the split is {check}")
    return Outcome(split, verdict, proposer, trace)
